#include <sys/wait.h>

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "topiclens/server.hpp"
#include "toy.hpp"

using namespace topiclens;
using topiclens::testing::TempDir;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(TOPICLENS_BINARY) + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("validate") == 2);
  CHECK(run("compute /tmp --seed notanumber") == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE("validate exit codes") {
  TempDir dir;
  testing::write_toy_bundle(dir / "good");
  CHECK(run("validate " + (dir / "good").string()) == 0);
  CHECK(run("validate --json " + (dir / "good").string()) == 0);
  CorpusBundle bad = testing::toy_bundle();
  bad.documents[1].id = "d0";
  save_bundle(bad, dir / "bad");
  CHECK(run("validate " + (dir / "bad").string()) == 1);
  CHECK(run("validate " + (dir / "missing").string()) == 1);
}

TEST_CASE("compute is byte-identical across runs") {
  TempDir dir;
  const auto bundle = testing::write_toy_bundle(dir / "b");
  const auto cache = bundle / ".cache" / "interpretation.json";
  REQUIRE(run("compute " + bundle.string() + " --seed 7") == 0);
  const std::string first = slurp(cache);
  REQUIRE(run("compute " + bundle.string() + " --seed 7") == 0);
  CHECK(slurp(cache) == first);
  REQUIRE(run("compute " + bundle.string() + " --seed 8") == 0);
  CHECK(slurp(cache) != first);
}

TEST_CASE("figures export into a directory") {
  TempDir dir;
  const auto bundle = testing::write_toy_bundle(dir / "b");
  std::ofstream(dir / "palette.json") << R"(["#000000", "#ff0000"])";
  REQUIRE(run("figures " + bundle.string() + " " + (dir / "out").string() + " --width 640 --height 480 --palette-file " +
              (dir / "palette.json").string()) == 0);
  CHECK(std::filesystem::exists(dir / "out" / "topic_map.svg"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "figures_manifest.json"));
  CHECK(manifest["files"].size() == 19);
  CHECK(slurp(dir / "out" / "topic_map.svg").find("#ff0000") != std::string::npos);
}

TEST_CASE("pack writes binary, bundle, cache and Dockerfile") {
  TempDir dir;
  const auto bundle = testing::write_toy_bundle(dir / "b");
  REQUIRE(run("pack " + bundle.string() + " " + (dir / "pack").string()) == 0);
  CHECK(std::filesystem::exists(dir / "pack" / "bin" / "topiclens"));
  CHECK(std::filesystem::exists(dir / "pack" / "bundle" / ".cache" / "interpretation.json"));
  CHECK(slurp(dir / "pack" / "Dockerfile").find("FROM ubuntu:22.04") != std::string::npos);
  CHECK(run("pack " + bundle.string() + " " + (dir / "pack").string()) == 1);
}

TEST_CASE("serve answers until terminated") {
  TempDir dir;
  const auto bundle = testing::write_toy_bundle(dir / "b");
  const int port = 20000 + static_cast<int>(::getpid() % 20000);
  const auto pidfile = dir / "pid";
  const std::string cmd = std::string(TOPICLENS_BINARY) + " serve " + bundle.string() + " --host 127.0.0.1 --port " +
                          std::to_string(port) + " --precompute >/dev/null 2>&1 & echo $! > " + pidfile.string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  httplib::Client client("127.0.0.1", port);
  httplib::Result meta;
  for (int attempt = 0; attempt < 100 && !meta; ++attempt) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    meta = client.Get("/api/meta");
  }
  REQUIRE(meta);
  CHECK(meta->status == 200);
  CHECK(nlohmann::json::parse(meta->body)["n_topics"] == 3);
  const std::string pid = slurp(pidfile);
  CHECK(std::system(("kill " + pid).c_str()) == 0);
}

TEST_CASE("serve reuses the cache written by compute") {
  TempDir dir;
  const auto bundle = testing::write_toy_bundle(dir / "b");
  REQUIRE(run("compute " + bundle.string()) == 0);
  server::SessionOptions options;
  options.precompute = true;
  const auto session = server::ApiSession::open(bundle, options);
  CHECK(session->cache_loaded_from_disk());
  CHECK(session->maps_computed() == 0);
}
