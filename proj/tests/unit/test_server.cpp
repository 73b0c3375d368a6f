#include <fstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "topiclens/server.hpp"
#include "toy.hpp"

using namespace topiclens;
using namespace topiclens::server;
using topiclens::testing::TempDir;
using json = nlohmann::json;

namespace {

json body(const ApiResponse& r) { return json::parse(r.body); }

std::unique_ptr<ApiSession> open_toy(const TempDir& dir, bool precompute = true) {
  testing::write_toy_bundle(dir.path());
  SessionOptions options;
  options.precompute = precompute;
  return ApiSession::open(dir.path(), options);
}

}  // namespace

TEST_CASE("meta reports shape and hash") {
  TempDir dir;
  auto s = open_toy(dir);
  const auto r = s->handle("GET", "/api/meta");
  CHECK(r.status == 200);
  const auto j = body(r);
  CHECK(j.size() == 5);
  CHECK(j["n_topics"] == 3);
  CHECK(j["n_docs"] == 5);
  CHECK(j["n_terms"] == 6);
  CHECK(j["has_groups"] == true);
  CHECK(j["bundle_hash"] == bundle_hash(dir.path()));
}

TEST_CASE("topics list and detail") {
  TempDir dir;
  auto s = open_toy(dir);
  const auto list = body(s->handle("GET", "/api/topics"));
  REQUIRE(list.size() == 3);
  CHECK(list[0]["name"] == "Topic 0");
  CHECK(list[0]["importance"].get<double>() == doctest::Approx(5.95));
  CHECK(list[0]["top_terms"][0]["term"] == "apple");
  CHECK(list[1]["top_terms"][0]["term"] == "data science");
  CHECK(s->handle("GET", "/api/topics/3").status == 404);
  CHECK(s->handle("GET", "/api/topics/x").status == 404);
  CHECK(body(s->handle("GET", "/api/topics/2"))["topic_id"] == 2);
  CHECK(s->handle("GET", "/api/topics/0/wordcloud").status == 200);
}

TEST_CASE("rename persists and validates") {
  TempDir dir;
  {
    auto s = open_toy(dir);
    auto r = s->handle("PATCH", "/api/topics/1/name", {}, R"({"name":"Computing"})");
    CHECK(r.status == 200);
    CHECK(body(r)["name"] == "Computing");
    CHECK(body(s->handle("GET", "/api/topics"))[1]["name"] == "Computing");
    CHECK(s->handle("PATCH", "/api/topics/1/name", {}, R"({"name":"   "})").status == 422);
    CHECK(s->handle("PATCH", "/api/topics/1/name", {}, R"({"name":""})").status == 422);
    CHECK(s->handle("PATCH", "/api/topics/1/name", {}, "{\"name\":\"" + std::string(201, 'x') + "\"}").status == 422);
    CHECK(s->handle("PATCH", "/api/topics/1/name", {}, R"({"title":"x"})").status == 400);
    CHECK(s->handle("PATCH", "/api/topics/9/name", {}, R"({"name":"x"})").status == 404);
    CHECK(s->handle("GET", "/api/topics/1/name").status == 405);
  }
  SessionOptions options;
  auto reopened = ApiSession::open(dir.path(), options);
  CHECK(reopened->cache_loaded_from_disk());
  CHECK(body(reopened->handle("GET", "/api/topics/1"))["name"] == "Computing");
}

TEST_CASE("word detail") {
  TempDir dir;
  auto s = open_toy(dir);
  const auto j = body(s->handle("GET", "/api/words/0", {{"n_assoc", "2"}}));
  CHECK(j["term"] == "apple");
  REQUIRE(j["associations"].size() == 2);
  CHECK(j["associations"][0]["term"] == "banana");
  CHECK(j["embedding"].size() == 3);
  CHECK(j["distribution"]["values"].size() == 3);
  CHECK(s->handle("GET", "/api/words/6").status == 404);
  CHECK(s->handle("GET", "/api/words/0", {{"n_assoc", "-1"}}).status == 422);
}

TEST_CASE("document detail with snippet, highlights and timeline") {
  TempDir dir;
  auto s = open_toy(dir);
  auto j = body(s->handle("GET", "/api/documents/d0"));
  CHECK(j["snippet"] == "Apple banana apple cherry, apple pie.");
  CHECK(j["highlight_topic"] == 0);
  CHECK(j["highlights"].size() == 5);
  CHECK(j["topic_distribution"]["raw"].size() == 3);
  CHECK(j["timeline"]["window"] == 50);

  // A 9-character cut falls inside "banana" and is pulled back to its start.
  j = body(s->handle("GET", "/api/documents/d0", {{"snippet_chars", "9"}, {"window", "2"}, {"stride", "2"}}));
  CHECK(j["snippet"] == "Apple ");
  CHECK(j["highlights"].size() == 1);
  CHECK(j["timeline"]["windows"].size() == 3);

  j = body(s->handle("GET", "/api/documents/d0", {{"topic", "2"}}));
  CHECK(j["highlight_topic"] == 2);
  CHECK(s->handle("GET", "/api/documents/d0", {{"topic", "7"}}).status == 422);
  CHECK(s->handle("GET", "/api/documents/nope").status == 404);
  CHECK(s->handle("GET", "/api/documents/d0", {{"window", "0"}}).status == 422);
}

TEST_CASE("groups endpoints") {
  TempDir dir;
  auto s = open_toy(dir);
  const auto list = body(s->handle("GET", "/api/groups"));
  CHECK(list["groups"].size() == 2);
  const auto g = body(s->handle("GET", "/api/groups/tech"));
  CHECK(g["raw"][1].get<double>() == doctest::Approx(1.15));
  CHECK(g["wordcloud"][0]["term"] == "data science");
  CHECK(s->handle("GET", "/api/groups/none").status == 404);
}

TEST_CASE("maps are served from the precomputed cache") {
  TempDir dir;
  auto s = open_toy(dir);
  CHECK(s->maps_computed() == 4);
  for (const char* kind : {"topics", "words", "documents", "groups"}) {
    const auto r = s->handle("GET", std::string("/api/maps/") + kind);
    CHECK(r.status == 200);
    CHECK(body(r)["method"] == "umap");
  }
  CHECK(s->handle("GET", "/api/maps/planets").status == 404);

  SessionOptions options;
  auto again = ApiSession::open(dir.path(), options);
  CHECK(again->maps_computed() == 0);
  CHECK(again->handle("GET", "/api/maps/words").status == 200);
}

TEST_CASE("lazy maps build in the background") {
  TempDir dir;
  auto s = open_toy(dir, false);
  const auto first = s->handle("GET", "/api/maps/documents");
  CHECK((first.status == 202 || first.status == 200));
  const auto pca = s->handle("GET", "/api/maps/topics", {{"fallback", "pca"}});
  CHECK(pca.status == 200);
  s->wait_idle();
  const auto done = s->handle("GET", "/api/maps/documents");
  CHECK(done.status == 200);
  CHECK(body(done)["fallback"] == false);
}

TEST_CASE("bundles without groups answer 404 for group endpoints") {
  TempDir dir;
  CorpusBundle b = testing::toy_bundle();
  b.group_labels.reset();
  for (auto& d : b.documents) d.group.reset();
  save_bundle(b, dir.path());
  auto s = ApiSession::open(dir.path(), SessionOptions{true, {}, {}});
  CHECK(s->handle("GET", "/api/groups").status == 404);
  CHECK(s->handle("GET", "/api/maps/groups").status == 404);
  CHECK(body(s->handle("GET", "/api/meta"))["has_groups"] == false);
}

TEST_CASE("invalid bundles refuse to start") {
  TempDir dir;
  CorpusBundle b = testing::toy_bundle();
  b.vocabulary[1] = "apple";
  save_bundle(b, dir.path());
  CHECK_THROWS_AS(ApiSession::open(dir.path(), SessionOptions{}), StartupError);
}

TEST_CASE("http round trip") {
  TempDir dir;
  auto s = open_toy(dir);
  ServerOptions options;
  options.host = "127.0.0.1";
  options.port = 0;
  HttpServer http(*s, options);
  http.start();
  httplib::Client client("127.0.0.1", http.port());

  auto meta = client.Get("/api/meta");
  REQUIRE(meta);
  CHECK(meta->status == 200);
  CHECK(meta->get_header_value("X-Bundle-Hash") == s->bundle_hash());

  auto renamed = client.Patch("/api/topics/0/name", R"({"name":"Fruit"})", "application/json");
  REQUIRE(renamed);
  CHECK(renamed->status == 200);
  CHECK(json::parse(client.Get("/api/topics/0")->body)["name"] == "Fruit");

  auto doc = client.Get("/api/documents/d1?snippet_chars=4");
  REQUIRE(doc);
  CHECK(json::parse(doc->body)["snippet"] == "Data");

  auto index = client.Get("/");
  REQUIRE(index);
  CHECK(index->status == 200);
  CHECK(client.Get("/api/nothing")->status == 404);
  http.stop();
}

TEST_CASE("concurrent renames leave a consistent names file") {
  TempDir dir;
  auto s = open_toy(dir);
  std::vector<std::thread> threads;
  std::vector<int> status(100);
  for (int i = 0; i < 100; ++i) {
    threads.emplace_back([&, i] {
      const std::string name = "name-" + std::to_string(i);
      status[i] = s->handle("PATCH", "/api/topics/" + std::to_string(i % 3) + "/name", {},
                            json{{"name", name}}.dump()).status;
    });
  }
  for (auto& t : threads) t.join();
  for (int code : status) CHECK((code == 200 || code == 409));
  const auto names = load_bundle(dir.path()).topic_names;
  const auto served = body(s->handle("GET", "/api/topics"));
  for (std::size_t t = 0; t < 3; ++t) CHECK(served[t]["name"] == names[t]);
}

TEST_CASE("a five-character cut inside a token falls back to its start") {
  TempDir dir;
  auto s = open_toy(dir);
  const auto j = body(s->handle("GET", "/api/documents/d2", {{"snippet_chars", "5"}}));
  CHECK(j["snippet"] == "The ");
  CHECK(j["snippet_truncated"] == true);
  CHECK(j["highlights"].empty());
}

TEST_CASE("read endpoints are idempotent") {
  TempDir dir;
  auto s = open_toy(dir);
  for (const char* path : {"/api/meta", "/api/topics", "/api/topics/1", "/api/topics/2/wordcloud", "/api/maps/words",
                           "/api/words/3", "/api/documents/d3", "/api/groups", "/api/groups/fruit"}) {
    CAPTURE(path);
    const auto first = s->handle("GET", path);
    const auto second = s->handle("GET", path);
    CHECK(first.status == 200);
    CHECK(first.body == second.body);
  }
  CHECK(s->maps_computed() == 4);
}
