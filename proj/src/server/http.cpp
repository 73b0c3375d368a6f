#include <fstream>
#include <sstream>

#include "httplib.h"
#include "topiclens/server.hpp"

namespace topiclens::server {
namespace fs = std::filesystem;

namespace {

constexpr const char* kBuiltinIndex = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>topiclens</title></head>
<body><h1>topiclens</h1>
<p>The JSON API is served under <code>/api</code>: <a href="/api/meta">/api/meta</a>,
<a href="/api/topics">/api/topics</a>, <code>/api/maps/{topics|words|documents|groups}</code>,
<code>/api/words/{id}</code>, <code>/api/documents/{id}</code>, <code>/api/groups</code>.</p>
</body></html>
)";

std::string content_type_for(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".html") return "text/html; charset=utf-8";
  if (ext == ".js") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

}  // namespace

HttpServer::HttpServer(ApiSession& session, ServerOptions options)
    : session_(session), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  auto api = [this](const httplib::Request& req, httplib::Response& res) {
    Query query;
    for (const auto& [key, value] : req.params) query.emplace(key, value);
    ApiResponse out = session_.handle(req.method, req.path, query, req.body);
    res.status = out.status;
    res.set_header("X-Bundle-Hash", session_.bundle_hash());
    res.set_content(out.body, out.content_type);
  };
  server_->Get(R"(/api/.*)", api);
  server_->Patch(R"(/api/.*)", api);
  server_->Post(R"(/api/.*)", api);
  server_->Put(R"(/api/.*)", api);
  server_->Delete(R"(/api/.*)", api);

  server_->Get(R"(/(.*))", [this](const httplib::Request& req, httplib::Response& res) {
    res.set_header("X-Bundle-Hash", session_.bundle_hash());
    std::string rel = req.matches[1];
    if (rel.empty()) rel = "index.html";
    if (options_.static_dir) {
      const fs::path root = fs::weakly_canonical(*options_.static_dir);
      const fs::path file = fs::weakly_canonical(root / rel);
      const auto [r, f] = std::mismatch(root.begin(), root.end(), file.begin(), file.end());
      if (r == root.end() && fs::is_regular_file(file)) {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream data;
        data << in.rdbuf();
        res.set_content(data.str(), content_type_for(file));
        return;
      }
    } else if (rel == "index.html") {
      res.set_content(kBuiltinIndex, "text/html; charset=utf-8");
      return;
    }
    res.status = 404;
    res.set_content(R"({"error":{"code":"not_found","message":"no such file"}})", "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::bind() {
  if (options_.port == 0) {
    port_ = server_->bind_to_any_port(options_.host);
    if (port_ < 0) throw std::runtime_error("cannot bind " + options_.host);
  } else {
    if (!server_->bind_to_port(options_.host, options_.port)) {
      throw std::runtime_error("cannot bind " + options_.host + ":" + std::to_string(options_.port));
    }
    port_ = options_.port;
  }
}

void HttpServer::start() {
  bind();
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void HttpServer::run() {
  bind();
  server_->listen_after_bind();
}

void HttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace topiclens::server
