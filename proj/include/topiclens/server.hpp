#pragma once

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "topiclens/bundle.hpp"
#include "topiclens/cache.hpp"

namespace httplib {
class Server;
}

namespace topiclens::server {

/// The bundle failed validation; the report lists every error.
class StartupError : public std::runtime_error {
 public:
  StartupError(const std::string& what, ValidationReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

using Query = std::map<std::string, std::string>;

struct SessionOptions {
  bool precompute = false;
  CacheParams params;
  std::optional<std::filesystem::path> cache_path;  // default: <bundle>/.cache/interpretation.json
};

inline constexpr std::size_t kMaxTopicNameLength = 200;
inline constexpr std::size_t kDefaultAssociations = 20;
inline constexpr std::size_t kDefaultSnippetChars = 1000;
inline constexpr std::size_t kHighlightTerms = 10;
inline constexpr std::size_t kListedTopTerms = 10;

/// One loaded bundle with its interpretation cache. Reads run concurrently;
/// topic renaming is the only mutation and admits one writer at a time
/// (a second concurrent writer receives 409).
///
/// Maps are built eagerly when `precompute` is set; otherwise the first
/// request for a map starts a background build and receives 202 with
/// `{"status":"building"}` until it is ready (or the PCA projection when
/// `fallback=pca` is given).
class ApiSession {
 public:
  static std::unique_ptr<ApiSession> open(const std::filesystem::path& bundle_dir, const SessionOptions& options);
  ~ApiSession();

  ApiSession(const ApiSession&) = delete;
  ApiSession& operator=(const ApiSession&) = delete;

  ApiResponse handle(std::string_view method, std::string_view path, const Query& query = {},
                     std::string_view body = {});

  const std::string& bundle_hash() const { return bundle_hash_; }
  /// Number of projections computed by this process (0 when everything came from disk).
  std::size_t maps_computed() const { return maps_computed_.load(); }
  bool cache_loaded_from_disk() const { return cache_loaded_; }
  /// Blocks until no background map build is running.
  void wait_idle();

 private:
  ApiSession() = default;

  ApiResponse meta() const;
  ApiResponse topics() const;
  ApiResponse topic(std::string_view id) const;
  ApiResponse rename_topic(std::string_view id, std::string_view body);
  ApiResponse topic_wordcloud(std::string_view id) const;
  ApiResponse map(std::string_view kind, const Query& query);
  ApiResponse word(std::string_view id, const Query& query) const;
  ApiResponse document(std::string_view id, const Query& query) const;
  ApiResponse groups() const;
  ApiResponse group(std::string_view id) const;

  std::vector<std::string> names_snapshot() const;
  void start_map_build(MapKind kind);
  void persist_cache_locked();

  std::filesystem::path bundle_dir_;
  std::filesystem::path cache_path_;
  CorpusBundle bundle_;
  std::string bundle_hash_;
  InterpretationCache cache_;
  std::unique_ptr<TermMatcher> matcher_;
  std::unique_ptr<interpret::NormalizedPhi> phi_hat_;
  std::unique_ptr<SparseCounts> doc_term_;
  std::map<std::string, std::size_t, std::less<>> doc_index_;
  bool cache_loaded_ = false;
  std::atomic<std::size_t> maps_computed_{0};

  mutable std::shared_mutex names_mutex_;
  std::mutex writer_mutex_;

  mutable std::mutex maps_mutex_;
  std::condition_variable maps_idle_;
  std::map<MapKind, bool> building_;
  std::map<MapKind, std::string> build_errors_;
  std::vector<std::thread> builders_;
};

struct ServerOptions {
  std::string host = "0.0.0.0";
  int port = 8080;
  std::optional<std::filesystem::path> static_dir;
};

/// HTTP/1.1 front end for an ApiSession. `start` binds (throwing if the port
/// is taken) and serves on a background thread.
class HttpServer {
 public:
  HttpServer(ApiSession& session, ServerOptions options);
  ~HttpServer();

  void start();
  /// Binds and serves on the calling thread until stop().
  void run();
  void stop();
  int port() const { return port_; }

 private:
  void bind();

  ApiSession& session_;
  ServerOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace topiclens::server
