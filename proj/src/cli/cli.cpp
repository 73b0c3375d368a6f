#include "topiclens/cli.hpp"

#include <unistd.h>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "topiclens/cache.hpp"
#include "topiclens/server.hpp"

namespace topiclens::cli {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

bool use_color() { return std::getenv("NO_COLOR") == nullptr && isatty(STDERR_FILENO); }

std::string paint(std::string_view text, const char* code) {
  if (!use_color()) return std::string(text);
  return std::string("\033[") + code + "m" + std::string(text) + "\033[0m";
}

void report_failure(std::string_view message) { std::cerr << paint("error", "31") << ": " << message << "\n"; }

void print_issues(const ValidationReport& report) {
  for (const auto& e : report.errors) {
    std::cerr << paint("error", "31") << " [" << e.code << "]";
    if (!e.location.empty()) std::cerr << " " << e.location;
    std::cerr << ": " << e.message << "\n";
  }
  for (const auto& w : report.warnings) {
    std::cerr << paint("warning", "33") << " [" << w.code << "]";
    if (!w.location.empty()) std::cerr << " " << w.location;
    std::cerr << ": " << w.message << "\n";
  }
}

json issues_json(const std::vector<Issue>& issues) {
  json arr = json::array();
  for (const auto& i : issues) arr.push_back(json{{"code", i.code}, {"message", i.message}, {"location", i.location}});
  return arr;
}

struct Loaded {
  CorpusBundle bundle;
  std::string hash;
};

/// Loads and validates; prints the report and returns nullopt on errors.
std::optional<Loaded> load_valid(const fs::path& dir) {
  Loaded out{load_bundle(dir), bundle_hash(dir)};
  ValidationReport report = validate_bundle(out.bundle);
  if (!report.ok()) {
    print_issues(report);
    report_failure("bundle failed validation");
    return std::nullopt;
  }
  return out;
}

/// Stored cache when it matches the bundle and parameters, else a fresh one.
/// Every applicable map is present in the result.
InterpretationCache complete_cache(const Loaded& loaded, const fs::path& cache_path, const CacheParams& params,
                                   bool& changed) {
  changed = false;
  auto stored = load_cache(cache_path);
  if (!stored || stored->bundle_hash != loaded.hash || !(stored->params == params)) {
    changed = true;
    return build_cache(loaded.bundle, loaded.hash, params);
  }
  for (MapKind kind : kAllMaps) {
    if (!map_applicable(loaded.bundle, kind) || stored->has_map(kind)) continue;
    stored->maps[kind] = build_map(loaded.bundle, *stored, kind);
    changed = true;
  }
  return std::move(*stored);
}

void add_cache_options(CLI::App& cmd, CacheParams& params, std::string& init) {
  cmd.add_option("--seed", params.seed, "Random seed for projections and wordclouds")->capture_default_str();
  cmd.add_option("--n-neighbors", params.n_neighbors, "UMAP neighbourhood size")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000}))
      ->capture_default_str();
  cmd.add_option("--min-dist", params.min_dist, "UMAP minimum distance")->check(CLI::Range(0.0, 10.0))->capture_default_str();
  cmd.add_option("--spread", params.spread, "UMAP spread")->check(CLI::PositiveNumber)->capture_default_str();
  cmd.add_option("--epochs", params.epochs, "UMAP epochs (0 = automatic)")->capture_default_str();
  cmd.add_option("--init", init, "Layout initialization")->check(CLI::IsMember({"spectral", "random"}))->capture_default_str();
}

std::vector<std::string> read_palette(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read palette file " + path.string());
  json j = json::parse(in);
  if (!j.is_array() || j.empty()) throw std::runtime_error("palette file must hold a non-empty JSON array of colours");
  std::vector<std::string> palette;
  for (const auto& c : j) {
    if (!c.is_string()) throw std::runtime_error("palette entries must be strings");
    palette.push_back(c.get<std::string>());
  }
  return palette;
}

volatile std::sig_atomic_t g_stop_requested = 0;

extern "C" void stop_on_signal(int) { g_stop_requested = 1; }

int cmd_validate(const fs::path& dir, bool as_json) {
  CorpusBundle bundle = load_bundle(dir);
  ValidationReport report = validate_bundle(bundle);
  if (as_json) {
    std::cout << json{{"ok", report.ok()},
                      {"errors", issues_json(report.errors)},
                      {"warnings", issues_json(report.warnings)},
                      {"bundle_hash", bundle_hash(dir)},
                      {"n_topics", bundle.n_topics()},
                      {"n_docs", bundle.n_docs()},
                      {"n_terms", bundle.n_terms()}}
                     .dump(2)
              << "\n";
  } else {
    print_issues(report);
    std::cout << (report.ok() ? "ok" : "invalid") << ": " << bundle.n_topics() << " topics, " << bundle.n_terms()
              << " terms, " << bundle.n_docs() << " documents, " << report.errors.size() << " errors, "
              << report.warnings.size() << " warnings\n";
  }
  return report.ok() ? 0 : 1;
}

int cmd_compute(const fs::path& dir, const CacheParams& params, const std::optional<fs::path>& cache_path) {
  auto loaded = load_valid(dir);
  if (!loaded) return 1;
  const fs::path path = cache_path.value_or(default_cache_path(dir));
  InterpretationCache cache = build_cache(loaded->bundle, loaded->hash, params);
  save_cache(cache, path);
  std::cout << "wrote " << path.string() << " (" << cache.maps.size() << " maps, bundle " << loaded->hash.substr(0, 12)
            << ")\n";
  return 0;
}

int cmd_serve(const fs::path& dir, server::SessionOptions session_options, server::ServerOptions server_options) {
  std::unique_ptr<server::ApiSession> session;
  try {
    session = server::ApiSession::open(dir, session_options);
  } catch (const server::StartupError& e) {
    print_issues(e.report());
    report_failure(e.what());
    return 1;
  }
  if (!server_options.static_dir) {
    if (const char* env = std::getenv("TOPICLENS_DASHBOARD_DIR"); env && *env) server_options.static_dir = env;
  }
  server::HttpServer http(*session, server_options);
  std::signal(SIGINT, stop_on_signal);
  std::signal(SIGTERM, stop_on_signal);
  http.start();
  std::cout << "serving " << dir.string() << " on http://" << server_options.host << ":" << http.port() << std::endl;
  while (!g_stop_requested) pause();
  http.stop();
  return 0;
}

int cmd_figures(const fs::path& dir, const fs::path& out_dir, const CacheParams& params, ExportOptions options,
                const std::optional<fs::path>& palette_file) {
  if (palette_file) options.palette = read_palette(*palette_file);
  auto loaded = load_valid(dir);
  if (!loaded) return 1;
  bool changed = false;
  InterpretationCache cache = complete_cache(*loaded, default_cache_path(dir), params, changed);
  ExportManifest manifest = export_all(loaded->bundle, cache, out_dir, options);
  std::cout << "wrote " << manifest.files.size() << " figures to " << out_dir.string();
  if (!manifest.skipped.empty()) std::cout << " (" << manifest.skipped.size() << " skipped)";
  std::cout << "\n";
  return 0;
}

int cmd_pack(const fs::path& dir, const fs::path& out_dir, const CacheParams& params) {
  auto loaded = load_valid(dir);
  if (!loaded) return 1;
  if (fs::exists(out_dir) && !fs::is_empty(out_dir)) {
    report_failure("output directory " + out_dir.string() + " is not empty");
    return 1;
  }
  fs::create_directories(out_dir / "bin");
  const fs::path bundle_out = out_dir / "bundle";
  fs::copy(dir, bundle_out, fs::copy_options::recursive);

  bool changed = false;
  InterpretationCache cache = complete_cache(*loaded, default_cache_path(dir), params, changed);
  save_cache(cache, default_cache_path(bundle_out));

  const fs::path binary = out_dir / "bin" / "topiclens";
  fs::copy_file(fs::read_symlink("/proc/self/exe"), binary, fs::copy_options::overwrite_existing);
  fs::permissions(binary, fs::perms::owner_all | fs::perms::group_read | fs::perms::group_exec |
                              fs::perms::others_read | fs::perms::others_exec);

  std::ofstream docker(out_dir / "Dockerfile");
  docker << "FROM ubuntu:22.04\n"
            "RUN apt-get update && apt-get install -y --no-install-recommends libicu70 libssl3 "
            "&& rm -rf /var/lib/apt/lists/*\n"
            "COPY bin/topiclens /usr/local/bin/topiclens\n"
            "COPY bundle /bundle\n"
            "EXPOSE 8080\n"
            "CMD [\"topiclens\", \"serve\", \"/bundle\", \"--port\", \"8080\", \"--precompute\"]\n";
  if (!docker) throw std::runtime_error("cannot write Dockerfile");
  std::cout << "packed " << dir.string() << " into " << out_dir.string() << "\n";
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Interpret topic models: rankings, maps, wordclouds, figures and an HTTP API."};
  app.name("topiclens");
  app.require_subcommand(1);

  std::string bundle_dir;
  std::string out_dir;
  CacheParams params;
  std::string init = "spectral";
  std::string cache_file;

  auto* validate = app.add_subcommand("validate", "Check a bundle and report errors and warnings");
  bool as_json = false;
  validate->add_option("bundle", bundle_dir, "Bundle directory")->required();
  validate->add_flag("--json", as_json, "Print the report as JSON");

  auto* compute = app.add_subcommand("compute", "Compute the interpretation cache");
  compute->add_option("bundle", bundle_dir, "Bundle directory")->required();
  compute->add_option("--cache", cache_file, "Cache file (default: <bundle>/.cache/interpretation.json)");
  add_cache_options(*compute, params, init);

  auto* serve = app.add_subcommand("serve", "Serve the JSON API");
  server::ServerOptions server_options;
  server::SessionOptions session_options;
  std::string static_dir;
  serve->add_option("bundle", bundle_dir, "Bundle directory")->required();
  serve->add_option("--host", server_options.host, "Listen address")->capture_default_str();
  serve->add_option("--port", server_options.port, "Listen port")->check(CLI::Range(0, 65535))->capture_default_str();
  serve->add_option("--static", static_dir, "Directory of dashboard assets served at /");
  serve->add_flag("--precompute", session_options.precompute, "Compute every map before listening");
  add_cache_options(*serve, params, init);

  auto* figures = app.add_subcommand("figures", "Export SVG figures");
  ExportOptions export_options;
  std::string palette_file;
  figures->add_option("bundle", bundle_dir, "Bundle directory")->required();
  figures->add_option("out_dir", out_dir, "Output directory")->required();
  figures->add_option("--width", export_options.width, "Figure width")->check(CLI::Range(16, 20000))->capture_default_str();
  figures->add_option("--height", export_options.height, "Figure height")->check(CLI::Range(16, 20000))->capture_default_str();
  figures->add_option("--palette-file", palette_file, "JSON array of CSS colours")->check(CLI::ExistingFile);
  figures->add_option("--font-family", export_options.font_family, "Font family")->capture_default_str();
  add_cache_options(*figures, params, init);

  auto* pack = app.add_subcommand("pack", "Bundle, cache and binary plus a Dockerfile");
  pack->add_option("bundle", bundle_dir, "Bundle directory")->required();
  pack->add_option("out_dir", out_dir, "Output directory")->required();
  add_cache_options(*pack, params, init);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  params.init = manifold::parse_init_mode(init);

  try {
    if (*validate) return cmd_validate(bundle_dir, as_json);
    if (*compute) {
      return cmd_compute(bundle_dir, params, cache_file.empty() ? std::nullopt : std::optional<fs::path>(cache_file));
    }
    if (*serve) {
      session_options.params = params;
      if (!static_dir.empty()) server_options.static_dir = static_dir;
      return cmd_serve(bundle_dir, session_options, server_options);
    }
    if (*figures) {
      return cmd_figures(bundle_dir, out_dir, params, export_options,
                         palette_file.empty() ? std::nullopt : std::optional<fs::path>(palette_file));
    }
    if (*pack) return cmd_pack(bundle_dir, out_dir, params);
  } catch (const std::exception& e) {
    report_failure(e.what());
    return 1;
  }
  return 2;
}

}  // namespace topiclens::cli
