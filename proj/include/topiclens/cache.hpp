#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "topiclens/bundle.hpp"
#include "topiclens/interpret.hpp"
#include "topiclens/layout.hpp"
#include "topiclens/manifold.hpp"

namespace topiclens {

enum class MapKind { topics, words, documents, groups };

inline constexpr std::array<MapKind, 4> kAllMaps = {MapKind::topics, MapKind::words, MapKind::documents,
                                                   MapKind::groups};

std::string to_string(MapKind kind);
std::optional<MapKind> parse_map_kind(std::string_view name);

/// Everything that influences derived artifacts besides the bundle itself.
/// All randomness flows from `seed`.
struct CacheParams {
  std::uint64_t seed = 42;
  std::size_t n_neighbors = 15;
  double min_dist = 0.1;
  double spread = 1.0;
  std::size_t epochs = 0;  // 0 = size-dependent default
  double learning_rate = 1.0;
  std::size_t negative_samples = 5;
  std::size_t local_connectivity = 1;
  manifold::InitMode init = manifold::InitMode::spectral;
  double wordcloud_width = 800.0;
  double wordcloud_height = 600.0;

  manifold::UmapParams umap() const;
  friend bool operator==(const CacheParams&, const CacheParams&) = default;
};

inline constexpr std::size_t kCachedTopTerms = 30;
inline constexpr std::size_t kWordcloudTerms = 100;

/// Derived artifacts for one bundle, keyed by the bundle content hash.
struct InterpretationCache {
  std::string bundle_hash;
  CacheParams params;
  std::vector<std::uint64_t> doc_lengths;
  std::vector<double> topic_importance;
  std::vector<double> term_prevalence;
  std::vector<std::vector<interpret::RankedTerm>> top_terms;
  std::vector<std::size_t> dominant_topics;  // per document
  std::vector<std::size_t> topic_dominant_counts;
  std::optional<interpret::GroupTopicMatrix> groups;
  std::vector<layout::WordcloudLayout> topic_wordclouds;
  std::map<MapKind, manifold::Projection2D> maps;

  bool has_map(MapKind kind) const { return maps.contains(kind); }
};

/// Cheap artifacts: importances, rankings, groups, wordclouds. No projections.
InterpretationCache build_base(const CorpusBundle& bundle, std::string bundle_hash, const CacheParams& params);

/// Feature rows for one map: φ rows (topics), φ columns (words), Θ rows or
/// document embeddings (documents), G rows (groups).
Matrix map_features(const CorpusBundle& bundle, const InterpretationCache& cache, MapKind kind);

/// Whether the bundle supports the map at all (groups need labels).
bool map_applicable(const CorpusBundle& bundle, MapKind kind);

manifold::Projection2D build_map(const CorpusBundle& bundle, const InterpretationCache& cache, MapKind kind);
manifold::Projection2D build_pca_map(const CorpusBundle& bundle, const InterpretationCache& cache, MapKind kind);

/// Base artifacts plus every applicable map.
InterpretationCache build_cache(const CorpusBundle& bundle, std::string bundle_hash, const CacheParams& params);

/// Positive clamped φ weights of one topic, top `kWordcloudTerms`.
std::vector<layout::WordWeight> topic_wordcloud_weights(const CorpusBundle& bundle, std::size_t topic);

nlohmann::json to_json(const manifold::Projection2D& projection);
nlohmann::json to_json(const layout::WordcloudLayout& layout);
nlohmann::json to_json(const InterpretationCache& cache);
nlohmann::json to_json(const CacheParams& params);
InterpretationCache cache_from_json(const nlohmann::json& j);

std::filesystem::path default_cache_path(const std::filesystem::path& bundle_dir);

/// Serialized form is a single JSON document; identical caches give
/// byte-identical files.
std::string serialize_cache(const InterpretationCache& cache);
void save_cache(const InterpretationCache& cache, const std::filesystem::path& path);
std::optional<InterpretationCache> load_cache(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Figure export

struct ExportOptions {
  int width = 800;
  int height = 600;
  std::vector<std::string> palette = layout::default_palette();
  std::string font_family = "sans-serif";
  std::size_t max_timelines = 100;
};

struct ExportedFile {
  std::string path;  // relative to the output directory
  std::string kind;
  std::string subject;
};

struct SkippedFigure {
  std::string kind;
  std::string reason;
};

struct ExportManifest {
  std::string bundle_hash;
  std::vector<ExportedFile> files;
  std::vector<SkippedFigure> skipped;
};

/// Writes one SVG per figure plus `figures_manifest.json`. The cache must
/// hold every applicable map.
ExportManifest export_all(const CorpusBundle& bundle, const InterpretationCache& cache,
                          const std::filesystem::path& out_dir, const ExportOptions& options = {});

}  // namespace topiclens
