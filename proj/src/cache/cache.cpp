#include "topiclens/cache.hpp"

#include <fstream>
#include <sstream>

namespace topiclens {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {
constexpr int kCacheFormat = 1;
}

std::string to_string(MapKind kind) {
  switch (kind) {
    case MapKind::topics: return "topics";
    case MapKind::words: return "words";
    case MapKind::documents: return "documents";
    case MapKind::groups: return "groups";
  }
  return "unknown";
}

std::optional<MapKind> parse_map_kind(std::string_view name) {
  for (MapKind kind : kAllMaps)
    if (to_string(kind) == name) return kind;
  return std::nullopt;
}

manifold::UmapParams CacheParams::umap() const {
  manifold::UmapParams p;
  p.n_neighbors = n_neighbors;
  p.min_dist = min_dist;
  p.spread = spread;
  p.epochs = epochs;
  p.learning_rate = learning_rate;
  p.negative_samples = negative_samples;
  p.local_connectivity = local_connectivity;
  p.metric = manifold::Metric::cosine;
  p.init = init;
  p.seed = seed;
  return p;
}

std::vector<layout::WordWeight> topic_wordcloud_weights(const CorpusBundle& bundle, std::size_t topic) {
  std::vector<layout::WordWeight> out;
  for (const auto& ranked : interpret::top_k_terms(bundle.phi, topic, kWordcloudTerms)) {
    if (ranked.weight > 0.0) out.push_back(layout::WordWeight{bundle.vocabulary[ranked.term], ranked.weight});
  }
  return out;
}

InterpretationCache build_base(const CorpusBundle& bundle, std::string bundle_hash, const CacheParams& params) {
  InterpretationCache cache;
  cache.bundle_hash = std::move(bundle_hash);
  cache.params = params;
  cache.doc_lengths = doc_term_counts(bundle).row_sums();
  cache.topic_importance = interpret::topic_importance(bundle.theta, cache.doc_lengths);
  cache.term_prevalence = interpret::term_prevalence(bundle.phi);

  const std::size_t n = bundle.n_topics();
  cache.top_terms.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    cache.top_terms.push_back(bundle.n_terms() > 0 ? interpret::top_k_terms(bundle.phi, t, kCachedTopTerms)
                                                   : std::vector<interpret::RankedTerm>{});
  }

  cache.topic_dominant_counts.assign(n, 0);
  cache.dominant_topics.reserve(bundle.n_docs());
  for (std::size_t d = 0; d < bundle.n_docs(); ++d) {
    const std::size_t t = interpret::dominant_topic(bundle.theta.row(d));
    cache.dominant_topics.push_back(t);
    ++cache.topic_dominant_counts[t];
  }

  if (bundle.group_labels) cache.groups = interpret::group_topic_matrix(bundle.theta, *bundle.group_labels);

  cache.topic_wordclouds.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto weights = bundle.n_terms() > 0 ? topic_wordcloud_weights(bundle, t) : std::vector<layout::WordWeight>{};
    if (weights.empty()) {
      cache.topic_wordclouds.push_back(layout::WordcloudLayout{params.wordcloud_width, params.wordcloud_height, {}, {}});
    } else {
      cache.topic_wordclouds.push_back(
          layout::layout_wordcloud(weights, params.wordcloud_width, params.wordcloud_height, params.seed + t));
    }
  }
  return cache;
}

bool map_applicable(const CorpusBundle& bundle, MapKind kind) {
  return kind != MapKind::groups || bundle.group_labels.has_value();
}

Matrix map_features(const CorpusBundle& bundle, const InterpretationCache& cache, MapKind kind) {
  switch (kind) {
    case MapKind::topics: return bundle.phi;
    case MapKind::words: return bundle.phi.transposed();
    case MapKind::documents: return bundle.doc_embeddings ? *bundle.doc_embeddings : bundle.theta;
    case MapKind::groups:
      if (!cache.groups) throw std::invalid_argument("bundle has no groups");
      return cache.groups->values;
  }
  throw std::invalid_argument("unknown map kind");
}

manifold::Projection2D build_map(const CorpusBundle& bundle, const InterpretationCache& cache, MapKind kind) {
  return manifold::umap_project(map_features(bundle, cache, kind), cache.params.umap());
}

manifold::Projection2D build_pca_map(const CorpusBundle& bundle, const InterpretationCache& cache, MapKind kind) {
  return manifold::pca_project(map_features(bundle, cache, kind));
}

InterpretationCache build_cache(const CorpusBundle& bundle, std::string bundle_hash, const CacheParams& params) {
  InterpretationCache cache = build_base(bundle, std::move(bundle_hash), params);
  for (MapKind kind : kAllMaps)
    if (map_applicable(bundle, kind)) cache.maps[kind] = build_map(bundle, cache, kind);
  return cache;
}

// ---------------------------------------------------------------------------
// JSON

json to_json(const CacheParams& p) {
  return json{{"seed", p.seed},
              {"n_neighbors", p.n_neighbors},
              {"min_dist", p.min_dist},
              {"spread", p.spread},
              {"epochs", p.epochs},
              {"learning_rate", p.learning_rate},
              {"negative_samples", p.negative_samples},
              {"local_connectivity", p.local_connectivity},
              {"init", manifold::to_string(p.init)},
              {"wordcloud_width", p.wordcloud_width},
              {"wordcloud_height", p.wordcloud_height}};
}

namespace {

CacheParams params_from_json(const json& j) {
  CacheParams p;
  p.seed = j.at("seed").get<std::uint64_t>();
  p.n_neighbors = j.at("n_neighbors").get<std::size_t>();
  p.min_dist = j.at("min_dist").get<double>();
  p.spread = j.at("spread").get<double>();
  p.epochs = j.at("epochs").get<std::size_t>();
  p.learning_rate = j.at("learning_rate").get<double>();
  p.negative_samples = j.at("negative_samples").get<std::size_t>();
  p.local_connectivity = j.at("local_connectivity").get<std::size_t>();
  p.init = manifold::parse_init_mode(j.at("init").get<std::string>());
  p.wordcloud_width = j.at("wordcloud_width").get<double>();
  p.wordcloud_height = j.at("wordcloud_height").get<double>();
  return p;
}

json ranked_json(const std::vector<interpret::RankedTerm>& terms) {
  json arr = json::array();
  for (const auto& t : terms) arr.push_back(json::array({t.term, t.weight}));
  return arr;
}

std::vector<interpret::RankedTerm> ranked_from_json(const json& j) {
  std::vector<interpret::RankedTerm> out;
  for (const auto& item : j) out.push_back(interpret::RankedTerm{item.at(0).get<TermIndex>(), item.at(1).get<double>()});
  return out;
}

manifold::Projection2D projection_from_json(const json& j) {
  manifold::Projection2D p;
  p.method = j.at("method").get<std::string>();
  for (const auto& c : j.at("coords")) p.coords.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
  const json& params = j.at("params");
  p.n_neighbors = params.at("n_neighbors").get<std::size_t>();
  p.min_dist = params.at("min_dist").get<double>();
  p.spread = params.at("spread").get<double>();
  p.a = params.at("a").get<double>();
  p.b = params.at("b").get<double>();
  p.epochs = params.at("epochs").get<std::size_t>();
  p.learning_rate = params.at("learning_rate").get<double>();
  p.negative_samples = params.at("negative_samples").get<std::size_t>();
  p.seed = params.at("seed").get<std::uint64_t>();
  p.metric = manifold::parse_metric(params.at("metric").get<std::string>());
  p.init = manifold::parse_init_mode(params.at("init").get<std::string>());
  return p;
}

layout::WordcloudLayout wordcloud_from_json(const json& j) {
  layout::WordcloudLayout l;
  l.width = j.at("width").get<double>();
  l.height = j.at("height").get<double>();
  for (const auto& p : j.at("placements")) {
    layout::Placement placement;
    placement.term = p.at("term").get<std::string>();
    placement.weight = p.at("weight").get<double>();
    placement.font_size = p.at("font_size").get<double>();
    placement.x = p.at("x").get<double>();
    placement.y = p.at("y").get<double>();
    placement.rotation = p.at("rotation").get<int>();
    const auto& box = p.at("box");
    placement.box = layout::Box{box.at(0).get<double>(), box.at(1).get<double>(), box.at(2).get<double>(),
                                box.at(3).get<double>()};
    l.placements.push_back(std::move(placement));
  }
  l.dropped = j.at("dropped").get<std::vector<std::string>>();
  return l;
}

Matrix matrix_from_json(const json& rows, std::size_t cols) {
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows.at(r).at(c).get<double>();
  return m;
}

}  // namespace

json to_json(const manifold::Projection2D& p) {
  json coords = json::array();
  for (const auto& c : p.coords) coords.push_back(json::array({c[0], c[1]}));
  return json{{"method", p.method},
              {"coords", std::move(coords)},
              {"params",
               {{"n_neighbors", p.n_neighbors},
                {"min_dist", p.min_dist},
                {"spread", p.spread},
                {"a", p.a},
                {"b", p.b},
                {"epochs", p.epochs},
                {"learning_rate", p.learning_rate},
                {"negative_samples", p.negative_samples},
                {"seed", p.seed},
                {"metric", manifold::to_string(p.metric)},
                {"init", manifold::to_string(p.init)}}}};
}

json to_json(const layout::WordcloudLayout& l) {
  json placements = json::array();
  for (const auto& p : l.placements) {
    placements.push_back(json{{"term", p.term},
                              {"weight", p.weight},
                              {"font_size", p.font_size},
                              {"x", p.x},
                              {"y", p.y},
                              {"rotation", p.rotation},
                              {"box", json::array({p.box.x0, p.box.y0, p.box.x1, p.box.y1})}});
  }
  return json{{"width", l.width}, {"height", l.height}, {"placements", std::move(placements)}, {"dropped", l.dropped}};
}

json to_json(const InterpretationCache& cache) {
  json j;
  j["format"] = kCacheFormat;
  j["bundle_hash"] = cache.bundle_hash;
  j["params"] = to_json(cache.params);
  j["doc_lengths"] = cache.doc_lengths;
  j["topic_importance"] = cache.topic_importance;
  j["term_prevalence"] = cache.term_prevalence;
  json top = json::array();
  for (const auto& terms : cache.top_terms) top.push_back(ranked_json(terms));
  j["top_terms"] = std::move(top);
  j["dominant_topics"] = cache.dominant_topics;
  j["topic_dominant_counts"] = cache.topic_dominant_counts;
  if (cache.groups) {
    json rows = json::array();
    for (std::size_t r = 0; r < cache.groups->values.rows(); ++r) {
      const auto row = cache.groups->values.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["groups"] = json{{"ids", cache.groups->groups}, {"values", std::move(rows)}, {"group_of", cache.groups->group_of}};
  } else {
    j["groups"] = nullptr;
  }
  json clouds = json::array();
  for (const auto& l : cache.topic_wordclouds) clouds.push_back(to_json(l));
  j["topic_wordclouds"] = std::move(clouds);
  json maps = json::object();
  for (const auto& [kind, projection] : cache.maps) maps[to_string(kind)] = to_json(projection);
  j["maps"] = std::move(maps);
  return j;
}

InterpretationCache cache_from_json(const json& j) {
  if (j.at("format").get<int>() != kCacheFormat) throw std::runtime_error("unsupported cache format");
  InterpretationCache cache;
  cache.bundle_hash = j.at("bundle_hash").get<std::string>();
  cache.params = params_from_json(j.at("params"));
  cache.doc_lengths = j.at("doc_lengths").get<std::vector<std::uint64_t>>();
  cache.topic_importance = j.at("topic_importance").get<std::vector<double>>();
  cache.term_prevalence = j.at("term_prevalence").get<std::vector<double>>();
  for (const auto& terms : j.at("top_terms")) cache.top_terms.push_back(ranked_from_json(terms));
  cache.dominant_topics = j.at("dominant_topics").get<std::vector<std::size_t>>();
  cache.topic_dominant_counts = j.at("topic_dominant_counts").get<std::vector<std::size_t>>();
  if (const auto& g = j.at("groups"); !g.is_null()) {
    interpret::GroupTopicMatrix groups;
    groups.groups = g.at("ids").get<std::vector<std::string>>();
    groups.group_of = g.at("group_of").get<std::vector<std::size_t>>();
    const std::size_t cols = cache.topic_importance.size();
    groups.values = matrix_from_json(g.at("values"), cols);
    cache.groups = std::move(groups);
  }
  for (const auto& l : j.at("topic_wordclouds")) cache.topic_wordclouds.push_back(wordcloud_from_json(l));
  for (const auto& [name, projection] : j.at("maps").items()) {
    auto kind = parse_map_kind(name);
    if (!kind) throw std::runtime_error("unknown map '" + name + "' in cache");
    cache.maps[*kind] = projection_from_json(projection);
  }
  return cache;
}

fs::path default_cache_path(const fs::path& bundle_dir) { return bundle_dir / ".cache" / "interpretation.json"; }

std::string serialize_cache(const InterpretationCache& cache) { return to_json(cache).dump() + "\n"; }

void save_cache(const InterpretationCache& cache, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write cache " + tmp.string());
    const std::string body = serialize_cache(cache);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw std::runtime_error("cannot write cache " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::optional<InterpretationCache> load_cache(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    return cache_from_json(json::parse(in));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace topiclens
