#include <fstream>

#include "topiclens/cache.hpp"

namespace topiclens {
namespace fs = std::filesystem;
using json = nlohmann::json;
using layout::FigureKind;

namespace {

class FigureWriter {
 public:
  FigureWriter(const fs::path& dir, const ExportOptions& options, ExportManifest& manifest)
      : dir_(dir), options_(options), manifest_(manifest) {}

  void write(const std::string& file, FigureKind kind, const std::string& subject, const std::string& title,
             const layout::FigureData& data) {
    layout::FigureSpec spec;
    spec.kind = kind;
    spec.width = options_.width;
    spec.height = options_.height;
    spec.palette = options_.palette;
    spec.font_family = options_.font_family;
    spec.title = title;
    const std::string svg = layout::render_figure(spec, data);
    std::ofstream out(dir_ / file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / file).string());
    out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
    if (!out) throw std::runtime_error("cannot write " + (dir_ / file).string());
    manifest_.files.push_back(ExportedFile{file, layout::to_string(kind), subject});
  }

 private:
  const fs::path& dir_;
  const ExportOptions& options_;
  ExportManifest& manifest_;
};

const manifold::Projection2D& require_map(const InterpretationCache& cache, MapKind kind) {
  auto it = cache.maps.find(kind);
  if (it == cache.maps.end()) throw std::runtime_error("cache is missing the " + to_string(kind) + " map");
  return it->second;
}

}  // namespace

ExportManifest export_all(const CorpusBundle& bundle, const InterpretationCache& cache, const fs::path& out_dir,
                          const ExportOptions& options) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw std::runtime_error("cannot create output directory " + out_dir.string());

  ExportManifest manifest;
  manifest.bundle_hash = cache.bundle_hash;
  FigureWriter writer(out_dir, options, manifest);
  const std::size_t n = bundle.n_topics();

  {
    const auto& map = require_map(cache, MapKind::topics);
    layout::MapData data{map.coords, bundle.topic_names, cache.topic_importance, {}};
    for (std::size_t t = 0; t < n; ++t) data.colors.push_back(t);
    writer.write("topic_map.svg", FigureKind::topic_map, "topics", "Topics", data);
  }
  {
    const auto& map = require_map(cache, MapKind::words);
    layout::MapData data;
    data.coords = map.coords;
    // Only the most prevalent words get a label.
    const std::size_t labelled = std::min<std::size_t>(100, bundle.n_terms());
    std::vector<TermIndex> order(bundle.n_terms());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<TermIndex>(i);
    std::stable_sort(order.begin(), order.end(), [&](TermIndex a, TermIndex b) {
      return cache.term_prevalence[a] > cache.term_prevalence[b];
    });
    data.labels.assign(bundle.n_terms(), "");
    for (std::size_t i = 0; i < labelled; ++i) data.labels[order[i]] = bundle.vocabulary[order[i]];
    for (std::size_t w = 0; w < bundle.n_terms(); ++w) {
      const auto column = bundle.phi.column(w);
      data.colors.push_back(column.empty() ? 0 : interpret::dominant_topic(column));
    }
    writer.write("word_map.svg", FigureKind::word_map, "words", "Words", data);
  }
  {
    const auto& map = require_map(cache, MapKind::documents);
    layout::MapData data{map.coords, {}, {}, cache.dominant_topics};
    writer.write("document_map.svg", FigureKind::document_map, "documents", "Documents", data);
  }
  if (cache.groups) {
    const auto& map = require_map(cache, MapKind::groups);
    layout::MapData data{map.coords, cache.groups->groups, {}, {}};
    for (std::size_t g = 0; g < cache.groups->groups.size(); ++g)
      data.colors.push_back(interpret::dominant_topic(cache.groups->values.row(g)));
    writer.write("group_map.svg", FigureKind::group_map, "groups", "Groups", data);
  } else {
    manifest.skipped.push_back(SkippedFigure{"group_map", "bundle has no group labels"});
  }

  for (std::size_t t = 0; t < n; ++t) {
    layout::BarsData bars;
    bars.color = t;
    for (const auto& ranked : cache.top_terms[t]) bars.bars.emplace_back(bundle.vocabulary[ranked.term], ranked.weight);
    const std::string subject = "topic:" + std::to_string(t);
    writer.write("topic_" + std::to_string(t) + "_terms.svg", FigureKind::term_bars, subject, bundle.topic_names[t], bars);
    writer.write("topic_" + std::to_string(t) + "_wordcloud.svg", FigureKind::wordcloud, subject,
                 bundle.topic_names[t], layout::WordcloudData{cache.topic_wordclouds[t]});
  }

  if (cache.groups) {
    const SparseCounts counts = doc_term_counts(bundle);
    for (std::size_t g = 0; g < cache.groups->groups.size(); ++g) {
      const std::string& id = cache.groups->groups[g];
      const std::string subject = "group:" + id;
      layout::BarsData bars;
      const auto row = cache.groups->values.row(g);
      for (std::size_t t = 0; t < n; ++t) bars.bars.emplace_back(bundle.topic_names[t], row[t]);
      writer.write("group_" + std::to_string(g) + "_topics.svg", FigureKind::term_bars, subject, id, bars);

      std::vector<layout::WordWeight> weights;
      for (const auto& ranked : interpret::group_wordcloud_weights(counts, *bundle.group_labels, id))
        weights.push_back(layout::WordWeight{bundle.vocabulary[ranked.term], ranked.weight});
      if (weights.empty()) {
        manifest.skipped.push_back(SkippedFigure{"wordcloud", subject + " has no in-vocabulary terms"});
        continue;
      }
      const auto cloud = layout::layout_wordcloud(weights, options.width, options.height, cache.params.seed + n + g);
      writer.write("group_" + std::to_string(g) + "_wordcloud.svg", FigureKind::wordcloud, subject, id,
                   layout::WordcloudData{cloud});
    }
  } else {
    manifest.skipped.push_back(SkippedFigure{"group figures", "bundle has no group labels"});
  }

  {
    const TermMatcher matcher(bundle.vocabulary);
    const interpret::NormalizedPhi phi_hat(bundle.phi);
    const std::size_t limit = std::min(options.max_timelines, bundle.n_docs());
    for (std::size_t d = 0; d < limit; ++d) {
      const auto matched = matcher.match(bundle.documents[d].text);
      const auto tokens = matched.token_terms();
      layout::TimelineData data{interpret::document_timeline(tokens, phi_hat), bundle.topic_names};
      writer.write("document_" + std::to_string(d) + "_timeline.svg", FigureKind::timeline,
                   "document:" + bundle.documents[d].id, bundle.documents[d].id, data);
    }
    if (limit < bundle.n_docs()) {
      manifest.skipped.push_back(SkippedFigure{
          "timeline", std::to_string(bundle.n_docs() - limit) + " document timelines beyond the first " +
                          std::to_string(limit)});
    }
  }

  json files = json::array();
  for (const auto& f : manifest.files) files.push_back(json{{"path", f.path}, {"kind", f.kind}, {"subject", f.subject}});
  json skipped = json::array();
  for (const auto& s : manifest.skipped) skipped.push_back(json{{"kind", s.kind}, {"reason", s.reason}});
  const json doc{{"bundle_hash", manifest.bundle_hash}, {"files", std::move(files)}, {"skipped", std::move(skipped)}};
  std::ofstream out(out_dir / "figures_manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write figures_manifest.json");
  out << doc.dump(2) << "\n";
  return manifest;
}

}  // namespace topiclens
