#include <fstream>
#include <sstream>

#include "doctest.h"
#include "topiclens/cache.hpp"
#include "toy.hpp"

using namespace topiclens;
using topiclens::testing::TempDir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("base cache holds rankings, groups and wordclouds") {
  const CorpusBundle b = testing::toy_bundle();
  const auto cache = build_base(b, "h", CacheParams{});
  CHECK(cache.doc_lengths == std::vector<std::uint64_t>{5, 3, 3, 5, 0});
  CHECK(cache.topic_importance[0] == doctest::Approx(5.95));
  CHECK(cache.top_terms.size() == 3);
  CHECK(cache.top_terms[0].size() == 6);
  CHECK(cache.dominant_topics == std::vector<std::size_t>{0, 1, 2, 2, 0});
  CHECK(cache.topic_dominant_counts == std::vector<std::size_t>{2, 1, 2});
  REQUIRE(cache.groups);
  CHECK(cache.groups->groups.size() == 2);
  CHECK(cache.topic_wordclouds.size() == 3);
  CHECK(cache.maps.empty());
}

TEST_CASE("map features per map kind") {
  CorpusBundle b = testing::toy_bundle();
  const auto cache = build_base(b, "h", CacheParams{});
  CHECK(map_features(b, cache, MapKind::topics) == b.phi);
  CHECK(map_features(b, cache, MapKind::words) == b.phi.transposed());
  CHECK(map_features(b, cache, MapKind::documents) == b.theta);
  CHECK(map_features(b, cache, MapKind::groups).rows() == 2);
  b.doc_embeddings = Matrix(5, 2, 1.0);
  CHECK(map_features(b, cache, MapKind::documents) == *b.doc_embeddings);
  b.group_labels.reset();
  CHECK_FALSE(map_applicable(b, MapKind::groups));
}

TEST_CASE("cache serialization round trips byte for byte") {
  TempDir dir;
  const CorpusBundle b = testing::toy_bundle();
  CacheParams params;
  params.seed = 3;
  const auto cache = build_cache(b, "abc", params);
  CHECK(cache.maps.size() == 4);
  const auto path = dir / "c.json";
  save_cache(cache, path);
  const auto loaded = load_cache(path);
  REQUIRE(loaded);
  CHECK(serialize_cache(*loaded) == slurp(path));
  CHECK(loaded->maps.at(MapKind::documents) == cache.maps.at(MapKind::documents));
  CHECK(serialize_cache(build_cache(b, "abc", params)) == slurp(path));
}

TEST_CASE("unreadable caches load as nothing") {
  TempDir dir;
  CHECK_FALSE(load_cache(dir / "absent.json"));
  std::ofstream(dir / "bad.json") << "{not json";
  CHECK_FALSE(load_cache(dir / "bad.json"));
}

TEST_CASE("pca map fallback") {
  const CorpusBundle b = testing::toy_bundle();
  const auto cache = build_base(b, "h", CacheParams{});
  const auto p = build_pca_map(b, cache, MapKind::documents);
  CHECK(p.method == "pca");
  CHECK(p.coords.size() == 5);
}

TEST_CASE("export writes every figure and a manifest") {
  TempDir dir;
  const CorpusBundle b = testing::toy_bundle();
  const auto cache = build_cache(b, "abc", CacheParams{});
  const auto manifest = export_all(b, cache, dir / "a");
  // 4 maps + 3×(bars, wordcloud) + 2×(group bars, group cloud) + 5 timelines
  CHECK(manifest.files.size() == 4 + 6 + 4 + 5);
  CHECK(manifest.skipped.empty());
  for (const auto& f : manifest.files) {
    CAPTURE(f.path);
    CHECK(std::filesystem::exists(dir / "a" / f.path));
  }
  const auto json = nlohmann::json::parse(slurp(dir / "a" / "figures_manifest.json"));
  CHECK(json["bundle_hash"] == "abc");

  export_all(b, cache, dir / "b");
  for (const auto& f : manifest.files) CHECK(slurp(dir / "a" / f.path) == slurp(dir / "b" / f.path));
}

TEST_CASE("export without groups notes the skipped figure") {
  TempDir dir;
  CorpusBundle b = testing::toy_bundle();
  b.group_labels.reset();
  for (auto& d : b.documents) d.group.reset();
  const auto cache = build_cache(b, "abc", CacheParams{});
  const auto manifest = export_all(b, cache, dir.path());
  REQUIRE(manifest.skipped.size() >= 1);
  CHECK(manifest.skipped[0].kind == "group_map");
  CHECK_FALSE(std::filesystem::exists(dir / "group_map.svg"));
}
