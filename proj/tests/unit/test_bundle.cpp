#include <fstream>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "toy.hpp"

using namespace topiclens;
using topiclens::testing::TempDir;

namespace {

void write(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

bool has_code(const std::vector<Issue>& issues, const std::string& code) {
  return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) { return i.code == code; });
}

}  // namespace

TEST_CASE("save then load round-trips a bundle") {
  TempDir dir;
  const CorpusBundle original = testing::toy_bundle();
  save_bundle(original, dir.path());
  const CorpusBundle loaded = load_bundle(dir.path());
  CHECK(loaded == original);
  CHECK(validate_bundle(loaded).ok());
}

TEST_CASE("doubles survive the CSV round trip exactly") {
  TempDir dir;
  CorpusBundle b = testing::toy_bundle();
  b.phi(0, 0) = 0.1 + 0.2;
  b.phi(1, 2) = 1e-300;
  b.phi(2, 5) = -3.0000000000000004;
  save_bundle(b, dir.path());
  CHECK(load_bundle(dir.path()).phi == b.phi);
}

TEST_CASE("missing topic_names falls back to defaults") {
  TempDir dir;
  testing::write_toy_bundle(dir.path());
  std::filesystem::remove(dir / "topic_names.json");
  const CorpusBundle b = load_bundle(dir.path());
  CHECK(b.topic_names == std::vector<std::string>{"Topic 0", "Topic 1", "Topic 2"});
}

TEST_CASE("dimension mismatches name both sides") {
  TempDir dir;
  testing::write_toy_bundle(dir.path());
  write(dir / "vocab.txt", "apple\nbanana\n");
  try {
    load_bundle(dir.path());
    FAIL("expected BundleError");
  } catch (const BundleError& e) {
    CHECK(std::string(e.what()) == "phi columns (6) != vocabulary size (2)");
  }
}

TEST_CASE("malformed numbers report file, row and column") {
  TempDir dir;
  testing::write_toy_bundle(dir.path());
  write(dir / "theta.csv", "0.5,0.5,0\n0.1,abc,0.2\n");
  try {
    load_bundle(dir.path());
    FAIL("expected BundleError");
  } catch (const BundleError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("theta.csv") != std::string::npos);
    CHECK(msg.find("row 2 column 2") != std::string::npos);
  }
}

TEST_CASE("missing required file is an error") {
  TempDir dir;
  testing::write_toy_bundle(dir.path());
  std::filesystem::remove(dir / "phi.csv");
  CHECK_THROWS_AS(load_bundle(dir.path()), BundleError);
}

TEST_CASE("manifest version must be 1") {
  TempDir dir;
  testing::write_toy_bundle(dir.path());
  auto manifest = nlohmann::json::parse(std::ifstream(dir / "manifest.json"));
  manifest["version"] = 2;
  write(dir / "manifest.json", manifest.dump());
  CHECK_THROWS_AS(load_bundle(dir.path()), BundleError);
}

TEST_CASE("group labels from a separate file") {
  TempDir dir;
  CorpusBundle b = testing::toy_bundle();
  b.group_labels.reset();
  for (auto& d : b.documents) d.group.reset();
  save_bundle(b, dir.path());
  write(dir / "groups.txt", "a\nb\na\nb\nc\n");
  auto manifest = nlohmann::json::parse(std::ifstream(dir / "manifest.json"));
  manifest["groups"] = "groups.txt";
  write(dir / "manifest.json", manifest.dump());
  const CorpusBundle loaded = load_bundle(dir.path());
  REQUIRE(loaded.group_labels);
  CHECK(*loaded.group_labels == std::vector<std::string>{"a", "b", "a", "b", "c"});

  write(dir / "groups.txt", "a\nb\n");
  CHECK_THROWS_AS(load_bundle(dir.path()), BundleError);
}

TEST_CASE("partially labelled documents are rejected") {
  TempDir dir;
  testing::write_toy_bundle(dir.path());
  write(dir / "documents.jsonl",
        R"({"id":"d0","text":"apple","group":"x"}
{"id":"d1","text":"apple"}
{"id":"d2","text":"apple"}
{"id":"d3","text":"apple"}
{"id":"d4","text":"apple"}
)");
  CHECK_THROWS_AS(load_bundle(dir.path()), BundleError);
}

TEST_CASE("doc_term triplets are summed and range checked") {
  TempDir dir;
  testing::write_toy_bundle(dir.path());
  auto manifest = nlohmann::json::parse(std::ifstream(dir / "manifest.json"));
  manifest["doc_term"] = "dt.csv";
  write(dir / "manifest.json", manifest.dump());
  write(dir / "dt.csv", "0,1,2\n0,1,3\n4,5,1\n");
  const CorpusBundle b = load_bundle(dir.path());
  REQUIRE(b.doc_term);
  CHECK(b.doc_term->at(0, 1) == 5);
  CHECK(b.doc_term->at(4, 5) == 1);
  CHECK(b.doc_term->nonzeros() == 2);

  write(dir / "dt.csv", "0,6,1\n");
  CHECK_THROWS_AS(load_bundle(dir.path()), BundleError);
}

TEST_CASE("validation reports errors and warnings") {
  CorpusBundle b = testing::toy_bundle();
  b.vocabulary[2] = "apple";
  b.documents[3].id = "d1";
  b.topic_names[1] = "";
  b.phi(0, 0) = -0.1;
  const auto report = validate_bundle(b);
  CHECK_FALSE(report.ok());
  CHECK(has_code(report.errors, "duplicate_term"));
  CHECK(has_code(report.errors, "duplicate_document_id"));
  CHECK(has_code(report.errors, "empty_topic_name"));
  CHECK(has_code(report.warnings, "negative_phi"));
}

TEST_CASE("non-NFC vocabulary is an error, empty documents a warning") {
  CorpusBundle b = testing::toy_bundle();
  b.vocabulary[0] = "cafe\xCC\x81";  // e + combining acute
  b.documents[4].text = "";
  const auto report = validate_bundle(b);
  CHECK(has_code(report.errors, "not_nfc"));
  CHECK(has_code(report.warnings, "empty_document"));
}

TEST_CASE("unused terms produce a warning") {
  CorpusBundle b = testing::toy_bundle();
  b.vocabulary.push_back("unseen");
  b.phi = Matrix(3, 7, 0.1);
  const auto report = validate_bundle(b);
  CHECK(report.ok());
  CHECK(has_code(report.warnings, "unused_term"));
}

TEST_CASE("content hash ignores topic names and tracks data") {
  TempDir dir;
  testing::write_toy_bundle(dir.path());
  const std::string h0 = bundle_hash(dir.path());
  CHECK(h0.size() == 64);
  save_topic_names(dir.path(), {"x", "y", "z"}, 3);
  CHECK(bundle_hash(dir.path()) == h0);
  write(dir / "vocab.txt", "apple\nbanana\ncherry\ndata science\nriver\nstones\n");
  CHECK(bundle_hash(dir.path()) != h0);
}

TEST_CASE("sha256 matches the standard test vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("save_topic_names validates and persists") {
  TempDir dir;
  testing::write_toy_bundle(dir.path());
  CHECK_THROWS_AS(save_topic_names(dir.path(), {"a", "b"}, 3), std::invalid_argument);
  CHECK_THROWS_AS(save_topic_names(dir.path(), {"a", "", "c"}, 3), std::invalid_argument);
  save_topic_names(dir.path(), {"a", "b", "c"}, 3);
  CHECK(load_bundle(dir.path()).topic_names == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("derived doc_term counts in-vocabulary matches") {
  const CorpusBundle b = testing::toy_bundle();
  const SparseCounts counts = derive_doc_term(b);
  CHECK(counts.at(0, 0) == 3);  // apple ×3
  CHECK(counts.at(0, 1) == 1);
  CHECK(counts.at(1, 3) == 2);  // "data science" twice as a phrase
  CHECK(counts.at(1, 0) == 1);
  CHECK(counts.row_sum(2) == 3);
  CHECK(counts.row_sum(4) == 0);
}

TEST_CASE("hand-tokenized document counts") {
  CorpusBundle b;
  b.vocabulary = {"alpha", "beta"};
  b.documents = {{"a", "Alpha beta alpha!", std::nullopt}, {"b", "", std::nullopt}};
  const auto counts = derive_doc_term(b);
  CHECK(counts.at(0, 0) == 2);
  CHECK(counts.at(0, 1) == 1);
  CHECK(counts.row_sum(1) == 0);

  CorpusBundle city;
  city.vocabulary = {"new york"};
  city.documents = {{"c", "New York City", std::nullopt}};
  CHECK(derive_doc_term(city).at(0, 0) == 1);
}

TEST_CASE("derived counts ignore document order and never exceed token counts") {
  std::mt19937_64 rng(4);
  CorpusBundle b = testing::random_bundle(rng, 3, 12, 20, false);
  const auto counts = derive_doc_term(b);
  for (std::size_t d = 0; d < b.n_docs(); ++d) CHECK(counts.row_sum(d) <= tokenize(b.documents[d].text).size());
  CorpusBundle reversed = b;
  std::reverse(reversed.documents.begin(), reversed.documents.end());
  const auto rcounts = derive_doc_term(reversed);
  for (std::size_t d = 0; d < b.n_docs(); ++d)
    for (std::size_t w = 0; w < b.n_terms(); ++w) CHECK(counts.at(d, w) == rcounts.at(b.n_docs() - 1 - d, w));
}

TEST_CASE("validation leaves the bundle untouched") {
  CorpusBundle b = testing::toy_bundle();
  b.phi(0, 0) = -0.2;
  const CorpusBundle before = b;
  const auto report = validate_bundle(b);
  CHECK(b == before);
  CHECK(report.ok());
  REQUIRE(has_code(report.warnings, "negative_phi"));
}

TEST_CASE("failed name writes leave the previous file") {
  TempDir dir;
  CorpusBundle b = testing::toy_bundle();
  b.topic_names = {"econ", "sport", "arts"};
  save_bundle(b, dir.path());
  const std::string before = [&] {
    std::ifstream in(dir / "topic_names.json");
    return std::string(std::istreambuf_iterator<char>(in), {});
  }();
  CHECK_THROWS(save_topic_names(dir.path(), {"econ", "sport"}, 3));
  std::ifstream in(dir / "topic_names.json");
  CHECK(std::string(std::istreambuf_iterator<char>(in), {}) == before);
}
