#pragma once

#include <stdlib.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "topiclens/bundle.hpp"

namespace topiclens::testing {

class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "topiclens-test-XXXXXX").string();
    path_ = mkdtemp(pattern.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Three topics over a six-term vocabulary, five documents in two groups.
inline CorpusBundle toy_bundle() {
  CorpusBundle b;
  b.vocabulary = {"apple", "banana", "cherry", "data science", "river", "stone"};
  b.phi = Matrix(3, 6, {0.40, 0.30, 0.20, 0.05, 0.05, 0.00,
                        0.05, 0.05, 0.10, 0.60, 0.15, 0.05,
                        0.00, 0.05, 0.05, 0.10, 0.40, 0.40});
  b.documents = {
      {"d0", "Apple banana apple cherry, apple pie.", "fruit"},
      {"d1", "Data science is the science of data; apple data science.", "tech"},
      {"d2", "The river runs past the stone and the river bank.", "fruit"},
      {"d3", "Banana! Cherry? River stone data science.", "tech"},
      {"d4", "Nothing matches here at all.", "fruit"},
  };
  b.theta = Matrix(5, 3, {0.80, 0.10, 0.10,
                          0.10, 0.85, 0.05,
                          0.05, 0.05, 0.90,
                          0.30, 0.30, 0.40,
                          0.34, 0.33, 0.33});
  b.topic_names = default_topic_names(3);
  b.group_labels = std::vector<std::string>{"fruit", "tech", "fruit", "tech", "fruit"};
  return b;
}

inline std::filesystem::path write_toy_bundle(const std::filesystem::path& dir) {
  save_bundle(toy_bundle(), dir);
  return dir;
}

/// Random nonnegative bundle with documents sampled from the vocabulary.
inline CorpusBundle random_bundle(std::mt19937_64& rng, std::size_t n_topics, std::size_t n_terms, std::size_t n_docs,
                                  bool with_groups) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, n_terms - 1);
  std::uniform_int_distribution<std::size_t> length(0, 40);
  CorpusBundle b;
  for (std::size_t w = 0; w < n_terms; ++w) b.vocabulary.push_back("w" + std::to_string(w));
  b.phi = Matrix(n_topics, n_terms);
  for (auto& v : b.phi.data()) v = unit(rng) < 0.2 ? 0.0 : unit(rng);
  b.theta = Matrix(n_docs, n_topics);
  for (std::size_t d = 0; d < n_docs; ++d) {
    double total = 0.0;
    for (auto& v : b.theta.row(d)) total += (v = unit(rng));
    for (auto& v : b.theta.row(d)) v /= total;
    std::string text;
    const std::size_t n = length(rng);
    for (std::size_t i = 0; i < n; ++i) {
      text += unit(rng) < 0.2 ? "zz" : b.vocabulary[pick(rng)];
      text += i % 7 == 6 ? ". " : " ";
    }
    Document doc{"doc-" + std::to_string(d), text, std::nullopt};
    if (with_groups) doc.group = "g" + std::to_string(static_cast<std::size_t>(unit(rng) * 3));
    b.documents.push_back(doc);
  }
  if (with_groups) {
    std::vector<std::string> labels;
    for (const auto& d : b.documents) labels.push_back(*d.group);
    b.group_labels = labels;
  }
  b.topic_names = default_topic_names(n_topics);
  return b;
}

}  // namespace topiclens::testing
