#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "topiclens/matrix.hpp"
#include "topiclens/tokenizer.hpp"

namespace topiclens {

/// Raised when a bundle directory cannot be read into memory. The message
/// names the offending file and, for parse errors, the row and column.
class BundleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Document {
  std::string id;
  std::string text;
  std::optional<std::string> group;

  friend bool operator==(const Document&, const Document&) = default;
};

/// The interchange unit produced by any topic model.
///   phi   : topics × terms  (N × M)
///   theta : documents × topics  (D × N)
/// Θ rows are kept exactly as supplied; nothing renormalizes them on load.
struct CorpusBundle {
  std::vector<Document> documents;
  std::vector<std::string> vocabulary;
  Matrix phi;
  Matrix theta;
  std::vector<std::string> topic_names;
  std::optional<std::vector<std::string>> group_labels;
  std::optional<Matrix> doc_embeddings;
  std::optional<SparseCounts> doc_term;

  std::size_t n_topics() const { return phi.rows(); }
  std::size_t n_terms() const { return vocabulary.size(); }
  std::size_t n_docs() const { return documents.size(); }

  friend bool operator==(const CorpusBundle&, const CorpusBundle&) = default;
};

struct Issue {
  std::string code;
  std::string message;
  std::string location;
};

struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;

  bool ok() const { return errors.empty(); }
  bool empty() const { return errors.empty() && warnings.empty(); }
};

/// File names of one bundle directory, resolved from `manifest.json`.
struct BundleFiles {
  std::filesystem::path root;
  std::filesystem::path vocabulary;
  std::filesystem::path topic_term;
  std::filesystem::path doc_topic;
  std::filesystem::path documents;
  std::optional<std::filesystem::path> doc_term;
  std::optional<std::filesystem::path> doc_embeddings;
  std::optional<std::filesystem::path> groups;
  std::filesystem::path topic_names;  // may not exist on disk

  static BundleFiles resolve(const std::filesystem::path& root);
};

CorpusBundle load_bundle(const std::filesystem::path& dir);

/// Writes every persisted field under the default file names.
void save_bundle(const CorpusBundle& bundle, const std::filesystem::path& dir);

ValidationReport validate_bundle(const CorpusBundle& bundle);

/// Vocabulary-term counts per document under the built-in tokenizer.
SparseCounts derive_doc_term(const CorpusBundle& bundle);
SparseCounts derive_doc_term(const std::vector<Document>& documents, const TermMatcher& matcher);

/// The supplied counts when present, derived counts otherwise.
SparseCounts doc_term_counts(const CorpusBundle& bundle);

/// Replaces `topic_names.json` via write-temp-then-rename. Rejects wrong
/// length or empty names without touching the file.
void save_topic_names(const std::filesystem::path& dir, const std::vector<std::string>& names,
                      std::size_t n_topics);

/// Hex SHA-256 over the bundle's content files (topic names excluded, so
/// renaming topics keeps derived artifacts valid).
std::string bundle_hash(const std::filesystem::path& dir);

std::string sha256_hex(std::string_view data);

std::vector<std::string> default_topic_names(std::size_t n);

}  // namespace topiclens
