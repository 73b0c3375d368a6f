#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topiclens/matrix.hpp"
#include "topiclens/tokenizer.hpp"

namespace topiclens::interpret {

struct RankedTerm {
  TermIndex term = 0;
  double weight = 0.0;

  friend bool operator==(const RankedTerm&, const RankedTerm&) = default;
};

struct TopicSummary {
  std::size_t topic_id = 0;
  std::string name;
  double importance = 0.0;
  std::vector<RankedTerm> top_terms;
  std::size_t dominant_documents = 0;
};

// ---------------------------------------------------------------------------
// Topics

/// s_t = Σ_d Θ[d,t]·|d|, with |d| the in-vocabulary token count of document d.
/// No normalization is applied.
std::vector<double> topic_importance(const Matrix& theta, std::span<const std::uint64_t> doc_lengths);

/// min(k, M) terms of one φ row, weight-descending, ties by ascending index.
/// Ranks raw (possibly negative) values.
std::vector<RankedTerm> top_k_terms(const Matrix& phi, std::size_t topic, std::size_t k);

/// Per-term column sum of max(φ, 0).
std::vector<double> term_prevalence(const Matrix& phi);

/// argmax, lowest index on ties.
std::size_t dominant_topic(std::span<const double> weights);

// ---------------------------------------------------------------------------
// Words

/// The φ column of `term`, signs preserved.
std::vector<double> word_embedding(const Matrix& phi, TermIndex term);

struct Associations {
  std::vector<RankedTerm> neighbors;  // weight = cosine similarity
  bool zero_norm = false;             // the query column itself has zero norm
};

/// Top-n terms by cosine similarity of φ columns. Self and zero-norm columns
/// are excluded; ties break by ascending index.
Associations nearest_words(const Matrix& phi, TermIndex term, std::size_t n);

struct Distribution {
  std::vector<double> values;
  bool undefined = false;  // no positive mass; values hold the uniform fallback
};

/// p_t ∝ Σ_{w ∈ terms} max(φ[t,w], 0).
Distribution word_topic_distribution(const Matrix& phi, std::span<const TermIndex> terms);

/// Normalizes a nonnegative weight vector to sum 1; all-zero (or any
/// non-positive total) yields the uniform vector flagged `undefined`.
Distribution normalize(std::span<const double> weights);

// ---------------------------------------------------------------------------
// Groups

struct GroupTopicMatrix {
  std::vector<std::string> groups;     // first-appearance order
  Matrix values;                       // |groups| × N
  std::vector<std::size_t> group_of;   // document → row of `values`

  std::optional<std::size_t> find(std::string_view group) const;
};

/// G[i,j] = Σ_k Θ[k,j]·I(g_k = i).
GroupTopicMatrix group_topic_matrix(const Matrix& theta, std::span<const std::string> labels);

/// Per-term counts summed over the group's documents; top 100 positive
/// entries, count-descending, ties by index.
std::vector<RankedTerm> group_wordcloud_weights(const SparseCounts& doc_term, std::span<const std::string> labels,
                                                std::string_view group, std::size_t limit = 100);

// ---------------------------------------------------------------------------
// Documents

/// φ with negatives clamped to 0 and each column scaled to sum 1 (zero
/// columns stay zero). Shared by timelines and highlights so that topics with
/// globally larger scales do not dominate.
class NormalizedPhi {
 public:
  explicit NormalizedPhi(const Matrix& phi);

  double operator()(std::size_t topic, TermIndex term) const { return values_(topic, term); }
  std::size_t topics() const { return values_.rows(); }
  std::size_t terms() const { return values_.cols(); }
  const Matrix& matrix() const { return values_; }

 private:
  Matrix values_;
};

struct TimelineWindow {
  std::size_t token_begin = 0;
  std::size_t token_end = 0;
  std::vector<double> distribution;
  bool empty = false;  // no in-vocabulary term in the window; distribution all zero
};

struct Timeline {
  std::vector<TimelineWindow> windows;
};

inline constexpr std::size_t kDefaultTimelineWindow = 50;
inline constexpr std::size_t kDefaultTimelineStride = 25;

/// Sliding windows at token offsets 0, stride, 2·stride, …; the last partial
/// window is kept. Each window's topic scores Σ φ̂[t,w] are normalized to sum 1.
/// `tokens` holds one entry per text token, empty for out-of-vocabulary ones.
Timeline document_timeline(std::span<const std::optional<TermIndex>> tokens, const NormalizedPhi& phi_hat,
                           std::size_t window = kDefaultTimelineWindow, std::size_t stride = kDefaultTimelineStride);

struct HighlightSpan {
  std::size_t start = 0;  // byte offsets into the document text
  std::size_t end = 0;
  TermIndex term = 0;
  double weight = 0.0;  // φ̂[topic, term]

  friend bool operator==(const HighlightSpan&, const HighlightSpan&) = default;
};

/// Ranks the document's terms by φ̂[topic,term]·count, keeps the top
/// `max_terms` distinct terms with a positive score and returns all their
/// occurrences ascending by start.
std::vector<HighlightSpan> document_highlights(const MatchedText& matched, const NormalizedPhi& phi_hat,
                                               std::size_t topic, std::size_t max_terms);

}  // namespace topiclens::interpret
