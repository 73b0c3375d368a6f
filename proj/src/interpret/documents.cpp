#include <algorithm>
#include <map>
#include <stdexcept>

#include "topiclens/interpret.hpp"

namespace topiclens::interpret {

NormalizedPhi::NormalizedPhi(const Matrix& phi) : values_(phi.rows(), phi.cols()) {
  std::vector<double> column_sums(phi.cols(), 0.0);
  for (std::size_t t = 0; t < phi.rows(); ++t)
    for (std::size_t w = 0; w < phi.cols(); ++w) column_sums[w] += std::max(phi(t, w), 0.0);
  for (std::size_t t = 0; t < phi.rows(); ++t)
    for (std::size_t w = 0; w < phi.cols(); ++w)
      values_(t, w) = column_sums[w] > 0.0 ? std::max(phi(t, w), 0.0) / column_sums[w] : 0.0;
}

Timeline document_timeline(std::span<const std::optional<TermIndex>> tokens, const NormalizedPhi& phi_hat,
                           std::size_t window, std::size_t stride) {
  if (window == 0 || stride == 0) throw std::invalid_argument("document_timeline: window and stride must be positive");
  Timeline timeline;
  const std::size_t n = phi_hat.topics();
  for (std::size_t begin = 0; begin < tokens.size(); begin += stride) {
    TimelineWindow w;
    w.token_begin = begin;
    w.token_end = std::min(begin + window, tokens.size());
    std::vector<double> scores(n, 0.0);
    double total = 0.0;
    for (std::size_t i = w.token_begin; i < w.token_end; ++i) {
      if (!tokens[i]) continue;
      for (std::size_t t = 0; t < n; ++t) {
        const double v = phi_hat(t, *tokens[i]);
        scores[t] += v;
        total += v;
      }
    }
    if (total > 0.0) {
      for (double& s : scores) s /= total;
    } else {
      std::fill(scores.begin(), scores.end(), 0.0);
      w.empty = true;
    }
    w.distribution = std::move(scores);
    timeline.windows.push_back(std::move(w));
  }
  return timeline;
}

std::vector<HighlightSpan> document_highlights(const MatchedText& matched, const NormalizedPhi& phi_hat,
                                               std::size_t topic, std::size_t max_terms) {
  if (topic >= phi_hat.topics()) {
    throw std::out_of_range("topic " + std::to_string(topic) + " out of range (" + std::to_string(phi_hat.topics()) +
                            " topics)");
  }
  if (max_terms == 0) throw std::invalid_argument("document_highlights: max_terms must be positive");

  std::map<TermIndex, std::size_t> counts;
  for (const auto& occ : matched.occurrences) ++counts[occ.term];

  struct Scored {
    TermIndex term;
    double score;
  };
  std::vector<Scored> scored;
  for (const auto& [term, count] : counts) {
    const double score = phi_hat(topic, term) * static_cast<double>(count);
    if (score > 0.0) scored.push_back(Scored{term, score});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    return a.score > b.score || (a.score == b.score && a.term < b.term);
  });
  if (scored.size() > max_terms) scored.resize(max_terms);

  std::vector<bool> selected(phi_hat.terms(), false);
  for (const auto& s : scored) selected[s.term] = true;

  std::vector<HighlightSpan> spans;
  for (const auto& occ : matched.occurrences) {
    if (selected[occ.term])
      spans.push_back(HighlightSpan{occ.byte_begin, occ.byte_end, occ.term, phi_hat(topic, occ.term)});
  }
  return spans;
}

}  // namespace topiclens::interpret
