#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "topiclens/interpret.hpp"

namespace topiclens::interpret {

std::vector<double> topic_importance(const Matrix& theta, std::span<const std::uint64_t> doc_lengths) {
  if (doc_lengths.size() != theta.rows()) {
    throw std::invalid_argument("topic_importance: " + std::to_string(doc_lengths.size()) +
                                " document lengths for " + std::to_string(theta.rows()) + " theta rows");
  }
  std::vector<double> importance(theta.cols(), 0.0);
  for (std::size_t d = 0; d < theta.rows(); ++d) {
    const auto length = static_cast<double>(doc_lengths[d]);
    const auto row = theta.row(d);
    for (std::size_t t = 0; t < row.size(); ++t) importance[t] += row[t] * length;
  }
  return importance;
}

std::vector<RankedTerm> top_k_terms(const Matrix& phi, std::size_t topic, std::size_t k) {
  if (topic >= phi.rows()) {
    throw std::out_of_range("topic " + std::to_string(topic) + " out of range (" + std::to_string(phi.rows()) +
                            " topics)");
  }
  if (k == 0) throw std::invalid_argument("top_k_terms: k must be positive");
  const auto row = phi.row(topic);
  std::vector<TermIndex> order(row.size());
  std::iota(order.begin(), order.end(), TermIndex{0});
  const std::size_t keep = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](TermIndex a, TermIndex b) { return row[a] > row[b] || (row[a] == row[b] && a < b); });
  std::vector<RankedTerm> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(RankedTerm{order[i], row[order[i]]});
  return out;
}

std::vector<double> term_prevalence(const Matrix& phi) {
  std::vector<double> prevalence(phi.cols(), 0.0);
  for (std::size_t t = 0; t < phi.rows(); ++t) {
    const auto row = phi.row(t);
    for (std::size_t w = 0; w < row.size(); ++w) prevalence[w] += std::max(row[w], 0.0);
  }
  return prevalence;
}

std::size_t dominant_topic(std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("dominant_topic: empty weight vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < weights.size(); ++i)
    if (weights[i] > weights[best]) best = i;
  return best;
}

Distribution normalize(std::span<const double> weights) {
  Distribution out;
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) {
    out.undefined = true;
    const double uniform = weights.empty() ? 0.0 : 1.0 / static_cast<double>(weights.size());
    out.values.assign(weights.size(), uniform);
    return out;
  }
  out.values.reserve(weights.size());
  for (double w : weights) out.values.push_back(w / total);
  return out;
}

}  // namespace topiclens::interpret
