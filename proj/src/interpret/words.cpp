#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "topiclens/interpret.hpp"

namespace topiclens::interpret {
namespace {

void check_term(const Matrix& phi, TermIndex term) {
  if (term >= phi.cols()) {
    throw std::out_of_range("term " + std::to_string(term) + " out of range (" + std::to_string(phi.cols()) +
                            " terms)");
  }
}

}  // namespace

std::vector<double> word_embedding(const Matrix& phi, TermIndex term) {
  check_term(phi, term);
  return phi.column(term);
}

Associations nearest_words(const Matrix& phi, TermIndex term, std::size_t n) {
  check_term(phi, term);
  if (n == 0) throw std::invalid_argument("nearest_words: n must be positive");
  const std::size_t m = phi.cols();

  std::vector<double> norms(m, 0.0);
  std::vector<double> dots(m, 0.0);
  for (std::size_t t = 0; t < phi.rows(); ++t) {
    const auto row = phi.row(t);
    const double q = row[term];
    for (std::size_t w = 0; w < m; ++w) {
      norms[w] += row[w] * row[w];
      dots[w] += q * row[w];
    }
  }

  Associations out;
  if (norms[term] == 0.0) {
    out.zero_norm = true;
    return out;
  }
  const double query_norm = std::sqrt(norms[term]);
  std::vector<RankedTerm> candidates;
  candidates.reserve(m);
  for (std::size_t w = 0; w < m; ++w) {
    if (w == term || norms[w] == 0.0) continue;
    const double similarity = dots[w] / (query_norm * std::sqrt(norms[w]));
    candidates.push_back(RankedTerm{static_cast<TermIndex>(w), std::clamp(similarity, -1.0, 1.0)});
  }
  const std::size_t keep = std::min(n, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                    [](const RankedTerm& a, const RankedTerm& b) {
                      return a.weight > b.weight || (a.weight == b.weight && a.term < b.term);
                    });
  candidates.resize(keep);
  out.neighbors = std::move(candidates);
  return out;
}

Distribution word_topic_distribution(const Matrix& phi, std::span<const TermIndex> terms) {
  if (terms.empty()) throw std::invalid_argument("word_topic_distribution: empty term set");
  for (TermIndex w : terms) check_term(phi, w);
  std::vector<TermIndex> unique(terms.begin(), terms.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

  std::vector<double> mass(phi.rows(), 0.0);
  for (std::size_t t = 0; t < phi.rows(); ++t)
    for (TermIndex w : unique) mass[t] += std::max(phi(t, w), 0.0);
  return normalize(mass);
}

}  // namespace topiclens::interpret
