#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "topiclens/interpret.hpp"

namespace topiclens::interpret {

std::optional<std::size_t> GroupTopicMatrix::find(std::string_view group) const {
  for (std::size_t i = 0; i < groups.size(); ++i)
    if (groups[i] == group) return i;
  return std::nullopt;
}

GroupTopicMatrix group_topic_matrix(const Matrix& theta, std::span<const std::string> labels) {
  if (labels.size() != theta.rows()) {
    throw std::invalid_argument("group_topic_matrix: " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(theta.rows()) + " documents");
  }
  GroupTopicMatrix out;
  std::unordered_map<std::string_view, std::size_t> index;
  out.group_of.reserve(labels.size());
  for (const auto& label : labels) {
    auto [it, inserted] = index.try_emplace(label, out.groups.size());
    if (inserted) out.groups.push_back(label);
    out.group_of.push_back(it->second);
  }
  out.values = Matrix(out.groups.size(), theta.cols());
  for (std::size_t d = 0; d < theta.rows(); ++d) {
    auto target = out.values.row(out.group_of[d]);
    const auto source = theta.row(d);
    for (std::size_t t = 0; t < source.size(); ++t) target[t] += source[t];
  }
  return out;
}

std::vector<RankedTerm> group_wordcloud_weights(const SparseCounts& doc_term, std::span<const std::string> labels,
                                                std::string_view group, std::size_t limit) {
  if (labels.size() != doc_term.rows()) {
    throw std::invalid_argument("group_wordcloud_weights: " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(doc_term.rows()) + " documents");
  }
  if (std::find(labels.begin(), labels.end(), group) == labels.end()) {
    throw std::out_of_range("unknown group '" + std::string(group) + "'");
  }
  std::vector<std::uint64_t> totals(doc_term.cols(), 0);
  for (std::size_t d = 0; d < labels.size(); ++d) {
    if (labels[d] != group) continue;
    for (const auto& e : doc_term.row(d)) totals[e.column] += e.count;
  }
  std::vector<RankedTerm> out;
  for (std::size_t w = 0; w < totals.size(); ++w)
    if (totals[w] > 0) out.push_back(RankedTerm{static_cast<TermIndex>(w), static_cast<double>(totals[w])});
  const std::size_t keep = std::min(limit, out.size());
  std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(keep), out.end(),
                    [](const RankedTerm& a, const RankedTerm& b) {
                      return a.weight > b.weight || (a.weight == b.weight && a.term < b.term);
                    });
  out.resize(keep);
  return out;
}

}  // namespace topiclens::interpret
