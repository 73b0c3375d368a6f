#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "topiclens/manifold.hpp"

namespace topiclens::manifold {

std::string to_string(Metric metric) { return metric == Metric::cosine ? "cosine" : "euclidean"; }
std::string to_string(InitMode mode) { return mode == InitMode::spectral ? "spectral" : "random"; }

Metric parse_metric(std::string_view name) {
  if (name == "cosine") return Metric::cosine;
  if (name == "euclidean") return Metric::euclidean;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

InitMode parse_init_mode(std::string_view name) {
  if (name == "spectral") return InitMode::spectral;
  if (name == "random") return InitMode::random;
  throw std::invalid_argument("unknown init mode '" + std::string(name) + "'");
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double cosine_from_parts(double ab, double aa, double bb) {
  if (aa == 0.0 && bb == 0.0) return 0.0;
  if (aa == 0.0 || bb == 0.0) return 1.0;
  return std::max(0.0, 1.0 - ab / std::sqrt(aa * bb));
}

}  // namespace

double distance(std::span<const double> a, std::span<const double> b, Metric metric) {
  if (metric == Metric::cosine) return cosine_from_parts(dot(a, b), dot(a, a), dot(b, b));
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return std::sqrt(s);
}

NeighborGraph knn_graph(const Matrix& points, std::size_t k, Metric metric) {
  const std::size_t p = points.rows();
  if (p < 2) throw std::invalid_argument("knn_graph: need at least 2 points, got " + std::to_string(p));
  k = std::min(k, p - 1);
  if (k == 0) throw std::invalid_argument("knn_graph: k must be positive");

  NeighborGraph graph;
  graph.points = p;
  graph.k = k;
  graph.indices.resize(p * k);
  graph.distances.resize(p * k);

  std::vector<double> sq_norms(p);
  for (std::size_t i = 0; i < p; ++i) sq_norms[i] = dot(points.row(i), points.row(i));

  std::vector<std::pair<double, std::uint32_t>> row(p - 1);
  for (std::size_t i = 0; i < p; ++i) {
    std::size_t n = 0;
    for (std::size_t j = 0; j < p; ++j) {
      if (j == i) continue;
      const double d = metric == Metric::cosine
                           ? cosine_from_parts(dot(points.row(i), points.row(j)), sq_norms[i], sq_norms[j])
                           : distance(points.row(i), points.row(j), Metric::euclidean);
      row[n++] = {d, static_cast<std::uint32_t>(j)};
    }
    std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), row.end());
    for (std::size_t r = 0; r < k; ++r) {
      graph.distances[i * k + r] = row[r].first;
      graph.indices[i * k + r] = row[r].second;
    }
  }
  return graph;
}

}  // namespace topiclens::manifold
