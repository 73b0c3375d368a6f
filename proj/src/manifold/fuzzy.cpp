#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "topiclens/manifold.hpp"

namespace topiclens::manifold {
namespace {

double membership(double d, double rho, double sigma) {
  const double excess = d - rho;
  if (excess <= 0.0) return 1.0;
  if (sigma <= 0.0) return 0.0;
  return std::exp(-excess / sigma);
}

double membership_sum(std::span<const double> distances, double rho, double sigma) {
  double s = 0.0;
  for (double d : distances) s += membership(d, rho, sigma);
  return s;
}

}  // namespace

SmoothedDistances smooth_knn(std::span<const double> distances, std::size_t local_connectivity) {
  SmoothedDistances out;
  const std::size_t k = distances.size();
  if (k == 0) return out;
  const std::size_t lc = std::clamp<std::size_t>(local_connectivity, 1, k);
  out.rho = distances[lc - 1];

  const double target = std::log2(static_cast<double>(k));
  const double mean = std::accumulate(distances.begin(), distances.end(), 0.0) / static_cast<double>(k);
  const double floor = kMinSigmaScale * (mean > 0.0 ? mean : 1.0);

  // As σ → 0 the sum falls to the number of neighbours at distance ≤ ρ; if
  // that already meets the target there is no positive root.
  const auto at_rho = static_cast<double>(std::count_if(distances.begin(), distances.end(),
                                                        [&](double d) { return d <= out.rho; }));
  if (at_rho >= target) {
    out.sigma = floor;
    out.clamped = true;
    out.residual = membership_sum(distances, out.rho, out.sigma) - target;
    return out;
  }

  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double mid = mean > 0.0 ? mean : 1.0;
  for (int it = 0; it < kSmoothKnnMaxIterations; ++it) {
    out.iterations = it + 1;
    const double r = membership_sum(distances, out.rho, mid) - target;
    if (std::abs(r) <= kSmoothKnnTolerance) break;
    if (r > 0.0) {
      hi = mid;
      mid = 0.5 * (lo + hi);
    } else {
      lo = mid;
      mid = std::isinf(hi) ? mid * 2.0 : 0.5 * (lo + hi);
    }
  }
  out.sigma = mid;
  if (out.sigma < floor) {
    out.sigma = floor;
    out.clamped = true;
  }
  out.residual = membership_sum(distances, out.rho, out.sigma) - target;
  return out;
}

DirectedGraph membership_strengths(const NeighborGraph& graph, std::size_t local_connectivity) {
  DirectedGraph out;
  out.points = graph.points;
  out.rho.resize(graph.points);
  out.sigma.resize(graph.points);
  out.edges.reserve(graph.points * graph.k);
  for (std::size_t i = 0; i < graph.points; ++i) {
    const auto dists = graph.neighbor_distances(i);
    const auto smoothed = smooth_knn(dists, local_connectivity);
    out.rho[i] = smoothed.rho;
    out.sigma[i] = smoothed.sigma;
    const auto nbrs = graph.neighbors(i);
    for (std::size_t r = 0; r < graph.k; ++r) {
      out.edges.push_back(Edge{static_cast<std::uint32_t>(i), nbrs[r], membership(dists[r], smoothed.rho, smoothed.sigma)});
    }
  }
  return out;
}

FuzzyGraph fuzzy_union(const DirectedGraph& directed) {
  // (min, max) → (weight min→max, weight max→min)
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<double, double>> pairs;
  for (const auto& e : directed.edges) {
    if (e.from == e.to) continue;
    if (e.from < e.to) {
      pairs[{e.from, e.to}].first = e.weight;
    } else {
      pairs[{e.to, e.from}].second = e.weight;
    }
  }
  FuzzyGraph out;
  out.points = directed.points;
  out.rho = directed.rho;
  out.sigma = directed.sigma;
  out.edges.reserve(pairs.size() * 2);
  for (const auto& [key, w] : pairs) {
    const double a = w.first;
    const double b = w.second;
    const double u = std::clamp(a + b - a * b, 0.0, 1.0);
    if (u <= 0.0) continue;
    out.edges.push_back(Edge{key.first, key.second, u});
    out.edges.push_back(Edge{key.second, key.first, u});
  }
  std::sort(out.edges.begin(), out.edges.end(),
            [](const Edge& x, const Edge& y) { return x.from < y.from || (x.from == y.from && x.to < y.to); });
  return out;
}

double FuzzyGraph::weight(std::uint32_t i, std::uint32_t j) const {
  auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(i, j), [](const Edge& e, const auto& key) {
    return e.from < key.first || (e.from == key.first && e.to < key.second);
  });
  return (it != edges.end() && it->from == i && it->to == j) ? it->weight : 0.0;
}

}  // namespace topiclens::manifold
