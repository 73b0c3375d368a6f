#include <algorithm>
#include <cmath>

#include "topiclens/manifold.hpp"
#include "topiclens/pcg32.hpp"

namespace topiclens::manifold {
namespace {

constexpr double kGradientClip = 4.0;
constexpr double kRepulsionStrength = 1.0;

double clip(double v) { return std::clamp(v, -kGradientClip, kGradientClip); }

double squared_distance(const std::array<double, 2>& p, const std::array<double, 2>& q) {
  const double dx = p[0] - q[0];
  const double dy = p[1] - q[1];
  return dx * dx + dy * dy;
}

void repel(Coordinates& coords, std::uint32_t from, std::uint32_t other, double a, double b, double alpha) {
  if (from == other) return;
  auto& current = coords[from];
  const auto& target = coords[other];
  const double dist_sq = squared_distance(current, target);
  double coeff = 0.0;
  if (dist_sq > 0.0) coeff = 2.0 * kRepulsionStrength * b / ((0.001 + dist_sq) * (a * std::pow(dist_sq, b) + 1.0));
  for (int d = 0; d < 2; ++d) {
    const double grad = coeff > 0.0 ? clip(coeff * (current[d] - target[d])) : kGradientClip;
    current[d] += grad * alpha;
  }
}

}  // namespace

Coordinates optimize_layout(const FuzzyGraph& graph, Coordinates coords, const LayoutParams& params) {
  if (params.epochs == 0) throw std::invalid_argument("optimize_layout: epochs must be positive");
  if (coords.size() != graph.points) throw std::invalid_argument("optimize_layout: init size does not match graph");
  const std::size_t n_points = graph.points;
  if (n_points < 2) return coords;

  const double a = params.a;
  const double b = params.b;
  const auto epochs = static_cast<double>(params.epochs);

  // Edges too weak to be sampled even once over the run are dropped.
  double max_weight = 0.0;
  for (const auto& e : graph.edges) max_weight = std::max(max_weight, e.weight);
  std::vector<Edge> edges;
  for (const auto& e : graph.edges)
    if (e.weight >= max_weight / epochs && e.weight > 0.0) edges.push_back(e);

  std::vector<double> epochs_per_sample(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) epochs_per_sample[i] = max_weight / edges[i].weight;
  std::vector<double> next_sample = epochs_per_sample;
  const double neg_rate = static_cast<double>(std::max<std::size_t>(params.negative_samples, 1));
  std::vector<double> epochs_per_negative(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) epochs_per_negative[i] = epochs_per_sample[i] / neg_rate;
  std::vector<double> next_negative = epochs_per_negative;

  // Points left without any edge would never move; they get a fixed number
  // of repulsive samples per epoch instead.
  std::vector<bool> has_edge(n_points, false);
  for (const auto& e : edges) has_edge[e.from] = has_edge[e.to] = true;
  std::vector<std::uint32_t> isolated;
  for (std::size_t i = 0; i < n_points; ++i)
    if (!has_edge[i]) isolated.push_back(static_cast<std::uint32_t>(i));

  Pcg32 rng(params.seed, n_points);
  const auto bound = static_cast<std::uint32_t>(n_points);

  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    const double alpha = params.learning_rate * (1.0 - static_cast<double>(epoch) / epochs);
    const auto n = static_cast<double>(epoch);

    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (next_sample[i] > n) continue;
      const std::uint32_t j = edges[i].from;
      const std::uint32_t k = edges[i].to;
      auto& current = coords[j];
      auto& other = coords[k];
      const double dist_sq = squared_distance(current, other);
      double coeff = 0.0;
      if (dist_sq > 0.0) coeff = -2.0 * a * b * std::pow(dist_sq, b - 1.0) / (a * std::pow(dist_sq, b) + 1.0);
      for (int d = 0; d < 2; ++d) {
        const double grad = clip(coeff * (current[d] - other[d]));
        current[d] += grad * alpha;
        other[d] -= grad * alpha;
      }
      next_sample[i] += epochs_per_sample[i];

      if (params.negative_samples > 0) {
        const auto n_neg = static_cast<std::size_t>((n - next_negative[i]) / epochs_per_negative[i]);
        for (std::size_t p = 0; p < n_neg; ++p) repel(coords, j, rng.bounded(bound), a, b, alpha);
        next_negative[i] += static_cast<double>(n_neg) * epochs_per_negative[i];
      }
    }

    for (std::uint32_t v : isolated)
      for (std::size_t p = 0; p < params.negative_samples; ++p) repel(coords, v, rng.bounded(bound), a, b, alpha);

    for (std::size_t i = 0; i < n_points; ++i) {
      if (!std::isfinite(coords[i][0]) || !std::isfinite(coords[i][1])) {
        throw LayoutError("non-finite coordinate at epoch " + std::to_string(epoch) + ", point " + std::to_string(i));
      }
    }
  }
  return coords;
}

}  // namespace topiclens::manifold
