#include <algorithm>
#include <cmath>
#include <optional>

#include "topiclens/manifold.hpp"
#include "topiclens/pcg32.hpp"

namespace topiclens::manifold {
namespace {

constexpr double kEigenTolerance = 1e-6;
constexpr int kEigenMaxIterations = 1000;

using Vector = std::vector<double>;

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

void orthogonalize(Vector& x, const std::vector<Vector>& basis) {
  // Two Gram–Schmidt passes keep x orthogonal to the basis to working precision.
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) {
      const double c = dot(x, q);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * q[i];
    }
  }
}

/// y = (I + D^{-1/2} W D^{-1/2}) x. Its top eigenvectors are the bottom
/// eigenvectors of the normalized Laplacian I − D^{-1/2} W D^{-1/2}.
class ShiftedOperator {
 public:
  explicit ShiftedOperator(const FuzzyGraph& graph) : graph_(graph), inv_sqrt_degree_(graph.points, 0.0) {
    std::vector<double> degree(graph.points, 0.0);
    for (const auto& e : graph.edges) degree[e.from] += e.weight;
    for (std::size_t i = 0; i < degree.size(); ++i)
      inv_sqrt_degree_[i] = degree[i] > 0.0 ? 1.0 / std::sqrt(degree[i]) : 0.0;
    sqrt_degree_.resize(degree.size());
    for (std::size_t i = 0; i < degree.size(); ++i) sqrt_degree_[i] = std::sqrt(degree[i]);
  }

  Vector apply(const Vector& x) const {
    Vector y = x;
    for (const auto& e : graph_.edges)
      y[e.from] += inv_sqrt_degree_[e.from] * e.weight * inv_sqrt_degree_[e.to] * x[e.to];
    return y;
  }

  const Vector& sqrt_degree() const { return sqrt_degree_; }

 private:
  const FuzzyGraph& graph_;
  Vector inv_sqrt_degree_;
  Vector sqrt_degree_;
};

std::optional<Vector> dominant_eigenvector(const ShiftedOperator& op, const std::vector<Vector>& deflate, Pcg32& rng,
                                           std::size_t n) {
  Vector x(n);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  orthogonalize(x, deflate);
  double len = norm(x);
  if (len == 0.0) return std::nullopt;
  for (auto& v : x) v /= len;

  for (int it = 0; it < kEigenMaxIterations; ++it) {
    Vector y = op.apply(x);
    orthogonalize(y, deflate);
    const double lambda = dot(x, y);
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual += (y[i] - lambda * x[i]) * (y[i] - lambda * x[i]);
    if (std::sqrt(residual) <= kEigenTolerance) return x;
    len = norm(y);
    if (len == 0.0 || !std::isfinite(len)) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / len;
  }
  return std::nullopt;
}

Coordinates random_layout(std::size_t points, std::uint64_t seed) {
  Pcg32 rng(seed, points);
  Coordinates coords(points);
  for (auto& c : coords) {
    c[0] = rng.uniform(-kInitExtent, kInitExtent);
    c[1] = rng.uniform(-kInitExtent, kInitExtent);
  }
  return coords;
}

std::optional<Coordinates> spectral_layout(const FuzzyGraph& graph, std::uint64_t seed) {
  const std::size_t n = graph.points;
  if (n < 3) return std::nullopt;
  const ShiftedOperator op(graph);

  Vector trivial = op.sqrt_degree();
  const double trivial_norm = norm(trivial);
  if (trivial_norm == 0.0) return std::nullopt;
  for (auto& v : trivial) v /= trivial_norm;

  Pcg32 rng(seed, n);
  std::vector<Vector> basis{trivial};
  for (int component = 0; component < 2; ++component) {
    auto v = dominant_eigenvector(op, basis, rng, n);
    if (!v) return std::nullopt;
    basis.push_back(std::move(*v));
  }

  double extent = 0.0;
  for (std::size_t i = 0; i < n; ++i) extent = std::max({extent, std::abs(basis[1][i]), std::abs(basis[2][i])});
  if (extent == 0.0 || !std::isfinite(extent)) return std::nullopt;
  const double scale = kInitExtent / extent;
  Coordinates coords(n);
  for (std::size_t i = 0; i < n; ++i) coords[i] = {basis[1][i] * scale, basis[2][i] * scale};
  return coords;
}

}  // namespace

InitResult initialize_layout(const FuzzyGraph& graph, InitMode mode, std::uint64_t seed) {
  if (graph.points == 0) return {};
  if (graph.points == 1) return InitResult{Coordinates{{0.0, 0.0}}, mode};
  if (mode == InitMode::spectral) {
    if (auto coords = spectral_layout(graph, seed)) return InitResult{std::move(*coords), InitMode::spectral};
  }
  return InitResult{random_layout(graph.points, seed), InitMode::random};
}

}  // namespace topiclens::manifold
