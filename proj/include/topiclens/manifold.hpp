#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "topiclens/matrix.hpp"

namespace topiclens::manifold {

enum class Metric { euclidean, cosine };
enum class InitMode { spectral, random };

std::string to_string(Metric metric);
std::string to_string(InitMode mode);
Metric parse_metric(std::string_view name);
InitMode parse_init_mode(std::string_view name);

// ---------------------------------------------------------------------------
// k-NN graph

/// Exact k nearest neighbours of every point, row-major: neighbours of point
/// i live at [i·k, (i+1)·k). Distances are non-decreasing per point, ties
/// broken by ascending index, and a point is never its own neighbour.
struct NeighborGraph {
  std::size_t points = 0;
  std::size_t k = 0;
  std::vector<std::uint32_t> indices;
  std::vector<double> distances;

  std::span<const std::uint32_t> neighbors(std::size_t i) const { return {indices.data() + i * k, k}; }
  std::span<const double> neighbor_distances(std::size_t i) const { return {distances.data() + i * k, k}; }
};

/// Cosine distance is 1 − cos; two zero vectors are at distance 0, a zero
/// vector and a nonzero one at distance 1.
double distance(std::span<const double> a, std::span<const double> b, Metric metric);

/// `k` is clamped to P − 1. Throws std::invalid_argument when P < 2.
NeighborGraph knn_graph(const Matrix& points, std::size_t k, Metric metric);

// ---------------------------------------------------------------------------
// Fuzzy simplicial set

struct SmoothedDistances {
  double rho = 0.0;
  double sigma = 0.0;
  bool clamped = false;   // σ sits on the 1e-3 × mean-distance floor (1e-3 when all distances are 0)
  double residual = 0.0;  // Σ exp(−max(d−ρ,0)/σ) − log2(k) at the returned σ
  int iterations = 0;
};

inline constexpr int kSmoothKnnMaxIterations = 64;
inline constexpr double kSmoothKnnTolerance = 1e-5;
inline constexpr double kMinSigmaScale = 1e-3;

/// Calibrates one point's bandwidth so that Σ_j exp(−max(d_j−ρ,0)/σ) = log2(k).
SmoothedDistances smooth_knn(std::span<const double> distances, std::size_t local_connectivity = 1);

struct Edge {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Sparse directed membership strengths w_ij before symmetrization.
struct DirectedGraph {
  std::size_t points = 0;
  std::vector<Edge> edges;
  std::vector<double> rho;
  std::vector<double> sigma;
};

/// w_ij = exp(−max(d_ij − ρ_i, 0)/σ_i) for every k-NN edge.
DirectedGraph membership_strengths(const NeighborGraph& graph, std::size_t local_connectivity = 1);

/// Symmetric weights, stored in both directions, sorted by (from, to).
/// Zero weights and self-loops are never stored.
struct FuzzyGraph {
  std::size_t points = 0;
  std::vector<Edge> edges;
  std::vector<double> rho;
  std::vector<double> sigma;

  double weight(std::uint32_t i, std::uint32_t j) const;
};

/// Probabilistic t-conorm: a + aᵀ − a∘aᵀ.
FuzzyGraph fuzzy_union(const DirectedGraph& directed);

// ---------------------------------------------------------------------------
// Low-dimensional curve

struct CurveParams {
  double a = 0.0;
  double b = 0.0;
  double residual = 0.0;  // sum of squared errors on the sample grid
  int iterations = 0;
};

class CurveFitError : public std::runtime_error {
 public:
  CurveFitError(const std::string& what, CurveParams last) : std::runtime_error(what), last_(last) {}
  const CurveParams& last_iterate() const { return last_; }

 private:
  CurveParams last_;
};

inline constexpr int kCurveSamples = 300;

/// Least-squares fit of 1/(1 + a·d^{2b}) to the target membership curve
/// (1 for d ≤ min_dist, exp(−(d − min_dist)/spread) beyond) on d_i = 3·spread·i/300.
CurveParams fit_ab(double min_dist, double spread);

/// Sum of squared errors of (a, b) on the same sample grid.
double curve_residual(double a, double b, double min_dist, double spread);

// ---------------------------------------------------------------------------
// Layout

using Coordinates = std::vector<std::array<double, 2>>;

struct InitResult {
  Coordinates coords;
  InitMode used = InitMode::random;  // random when spectral failed or was not requested
};

inline constexpr double kInitExtent = 10.0;

/// Spectral: the two smallest nontrivial eigenvectors of the symmetric
/// normalized Laplacian by power iteration with deflation, rescaled into
/// [−10, 10]. Falls back to seeded uniform noise if that does not converge.
InitResult initialize_layout(const FuzzyGraph& graph, InitMode mode, std::uint64_t seed);

class LayoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LayoutParams {
  double a = 1.577;
  double b = 0.895;
  std::size_t epochs = 500;
  double learning_rate = 1.0;
  std::size_t negative_samples = 5;
  std::uint64_t seed = 0;
};

/// Stochastic attract/repel layout with edge sampling proportional to weight.
/// Single-threaded; identical inputs and seed give bit-identical output.
Coordinates optimize_layout(const FuzzyGraph& graph, Coordinates init, const LayoutParams& params);

// ---------------------------------------------------------------------------
// Projections

struct UmapParams {
  std::size_t n_neighbors = 15;
  double min_dist = 0.1;
  double spread = 1.0;
  std::size_t epochs = 0;  // 0 selects 500, or 200 above 10 000 points
  double learning_rate = 1.0;
  std::size_t negative_samples = 5;
  std::size_t local_connectivity = 1;
  Metric metric = Metric::euclidean;
  InitMode init = InitMode::spectral;
  std::uint64_t seed = 0;
};

std::size_t default_epochs(std::size_t points);

struct Projection2D {
  std::string method;  // "umap" or "pca"
  Coordinates coords;
  // Parameters that produced the coordinates (UMAP only, effective values).
  std::size_t n_neighbors = 0;
  double min_dist = 0.0;
  double spread = 0.0;
  double a = 0.0;
  double b = 0.0;
  std::size_t epochs = 0;
  double learning_rate = 0.0;
  std::size_t negative_samples = 0;
  std::uint64_t seed = 0;
  Metric metric = Metric::euclidean;
  InitMode init = InitMode::spectral;

  friend bool operator==(const Projection2D&, const Projection2D&) = default;
};

Projection2D umap_project(const Matrix& points, const UmapParams& params);

/// Mean-centred projection on the top two right singular directions. Each
/// direction is oriented so its largest-magnitude loading is positive.
Projection2D pca_project(const Matrix& points);

}  // namespace topiclens::manifold
