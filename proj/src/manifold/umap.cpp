#include <algorithm>

#include "topiclens/manifold.hpp"

namespace topiclens::manifold {

std::size_t default_epochs(std::size_t points) { return points > 10000 ? 200 : 500; }

Projection2D umap_project(const Matrix& points, const UmapParams& params) {
  Projection2D out;
  out.method = "umap";
  out.min_dist = params.min_dist;
  out.spread = params.spread;
  out.epochs = params.epochs > 0 ? params.epochs : default_epochs(points.rows());
  out.learning_rate = params.learning_rate;
  out.negative_samples = params.negative_samples;
  out.seed = params.seed;
  out.metric = params.metric;
  out.init = params.init;

  const CurveParams curve = fit_ab(params.min_dist, params.spread);
  out.a = curve.a;
  out.b = curve.b;

  const std::size_t p = points.rows();
  if (p == 0) return out;
  if (p == 1) {
    out.coords = {{0.0, 0.0}};
    return out;
  }

  const NeighborGraph knn = knn_graph(points, std::max<std::size_t>(params.n_neighbors, 1), params.metric);
  out.n_neighbors = knn.k;
  const FuzzyGraph graph = fuzzy_union(membership_strengths(knn, params.local_connectivity));
  InitResult init = initialize_layout(graph, params.init, params.seed);
  out.init = init.used;

  LayoutParams layout;
  layout.a = curve.a;
  layout.b = curve.b;
  layout.epochs = out.epochs;
  layout.learning_rate = params.learning_rate;
  layout.negative_samples = params.negative_samples;
  layout.seed = params.seed;
  out.coords = optimize_layout(graph, std::move(init.coords), layout);
  return out;
}

}  // namespace topiclens::manifold
