#include <Eigen/Dense>

#include <cmath>

#include "topiclens/manifold.hpp"

namespace topiclens::manifold {

Projection2D pca_project(const Matrix& points) {
  Projection2D out;
  out.method = "pca";
  const auto p = static_cast<Eigen::Index>(points.rows());
  const auto f = static_cast<Eigen::Index>(points.cols());
  if (p == 0) return out;
  out.coords.assign(static_cast<std::size_t>(p), {0.0, 0.0});
  if (p == 1 || f == 0) return out;

  Eigen::MatrixXd x(p, f);
  for (Eigen::Index r = 0; r < p; ++r)
    for (Eigen::Index c = 0; c < f; ++c) x(r, c) = points(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  x.rowwise() -= x.colwise().mean();

  // Right singular directions, either from the covariance (F ≤ P) or
  // recovered from the Gram matrix (F > P).
  const Eigen::Index components = std::min<Eigen::Index>(2, std::min(p, f));
  Eigen::MatrixXd directions(f, components);
  if (f <= p) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x.transpose() * x);
    for (Eigen::Index c = 0; c < components; ++c) directions.col(c) = solver.eigenvectors().col(f - 1 - c);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x * x.transpose());
    for (Eigen::Index c = 0; c < components; ++c) {
      const double lambda = solver.eigenvalues()(p - 1 - c);
      Eigen::VectorXd v = x.transpose() * solver.eigenvectors().col(p - 1 - c);
      const double len = v.norm();
      if (lambda <= 0.0 || len == 0.0) {
        directions.col(c).setZero();
      } else {
        directions.col(c) = v / len;
      }
    }
  }

  for (Eigen::Index c = 0; c < components; ++c) {
    Eigen::Index largest = 0;
    for (Eigen::Index i = 1; i < f; ++i)
      if (std::abs(directions(i, c)) > std::abs(directions(largest, c))) largest = i;
    if (directions(largest, c) < 0.0) directions.col(c) *= -1.0;
  }

  const Eigen::MatrixXd projected = x * directions;
  for (Eigen::Index r = 0; r < p; ++r)
    for (Eigen::Index c = 0; c < components; ++c) out.coords[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = projected(r, c);
  return out;
}

}  // namespace topiclens::manifold
