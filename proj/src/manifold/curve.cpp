#include <array>
#include <cmath>
#include <limits>

#include "topiclens/manifold.hpp"

namespace topiclens::manifold {
namespace {

constexpr int kMaxIterations = 200;
constexpr double kParamTolerance = 1e-8;

struct Samples {
  std::array<double, kCurveSamples> d{};
  std::array<double, kCurveSamples> y{};
};

Samples make_samples(double min_dist, double spread) {
  Samples s;
  for (int i = 0; i < kCurveSamples; ++i) {
    const double d = 3.0 * spread * static_cast<double>(i + 1) / kCurveSamples;
    s.d[i] = d;
    s.y[i] = d <= min_dist ? 1.0 : std::exp(-(d - min_dist) / spread);
  }
  return s;
}

double sse(const Samples& s, double a, double b) {
  double total = 0.0;
  for (int i = 0; i < kCurveSamples; ++i) {
    const double r = 1.0 / (1.0 + a * std::pow(s.d[i], 2.0 * b)) - s.y[i];
    total += r * r;
  }
  return total;
}

}  // namespace

double curve_residual(double a, double b, double min_dist, double spread) {
  return sse(make_samples(min_dist, spread), a, b);
}

// Levenberg–Marquardt: Gauss–Newton steps damped by λ·diag(JᵀJ).
CurveParams fit_ab(double min_dist, double spread) {
  if (!(min_dist > 0.0) || !(spread > 0.0) || !(min_dist < 10.0 * spread)) {
    throw std::invalid_argument("fit_ab: require 0 < min_dist < 10·spread");
  }
  const Samples s = make_samples(min_dist, spread);
  CurveParams p{1.0, 1.0, sse(s, 1.0, 1.0), 0};
  double lambda = 1e-3;

  for (int it = 1; it <= kMaxIterations; ++it) {
    p.iterations = it;
    double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, jtr0 = 0.0, jtr1 = 0.0;
    for (int i = 0; i < kCurveSamples; ++i) {
      const double u = std::pow(s.d[i], 2.0 * p.b);
      const double denom = 1.0 + p.a * u;
      const double f = 1.0 / denom;
      const double r = f - s.y[i];
      const double dfda = -u / (denom * denom);
      const double dfdb = -p.a * u * 2.0 * std::log(s.d[i]) / (denom * denom);
      jtj00 += dfda * dfda;
      jtj01 += dfda * dfdb;
      jtj11 += dfdb * dfdb;
      jtr0 += dfda * r;
      jtr1 += dfdb * r;
    }

    bool accepted = false;
    double step_a = 0.0, step_b = 0.0;
    for (int attempt = 0; attempt < 50 && !accepted; ++attempt) {
      const double m00 = jtj00 * (1.0 + lambda);
      const double m11 = jtj11 * (1.0 + lambda);
      const double det = m00 * m11 - jtj01 * jtj01;
      if (det == 0.0 || !std::isfinite(det)) {
        lambda *= 10.0;
        continue;
      }
      step_a = -(m11 * jtr0 - jtj01 * jtr1) / det;
      step_b = -(m00 * jtr1 - jtj01 * jtr0) / det;
      const double na = p.a + step_a;
      const double nb = p.b + step_b;
      const double candidate = (na > 0.0 && nb > 0.0) ? sse(s, na, nb) : std::numeric_limits<double>::infinity();
      if (candidate <= p.residual) {
        p.a = na;
        p.b = nb;
        p.residual = candidate;
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
      } else {
        lambda *= 10.0;
      }
    }

    const double scale_a = std::abs(p.a) + kParamTolerance;
    const double scale_b = std::abs(p.b) + kParamTolerance;
    const bool small_step = std::abs(step_a) <= kParamTolerance * scale_a && std::abs(step_b) <= kParamTolerance * scale_b;
    if (small_step) return p;
    if (!accepted) {
      // No descent direction left at any damping: stationary up to rounding.
      if (lambda > 1e12) return p;
    }
  }
  throw CurveFitError("fit_ab: no convergence within " + std::to_string(kMaxIterations) + " iterations", p);
}

}  // namespace topiclens::manifold
