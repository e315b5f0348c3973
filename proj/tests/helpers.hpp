#pragma once

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "finsler/connection.hpp"
#include "finsler/linalg.hpp"
#include "finsler/metrics.hpp"

namespace testutil {

using finsler::FinslerMetric;
using finsler::LineElement;
using finsler::Mat;
using finsler::Tensor3;
using finsler::Vec;

inline double urand(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec random_vec(std::mt19937& rng, std::size_t n, double lo = -2.0, double hi = 2.0) {
  Vec v(n);
  for (double& c : v) c = urand(rng, lo, hi);
  return v;
}

// Random admissible line element; keeps sphere-chart colatitudes away from the
// poles and rerolls tiny y.
inline LineElement random_line_element(const FinslerMetric& m, std::mt19937& rng) {
  const std::size_t n = m.dim();
  Vec x(n);
  bool sphere_chart = m.kind() == finsler::MetricKind::Riemannian &&
                      m.chart() == finsler::ChartKind::Sphere;
  if (m.kind() == finsler::MetricKind::Conformal) {
    const FinslerMetric* b = &m.base();
    while (b->kind() == finsler::MetricKind::Conformal) b = &b->base();
    sphere_chart = b->kind() == finsler::MetricKind::Riemannian &&
                   b->chart() == finsler::ChartKind::Sphere;
  }
  if (sphere_chart) {
    x[0] = urand(rng, 0.5, M_PI - 0.5);
    x[1] = urand(rng, -2.0, 2.0);
  } else {
    for (double& c : x) c = urand(rng, -1.0, 1.0);
  }
  Vec y(n);
  do {
    for (double& c : y) c = urand(rng, -2.0, 2.0);
  } while (finsler::norm2(y) < 0.3);
  return finsler::line_element(m, std::move(x), std::move(y));
}

inline FinslerMetric randers_plane(double b) { return FinslerMetric::minkowski_randers(b); }

inline std::vector<std::pair<std::string, FinslerMetric>> catalogue() {
  using finsler::SigmaExpr;
  std::vector<std::pair<std::string, FinslerMetric>> mats;
  mats.emplace_back("euclidean(2)", FinslerMetric::euclidean(2));
  mats.emplace_back("euclidean(3)", FinslerMetric::euclidean(3));
  mats.emplace_back("sphere", FinslerMetric::riemannian_sphere());
  mats.emplace_back("diag(1,4)", FinslerMetric::riemannian_diagonal({1.0, 4.0}));
  mats.emplace_back("minkowski-randers(0.3)", FinslerMetric::minkowski_randers(0.3));
  {
    Mat a = Mat::identity(2);
    a(0, 0) = 1.5;
    a(0, 1) = a(1, 0) = 0.2;
    mats.emplace_back("randers(a,b)", FinslerMetric::randers(a, {0.25, 0.1}));
  }
  mats.emplace_back("conformal(euclidean,x1)",
                    FinslerMetric::conformal(FinslerMetric::euclidean(2), SigmaExpr::parse("x1")));
  mats.emplace_back("conformal(sphere,const)",
                    FinslerMetric::conformal(FinslerMetric::riemannian_sphere(),
                                             SigmaExpr::parse("0.5")));
  return mats;
}

// Classical Christoffel symbols gamma^i_jk of the sphere chart diag(1, sin^2 x1).
inline Tensor3 sphere_christoffels(const Vec& x) {
  Tensor3 gamma(2);
  const double s = std::sin(x[0]), c = std::cos(x[0]);
  gamma(0, 1, 1) = -s * c;
  gamma(1, 0, 1) = gamma(1, 1, 0) = c / s;
  return gamma;
}

// Christoffels of a conformally flat metric exp(2 sigma) * delta, from the
// gradient of sigma.
inline Tensor3 conformal_flat_christoffels(const Vec& grad_sigma) {
  const std::size_t n = grad_sigma.size();
  Tensor3 gamma(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        double v = 0.0;
        if (i == j) v += grad_sigma[k];
        if (i == k) v += grad_sigma[j];
        if (j == k) v -= grad_sigma[i];
        gamma(i, j, k) = v;
      }
  return gamma;
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

inline double max_abs_diff(const Tensor3& a, const Tensor3& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      for (std::size_t k = 0; k < a.dim(); ++k)
        m = std::max(m, std::abs(a(i, j, k) - b(i, j, k)));
  return m;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const Tensor3& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      for (std::size_t k = 0; k < a.dim(); ++k) m = std::max(m, std::abs(a(i, j, k)));
  return m;
}

inline double max_abs(const Mat& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

}  // namespace testutil
