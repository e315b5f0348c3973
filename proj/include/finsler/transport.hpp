#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "finsler/connection.hpp"
#include "finsler/linalg.hpp"
#include "finsler/metrics.hpp"

namespace finsler {

/// How the connection 1-form is evaluated on the curve velocity.
///   BaseCurve    — the curve is kept on the base manifold: the dy-part of its
///                  velocity is taken as zero, leaving Gamma + C N contracted
///                  with xdot. This is the default transport.
///   VelocityLift — the curve is lifted to (x, xdot), so the dy-part becomes
///                  xddot + N xdot; needs the acceleration as extra input.
/// The two coincide for Riemannian metrics (C = 0) and along Minkowski
/// geodesics; elsewhere only VelocityLift is exactly metric compatible.
enum class TransportMode { BaseCurve, VelocityLift };

/// Covariant derivative of a vector field X along a curve, at one point.
/// All tensors are evaluated at the line element (x, xdot).
inline Vec covariant_derivative(const FinslerMetric& m, const Vec& x, const Vec& xdot,
                                const Vec& X, const Vec& Xdot,
                                TransportMode mode = TransportMode::BaseCurve,
                                const Vec* xddot = nullptr) {
  const std::size_t n = m.dim();
  const ConnectionSample cs = connection_sample(m, line_element(m, x, xdot));
  Vec r = Xdot;
  if (mode == TransportMode::BaseCurve) {
    const Tensor3 th = cs.theta();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t h = 0; h < n; ++h) r[i] += th(i, k, h) * X[k] * xdot[h];
    return r;
  }
  if (!xddot)
    throw std::invalid_argument("covariant_derivative: velocity-lift mode needs the acceleration");
  // dy-part of the lifted velocity
  Vec lift(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    lift[s] = (*xddot)[s];
    for (std::size_t h = 0; h < n; ++h) lift[s] += cs.N(s, h) * xdot[h];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t h = 0; h < n; ++h) r[i] += cs.Gamma(i, k, h) * X[k] * xdot[h];
      for (std::size_t s = 0; s < n; ++s) r[i] += cs.C(i, k, s) * X[k] * lift[s];
    }
  return r;
}

/// A curve sampled on a uniform parameter grid. Velocities are optional; when
/// absent they are reconstructed with the same fourth-order stencils used
/// everywhere else.
struct CurveSampling {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<Vec> x;
  std::vector<Vec> xdot;  // empty, or one velocity per sample

  std::size_t size() const { return x.size(); }
  double t(std::size_t j) const { return t0 + dt * static_cast<double>(j); }
};

inline CurveSampling make_curve_sampling(double t0, double dt, std::vector<Vec> x,
                                         std::vector<Vec> xdot = {}) {
  if (x.size() < 7) throw std::invalid_argument("curve sampling: need at least 7 samples");
  if (!(dt > 0.0)) throw std::invalid_argument("curve sampling: grid must be increasing");
  if (!xdot.empty() && xdot.size() != x.size())
    throw std::invalid_argument("curve sampling: velocity count mismatch");
  return CurveSampling{t0, dt, std::move(x), std::move(xdot)};
}

namespace detail {

// Fourth-order first-derivative weights: central in the interior, one-sided at
// the edges. Weights are integer numerators over 12h.
struct SeriesStencil {
  int first;  // offset of the first weight relative to j
  std::array<double, 5> w;
};

inline SeriesStencil series_stencil(std::size_t j, std::size_t count) {
  if (j == 0) return {0, {-25, 48, -36, 16, -3}};
  if (j == 1) return {-1, {-3, -10, 18, -6, 1}};
  if (j + 2 > count - 1) {
    if (j == count - 1) return {-4, {3, -16, 36, -48, 25}};
    return {-3, {-1, 6, -18, 10, 3}};
  }
  return {-2, {1, -8, 0, 8, -1}};
}

}  // namespace detail

/// d/dt of a sampled scalar series, fourth order.
inline Vec series_derivative(const Vec& f, double dt) {
  const std::size_t count = f.size();
  if (count < 5) throw std::invalid_argument("series_derivative: too few samples");
  Vec d(count, 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    const auto st = detail::series_stencil(j, count);
    double acc = 0.0;
    for (int k = 0; k < 5; ++k)
      acc += st.w[static_cast<std::size_t>(k)] * f[j + static_cast<std::size_t>(st.first + k)];
    d[j] = acc / (12.0 * dt);
  }
  return d;
}

/// d/dt of a sampled vector series, componentwise.
inline std::vector<Vec> series_derivative(const std::vector<Vec>& f, double dt) {
  const std::size_t count = f.size(), n = f.front().size();
  if (count < 5) throw std::invalid_argument("series_derivative: too few samples");
  std::vector<Vec> d(count, Vec(n, 0.0));
  for (std::size_t j = 0; j < count; ++j) {
    const auto st = detail::series_stencil(j, count);
    for (std::size_t c = 0; c < n; ++c) {
      double acc = 0.0;
      for (int k = 0; k < 5; ++k)
        acc += st.w[static_cast<std::size_t>(k)] * f[j + static_cast<std::size_t>(st.first + k)][c];
      d[j][c] = acc / (12.0 * dt);
    }
  }
  return d;
}

/// Velocities of a sampling: stored ones if present, else stencil derivatives.
inline std::vector<Vec> velocities(const CurveSampling& c) {
  return c.xdot.empty() ? series_derivative(c.x, c.dt) : c.xdot;
}

struct CompatibilityResult {
  Vec residual;    // r(t_j)
  double max_abs;  // summary
};

/// Residual of metric compatibility along a curve:
///   r(t) = d/dt g_(x,xdot)(X,Y) - g(del X, Y) - g(X, del Y).
/// Exactly zero in the continuum for Riemannian metrics in either mode and
/// for velocity-lift transport in general; measured here with stencils.
inline CompatibilityResult compatibility_residual(const FinslerMetric& m, const CurveSampling& c,
                                                  const std::vector<Vec>& X,
                                                  const std::vector<Vec>& Y,
                                                  TransportMode mode = TransportMode::BaseCurve) {
  const std::size_t count = c.size();
  if (X.size() != count || Y.size() != count)
    throw std::invalid_argument("compatibility_residual: field length mismatch");
  const std::vector<Vec> v = velocities(c);
  const std::vector<Vec> a = series_derivative(v, c.dt);
  const std::vector<Vec> Xdot = series_derivative(X, c.dt);
  const std::vector<Vec> Ydot = series_derivative(Y, c.dt);

  Vec phi(count);
  std::vector<Mat> gs(count);
  for (std::size_t j = 0; j < count; ++j) {
    gs[j] = fundamental_tensor(m, line_element(m, c.x[j], v[j]));
    phi[j] = bilinear(gs[j], X[j], Y[j]);
  }
  const Vec dphi = series_derivative(phi, c.dt);

  CompatibilityResult out;
  out.residual.resize(count);
  out.max_abs = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const Vec dX = covariant_derivative(m, c.x[j], v[j], X[j], Xdot[j], mode, &a[j]);
    const Vec dY = covariant_derivative(m, c.x[j], v[j], Y[j], Ydot[j], mode, &a[j]);
    out.residual[j] = dphi[j] - bilinear(gs[j], dX, Y[j]) - bilinear(gs[j], X[j], dY);
    out.max_abs = std::max(out.max_abs, std::abs(out.residual[j]));
  }
  return out;
}

struct FrenetData {
  Vec k1;           // first curvature series
  Vec k2_residual;  // |del Y + k1 X|_g series; empty for geodesics
  bool geodesic = false;
};

/// First Frenet curvature k1(s) = |del_c' c'|_g and the second-curvature
/// residual |del Y + k1 X|_g with Y = (del X)/k1, along a unit-speed curve.
/// Flags the curve as a geodesic (k2 undefined) when k1 stays below
/// geodesic_tol.
inline FrenetData frenet_data(const FinslerMetric& m, const CurveSampling& c,
                              TransportMode mode = TransportMode::BaseCurve,
                              double geodesic_tol = 1e-12) {
  const std::size_t count = c.size(), n = m.dim();
  const std::vector<Vec> u = velocities(c);
  for (std::size_t j = 0; j < count; ++j) {
    const double f = m.norm(c.x[j], u[j]);
    if (std::abs(f - 1.0) > 1e-3)
      throw std::invalid_argument("frenet_data: curve is not arc-length parameterized");
  }
  const std::vector<Vec> udot = series_derivative(u, c.dt);

  FrenetData out;
  out.k1.resize(count);
  std::vector<Vec> w(count);  // del_c' c'
  std::vector<Mat> gs(count);
  for (std::size_t j = 0; j < count; ++j) {
    gs[j] = fundamental_tensor(m, line_element(m, c.x[j], u[j]));
    w[j] = covariant_derivative(m, c.x[j], u[j], u[j], udot[j], mode, &udot[j]);
    out.k1[j] = gnorm(gs[j], w[j]);
  }
  double k1max = 0.0;
  for (double k : out.k1) k1max = std::max(k1max, k);
  if (k1max <= geodesic_tol) {
    out.geodesic = true;
    return out;
  }

  std::vector<Vec> Y(count, Vec(n));
  for (std::size_t j = 0; j < count; ++j) {
    if (out.k1[j] <= geodesic_tol)
      throw std::domain_error("frenet_data: curvature vanishes at an interior sample");
    Y[j] = scale(1.0 / out.k1[j], w[j]);
  }
  const std::vector<Vec> Ydot = series_derivative(Y, c.dt);
  out.k2_residual.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const Vec dY = covariant_derivative(m, c.x[j], u[j], Y[j], Ydot[j], mode, &udot[j]);
    Vec resid = dY;
    axpy(out.k1[j], u[j], resid);
    out.k2_residual[j] = gnorm(gs[j], resid);
  }
  return out;
}

}  // namespace finsler
