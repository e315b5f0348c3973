#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "finsler/connection.hpp"
#include "finsler/linalg.hpp"
#include "finsler/metrics.hpp"
#include "finsler/ode.hpp"
#include "finsler/transport.hpp"

namespace finsler {

/// Initial data of a circle: unit tangent X, unit normal Y orthogonal to X in
/// g_(p,X), and curvature k > 0 (radius 1/k).
struct CircleSpec {
  Vec p, X, Y;
  double k = 0.0;
};

/// Validates the CircleSpec invariants against the metric.
inline CircleSpec make_circle_spec(const FinslerMetric& m, Vec p, Vec X, Vec Y, double k) {
  if (k <= 1e-12)
    throw std::invalid_argument("circle spec: k must be positive; use a geodesic otherwise");
  const LineElement le = line_element(m, p, X);
  const Mat g = fundamental_tensor(m, le);
  if (std::abs(bilinear(g, X, X) - 1.0) > 1e-10)
    throw std::invalid_argument("circle spec: X is not unit at (p, X)");
  if (std::abs(bilinear(g, X, Y)) > 1e-10)
    throw std::invalid_argument("circle spec: Y is not g-orthogonal to X");
  if (std::abs(bilinear(g, Y, Y) - 1.0) > 1e-10)
    throw std::invalid_argument("circle spec: Y is not unit");
  return CircleSpec{std::move(p), std::move(X), std::move(Y), k};
}

/// Builds a valid (X, Y) pair from rough directions: X is F-normalized and Y
/// is Gram-Schmidt orthonormalized in the g_(p,X) inner product.
inline std::pair<Vec, Vec> orthonormal_pair(const FinslerMetric& m, const Vec& p, const Vec& xdir,
                                            const Vec& ydir) {
  Vec X = scale(1.0 / m.norm(p, xdir), xdir);
  const Mat g = fundamental_tensor(m, line_element(m, p, X));
  Vec Y = ydir;
  axpy(-bilinear(g, X, ydir) / bilinear(g, X, X), X, Y);
  const double ny = gnorm(g, Y);
  if (ny < 1e-12) throw std::invalid_argument("orthonormal_pair: directions are parallel");
  return {std::move(X), scale(1.0 / ny, Y)};
}

struct CurveState {
  Vec x, u, v;
};

/// Sampled trajectory of the circle (or geodesic) flow with its monitored
/// first-integral residuals:
///   unit: g(u,u) - 1,  orth: g(u,v),  curv: g(v,v) - k^2
/// (all at the line element (x, u)). Residual drift is recorded, never
/// corrected; it is the transport diagnostic.
struct CircleTrace {
  std::string metric;  // rendered metric spec, when the caller has one
  std::string kind;    // "circle" or "geodesic"
  TransportMode mode = TransportMode::BaseCurve;
  double k = 0.0;
  double s0 = 0.0, ds = 0.0;
  std::vector<CurveState> states;
  Vec res_unit, res_orth, res_curv;
  IntegratorStats stats;
  bool aborted = false;
  std::string diagnostic;

  std::size_t size() const { return states.size(); }

  CurveSampling sampling() const {
    std::vector<Vec> x, u;
    x.reserve(states.size());
    u.reserve(states.size());
    for (const CurveState& st : states) {
      x.push_back(st.x);
      u.push_back(st.u);
    }
    return CurveSampling{s0, ds, std::move(x), std::move(u)};
  }
};

struct IntegrateOptions {
  double step = 0.0;  // <= 0 picks the default (2*pi/k)/4000 for circles
  bool adaptive = false;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double abort_residual = 1e-3;  // hard-abort threshold on the first integrals
  TransportMode mode = TransportMode::BaseCurve;
};

namespace detail {

inline void pack(const Vec& x, const Vec& u, const Vec* v, Vec& out) {
  out.clear();
  out.insert(out.end(), x.begin(), x.end());
  out.insert(out.end(), u.begin(), u.end());
  if (v) out.insert(out.end(), v->begin(), v->end());
}

inline bool finite(const Vec& y) {
  for (double c : y)
    if (!std::isfinite(c)) return false;
  return true;
}

}  // namespace detail

/// Integrates the geodesic flow xddot + 2 G(x, xdot) = 0 from a unit initial
/// direction (normalized when within 1e-6 of unit, rejected otherwise).
inline CircleTrace geodesic_integrate(const FinslerMetric& m, const Vec& p, Vec X, double s_max,
                                      const IntegrateOptions& opt = {}) {
  const std::size_t n = m.dim();
  const double f0 = m.norm(p, X);
  if (std::abs(f0 - 1.0) > 1e-6)
    throw std::invalid_argument("geodesic_integrate: initial direction is not unit");
  X = scale(1.0 / f0, X);

  const double step = opt.step > 0.0 ? opt.step : s_max / 4000.0;
  const std::size_t steps = static_cast<std::size_t>(std::ceil(s_max / step - 1e-12));
  const double ds = s_max / static_cast<double>(steps);

  auto rhs = [&](double, const Vec& y) {
    const Vec x(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
    const Vec u(y.begin() + static_cast<std::ptrdiff_t>(n), y.end());
    const Vec G = spray(m, line_element(m, x, u));
    Vec dy(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      dy[i] = u[i];
      dy[n + i] = -2.0 * G[i];
    }
    return dy;
  };

  CircleTrace trace;
  trace.kind = "geodesic";
  trace.mode = opt.mode;
  trace.s0 = 0.0;
  trace.ds = ds;
  auto record = [&](std::size_t, double s, const Vec& y) {
    if (!detail::finite(y)) {
      trace.aborted = true;
      trace.diagnostic = "non-finite state at s = " + std::to_string(s);
      return false;
    }
    CurveState st;
    st.x.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
    st.u.assign(y.begin() + static_cast<std::ptrdiff_t>(n), y.end());
    st.v.assign(n, 0.0);
    const Mat g = fundamental_tensor(m, line_element(m, st.x, st.u));
    const double unit = bilinear(g, st.u, st.u) - 1.0;
    trace.states.push_back(std::move(st));
    trace.res_unit.push_back(unit);
    if (std::abs(unit) > opt.abort_residual) {
      trace.aborted = true;
      trace.diagnostic = "unit-speed residual " + std::to_string(unit) +
                         " exceeded the abort threshold at s = " + std::to_string(s);
      return false;
    }
    return true;
  };

  Vec y0;
  detail::pack(p, X, nullptr, y0);
  trace.stats = integrate_grid(rhs, 0.0, ds, steps, std::move(y0), record,
                               OdeOptions{opt.adaptive, opt.abs_tol, opt.rel_tol});
  return trace;
}

/// Integrates the circle flow as a first-order system in (x, u, v):
///   dx/ds = u
///   du/ds = v - Theta(u, u)
///   dv/ds = -g(v,v) u - Theta(v, u)
/// with all tensors at (x, u) and initial v = k Y. In velocity-lift mode the
/// C-part of the transport uses the lifted dy-component xddot + N u.
inline CircleTrace circle_integrate(const FinslerMetric& m, const CircleSpec& spec, double s_max,
                                    const IntegrateOptions& opt = {}) {
  const std::size_t n = m.dim();
  const double k = spec.k;
  const double step = opt.step > 0.0 ? opt.step : (2.0 * M_PI / k) / 4000.0;
  const std::size_t steps = static_cast<std::size_t>(std::ceil(s_max / step - 1e-12));
  const double ds = s_max / static_cast<double>(steps);

  auto rhs = [&](double, const Vec& y) {
    const Vec x(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
    const Vec u(y.begin() + static_cast<std::ptrdiff_t>(n),
                y.begin() + static_cast<std::ptrdiff_t>(2 * n));
    const Vec v(y.begin() + static_cast<std::ptrdiff_t>(2 * n), y.end());
    const ConnectionSample cs = connection_sample(m, line_element(m, x, u));
    const Tensor3 th = cs.theta();
    auto theta = [&](const Vec& A, const Vec& B) {
      Vec r(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t kk = 0; kk < n; ++kk)
          for (std::size_t h = 0; h < n; ++h) r[i] += th(i, kk, h) * A[kk] * B[h];
      return r;
    };

    Vec du = sub(v, theta(u, u));
    const double q = bilinear(cs.g, v, v);
    Vec dv = scale(-q, u);
    if (opt.mode == TransportMode::BaseCurve) {
      const Vec corr = theta(v, u);
      for (std::size_t i = 0; i < n; ++i) dv[i] -= corr[i];
    } else {
      // Gamma(v, u) plus C(v, xddot + N u) with xddot = du
      Vec lift(n, 0.0);
      for (std::size_t s = 0; s < n; ++s) {
        lift[s] = du[s];
        for (std::size_t h = 0; h < n; ++h) lift[s] += cs.N(s, h) * u[h];
      }
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t kk = 0; kk < n; ++kk) {
          for (std::size_t h = 0; h < n; ++h) dv[i] -= cs.Gamma(i, kk, h) * v[kk] * u[h];
          for (std::size_t s = 0; s < n; ++s) dv[i] -= cs.C(i, kk, s) * v[kk] * lift[s];
        }
    }

    Vec dy(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
      dy[i] = u[i];
      dy[n + i] = du[i];
      dy[2 * n + i] = dv[i];
    }
    return dy;
  };

  CircleTrace trace;
  trace.kind = "circle";
  trace.mode = opt.mode;
  trace.k = k;
  trace.s0 = 0.0;
  trace.ds = ds;
  auto record = [&](std::size_t, double s, const Vec& y) {
    if (!detail::finite(y)) {
      trace.aborted = true;
      trace.diagnostic = "non-finite state at s = " + std::to_string(s);
      return false;
    }
    CurveState st;
    st.x.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
    st.u.assign(y.begin() + static_cast<std::ptrdiff_t>(n),
                y.begin() + static_cast<std::ptrdiff_t>(2 * n));
    st.v.assign(y.begin() + static_cast<std::ptrdiff_t>(2 * n), y.end());
    const Mat g = fundamental_tensor(m, line_element(m, st.x, st.u));
    const double unit = bilinear(g, st.u, st.u) - 1.0;
    const double orth = bilinear(g, st.u, st.v);
    const double curv = bilinear(g, st.v, st.v) - k * k;
    trace.states.push_back(std::move(st));
    trace.res_unit.push_back(unit);
    trace.res_orth.push_back(orth);
    trace.res_curv.push_back(curv);
    const double worst = std::max({std::abs(unit), std::abs(orth), std::abs(curv)});
    if (worst > opt.abort_residual) {
      trace.aborted = true;
      trace.diagnostic = "first-integral residual " + std::to_string(worst) +
                         " exceeded the abort threshold at s = " + std::to_string(s);
      return false;
    }
    return true;
  };

  Vec v0 = scale(k, spec.Y);
  Vec y0;
  detail::pack(spec.p, spec.X, &v0, y0);
  trace.stats = integrate_grid(rhs, 0.0, ds, steps, std::move(y0), record,
                               OdeOptions{opt.adaptive, opt.abs_tol, opt.rel_tol});
  return trace;
}

/// Exact solution of the constant-coefficient circle equation
/// d3x/ds3 + k^2 dx/ds = 0 in an x-independent metric:
///   x(s) = x0 + u0 sin(ks)/k + v0 (1 - cos(ks))/k^2.
/// Residual series are evaluated against the metric like any other trace.
inline CircleTrace minkowski_circle_closed_form(const FinslerMetric& m, const Vec& x0,
                                                const Vec& u0, const Vec& v0, double k,
                                                double s_max, std::size_t steps = 4000) {
  if (!m.x_independent())
    throw std::invalid_argument("closed form requires an x-independent metric");
  if (k <= 0.0) throw std::invalid_argument("closed form requires k > 0");
  const Mat g0 = fundamental_tensor(m, line_element(m, x0, u0));
  const double kv = std::sqrt(bilinear(g0, v0, v0));
  if (std::abs(kv - k) > 1e-10 * std::max(1.0, k))
    throw std::invalid_argument("closed form: k is inconsistent with |v0|_g");

  const std::size_t n = m.dim();
  CircleTrace trace;
  trace.kind = "circle";
  trace.k = k;
  trace.s0 = 0.0;
  trace.ds = s_max / static_cast<double>(steps);
  for (std::size_t j = 0; j <= steps; ++j) {
    const double s = trace.ds * static_cast<double>(j);
    CurveState st;
    st.x.resize(n);
    st.u.resize(n);
    st.v.resize(n);
    const double sk = std::sin(k * s), ck = std::cos(k * s);
    for (std::size_t i = 0; i < n; ++i) {
      st.x[i] = x0[i] + u0[i] * sk / k + v0[i] * (1.0 - ck) / (k * k);
      st.u[i] = u0[i] * ck + v0[i] * sk / k;
      st.v[i] = -k * u0[i] * sk + v0[i] * ck;
    }
    const Mat g = fundamental_tensor(m, line_element(m, st.x, st.u));
    trace.res_unit.push_back(bilinear(g, st.u, st.u) - 1.0);
    trace.res_orth.push_back(bilinear(g, st.u, st.v));
    trace.res_curv.push_back(bilinear(g, st.v, st.v) - k * k);
    trace.states.push_back(std::move(st));
  }
  return trace;
}

enum class CurveClass { Circle, Geodesic, Neither };

inline const char* to_string(CurveClass c) {
  switch (c) {
    case CurveClass::Circle: return "circle";
    case CurveClass::Geodesic: return "geodesic";
    case CurveClass::Neither: return "neither";
  }
  return "?";
}

struct CircleTestOptions {
  double rho_tol = 1e-4;       // parallelism threshold for the circle verdict
  double geodesic_tol = 1e-6;  // k1 cutoff below which the curve is a geodesic
  TransportMode mode = TransportMode::BaseCurve;
  std::size_t edge_trim = 3;  // samples excluded from the verdict at each end
};

struct CircleTestResult {
  CurveClass verdict = CurveClass::Neither;
  std::vector<Vec> V;  // tested vector field cdddot - 3 (g(cdot,cddot)/g(cdot,cdot)) cddot
  Vec rho;             // parallelism residual per sample
  Vec k1;              // first curvature per sample
  double max_rho = 0.0;
  double k1_min = 0.0, k1_max = 0.0;  // over the interior window
};

/// Parametrization-free circle criterion: the curve is a circle iff
/// V = cdddot - 3 (g(cdot,cddot)/g(cdot,cdot)) cddot stays parallel to cdot.
/// Works on any smooth, admissible parametrization of the curve.
inline CircleTestResult circle_test(const FinslerMetric& m, const CurveSampling& c,
                                    const CircleTestOptions& opt = {}) {
  const std::size_t count = c.size();
  if (count < 7 + 2 * opt.edge_trim)
    throw std::invalid_argument("circle_test: too few samples for the interior window");
  const std::vector<Vec> u = velocities(c);
  const std::vector<Vec> a = series_derivative(u, c.dt);

  std::vector<Mat> gs(count);
  std::vector<Vec> c2(count);
  for (std::size_t j = 0; j < count; ++j) {
    gs[j] = fundamental_tensor(m, line_element(m, c.x[j], u[j]));
    c2[j] = covariant_derivative(m, c.x[j], u[j], u[j], a[j], opt.mode, &a[j]);
  }
  const std::vector<Vec> c2dot = series_derivative(c2, c.dt);

  CircleTestResult out;
  out.V.resize(count);
  out.rho.resize(count);
  out.k1.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const Vec c3 = covariant_derivative(m, c.x[j], u[j], c2[j], c2dot[j], opt.mode, &a[j]);
    const double guu = bilinear(gs[j], u[j], u[j]);
    const double guc2 = bilinear(gs[j], u[j], c2[j]);
    Vec V = c3;
    axpy(-3.0 * guc2 / guu, c2[j], V);
    Vec tang = V;
    axpy(-bilinear(gs[j], V, u[j]) / guu, u[j], tang);
    out.rho[j] = gnorm(gs[j], tang) / (gnorm(gs[j], V) + 1e-12);
    out.V[j] = std::move(V);

    // arc-length second derivative from the reparametrization relations
    const double speed = std::sqrt(guu);
    Vec cpp = c2[j];
    axpy(-guc2 / (speed * speed), u[j], cpp);  // guc2/speed * (u/speed)
    out.k1[j] = gnorm(gs[j], cpp) / (speed * speed);
  }

  out.max_rho = 0.0;
  out.k1_min = out.k1[opt.edge_trim];
  out.k1_max = out.k1[opt.edge_trim];
  for (std::size_t j = opt.edge_trim; j + opt.edge_trim < count; ++j) {
    out.max_rho = std::max(out.max_rho, out.rho[j]);
    out.k1_min = std::min(out.k1_min, out.k1[j]);
    out.k1_max = std::max(out.k1_max, out.k1[j]);
  }
  if (out.k1_max <= opt.geodesic_tol) out.verdict = CurveClass::Geodesic;
  else if (out.max_rho <= opt.rho_tol && out.k1_min > opt.geodesic_tol)
    out.verdict = CurveClass::Circle;
  else
    out.verdict = CurveClass::Neither;
  return out;
}

/// Resamples a curve uniformly in the arc length of m, preserving total
/// length; positions are interpolated with cubic Hermite pieces.
inline CurveSampling arclength_reparametrize(const FinslerMetric& m, const CurveSampling& c) {
  const std::size_t count = c.size();
  const std::vector<Vec> u = velocities(c);
  const std::vector<Vec> a = series_derivative(u, c.dt);

  Vec w(count);
  for (std::size_t j = 0; j < count; ++j) {
    w[j] = m.norm(c.x[j], u[j]);
    if (!(w[j] > 0.0)) throw std::domain_error("arclength_reparametrize: curve is not admissible");
  }
  const Vec wdot = series_derivative(w, c.dt);

  // cumulative length by corrected-trapezoid quadrature (fourth order)
  Vec s(count, 0.0);
  for (std::size_t j = 0; j + 1 < count; ++j) {
    const double seg = 0.5 * c.dt * (w[j] + w[j + 1]) + c.dt * c.dt / 12.0 * (wdot[j] - wdot[j + 1]);
    if (!(seg > 0.0))
      throw std::domain_error("arclength_reparametrize: non-monotone accumulated length");
    s[j + 1] = s[j] + seg;
  }
  const double total = s[count - 1];

  // local cubic Hermite pieces for positions, velocities and the length itself
  auto hermite = [&](const Vec& f0, const Vec& f1, const Vec& d0, const Vec& d1, double tau,
                     double dt) {
    const double t2 = tau * tau, t3 = t2 * tau;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + tau;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    Vec r(f0.size());
    for (std::size_t i = 0; i < f0.size(); ++i)
      r[i] = h00 * f0[i] + h10 * dt * d0[i] + h01 * f1[i] + h11 * dt * d1[i];
    return r;
  };
  auto hermite1 = [&](double f0, double f1, double d0, double d1, double tau, double dt) {
    const Vec r = hermite(Vec{f0}, Vec{f1}, Vec{d0}, Vec{d1}, tau, dt);
    return r[0];
  };

  CurveSampling out;
  out.t0 = 0.0;
  out.dt = total / static_cast<double>(count - 1);
  out.x.resize(count);
  out.xdot.resize(count);
  std::size_t seg = 0;
  for (std::size_t mclock = 0; mclock < count; ++mclock) {
    const double target = out.dt * static_cast<double>(mclock);
    while (seg + 2 < count && s[seg + 1] < target) ++seg;
    // invert the local cubic s(tau) by Newton, seeded by the chord ratio
    double tau = (target - s[seg]) / std::max(s[seg + 1] - s[seg], 1e-300);
    tau = std::min(1.0, std::max(0.0, tau));
    for (int it = 0; it < 30; ++it) {
      const double sv = hermite1(s[seg], s[seg + 1], w[seg], w[seg + 1], tau, c.dt);
      const double dv = hermite1(w[seg], w[seg + 1], wdot[seg], wdot[seg + 1], tau, c.dt) * c.dt;
      const double delta = (sv - target) / dv;
      tau -= delta;
      if (std::abs(delta) < 1e-15) break;
    }
    tau = std::min(1.0, std::max(0.0, tau));
    out.x[mclock] = hermite(c.x[seg], c.x[seg + 1], u[seg], u[seg + 1], tau, c.dt);
    const Vec ut = hermite(u[seg], u[seg + 1], a[seg], a[seg + 1], tau, c.dt);
    const double wt = hermite1(w[seg], w[seg + 1], wdot[seg], wdot[seg + 1], tau, c.dt);
    out.xdot[mclock] = scale(1.0 / wt, ut);
  }
  return out;
}

struct DerivativeChains {
  // arbitrary-parameter covariant chain
  std::vector<Vec> cdot, cddot, cdddot;
  // arc-length chain, computed independently via d/ds = (1/|cdot|) d/dt
  std::vector<Vec> cp, cpp, cppp;
  // residual series of the three reparametrization relations, sup-norm per sample
  Vec rel1, rel2, rel3;
};

/// Successive covariant derivatives in both parametrizations, plus the
/// residuals of the relations connecting them:
///   cdot   = |cdot| cp
///   cddot  = |cdot|^2 cpp + (g(cdot,cddot)/|cdot|) cp
///   cdddot = |cdot|^3 cppp + 3 g(cdot,cddot) cpp + d/dt(g(cdot,cddot)/|cdot|) cp
inline DerivativeChains successive_derivatives(const FinslerMetric& m, const CurveSampling& c,
                                               TransportMode mode = TransportMode::BaseCurve) {
  const std::size_t count = c.size();
  const std::vector<Vec> u = velocities(c);
  const std::vector<Vec> a = series_derivative(u, c.dt);

  DerivativeChains out;
  out.cdot = u;
  out.cddot.resize(count);
  out.cdddot.resize(count);
  out.cp.resize(count);

  std::vector<Mat> gs(count);
  Vec speed(count);
  for (std::size_t j = 0; j < count; ++j) {
    gs[j] = fundamental_tensor(m, line_element(m, c.x[j], u[j]));
    speed[j] = gnorm(gs[j], u[j]);
    if (speed[j] <= 1e-10)
      throw std::domain_error("successive_derivatives: degenerate speed");
    out.cddot[j] = covariant_derivative(m, c.x[j], u[j], u[j], a[j], mode, &a[j]);
    out.cp[j] = scale(1.0 / speed[j], u[j]);
  }
  const std::vector<Vec> cddot_dot = series_derivative(out.cddot, c.dt);
  const std::vector<Vec> cp_dot = series_derivative(out.cp, c.dt);
  out.cpp.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    out.cdddot[j] =
        covariant_derivative(m, c.x[j], u[j], out.cddot[j], cddot_dot[j], mode, &a[j]);
    out.cpp[j] = scale(
        1.0 / speed[j], covariant_derivative(m, c.x[j], u[j], out.cp[j], cp_dot[j], mode, &a[j]));
  }
  const std::vector<Vec> cpp_dot = series_derivative(out.cpp, c.dt);
  out.cppp.resize(count);
  for (std::size_t j = 0; j < count; ++j)
    out.cppp[j] = scale(
        1.0 / speed[j], covariant_derivative(m, c.x[j], u[j], out.cpp[j], cpp_dot[j], mode, &a[j]));

  Vec mixed(count);  // g(cdot, cddot)/|cdot|
  for (std::size_t j = 0; j < count; ++j)
    mixed[j] = bilinear(gs[j], u[j], out.cddot[j]) / speed[j];
  const Vec mixed_dot = series_derivative(mixed, c.dt);

  out.rel1.resize(count);
  out.rel2.resize(count);
  out.rel3.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double sp = speed[j];
    Vec r1 = u[j];
    axpy(-sp, out.cp[j], r1);
    Vec r2 = out.cddot[j];
    axpy(-sp * sp, out.cpp[j], r2);
    axpy(-mixed[j], out.cp[j], r2);
    Vec r3 = out.cdddot[j];
    axpy(-sp * sp * sp, out.cppp[j], r3);
    axpy(-3.0 * mixed[j] * sp, out.cpp[j], r3);
    axpy(-mixed_dot[j], out.cp[j], r3);
    out.rel1[j] = max_abs(r1);
    out.rel2[j] = max_abs(r2);
    out.rel3[j] = max_abs(r3);
  }
  return out;
}

}  // namespace finsler
