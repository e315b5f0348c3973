#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "finsler/linalg.hpp"

namespace finsler {

struct IntegratorStats {
  std::size_t steps = 0;
  std::size_t rhs_evals = 0;
  std::size_t rejected = 0;
};

namespace detail {

template <class RHS>
Vec rk4_step(RHS&& f, double s, const Vec& y, double h, IntegratorStats& stats) {
  const Vec k1 = f(s, y);
  Vec t = y;
  axpy(h / 2, k1, t);
  const Vec k2 = f(s + h / 2, t);
  t = y;
  axpy(h / 2, k2, t);
  const Vec k3 = f(s + h / 2, t);
  t = y;
  axpy(h, k3, t);
  const Vec k4 = f(s + h, t);
  Vec out = y;
  axpy(h / 6, k1, out);
  axpy(h / 3, k2, out);
  axpy(h / 3, k3, out);
  axpy(h / 6, k4, out);
  stats.rhs_evals += 4;
  ++stats.steps;
  return out;
}

// One accepted Fehlberg 4(5) step from s toward s + h_try, shrinking on
// rejection. Returns the new state; h_try and h_next are updated in place.
template <class RHS>
Vec rkf45_step(RHS&& f, double s, const Vec& y, double& h_try, double& h_next, double abs_tol,
               double rel_tol, IntegratorStats& stats) {
  constexpr std::size_t max_rejects = 200;
  for (std::size_t attempt = 0;; ++attempt) {
    const double h = h_try;
    const Vec k1 = f(s, y);
    Vec t = y;
    axpy(h / 4, k1, t);
    const Vec k2 = f(s + h / 4, t);
    t = y;
    axpy(3 * h / 32, k1, t);
    axpy(9 * h / 32, k2, t);
    const Vec k3 = f(s + 3 * h / 8, t);
    t = y;
    axpy(1932.0 / 2197 * h, k1, t);
    axpy(-7200.0 / 2197 * h, k2, t);
    axpy(7296.0 / 2197 * h, k3, t);
    const Vec k4 = f(s + 12 * h / 13, t);
    t = y;
    axpy(439.0 / 216 * h, k1, t);
    axpy(-8.0 * h, k2, t);
    axpy(3680.0 / 513 * h, k3, t);
    axpy(-845.0 / 4104 * h, k4, t);
    const Vec k5 = f(s + h, t);
    t = y;
    axpy(-8.0 / 27 * h, k1, t);
    axpy(2.0 * h, k2, t);
    axpy(-3544.0 / 2565 * h, k3, t);
    axpy(1859.0 / 4104 * h, k4, t);
    axpy(-11.0 / 40 * h, k5, t);
    const Vec k6 = f(s + h / 2, t);
    stats.rhs_evals += 6;

    Vec y5 = y;
    axpy(16.0 / 135 * h, k1, y5);
    axpy(6656.0 / 12825 * h, k3, y5);
    axpy(28561.0 / 56430 * h, k4, y5);
    axpy(-9.0 / 50 * h, k5, y5);
    axpy(2.0 / 55 * h, k6, y5);

    Vec y4 = y;
    axpy(25.0 / 216 * h, k1, y4);
    axpy(1408.0 / 2565 * h, k3, y4);
    axpy(2197.0 / 4104 * h, k4, y4);
    axpy(-1.0 / 5 * h, k5, y4);

    double err = 0.0, sc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      err = std::max(err, std::abs(y5[i] - y4[i]));
      sc = std::max(sc, std::abs(y5[i]));
    }
    const double tol = abs_tol + rel_tol * sc;
    const double factor =
        err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
    h_next = h * std::min(5.0, std::max(0.2, factor));
    if (err <= tol) {
      ++stats.steps;
      return y5;
    }
    ++stats.rejected;
    if (attempt >= max_rejects)
      throw std::runtime_error("adaptive integrator: step rejection overflow");
    h_try = h_next;
  }
}

}  // namespace detail

struct OdeOptions {
  bool adaptive = false;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
};

/// Integrates y' = f(s, y) from s0 over `steps` uniform output intervals of
/// width ds, invoking `record(j, s_j, y_j)` at every grid point including the
/// initial one. record() returning false stops the integration early.
template <class RHS, class Record>
IntegratorStats integrate_grid(RHS&& f, double s0, double ds, std::size_t steps, Vec y,
                               Record&& record, const OdeOptions& opt = {}) {
  IntegratorStats stats;
  if (!record(std::size_t{0}, s0, y)) return stats;
  double h_adaptive = ds;
  for (std::size_t j = 0; j < steps; ++j) {
    const double s_begin = s0 + ds * static_cast<double>(j);
    const double s_end = s0 + ds * static_cast<double>(j + 1);
    if (!opt.adaptive) {
      y = detail::rk4_step(f, s_begin, y, s_end - s_begin, stats);
    } else {
      double s = s_begin;
      while (s < s_end - 1e-14 * std::abs(s_end)) {
        double h_try = std::min(h_adaptive, s_end - s);
        double h_next = h_try;
        y = detail::rkf45_step(f, s, y, h_try, h_next, opt.abs_tol, opt.rel_tol, stats);
        s += h_try;  // rkf45_step leaves the accepted step in h_try
        h_adaptive = h_next;
      }
    }
    if (!record(j + 1, s_end, y)) return stats;
  }
  return stats;
}

}  // namespace finsler
