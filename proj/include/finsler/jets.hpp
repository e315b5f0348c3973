#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "finsler/dual.hpp"
#include "finsler/linalg.hpp"

namespace finsler {

/// Partial derivatives of a scalar f(x, y) at one point, for the closed set of
/// orders used by the connection formulas: up to one x-derivative combined
/// with up to two y-derivatives, plus pure third y-derivatives.
struct Jet {
  std::size_t n = 0;
  double value = 0.0;
  Vec dy;        // dy[i]        = df/dy^i
  Mat dyy;       // dyy(i,j)     = d2f/dy^i dy^j
  Tensor3 dyyy;  // dyyy(i,j,k)  = d3f/dy^i dy^j dy^k
  Vec dx;        // dx[a]        = df/dx^a
  Mat dxy;       // dxy(a,i)     = d2f/dx^a dy^i
  Tensor3 dxyy;  // dxyy(a,i,j)  = d3f/dx^a dy^i dy^j
};

struct JetOrders {
  bool dy = true, dyy = true, dyyy = true, dx = true, dxy = true, dxyy = true;

  static JetOrders all() { return {}; }
  static JetOrders y_only() { return {true, true, true, false, false, false}; }
  static JetOrders hessian() { return {false, true, false, false, false, false}; }
};

enum class DerivProvider { Arithmetic, FiniteDifference };

/// Steps for the finite-difference provider, scaled per total derivative
/// order. Dyadic values keep stencils on low-degree polynomials exact.
struct FdSteps {
  double h1 = 0x1p-13;  // ~1.2e-4
  double h2 = 0x1p-10;
  double h3 = 0x1p-8;

  double for_order(int total) const {
    return total <= 1 ? h1 : (total == 2 ? h2 : h3);
  }
};

/// One differentiation direction: a slot of x or of y.
struct Direction {
  bool in_x;
  std::size_t idx;
};

namespace detail {

using Dir = Direction;

template <class F>
double exact_partial1(F&& f, const Vec& x, const Vec& y, Dir d1) {
  using ad::D1;
  std::vector<D1> xs(x.size()), ys(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) xs[i].v = x[i];
  for (std::size_t i = 0; i < y.size(); ++i) ys[i].v = y[i];
  (d1.in_x ? xs[d1.idx] : ys[d1.idx]).d = 1.0;
  const D1 r = f(std::span<const D1>(xs), std::span<const D1>(ys));
  return r.d;
}

template <class F>
double exact_partial2(F&& f, const Vec& x, const Vec& y, Dir d1, Dir d2) {
  using ad::D2;
  std::vector<D2> xs(x.size()), ys(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) xs[i].v.v = x[i];
  for (std::size_t i = 0; i < y.size(); ++i) ys[i].v.v = y[i];
  (d1.in_x ? xs[d1.idx] : ys[d1.idx]).d.v = 1.0;
  (d2.in_x ? xs[d2.idx] : ys[d2.idx]).v.d = 1.0;
  const D2 r = f(std::span<const D2>(xs), std::span<const D2>(ys));
  return r.d.d;
}

template <class F>
double exact_partial3(F&& f, const Vec& x, const Vec& y, Dir d1, Dir d2, Dir d3) {
  using ad::D3;
  std::vector<D3> xs(x.size()), ys(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) xs[i].v.v.v = x[i];
  for (std::size_t i = 0; i < y.size(); ++i) ys[i].v.v.v = y[i];
  (d1.in_x ? xs[d1.idx] : ys[d1.idx]).d.v.v = 1.0;
  (d2.in_x ? xs[d2.idx] : ys[d2.idx]).v.d.v = 1.0;
  (d3.in_x ? xs[d3.idx] : ys[d3.idx]).v.v.d = 1.0;
  const D3 r = f(std::span<const D3>(xs), std::span<const D3>(ys));
  return r.d.d.d;
}

struct StencilTerm {
  int offset;
  double coeff;  // integer numerator; the shared denominator is divided out once
};

// Fourth-order central stencils, split as integer numerators plus one final
// division so that exact (dyadic) function values stay exact through the sum.
inline std::span<const StencilTerm> stencil(int m) {
  static constexpr std::array<StencilTerm, 4> s1{{{-2, 1}, {-1, -8}, {1, 8}, {2, -1}}};
  static constexpr std::array<StencilTerm, 5> s2{{{-2, -1}, {-1, 16}, {0, -30}, {1, 16}, {2, -1}}};
  static constexpr std::array<StencilTerm, 6> s3{{{-3, 1}, {-2, -8}, {-1, 13}, {1, -13}, {2, 8}, {3, -1}}};
  switch (m) {
    case 1: return {s1.data(), s1.size()};
    case 2: return {s2.data(), s2.size()};
    case 3: return {s3.data(), s3.size()};
    default: throw std::invalid_argument("unsupported stencil order");
  }
}

inline double stencil_denominator(int m) { return m == 3 ? 8.0 : 12.0; }

struct FdGroup {
  Dir dir;
  int order;
};

template <class F>
double fd_recurse(F&& f, Vec& x, Vec& y, std::span<const FdGroup> groups, double hbase) {
  if (groups.empty()) return f(std::span<const double>(x), std::span<const double>(y));
  const FdGroup g = groups.front();
  double& coord = g.dir.in_x ? x[g.dir.idx] : y[g.dir.idx];
  const double saved = coord;
  const double h = hbase * std::max(1.0, std::abs(saved));
  double acc = 0.0;
  for (const StencilTerm& t : stencil(g.order)) {
    coord = saved + t.offset * h;
    acc += t.coeff * fd_recurse(f, x, y, groups.subspan(1), hbase);
  }
  coord = saved;
  return acc / (stencil_denominator(g.order) * std::pow(h, g.order));
}

template <class F>
double fd_partial(F&& f, const Vec& x, const Vec& y, std::span<const FdGroup> groups,
                  const FdSteps& steps) {
  int total = 0;
  for (const FdGroup& g : groups) total += g.order;
  Vec xb = x, yb = y;
  return fd_recurse(f, xb, yb, groups, steps.for_order(total));
}

// Collapses a direction list into (direction, multiplicity) groups.
inline std::vector<FdGroup> group_dirs(std::span<const Dir> dirs) {
  std::vector<FdGroup> groups;
  for (const Dir& d : dirs) {
    bool merged = false;
    for (FdGroup& g : groups)
      if (g.dir.in_x == d.in_x && g.dir.idx == d.idx) {
        ++g.order;
        merged = true;
        break;
      }
    if (!merged) groups.push_back({d, 1});
  }
  return groups;
}

inline void check_finite(double v, const char* what) {
  if (!std::isfinite(v))
    throw std::domain_error(std::string("jet_eval: non-finite ") + what +
                            " (evaluation outside the smooth domain?)");
}

}  // namespace detail

/// Single mixed partial of f at (x, y) along the given directions
/// (order = dirs.size(), at most 3; at most one x direction).
template <class F>
double partial_derivative(F&& f, const Vec& x, const Vec& y, std::span<const Direction> dirs,
                          DerivProvider provider = DerivProvider::Arithmetic,
                          const FdSteps& steps = {}) {
  double v;
  if (provider == DerivProvider::FiniteDifference) {
    const auto groups = detail::group_dirs(dirs);
    v = detail::fd_partial(f, x, y, groups, steps);
  } else {
    switch (dirs.size()) {
      case 1: v = detail::exact_partial1(f, x, y, dirs[0]); break;
      case 2: v = detail::exact_partial2(f, x, y, dirs[0], dirs[1]); break;
      case 3: v = detail::exact_partial3(f, x, y, dirs[0], dirs[1], dirs[2]); break;
      default: throw std::invalid_argument("partial_derivative: unsupported order");
    }
  }
  detail::check_finite(v, "partial derivative");
  return v;
}

/// Evaluates the requested partial derivatives of f at (x, y). The arithmetic
/// provider propagates nested truncated-Taylor scalars and has no truncation
/// error; the finite-difference provider is the independent cross-check.
template <class F>
Jet jet_eval(F&& f, const Vec& x, const Vec& y, JetOrders orders = JetOrders::all(),
             DerivProvider provider = DerivProvider::Arithmetic, const FdSteps& steps = {}) {
  using detail::Dir;
  const std::size_t n = y.size();
  if (x.size() != n) throw std::invalid_argument("jet_eval: x and y dimension mismatch");

  auto partial = [&](std::span<const Dir> dirs) -> double {
    return partial_derivative(f, x, y, dirs, provider, steps);
  };

  Jet jet;
  jet.n = n;
  jet.value = f(std::span<const double>(x), std::span<const double>(y));
  detail::check_finite(jet.value, "value");

  auto yd = [](std::size_t i) { return Dir{false, i}; };
  auto xd = [](std::size_t a) { return Dir{true, a}; };

  if (orders.dy) {
    jet.dy.resize(n);
    for (std::size_t i = 0; i < n; ++i) jet.dy[i] = partial(std::array{yd(i)});
  }
  if (orders.dyy) {
    jet.dyy = Mat(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        jet.dyy(i, j) = jet.dyy(j, i) = partial(std::array{yd(i), yd(j)});
  }
  if (orders.dyyy) {
    jet.dyyy = Tensor3(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        for (std::size_t k = j; k < n; ++k) {
          const double v = partial(std::array{yd(i), yd(j), yd(k)});
          jet.dyyy(i, j, k) = jet.dyyy(i, k, j) = jet.dyyy(j, i, k) = v;
          jet.dyyy(j, k, i) = jet.dyyy(k, i, j) = jet.dyyy(k, j, i) = v;
        }
  }
  if (orders.dx) {
    jet.dx.resize(n);
    for (std::size_t a = 0; a < n; ++a) jet.dx[a] = partial(std::array{xd(a)});
  }
  if (orders.dxy) {
    jet.dxy = Mat(n, n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t i = 0; i < n; ++i) jet.dxy(a, i) = partial(std::array{xd(a), yd(i)});
  }
  if (orders.dxyy) {
    jet.dxyy = Tensor3(n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
          jet.dxyy(a, i, j) = jet.dxyy(a, j, i) = partial(std::array{xd(a), yd(i), yd(j)});
  }
  return jet;
}

/// Max relative discrepancy between the arithmetic and finite-difference
/// providers over all requested entries.
template <class F>
double fd_crosscheck(F&& f, const Vec& x, const Vec& y, JetOrders orders = JetOrders::all(),
                     const FdSteps& steps = {}) {
  const Jet a = jet_eval(f, x, y, orders, DerivProvider::Arithmetic);
  const Jet b = jet_eval(f, x, y, orders, DerivProvider::FiniteDifference, steps);
  double worst = 0.0;
  auto cmp = [&](double u, double v) {
    worst = std::max(worst, std::abs(u - v) / std::max({1.0, std::abs(u), std::abs(v)}));
  };
  const std::size_t n = a.n;
  cmp(a.value, b.value);
  if (orders.dy)
    for (std::size_t i = 0; i < n; ++i) cmp(a.dy[i], b.dy[i]);
  if (orders.dx)
    for (std::size_t i = 0; i < n; ++i) cmp(a.dx[i], b.dx[i]);
  if (orders.dyy)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) cmp(a.dyy(i, j), b.dyy(i, j));
  if (orders.dxy)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) cmp(a.dxy(i, j), b.dxy(i, j));
  if (orders.dyyy)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) cmp(a.dyyy(i, j, k), b.dyyy(i, j, k));
  if (orders.dxyy)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) cmp(a.dxyy(i, j, k), b.dxyy(i, j, k));
  return worst;
}

}  // namespace finsler
