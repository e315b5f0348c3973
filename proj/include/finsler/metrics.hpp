#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "finsler/expr.hpp"
#include "finsler/linalg.hpp"

namespace finsler {

enum class MetricKind { Euclidean, Riemannian, Randers, MinkowskiRanders, Conformal };
enum class ChartKind { Flat, Sphere, Diagonal };

/// A member of the closed metric catalogue. Immutable after construction;
/// every factory validates its parameters.
///
/// F(x,y) is evaluated through energy() = F^2, generically over plain doubles
/// or nested dual scalars so the derivative engine sees the same code path.
class FinslerMetric {
 public:
  static FinslerMetric euclidean(std::size_t n) {
    require(n >= 2, "euclidean: dimension must be >= 2");
    FinslerMetric m;
    m.kind_ = MetricKind::Euclidean;
    m.dim_ = n;
    return m;
  }

  static FinslerMetric riemannian_flat(std::size_t n) {
    require(n >= 2, "riemannian: dimension must be >= 2");
    FinslerMetric m;
    m.kind_ = MetricKind::Riemannian;
    m.chart_ = ChartKind::Flat;
    m.dim_ = n;
    return m;
  }

  // Chart metric diag(1, sin^2 x1) on the unit sphere; x1 is the colatitude.
  static FinslerMetric riemannian_sphere() {
    FinslerMetric m;
    m.kind_ = MetricKind::Riemannian;
    m.chart_ = ChartKind::Sphere;
    m.dim_ = 2;
    return m;
  }

  static FinslerMetric riemannian_diagonal(Vec diag) {
    require(diag.size() >= 2, "riemannian: dimension must be >= 2");
    for (double d : diag) require(d > 0.0, "riemannian: diagonal entries must be positive");
    FinslerMetric m;
    m.kind_ = MetricKind::Riemannian;
    m.chart_ = ChartKind::Diagonal;
    m.dim_ = diag.size();
    m.diag_ = std::move(diag);
    return m;
  }

  static FinslerMetric randers(Mat a, Vec b) {
    require(a.rows() == a.cols() && a.rows() >= 2, "randers: a must be square, n >= 2");
    require(b.size() == a.rows(), "randers: b dimension mismatch");
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j)
        require(std::abs(a(i, j) - a(j, i)) <= 1e-14, "randers: a must be symmetric");
    const Mat ainv = spd_inverse(a);  // throws if a is not SPD
    const double bnorm = std::sqrt(bilinear(ainv, b, b));
    require(bnorm < 1.0 - 1e-9, "randers: |b|_a must be < 1");
    FinslerMetric m;
    m.kind_ = MetricKind::Randers;
    m.dim_ = a.rows();
    m.a_ = std::move(a);
    m.b_ = std::move(b);
    return m;
  }

  // The plane with F(y) = |y| + b*y1, 0 < b < 1.
  static FinslerMetric minkowski_randers(double b) {
    require(b > 0.0 && b < 1.0, "minkowski-randers: b out of range (0,1)");
    FinslerMetric m;
    m.kind_ = MetricKind::MinkowskiRanders;
    m.dim_ = 2;
    m.b_scalar_ = b;
    return m;
  }

  static FinslerMetric conformal(FinslerMetric base, SigmaExpr sigma) {
    require(sigma.valid(), "conformal: missing sigma expression");
    require(static_cast<std::size_t>(sigma.max_var()) <= base.dim(),
            "conformal: sigma uses a coordinate beyond the base dimension");
    FinslerMetric m;
    m.kind_ = MetricKind::Conformal;
    m.dim_ = base.dim();
    m.base_ = std::make_shared<FinslerMetric>(std::move(base));
    m.sigma_ = std::move(sigma);
    return m;
  }

  MetricKind kind() const { return kind_; }
  ChartKind chart() const { return chart_; }
  std::size_t dim() const { return dim_; }
  const Vec& chart_diag() const { return diag_; }
  const Mat& randers_a() const { return a_; }
  const Vec& randers_b() const { return b_; }
  double randers_b_scalar() const { return b_scalar_; }
  const FinslerMetric& base() const { return *base_; }
  const SigmaExpr& sigma() const { return sigma_; }

  /// True when F does not depend on the position x (connection coefficients
  /// vanish in these linear coordinates).
  bool x_independent() const {
    switch (kind_) {
      case MetricKind::Euclidean:
      case MetricKind::Randers:
      case MetricKind::MinkowskiRanders: return true;
      case MetricKind::Riemannian: return chart_ != ChartKind::Sphere;
      case MetricKind::Conformal:
        return base_->x_independent() && sigma_.max_var() == 0;
    }
    return false;
  }

  bool riemannian() const {
    switch (kind_) {
      case MetricKind::Euclidean:
      case MetricKind::Riemannian: return true;
      case MetricKind::Conformal: return base_->riemannian();
      default: return false;
    }
  }

  /// F(x,y)^2, generic over the scalar type.
  template <class S>
  S energy(std::span<const S> x, std::span<const S> y) const {
    switch (kind_) {
      case MetricKind::Euclidean: {
        S s = y[0] * y[0];
        for (std::size_t i = 1; i < dim_; ++i) s += y[i] * y[i];
        return s;
      }
      case MetricKind::Riemannian: {
        if (chart_ == ChartKind::Sphere) {
          const S sx = sin(x[0]);
          return y[0] * y[0] + sx * sx * y[1] * y[1];
        }
        S s = (chart_ == ChartKind::Diagonal ? diag_[0] : 1.0) * y[0] * y[0];
        for (std::size_t i = 1; i < dim_; ++i)
          s += (chart_ == ChartKind::Diagonal ? diag_[i] : 1.0) * y[i] * y[i];
        return s;
      }
      case MetricKind::Randers: {
        S q = S(0.0);
        for (std::size_t i = 0; i < dim_; ++i)
          for (std::size_t j = 0; j < dim_; ++j) q += a_(i, j) * y[i] * y[j];
        S beta = S(0.0);
        for (std::size_t i = 0; i < dim_; ++i) beta += b_[i] * y[i];
        const S f = sqrt(q) + beta;
        return f * f;
      }
      case MetricKind::MinkowskiRanders: {
        const S f = sqrt(y[0] * y[0] + y[1] * y[1]) + b_scalar_ * y[0];
        return f * f;
      }
      case MetricKind::Conformal: {
        const S s = sigma_.eval<S>(x);
        return exp(2.0 * s) * base_->energy(x, y);
      }
    }
    throw std::logic_error("unreachable metric kind");
  }

  double energy_at(const Vec& x, const Vec& y) const {
    return energy<double>(std::span<const double>(x), std::span<const double>(y));
  }

  double norm(const Vec& x, const Vec& y) const {
    const double e = energy_at(x, y);
    if (!(e > 0.0) || !std::isfinite(e))
      throw std::domain_error("metric norm undefined at this line element");
    return std::sqrt(e);
  }

 private:
  FinslerMetric() = default;

  static void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  }

  MetricKind kind_ = MetricKind::Euclidean;
  ChartKind chart_ = ChartKind::Flat;
  std::size_t dim_ = 2;
  Vec diag_;
  Mat a_;
  Vec b_;
  double b_scalar_ = 0.0;
  std::shared_ptr<const FinslerMetric> base_;
  SigmaExpr sigma_;
};

/// The (x, y) pair at which all tensors are evaluated; along a curve this is
/// (position, velocity).
struct LineElement {
  Vec x;
  Vec y;
};

/// Validates F(x,y) > 0 and finiteness; throws otherwise.
inline LineElement line_element(const FinslerMetric& m, Vec x, Vec y) {
  if (x.size() != m.dim() || y.size() != m.dim())
    throw std::invalid_argument("line element: dimension mismatch");
  if (max_abs(y) == 0.0) throw std::domain_error("line element: y must be nonzero");
  m.norm(x, y);  // throws if F <= 0 or non-finite
  return LineElement{std::move(x), std::move(y)};
}

/// Functor adapter so jet_eval can differentiate F^2.
struct EnergyFn {
  const FinslerMetric* m;
  template <class S>
  S operator()(std::span<const S> x, std::span<const S> y) const {
    return m->energy(x, y);
  }
};

}  // namespace finsler
