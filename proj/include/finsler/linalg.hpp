#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace finsler {

using Vec = std::vector<double>;

// Dense row-major matrix. Everything in this library is small (n <= 8),
// so no effort is spent on blocking or expression templates.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return a_.empty(); }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

// Rank-3 tensor t(i,j,k) with all three extents equal.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(std::size_t n, double fill = 0.0) : n_(n), a_(n * n * n, fill) {}

  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return a_[(i * n_ + j) * n_ + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return a_[(i * n_ + j) * n_ + k];
  }

  std::size_t dim() const { return n_; }
  bool empty() const { return a_.empty(); }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// X^T g Y
inline double bilinear(const Mat& g, const Vec& x, const Vec& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) s += g(i, j) * x[i] * y[j];
  return s;
}

inline Vec matvec(const Mat& m, const Vec& x) {
  Vec r(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r[i] += m(i, j) * x[j];
  return r;
}

inline Vec add(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec scale(double s, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

// r += s*a
inline void axpy(double s, const Vec& a, Vec& r) {
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += s * a[i];
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double gnorm(const Mat& g, const Vec& x) { return std::sqrt(bilinear(g, x, x)); }

inline double max_abs(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Lower Cholesky factor of an SPD matrix. Throws if a pivot is not positive,
// which doubles as the positive-definiteness check.
inline Mat cholesky(const Mat& a) {
  const std::size_t n = a.rows();
  Mat l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0) || !std::isfinite(d))
      throw std::domain_error("cholesky: matrix not positive definite (pivot " +
                              std::to_string(j) + ")");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

// Solve L L^T x = b given the lower factor.
inline Vec cholesky_solve(const Mat& l, const Vec& b) {
  const std::size_t n = l.rows();
  Vec y(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

inline Mat spd_inverse(const Mat& a) {
  const std::size_t n = a.rows();
  const Mat l = cholesky(a);
  Mat inv(n, n);
  Vec e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Vec col = cholesky_solve(l, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    e[j] = 0.0;
  }
  return inv;
}

}  // namespace finsler
