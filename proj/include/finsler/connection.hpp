#pragma once

#include <cstddef>

#include "finsler/jets.hpp"
#include "finsler/linalg.hpp"
#include "finsler/metrics.hpp"

namespace finsler {

/// All connection data of a metric at one line element (x, y):
///   g_ij   = 1/2 d2F^2/dy^i dy^j          fundamental tensor
///   G^i    = g^il/4 (d2F^2/dx^m dy^l y^m - dF^2/dx^l)   spray
///   N^i_j  = dG^i/dy^j                    nonlinear connection
///   C^i_jk = 1/2 g^im dg_mk/dy^j          Cartan torsion (index raised)
///   Gamma  = Christoffel symbols of g built with the horizontal derivative
///            d/dx^j - N^l_j d/dy^l.
struct ConnectionSample {
  std::size_t n = 0;
  Mat g, ginv;
  Tensor3 C;      // C(i,j,k) = C^i_jk
  Vec spray;      // G^i
  Mat N;          // N(i,j) = N^i_j
  Tensor3 Gamma;  // Gamma(i,j,k) = Gamma^i_jk

  /// Transport coefficients Theta^i_kh = Gamma^i_kh + C^i_ks N^s_h appearing
  /// in the covariant derivative along a curve.
  Tensor3 theta() const {
    Tensor3 th(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t h = 0; h < n; ++h) {
          double v = Gamma(i, k, h);
          for (std::size_t s = 0; s < n; ++s) v += C(i, k, s) * N(s, h);
          th(i, k, h) = v;
        }
    return th;
  }
};

inline ConnectionSample connection_sample(const FinslerMetric& m, const LineElement& le,
                                          DerivProvider provider = DerivProvider::Arithmetic,
                                          const FdSteps& steps = {}) {
  const std::size_t n = m.dim();
  const Jet jet = jet_eval(EnergyFn{&m}, le.x, le.y, JetOrders::all(), provider, steps);

  ConnectionSample cs;
  cs.n = n;

  cs.g = Mat(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cs.g(i, j) = 0.5 * jet.dyy(i, j);
  cs.ginv = spd_inverse(cs.g);

  // dg_ij/dy^k and dg_ij/dx^a, both from the F^2 jet
  Tensor3 dgdy(n), dgdx(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        dgdy(i, j, k) = 0.5 * jet.dyyy(i, j, k);
        dgdx(i, j, k) = 0.5 * jet.dxyy(k, i, j);
      }

  cs.C = Tensor3(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t h = 0; h < n; ++h)
      for (std::size_t k = 0; k < n; ++k) {
        double v = 0.0;
        for (std::size_t mm = 0; mm < n; ++mm) v += cs.ginv(i, mm) * dgdy(mm, k, h);
        cs.C(i, h, k) = 0.5 * v;
      }

  // P_l = d2F^2/dx^m dy^l y^m - dF^2/dx^l, so G^i = g^il P_l / 4
  Vec P(n, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    double v = -jet.dx[l];
    for (std::size_t mm = 0; mm < n; ++mm) v += jet.dxy(mm, l) * le.y[mm];
    P[l] = v;
  }
  cs.spray = Vec(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    for (std::size_t l = 0; l < n; ++l) v += cs.ginv(i, l) * P[l];
    cs.spray[i] = 0.25 * v;
  }

  // dG^i/dy^j via the product rule; dg^il/dy^j = -g^ia dg_ab/dy^j g^bl
  cs.N = Mat(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        double dginv = 0.0;
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b)
            dginv -= cs.ginv(i, a) * dgdy(a, b, j) * cs.ginv(b, l);
        double dP = jet.dxy(j, l) - jet.dxy(l, j);
        for (std::size_t mm = 0; mm < n; ++mm) dP += jet.dxyy(mm, l, j) * le.y[mm];
        v += dginv * P[l] + cs.ginv(i, l) * dP;
      }
      cs.N(i, j) = 0.25 * v;
    }

  // horizontal derivative of g, then the Christoffel combination
  Tensor3 dg_h(n);  // dg_h(i,j,k) = delta g_ij / delta x^k
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        double v = dgdx(i, j, k);
        for (std::size_t l = 0; l < n; ++l) v -= cs.N(l, k) * dgdy(i, j, l);
        dg_h(i, j, k) = v;
      }
  cs.Gamma = Tensor3(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        double v = 0.0;
        for (std::size_t h = 0; h < n; ++h)
          v += cs.ginv(i, h) * (dg_h(h, k, j) + dg_h(h, j, k) - dg_h(j, k, h));
        cs.Gamma(i, j, k) = 0.5 * v;
      }

  return cs;
}

inline Mat fundamental_tensor(const FinslerMetric& m, const LineElement& le,
                              DerivProvider provider = DerivProvider::Arithmetic,
                              const FdSteps& steps = {}) {
  const std::size_t n = m.dim();
  const Jet jet = jet_eval(EnergyFn{&m}, le.x, le.y, JetOrders::hessian(), provider, steps);
  Mat g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = 0.5 * jet.dyy(i, j);
  cholesky(g);  // SPD check; throws on an invalid metric
  return g;
}

inline Tensor3 cartan_torsion(const FinslerMetric& m, const LineElement& le,
                              DerivProvider provider = DerivProvider::Arithmetic) {
  return connection_sample(m, le, provider).C;
}

inline Vec spray(const FinslerMetric& m, const LineElement& le,
                 DerivProvider provider = DerivProvider::Arithmetic) {
  return connection_sample(m, le, provider).spray;
}

inline Mat nonlinear_connection(const FinslerMetric& m, const LineElement& le,
                                DerivProvider provider = DerivProvider::Arithmetic) {
  return connection_sample(m, le, provider).N;
}

inline Tensor3 cartan_christoffels(const FinslerMetric& m, const LineElement& le,
                                   DerivProvider provider = DerivProvider::Arithmetic) {
  return connection_sample(m, le, provider).Gamma;
}

}  // namespace finsler
