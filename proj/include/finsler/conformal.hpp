#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "finsler/circles.hpp"
#include "finsler/connection.hpp"
#include "finsler/linalg.hpp"
#include "finsler/metrics.hpp"
#include "finsler/transport.hpp"

namespace finsler {

enum class ConformalVerdict { Conformal, NotConformal };

inline const char* to_string(ConformalVerdict v) {
  return v == ConformalVerdict::Conformal ? "conformal" : "not-conformal";
}

struct ConformalProbe {
  Vec point;
  double sigma_hat = 0.0;        // mean of log(Fbar/F) over the directions
  double variance = 0.0;         // direction variance of the log ratio
  double tensor_residual = 0.0;  // max relative |gbar - e^{2 sigma_hat} g|
};

struct ConformalReport {
  ConformalVerdict verdict = ConformalVerdict::NotConformal;
  std::vector<ConformalProbe> probes;
  Vec worst_point, worst_y1, worst_y2;  // directions with extreme log ratios
  double worst_variance = 0.0;

  static constexpr double variance_tol = 1e-10;
  static constexpr double tensor_tol = 1e-8;
};

/// Tests whether mbar = e^{2 sigma(x)} m for some scalar sigma(x): at each
/// probe point the log ratio log(Fbar/F) must be direction independent and
/// the fundamental tensors must match after rescaling by the estimate.
inline ConformalReport conformality_check(const FinslerMetric& m, const FinslerMetric& mbar,
                                          const std::vector<Vec>& points,
                                          std::size_t directions_per_point = 16,
                                          unsigned seed = 12345u) {
  if (m.dim() != mbar.dim())
    throw std::invalid_argument("conformality_check: dimension mismatch");
  if (points.empty() || directions_per_point < 2)
    throw std::invalid_argument("conformality_check: need probe points and >= 2 directions");
  const std::size_t n = m.dim();
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  ConformalReport report;
  report.verdict = ConformalVerdict::Conformal;
  for (const Vec& p : points) {
    ConformalProbe probe;
    probe.point = p;
    std::vector<Vec> dirs(directions_per_point);
    Vec logratio(directions_per_point);
    double mean = 0.0;
    for (std::size_t d = 0; d < directions_per_point; ++d) {
      Vec y(n);
      do {
        for (double& c : y) c = gauss(rng);
      } while (norm2(y) < 1e-3);
      const double lr = std::log(mbar.norm(p, y) / m.norm(p, y));
      dirs[d] = std::move(y);
      logratio[d] = lr;
      mean += lr;
    }
    mean /= static_cast<double>(directions_per_point);
    probe.sigma_hat = mean;
    double var = 0.0;
    std::size_t lo = 0, hi = 0;
    for (std::size_t d = 0; d < directions_per_point; ++d) {
      var += (logratio[d] - mean) * (logratio[d] - mean);
      if (logratio[d] < logratio[lo]) lo = d;
      if (logratio[d] > logratio[hi]) hi = d;
    }
    probe.variance = var / static_cast<double>(directions_per_point);

    const double scale = std::exp(2.0 * probe.sigma_hat);
    for (const Vec& y : dirs) {
      const Mat gb = fundamental_tensor(mbar, line_element(mbar, p, y));
      const Mat gm = fundamental_tensor(m, line_element(m, p, y));
      double rel = 0.0, mag = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          rel = std::max(rel, std::abs(gb(i, j) - scale * gm(i, j)));
          mag = std::max(mag, std::abs(gb(i, j)));
        }
      probe.tensor_residual = std::max(probe.tensor_residual, rel / std::max(1.0, mag));
    }

    if (probe.variance > report.worst_variance) {
      report.worst_variance = probe.variance;
      report.worst_point = p;
      report.worst_y1 = dirs[lo];
      report.worst_y2 = dirs[hi];
    }
    if (probe.variance > ConformalReport::variance_tol ||
        probe.tensor_residual > ConformalReport::tensor_tol)
      report.verdict = ConformalVerdict::NotConformal;
    report.probes.push_back(std::move(probe));
  }
  return report;
}

struct ProportionalityResult {
  bool proportional = false;
  double alpha = 0.0;             // F = alpha G when proportional
  double max_off_diagonal = 0.0;  // worst entry in the G-orthonormal basis
  Vec witness_u, witness_v;       // probe pair with F(u,v) != 0, G(u,v) = 0
};

/// Decides whether two SPD bilinear forms are proportional, constructively: F
/// is expressed in a G-orthonormal basis, where proportionality means the
/// matrix is alpha * identity; failures are witnessed by rotated probe pairs.
inline ProportionalityResult bilinear_proportionality(const Mat& F, const Mat& G,
                                                      double tol = 1e-10) {
  const std::size_t n = G.rows();
  if (F.rows() != n || F.cols() != n || G.cols() != n)
    throw std::invalid_argument("bilinear_proportionality: dimension mismatch");
  cholesky(F);  // SPD checks
  const Mat L = cholesky(G);

  // G-orthonormal basis vectors e_i solve L^T e_i = delta_i
  std::vector<Vec> basis(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec e(n, 0.0);
    e[i] = 1.0;
    // back substitution with L^T
    Vec v(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
      double s = e[r];
      for (std::size_t c = r + 1; c < n; ++c) s -= L(c, r) * v[c];
      v[r] = s / L(r, r);
    }
    basis[i] = std::move(v);
  }

  Mat Ft(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) Ft(i, j) = bilinear(F, basis[i], basis[j]);

  double alpha = 0.0;
  for (std::size_t i = 0; i < n; ++i) alpha += Ft(i, i);
  alpha /= static_cast<double>(n);

  ProportionalityResult out;
  out.alpha = alpha;
  double worst = 0.0;
  std::size_t wi = 0, wj = 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double dev = std::abs(i == j ? Ft(i, j) - alpha : Ft(i, j));
      if (i != j) out.max_off_diagonal = std::max(out.max_off_diagonal, std::abs(Ft(i, j)));
      if (dev > worst) {
        worst = dev;
        wi = i;
        wj = j == i ? (i + 1) % n : j;
      }
    }
  out.proportional = worst <= tol * std::abs(alpha);
  if (!out.proportional) {
    // the lemma's probe pair a e_i + b e_j, b e_i - a e_j is G-orthogonal;
    // F fails to vanish on it when the basis entries disagree
    const double a = 2.0, b = 1.0;
    out.witness_u.assign(n, 0.0);
    out.witness_v.assign(n, 0.0);
    axpy(a, basis[wi], out.witness_u);
    axpy(b, basis[wj], out.witness_u);
    axpy(b, basis[wi], out.witness_v);
    axpy(-a, basis[wj], out.witness_v);
  }
  return out;
}

struct OrthogonalityResult {
  double worst = 0.0;  // max |gbar_(p,X)(X, Y)| over sampled g-orthonormal pairs
  Vec X, Y;            // the pair attaining it
};

/// Samples g-orthonormal pairs (X, Y) at p and measures how far mbar's
/// fundamental tensor is from preserving their orthogonality.
inline OrthogonalityResult orthogonality_transfer(const FinslerMetric& m,
                                                  const FinslerMetric& mbar, const Vec& p,
                                                  std::size_t samples = 64,
                                                  unsigned seed = 777u) {
  const std::size_t n = m.dim();
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  OrthogonalityResult out;
  for (std::size_t s = 0; s < samples; ++s) {
    Vec xdir(n), ydir(n);
    do {
      for (double& c : xdir) c = gauss(rng);
    } while (norm2(xdir) < 1e-3);
    do {
      for (double& c : ydir) c = gauss(rng);
    } while (norm2(ydir) < 1e-3);
    std::pair<Vec, Vec> XY;
    try {
      XY = orthonormal_pair(m, p, xdir, ydir);
    } catch (const std::invalid_argument&) {
      continue;  // parallel draw, skip
    }
    const Mat gbar = fundamental_tensor(mbar, line_element(mbar, p, XY.first));
    const double v = std::abs(bilinear(gbar, XY.first, XY.second));
    if (v > out.worst) {
      out.worst = v;
      out.X = XY.first;
      out.Y = XY.second;
    }
  }
  return out;
}

enum class PreservationVerdict { Preserving, NonPreserving };

inline const char* to_string(PreservationVerdict v) {
  return v == PreservationVerdict::Preserving ? "preserving" : "non-preserving";
}

/// Outcome for a single circle of the family through p.
struct CircleRecord {
  Vec X, Y;
  double k = 0.0;              // 0 entries are geodesics (geodesic-circle mode)
  double gbar_XY = 0.0;        // gbar_(p,X)(X, Y)
  CurveClass image_class = CurveClass::Neither;
  double image_max_rho = 0.0;  // circle_test residual under mbar
  double curvature_ratio = 0.0;  // kbar/k via frenet under mbar, circles only
  bool integrator_error = false;
  std::string note;

  bool passes() const {
    if (integrator_error) return false;
    return k == 0.0 ? image_class == CurveClass::Geodesic : image_class == CurveClass::Circle;
  }
};

struct PreservationReport {
  PreservationVerdict verdict = PreservationVerdict::NonPreserving;
  std::vector<CircleRecord> records;
  double mean_curvature_ratio = 0.0;  // over image circles
  std::size_t errors = 0;
};

struct PreservationOptions {
  std::vector<double> k_values = {0.5, 1.0, 2.0};
  std::size_t pairs = 6;           // (X, Y) draws per k value
  unsigned seed = 20260101u;
  double periods = 1.0;            // integrated arc length in units of 2*pi/k
  std::size_t steps_per_period = 4000;
  double rho_tol = 1e-4;
  double geodesic_tol = 1e-6;
  double abort_residual = 1e-3;
  TransportMode mode = TransportMode::BaseCurve;
  bool concurrent = true;
};

/// Integrates a family of m-circles through p, maps each one through the
/// identity chart into (M, mbar), and classifies the images. The map
/// preserves circles exactly when every image classifies as a circle (or a
/// geodesic for the k = 0 entries).
inline PreservationReport preservation_harness(const FinslerMetric& m, const FinslerMetric& mbar,
                                               const Vec& p, const PreservationOptions& opt = {}) {
  if (m.dim() != mbar.dim())
    throw std::invalid_argument("preservation_harness: dimension mismatch");
  const std::size_t n = m.dim();
  std::mt19937 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // draw the whole family first so results do not depend on scheduling
  std::vector<CircleRecord> records;
  for (double k : opt.k_values)
    for (std::size_t pair = 0; pair < opt.pairs; ++pair) {
      Vec xdir(n), ydir(n);
      do {
        for (double& c : xdir) c = gauss(rng);
      } while (norm2(xdir) < 1e-3);
      do {
        for (double& c : ydir) c = gauss(rng);
      } while (norm2(ydir) < 1e-3);
      CircleRecord rec;
      auto [X, Y] = orthonormal_pair(m, p, xdir, ydir);
      rec.X = std::move(X);
      rec.Y = std::move(Y);
      rec.k = k;
      const Mat gbar = fundamental_tensor(mbar, line_element(mbar, p, rec.X));
      rec.gbar_XY = bilinear(gbar, rec.X, rec.Y);
      records.push_back(std::move(rec));
    }

  auto run_one = [&](CircleRecord rec) {
    try {
      IntegrateOptions iopt;
      iopt.abort_residual = opt.abort_residual;
      iopt.mode = opt.mode;
      CircleTrace trace;
      if (rec.k == 0.0) {
        trace = geodesic_integrate(m, p, rec.X, 2.0 * M_PI * opt.periods, iopt);
      } else {
        iopt.step = (2.0 * M_PI / rec.k) / static_cast<double>(opt.steps_per_period);
        const CircleSpec spec = make_circle_spec(m, p, rec.X, rec.Y, rec.k);
        trace = circle_integrate(m, spec, opt.periods * 2.0 * M_PI / rec.k, iopt);
      }
      if (trace.aborted) {
        rec.integrator_error = true;
        rec.note = trace.diagnostic;
        return rec;
      }
      const CurveSampling image = arclength_reparametrize(mbar, trace.sampling());
      CircleTestOptions copt;
      copt.rho_tol = opt.rho_tol;
      copt.geodesic_tol = opt.geodesic_tol;
      copt.mode = opt.mode;
      const CircleTestResult res = circle_test(mbar, image, copt);
      rec.image_class = res.verdict;
      rec.image_max_rho = res.max_rho;
      if (rec.k > 0.0 && res.verdict == CurveClass::Circle) {
        const FrenetData f = frenet_data(mbar, image, opt.mode);
        if (!f.geodesic && !f.k1.empty()) {
          // median k1 is robust against edge samples
          Vec k1 = f.k1;
          std::nth_element(k1.begin(), k1.begin() + static_cast<std::ptrdiff_t>(k1.size() / 2),
                           k1.end());
          rec.curvature_ratio = k1[k1.size() / 2] / rec.k;
        }
      }
    } catch (const std::exception& e) {
      rec.integrator_error = true;
      rec.note = e.what();
    }
    return rec;
  };

  PreservationReport report;
  if (opt.concurrent) {
    std::vector<std::future<CircleRecord>> futures;
    futures.reserve(records.size());
    for (CircleRecord& rec : records)
      futures.push_back(std::async(std::launch::async, run_one, std::move(rec)));
    for (auto& fut : futures) report.records.push_back(fut.get());
  } else {
    for (CircleRecord& rec : records) report.records.push_back(run_one(std::move(rec)));
  }

  std::size_t passing = 0, circles = 0;
  bool all_pass = true;
  for (const CircleRecord& rec : report.records) {
    if (rec.integrator_error) {
      ++report.errors;
      all_pass = false;
      continue;
    }
    if (rec.passes()) ++passing;
    else
      all_pass = false;
    if (rec.image_class == CurveClass::Circle && rec.curvature_ratio > 0.0) {
      report.mean_curvature_ratio += rec.curvature_ratio;
      ++circles;
    }
  }
  if (circles > 0) report.mean_curvature_ratio /= static_cast<double>(circles);
  report.verdict = (all_pass && passing > 0) ? PreservationVerdict::Preserving
                                             : PreservationVerdict::NonPreserving;
  return report;
}

}  // namespace finsler
