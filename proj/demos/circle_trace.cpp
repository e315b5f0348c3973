// Integrates a small circle on the unit sphere chart and prints its
// curvature data and first-integral drift.
#include <cmath>
#include <cstdio>

#include "finsler/finsler.hpp"

using namespace finsler;

int main() {
  const FinslerMetric sphere = FinslerMetric::riemannian_sphere();
  const double colatitude = M_PI / 4;

  // unit tangent along the parallel, inward unit normal
  const Vec p{colatitude, 0.0};
  const Vec X{0.0, 1.0 / std::sin(colatitude)};
  const Vec Y{-1.0, 0.0};
  const double k = 1.0 / std::tan(colatitude);

  const CircleSpec spec = make_circle_spec(sphere, p, X, Y, k);
  const double period = 2.0 * M_PI * std::sin(colatitude);
  const CircleTrace trace = circle_integrate(sphere, spec, period);

  std::printf("samples: %zu, rhs evaluations: %zu\n", trace.size(), trace.stats.rhs_evals);
  std::printf("first-integral drift: unit %.2e, orth %.2e, curv %.2e\n",
              max_abs(trace.res_unit), max_abs(trace.res_orth), max_abs(trace.res_curv));

  const FrenetData frenet = frenet_data(sphere, trace.sampling());
  double k1_min = frenet.k1.front(), k1_max = k1_min, k2 = 0.0;
  for (double v : frenet.k1) {
    k1_min = std::min(k1_min, v);
    k1_max = std::max(k1_max, v);
  }
  for (double v : frenet.k2_residual) k2 = std::max(k2, v);
  std::printf("k1 in [%.10f, %.10f]  (expected %.10f)\n", k1_min, k1_max, k);
  std::printf("max k2 residual: %.2e\n", k2);

  const CircleTestResult verdict = circle_test(sphere, trace.sampling());
  std::printf("classification: %s (max rho %.2e)\n", to_string(verdict.verdict),
              verdict.max_rho);
  return 0;
}
