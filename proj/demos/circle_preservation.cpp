// Maps circle families through two metric changes and reports whether the
// images stay circles: an anisotropic rescale breaks it, a homothety keeps
// it with the expected curvature rescale.
#include <cmath>
#include <cstdio>

#include "finsler/finsler.hpp"

using namespace finsler;

static void analyze(const char* title, const FinslerMetric& a, const FinslerMetric& b,
                    const Vec& p) {
  PreservationOptions opt;
  opt.k_values = {1.0, 2.0};
  opt.pairs = 3;
  opt.steps_per_period = 2000;
  const PreservationReport rep = preservation_harness(a, b, p, opt);
  const OrthogonalityResult orth = orthogonality_transfer(a, b, p);

  std::printf("%s\n", title);
  std::printf("  verdict: %s (worst |gbar(X,Y)| over orthonormal pairs: %.3f)\n",
              to_string(rep.verdict), orth.worst);
  for (const CircleRecord& rec : rep.records)
    std::printf("  k=%.1f  gbar(X,Y)=%+.4f  image=%-8s  rho=%.2e  kbar/k=%.6f\n", rec.k,
                rec.gbar_XY, to_string(rec.image_class), rec.image_max_rho,
                rec.curvature_ratio);
}

int main() {
  const FinslerMetric flat = FinslerMetric::euclidean(2);
  analyze("euclidean -> diag(1,4): anisotropic, should fail",
          flat, FinslerMetric::riemannian_diagonal({1.0, 4.0}), {0.0, 0.0});
  analyze("euclidean -> e^{2*0.5} euclidean: homothety, should preserve (kbar/k = e^-0.5)",
          flat, FinslerMetric::conformal(flat, SigmaExpr::parse("0.5")), {0.0, 0.0});
  return 0;
}
