#include <catch2/catch.hpp>

#include <random>

#include "finsler/metrics.hpp"
#include "helpers.hpp"

using namespace finsler;

TEST_CASE("construction validates parameters") {
  CHECK_THROWS_AS(FinslerMetric::euclidean(1), std::invalid_argument);
  CHECK_THROWS_AS(FinslerMetric::minkowski_randers(1.5), std::invalid_argument);
  CHECK_THROWS_AS(FinslerMetric::minkowski_randers(0.0), std::invalid_argument);
  CHECK_THROWS_AS(FinslerMetric::riemannian_diagonal({1.0, -4.0}), std::invalid_argument);

  // |b|_a must stay below 1
  CHECK_THROWS_AS(FinslerMetric::randers(Mat::identity(2), {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(FinslerMetric::randers(Mat::identity(2), {0.999999999, 0.0}),
                  std::invalid_argument);
  CHECK_NOTHROW(FinslerMetric::randers(Mat::identity(2), {0.9, 0.0}));

  // a must be SPD
  Mat bad = Mat::identity(2);
  bad(0, 0) = -1.0;
  CHECK_THROWS_AS(FinslerMetric::randers(bad, {0.1, 0.0}), std::domain_error);
}

TEST_CASE("randers plane norm values") {
  const FinslerMetric m = FinslerMetric::minkowski_randers(0.3);
  CHECK(m.norm({0, 0}, {1, 0}) == Approx(1.3));
  CHECK(m.norm({0, 0}, {-1, 0}) == Approx(0.7));
  CHECK(m.norm({0, 0}, {0, 1}) == Approx(1.0));
}

TEST_CASE("positive 1-homogeneity of F") {
  std::mt19937 rng(5);
  for (const auto& [name, m] : testutil::catalogue()) {
    INFO(name);
    for (int t = 0; t < 25; ++t) {
      const LineElement le = testutil::random_line_element(m, rng);
      const double lam = testutil::urand(rng, 0.1, 10.0);
      const double f = m.norm(le.x, le.y);
      const double fl = m.norm(le.x, scale(lam, le.y));
      CHECK(std::abs(fl - lam * f) <= 1e-10 * std::abs(lam * f));
    }
  }
}

TEST_CASE("x independence flags") {
  CHECK(FinslerMetric::euclidean(2).x_independent());
  CHECK(FinslerMetric::minkowski_randers(0.3).x_independent());
  CHECK(FinslerMetric::riemannian_diagonal({1, 4}).x_independent());
  CHECK_FALSE(FinslerMetric::riemannian_sphere().x_independent());
  CHECK_FALSE(FinslerMetric::conformal(FinslerMetric::euclidean(2), SigmaExpr::parse("x1"))
                  .x_independent());
  CHECK(FinslerMetric::conformal(FinslerMetric::euclidean(2), SigmaExpr::parse("0.7"))
            .x_independent());
}

TEST_CASE("conformal energy rescales the base") {
  const FinslerMetric base = FinslerMetric::riemannian_sphere();
  const FinslerMetric m = FinslerMetric::conformal(base, SigmaExpr::parse("x1 - 0.5*x2"));
  std::mt19937 rng(9);
  for (int t = 0; t < 10; ++t) {
    const LineElement le = testutil::random_line_element(m, rng);
    const double sigma = le.x[0] - 0.5 * le.x[1];
    CHECK(m.energy_at(le.x, le.y) ==
          Approx(std::exp(2 * sigma) * base.energy_at(le.x, le.y)).epsilon(1e-13));
  }
}

TEST_CASE("line element validation") {
  const FinslerMetric m = FinslerMetric::euclidean(2);
  CHECK_THROWS_AS(line_element(m, {0, 0}, {0, 0}), std::domain_error);
  CHECK_THROWS_AS(line_element(m, {0, 0, 0}, {1, 0, 0}), std::invalid_argument);
  CHECK_NOTHROW(line_element(m, {0, 0}, {1, 0}));
}
