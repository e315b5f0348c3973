#include <catch2/catch.hpp>

#include <cmath>

#include "finsler/io.hpp"
#include "finsler/metric_spec.hpp"
#include "helpers.hpp"

using namespace finsler;

namespace {

CircleTrace sample_trace() {
  const FinslerMetric m = FinslerMetric::euclidean(2);
  const CircleSpec spec = make_circle_spec(m, {0, 0}, {1, 0}, {0, 1}, 1.0);
  IntegrateOptions opt;
  opt.step = 0.05;
  CircleTrace tr = circle_integrate(m, spec, 1.0, opt);
  tr.metric = "euclidean:n=2";
  return tr;
}

}  // namespace

TEST_CASE("trace json round trip is byte identical") {
  const CircleTrace tr = sample_trace();
  const std::string once = io::trace_to_json(tr).dump(2);
  const CircleTrace back = io::trace_from_json(nlohmann::json::parse(once));
  const std::string twice = io::trace_to_json(back).dump(2);
  CHECK(once == twice);
  CHECK(back.size() == tr.size());
  CHECK(back.k == tr.k);
  CHECK(back.mode == tr.mode);
}

TEST_CASE("geodesic traces serialize without v states") {
  const FinslerMetric m = FinslerMetric::euclidean(2);
  IntegrateOptions opt;
  opt.step = 0.1;
  CircleTrace tr = geodesic_integrate(m, {0, 0}, {1, 0}, 1.0, opt);
  tr.metric = "euclidean:n=2";
  const nlohmann::json j = io::trace_to_json(tr);
  CHECK(j.at("states").at(0).size() == 2);
  CHECK_FALSE(j.at("residuals").contains("orth"));
  const std::string once = j.dump(2);
  CHECK(io::trace_to_json(io::trace_from_json(nlohmann::json::parse(once))).dump(2) == once);
}

TEST_CASE("csv export mirrors the json states at full precision") {
  const CircleTrace tr = sample_trace();
  const std::string csv = io::trace_to_csv(tr);
  CHECK(csv.rfind("s,x1,x2,u1,u2,v1,v2,res_unit,res_orth,res_curv\n", 0) == 0);
  const CurveSampling c = io::curve_from_csv(csv);
  REQUIRE(c.size() == tr.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    // 17 significant digits reproduce doubles exactly
    CHECK(c.x[j] == tr.states[j].x);
    CHECK(c.xdot[j] == tr.states[j].u);
  }
  CHECK(c.dt == Approx(tr.ds).margin(1e-15));
}

TEST_CASE("non-finite values refuse to serialize") {
  CircleTrace tr = sample_trace();
  tr.states[3].x[0] = std::nan("");
  CHECK_THROWS_AS(io::trace_to_json(tr), std::domain_error);
  CHECK_THROWS_AS(io::trace_to_csv(tr), std::domain_error);
}

TEST_CASE("csv loader validates structure") {
  CHECK_THROWS_AS(io::curve_from_csv(""), std::invalid_argument);
  CHECK_THROWS_AS(io::curve_from_csv("a,b\n1,2\n"), std::invalid_argument);
  // non-uniform grid
  std::string bad = "s,x1,x2\n";
  for (int j = 0; j < 8; ++j) bad += std::to_string(j * j) + ",0,0\n";
  CHECK_THROWS_AS(io::curve_from_csv(bad), std::invalid_argument);
}

TEST_CASE("csv with positions only leaves velocities to stencils") {
  std::string csv = "s,x1,x2\n";
  for (int j = 0; j < 12; ++j) {
    const double s = 0.1 * j;
    csv += io::fmt17(s) + "," + io::fmt17(std::sin(s)) + "," + io::fmt17(1 - std::cos(s)) + "\n";
  }
  const CurveSampling c = io::curve_from_csv(csv);
  CHECK(c.xdot.empty());
  const std::vector<Vec> u = velocities(c);
  CHECK(u[5][0] == Approx(std::cos(0.5)).margin(1e-7));
}

TEST_CASE("connection sample serializes all tensors") {
  const FinslerMetric m = FinslerMetric::riemannian_sphere();
  const ConnectionSample cs = connection_sample(m, line_element(m, {0.9, 0.0}, {0.3, 1.0}));
  const nlohmann::json j = io::connection_to_json(cs);
  CHECK(j.at("g").size() == 2);
  CHECK(j.at("Gamma").size() == 2);
  CHECK(j.at("spray").size() == 2);
  CHECK(j.at("g").at(0).at(0).get<double>() == Approx(cs.g(0, 0)));
}
