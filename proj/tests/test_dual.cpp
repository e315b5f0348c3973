#include <catch2/catch.hpp>

#include "finsler/dual.hpp"

using finsler::ad::D1;
using finsler::ad::D2;
using finsler::ad::D3;

TEST_CASE("dual arithmetic tracks first derivatives") {
  const D1 x{1.3, 1.0};

  SECTION("polynomial") {
    const D1 r = 3.0 * x * x + 2.0 * x - 5.0;
    CHECK(r.v == Approx(3.0 * 1.3 * 1.3 + 2.0 * 1.3 - 5.0));
    CHECK(r.d == Approx(6.0 * 1.3 + 2.0));
  }
  SECTION("quotient") {
    const D1 r = (x + 1.0) / (x * x);
    // d/dx (x+1)/x^2 = (x^2 - (x+1)*2x)/x^4
    const double expect = (1.3 * 1.3 - (1.3 + 1.0) * 2 * 1.3) / std::pow(1.3, 4);
    CHECK(r.d == Approx(expect).epsilon(1e-14));
  }
  SECTION("transcendentals") {
    CHECK(sin(x).d == Approx(std::cos(1.3)));
    CHECK(cos(x).d == Approx(-std::sin(1.3)));
    CHECK(exp(x).d == Approx(std::exp(1.3)));
    CHECK(log(x).d == Approx(1.0 / 1.3));
    CHECK(sqrt(x).d == Approx(0.5 / std::sqrt(1.3)));
    CHECK(pow(x, 2.5).d == Approx(2.5 * std::pow(1.3, 1.5)));
  }
}

TEST_CASE("nested duals give higher derivatives of sin") {
  D3 x;
  x.v.v.v = 0.7;
  x.d.v.v = 1.0;
  x.v.d.v = 1.0;
  x.v.v.d = 1.0;
  const D3 r = sin(x);
  CHECK(r.v.v.v == Approx(std::sin(0.7)));
  CHECK(r.d.v.v == Approx(std::cos(0.7)));
  CHECK(r.d.d.v == Approx(-std::sin(0.7)));
  CHECK(r.d.d.d == Approx(-std::cos(0.7)));
}

TEST_CASE("nested mixed partial of x*y^2") {
  // f(a,b) = a*b^2; d2f/da db = 2b
  D2 a, b;
  a.v.v = 1.7;
  b.v.v = 2.9;
  a.d.v = 1.0;  // first direction: a
  b.v.d = 1.0;  // second direction: b
  const D2 r = a * b * b;
  CHECK(r.d.d == Approx(2.0 * 2.9));
  CHECK(r.v.v == Approx(1.7 * 2.9 * 2.9));
}

TEST_CASE("general power via duals") {
  const D1 x{1.9, 1.0};
  const D1 r = pow(x, x);
  // d/dx x^x = x^x (log x + 1)
  CHECK(r.d == Approx(std::pow(1.9, 1.9) * (std::log(1.9) + 1.0)).epsilon(1e-13));
}
