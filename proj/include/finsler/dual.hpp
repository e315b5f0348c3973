#pragma once

#include <cmath>
#include <ostream>
#include <type_traits>

namespace finsler::ad {

/// Truncated first-order Taylor scalar. Nesting Dual<Dual<...>> tracks one
/// extra differentiation direction per level, so Dual<Dual<Dual<double>>>
/// carries exact mixed partials up to total order three.
template <class T>
struct Dual {
  T v{};  // value
  T d{};  // derivative

  constexpr Dual() = default;
  constexpr Dual(const T& value) : v(value), d{} {}
  constexpr Dual(const T& value, const T& deriv) : v(value), d(deriv) {}

  // Broadcast a plain arithmetic scalar down to the innermost level.
  template <class S, class = std::enable_if_t<std::is_arithmetic_v<S> && !std::is_same_v<S, T>>>
  constexpr Dual(S s) : v(s), d{} {}

  Dual& operator+=(const Dual& r) { v += r.v; d += r.d; return *this; }
  Dual& operator-=(const Dual& r) { v -= r.v; d -= r.d; return *this; }
  Dual& operator*=(const Dual& r) {
    d = d * r.v + v * r.d;
    v = v * r.v;
    return *this;
  }
  Dual& operator/=(const Dual& r) {
    v = v / r.v;
    d = (d - v * r.d) / r.v;
    return *this;
  }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(Dual a, const Dual& b) { return a /= b; }

  friend Dual operator+(const Dual& a) { return a; }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }

  friend Dual operator+(double s, const Dual& a) { return Dual(s) + a; }
  friend Dual operator-(double s, const Dual& a) { return Dual(s) - a; }
  friend Dual operator*(double s, const Dual& a) { return Dual(s) * a; }
  friend Dual operator/(double s, const Dual& a) { return Dual(s) / a; }
  friend Dual operator+(const Dual& a, double s) { return a + Dual(s); }
  friend Dual operator-(const Dual& a, double s) { return a - Dual(s); }
  friend Dual operator*(const Dual& a, double s) { return a * Dual(s); }
  friend Dual operator/(const Dual& a, double s) { return a / Dual(s); }

  // Ordering compares values only; used for domain guards.
  friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
  friend bool operator>(const Dual& a, const Dual& b) { return b < a; }
  friend bool operator<(const Dual& a, double s) { return a.v < T(s); }
  friend bool operator>(const Dual& a, double s) { return T(s) < a.v; }
};

inline double value(double s) { return s; }
template <class T>
double value(const Dual<T>& a) { return value(a.v); }

inline bool finite(double s) { return std::isfinite(s); }
template <class T>
bool finite(const Dual<T>& a) { return finite(a.v) && finite(a.d); }

using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

template <class T>
Dual<T> sin(const Dual<T>& a) { return {sin(a.v), cos(a.v) * a.d}; }

template <class T>
Dual<T> cos(const Dual<T>& a) { return {cos(a.v), T(-1) * sin(a.v) * a.d}; }

template <class T>
Dual<T> exp(const Dual<T>& a) {
  const T e = exp(a.v);
  return {e, e * a.d};
}

template <class T>
Dual<T> log(const Dual<T>& a) { return {log(a.v), a.d / a.v}; }

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  const T r = sqrt(a.v);
  return {r, a.d / (2.0 * r)};
}

template <class T>
Dual<T> pow(const Dual<T>& a, double e) {
  const T p1 = pow(a.v, e - 1.0);
  return {p1 * a.v, e * p1 * a.d};
}

// General a^b through exp(b log a); requires a > 0.
template <class T>
Dual<T> pow(const Dual<T>& a, const Dual<T>& b) { return exp(b * log(a)); }

template <class T>
Dual<T> pow(double a, const Dual<T>& b) { return exp(b * log(Dual<T>(a))); }

template <class T>
std::ostream& operator<<(std::ostream& os, const Dual<T>& a) {
  return os << "(" << a.v << " + eps*" << a.d << ")";
}

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;

}  // namespace finsler::ad
