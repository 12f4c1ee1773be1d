#pragma once

// Extended-precision scalars used across the library.
//
//   BigInt   exact integers for continued-fraction recurrences
//   BigFloat ~166-bit binary floating point with a very wide exponent range,
//            used for offsets h = x - p/q that can underflow double
//   DD       double-double (unevaluated sum hi + lo), ~106-bit mantissa,
//            used on the hot paths where BigFloat is too slow

#include <cmath>
#include <complex>
#include <cstdint>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace lacunary {

using BigInt = boost::multiprecision::cpp_int;
using BigFloat = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<50>, boost::multiprecision::et_off>;

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 6.283185307179586476925286766559005768;

/// Double-double number. All arithmetic is error-free-transformation based
/// and requires strict IEEE evaluation (no -ffast-math, no FP contraction).
struct DD {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DD() = default;
  constexpr DD(double h) : hi(h), lo(0.0) {}  // NOLINT(google-explicit-constructor)
  constexpr DD(double h, double l) : hi(h), lo(l) {}

  [[nodiscard]] double to_double() const { return hi + lo; }
};

namespace eft {

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DD quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace eft

inline DD operator-(const DD& a) { return {-a.hi, -a.lo}; }

inline DD operator+(const DD& a, const DD& b) {
  DD s = eft::two_sum(a.hi, b.hi);
  DD t = eft::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = eft::quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return eft::quick_two_sum(s.hi, s.lo);
}

inline DD operator-(const DD& a, const DD& b) { return a + (-b); }

inline DD operator*(const DD& a, const DD& b) {
  DD p = eft::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return eft::quick_two_sum(p.hi, p.lo);
}

inline DD operator*(const DD& a, double b) {
  DD p = eft::two_prod(a.hi, b);
  p.lo += a.lo * b;
  return eft::quick_two_sum(p.hi, p.lo);
}

inline DD operator/(const DD& a, const DD& b) {
  const double q1 = a.hi / b.hi;
  DD r = a - b * q1;
  const double q2 = r.hi / b.hi;
  r = r - b * q2;
  const double q3 = r.hi / b.hi;
  DD q = eft::quick_two_sum(q1, q2);
  return q + DD(q3);
}

inline DD& operator+=(DD& a, const DD& b) { return a = a + b; }
inline DD& operator-=(DD& a, const DD& b) { return a = a - b; }
inline DD& operator*=(DD& a, const DD& b) { return a = a * b; }

inline bool operator<(const DD& a, const DD& b) {
  return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}

inline DD dd_floor(const DD& a) {
  double hi = std::floor(a.hi);
  double lo = 0.0;
  if (hi == a.hi) {
    lo = std::floor(a.lo);
    return eft::quick_two_sum(hi, lo);
  }
  return {hi, lo};
}

/// Fractional part in [0, 1), returned as a double (the extra bits are
/// only needed before the integer part is removed).
inline double dd_frac(const DD& a) {
  const DD f = a - dd_floor(a);
  double v = f.hi + f.lo;
  if (v >= 1.0) v -= 1.0;
  if (v < 0.0) v += 1.0;
  return v;
}

/// Exact n*n as a double-double (n < 2^53).
inline DD dd_square(std::uint64_t n) {
  const double d = static_cast<double>(n);
  return eft::two_prod(d, d);
}

/// Fractional part in [0, 1) keeping double-double precision.
inline DD dd_frac_part(const DD& a) {
  DD f = a - dd_floor(a);
  if (f.hi < 0.0) f += DD(1.0);
  if (!(f.hi < 1.0)) f -= DD(1.0);
  return f;
}

DD to_dd(const BigFloat& x);
BigFloat from_dd(const DD& x);

/// e^{2 pi i t} for a phase given in turns.
inline Complex expi_turns(double turns) {
  const double a = kTwoPi * turns;
  return {std::cos(a), std::sin(a)};
}

/// e^{2 pi i t} for a double-double phase of any size.
inline Complex expi_turns_dd(const DD& turns) {
  const DD f = dd_frac_part(turns);
  double t = f.hi + f.lo;
  if (t > 0.5) t -= 1.0;
  return expi_turns(t);
}

}  // namespace lacunary
