#pragma once

// Continued fractions, convergents and approximation rates of evaluation
// points, plus the convergence classification of F_s built on them.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lacunary/precision.hpp"

namespace lacunary {

struct RationalPoint {
  BigInt p;
  BigInt q;  // >= 1, gcd(p, q) = 1
};

/// (a + b*sqrt(d)) / c with d > 0 non-square, b != 0, c > 0.
struct QuadraticPoint {
  BigInt a;
  BigInt b;
  BigInt d;
  BigInt c;
};

/// A terminating expansion [a0; a1, ..., an] in canonical form.
struct ExplicitCfPoint {
  std::vector<BigInt> digits;
};

/// Point whose digits follow a deterministic rule. The only rule is
/// "rate": a_{j+1} = max(1, ceil(q_j^(r-2))), bumped by one whenever the
/// new denominator would be 2 mod 4. The seed fixes the leading digit a_1,
/// which is of order 2^48 when r < 2.5.
struct GeneratedCfPoint {
  double rate = 2.0;
  std::int64_t seed = 0;
};

/// An exactly specified evaluation point. Constructors normalise and
/// validate, so a RealPoint always satisfies the documented invariants.
class RealPoint {
 public:
  using Variant = std::variant<RationalPoint, QuadraticPoint, ExplicitCfPoint, GeneratedCfPoint>;

  static RealPoint rational(BigInt p, BigInt q);
  /// Quadratic (a + b*sqrt(d))/c; b == 0 or square d collapse to a rational.
  static RealPoint quadratic(BigInt a, BigInt b, BigInt d, BigInt c);
  static RealPoint explicit_cf(std::vector<BigInt> digits);
  static RealPoint generated(double rate, std::int64_t seed);

  [[nodiscard]] const Variant& variant() const { return v_; }
  [[nodiscard]] bool is_rational() const;
  /// The rational value when is_rational() (explicit expansions included).
  [[nodiscard]] std::optional<RationalPoint> as_rational() const;
  [[nodiscard]] std::string to_string() const;
  /// Numerical value to ~100 bits (exact digits are used, not a float CF).
  [[nodiscard]] BigFloat value() const;

 private:
  explicit RealPoint(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Parses "rat:p/q", "quad:(a+b*sqrt(d))/c[+-k]", "cf:[a0;a1,...]",
/// "rate:r=<real>,seed=<int>". Throws ParseError.
RealPoint parse_point(const std::string& text);

enum class ParityClass { TwoOdd, NotTwoOdd };

ParityClass parity_of(const BigInt& q);
const char* to_string(ParityClass c);

struct Convergent {
  std::size_t index = 0;
  BigInt p;
  BigInt q;
  BigFloat h;               // x - p/q
  double h_rel_error = 0.0; // bound on |computed h - h| / |h|
  std::optional<double> rate;  // log(1/|h|)/log q; empty when h = 0 or q = 1
  ParityClass parity = ParityClass::NotTwoOdd;
};

/// Partial quotients a_0..a_J (fewer for rationals).
std::vector<BigInt> cf_digits(const RealPoint& x, std::size_t count);

/// Convergents j = 0..J.
std::vector<Convergent> convergents(const RealPoint& x, std::size_t count);

struct RateEstimate {
  double value = 0.0;       // r_odd, exact when `exact`
  bool exact = false;
  double measured = 0.0;    // running max of r_j over the last half of indices
  std::size_t indices_used = 0;
};

/// r_odd(x). Throws ParameterError for rational points.
RateEstimate approx_rate_odd(const RealPoint& x, std::size_t count);

enum class TailVerdict { Finite, Infinite, Unknown };
const char* to_string(TailVerdict v);

struct SigmaTerm {
  std::size_t index = 0;
  double value = 0.0;  // +inf when the term overflows a double
};

struct SigmaResult {
  double partial_sum = 0.0;
  std::vector<SigmaTerm> terms;  // NotTwoOdd indices only
  TailVerdict verdict = TailVerdict::Unknown;
  double tail_estimate = 0.0;    // geometric tail bound when Finite
};

/// Partial sum of sum_{q_j not 2*odd} delta_j sqrt(q_{j+1} / (q_j q_{j+1})^s)
/// over j < J, with delta_j = log(q_{j+1}/q_j) at s = 1.
SigmaResult sigma_s(const RealPoint& x, double s, std::size_t count);

enum class Convergence { Converges, Diverges, Boundary };
const char* to_string(Convergence c);

struct ConvergenceVerdict {
  Convergence tag = Convergence::Boundary;
  double witness = 0.0;     // Sigma_s partial sum, or the largest tail term
  double rate_used = 0.0;   // r_odd, +inf when not applicable
  std::string reason;
};

struct ClassifyOptions {
  double divergence_threshold = 1e-3;
  std::size_t min_witness_indices = 3;
  double rate_tolerance = 1e-9;           // for exact rates
  double measured_rate_tolerance = 0.05;  // for estimated rates
};

ConvergenceVerdict classify_convergence(const RealPoint& x, double s,
                                        const ClassifyOptions& opts = {});

RealPoint construct_rate_point(double rate, std::int64_t seed);

/// Hausdorff dimension 2/r of {x : r_odd(x) = r}; r may be +inf.
double jarnik_dim(double rate);

/// Throws ParameterError unless 1/2 < s <= 1.
void require_supported_s(double s);

// Helpers shared with the numeric modules.
bool fits_i64(const BigInt& v);
std::int64_t to_i64(const BigInt& v);
double log_big(const BigInt& v);
BigFloat to_bigfloat(const BigInt& v);

}  // namespace lacunary
