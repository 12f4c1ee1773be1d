#include "lacunary/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/integer/common_factor.hpp>
#include <boost/multiprecision/integer.hpp>

#include "lacunary/errors.hpp"

namespace lacunary {

namespace mp = boost::multiprecision;

bool fits_i64(const BigInt& v) {
  return v >= BigInt(std::numeric_limits<std::int64_t>::min()) &&
         v <= BigInt(std::numeric_limits<std::int64_t>::max());
}

std::int64_t to_i64(const BigInt& v) {
  if (!fits_i64(v)) throw ParameterError("integer does not fit in 64 bits");
  return v.convert_to<std::int64_t>();
}

double log_big(const BigInt& v) {
  if (v <= 0) throw ParameterError("log of non-positive integer");
  const std::size_t bits = mp::msb(v) + 1;
  if (bits <= 1000) return std::log(v.convert_to<double>());
  const std::size_t shift = bits - 64;
  const BigInt top = v >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

void require_supported_s(double s) {
  if (!(s > 0.5 && s <= 1.0)) throw ParameterError("unsupported-parameter: s must lie in (1/2, 1]");
}

BigFloat to_bigfloat(const BigInt& v) {
  if (v == 0) return BigFloat(0);
  const std::size_t bits = mp::msb(mp::abs(v)) + 1;
  if (bits <= 256) return BigFloat(v);
  const std::size_t shift = bits - 256;
  return mp::ldexp(BigFloat(BigInt(v >> shift)), static_cast<int>(shift));
}

namespace {

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  BigInt r = a - q * b;
  if (r != 0 && ((r < 0) != (b < 0))) q -= 1;
  return q;
}

BigInt gcd_big(BigInt a, BigInt b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    BigInt t = a % b;
    a = std::move(b);
    b = std::move(t);
  }
  return a;
}

bool is_square(const BigInt& d, BigInt* root) {
  if (d < 0) return false;
  BigInt r = mp::sqrt(d);
  if (r * r == d) {
    if (root) *root = r;
    return true;
  }
  return false;
}

RationalPoint rational_from_digits(const std::vector<BigInt>& digits) {
  BigInt p = 1, q = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    BigInt np = *it * p + q;
    q = p;
    p = np;
  }
  return {p, q};
}

std::string big_str(const BigInt& v) { return v.str(); }

}  // namespace

RealPoint RealPoint::rational(BigInt p, BigInt q) {
  if (q == 0) throw ParameterError("rational point with zero denominator");
  if (q < 0) {
    p = -p;
    q = -q;
  }
  const BigInt g = gcd_big(p, q);
  if (g > 1) {
    p /= g;
    q /= g;
  }
  return RealPoint(RationalPoint{std::move(p), std::move(q)});
}

RealPoint RealPoint::quadratic(BigInt a, BigInt b, BigInt d, BigInt c) {
  if (c == 0) throw ParameterError("quadratic point with zero denominator");
  if (d <= 0) throw ParameterError("quadratic point needs d > 0");
  BigInt root;
  if (b == 0) return rational(std::move(a), std::move(c));
  if (is_square(d, &root)) return rational(a + b * root, std::move(c));
  if (c < 0) {
    a = -a;
    b = -b;
    c = -c;
  }
  return RealPoint(QuadraticPoint{std::move(a), std::move(b), std::move(d), std::move(c)});
}

RealPoint RealPoint::explicit_cf(std::vector<BigInt> digits) {
  if (digits.empty()) throw ParameterError("empty continued fraction");
  for (std::size_t j = 1; j < digits.size(); ++j) {
    if (digits[j] < 1) throw ParameterError("partial quotients a_j (j >= 1) must be positive");
  }
  if (digits.size() > 1 && digits.back() == 1) {
    digits.pop_back();
    digits.back() += 1;
  }
  return RealPoint(ExplicitCfPoint{std::move(digits)});
}

RealPoint RealPoint::generated(double rate, std::int64_t seed) {
  if (!std::isfinite(rate) || rate < 2.0) {
    throw ParameterError("generated point needs a finite rate r >= 2");
  }
  return RealPoint(GeneratedCfPoint{rate, seed});
}

bool RealPoint::is_rational() const {
  return std::holds_alternative<RationalPoint>(v_) || std::holds_alternative<ExplicitCfPoint>(v_);
}

std::optional<RationalPoint> RealPoint::as_rational() const {
  if (const auto* r = std::get_if<RationalPoint>(&v_)) return *r;
  if (const auto* e = std::get_if<ExplicitCfPoint>(&v_)) return rational_from_digits(e->digits);
  return std::nullopt;
}

std::string RealPoint::to_string() const {
  std::ostringstream os;
  if (const auto* r = std::get_if<RationalPoint>(&v_)) {
    os << "rat:" << big_str(r->p) << '/' << big_str(r->q);
  } else if (const auto* qp = std::get_if<QuadraticPoint>(&v_)) {
    os << "quad:(" << big_str(qp->a) << (qp->b < 0 ? "-" : "+") << big_str(mp::abs(qp->b))
       << "*sqrt(" << big_str(qp->d) << "))/" << big_str(qp->c);
  } else if (const auto* e = std::get_if<ExplicitCfPoint>(&v_)) {
    os << "cf:[" << big_str(e->digits[0]);
    for (std::size_t j = 1; j < e->digits.size(); ++j) {
      os << (j == 1 ? ";" : ",") << big_str(e->digits[j]);
    }
    os << ']';
  } else {
    const auto& g = std::get<GeneratedCfPoint>(v_);
    os.precision(17);
    os << "rate:r=" << g.rate << ",seed=" << g.seed;
  }
  return os.str();
}

ParityClass parity_of(const BigInt& q) {
  const BigInt m = q % 4;
  return (m == 2 || m == -2) ? ParityClass::TwoOdd : ParityClass::NotTwoOdd;
}

const char* to_string(ParityClass c) { return c == ParityClass::TwoOdd ? "TwoOdd" : "NotTwoOdd"; }

const char* to_string(TailVerdict v) {
  switch (v) {
    case TailVerdict::Finite: return "Finite";
    case TailVerdict::Infinite: return "Infinite";
    default: return "Unknown";
  }
}

const char* to_string(Convergence c) {
  switch (c) {
    case Convergence::Converges: return "Converges";
    case Convergence::Diverges: return "Diverges";
    default: return "Boundary";
  }
}

double jarnik_dim(double rate) {
  if (std::isnan(rate) || rate < 2.0) throw ParameterError("jarnik_dim needs r >= 2");
  if (std::isinf(rate)) return 0.0;
  return 2.0 / rate;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::size_t kMaxDenominatorBits = std::size_t{1} << 26;

class DigitStream {
 public:
  explicit DigitStream(const RealPoint& x) {
    const auto& v = x.variant();
    if (const auto* e = std::get_if<ExplicitCfPoint>(&v)) {
      kind_ = Kind::Finite;
      finite_ = e->digits;
    } else if (const auto* r = std::get_if<RationalPoint>(&v)) {
      kind_ = Kind::Euclid;
      num_ = r->p;
      den_ = r->q;
    } else if (const auto* qp = std::get_if<QuadraticPoint>(&v)) {
      kind_ = Kind::Quadratic;
      const int sgn = qp->b < 0 ? -1 : 1;
      big_d_ = qp->b * qp->b * qp->d;
      pp_ = sgn * qp->a;
      qq_ = sgn * qp->c;
      BigInt rem = (big_d_ - pp_ * pp_) % qq_;
      if (rem != 0) {
        const BigInt aq = mp::abs(qq_);
        pp_ *= aq;
        big_d_ *= qq_ * qq_;
        qq_ *= aq;
      }
      sqrt_d_ = mp::sqrt(big_d_);
    } else {
      kind_ = Kind::Generated;
      const auto& g = std::get<GeneratedCfPoint>(v);
      rate_ = g.rate;
      seed_ = g.seed;
      const double e = rate_ - 2.0;
      integral_exp_ = std::abs(e - std::round(e)) < 1e-12;
    }
  }

  std::optional<BigInt> next() {
    switch (kind_) {
      case Kind::Finite:
        if (pos_ >= finite_.size()) return std::nullopt;
        return finite_[pos_++];
      case Kind::Euclid: {
        if (den_ == 0) return std::nullopt;
        BigInt a = floor_div(num_, den_);
        BigInt r = num_ - a * den_;
        num_ = den_;
        den_ = r;
        return a;
      }
      case Kind::Quadratic: {
        BigInt a = qq_ > 0 ? floor_div(pp_ + sqrt_d_, qq_)
                           : BigInt(-floor_div(pp_ + sqrt_d_, -qq_) - 1);
        BigInt np = a * qq_ - pp_;
        qq_ = (big_d_ - np * np) / qq_;
        pp_ = np;
        return a;
      }
      case Kind::Generated:
        return next_generated();
    }
    return std::nullopt;
  }

 private:
  enum class Kind { Finite, Euclid, Quadratic, Generated };

  BigInt rule_digit() const {
    if (q_cur_ <= 1) return BigInt(1);
    if (integral_exp_) {
      const auto e = static_cast<unsigned>(std::llround(rate_ - 2.0));
      return e == 0 ? BigInt(1) : BigInt(mp::pow(q_cur_, e));
    }
    BigFloat v = mp::pow(to_bigfloat(q_cur_), BigFloat(rate_ - 2.0));
    BigInt a = mp::ceil(v).convert_to<BigInt>();  // exact for the ~166 leading bits
    return a < 1 ? BigInt(1) : a;
  }

  std::optional<BigInt> next_generated() {
    BigInt a;
    if (pos_ == 0) {
      a = 0;
    } else if (pos_ == 1) {
      const std::uint64_t mix = splitmix64(static_cast<std::uint64_t>(seed_));
      // r_j - r decays like 1/log q_j, so slow rates start from a large q_1.
      a = rate_ < 2.5 ? BigInt((std::uint64_t{1} << 48) + mix % 65536) : BigInt(1 + mix % 4);
    } else {
      a = rule_digit();
    }
    if (pos_ >= 1) {
      BigInt qn = a * q_cur_ + q_prev_;
      if (parity_of(qn) == ParityClass::TwoOdd) {
        a += 1;
        qn += q_cur_;
      }
      if (mp::msb(qn) > kMaxDenominatorBits) {
        throw RegimeError("generated denominators exceed the supported size");
      }
      q_prev_ = q_cur_;
      q_cur_ = qn;
    }
    ++pos_;
    return a;
  }

  Kind kind_ = Kind::Finite;
  std::size_t pos_ = 0;
  std::vector<BigInt> finite_;
  BigInt num_, den_;
  BigInt pp_, qq_, big_d_, sqrt_d_;
  double rate_ = 2.0;
  std::int64_t seed_ = 0;
  bool integral_exp_ = true;
  BigInt q_prev_ = 0, q_cur_ = 1;
};

struct Expansion {
  std::vector<BigInt> a, p, q;
  bool terminated = false;
};

// Extends `e` to hold at least `count` digits (fewer if the expansion ends).
void extend(Expansion& e, DigitStream& ds, std::size_t count) {
  while (!e.terminated && e.a.size() < count) {
    auto d = ds.next();
    if (!d) {
      e.terminated = true;
      break;
    }
    const std::size_t j = e.a.size();
    const BigInt pm1 = j == 0 ? BigInt(1) : e.p[j - 1];
    const BigInt qm1 = j == 0 ? BigInt(0) : e.q[j - 1];
    const BigInt pm2 = j <= 1 ? BigInt(j == 0 ? 0 : 1) : e.p[j - 2];
    const BigInt qm2 = j <= 1 ? BigInt(j == 0 ? 1 : 0) : e.q[j - 2];
    e.p.push_back(*d * pm1 + pm2);
    e.q.push_back(*d * qm1 + qm2);
    e.a.push_back(std::move(*d));
  }
}

BigFloat ratio(const BigInt& num, const BigInt& den) { return to_bigfloat(num) / to_bigfloat(den); }

BigFloat quadratic_offset(const QuadraticPoint& x, const BigInt& p, const BigInt& q) {
  const BigInt big_a = q * x.a - x.c * p;
  const BigInt big_b = q * x.b;
  const BigFloat rd = mp::sqrt(BigFloat(x.d));
  const BigFloat denom = BigFloat(x.c) * BigFloat(q);
  if (big_a == 0 || (big_a > 0) == (big_b > 0)) {
    return (BigFloat(big_a) + BigFloat(big_b) * rd) / denom;
  }
  const BigInt norm = big_a * big_a - big_b * big_b * x.d;
  return BigFloat(norm) / ((BigFloat(big_a) - BigFloat(big_b) * rd) * denom);
}

constexpr std::size_t kExtraExactDigits = 64;
constexpr std::size_t kExactTailBits = 4096;

// Approximate digits following the exact prefix of a generated point. They
// only enter through 1/xi, so the parity bump can be ignored here.
std::vector<BigFloat> generated_tail(const Expansion& e, double rate) {
  std::vector<BigFloat> out;
  BigFloat qp = e.q.size() > 1 ? to_bigfloat(e.q[e.q.size() - 2]) : BigFloat(0);
  BigFloat q = to_bigfloat(e.q.back());
  for (int k = 0; k < 4; ++k) {
    BigFloat a = mp::ceil(mp::pow(q, BigFloat(rate - 2.0)));
    if (a < 1) a = 1;
    out.push_back(a);
    BigFloat qn = a * q + qp;
    qp = q;
    q = qn;
  }
  return out;
}

// h_j = (-1)^j / (q_j (xi_{j+1} q_j + q_{j-1})) with xi_{j+1} the complete quotient.
BigFloat generated_offset(const Expansion& e, std::size_t j, const std::vector<BigFloat>& tail) {
  BigFloat xi = tail.back();
  for (auto it = tail.rbegin() + 1; it != tail.rend(); ++it) xi = *it + 1 / xi;
  for (std::size_t k = e.a.size(); k-- > j + 1;) xi = to_bigfloat(e.a[k]) + 1 / xi;
  const BigFloat qj = to_bigfloat(e.q[j]);
  const BigFloat qm1 = j == 0 ? BigFloat(0) : to_bigfloat(e.q[j - 1]);
  BigFloat h = 1 / (qj * (xi * qj + qm1));
  return j % 2 == 0 ? h : BigFloat(-h);
}


}  // namespace

std::vector<BigInt> cf_digits(const RealPoint& x, std::size_t count) {
  DigitStream ds(x);
  Expansion e;
  extend(e, ds, count + 1);
  return e.a;
}

std::vector<Convergent> convergents(const RealPoint& x, std::size_t count) {
  DigitStream ds(x);
  Expansion e;
  extend(e, ds, count + 1);
  const auto rat = x.as_rational();
  const auto* quad = std::get_if<QuadraticPoint>(&x.variant());
  const double eps = std::ldexp(1.0, -150);
  std::vector<BigFloat> tail;
  if (const auto* g = std::get_if<GeneratedCfPoint>(&x.variant())) {
    std::size_t limit = e.a.size() + kExtraExactDigits;
    while (e.a.size() < limit && mp::msb(e.q.back()) < kExactTailBits) extend(e, ds, e.a.size() + 1);
    tail = generated_tail(e, g->rate);
  }

  std::vector<Convergent> out;
  const std::size_t n = std::min(e.a.size(), count + 1);
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    Convergent c;
    c.index = j;
    c.p = e.p[j];
    c.q = e.q[j];
    c.parity = parity_of(c.q);
    if (rat) {
      const BigInt num = rat->p * c.q - c.p * rat->q;
      c.h = num == 0 ? BigFloat(0) : ratio(num, rat->q * c.q);
      c.h_rel_error = num == 0 ? 0.0 : eps;
    } else if (quad) {
      c.h = quadratic_offset(*quad, c.p, c.q);
      c.h_rel_error = eps;
    } else {
      c.h = generated_offset(e, j, tail);
      c.h_rel_error = std::ldexp(1.0, -90);
    }
    if (c.h != 0 && c.q > 1) {
      const double lh = mp::log(mp::abs(c.h)).convert_to<double>();
      c.rate = -lh / log_big(c.q);
    }
    out.push_back(std::move(c));
  }
  return out;
}

RateEstimate approx_rate_odd(const RealPoint& x, std::size_t count) {
  if (x.is_rational()) throw ParameterError("rate undefined for rationals");
  const auto cs = convergents(x, count);
  RateEstimate est;
  double best = 0.0;
  for (const auto& c : cs) {
    if (c.parity != ParityClass::NotTwoOdd || !c.rate) continue;
    if (2 * c.index < count) continue;
    best = std::max(best, *c.rate);
    ++est.indices_used;
  }
  est.measured = best;
  est.value = best;
  const auto& v = x.variant();
  if (std::holds_alternative<QuadraticPoint>(v)) {
    est.exact = true;
    est.value = 2.0;
  } else if (const auto* g = std::get_if<GeneratedCfPoint>(&v)) {
    est.exact = true;
    est.value = g->rate;
  }
  return est;
}

SigmaResult sigma_s(const RealPoint& x, double s, std::size_t count) {
  require_supported_s(s);
  const auto cs = convergents(x, count);
  SigmaResult res;
  for (std::size_t j = 0; j + 1 < cs.size(); ++j) {
    if (cs[j].parity != ParityClass::NotTwoOdd) continue;
    const double lq = log_big(cs[j].q);
    const double lq1 = log_big(cs[j + 1].q);
    double term = 0.0;
    const double delta = s < 1.0 ? 1.0 : lq1 - lq;
    if (delta > 0.0) term = delta * std::exp(0.5 * (lq1 - s * (lq + lq1)));
    res.terms.push_back({j, term});
    res.partial_sum += term;
  }

  const auto& v = x.variant();
  if (x.is_rational()) {
    res.verdict = TailVerdict::Finite;
  } else if (std::holds_alternative<QuadraticPoint>(v)) {
    res.verdict = TailVerdict::Finite;
  } else if (const auto* g = std::get_if<GeneratedCfPoint>(&v)) {
    // Terms behave like q_j^{((1-s)r-1)/2} up to logarithms.
    const double expo = s < 1.0 ? ((1.0 - s) * g->rate - 1.0) / 2.0 : -1.0;
    if (expo < -1e-12) {
      res.verdict = TailVerdict::Finite;
    } else if (expo > 1e-12) {
      res.verdict = TailVerdict::Infinite;
    }
  }
  if (res.verdict == TailVerdict::Finite && res.terms.size() >= 2) {
    const double last = res.terms.back().value;
    const double prev = res.terms[res.terms.size() - 2].value;
    const double rho = prev > 0.0 ? last / prev : 0.0;
    res.tail_estimate = rho < 1.0 ? last * rho / (1.0 - rho) : last * 10.0;
  }
  return res;
}

namespace {

std::size_t default_depth(const RealPoint& x) {
  if (const auto* g = std::get_if<GeneratedCfPoint>(&x.variant())) {
    if (g->rate <= 2.0 + 1e-9) return 40;
    const double steps = 10.0 * std::log(2.0) / std::log(g->rate - 1.0);
    return std::clamp<std::size_t>(4 + static_cast<std::size_t>(steps), 8, 40);
  }
  return 40;
}

}  // namespace

ConvergenceVerdict classify_convergence(const RealPoint& x, double s, const ClassifyOptions& opts) {
  require_supported_s(s);
  ConvergenceVerdict out;
  if (const auto rat = x.as_rational()) {
    out.rate_used = std::numeric_limits<double>::infinity();
    if (parity_of(rat->q) == ParityClass::TwoOdd) {
      out.tag = Convergence::Converges;
      out.reason = "rational with q = 2 mod 4";
    } else {
      out.tag = Convergence::Diverges;
      out.reason = "rational with q != 2 mod 4";
    }
    return out;
  }

  const std::size_t depth = default_depth(x);
  const RateEstimate rate = approx_rate_odd(x, depth);
  const SigmaResult sig = sigma_s(x, s, depth);
  out.rate_used = rate.value;
  const double crit = s < 1.0 ? 1.0 / (1.0 - s) : std::numeric_limits<double>::infinity();
  const double tol = rate.exact ? opts.rate_tolerance : opts.measured_rate_tolerance;

  std::size_t large = 0;
  double largest = 0.0;
  const std::size_t n = sig.terms.size();
  for (std::size_t k = n > 2 * opts.min_witness_indices ? n - 2 * opts.min_witness_indices : 0; k < n;
       ++k) {
    largest = std::max(largest, sig.terms[k].value);
    if (sig.terms[k].value > opts.divergence_threshold) ++large;
  }

  if (sig.verdict == TailVerdict::Finite) {
    out.tag = Convergence::Converges;
    out.witness = sig.partial_sum;
    out.reason = "Sigma_s finite";
  } else if (rate.value < crit - tol) {
    out.tag = Convergence::Converges;
    out.witness = sig.partial_sum;
    out.reason = "r_odd below 1/(1-s)";
  } else if (sig.verdict == TailVerdict::Infinite ||
             (rate.value > crit + tol && large >= opts.min_witness_indices)) {
    out.tag = Convergence::Diverges;
    out.witness = largest;
    out.reason = "Sigma_s terms do not tend to zero";
  } else {
    out.tag = Convergence::Boundary;
    out.witness = sig.partial_sum;
    out.reason = "r_odd equals 1/(1-s) within tolerance";
  }
  return out;
}

RealPoint construct_rate_point(double rate, std::int64_t seed) { return RealPoint::generated(rate, seed); }

BigFloat RealPoint::value() const {
  if (const auto rat = as_rational()) return BigFloat(rat->p) / BigFloat(rat->q);
  if (const auto* qp = std::get_if<QuadraticPoint>(&v_)) {
    return (BigFloat(qp->a) + BigFloat(qp->b) * mp::sqrt(BigFloat(qp->d))) / BigFloat(qp->c);
  }
  const auto cs = convergents(*this, 12);
  const auto& last = cs.back();
  return ratio(last.p, last.q) + last.h;
}

}  // namespace lacunary
