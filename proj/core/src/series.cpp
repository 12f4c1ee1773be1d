#include "lacunary/series.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/bernoulli.hpp>

#include "lacunary/errors.hpp"
#include "lacunary/parallel.hpp"

namespace lacunary {

namespace {

__extension__ using Int128 = __int128;

constexpr std::uint64_t kBlock = 4096;
constexpr std::int64_t kMaxDenominator = std::int64_t{1} << 62;

std::int64_t mod(std::int64_t a, std::int64_t q) {
  const std::int64_t r = a % q;
  return r < 0 ? r + q : r;
}

// Exact DD for |v| < 2^62.
DD exact_dd(std::int64_t v) {
  const double hi = static_cast<double>(v);
  const auto rest = static_cast<std::int64_t>(static_cast<Int128>(v) - static_cast<Int128>(hi));
  return eft::quick_two_sum(hi, static_cast<double>(rest));
}

struct Acc {
  Complex v;
  double abs = 0.0;
  Acc& operator+=(const Acc& o) {
    v += o.v;
    abs += o.abs;
    return *this;
  }
};

double rounding_bound(std::uint64_t count, double abs_sum) {
  const double eps = std::numeric_limits<double>::epsilon();
  return eps * (std::log2(static_cast<double>(count) + 1.0) + 8.0) * abs_sum;
}

PointDecomposition from_convergent(const Convergent& c) {
  PointDecomposition d;
  d.p = to_i64(c.p);
  d.q = to_i64(c.q);
  d.h = to_dd(c.h);
  d.j = c.index;
  return d;
}

}  // namespace

PointDecomposition make_decomposition(std::int64_t p, std::int64_t q, const DD& h) {
  if (q <= 0 || q >= kMaxDenominator) throw ParameterError("decomposition: q must lie in [1, 2^62)");
  PointDecomposition d;
  d.p = p;
  d.q = q;
  d.h = h;
  return d;
}

PointDecomposition decompose(const RealPoint& x, std::uint64_t max_q) {
  if (const auto r = x.as_rational()) {
    if (r->q >= kMaxDenominator) throw ParameterError("decompose: denominator exceeds 2^62");
    if (!fits_i64(r->p)) throw ParameterError("decompose: numerator exceeds 64 bits");
    return make_decomposition(to_i64(r->p), to_i64(r->q));
  }
  const BigInt limit = std::min<BigInt>(BigInt(max_q), BigInt(kMaxDenominator - 1));
  std::size_t count = 4;
  while (true) {
    const auto cs = convergents(x, count);
    std::size_t best = 0;
    for (std::size_t j = 0; j < cs.size(); ++j) {
      if (cs[j].q <= limit) best = j;
    }
    if (cs.back().q > limit || count >= 512) return from_convergent(cs[best]);
    count *= 2;
  }
}

PointDecomposition decompose_at(const RealPoint& x, std::size_t j) {
  const auto cs = convergents(x, j);
  if (cs.size() <= j) throw ParameterError("decompose_at: expansion terminates before index " + std::to_string(j));
  if (cs[j].q >= kMaxDenominator) throw ParameterError("decompose_at: q_j exceeds 2^62");
  return from_convergent(cs[j]);
}

PointDecomposition decompose_for(const RealPoint& x, std::uint64_t N) {
  auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(N)));
  while (root * root > N) --root;
  while ((root + 1) * (root + 1) <= N) ++root;
  return decompose(x, std::max<std::uint64_t>(root, 1));
}

DD reduce_phase(std::uint64_t n, const PointDecomposition& d) {
  DD rational;
  if (d.q > 1) {
    const Int128 q = d.q;
    const Int128 n2 = static_cast<Int128>(n % static_cast<std::uint64_t>(d.q)) *
                      static_cast<Int128>(n % static_cast<std::uint64_t>(d.q)) % q;
    const auto r = static_cast<std::int64_t>(n2 * mod(d.p, d.q) % q);
    rational = exact_dd(r) / exact_dd(d.q);
  }
  if (d.h.hi == 0.0) return rational;
  return dd_frac_part(rational + dd_frac_part(dd_square(n) * d.h));
}

ComplexValue weighted_sum(std::uint64_t n0, std::uint64_t n1, const PointDecomposition& d,
                          const std::function<double(std::uint64_t)>& weight) {
  if (n0 == 0) n0 = 1;
  if (n1 < n0) return {};
  const std::uint64_t count = n1 - n0 + 1;
  const std::uint64_t blocks = (count + kBlock - 1) / kBlock;
  std::vector<Acc> partial(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    const std::uint64_t lo = n0 + b * kBlock;
    const std::uint64_t hi = std::min(n1, lo + kBlock - 1);
    std::vector<Acc> terms;
    terms.reserve(hi - lo + 1);
    for (std::uint64_t n = lo; n <= hi; ++n) {
      const double w = weight(n);
      if (w == 0.0) continue;
      terms.push_back({w * expi_turns_dd(reduce_phase(n, d)), std::abs(w)});
    }
    partial[b] = tree_reduce(std::move(terms));
  });
  const Acc total = tree_reduce(std::move(partial));
  return {total.v, rounding_bound(count, total.abs)};
}

ComplexValue range_sum(double s, std::uint64_t n0, std::uint64_t n1, const PointDecomposition& d) {
  return weighted_sum(n0, n1, d, [s](std::uint64_t n) {
    return s == 0.0 ? 1.0 : std::pow(static_cast<double>(n), -s);
  });
}

ComplexValue partial_sum(double s, std::uint64_t N, const PointDecomposition& d) {
  return range_sum(s, 1, N, d);
}

ComplexValue partial_sum(double s, std::uint64_t N, const RealPoint& x) {
  return partial_sum(s, N, decompose_for(x, N));
}

ComplexValue dyadic_block(double s, std::uint64_t N, const PointDecomposition& d) {
  return range_sum(s, N + 1, 2 * N, d);
}

ComplexValue windowed_sum(double s, double N, const PointDecomposition& d, const Window& w) {
  if (!(N >= 1.0)) throw ParameterError("windowed_sum: N must be at least 1");
  const auto n0 = static_cast<std::uint64_t>(std::max(1.0, std::floor(w.support_lo() * N)));
  const auto n1 = static_cast<std::uint64_t>(std::ceil(w.support_hi() * N));
  return weighted_sum(n0, n1, d, [&](std::uint64_t n) {
    const double t = static_cast<double>(n) / N;
    const double v = window_eval(w, t);
    if (v == 0.0 || s == 0.0) return v;
    return v * std::pow(static_cast<double>(n), -s);
  });
}

ComplexValue e_window(double N, const PointDecomposition& d, const Window& w) {
  ComplexValue v = windowed_sum(0.0, N, d, w);
  v.value /= N;
  v.err /= N;
  return v;
}

ComplexValue rational_limit(double s, std::int64_t p, std::int64_t q) {
  require_supported_s(s);
  if (q <= 0) throw ParameterError("rational_limit: q must be positive");
  if (q % 4 != 2) throw RegimeError("diverges: F_s(p/q) needs q = 2 mod 4");
  if (q > (std::int64_t{1} << 24)) throw RegimeError("rational_limit: denominator too large for direct regularisation");
  constexpr std::int64_t kHead = 40;
  constexpr int kBernoulli = 8;
  const auto d = make_decomposition(p, q);
  const double qd = static_cast<double>(q);
  std::vector<Acc> terms(static_cast<std::size_t>(q));
  parallel_for(static_cast<std::size_t>(q), [&](std::size_t i) {
    const auto b = static_cast<std::int64_t>(i) + 1;
    double head = 0.0;
    for (std::int64_t k = kHead - 1; k >= 0; --k) head += std::pow(static_cast<double>(b + k * q), -s);
    const double a = static_cast<double>(b + kHead * q);
    double tail = s == 1.0 ? -std::log(a) / qd : -std::pow(a, 1.0 - s) / (qd * (1.0 - s));
    tail += 0.5 * std::pow(a, -s);
    double falling = -s;  // (-s)(-s-1)...(-s-m+1)
    double qm = qd;
    for (int j = 1; j <= kBernoulli; ++j) {
      const int m = 2 * j - 1;
      const double deriv = falling * qm * std::pow(a, -s - m);
      tail -= boost::math::bernoulli_b2n<double>(j) / std::tgamma(2.0 * j + 1.0) * deriv;
      falling *= (-s - m) * (-s - m - 1);
      qm *= qd * qd;
    }
    const Complex c = expi_turns_dd(reduce_phase(static_cast<std::uint64_t>(b), d));
    terms[i] = {c * (head + tail), std::abs(head) + std::abs(tail)};
  });
  const Acc total = tree_reduce(std::move(terms));
  return {total.v, 64.0 * std::numeric_limits<double>::epsilon() * total.abs};
}

}  // namespace lacunary
