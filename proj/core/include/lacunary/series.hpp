#pragma once

// Direct evaluation of F_{s,N}(x) = sum_{n<=N} e(n^2 x) n^{-s} and its
// windowed variants, with exact phase reduction.

#include <cstdint>
#include <functional>
#include <vector>

#include "lacunary/diophantine.hpp"
#include "lacunary/precision.hpp"
#include "lacunary/window.hpp"

namespace lacunary {

/// A complex value with a heuristic bound on its absolute error.
struct ComplexValue {
  Complex value;
  double err = 0.0;
};

/// x = p/q + h with p/q a convergent (or the rational itself).
struct PointDecomposition {
  std::int64_t p = 0;
  std::int64_t q = 1;
  DD h;
  std::size_t j = 0;

  [[nodiscard]] PointDecomposition shifted(const DD& dh) const { return {p, q, h + dh, j}; }
  /// -x, i.e. -p/q - h.
  [[nodiscard]] PointDecomposition negated() const { return {-p, q, -h, j}; }
};

PointDecomposition make_decomposition(std::int64_t p, std::int64_t q, const DD& h = DD());

/// Rationals decompose exactly; irrationals use the largest convergent
/// with q_j <= max_q (and q_j < 2^62).
PointDecomposition decompose(const RealPoint& x, std::uint64_t max_q);

/// Decomposition at convergent j.
PointDecomposition decompose_at(const RealPoint& x, std::size_t j);

/// Default decomposition for sums up to N: largest q_j <= sqrt(N).
PointDecomposition decompose_for(const RealPoint& x, std::uint64_t N);

/// n^2 x mod 1 in [0, 1) as a double-double (n < 2^53).
DD reduce_phase(std::uint64_t n, const PointDecomposition& d);

/// sum_{n=n0}^{n1} e(n^2 x) * weight(n); fixed 4096-term blocks with
/// pairwise reduction inside and across blocks.
ComplexValue weighted_sum(std::uint64_t n0, std::uint64_t n1, const PointDecomposition& d,
                          const std::function<double(std::uint64_t)>& weight);

ComplexValue partial_sum(double s, std::uint64_t N, const PointDecomposition& d);
ComplexValue partial_sum(double s, std::uint64_t N, const RealPoint& x);

/// sum_{n=n0}^{n1} e(n^2 x) n^{-s}.
ComplexValue range_sum(double s, std::uint64_t n0, std::uint64_t n1, const PointDecomposition& d);

/// F_{s,2N} - F_{s,N} by direct summation over n in (N, 2N].
ComplexValue dyadic_block(double s, std::uint64_t N, const PointDecomposition& d);

/// F^w_{s,N}(x) = sum_n e(n^2 x) n^{-s} w(n/N) over the support of w.
ComplexValue windowed_sum(double s, double N, const PointDecomposition& d, const Window& w);

/// E^w_N(x) = (1/N) sum_n e(n^2 x) w(n/N).
ComplexValue e_window(double N, const PointDecomposition& d, const Window& w);

struct LimitOptions {
  std::uint64_t max_terms = std::uint64_t{1} << 28;  // budget for the truncation point
  double tail_constant = 0.25;                        // C in the convergent-window tail bound
};

/// Bound C * sum_{j >= j0} (theta-term + log q_j q_j^{1/2-s} + q_{j+1}^{1/2-s}) on
/// sup_{M > N} |F_{s,M}(x) - F_{s,N}(x)| for N >= q_{j0}; one entry per j0.
struct TailPlan {
  std::vector<BigInt> q;       // q_j
  std::vector<double> bound;   // bound for N >= q_j (+inf when unknown)
};
TailPlan tail_plan(double s, const RealPoint& x, double tail_constant);

/// F_s(x) for points where the series converges. Rationals use the exact
/// regularised sum; irrationals truncate at the first q_j whose tail bound
/// is below tol/2. Throws RegimeError for divergent or boundary points and
/// when tol needs more than max_terms terms.
ComplexValue limit_value(double s, const RealPoint& x, double tol, const LimitOptions& opts = {});

/// Regularised value q^{-s} sum_b e(p b^2/q) zeta(s, b/q) for q = 2 mod 4.
ComplexValue rational_limit(double s, std::int64_t p, std::int64_t q);

}  // namespace lacunary
