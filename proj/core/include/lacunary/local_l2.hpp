#pragma once

// Local L^2 means over the annulus C(H) = [-2H,-H] u [H,2H] and the ball
// [-H,H], power-law fits of mean profiles, and the L^2-exponent estimator.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lacunary/diophantine.hpp"
#include "lacunary/precision.hpp"
#include "lacunary/series.hpp"

namespace lacunary {

/// h -> f(x + h) for a fixed base point x.
using Evaluator = std::function<Complex(double h)>;

/// F_{s,N}(x + h) through the decomposition of x (phase reduction mod q).
Evaluator series_evaluator(double s, std::uint64_t N, const PointDecomposition& d);

struct QuadratureOptions {
  std::size_t n0 = 64;         // nodes per annulus half
  double rel_tol = 1e-3;       // stop doubling when the mean moves less than this
  std::size_t n_max = 16384;
};

struct MeanResult {
  double mean = 0.0;
  std::size_t n_quad = 0;      // nodes per half at the accepted level
  bool converged = false;
};

/// (int_{C(H)} |f(x+h) - center|^2 dh / 2H)^{1/2}.
MeanResult annulus_mean(const Evaluator& f, double H, Complex center, const QuadratureOptions& opts = {});

/// ((1/H) int_{-H}^{H} |f(x+h) - center|^2 dh)^{1/2}.
MeanResult ball_mean(const Evaluator& f, double H, Complex center, const QuadratureOptions& opts = {});

struct ProfileSample {
  double H = 0.0;
  double mean = 0.0;
  std::size_t n_quad = 0;
};

struct AnnulusProfile {
  std::optional<RealPoint> x;
  double s = 1.0;
  Complex center_value;              // zero for difference profiles
  std::vector<ProfileSample> samples;  // H strictly decreasing
  std::string scale_plan;
};

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  double slope_stderr = 0.0;
  std::size_t points_used = 0;
  std::size_t points_dropped = 0;  // samples with zero mean
};

/// Least squares of log(mean) on log(H). Throws ParameterError with fewer
/// than three positive means.
ScalingFit exponent_fit(const AnnulusProfile& profile);

// ---------------------------------------------------------------------------
// Difference profiles f(h) = F_s(p/q + delta + 2h) - F_s(p/q + delta + h).
//
// Poisson summation mod q followed by stationary phase turns f into
//   theta_0/sqrt(q) [Phi(delta+2h) - Phi(delta+h)] + sum_{m>=1} [g_m(delta+2h) - g_m(delta+h)],
//   Phi(A) = int_0^inf t^{-s} e(A t^2) dt,
//   g_m(A) = theta_m m^{-s} (2qA)^{s-1/2} e^{i pi/4} e(-m^2/(4q^2 A)) (1 + O(q^2 A/m^2)),
// up to terms that are constant in h. The first M dual terms are sampled
// on the quadrature grid; the remaining ones oscillate too fast over C(H)
// to correlate and enter through their summed squared moduli.

class DifferenceModel {
 public:
  /// cutoff > 0 replaces F_s by the smoothly truncated sum
  /// sum_n n^{-s} ramp(n/cutoff) e(n^2 y) and keeps every dual term.
  DifferenceModel(double s, std::int64_t p, std::int64_t q, const DD& delta, double cutoff = 0.0);

  [[nodiscard]] double s() const { return s_; }
  [[nodiscard]] std::int64_t q() const { return q_; }
  [[nodiscard]] const DD& delta() const { return delta_; }

  /// Phase change of dual term m over one annulus half is at most m^2 * rate.
  [[nodiscard]] double cycle_rate(double H) const;
  /// Dual terms sampled explicitly at scale H.
  [[nodiscard]] std::uint64_t resolved_terms(double H, double cycles) const;

  /// theta_m(p) and theta_{-m}(p) for m = 1..M.
  void prepare(std::uint64_t M) const;
  /// f(h) from the theta_0 term and dual terms m <= M (prepare(M) first).
  [[nodiscard]] Complex value(double h, std::uint64_t M, double* remainder = nullptr) const;
  /// sum_{m > M} |theta_m|^2 m^{-2s}.
  [[nodiscard]] double tail_coefficient(std::uint64_t M) const;
  /// (2q|delta+2h|)^{2s-1} + (2q|delta+h|)^{2s-1}.
  [[nodiscard]] double tail_weight(double h) const;

 private:
  [[nodiscard]] Complex theta_term(double h) const;
  [[nodiscard]] Complex dual_sum(const DD& A, double shift, std::uint64_t M, double* remainder) const;

  double s_;
  std::int64_t p_;
  std::int64_t q_;
  DD delta_;
  double cutoff_;
  Complex theta0_;
  DD inv_;  // 1 / (4 q^2 delta) when delta != 0
  mutable std::vector<Complex> theta_pos_;
  mutable std::vector<Complex> theta_neg_;
};

struct DifferenceOptions {
  QuadratureOptions quad;
  double resolved_cycles = 128.0;        // phase budget for explicit dual terms
  std::uint64_t max_dual_terms = 1u << 16;
  double audit_fraction = 0.1;
};

struct DifferenceSample {
  double H = 0.0;
  double mean = 0.0;
  std::size_t n_quad = 0;
  bool converged = false;
  std::uint64_t dual_terms = 0;
  double tail_fraction = 0.0;  // share of mean^2 carried by the unresolved tail
  double audit = 0.0;          // estimated error of mean from neglected terms
  bool audit_ok = false;
};

/// ||f||_{L^2(mu~_H)} for the model's difference function. Requires
/// delta = 0 or |delta| >= 4H so that delta + h keeps its sign on C(H).
DifferenceSample difference_mean(const DifferenceModel& model, double H, const DifferenceOptions& opts = {});

struct AlphaPlan {
  double K = 8.0;                         // H_j = |h_j| / K
  std::size_t j_first = 4;
  std::size_t j_last = 10;
  std::int64_t q_max = std::int64_t{1} << 20;  // largest denominator used as expansion centre
  double max_theta_work = 2e8;            // budget for O(q) Gauss sums beyond the cached tables
  std::size_t max_centres = 4;            // expansion centres tried per scale before giving up
  DifferenceOptions diff;
};

struct ScaleRecord {
  std::size_t j = 0;
  double H = 0.0;
  std::size_t centre_index = 0;  // convergent k <= j the expansion is taken around
  std::int64_t centre_q = 0;
  DifferenceSample sample;
  bool used = false;
  std::string note;
};

struct AlphaReport {
  double predicted = 0.0;  // (s - 1 + 1/r_odd)/2
  double rate = 0.0;       // r_odd used for the prediction
  ScalingFit measured;
  AnnulusProfile profile;
  std::vector<ScaleRecord> scales;
};

/// Difference profile at H_j = |h_j|/K, j in the plan window, without the
/// convergence precondition. Scales that cannot be resolved or fail the
/// audit are recorded and left out of the profile.
AlphaReport measure_alpha(const RealPoint& x, double s, const AlphaPlan& plan = {});

/// measure_alpha for points where F_s converges; RegimeError otherwise.
AlphaReport estimate_alpha(const RealPoint& x, double s, const AlphaPlan& plan = {});

/// (s - 1 + 1/r)/2.
double predicted_alpha(double s, double rate);

/// 4 alpha + 2 - 2s on [0, s/2 - 1/4]; empty outside.
std::optional<double> spectrum_point(double s, double alpha);

}  // namespace lacunary
