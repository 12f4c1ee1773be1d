#pragma once

// Oscillatory integrals, stationary phase, the Gauss-sum tail G_{s,N} and
// the fast block formulas built from them.

#include <cstdint>

#include "lacunary/precision.hpp"
#include "lacunary/series.hpp"
#include "lacunary/window.hpp"

namespace lacunary {

enum class QuadMethod { PanelQuadrature, IBPAsymptotic, Auto };

const char* to_string(QuadMethod m);

/// int_a^b t^{-s} e(h t^2) dt with 0 < a <= b.
struct OscIntegralSpec {
  double s = 0.0;
  DD h;
  double a = 1.0;
  double b = 1.0;
  QuadMethod method = QuadMethod::Auto;
};

/// Panels needed so that the phase moves by at most pi/4 per panel.
std::uint64_t panel_count(const OscIntegralSpec& spec);

ComplexValue oscillatory_integral(const OscIntegralSpec& spec);

/// Fourier transform of w_R(t) = e(R t^2) w(t): int w(t) e(R t^2 - xi t) dt.
ComplexValue w_hat(double R, double xi, const Window& w);

/// Stationary-phase approximation e^{i pi/4} e^{-i pi xi^2/(2R)} w(xi/2R) / sqrt(2R).
Complex g_stationary(double R, double xi, const Window& w);

/// Number of terms floor(2 N h q) of G_{s,N}(h).
std::uint64_t big_g_terms(double N, std::int64_t q, const DD& h);

/// G_{s,N}(h) = (2hq)^{s-1/2} e^{i pi/4} sum_{m=1}^{floor(2Nhq)} theta_m m^{-s} e^{-i pi m^2/(2 q^2 h)}.
Complex big_g(double s, double N, std::int64_t p, std::int64_t q, const DD& h);

/// The same sum restricted to m0 < m <= m1.
Complex big_g_range(double s, std::uint64_t m0, std::uint64_t m1, std::int64_t p, std::int64_t q,
                    const DD& h);

/// Constants for the O(.) terms of the block formulas.
struct Calibration {
  double kappa = 10.0;         // fast_block: kappa N^{1/2-s} max(1, log q)
  double kappa_prime = 4.0;    // fast_diff: kappa' (q h)^{s-1/2}
  double q2h_threshold = 0.1;  // fast_diff regime q^2 h <= threshold
};

struct FastBlockResult {
  Complex main;         // theta_0/sqrt(q) int_N^{2N} e(h t^2) t^{-s} dt
  Complex tail;         // G_{s,2N}(h) - G_{s,N}(h)
  double err_model = 0.0;
  double quad_err = 0.0;
  std::uint64_t tail_terms = 0;

  [[nodiscard]] Complex value() const { return main + tail; }
};

/// F_{s,2N} - F_{s,N} at p/q + h for N >= q, |h| <= 1/q.
FastBlockResult fast_block(double s, std::uint64_t N, std::int64_t p, std::int64_t q, const DD& h,
                           const Calibration& cal = {});

/// F_{s,N}(p/q + 2h) - F_{s,N}(p/q + h) for h > 0, q^2 h <= threshold.
ComplexValue fast_diff(double s, double N, std::int64_t p, std::int64_t q, const DD& h,
                       const Calibration& cal = {});

/// f_{s,N}(h) = int_0^N (e(t^2 (delta + 2h)) - e(t^2 (delta + h))) t^{-s} dt.
ComplexValue f_main(double s, double N, double delta, double h);

}  // namespace lacunary
