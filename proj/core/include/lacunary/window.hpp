#pragma once

// Smooth cut-off functions.
//
//   S(u)  = int_0^u b / int_0^1 b,  b(v) = exp(-1/(v(1-v)))
//   eta(t) = S(2t-1) on [1/2,1], 1 - S(t-1) on [1,2], 0 elsewhere
//   psi(u) = 1 on (0,1/4], eta(4u) on [1/4,1/2], 0 elsewhere
//
// so that eta(t) + eta(2t) = 1 on [1/2,1] and psi(u) = sum_{k>=2} eta(2^k u).

#include <string>
#include <vector>

namespace lacunary {

enum class WindowKind {
  Eta,          // eta(t)
  PsiLeft,      // psi(t - 1)
  PsiRight,     // psi(2 - t)
  PsiTilde,     // 1_[1,2](t) - psi(t - 1) - psi(2 - t)
  Indicator12,  // 1_[1,2](t)
  Psi,          // psi(t)
  Ramp,         // 1 on (0,1], eta(t) on [1,2]: the smooth truncation profile
};

/// A window t -> t^{-weight} * base(t).
struct Window {
  WindowKind kind = WindowKind::Eta;
  double weight = 0.0;

  /// Closed support [lo, hi] of the base function.
  [[nodiscard]] double support_lo() const;
  [[nodiscard]] double support_hi() const;
  [[nodiscard]] bool smooth() const { return kind != WindowKind::Indicator12 && kind != WindowKind::PsiTilde; }
};

const char* to_string(WindowKind k);
WindowKind window_kind_from_string(const std::string& s);

double smooth_step(double u);
double eta(double t);
double psi(double u);

/// Value of the window at t.
double window_eval(const Window& w, double t);

/// Derivatives d^k/dt^k of the window at t for k = 0..order. Exact up to
/// rounding away from the finitely many joins of the piecewise definition.
std::vector<double> window_derivatives(const Window& w, double t, int order);

/// Derivatives of the smooth step, S^(k)(u) for k = 0..order.
std::vector<double> smooth_step_derivatives(double u, int order);

/// Upper bound on int |d^k/dt^k w(t)| dt over the support, from a fine scan.
double window_derivative_l1(const Window& w, int k);

}  // namespace lacunary
