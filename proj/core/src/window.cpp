#include "lacunary/window.hpp"

#include <array>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "lacunary/errors.hpp"
#include "lacunary/precision.hpp"

namespace lacunary {

namespace {

constexpr int kPanels = 128;
constexpr int kDegree = 24;
constexpr double kHalfWidth = 0.25 / kPanels;  // panels tile [0, 1/2]

double bump(double v) {
  if (v <= 0.0 || v >= 1.0) return 0.0;
  return std::exp(-1.0 / (v * (1.0 - v)));
}

double gl_integral(double a, double b) {
  using GL = boost::math::quadrature::gauss<double, 20>;
  return GL::integrate(bump, a, b);
}

struct StepTable {
  double z = 0.0;  // int_0^1 b
  std::array<std::array<double, kDegree + 1>, kPanels> coef{};

  StepTable() {
    std::array<double, kPanels + 1> cum{};
    for (int k = 0; k < kPanels; ++k) cum[k + 1] = cum[k] + gl_integral(k * 2 * kHalfWidth, (k + 1) * 2 * kHalfWidth);
    z = 2.0 * cum[kPanels];
    constexpr int n = kDegree + 1;
    for (int k = 0; k < kPanels; ++k) {
      const double a = k * 2 * kHalfWidth;
      const double mid = a + kHalfWidth;
      std::array<double, n> f{};
      for (int i = 0; i < n; ++i) {
        const double theta = kPi * (i + 0.5) / n;
        const double x = mid + kHalfWidth * std::cos(theta);
        f[i] = (cum[k] + gl_integral(a, x)) / z;
      }
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += f[i] * std::cos(j * kPi * (i + 0.5) / n);
        coef[k][j] = (j == 0 ? 1.0 : 2.0) * s / n;
      }
    }
  }

  // S on [0, 1/2].
  [[nodiscard]] double lower_half(double u) const {
    int k = static_cast<int>(u / (2 * kHalfWidth));
    if (k >= kPanels) k = kPanels - 1;
    const double x = (u - (k * 2 * kHalfWidth + kHalfWidth)) / kHalfWidth;
    const auto& c = coef[k];
    double b1 = 0.0, b2 = 0.0;
    for (int j = kDegree; j >= 1; --j) {
      const double t = 2.0 * x * b1 - b2 + c[j];
      b2 = b1;
      b1 = t;
    }
    return x * b1 - b2 + c[0];
  }
};

const StepTable& table() {
  static const StepTable t;
  return t;
}

// Taylor coefficients of b at v0 up to degree n: b(v0 + e) = sum c_k e^k.
std::vector<double> bump_taylor(double v0, int n) {
  std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
  if (v0 <= 0.0 || v0 >= 1.0) return c;
  const double d0 = v0 * (1.0 - v0);
  const double d1 = 1.0 - 2.0 * v0;
  constexpr double d2 = -1.0;
  std::vector<double> g(c.size());  // g = -1/d
  double r2 = 0.0, r1 = 1.0 / d0;
  g[0] = -r1;
  for (int k = 1; k <= n; ++k) {
    const double r = -(d1 * r1 + d2 * r2) / d0;
    g[static_cast<std::size_t>(k)] = -r;
    r2 = r1;
    r1 = r;
  }
  c[0] = std::exp(g[0]);
  if (c[0] == 0.0) return c;
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * g[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(k - j)];
    c[static_cast<std::size_t>(k)] = s / k;
  }
  for (auto& v : c) {
    if (!std::isfinite(v)) v = 0.0;
  }
  return c;
}

// Leibniz product of two derivative vectors.
std::vector<double> leibniz(const std::vector<double>& f, const std::vector<double>& g) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double binom = 1.0;
    for (std::size_t j = 0; j <= k; ++j) {
      out[k] += binom * f[j] * g[k - j];
      binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
    }
  }
  return out;
}

// Derivatives of u -> f(a*u + c) from derivatives of f.
std::vector<double> chain_affine(std::vector<double> d, double a) {
  double p = 1.0;
  for (auto& v : d) {
    v *= p;
    p *= a;
  }
  return d;
}

std::vector<double> eta_derivatives(double t, int order) {
  const auto n = static_cast<std::size_t>(order + 1);
  if (t <= 0.5 || t >= 2.0) return std::vector<double>(n, 0.0);
  if (t <= 1.0) return chain_affine(smooth_step_derivatives(2.0 * t - 1.0, order), 2.0);
  auto d = smooth_step_derivatives(t - 1.0, order);
  d[0] = 1.0 - d[0];
  for (std::size_t k = 1; k < n; ++k) d[k] = -d[k];
  return d;
}

std::vector<double> psi_derivatives(double u, int order) {
  const auto n = static_cast<std::size_t>(order + 1);
  std::vector<double> d(n, 0.0);
  if (u <= 0.0 || u >= 0.5) return d;
  if (u <= 0.25) {
    d[0] = 1.0;
    return d;
  }
  return chain_affine(eta_derivatives(4.0 * u, order), 4.0);
}

std::vector<double> base_derivatives(WindowKind kind, double t, int order) {
  const auto n = static_cast<std::size_t>(order + 1);
  switch (kind) {
    case WindowKind::Eta: return eta_derivatives(t, order);
    case WindowKind::Psi: return psi_derivatives(t, order);
    case WindowKind::PsiLeft: return psi_derivatives(t - 1.0, order);
    case WindowKind::PsiRight: return chain_affine(psi_derivatives(2.0 - t, order), -1.0);
    case WindowKind::Indicator12: {
      std::vector<double> d(n, 0.0);
      d[0] = (t >= 1.0 && t <= 2.0) ? 1.0 : 0.0;
      return d;
    }
    case WindowKind::PsiTilde: {
      std::vector<double> d(n, 0.0);
      if (t < 1.0 || t > 2.0) return d;
      const auto l = psi_derivatives(t - 1.0, order);
      const auto r = chain_affine(psi_derivatives(2.0 - t, order), -1.0);
      for (std::size_t k = 0; k < n; ++k) d[k] = -l[k] - r[k];
      d[0] += 1.0;
      return d;
    }
    case WindowKind::Ramp: {
      if (t > 1.0) return eta_derivatives(t, order);
      std::vector<double> d(n, 0.0);
      d[0] = t > 0.0 ? 1.0 : 0.0;
      return d;
    }
  }
  return std::vector<double>(n, 0.0);
}

}  // namespace

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  if (u <= 0.5) return table().lower_half(u);
  return 1.0 - table().lower_half(1.0 - u);
}

std::vector<double> smooth_step_derivatives(double u, int order) {
  std::vector<double> d(static_cast<std::size_t>(order + 1), 0.0);
  d[0] = smooth_step(u);
  if (order == 0 || u <= 0.0 || u >= 1.0) return d;
  const auto c = bump_taylor(u, order - 1);
  const double z = table().z;
  double fact = 1.0;
  for (int k = 1; k <= order; ++k) {
    d[static_cast<std::size_t>(k)] = fact * c[static_cast<std::size_t>(k - 1)] / z;
    fact *= k;
  }
  return d;
}

double eta(double t) {
  if (t <= 0.5 || t >= 2.0) return 0.0;
  if (t <= 1.0) return smooth_step(2.0 * t - 1.0);
  return 1.0 - smooth_step(t - 1.0);
}

double psi(double u) {
  if (u <= 0.0 || u >= 0.5) return 0.0;
  if (u <= 0.25) return 1.0;
  return eta(4.0 * u);
}

double Window::support_lo() const {
  switch (kind) {
    case WindowKind::Eta: return 0.5;
    case WindowKind::Psi:
    case WindowKind::Ramp: return 0.0;
    case WindowKind::PsiRight: return 1.5;
    default: return 1.0;
  }
}

double Window::support_hi() const {
  switch (kind) {
    case WindowKind::Psi: return 0.5;
    case WindowKind::PsiLeft: return 1.5;
    default: return 2.0;
  }
}

double window_eval(const Window& w, double t) {
  double v = 0.0;
  switch (w.kind) {
    case WindowKind::Eta: v = eta(t); break;
    case WindowKind::Psi: v = psi(t); break;
    case WindowKind::PsiLeft: v = psi(t - 1.0); break;
    case WindowKind::PsiRight: v = psi(2.0 - t); break;
    case WindowKind::Indicator12: v = (t >= 1.0 && t <= 2.0) ? 1.0 : 0.0; break;
    case WindowKind::PsiTilde:
      v = (t >= 1.0 && t <= 2.0) ? 1.0 - psi(t - 1.0) - psi(2.0 - t) : 0.0;
      break;
    case WindowKind::Ramp: v = t <= 0.0 ? 0.0 : (t <= 1.0 ? 1.0 : eta(t)); break;
  }
  if (w.weight != 0.0 && v != 0.0) v *= std::pow(t, -w.weight);
  return v;
}

std::vector<double> window_derivatives(const Window& w, double t, int order) {
  if (order < 0) throw ParameterError("window_derivatives: negative order");
  auto d = base_derivatives(w.kind, t, order);
  if (w.weight == 0.0 || t <= 0.0) return d;
  std::vector<double> p(d.size());
  double coef = 1.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] = coef * std::pow(t, -w.weight - static_cast<double>(k));
    coef *= -w.weight - static_cast<double>(k);
  }
  return leibniz(d, p);
}

double window_derivative_l1(const Window& w, int k) {
  const double lo = w.support_lo();
  const double hi = w.support_hi();
  if (!w.smooth() && k > 0) throw ParameterError("derivative norm of a discontinuous window");
  constexpr int kSteps = 20000;
  const double step = (hi - lo) / kSteps;
  double acc = 0.0;
  for (int i = 0; i < kSteps; ++i) {
    const double t = lo + (i + 0.5) * step;
    acc += std::abs(window_derivatives(w, t, k)[static_cast<std::size_t>(k)]);
  }
  return 1.05 * acc * step;
}

const char* to_string(WindowKind k) {
  switch (k) {
    case WindowKind::Eta: return "eta";
    case WindowKind::PsiLeft: return "psi_left";
    case WindowKind::PsiRight: return "psi_right";
    case WindowKind::PsiTilde: return "psi_tilde";
    case WindowKind::Indicator12: return "indicator12";
    case WindowKind::Psi: return "psi";
    case WindowKind::Ramp: return "ramp";
  }
  return "?";
}

WindowKind window_kind_from_string(const std::string& s) {
  for (auto k : {WindowKind::Eta, WindowKind::PsiLeft, WindowKind::PsiRight, WindowKind::PsiTilde,
                 WindowKind::Indicator12, WindowKind::Psi, WindowKind::Ramp}) {
    if (s == to_string(k)) return k;
  }
  throw ParameterError("unknown window '" + s + "'");
}

}  // namespace lacunary
