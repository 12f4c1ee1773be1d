#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lacunary/asymptotics.hpp"
#include "lacunary/errors.hpp"
#include "lacunary/parallel.hpp"
#include "lacunary/quadrature.hpp"

namespace lacunary {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
using GL = boost::math::quadrature::gauss<double, 7>;

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::uint64_t kAutoPanelLimit = 100;
constexpr std::uint64_t kPanelHardLimit = 50000000;
constexpr int kDeepIbp = 14;

// e(h t^2) with the phase formed in double-double.
Complex chirp(const DD& h, double t) { return expi_turns_dd(h * eft::two_prod(t, t)); }

// [t^{-sigma-1} e(h t^2) / (4 pi i h)]_a^b
Complex ibp_boundary(double sigma, const DD& h, double a, double b) {
  const Complex denom(0.0, 4.0 * kPi * h.to_double());
  return (std::pow(b, -sigma - 1.0) * chirp(h, b) - std::pow(a, -sigma - 1.0) * chirp(h, a)) / denom;
}

double power_integral(double sigma, double a, double b) {
  if (sigma == 1.0) return std::log(b / a);
  return (std::pow(a, 1.0 - sigma) - std::pow(b, 1.0 - sigma)) / (sigma - 1.0);
}

// Panel boundaries with h (t_{k+1}^2 - t_k^2) <= 1/8 and t_{k+1} <= 1.25 t_k.
std::vector<double> chirp_panels(double h, double a, double b) {
  std::vector<double> t{a};
  const double step = 1.0 / (8.0 * h);
  while (t.back() < b) {
    const double x = t.back();
    double next = std::min(std::sqrt(x * x + step), 1.25 * x);
    if (next >= b * (1.0 - 1e-15)) next = b;
    t.push_back(next);
  }
  return t;
}

ComplexValue panel_chirp_integral(double sigma, const DD& h, double a, double b) {
  const auto edges = chirp_panels(std::abs(h.to_double()), a, b);
  const std::size_t n = edges.size() - 1;
  if (n > kPanelHardLimit) throw RegimeError("oscillatory_integral: panel count exceeds the hard limit");
  std::vector<QuadResult> parts(n);
  parallel_for((n + 255) / 256, [&](std::size_t c) {
    const std::size_t hi = std::min(n, (c + 1) * 256);
    for (std::size_t i = c * 256; i < hi; ++i) {
      parts[i] = gauss_kronrod_panel(
          [&](double t) { return std::pow(t, -sigma) * chirp(h, t); }, edges[i], edges[i + 1]);
    }
  });
  const QuadResult r = tree_reduce(std::move(parts));
  return {r.value, r.err + 16.0 * kEps * r.abs * std::log2(static_cast<double>(n) + 2.0)};
}

ComplexValue positive_h(const OscIntegralSpec& spec) {
  const double s = spec.s;
  const DD& h = spec.h;
  const double hd = h.to_double();
  const std::uint64_t panels = panel_count(spec);
  const double sigma_max = s + 2.0 * kDeepIbp;
  const double t_star = std::clamp(std::sqrt(16.0 * (sigma_max + 1.0) / (4.0 * kPi * hd)), spec.a, spec.b);
  QuadMethod method = spec.method;
  if (method == QuadMethod::Auto && (t_star >= spec.b || panels <= kAutoPanelLimit)) {
    method = QuadMethod::PanelQuadrature;
  }
  if (method == QuadMethod::PanelQuadrature) return panel_chirp_integral(s, h, spec.a, spec.b);

  if (method == QuadMethod::IBPAsymptotic) {
    Complex value = ibp_boundary(s, h, spec.a, spec.b);
    const Complex c1 = Complex(s + 1.0) / Complex(0.0, 4.0 * kPi * hd);
    value += c1 * ibp_boundary(s + 2.0, h, spec.a, spec.b);
    const Complex c2 = c1 * Complex(s + 3.0) / Complex(0.0, 4.0 * kPi * hd);
    const double bound = std::abs(c2) * power_integral(s + 4.0, spec.a, spec.b);
    if (bound <= 1e-16 * std::abs(value) || panels > kPanelHardLimit) return {value, bound};
    const ComplexValue rem = panel_chirp_integral(s + 4.0, h, spec.a, spec.b);
    return {value + c2 * rem.value, std::abs(c2) * rem.err + 8.0 * kEps * std::abs(value)};
  }

  // Auto with many panels: panels up to t*, then deep integration by parts.
  ComplexValue out;
  if (t_star > spec.a) out = panel_chirp_integral(s, h, spec.a, t_star);
  if (t_star < spec.b) {
    Complex coef = 1.0;
    double sigma = s;
    for (int d = 0; d < kDeepIbp; ++d) {
      out.value += coef * ibp_boundary(sigma, h, t_star, spec.b);
      coef *= Complex(sigma + 1.0) / Complex(0.0, 4.0 * kPi * hd);
      sigma += 2.0;
    }
    out.err += std::abs(coef) * power_integral(sigma, t_star, spec.b) + 8.0 * kEps * std::abs(out.value);
  }
  return out;
}

}  // namespace

const char* to_string(QuadMethod m) {
  switch (m) {
    case QuadMethod::PanelQuadrature: return "panel";
    case QuadMethod::IBPAsymptotic: return "ibp";
    case QuadMethod::Auto: return "auto";
  }
  return "?";
}

QuadResult& QuadResult::operator+=(const QuadResult& o) {
  value += o.value;
  err += o.err;
  abs += o.abs;
  return *this;
}

QuadResult gauss_kronrod_panel(const std::function<Complex(double)>& f, double a, double b) {
  const auto& x = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = GL::weights();
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const Complex f0 = f(c);
  Complex k = wk[0] * f0;
  Complex g = wg[0] * f0;
  double abs = wk[0] * std::abs(f0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const Complex fp = f(c + r * x[i]);
    const Complex fm = f(c - r * x[i]);
    k += wk[i] * (fp + fm);
    abs += wk[i] * (std::abs(fp) + std::abs(fm));
    if (i % 2 == 0) g += wg[i / 2] * (fp + fm);
  }
  QuadResult out;
  out.value = k * r;
  out.abs = abs * std::abs(r);
  double err = std::abs((k - g) * r);
  if (out.abs > 0.0 && err > 0.0) err = out.abs * std::min(1.0, std::pow(200.0 * err / out.abs, 1.5));
  out.err = std::max(err, 50.0 * kEps * out.abs);
  return out;
}

std::uint64_t panel_count(const OscIntegralSpec& spec) {
  const double h = std::abs(spec.h.to_double());
  const double chirp_part = std::ceil(8.0 * h * (spec.b * spec.b - spec.a * spec.a));
  const double scale_part = std::ceil(std::log(spec.b / spec.a) / std::log(1.25));
  const double total = chirp_part + scale_part + 1.0;
  return total > 1e18 ? std::uint64_t{1} << 60 : static_cast<std::uint64_t>(total);
}

ComplexValue oscillatory_integral(const OscIntegralSpec& spec) {
  if (!(spec.a > 0.0)) throw ParameterError("oscillatory_integral: a must be positive");
  if (!(spec.b >= spec.a)) throw ParameterError("oscillatory_integral: b must be at least a");
  if (!std::isfinite(spec.b)) throw ParameterError("oscillatory_integral: b must be finite");
  if (spec.b == spec.a) return {};
  if (spec.h.hi == 0.0) {
    const double v = power_integral(spec.s, spec.a, spec.b);
    return {Complex(v, 0.0), 4.0 * kEps * std::abs(v)};
  }
  if (spec.h.hi < 0.0) {
    OscIntegralSpec flipped = spec;
    flipped.h = -spec.h;
    ComplexValue r = positive_h(flipped);
    r.value = std::conj(r.value);
    return r;
  }
  return positive_h(spec);
}

}  // namespace lacunary
