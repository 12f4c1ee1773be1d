#include "lacunary/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "lacunary/errors.hpp"
#include "lacunary/gauss.hpp"
#include "lacunary/parallel.hpp"
#include "lacunary/quadrature.hpp"

namespace lacunary {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
const Complex kEighthTurn = expi_turns(0.125);  // e^{i pi/4}

DD exact_product(double a, double b) { return eft::two_prod(a, b); }

}  // namespace

ComplexValue w_hat(double R, double xi, const Window& w) {
  if (w.kind == WindowKind::Indicator12) throw ParameterError("w_hat: the window must be smooth");
  const double lo = w.support_lo();
  const double hi = w.support_hi();
  const double freq = std::max(std::abs(2.0 * R * lo - xi), std::abs(2.0 * R * hi - xi));
  const auto panels = static_cast<std::size_t>(std::max(256.0, std::ceil(8.0 * freq * (hi - lo))));
  const double width = (hi - lo) / static_cast<double>(panels);
  const DD r(R);
  auto integrand = [&](double t) {
    const double v = window_eval(w, t);
    if (v == 0.0) return Complex{};
    const DD phase = r * eft::two_prod(t, t) - eft::two_prod(xi, t);
    return v * expi_turns_dd(phase);
  };
  std::vector<QuadResult> parts(panels);
  parallel_for((panels + 255) / 256, [&](std::size_t c) {
    const std::size_t end = std::min(panels, (c + 1) * 256);
    for (std::size_t i = c * 256; i < end; ++i) {
      const double a = lo + static_cast<double>(i) * width;
      const double b = i + 1 == panels ? hi : a + width;
      parts[i] = gauss_kronrod_panel(integrand, a, b);
    }
  });
  const QuadResult total = tree_reduce(std::move(parts));
  return {total.value, total.err + 16.0 * kEps * total.abs * std::log2(static_cast<double>(panels))};
}

Complex g_stationary(double R, double xi, const Window& w) {
  if (!(R > 0.0)) throw ParameterError("g_stationary: R must be positive");
  const double v = window_eval(w, xi / (2.0 * R));
  if (v == 0.0) return {};
  const DD turns = -(exact_product(xi, xi) / DD(4.0 * R));
  return kEighthTurn * expi_turns_dd(turns) * (v / std::sqrt(2.0 * R));
}

std::uint64_t big_g_terms(double N, std::int64_t q, const DD& h) {
  if (h.hi <= 0.0) return 0;
  const DD bound = exact_product(2.0 * N, static_cast<double>(q)) * h;
  const DD fl = dd_floor(bound);
  const double v = fl.hi + fl.lo;
  if (v >= 9.0e18) throw RegimeError("big_g: term count overflows");
  return static_cast<std::uint64_t>(v);
}

Complex big_g_range(double s, std::uint64_t m0, std::uint64_t m1, std::int64_t p, std::int64_t q,
                    const DD& h) {
  if (!(h.hi > 0.0)) throw ParameterError("big_g: h must be positive");
  if (q <= 0 || std::gcd(p, q) != 1) throw ParameterError("big_g: p and q must be coprime with q > 0");
  if (m1 <= m0) return {};
  const auto theta = cached_gauss_theta(p, q);
  const double qd = static_cast<double>(q);
  const DD denom = exact_product(2.0 * qd, 2.0 * qd) * h;  // 4 q^2 h
  constexpr std::uint64_t kBlock = 4096;
  const std::uint64_t count = m1 - m0;
  const std::uint64_t blocks = (count + kBlock - 1) / kBlock;
  std::vector<Complex> partial(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    const std::uint64_t lo = m0 + 1 + b * kBlock;
    const std::uint64_t hi = std::min(m1, lo + kBlock - 1);
    std::vector<Complex> terms;
    terms.reserve(hi - lo + 1);
    for (std::uint64_t m = lo; m <= hi; ++m) {
      const DD turns = -(dd_square(m) / denom);
      const auto mi = static_cast<std::int64_t>(m % static_cast<std::uint64_t>(q));
      terms.push_back((*theta)[mi] * std::pow(static_cast<double>(m), -s) * expi_turns_dd(turns));
    }
    partial[b] = tree_reduce(std::move(terms));
  });
  const double prefactor = std::pow(2.0 * h.to_double() * qd, s - 0.5);
  return prefactor * kEighthTurn * tree_reduce(std::move(partial));
}

Complex big_g(double s, double N, std::int64_t p, std::int64_t q, const DD& h) {
  if (!(h.hi > 0.0)) throw ParameterError("big_g: h must be positive");
  return big_g_range(s, 0, big_g_terms(N, q, h), p, q, h);
}

FastBlockResult fast_block(double s, std::uint64_t N, std::int64_t p, std::int64_t q, const DD& h,
                           const Calibration& cal) {
  if (q <= 0 || std::gcd(p, q) != 1) throw ParameterError("fast_block: p and q must be coprime with q > 0");
  if (N < static_cast<std::uint64_t>(q)) throw ParameterError("fast_block: requires N >= q");
  if (std::abs(h.to_double()) * static_cast<double>(q) > 1.0 + 1e-12) {
    throw ParameterError("fast_block: requires |h| <= 1/q");
  }
  if (h.hi < 0.0) {
    FastBlockResult r = fast_block(s, N, -p, q, -h, cal);
    r.main = std::conj(r.main);
    r.tail = std::conj(r.tail);
    return r;
  }
  FastBlockResult out;
  const double Nd = static_cast<double>(N);
  const Complex theta0 = (*cached_gauss_theta(p, q))[0];
  if (std::abs(theta0) > 0.0) {
    const ComplexValue integral = oscillatory_integral({s, h, Nd, 2.0 * Nd, QuadMethod::Auto});
    const double scale = std::abs(theta0) / std::sqrt(static_cast<double>(q));
    out.main = theta0 / std::sqrt(static_cast<double>(q)) * integral.value;
    out.quad_err = scale * integral.err;
  }
  if (h.hi > 0.0) {
    const std::uint64_t m0 = big_g_terms(Nd, q, h);
    const std::uint64_t m1 = big_g_terms(2.0 * Nd, q, h);
    out.tail_terms = m1 - m0;
    out.tail = big_g_range(s, m0, m1, p, q, h);
  }
  out.err_model = cal.kappa * std::pow(Nd, 0.5 - s) * std::max(1.0, std::log(static_cast<double>(q)));
  return out;
}

ComplexValue f_main(double s, double N, double delta, double h) {
  if (!(N > 0.0)) throw ParameterError("f_main: N must be positive");
  if (h == 0.0) return {};
  const double A = delta + 2.0 * h;
  const double B = delta + h;
  const double top = std::max(std::abs(A), std::abs(B));
  const double eps = top > 0.0 ? std::min(N, std::sqrt(1.0 / (8.0 * top))) : N;

  // Taylor part on [0, eps]: sum_k (2 pi i)^k (A^k - B^k) eps^{2k+1-s} / (k! (2k+1-s)).
  Complex taylor{};
  Complex ipow(1.0, 0.0);
  double fact = 1.0;
  double max_term = 0.0;
  for (int k = 1; k <= 60; ++k) {
    ipow *= Complex(0.0, kTwoPi);
    fact *= k;
    double diff = 0.0;  // (A^k - B^k) / (A - B)
    for (int j = 0; j < k; ++j) diff += std::pow(A, k - 1 - j) * std::pow(B, j);
    const Complex term = ipow * (h * diff) * std::pow(eps, 2.0 * k + 1.0 - s) / (fact * (2.0 * k + 1.0 - s));
    taylor += term;
    max_term = std::max(max_term, std::abs(term));
    if (std::abs(term) < 1e-18 * std::max(1e-300, std::abs(taylor))) break;
  }
  ComplexValue out{taylor, 16.0 * kEps * max_term};
  if (eps < N) {
    const ComplexValue ia = oscillatory_integral({s, DD(A), eps, N, QuadMethod::Auto});
    const ComplexValue ib = oscillatory_integral({s, DD(B), eps, N, QuadMethod::Auto});
    out.value += ia.value - ib.value;
    out.err += ia.err + ib.err;
  }
  return out;
}

ComplexValue fast_diff(double s, double N, std::int64_t p, std::int64_t q, const DD& h,
                       const Calibration& cal) {
  if (!(h.hi > 0.0)) throw ParameterError("fast_diff: h must be positive");
  if (q <= 0 || std::gcd(p, q) != 1) throw ParameterError("fast_diff: p and q must be coprime with q > 0");
  const double qd = static_cast<double>(q);
  const double hd = h.to_double();
  if (qd * qd * hd > cal.q2h_threshold) {
    throw RegimeError("fast_diff: q^2 h exceeds the regime threshold");
  }
  const Complex theta0 = (*cached_gauss_theta(p, q))[0];
  ComplexValue out;
  if (std::abs(theta0) > 0.0) {
    const ComplexValue f = f_main(s, N, 0.0, hd);
    out.value = theta0 / std::sqrt(qd) * f.value;
    out.err = std::abs(theta0) / std::sqrt(qd) * f.err;
  }
  out.value += big_g(s, N, p, q, h * 2.0) - big_g(s, N, p, q, h);
  out.err += cal.kappa_prime * std::pow(qd * hd, s - 0.5);
  return out;
}

}  // namespace lacunary
