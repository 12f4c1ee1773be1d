#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lacunary/errors.hpp"
#include "lacunary/window.hpp"

using namespace lacunary;

namespace {

double bump(double v) { return (v <= 0.0 || v >= 1.0) ? 0.0 : std::exp(-1.0 / (v * (1.0 - v))); }

// Independent adaptive Gauss-Kronrod oracle for S.
double step_oracle(double u) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double z = GK::integrate(bump, 0.0, 1.0, 15, 1e-15);
  return GK::integrate(bump, 0.0, u, 15, 1e-15) / z;
}

}  // namespace

TEST(SmoothStep, MatchesQuadratureOracle) {
  for (double u = 0.0; u <= 1.0; u += 0.0137) EXPECT_NEAR(smooth_step(u), step_oracle(u), 1e-14) << u;
  EXPECT_EQ(smooth_step(-1.0), 0.0);
  EXPECT_EQ(smooth_step(2.0), 1.0);
  EXPECT_NEAR(smooth_step(0.5), 0.5, 1e-15);
}

TEST(SmoothStep, Monotone) {
  double prev = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double v = smooth_step(i / 10000.0);
    EXPECT_GE(v, prev - 1e-16);
    prev = v;
  }
}

TEST(Eta, Endpoints) {
  EXPECT_EQ(eta(0.5), 0.0);
  EXPECT_NEAR(eta(1.0), 1.0, 1e-15);
  EXPECT_EQ(eta(2.0), 0.0);
  EXPECT_EQ(eta(0.3), 0.0);
  EXPECT_EQ(eta(2.5), 0.0);
}

TEST(Eta, PartitionOfUnity) {
  for (int i = 0; i <= 1000; ++i) {
    const double t = 0.5 + 0.5 * i / 1000.0;
    EXPECT_NEAR(eta(t) + eta(2.0 * t), 1.0, 1e-12);
    const double s = 1.0 + i / 1000.0;
    EXPECT_NEAR(eta(s), 1.0 - eta(s / 2.0), 1e-12);
  }
}

TEST(Psi, DyadicSumDefinition) {
  for (int i = 1; i <= 1000; ++i) {
    const double u = 0.7 * i / 1000.0;
    double sum = 0.0;
    for (int k = 2; k < 60; ++k) sum += eta(std::ldexp(u, k));
    EXPECT_NEAR(psi(u), sum, 1e-12) << u;
  }
  EXPECT_EQ(psi(0.0), 0.0);
  EXPECT_EQ(psi(-0.1), 0.0);
}

TEST(Windows, LinearDecomposition) {
  const Window l{WindowKind::PsiLeft}, r{WindowKind::PsiRight}, t{WindowKind::PsiTilde}, ind{WindowKind::Indicator12};
  for (int i = 1; i < 1000; ++i) {
    const double x = 1.0 + i / 1000.0;
    EXPECT_NEAR(window_eval(l, x) + window_eval(r, x) + window_eval(t, x), window_eval(ind, x), 1e-12);
  }
  for (double x : {0.2, 0.99, 2.01, 3.0}) {
    EXPECT_EQ(window_eval(l, x) + window_eval(r, x) + window_eval(t, x), 0.0);
  }
}

TEST(Windows, SupportRespected) {
  for (auto k : {WindowKind::Eta, WindowKind::PsiLeft, WindowKind::PsiRight, WindowKind::PsiTilde,
                 WindowKind::Indicator12, WindowKind::Psi, WindowKind::Ramp}) {
    const Window w{k, 0.75};
    for (double t = -1.0; t < 4.0; t += 0.01) {
      if (t < w.support_lo() || t > w.support_hi()) EXPECT_EQ(window_eval(w, t), 0.0) << to_string(k) << ' ' << t;
    }
    EXPECT_EQ(window_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(window_kind_from_string("box"), ParameterError);
}

TEST(Windows, WeightExponent) {
  const Window w{WindowKind::Eta, 0.6};
  for (double t = 0.55; t < 2.0; t += 0.1) EXPECT_NEAR(window_eval(w, t), std::pow(t, -0.6) * eta(t), 1e-15);
}

TEST(Derivatives, BumpFirstDerivativeClosedForm) {
  // S'(u) = b(u)/Z and S''(u) = b(u)(1-2u)/(u(1-u))^2 / Z.
  for (double u : {0.1, 0.3, 0.5, 0.77}) {
    const auto d = smooth_step_derivatives(u, 2);
    const double ratio = d[2] / d[1];
    EXPECT_NEAR(ratio, (1 - 2 * u) / std::pow(u * (1 - u), 2), 1e-10);
  }
}

namespace {

// A k-th divided difference over [t - r, t + r] equals the k-th derivative
// at some interior point, so it must lie in the range of the jet there.
void expect_in_jet_range(const Window& w, double t, double r, int k, double fd, double noise) {
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i <= 400; ++i) {
    const double x = t - r + 2.0 * r * i / 400.0;
    const double v = window_derivatives(w, x, k)[static_cast<std::size_t>(k)];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double slack = 1e-3 * (hi - lo) + noise;
  EXPECT_GE(fd, lo - slack) << to_string(w.kind) << " k=" << k << " t=" << t;
  EXPECT_LE(fd, hi + slack) << to_string(w.kind) << " k=" << k << " t=" << t;
}

}  // namespace

TEST(Derivatives, MatchFiniteDifferences) {
  const double hs = 1e-3;
  for (auto k : {WindowKind::Eta, WindowKind::PsiLeft, WindowKind::PsiRight, WindowKind::Psi, WindowKind::Ramp}) {
    const Window w{k, 0.8};
    for (double t = w.support_lo() + 0.013; t < w.support_hi(); t += 0.071) {
      const auto d = window_derivatives(w, t, 3);
      EXPECT_NEAR(d[0], window_eval(w, t), 1e-14);
      auto f = [&](double x) { return window_eval(w, x); };
      const double f1 = (f(t + hs) - f(t - hs)) / (2 * hs);
      const double f2 = (f(t + hs) - 2 * f(t) + f(t - hs)) / (hs * hs);
      expect_in_jet_range(w, t, hs, 1, f1, 1e-12);
      expect_in_jet_range(w, t, hs, 2, f2, 1e-9);
      auto d2 = [&](double x) { return window_derivatives(w, x, 2)[2]; };
      const double f3 = (d2(t + hs) - d2(t - hs)) / (2 * hs);
      expect_in_jet_range(w, t, hs, 3, f3, 1e-9);
    }
  }
}

// Eighth differences of S at every panel join stay within the range of S^(8)
// over the stencil: no kinks from the piecewise representation.
TEST(Derivatives, EighthDifferencesAcrossPanelJoins) {
  const double hs = 0.004;
  const Window step{WindowKind::Eta};
  const double binom[9] = {1, -8, 28, -56, 70, -56, 28, -8, 1};
  for (int k = 1; k < 128; ++k) {
    const double u = k / 256.0;
    // eta(t) = S(2t - 1) on [1/2, 1]; sample through eta to reuse the jet helper.
    const double t = 0.5 * (u + 1.0);
    const double ht = hs / 2.0;
    double fd = 0.0;
    for (int i = 0; i <= 8; ++i) fd += binom[i] * eta(t + (4 - i) * ht);
    fd /= std::pow(ht, 8);
    if (t - 4 * ht <= 0.5 || t + 4 * ht >= 1.0) continue;
    expect_in_jet_range(step, t, 4 * ht, 8, fd, 256 * 1e-16 / std::pow(ht, 8));
  }
}

TEST(Derivatives, L1NormsFinite) {
  const Window w{WindowKind::Eta};
  EXPECT_NEAR(window_derivative_l1(w, 0), 1.05 * 0.75 + 0.0, 0.15);
  // Total variation of eta is 2.
  EXPECT_NEAR(window_derivative_l1(w, 1), 1.05 * 2.0, 1e-3);
  EXPECT_THROW(window_derivative_l1(Window{WindowKind::Indicator12}, 1), ParameterError);
}
