#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lacunary/errors.hpp"
#include "lacunary/gauss.hpp"
#include "lacunary/local_l2.hpp"

using namespace lacunary;

namespace {

const RealPoint kSqrt2m1 = parse_point("quad:(0+1*sqrt(2))/1-1");
const RealPoint kGolden = parse_point("quad:(-1+1*sqrt(5))/2");

Evaluator polynomial(int degree) {
  return [degree](double h) { return Complex(std::pow(h, degree), 0.0); };
}

double ball_by_annuli(const Evaluator& f, double H, int depth) {
  double acc = 0.0;
  for (int k = 1; k <= depth; ++k) {
    const double a = annulus_mean(f, std::ldexp(H, -k), {}).mean;
    acc += std::ldexp(2.0, -k) * a * a;
  }
  return std::sqrt(acc);
}

AnnulusProfile power_profile(double slope, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, noise);
  AnnulusProfile p;
  for (int k = 0; k < 20; ++k) {
    const double H = std::ldexp(1.0, -2 - k);
    const double factor = noise > 0.0 ? std::exp(gauss(rng)) : 1.0;
    p.samples.push_back({H, 1.7 * std::pow(H, slope) * factor, 64});
  }
  return p;
}

}  // namespace

TEST(AnnulusMean, ConstantAgainstItsValueIsZero) {
  const Complex c(0.3, -1.2);
  const auto r = annulus_mean([&](double) { return c; }, 1e-3, c);
  EXPECT_EQ(r.mean, 0.0);
  EXPECT_TRUE(r.converged);
}

TEST(AnnulusMean, LinearFunction) {
  for (double H : {1.0, 1e-3, 1e-9}) {
    const auto r = annulus_mean(polynomial(1), H, {});
    EXPECT_NEAR(r.mean / H, std::sqrt(7.0 / 3.0), 1e-12);
    EXPECT_EQ(r.n_quad, 128u);
  }
}

TEST(AnnulusMean, DecompositionPathMatchesDirectPhases) {
  const double s = 0.75;
  const std::uint64_t N = 1u << 10;
  const auto d = decompose_for(kSqrt2m1, N);
  const DD x = to_dd(kSqrt2m1.value());
  Evaluator direct = [&](double h) {
    const DD y = x + DD(h);
    Complex acc{};
    for (std::uint64_t n = N; n >= 1; --n) acc += std::pow(static_cast<double>(n), -s) * expi_turns(dd_frac(dd_square(n) * y));
    return acc;
  };
  const Complex centre = partial_sum(s, N, d).value;
  for (double H : {1e-4, 1e-6}) {
    const double fast = annulus_mean(series_evaluator(s, N, d), H, centre).mean;
    const double slow = annulus_mean(direct, H, centre).mean;
    EXPECT_NEAR(fast, slow, 1e-6);
  }
}

TEST(AnnulusMean, Preconditions) {
  EXPECT_THROW(annulus_mean(polynomial(1), 0.0, {}), ParameterError);
  EXPECT_THROW(annulus_mean(polynomial(1), -1.0, {}), ParameterError);
  EXPECT_THROW(annulus_mean(polynomial(1), 1.0, {}, QuadratureOptions{4, 1e-3, 64}), ParameterError);
}

TEST(BallMean, ConstantAndLinear) {
  EXPECT_EQ(ball_mean([](double) { return Complex(2.0, 1.0); }, 0.1, Complex(2.0, 1.0)).mean, 0.0);
  for (double H : {1.0, 1e-5}) EXPECT_NEAR(ball_mean(polynomial(1), H, {}).mean / H, std::sqrt(2.0 / 3.0), 1e-12);
}

TEST(BallMean, EqualsWeightedAnnuli) {
  const std::vector<Evaluator> fs = {
      polynomial(2),
      [](double h) { return Complex(std::sin(3.0 * h) + h, std::cos(h)); },
      [](double h) { return Complex(std::exp(h), h * h * h); },
      [](double h) { return std::exp(Complex(0.0, 40.0 * h)); },
  };
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const Complex centre = i == 3 ? Complex(1.0, 0.0) : Complex{};
    const double H = 1.0;
    auto shifted = [&](double h) { return fs[i](h); };
    const double ball = ball_mean(shifted, H, centre).mean;
    double acc = 0.0;
    for (int k = 1; k <= 40; ++k) {
      const double a = annulus_mean(shifted, std::ldexp(H, -k), centre).mean;
      acc += std::ldexp(2.0, -k) * a * a;
    }
    EXPECT_NEAR(ball * ball, acc, 1e-9) << "function " << i;
  }
  EXPECT_NEAR(ball_by_annuli(polynomial(2), 1.0, 40), ball_mean(polynomial(2), 1.0, {}).mean, 1e-9);
}

TEST(ExponentFit, ExactPowerLaw) {
  const ScalingFit fit = exponent_fit(power_profile(0.3, 0.0, 0));
  EXPECT_NEAR(fit.slope, 0.3, 1e-10);
  EXPECT_NEAR(fit.intercept, std::log(1.7), 1e-9);
  EXPECT_LT(fit.residual_rms, 1e-12);
  EXPECT_EQ(fit.points_used, 20u);
}

TEST(ExponentFit, NoisyDataWithinThreeStandardErrors) {
  for (std::uint64_t seed : {1u, 2u, 3u, 20241016u}) {
    const ScalingFit fit = exponent_fit(power_profile(0.25, 0.05, seed));
    EXPECT_GT(fit.slope_stderr, 0.0);
    EXPECT_LE(std::abs(fit.slope - 0.25), 3.0 * fit.slope_stderr) << "seed " << seed;
  }
}

TEST(ExponentFit, NeedsThreePositiveMeans) {
  AnnulusProfile p;
  p.samples = {{1e-2, 0.5, 64}, {1e-3, 0.4, 64}};
  EXPECT_THROW(exponent_fit(p), ParameterError);
  p.samples.push_back({1e-4, 0.0, 64});
  EXPECT_THROW(exponent_fit(p), ParameterError);
  p.samples.push_back({1e-5, 0.3, 64});
  const ScalingFit fit = exponent_fit(p);
  EXPECT_EQ(fit.points_used, 3u);
  EXPECT_EQ(fit.points_dropped, 1u);
}

TEST(Spectrum, Examples) {
  EXPECT_DOUBLE_EQ(*spectrum_point(0.75, 0.125), 1.0);
  EXPECT_DOUBLE_EQ(*spectrum_point(0.75, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(*spectrum_point(0.75, 0.0), jarnik_dim(4.0));
  EXPECT_FALSE(spectrum_point(0.75, 0.2).has_value());
  EXPECT_FALSE(spectrum_point(0.75, -0.01).has_value());
  EXPECT_THROW(spectrum_point(0.5, 0.0), ParameterError);
}

TEST(Spectrum, MatchesJarnikThroughTheRateMap) {
  for (double s : {0.6, 0.75, 0.9, 1.0}) {
    const double r_max = s < 1.0 ? 1.0 / (1.0 - s) : 1e6;
    for (int i = 0; i <= 50; ++i) {
      const double r = 2.0 + (r_max - 2.0) * i / 50.0;
      const auto d = spectrum_point(s, predicted_alpha(s, r));
      ASSERT_TRUE(d.has_value()) << s << " " << r;
      EXPECT_NEAR(*d, jarnik_dim(r), 1e-12);
    }
  }
  EXPECT_NEAR(*spectrum_point(1.0, predicted_alpha(1.0, INFINITY)), jarnik_dim(INFINITY), 1e-12);
}

TEST(DifferenceModel, TailCoefficientFollowsThetaTable) {
  const double s = 0.75;
  constexpr std::uint64_t kEnd = std::uint64_t{1} << 18;
  for (std::int64_t q : {3, 4, 6, 8, 12, 29, 40, 70}) {
    const std::int64_t p = q % 2 == 0 ? 1 : 2;
    const DifferenceModel model(s, p, q, DD());
    std::vector<double> norms(kEnd + 1);
    for (std::uint64_t m = 1; m <= kEnd; ++m) norms[m] = std::norm(gauss_theta_at(p, q, static_cast<std::int64_t>(m)));
    for (std::uint64_t M : {8u, 100u, 1000u}) {
      double direct = std::pow(static_cast<double>(kEnd) + 0.5, 1.0 - 2.0 * s) / (2.0 * s - 1.0);
      for (std::uint64_t m = kEnd; m > M; --m) direct += norms[m] * std::pow(static_cast<double>(m), -2.0 * s);
      EXPECT_NEAR(model.tail_coefficient(M), direct, 1e-6 * direct) << "q=" << q << " M=" << M;
    }
  }
}

TEST(DifferenceModel, CutoffModeMatchesWindowedSums) {
  const std::int64_t p = 12;
  const std::int64_t q = 29;
  const DD x = to_dd(kSqrt2m1.value());
  const DD delta = x - DD(static_cast<double>(p)) / DD(static_cast<double>(q));
  for (double s : {0.75, 1.0}) {
    const double N = 4096.0;
    const DifferenceModel model(s, p, q, delta, N);
    const std::uint64_t M = 600;
    model.prepare(M);
    const Window ramp{WindowKind::Ramp, 0.0};
    for (double h : {2.6e-5, -1.1e-5, 7e-5, -9e-5}) {
      const auto at = [&](double shift) {
        return windowed_sum(s, N, make_decomposition(p, q, delta + DD(shift)), ramp).value;
      };
      const Complex oracle = at(2.0 * h) - at(h);
      const Complex fast = model.value(h, M);
      const double smooth = std::pow(static_cast<double>(q), 2.5 - s) * 2.0 * std::abs(h);
      EXPECT_LE(std::abs(fast - oracle), smooth) << "s=" << s << " h=" << h;
      EXPECT_GT(std::abs(oracle), 10.0 * std::abs(fast - oracle));
    }
  }
}

TEST(DifferenceModel, RationalCentreApproachesClosedForm) {
  const double s = 0.75;
  const double nu = (1.0 - s) / 2.0;
  const double shell = std::sqrt((std::pow(2.0, 1.0 - 2.0 * nu) - 1.0) / (1.0 - 2.0 * nu));
  const double limit = std::abs(std::pow(2.0, -nu) - 1.0) * 0.5 * std::tgamma(nu) * std::pow(2.0 * M_PI, -nu) * shell;
  const DifferenceModel model(s, 1, 3, DD());
  double previous = INFINITY;
  for (int e = 10; e <= 22; e += 4) {
    const double H = std::ldexp(1.0, -e);
    const DifferenceSample r = difference_mean(model, H);
    EXPECT_TRUE(r.audit_ok) << "H=2^-" << e;
    const double normalised = r.mean * std::sqrt(3.0) * std::pow(H, (1.0 - s) / 2.0);
    EXPECT_GT(normalised, 0.2);
    EXPECT_LT(normalised, previous);
    previous = normalised;
  }
  EXPECT_NEAR(previous, limit, 0.03 * limit);
}

TEST(DifferenceModel, RejectsScalesCrossingTheCentre) {
  const DifferenceModel model(0.75, 12, 29, DD(1e-4));
  EXPECT_THROW(difference_mean(model, 1e-4), ParameterError);
  EXPECT_NO_THROW(difference_mean(model, 2.5e-5));
  EXPECT_THROW(DifferenceModel(0.75, 2, 4, DD()), ParameterError);
  EXPECT_THROW(DifferenceModel(0.4, 1, 3, DD()), ParameterError);
}

TEST(DifferenceModel, IndependentOfExpansionCentre) {
  const double s = 0.75;
  const auto cs = convergents(kSqrt2m1, 10);
  for (std::size_t j : {6u, 8u}) {
    const double H = std::abs(static_cast<double>(cs[j].h)) / 8.0;
    std::vector<double> means;
    for (std::size_t k : {j - 1, j - 2}) {
      const std::int64_t p = to_i64(cs[k].p);
      const std::int64_t q = to_i64(cs[k].q);
      const DifferenceModel model(s, p, q, to_dd(cs[k].h));
      const DifferenceSample r = difference_mean(model, H);
      ASSERT_TRUE(r.audit_ok) << "j=" << j << " k=" << k;
      means.push_back(r.mean);
    }
    EXPECT_NEAR(means[0], means[1], 0.05 * means[0]) << "j=" << j;
  }
}

TEST(EstimateAlpha, PredictedValues) {
  EXPECT_DOUBLE_EQ(predicted_alpha(0.75, 2.0), 0.125);
  EXPECT_DOUBLE_EQ(predicted_alpha(1.0, 2.0), 0.25);
  const AlphaReport golden = estimate_alpha(kGolden, 1.0);
  EXPECT_DOUBLE_EQ(golden.predicted, 0.25);
  EXPECT_NEAR(golden.measured.slope, 0.25, 0.15);
}

TEST(EstimateAlpha, QuadraticIrrationalSlope) {
  const AlphaReport r = estimate_alpha(kSqrt2m1, 0.75);
  EXPECT_DOUBLE_EQ(r.rate, 2.0);
  EXPECT_DOUBLE_EQ(r.predicted, 0.125);
  EXPECT_NEAR(r.measured.slope, 0.125, 0.15);
  EXPECT_GE(r.measured.points_used, 5u);
  for (const auto& sc : r.scales) {
    if (!sc.used) continue;
    EXPECT_TRUE(sc.sample.audit_ok);
    EXPECT_LE(sc.sample.audit, 0.1 * sc.sample.mean);
  }
  ASSERT_TRUE(r.profile.x.has_value());
  EXPECT_EQ(r.profile.samples.size(), r.measured.points_used + r.measured.points_dropped);
}

TEST(EstimateAlpha, RefusesOutsideConvergence) {
  try {
    estimate_alpha(parse_point("rate:r=3,seed=1"), 0.6);
    FAIL() << "expected RegimeError";
  } catch (const RegimeError& e) {
    EXPECT_NE(std::string(e.what()).find("diverges"), std::string::npos);
  }
  EXPECT_THROW(estimate_alpha(parse_point("rate:r=4,seed=1"), 0.75), RegimeError);
  EXPECT_THROW(estimate_alpha(parse_point("rat:1/3"), 0.75), RegimeError);
  EXPECT_THROW(measure_alpha(parse_point("rat:1/3"), 0.75), ParameterError);
}
