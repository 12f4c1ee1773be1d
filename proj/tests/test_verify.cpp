#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "lacunary/errors.hpp"
#include "lacunary/verify.hpp"

using namespace lacunary;

namespace {

double constant(const CheckReport& r, const std::string& name) {
  for (const auto& [k, v] : r.constants) {
    if (k == name) return v;
  }
  ADD_FAILURE() << "no constant " << name;
  return NAN;
}

}  // namespace

TEST(Verify, NamesRoundTrip) {
  for (CheckId id : all_checks()) EXPECT_EQ(check_id_from_string(to_string(id)), id);
  EXPECT_THROW(check_id_from_string("Nope"), ParseError);
  EXPECT_EQ(all_checks().size(), 6u);
}

TEST(Verify, FittedSlope) {
  EXPECT_NEAR(fitted_slope({0, 1, 2, 3}, {1, -0.5, -2, -3.5}), -1.5, 1e-15);
  EXPECT_THROW(fitted_slope({1}, {2}), ParameterError);
  EXPECT_THROW(fitted_slope({1, 1}, {2, 3}), ParameterError);
}

TEST(Verify, PoissonIdentity) {
  const CheckReport r = run_check(CheckId::Poisson);
  EXPECT_TRUE(r.pass) << r.first_failure;
  EXPECT_EQ(r.samples.size(), 12u);
  EXPECT_LE(constant(r, "max_deviation"), 1e-8);
  EXPECT_LT(constant(r, "max_tail_bound"), 1e-10);
}

TEST(Verify, PoissonRefusesUnreducedFraction) {
  CheckGrid g = default_grid(CheckId::Poisson);
  g.fractions = {{2, 4}};
  try {
    run_check(CheckId::Poisson, g);
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("not reduced"), std::string::npos);
  }
}

TEST(Verify, SummationErrorExample) {
  CheckGrid g = default_grid(CheckId::SummationError);
  g.s = {1.0};
  g.fractions = {{1, 3}};
  const CheckReport r = run_check(CheckId::SummationError, g);
  EXPECT_TRUE(r.pass);
  ASSERT_EQ(r.constants.size(), 1u);
  EXPECT_LE(r.constants[0].second, -0.35);
}

TEST(Verify, SummationErrorRefusesSmallN) {
  CheckGrid g = default_grid(CheckId::SummationError);
  g.fractions = {{3, 8}};
  g.sizes = {2, 4, 8, 16};
  try {
    run_check(CheckId::SummationError, g);
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("N >= q"), std::string::npos);
  }
}

TEST(Verify, FailingCheckNamesFirstCell) {
  CheckGrid g = default_grid(CheckId::SummationError);
  g.s = {0.75};
  g.tolerance = -1.0;
  const CheckReport r = run_check(CheckId::SummationError, g);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.first_failure, "fit s=0.75 p/q=1/3 h=1e-12");
}

TEST(Verify, StationaryPhaseOrder) {
  const CheckReport r = run_check(CheckId::StationaryPhase);
  EXPECT_TRUE(r.pass);
  const double slope = constant(r, "slope[s=0.75]");
  EXPECT_GE(slope, -1.7);
  EXPECT_LE(slope, -1.3);
}

TEST(Verify, GAverageBoundedRatio) {
  const CheckReport r = run_check(CheckId::GL2Average);
  EXPECT_TRUE(r.pass) << r.first_failure;
  EXPECT_LE(r.constants.at(0).second, 20.0);
  EXPECT_GE(r.constants.at(0).second, 1.0);
  CheckGrid tight = default_grid(CheckId::GL2Average);
  tight.tolerance = 1.0 + 1e-9;
  tight.sizes = {std::ldexp(1.0, -8), std::ldexp(1.0, -14)};
  const CheckReport f = run_check(CheckId::GL2Average, tight);
  EXPECT_FALSE(f.pass);
  EXPECT_EQ(f.first_failure.rfind("spread", 0), 0u);
}

TEST(Verify, GAverageRefusesOutsideHypothesis) {
  CheckGrid g = default_grid(CheckId::GL2Average);
  g.sizes = {0.5, 0.25};
  EXPECT_THROW(run_check(CheckId::GL2Average, g), ParameterError);
  g = default_grid(CheckId::GL2Average);
  g.offsets = {2.0};
  EXPECT_THROW(run_check(CheckId::GL2Average, g), ParameterError);
}

TEST(Verify, FMainEnvelopeOneConstant) {
  CheckGrid g = default_grid(CheckId::FMainEnvelope);
  g.sizes = {std::ldexp(1.0, -6), std::ldexp(1.0, -9), std::ldexp(1.0, -12), std::ldexp(1.0, -15)};
  const CheckReport r = run_check(CheckId::FMainEnvelope, g);
  EXPECT_TRUE(r.pass) << r.first_failure;
  EXPECT_GT(constant(r, "ratio_min[|delta|<H/4]"), 0.0);
  EXPECT_GT(constant(r, "ratio_min[|delta|>4H]"), 0.0);
  EXPECT_LE(constant(r, "ratio_max[|delta|>4H]"), constant(r, "C"));
}

TEST(Verify, FMainEnvelopeRefusesMiddleBand) {
  CheckGrid g = default_grid(CheckId::FMainEnvelope);
  g.offsets = {1.0};
  EXPECT_THROW(run_check(CheckId::FMainEnvelope, g), ParameterError);
}

TEST(Verify, DivergenceWitness) {
  const CheckReport r = run_check(CheckId::DivergenceWitness);
  EXPECT_TRUE(r.pass) << r.first_failure;
  EXPECT_GE(constant(r, "longest_run"), 3.0);
  EXPECT_GE(constant(r, "smallest_witness_in_runs"), 0.5);
}

TEST(Verify, WitnessStaysSmallAtConvergentPoint) {
  CheckGrid g = default_grid(CheckId::DivergenceWitness);
  g.point = "quad:(0+1*sqrt(2))/1-1";
  g.s = {0.75};
  g.convergents = 20;
  const CheckReport r = run_check(CheckId::DivergenceWitness, g);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.first_failure.empty());
}

TEST(Verify, Deterministic) {
  for (CheckId id : {CheckId::Poisson, CheckId::StationaryPhase, CheckId::DivergenceWitness}) {
    const CheckReport a = run_check(id);
    const CheckReport b = run_check(id);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
      EXPECT_EQ(a.samples[i].cell, b.samples[i].cell);
      EXPECT_EQ(std::memcmp(&a.samples[i].value, &b.samples[i].value, sizeof(double)), 0);
    }
  }
}
