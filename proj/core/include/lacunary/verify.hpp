#pragma once

// Scaling checks of the error terms behind the convergence and exponent
// results: each check evaluates a grid, fits or bounds the measured error
// and compares it with the stated order.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lacunary {

enum class CheckId { Poisson, SummationError, StationaryPhase, GL2Average, FMainEnvelope, DivergenceWitness };

const char* to_string(CheckId id);
/// Throws ParseError for unknown names.
CheckId check_id_from_string(const std::string& name);
std::vector<CheckId> all_checks();

/// Grid of a check. Field meaning per check:
///   Poisson            fractions, offsets = h, sizes = N; tolerance = max deviation
///   SummationError     s, fractions, offsets = h, sizes = N; tolerance = slope slack
///   StationaryPhase    s (window weight), sizes = R, xi = 3R; tolerance = slope slack
///   GL2Average         s, fractions, offsets = delta q / sqrt(H), sizes = H, cutoffs = N;
///                      tolerance = max/min cap
///   FMainEnvelope      s, offsets = delta / H, sizes = H, cutoffs = N; tolerance = C margin
///   DivergenceWitness  s, point, epsilon, convergent count; tolerance = lower constant
struct CheckGrid {
  std::vector<double> s;
  std::vector<std::pair<std::int64_t, std::int64_t>> fractions;
  std::vector<double> offsets;
  std::vector<double> sizes;
  std::vector<double> cutoffs;
  std::string point;
  double epsilon = 0.1;
  std::size_t convergents = 12;
  double tolerance = 0.0;
  double tail_target = 1e-10;                       // Poisson truncation
  std::uint64_t term_budget = std::uint64_t{1} << 28;  // direct sums
};

CheckGrid default_grid(CheckId id);

struct CheckSample {
  std::string cell;
  double x = 0.0;      // abscissa of the fit, or the grid coordinate
  double value = 0.0;  // measured quantity
  double bound = 0.0;  // threshold for per-cell comparisons, 0 when fit only
  bool ok = true;
};

struct CheckReport {
  CheckId id = CheckId::Poisson;
  std::string grid;
  std::string criterion;                                  // the order or bound tested
  std::vector<std::pair<std::string, double>> constants;  // fitted slopes, C, ratios
  double tolerance = 0.0;
  bool pass = false;
  std::string first_failure;  // empty when pass
  std::vector<CheckSample> samples;
};

/// Throws ParameterError naming the violated precondition when the grid
/// leaves the check's regime.
CheckReport run_check(CheckId id, const CheckGrid& grid);
CheckReport run_check(CheckId id);

/// Least-squares slope of y on x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace lacunary
