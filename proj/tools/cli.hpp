#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lacunary/asymptotics.hpp"
#include "lacunary/serialize.hpp"

namespace lacunary::cli {

enum ExitStatus : int { kOk = 0, kCheckFailed = 1, kUsageError = 2, kRegimeRefused = 3 };

struct RunConfig {
  std::string command;  // analyze, eval, exponent, spectrum, verify, bench
  std::string point;
  double s = 0.75;
  std::optional<std::uint64_t> N;
  std::optional<double> tol;
  std::size_t convergents = 12;

  double K = 8.0;
  std::size_t j_first = 4;
  std::size_t j_last = 10;
  double audit_fraction = 0.1;
  double quad_rel_tol = 1e-3;

  bool scale_rows = false;  // exponent: per-scale audit rows instead of the profile

  std::size_t grid = 11;
  std::vector<double> rates = {2.0, 8.0 / 3.0, 4.0};  // constructed points measured by `spectrum`
  std::size_t rate_j_first = 1;
  std::size_t rate_j_last = 8;
  std::uint64_t seed = 1;

  std::vector<std::string> checks;  // empty: all
  std::optional<double> check_tolerance;  // overrides each check's default tolerance

  std::vector<std::uint64_t> bench_N;
  std::vector<std::int64_t> bench_q;
  int bench_reps = 3;

  Calibration cal;
  unsigned threads = 0;  // 0 keeps LACUNARY_THREADS / hardware default
  std::string out;       // empty: the stream passed to run()
  Format format = Format::Json;
};

/// Every resolved field, for artifact headers.
AuditHeader audit_header(const RunConfig& cfg);

/// Executes one command and writes its artifact. Library errors map to
/// kUsageError (ParameterError) and kRegimeRefused (RegimeError).
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv (flags override a --config key = value file) and runs.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lacunary::cli
