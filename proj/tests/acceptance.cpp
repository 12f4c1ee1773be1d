// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "lacunary/asymptotics.hpp"
#include "lacunary/diophantine.hpp"
#include "lacunary/gauss.hpp"
#include "lacunary/local_l2.hpp"
#include "lacunary/series.hpp"
#include "lacunary/verify.hpp"

namespace {

using namespace lacunary;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const char* kGolden = "quad:(-1+1*sqrt(5))/2";
const char* kSqrt2m1 = "quad:(0+1*sqrt(2))/1-1";

Outcome gauss_laws() {
  const auto t0 = Clock::now();
  const double root2 = std::sqrt(2.0);
  double worst_max = 0.0;
  std::size_t tables = 0;
  for (std::int64_t q = 1; q <= 512; ++q) {
    for (const GaussTheta& g : gauss_theta_family(q)) {
      ++tables;
      double mx = 0.0;
      for (const Complex& t : g.table) mx = std::max(mx, std::abs(t));
      worst_max = std::max(worst_max, mx);
      if (mx > root2 + 1e-10) return {false, "max|theta| exceeds sqrt 2 at " + std::to_string(g.p) + "/" + std::to_string(q)};
      const double t0abs = std::abs(g.table[0]);
      const bool two_odd = q % 4 == 2;
      const bool zero = t0abs < 1e-10;
      if (zero != two_odd) return {false, "theta_0 vanishing law broken at " + std::to_string(g.p) + "/" + std::to_string(q)};
      if (!two_odd && (t0abs < 1.0 - 1e-10 || t0abs > root2 + 1e-10)) {
        return {false, "|theta_0| outside [1, sqrt 2] at " + std::to_string(g.p) + "/" + std::to_string(q)};
      }
    }
  }
  const double secs = seconds_since(t0);
  return {secs < 10.0, std::to_string(tables) + " tables, max|theta| " + fmt("%.12f", worst_max) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome check(CheckId id) {
  const CheckReport r = run_check(id);
  std::string detail;
  for (std::size_t i = 0; i < r.constants.size() && i < 3; ++i) {
    detail += (i ? ", " : "") + r.constants[i].first + " " + fmt("%.4g", r.constants[i].second);
  }
  if (!r.pass) detail += "; first failure: " + r.first_failure;
  return {r.pass, detail};
}

// Largest dyadic block |F_{2N} - F_N| over N = ceil(q_j/4) 2^k < q_{j+1}/4.
std::vector<double> window_magnitudes(const RealPoint& x, double s, std::uint64_t horizon) {
  const auto cs = convergents(x, 60);
  std::vector<double> out;
  for (std::size_t j = 2; j + 1 < cs.size(); ++j) {
    const double lo = std::ceil(static_cast<double>(to_i64(cs[j].q)) / 4.0);
    const double hi = static_cast<double>(to_i64(cs[j + 1].q)) / 4.0;
    if (2.0 * hi > static_cast<double>(horizon)) break;
    double w = 0.0;
    for (double N = lo; N < hi; N *= 2.0) {
      const auto n = static_cast<std::uint64_t>(N);
      w = std::max(w, std::abs(dyadic_block(s, n, decompose_for(x, 2 * n)).value));
    }
    out.push_back(w);
  }
  return out;
}

std::size_t longest_decreasing_run(const std::vector<double>& w) {
  std::size_t best = w.empty() ? 0 : 1, run = 1;
  for (std::size_t i = 1; i < w.size(); ++i) {
    run = w[i] < w[i - 1] ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

Outcome classification() {
  bool pass = true;
  std::string detail;
  for (const char* pt : {kGolden, kSqrt2m1}) {
    const RealPoint x = parse_point(pt);
    for (double s : {0.6, 0.8, 1.0}) {
      const ConvergenceVerdict v = classify_convergence(x, s);
      const std::size_t run = longest_decreasing_run(window_magnitudes(x, s, std::uint64_t{1} << 25));
      const bool ok = v.tag == Convergence::Converges && run >= 5;
      pass = pass && ok;
      detail += std::string(pt == kGolden ? "golden" : "sqrt2-1") + fmt(" s=%.1f", s) + " " + to_string(v.tag) +
                " run " + std::to_string(run) + "; ";
    }
  }
  const RealPoint r3 = construct_rate_point(3.0, 1);
  const ConvergenceVerdict v = classify_convergence(r3, 0.6);
  const CheckReport witness = run_check(CheckId::DivergenceWitness);
  pass = pass && v.tag == Convergence::Diverges && witness.pass;
  detail += std::string("r=3 s=0.6 ") + to_string(v.tag) + ", witness " + (witness.pass ? "held" : "failed");
  return {pass, detail};
}

Outcome exponent() {
  const auto t0 = Clock::now();
  const AlphaReport rep = estimate_alpha(parse_point(kSqrt2m1), 0.75);
  bool audits = true;
  for (const auto& sc : rep.scales) audits = audits && (!sc.used || sc.sample.audit_ok);
  const double secs = seconds_since(t0);
  const bool ok = std::abs(rep.measured.slope - 0.125) <= 0.15 && audits && secs < 300.0;
  return {ok, "slope " + fmt("%.4f", rep.measured.slope) + " over " + std::to_string(rep.measured.points_used) +
                  " scales, audits " + (audits ? "pass" : "fail") + ", " + fmt("%.2f", secs) + " s"};
}

Outcome spectrum() {
  double worst = 0.0;
  for (double s : {0.6, 0.75, 1.0}) {
    const double r_max = s < 1.0 ? 1.0 / (1.0 - s) : 1e6;
    for (int i = 0; i <= 200; ++i) {
      const double r = 2.0 * std::pow(r_max / 2.0, i / 200.0);
      const auto d = spectrum_point(s, predicted_alpha(s, r));
      if (!d) return {false, "spectrum_point empty at s=" + fmt("%g", s) + " r=" + fmt("%g", r)};
      worst = std::max(worst, std::abs(*d - 2.0 / r));
    }
  }
  bool pass = worst <= 1e-12;
  std::string detail = "formula error " + fmt("%.2e", worst);
  const double rates[] = {2.0, 8.0 / 3.0, 4.0};
  const double expect[] = {0.125, 0.0625, 0.0};
  AlphaPlan plan;
  plan.j_first = 1;
  plan.j_last = 8;
  for (int i = 0; i < 3; ++i) {
    const AlphaReport rep = measure_alpha(construct_rate_point(rates[i], 1), 0.75, plan);
    pass = pass && std::abs(rep.measured.slope - expect[i]) <= 0.15;
    detail += "; r=" + fmt("%.4g", rates[i]) + " alpha " + fmt("%.3f", rep.measured.slope);
  }
  return {pass, detail};
}

Outcome rational_lower_bound() {
  const double s = 0.75;
  const DifferenceModel model(s, 1, 3, DD());
  double lowest = INFINITY;
  for (int e = 10; e <= 20; ++e) {
    const double H = std::ldexp(1.0, -e);
    const DifferenceSample r = difference_mean(model, H);
    if (!r.audit_ok) return {false, "audit failed at H=2^-" + std::to_string(e)};
    lowest = std::min(lowest, r.mean * std::sqrt(3.0) * std::pow(H, (1.0 - s) / 2.0));
  }
  return {lowest > 0.2, "smallest normalised mean " + fmt("%.4f", lowest) + " (constant 0.2)"};
}

Outcome performance() {
  const std::uint64_t N = std::uint64_t{1} << 20;
  double worst_speedup = INFINITY;
  bool matched = true;
  for (std::int64_t q : {3, 31, 257, 1021}) {
    const DD h(0.25 / (static_cast<double>(N) * static_cast<double>(q)));
    const PointDecomposition d = make_decomposition(1, q, h);
    double t_direct = INFINITY, t_fast = INFINITY;
    ComplexValue direct;
    FastBlockResult fast;
    for (int rep = 0; rep < 3; ++rep) {
      auto t0 = Clock::now();
      direct = dyadic_block(0.75, N, d);
      t_direct = std::min(t_direct, seconds_since(t0));
      t0 = Clock::now();
      fast = fast_block(0.75, N, 1, q, h);
      t_fast = std::min(t_fast, seconds_since(t0));
    }
    matched = matched && std::abs(fast.value() - direct.value) <= fast.err_model;
    worst_speedup = std::min(worst_speedup, t_direct / t_fast);
  }
  return {worst_speedup >= 50.0 && matched,
          "smallest speedup " + fmt("%.0f", worst_speedup) + "x, accuracy " + (matched ? "within model" : "outside model")};
}

Outcome determinism() {
  const std::vector<std::vector<std::string>> runs = {
      {"analyze", "--point", kSqrt2m1, "--s", "0.75"},
      {"eval", "--point", "rat:1/2", "--s", "1", "--tol", "1e-6", "--format", "csv"},
      {"exponent", "--point", kSqrt2m1, "--s", "0.75", "--scale-rows"},
      {"spectrum", "--s", "0.75", "--grid", "6", "--format", "csv"},
      {"verify", "--check", "Poisson,StationaryPhase"}};
  for (const auto& args : runs) {
    std::string first;
    for (int k = 0; k < 2; ++k) {
      std::vector<const char*> argv = {"lacunary"};
      for (const auto& a : args) argv.push_back(a.c_str());
      std::ostringstream out, err;
      const int status = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
      if (status != 0) return {false, args[0] + " exited with " + std::to_string(status)};
      if (k == 0) first = out.str();
      else if (out.str() != first) return {false, args[0] + " artifacts differ"};
    }
  }
  return {true, std::to_string(runs.size()) + " commands, byte-identical artifacts"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Gauss-sum laws, q <= 512", gauss_laws},
      {"Poisson identity", [] { return check(CheckId::Poisson); }},
      {"summation-formula error order", [] { return check(CheckId::SummationError); }},
      {"stationary phase order", [] { return check(CheckId::StationaryPhase); }},
      {"convergence classification", classification},
      {"exponent at sqrt2-1, s=0.75", exponent},
      {"spectrum consistency", spectrum},
      {"G average", [] { return check(CheckId::GL2Average); }},
      {"f envelope", [] { return check(CheckId::FMainEnvelope); }},
      {"rational-centre lower bound", rational_lower_bound},
      {"fast_block performance", performance},
      {"determinism", determinism}};
  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
