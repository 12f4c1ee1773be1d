#include "lacunary/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "lacunary/asymptotics.hpp"
#include "lacunary/diophantine.hpp"
#include "lacunary/errors.hpp"
#include "lacunary/gauss.hpp"
#include "lacunary/local_l2.hpp"
#include "lacunary/parallel.hpp"
#include "lacunary/series.hpp"
#include "lacunary/window.hpp"

namespace lacunary {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string frac(std::int64_t p, std::int64_t q) { return std::to_string(p) + "/" + std::to_string(q); }

std::string list(const std::vector<double>& v) {
  std::string out = "{";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + num(v[i]);
  return out + "}";
}

std::string list(const std::vector<std::pair<std::int64_t, std::int64_t>>& v) {
  std::string out = "{";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + frac(v[i].first, v[i].second);
  return out + "}";
}

void require(bool ok, CheckId id, const std::string& what) {
  if (!ok) throw ParameterError(std::string(to_string(id)) + ": " + what);
}

void require_nonempty(CheckId id, const std::vector<double>& v, const char* name) {
  require(!v.empty(), id, std::string("empty ") + name + " grid");
}

void require_fractions(CheckId id, const CheckGrid& g) {
  require(!g.fractions.empty(), id, "empty fraction grid");
  for (auto [p, q] : g.fractions) {
    require(q >= 1 && std::gcd(p, q) == 1, id, "fraction " + frac(p, q) + " is not reduced");
  }
}

void finish(CheckReport& r) {
  r.pass = true;
  for (const auto& smp : r.samples) {
    if (!smp.ok) {
      r.pass = false;
      r.first_failure = smp.cell;
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Poisson: E^eta_N(p/q + h) = sum_m theta_m / sqrt(q) w_hat(N^2 h, N m / q).

constexpr int kMaxDerivative = 12;

// sup_{1/2 <= t <= 2} |d^j/dt^j e(R t^2)| <= sum_i a_{j,i} 2^i, where the
// derivative is e(R t^2) P_j(t) with P_{j+1} = P_j' + 4 pi i R t P_j.
std::array<double, kMaxDerivative + 1> phase_derivative_bounds(double R) {
  std::array<double, kMaxDerivative + 1> out{};
  std::vector<double> a = {1.0};
  const double c = 4.0 * M_PI * std::abs(R);
  for (int j = 0; j <= kMaxDerivative; ++j) {
    double sup = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sup += a[i] * std::ldexp(1.0, static_cast<int>(i));
    out[static_cast<std::size_t>(j)] = sup;
    std::vector<double> next(a.size() + 1, 0.0);
    for (std::size_t i = 1; i < a.size(); ++i) next[i - 1] += static_cast<double>(i) * a[i];
    for (std::size_t i = 0; i < a.size(); ++i) next[i + 1] += c * a[i];
    a = std::move(next);
  }
  return out;
}

const std::array<double, kMaxDerivative + 1>& eta_derivative_l1() {
  static const auto table = [] {
    std::array<double, kMaxDerivative + 1> t{};
    const Window eta{WindowKind::Eta, 0.0};
    for (int k = 0; k <= kMaxDerivative; ++k) t[static_cast<std::size_t>(k)] = window_derivative_l1(eta, k);
    return t;
  }();
  return table;
}

// Bound on sum_{|m| > M} |theta_m| / sqrt(q) |w_hat(R, N m / q)| from
// |w_hat(R, xi)| <= ||(eta e(R t^2))^{(k)}||_1 / (2 pi |xi|)^k.
double poisson_tail(double R, double N, std::int64_t q, std::uint64_t M) {
  const auto& l1 = eta_derivative_l1();
  const auto dp = phase_derivative_bounds(R);
  const double qd = static_cast<double>(q);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 2; k <= kMaxDerivative; ++k) {
    double ck = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= k; ++j) {
      ck += binom * l1[static_cast<std::size_t>(k - j)] * dp[static_cast<std::size_t>(j)];
      binom = binom * (k - j) / (j + 1);
    }
    const double scale = qd / (2.0 * M_PI * N);
    const double sum_m = std::pow(static_cast<double>(M), 1.0 - k) / (k - 1);
    best = std::min(best, 2.0 * std::sqrt(2.0 / qd) * ck * std::pow(scale, k) * sum_m);
  }
  return best;
}

CheckReport check_poisson(const CheckGrid& g) {
  const CheckId id = CheckId::Poisson;
  require_fractions(id, g);
  require_nonempty(id, g.offsets, "offset");
  require_nonempty(id, g.sizes, "N");
  require(g.tolerance > 0.0, id, "tolerance must be positive");
  require(g.tail_target > 0.0, id, "tail target must be positive");
  CheckReport r;
  r.id = id;
  r.grid = "p/q in " + list(g.fractions) + ", h in " + list(g.offsets) + ", N in " + list(g.sizes) + ", window eta";
  r.criterion = "|E_N(p/q+h) - sum_{|m|<=M} theta_m/sqrt(q) w_hat(N^2 h, N m/q)| <= tol, certified tail < " +
                num(g.tail_target);
  r.tolerance = g.tolerance;
  const Window eta{WindowKind::Eta, 0.0};
  double worst = 0.0;
  double worst_tail = 0.0;
  std::uint64_t largest_m = 0;
  for (auto [p, q] : g.fractions) {
    const auto theta = cached_gauss_theta(p, q);
    for (double h : g.offsets) {
      for (double N : g.sizes) {
        require(N >= 1.0, id, "N must be at least 1");
        const double R = N * N * h;
        std::uint64_t M = 1;
        while (poisson_tail(R, N, q, M) >= g.tail_target) {
          require(M < (std::uint64_t{1} << 20), id, "tail target not reachable with |m| <= 2^20");
          M *= 2;
        }
        std::uint64_t lo = M / 2;
        while (lo + 1 < M) {
          const std::uint64_t mid = lo + (M - lo) / 2;
          (poisson_tail(R, N, q, mid) < g.tail_target ? M : lo) = mid;
        }
        const double tail = poisson_tail(R, N, q, M);
        const std::size_t count = 2 * M + 1;
        std::vector<Complex> terms(count);
        parallel_for(count, [&](std::size_t i) {
          const auto m = static_cast<std::int64_t>(i) - static_cast<std::int64_t>(M);
          const double xi = N * static_cast<double>(m) / static_cast<double>(q);
          terms[i] = (*theta)[m] / std::sqrt(static_cast<double>(q)) * w_hat(R, xi, eta).value;
        });
        const Complex rhs = tree_reduce(terms);
        const Complex lhs = e_window(N, make_decomposition(p, q, DD(h)), eta).value;
        const double dev = std::abs(lhs - rhs);
        worst = std::max(worst, dev);
        worst_tail = std::max(worst_tail, tail);
        largest_m = std::max(largest_m, M);
        r.samples.push_back({"p/q=" + frac(p, q) + " h=" + num(h) + " N=" + num(N) + " M=" + std::to_string(M) +
                                 " tail=" + num(tail),
                             h, dev, g.tolerance, dev <= g.tolerance && tail < g.tail_target});
      }
    }
  }
  r.constants = {{"max_deviation", worst}, {"max_tail_bound", worst_tail}, {"max_M", static_cast<double>(largest_m)}};
  finish(r);
  return r;
}

// ---------------------------------------------------------------------------

CheckReport check_summation(const CheckGrid& g) {
  const CheckId id = CheckId::SummationError;
  require_nonempty(id, g.s, "s");
  require_fractions(id, g);
  require_nonempty(id, g.offsets, "offset");
  require(g.sizes.size() >= 3, id, "need at least three N values");
  CheckReport r;
  r.id = id;
  r.grid = "s in " + list(g.s) + ", p/q in " + list(g.fractions) + ", h in " + list(g.offsets) + ", N in " +
           list(g.sizes);
  r.criterion = "slope of log|dyadic_block - fast_block| in log N <= 1/2 - s + tol";
  r.tolerance = g.tolerance;
  for (double s : g.s) {
    require_supported_s(s);
    for (auto [p, q] : g.fractions) {
      for (double h : g.offsets) {
        require(std::abs(h) <= 1.0 / static_cast<double>(q), id, "needs |h| <= 1/q at " + frac(p, q));
        std::vector<double> lx;
        std::vector<double> ly;
        const std::string tag = "s=" + num(s) + " p/q=" + frac(p, q) + " h=" + num(h);
        for (double Nd : g.sizes) {
          require(Nd >= static_cast<double>(q), id, "needs N >= q, violated at " + tag + " N=" + num(Nd));
          const auto N = static_cast<std::uint64_t>(Nd);
          const auto fb = fast_block(s, N, p, q, DD(h));
          const auto direct = dyadic_block(s, N, make_decomposition(p, q, DD(h)));
          const double err = std::max(std::abs(fb.value() - direct.value), std::numeric_limits<double>::min());
          lx.push_back(std::log(Nd));
          ly.push_back(std::log(err));
          r.samples.push_back({tag + " N=" + num(Nd), std::log(Nd), err, 0.0, true});
        }
        const double slope = fitted_slope(lx, ly);
        const double limit = 0.5 - s + g.tolerance;
        r.constants.emplace_back("slope[" + tag + "]", slope);
        r.samples.push_back({"fit " + tag, 0.0, slope, limit, slope <= limit});
      }
    }
  }
  finish(r);
  return r;
}

CheckReport check_stationary(const CheckGrid& g) {
  const CheckId id = CheckId::StationaryPhase;
  require_nonempty(id, g.s, "weight");
  require(g.sizes.size() >= 3, id, "need at least three R values");
  CheckReport r;
  r.id = id;
  r.grid = "window t^{-s} eta(t), s in " + list(g.s) + ", R in " + list(g.sizes) + ", xi = 3R";
  r.criterion = "slope of log|w_hat - g_stationary| in log R within -3/2 +- tol";
  r.tolerance = g.tolerance;
  for (double s : g.s) {
    const Window w{WindowKind::Eta, s};
    std::vector<double> lx;
    std::vector<double> ly;
    for (double R : g.sizes) {
      require(R > 0.0, id, "R must be positive");
      const double err = std::abs(w_hat(R, 3.0 * R, w).value - g_stationary(R, 3.0 * R, w));
      lx.push_back(std::log(R));
      ly.push_back(std::log(std::max(err, std::numeric_limits<double>::min())));
      r.samples.push_back({"s=" + num(s) + " R=" + num(R), std::log(R), err, 0.0, true});
    }
    const double slope = fitted_slope(lx, ly);
    r.constants.emplace_back("slope[s=" + num(s) + "]", slope);
    r.samples.push_back({"fit s=" + num(s), 0.0, slope, -1.5 + g.tolerance,
                         slope <= -1.5 + g.tolerance && slope >= -1.5 - g.tolerance});
  }
  finish(r);
  return r;
}

// ---------------------------------------------------------------------------

QuadratureOptions oscillation_grid(double cycles) {
  QuadratureOptions o;
  while (static_cast<double>(o.n0) < 8.0 * cycles && o.n0 < (std::size_t{1} << 16)) o.n0 *= 2;
  o.n_max = std::max<std::size_t>(o.n_max, 4 * o.n0);
  return o;
}

CheckReport check_gl2(const CheckGrid& g) {
  const CheckId id = CheckId::GL2Average;
  require_nonempty(id, g.s, "s");
  require_fractions(id, g);
  require_nonempty(id, g.offsets, "offset");
  require(g.sizes.size() >= 2, id, "need at least two H values");
  require_nonempty(id, g.cutoffs, "N sqrt(H)");
  require(g.tolerance > 1.0, id, "ratio cap must exceed 1");
  CheckReport r;
  r.id = id;
  r.grid = "s in " + list(g.s) + ", p/q in " + list(g.fractions) + ", delta = c sqrt(H)/q with c in " +
           list(g.offsets) + ", H in " + list(g.sizes) + ", N = k/sqrt(H) with k in " + list(g.cutoffs);
  r.criterion = "max/min over H of ||G_{s,N}(delta+.)||_{L2(annulus H)} / H^{(s-1/2)/2} <= cap";
  r.tolerance = g.tolerance;
  for (double s : g.s) {
    require_supported_s(s);
    for (auto [p, q] : g.fractions) {
      const double qd = static_cast<double>(q);
      for (double c : g.offsets) {
        require(c > 0.0 && c <= 1.0, id, "needs 0 < delta <= sqrt(H)/q");
        for (double k : g.cutoffs) {
          require(k > 0.0, id, "N sqrt(H) must be positive");
          const std::string tag = "s=" + num(s) + " p/q=" + frac(p, q) + " c=" + num(c) + " k=" + num(k);
          double lo = std::numeric_limits<double>::infinity();
          double hi = 0.0;
          for (double H : g.sizes) {
            require(H > 0.0 && H <= 1.0 / (qd * qd), id, "needs 0 < H <= q^-2, violated at H=" + num(H));
            const double delta = c * std::sqrt(H) / qd;
            require(delta >= 3.0 * H, id, "needs delta >= 3H so that delta + h > 0, violated at " + tag + " H=" + num(H));
            const double N = k / std::sqrt(H);
            const double terms = 2.0 * N * (delta + 2.0 * H) * qd;
            const double cycles = terms * terms * H / (4.0 * qd * qd * (delta + H) * (delta + H));
            const DD base(delta);
            const Evaluator G = [&](double h) { return big_g(s, N, p, q, base + DD(h)); };
            const MeanResult m = annulus_mean(G, H, Complex{}, oscillation_grid(cycles));
            const double ratio = m.mean / std::pow(H, (s - 0.5) / 2.0);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            r.samples.push_back({tag + " H=" + num(H), H, ratio, 0.0, m.converged});
          }
          const double spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
          r.constants.emplace_back("max/min[" + tag + "]", spread);
          r.samples.push_back({"spread " + tag, 0.0, spread, g.tolerance, spread <= g.tolerance});
        }
      }
    }
  }
  finish(r);
  return r;
}

CheckReport check_fmain(const CheckGrid& g) {
  const CheckId id = CheckId::FMainEnvelope;
  require_nonempty(id, g.s, "s");
  require_nonempty(id, g.offsets, "delta/H");
  require_nonempty(id, g.sizes, "H");
  require_nonempty(id, g.cutoffs, "N");
  require(g.tolerance >= 1.0, id, "constant margin must be at least 1");
  CheckReport r;
  r.id = id;
  r.grid = "s in " + list(g.s) + ", delta/H in " + list(g.offsets) + ", H in " + list(g.sizes) + ", N in " +
           list(g.cutoffs) + "; C fitted on every other H";
  r.criterion = "||f_main||_{L2(annulus H)} <= C min(H^{(s-1)/2}, H |delta|^{(s-3)/2}), one C for both regimes";
  r.tolerance = g.tolerance;
  for (double ratio : g.offsets) {
    require(std::abs(ratio) < 0.25 || std::abs(ratio) > 4.0, id,
            "delta/H = " + num(ratio) + " lies in the excluded band H/4 <= |delta| <= 4H");
  }
  struct Cell {
    std::string tag;
    double H;
    double ratio;
    bool calibration;
    bool converged;
  };
  std::vector<Cell> cells;
  double c_fit = 0.0;
  double small_lo = INFINITY, small_hi = 0.0, large_lo = INFINITY, large_hi = 0.0;
  for (double s : g.s) {
    require_supported_s(s);
    for (double N : g.cutoffs) {
      require(N > 0.0, id, "N must be positive");
      for (std::size_t i = 0; i < g.sizes.size(); ++i) {
        const double H = g.sizes[i];
        require(H > 0.0 && H < 1.0, id, "needs 0 < H < 1");
        for (double rel : g.offsets) {
          const double delta = rel * H;
          const Evaluator f = [&](double h) { return f_main(s, N, delta, h).value; };
          const MeanResult m = annulus_mean(f, H, Complex{});
          const double env = delta == 0.0 ? std::pow(H, (s - 1.0) / 2.0)
                                          : std::min(std::pow(H, (s - 1.0) / 2.0),
                                                     H * std::pow(std::abs(delta), (s - 3.0) / 2.0));
          const double ratio = m.mean / env;
          const bool calib = i % 2 == 0;
          if (calib) c_fit = std::max(c_fit, ratio);
          if (std::abs(rel) < 0.25) {
            small_lo = std::min(small_lo, ratio);
            small_hi = std::max(small_hi, ratio);
          } else {
            large_lo = std::min(large_lo, ratio);
            large_hi = std::max(large_hi, ratio);
          }
          cells.push_back({"s=" + num(s) + " N=" + num(N) + " H=" + num(H) + " delta/H=" + num(rel), H, ratio, calib,
                           m.converged});
        }
      }
    }
  }
  const double C = g.tolerance * c_fit;
  for (const auto& c : cells) r.samples.push_back({c.tag, c.H, c.ratio, C, c.ratio <= C});
  r.constants = {{"C_fit", c_fit},          {"C", C},
                 {"ratio_min[|delta|<H/4]", small_lo}, {"ratio_max[|delta|<H/4]", small_hi},
                 {"ratio_min[|delta|>4H]", large_lo},  {"ratio_max[|delta|>4H]", large_hi}};
  finish(r);
  return r;
}

CheckReport check_witness(const CheckGrid& g) {
  const CheckId id = CheckId::DivergenceWitness;
  require(g.s.size() == 1, id, "exactly one s");
  const double s = g.s.front();
  require_supported_s(s);
  require(g.epsilon > 0.0 && g.epsilon < 0.5, id, "needs 0 < epsilon < 1/2");
  require(g.tolerance > 0.0, id, "lower constant must be positive");
  require(!g.point.empty(), id, "no point given");
  const RealPoint x = parse_point(g.point);
  require(!x.is_rational(), id, "the point must be irrational");
  CheckReport r;
  r.id = id;
  r.grid = "x = " + g.point + ", s = " + num(s) + ", epsilon = " + num(g.epsilon) + ", j < " +
           std::to_string(g.convergents) + ", term budget " + std::to_string(g.term_budget);
  r.criterion = "|F_{s,M_j} - F_{s,N_j}| >= c at >= 3 consecutive j, N_j = eps q_j, M_j = 2 eps sqrt(q_j q_{j+1})";
  r.tolerance = g.tolerance;
  const auto cs = convergents(x, g.convergents);
  std::size_t run = 0;
  std::size_t best_run = 0;
  std::string first_low;
  double smallest = INFINITY;
  for (std::size_t j = 1; j + 1 < cs.size(); ++j) {
    const double qj = static_cast<double>(to_bigfloat(cs[j].q));
    const double qn = static_cast<double>(to_bigfloat(cs[j + 1].q));
    const double Nj = std::floor(g.epsilon * qj);
    const double Mj = std::floor(2.0 * g.epsilon * std::sqrt(qj * qn));
    const std::string tag = "j=" + std::to_string(j) + " q=" + num(qj) + " " + to_string(cs[j].parity) +
                            " N=" + num(Nj) + " M=" + num(Mj);
    if (Mj > static_cast<double>(g.term_budget)) break;
    if (Mj <= Nj + 1.0) {
      run = 0;
      continue;
    }
    const auto M = static_cast<std::uint64_t>(Mj);
    const auto v = range_sum(s, static_cast<std::uint64_t>(Nj) + 1, M, decompose_for(x, M));
    const double w = std::abs(v.value);
    const bool high = w >= g.tolerance;
    run = high ? run + 1 : 0;
    best_run = std::max(best_run, run);
    if (high) smallest = std::min(smallest, w);
    if (!high && first_low.empty()) first_low = tag;
    r.samples.push_back({tag, static_cast<double>(j), w, g.tolerance, true});
  }
  r.constants = {{"longest_run", static_cast<double>(best_run)}, {"smallest_witness_in_runs", smallest}};
  r.pass = best_run >= 3;
  if (!r.pass) {
    r.first_failure = first_low.empty() ? "fewer than 3 evaluable j within the term budget" : first_low;
    for (auto& smp : r.samples) smp.ok = smp.value >= g.tolerance;
  }
  return r;
}

}  // namespace

const char* to_string(CheckId id) {
  switch (id) {
    case CheckId::Poisson: return "Poisson";
    case CheckId::SummationError: return "SummationError";
    case CheckId::StationaryPhase: return "StationaryPhase";
    case CheckId::GL2Average: return "GL2Average";
    case CheckId::FMainEnvelope: return "FMainEnvelope";
    case CheckId::DivergenceWitness: return "DivergenceWitness";
  }
  return "?";
}

std::vector<CheckId> all_checks() {
  return {CheckId::Poisson,    CheckId::SummationError, CheckId::StationaryPhase,
          CheckId::GL2Average, CheckId::FMainEnvelope,  CheckId::DivergenceWitness};
}

CheckId check_id_from_string(const std::string& name) {
  for (CheckId id : all_checks()) {
    if (name == to_string(id)) return id;
  }
  throw ParseError("unknown check '" + name + "'");
}

CheckGrid default_grid(CheckId id) {
  CheckGrid g;
  auto powers = [](int lo, int hi, int step) {
    std::vector<double> v;
    for (int k = lo; step > 0 ? k <= hi : k >= hi; k += step) v.push_back(std::ldexp(1.0, k));
    return v;
  };
  switch (id) {
    case CheckId::Poisson:
      g.fractions = {{1, 3}, {2, 5}, {3, 8}};
      g.offsets = {1e-6, 1e-8};
      g.sizes = {256.0, 1024.0};
      g.tolerance = 1e-8;
      break;
    case CheckId::SummationError:
      g.s = {0.6, 0.75, 1.0};
      g.fractions = {{1, 3}, {2, 5}, {3, 8}};
      g.offsets = {1e-12};
      g.sizes = powers(8, 16, 1);
      g.tolerance = 0.15;
      break;
    case CheckId::StationaryPhase:
      g.s = {0.75};
      g.sizes = powers(4, 12, 1);
      g.tolerance = 0.2;
      break;
    case CheckId::GL2Average:
      g.s = {0.75};
      g.fractions = {{1, 3}};
      g.offsets = {1.0};
      g.sizes = powers(-8, -20, -1);
      g.cutoffs = {16.0};
      g.tolerance = 20.0;
      break;
    case CheckId::FMainEnvelope:
      g.s = {0.75};
      g.offsets = {0.0, 0.1, -0.2, 5.0, -20.0, 100.0, -1000.0};
      g.sizes = powers(-6, -16, -2);
      g.cutoffs = {256.0, 16384.0};
      g.tolerance = 1.5;
      break;
    case CheckId::DivergenceWitness:
      g.s = {0.6};
      g.point = "rate:r=3,seed=1";
      g.epsilon = 0.1;
      g.tolerance = 0.5;
      break;
  }
  return g;
}

CheckReport run_check(CheckId id, const CheckGrid& grid) {
  switch (id) {
    case CheckId::Poisson: return check_poisson(grid);
    case CheckId::SummationError: return check_summation(grid);
    case CheckId::StationaryPhase: return check_stationary(grid);
    case CheckId::GL2Average: return check_gl2(grid);
    case CheckId::FMainEnvelope: return check_fmain(grid);
    case CheckId::DivergenceWitness: return check_witness(grid);
  }
  throw ParameterError("run_check: unknown check");
}

CheckReport run_check(CheckId id) { return run_check(id, default_grid(id)); }

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("fitted_slope: need two or more paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw ParameterError("fitted_slope: abscissae are all equal");
  return sxy / sxx;
}

}  // namespace lacunary
