#include "lacunary/local_l2.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>

#include "lacunary/asymptotics.hpp"
#include "lacunary/errors.hpp"
#include "lacunary/gauss.hpp"
#include "lacunary/parallel.hpp"
#include "lacunary/quadrature.hpp"
#include "lacunary/window.hpp"

namespace lacunary {

namespace {

constexpr std::size_t kRule = 16;
constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Rule {
  std::array<double, kRule> x;
  std::array<double, kRule> w;
};

const Rule& gauss16() {
  static const Rule rule = [] {
    using G = boost::math::quadrature::gauss<double, kRule>;
    Rule r{};
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    std::size_t k = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      r.x[k] = -a[i];
      r.w[k++] = w[i];
      r.x[k] = a[i];
      r.w[k++] = w[i];
    }
    return r;
  }();
  return rule;
}

// Composite 16-point Gauss-Legendre on [a, b] with n nodes (n/16 panels).
template <typename T, typename F>
T composite(const F& g, double a, double b, std::size_t n) {
  const std::size_t panels = std::max<std::size_t>(1, n / kRule);
  const Rule& rule = gauss16();
  const double width = (b - a) / static_cast<double>(panels);
  std::vector<T> parts(panels);
  parallel_for(panels, [&](std::size_t i) {
    const double lo = a + static_cast<double>(i) * width;
    const double mid = lo + 0.5 * width;
    T acc{};
    for (std::size_t k = 0; k < kRule; ++k) {
      T v = g(mid + 0.5 * width * rule.x[k]);
      v *= 0.5 * width * rule.w[k];
      acc += v;
    }
    parts[i] = acc;
  });
  return tree_reduce(std::move(parts));
}

struct Scalar {
  double v = 0.0;
  Scalar& operator+=(const Scalar& o) {
    v += o.v;
    return *this;
  }
  Scalar& operator*=(double c) {
    v *= c;
    return *this;
  }
};

void check_quadrature(double H, const QuadratureOptions& opts, const char* who) {
  if (!(H > 0.0) || !std::isfinite(H)) throw ParameterError(std::string(who) + ": H must be positive");
  if (opts.n0 < 8) throw ParameterError(std::string(who) + ": at least 8 nodes are required");
}

bool settled(double prev, double next, double rel_tol) {
  return std::abs(next - prev) <= rel_tol * std::max(std::abs(next), std::abs(prev)) ||
         (prev == 0.0 && next == 0.0);
}

// Doubles n until the square root of `integral(n)` settles.
template <typename F>
MeanResult refine(const F& integral, const QuadratureOptions& opts) {
  std::size_t n = std::max<std::size_t>(opts.n0, kRule);
  double prev = std::sqrt(std::max(0.0, integral(n)));
  while (2 * n <= opts.n_max) {
    const double next = std::sqrt(std::max(0.0, integral(2 * n)));
    n *= 2;
    if (settled(prev, next, opts.rel_tol)) return {next, n, true};
    prev = next;
  }
  return {prev, n, false};
}

}  // namespace

Evaluator series_evaluator(double s, std::uint64_t N, const PointDecomposition& d) {
  return [s, N, d](double h) { return partial_sum(s, N, d.shifted(DD(h))).value; };
}

MeanResult annulus_mean(const Evaluator& f, double H, Complex center, const QuadratureOptions& opts) {
  check_quadrature(H, opts, "annulus_mean");
  auto g = [&](double h) { return Scalar{std::norm(f(h) - center)}; };
  return refine(
      [&](std::size_t n) {
        const double right = composite<Scalar>(g, H, 2.0 * H, n).v;
        const double left = composite<Scalar>(g, -2.0 * H, -H, n).v;
        return (left + right) / (2.0 * H);
      },
      opts);
}

MeanResult ball_mean(const Evaluator& f, double H, Complex center, const QuadratureOptions& opts) {
  check_quadrature(H, opts, "ball_mean");
  auto g = [&](double h) { return Scalar{std::norm(f(h) - center)}; };
  return refine(
      [&](std::size_t n) {
        const double right = composite<Scalar>(g, 0.0, H, n).v;
        const double left = composite<Scalar>(g, -H, 0.0, n).v;
        return (left + right) / H;
      },
      opts);
}

ScalingFit exponent_fit(const AnnulusProfile& profile) {
  std::vector<double> lx;
  std::vector<double> ly;
  ScalingFit fit;
  for (const auto& sample : profile.samples) {
    if (!(sample.mean > 0.0) || !(sample.H > 0.0)) {
      ++fit.points_dropped;
      continue;
    }
    lx.push_back(std::log(sample.H));
    ly.push_back(std::log(sample.mean));
  }
  const std::size_t n = lx.size();
  if (n < 3) throw ParameterError("exponent_fit: needs at least 3 samples with positive mean");
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw ParameterError("exponent_fit: all scales coincide");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ssr += r * r;
  }
  fit.residual_rms = std::sqrt(ssr / static_cast<double>(n));
  fit.slope_stderr = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  fit.points_used = n;
  return fit;
}

double predicted_alpha(double s, double rate) { return 0.5 * (s - 1.0 + 1.0 / rate); }

std::optional<double> spectrum_point(double s, double alpha) {
  require_supported_s(s);
  constexpr double kSlack = 1e-12;
  if (!(alpha >= -kSlack) || alpha > 0.5 * s - 0.25 + kSlack) return std::nullopt;
  return 4.0 * std::max(alpha, 0.0) + 2.0 - 2.0 * s;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::int64_t kTableLimit = 4096;
const Complex kEighthTurn = expi_turns(0.125);

// |theta_m|^2: 1 for odd q; for even q it is 2 on one parity class of m and 0 on the other.
double theta_norm_sq(std::int64_t q, std::uint64_t m) {
  if (q % 2 != 0) return 1.0;
  const bool even = m % 2 == 0;
  return (q % 4 == 0) == even ? 2.0 : 0.0;
}

// Phi(A) - Phi(B), Phi(A) = int_0^inf t^{-s} e(A t^2) dt (regularised by a constant at s = 1);
// diff = A - B exactly.
Complex phi_difference(double s, double A, double B, double diff) {
  if (s == 1.0) {
    if ((A > 0.0) == (B > 0.0)) return {-0.5 * std::log1p(diff / B), 0.0};
    return -0.5 * (std::log(Complex(0.0, -A)) - std::log(Complex(0.0, -B)));
  }
  const double nu = 0.5 * (1.0 - s);
  auto phi = [&](double v) {
    const double sign = v > 0.0 ? 1.0 : -1.0;
    return 0.5 * std::tgamma(nu) * std::pow(kTwoPi * std::abs(v), -nu) * expi_turns(0.25 * nu * sign);
  };
  if ((A > 0.0) == (B > 0.0)) return phi(B) * std::expm1(-nu * std::log1p(diff / B));
  return phi(A) - phi(B);
}

}  // namespace

DifferenceModel::DifferenceModel(double s, std::int64_t p, std::int64_t q, const DD& delta, double cutoff)
    : s_(s), p_(p), q_(q), delta_(delta), cutoff_(cutoff) {
  require_supported_s(s);
  if (q <= 0 || std::gcd(p, q) != 1) throw ParameterError("DifferenceModel: p and q must be coprime with q > 0");
  if (q > (std::int64_t{1} << 26)) throw ParameterError("DifferenceModel: q too large");
  if (cutoff < 0.0) throw ParameterError("DifferenceModel: cutoff must be nonnegative");
  theta0_ = q <= kTableLimit ? (*cached_gauss_theta(p, q))[0] : gauss_theta_at(p, q, 0);
  if (delta.hi != 0.0) {
    const double qd = static_cast<double>(q);
    inv_ = DD(1.0) / (eft::two_prod(2.0 * qd, 2.0 * qd) * delta);
  }
}

double DifferenceModel::cycle_rate(double H) const {
  const double d = delta_.to_double();
  const double qd = static_cast<double>(q_);
  double rate = 0.0;
  for (double c : {1.0, 2.0}) {
    for (double side : {-1.0, 1.0}) {
      const double a = d + c * side * H;
      const double b = d + 2.0 * c * side * H;
      rate = std::max(rate, c * H / std::abs(a * b) / (4.0 * qd * qd));
    }
  }
  return rate;
}

std::uint64_t DifferenceModel::resolved_terms(double H, double cycles) const {
  const double m = std::floor(std::sqrt(cycles / cycle_rate(H)));
  if (!(m < 1e18)) return std::numeric_limits<std::uint64_t>::max();
  return std::max<std::uint64_t>(8, static_cast<std::uint64_t>(m));
}

void DifferenceModel::prepare(std::uint64_t M) const {
  const std::size_t have = theta_pos_.size();
  if (have > M) return;
  theta_pos_.resize(M + 1);
  theta_neg_.resize(M + 1);
  if (q_ <= kTableLimit) {
    const auto table = cached_gauss_theta(p_, q_);
    for (std::size_t m = have; m <= M; ++m) {
      theta_pos_[m] = (*table)[static_cast<std::int64_t>(m)];
      theta_neg_[m] = (*table)[-static_cast<std::int64_t>(m)];
    }
    return;
  }
  parallel_for(M + 1 - have, [&](std::size_t i) {
    const auto m = static_cast<std::int64_t>(have + i);
    theta_pos_[have + i] = gauss_theta_at(p_, q_, m);
    theta_neg_[have + i] = gauss_theta_at(p_, q_, -m);
  });
}

Complex DifferenceModel::dual_sum(const DD& A, double shift, std::uint64_t M, double* remainder) const {
  const double a = A.to_double();
  const double absA = std::abs(a);
  const bool positive = a > 0.0;
  const double qd = static_cast<double>(q_);
  const double x1 = qd * qd * absA / kTwoPi;  // q^2|A|/(2 pi) = 1/(8 pi |A| t_m^2) * m^2
  const bool split = delta_.hi != 0.0 && std::abs(shift) <= 0.5 * std::abs(delta_.to_double());
  const DD inv_direct = split ? DD() : DD(1.0) / (eft::two_prod(2.0 * qd, 2.0 * qd) * A);
  const double rel = split ? shift / a : 0.0;
  const auto& theta = positive ? theta_pos_ : theta_neg_;
  Complex acc{};
  double rem = 0.0;
  for (std::uint64_t m = 1; m <= M; ++m) {
    double weight = 1.0;
    if (cutoff_ > 0.0) {
      const double t = static_cast<double>(m) / (2.0 * qd * absA);
      weight = window_eval(Window{WindowKind::Ramp, 0.0}, t / cutoff_);
      if (weight == 0.0) break;
    }
    const double md = static_cast<double>(m);
    // -m^2/(4 q^2 A), split as -m^2 inv + m^2 inv shift/A when A = delta + shift.
    double turns;
    if (split) {
      const DD base = dd_square(m) * inv_;
      turns = -dd_frac(base) + md * md * inv_.hi * rel;
    } else {
      turns = -dd_frac(dd_square(m) * inv_direct);
    }
    // Stationary-phase series sum_k (s)_{2k}/k! (i x)^k, x = q^2|A|/(2 pi m^2).
    const double x = x1 / (md * md);
    double re = 1.0;
    double im = 0.0;
    double coef = 1.0;
    double prev = 1.0;
    double last = 0.0;
    for (int k = 1; k <= 10; ++k) {
      coef *= (s_ + 2.0 * k - 2.0) * (s_ + 2.0 * k - 1.0) / k * x;
      if (coef >= prev || coef < 1e-17) {
        last = coef;
        break;
      }
      switch (k % 4) {
        case 1: im += coef; break;
        case 2: re -= coef; break;
        case 3: im -= coef; break;
        default: re += coef; break;
      }
      prev = coef;
      last = coef;
    }
    const Complex corr(re, positive ? im : -im);
    const double amp = weight * std::pow(md, -s_);
    acc += theta[m] * amp * corr * expi_turns(turns);
    rem += std::abs(theta[m]) * amp * last;
  }
  const double prefactor = std::pow(2.0 * qd * absA, s_ - 0.5);
  if (remainder != nullptr) *remainder += prefactor * rem;
  const Complex rot = positive ? kEighthTurn : std::conj(kEighthTurn);
  return prefactor * rot * acc;
}

Complex DifferenceModel::theta_term(double h) const {
  if (theta0_ == Complex{}) return {};
  const double d = delta_.to_double();
  const double sq = std::sqrt(static_cast<double>(q_));
  if (cutoff_ == 0.0) {
    return theta0_ / sq * phi_difference(s_, (delta_ + DD(2.0 * h)).to_double(), (delta_ + DD(h)).to_double(), h);
  }
  const double N = cutoff_;
  const double A = d + 2.0 * h;
  const double B = d + h;
  Complex total = f_main(s_, N, d, h).value;
  const double cycles = 3.0 * N * N * std::max(std::abs(A), std::abs(B));
  const auto panels = static_cast<std::size_t>(std::ceil(8.0 * cycles)) + 16;
  auto ramp = [&](double t) {
    const double w = window_eval(Window{WindowKind::Ramp, 0.0}, t / N) * std::pow(t, -s_);
    const DD t2 = eft::two_prod(t, t);
    return w * (expi_turns_dd(DD(A) * t2) - expi_turns_dd(DD(B) * t2));
  };
  QuadResult r;
  for (std::size_t i = 0; i < panels; ++i) {
    const double lo = N + N * static_cast<double>(i) / static_cast<double>(panels);
    const double hi = N + N * static_cast<double>(i + 1) / static_cast<double>(panels);
    r += gauss_kronrod_panel(ramp, lo, hi);
  }
  return theta0_ / sq * (total + r.value);
}

Complex DifferenceModel::value(double h, std::uint64_t M, double* remainder) const {
  if (theta_pos_.size() <= M) throw ParameterError("DifferenceModel::value: prepare(M) first");
  const DD A = delta_ + DD(2.0 * h);
  const DD B = delta_ + DD(h);
  return theta_term(h) + dual_sum(A, 2.0 * h, M, remainder) - dual_sum(B, h, M, remainder);
}

double DifferenceModel::tail_coefficient(std::uint64_t M) const {
  if (cutoff_ > 0.0) return 0.0;
  constexpr std::uint64_t kDirect = std::uint64_t{1} << 15;
  const std::uint64_t end = (M + kDirect) & ~std::uint64_t{1};
  double acc = 0.0;
  for (std::uint64_t m = end; m > M; --m) acc += theta_norm_sq(q_, m) * std::pow(static_cast<double>(m), -2.0 * s_);
  double start = static_cast<double>(end) + 0.5;
  if (q_ % 4 == 2) start = static_cast<double>(end);
  if (q_ % 4 == 0) start = static_cast<double>(end) + 1.0;
  return acc + std::pow(start, 1.0 - 2.0 * s_) / (2.0 * s_ - 1.0);
}

double DifferenceModel::tail_weight(double h) const {
  const double qd = static_cast<double>(q_);
  const double a = std::abs((delta_ + DD(2.0 * h)).to_double());
  const double b = std::abs((delta_ + DD(h)).to_double());
  return std::pow(2.0 * qd * a, 2.0 * s_ - 1.0) + std::pow(2.0 * qd * b, 2.0 * s_ - 1.0);
}

namespace {

struct Moments {
  double f2 = 0.0;    // |f|^2
  double w = 0.0;     // tail weight
  double rem2 = 0.0;  // squared stationary-phase remainder
  Moments& operator+=(const Moments& o) {
    f2 += o.f2;
    w += o.w;
    rem2 += o.rem2;
    return *this;
  }
  Moments& operator*=(double c) {
    f2 *= c;
    w *= c;
    rem2 *= c;
    return *this;
  }
};

// Spacing-based estimate of the correlation between unresolved dual terms,
// in units of mean^2: pairs (m, m') with m' > M decorrelate over C(H) once
// their phases drift apart by (m'^2 - m^2) * rate cycles.
double cross_estimate(const DifferenceModel& model, std::uint64_t M, double rate, double wbar) {
  constexpr std::uint64_t kReach = 64;
  const double s = model.s();
  const std::int64_t q = model.q();
  auto a2 = [&](std::uint64_t m) { return theta_norm_sq(q, m) * std::pow(static_cast<double>(m), -2.0 * s); };
  double acc = 0.0;
  const std::uint64_t end = M + std::min<std::uint64_t>(4 * M + kReach, std::uint64_t{1} << 14);
  for (std::uint64_t mp = M + 1; mp <= end; ++mp) {
    const double amp = a2(mp);
    if (amp == 0.0) continue;
    for (std::uint64_t m = mp > kReach ? mp - kReach : 1; m < mp; ++m) {
      const double cycles = (static_cast<double>(mp) * mp - static_cast<double>(m) * m) * rate;
      const double c = wbar * std::sqrt(amp * a2(m)) / (kTwoPi * 0.5 * cycles);
      acc += 2.0 * c * c;
    }
  }
  return std::sqrt(acc);
}

}  // namespace

DifferenceSample difference_mean(const DifferenceModel& model, double H, const DifferenceOptions& opts) {
  check_quadrature(H, opts.quad, "difference_mean");
  const double d = std::abs(model.delta().to_double());
  if (d != 0.0 && d < 4.0 * H * (1.0 - 1e-12)) {
    throw ParameterError("difference_mean: needs delta = 0 or |delta| >= 4H");
  }
  const std::uint64_t M = model.resolved_terms(H, opts.resolved_cycles);
  if (M > opts.max_dual_terms) throw RegimeError("difference_mean: scale needs too many explicit dual terms");
  model.prepare(M);
  const double tail_c = model.tail_coefficient(M);

  auto g = [&](double h) {
    double rem = 0.0;
    const Complex v = model.value(h, M, &rem);
    return Moments{std::norm(v), model.tail_weight(h), rem * rem};
  };
  auto level = [&](std::size_t n) {
    Moments m = composite<Moments>(g, H, 2.0 * H, n);
    m += composite<Moments>(g, -2.0 * H, -H, n);
    m *= 1.0 / (2.0 * H);
    return m;
  };
  auto total = [&](const Moments& m) { return std::sqrt(std::max(0.0, m.f2 + tail_c * m.w)); };

  DifferenceSample out;
  out.H = H;
  out.dual_terms = M;
  std::size_t n = std::max<std::size_t>(opts.quad.n0, kRule);
  Moments cur = level(n);
  while (2 * n <= opts.quad.n_max) {
    const Moments next = level(2 * n);
    n *= 2;
    const bool done = settled(total(cur), total(next), opts.quad.rel_tol);
    cur = next;
    if (done) {
      out.converged = true;
      break;
    }
  }
  out.n_quad = n;
  out.mean = total(cur);
  const double tail = tail_c * cur.w;
  out.tail_fraction = out.mean > 0.0 ? tail / (out.mean * out.mean) : 0.0;

  const double qd = static_cast<double>(model.q());
  const double smooth = std::pow(qd, 2.5 - model.s()) * 2.0 * H;
  double cross = 0.0;
  if (tail_c > 0.0) {
    const double rate = model.cycle_rate(H) / 2.0;  // slower of the two offsets
    cross = cross_estimate(model, M, rate, 0.5 * cur.w);
  }
  out.audit = (out.mean > 0.0 ? cross / (2.0 * out.mean) : std::sqrt(cross)) + smooth + std::sqrt(cur.rem2);
  out.audit_ok = out.converged && out.audit <= opts.audit_fraction * out.mean;
  return out;
}

AlphaReport measure_alpha(const RealPoint& x, double s, const AlphaPlan& plan) {
  require_supported_s(s);
  if (x.is_rational()) throw ParameterError("measure_alpha: the point must be irrational");
  if (!(plan.K >= 4.0)) throw ParameterError("measure_alpha: K must be at least 4");
  if (plan.j_first > plan.j_last) throw ParameterError("measure_alpha: empty convergent window");
  if (plan.max_centres == 0) throw ParameterError("measure_alpha: max_centres must be positive");

  AlphaReport report;
  report.rate = approx_rate_odd(x, plan.j_last + 2).value;
  report.predicted = predicted_alpha(s, report.rate);
  report.profile.x = x;
  report.profile.s = s;
  report.profile.scale_plan = "difference, H_j = |h_j|/" + std::to_string(plan.K) + ", j = " +
                              std::to_string(plan.j_first) + ".." + std::to_string(plan.j_last);

  const auto cs = convergents(x, plan.j_last + 1);
  for (std::size_t j = plan.j_first; j <= plan.j_last && j < cs.size(); ++j) {
    ScaleRecord rec;
    rec.j = j;
    const BigFloat hj = abs(cs[j].h);
    if (hj == 0 || boost::multiprecision::log2(hj) < BigFloat(-1000)) {
      rec.note = "offset outside double range";
      report.scales.push_back(rec);
      continue;
    }
    rec.H = static_cast<double>(hj) / plan.K;
    std::size_t attempts = 0;
    for (std::size_t k = j + 1; k-- > 0;) {
      if (!fits_i64(cs[k].q) || to_i64(cs[k].q) > plan.q_max) continue;
      const std::int64_t q = to_i64(cs[k].q);
      const DD delta = to_dd(cs[k].h);
      const double dk = std::abs(delta.to_double());
      if (dk < 4.0 * rec.H * (1.0 - 1e-12)) continue;
      if (static_cast<double>(q) * static_cast<double>(q) * (dk + 4.0 * rec.H) > 1.0) {
        rec.note = "no centre in the stationary-phase regime";
        break;
      }
      if (!fits_i64(cs[k].p)) continue;
      const DifferenceModel model(s, to_i64(cs[k].p), q, delta);
      const std::uint64_t M = model.resolved_terms(rec.H, plan.diff.resolved_cycles);
      if (M > plan.diff.max_dual_terms) {
        rec.note = "too many dual terms";
        continue;
      }
      if (q > kTableLimit && static_cast<double>(M) * static_cast<double>(q) > plan.max_theta_work) {
        rec.note = "Gauss sums too costly";
        continue;
      }
      rec.centre_index = k;
      rec.centre_q = q;
      rec.sample = difference_mean(model, rec.H, plan.diff);
      rec.used = rec.sample.audit_ok;
      rec.note = rec.used ? "" : (rec.sample.converged ? "audit failed" : "quadrature not converged");
      if (rec.used || ++attempts == plan.max_centres) break;
    }
    if (rec.centre_q == 0 && rec.note.empty()) rec.note = "no usable expansion centre";
    report.scales.push_back(rec);
  }
  for (const auto& rec : report.scales) {
    if (rec.used) report.profile.samples.push_back({rec.H, rec.sample.mean, rec.sample.n_quad});
  }
  if (report.profile.samples.size() < 3) {
    throw RegimeError("measure_alpha: fewer than 3 scales passed the audit");
  }
  report.measured = exponent_fit(report.profile);
  return report;
}

AlphaReport estimate_alpha(const RealPoint& x, double s, const AlphaPlan& plan) {
  const ConvergenceVerdict verdict = classify_convergence(x, s);
  if (verdict.tag == Convergence::Diverges) throw RegimeError("diverges: " + verdict.reason);
  if (verdict.tag == Convergence::Boundary) throw RegimeError("boundary case, refusing: " + verdict.reason);
  return measure_alpha(x, s, plan);
}

}  // namespace lacunary
