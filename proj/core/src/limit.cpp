#include <cmath>
#include <limits>
#include <sstream>

#include "lacunary/errors.hpp"
#include "lacunary/series.hpp"

namespace lacunary {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Convergent> deep_convergents(const RealPoint& x) {
  std::size_t count = 4;
  while (true) {
    auto cs = convergents(x, count);
    const bool terminated = cs.size() < count + 1;
    if (terminated || log_big(cs.back().q) > 160.0 * std::log(2.0) || count >= 256) return cs;
    count *= 2;
  }
}

}  // namespace

TailPlan tail_plan(double s, const RealPoint& x, double tail_constant) {
  require_supported_s(s);
  const auto cs = deep_convergents(x);
  TailPlan plan;
  if (cs.size() < 2) return plan;
  const std::size_t n = cs.size() - 1;
  std::vector<double> terms(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double lq = log_big(cs[j].q);
    const double lq1 = log_big(cs[j + 1].q);
    double t = lq * std::exp((0.5 - s) * lq) + std::exp((0.5 - s) * lq1);
    if (cs[j].parity == ParityClass::NotTwoOdd) {
      const double delta = s < 1.0 ? 1.0 : std::max(0.0, lq1 - lq);
      t += delta * std::exp(0.5 * lq1 - 0.5 * s * (lq + lq1));
    }
    terms[j] = t;
  }
  double extra = 0.0;
  if (!x.is_rational()) {
    double rho = 0.0;
    for (std::size_t j = n >= 4 ? n - 3 : 1; j < n; ++j) rho = std::max(rho, terms[j] / terms[j - 1]);
    extra = rho < 1.0 ? terms[n - 1] * rho / (1.0 - rho) : kInf;
  }
  plan.q.resize(n);
  plan.bound.resize(n);
  double acc = extra;
  for (std::size_t j = n; j-- > 0;) {
    acc += terms[j];
    plan.q[j] = cs[j].q;
    plan.bound[j] = tail_constant * acc;
  }
  return plan;
}

ComplexValue limit_value(double s, const RealPoint& x, double tol, const LimitOptions& opts) {
  require_supported_s(s);
  if (!(tol > 0.0)) throw ParameterError("limit_value: tol must be positive");
  const ConvergenceVerdict verdict = classify_convergence(x, s);
  if (verdict.tag == Convergence::Diverges) throw RegimeError("diverges: " + verdict.reason);
  if (verdict.tag == Convergence::Boundary) throw RegimeError("boundary case, refusing: " + verdict.reason);

  if (const auto r = x.as_rational()) {
    if (!fits_i64(r->p) || !fits_i64(r->q)) throw RegimeError("limit_value: rational too large");
    const ComplexValue v = rational_limit(s, to_i64(r->p), to_i64(r->q));
    if (v.err > tol) throw RegimeError("limit_value: tolerance below the rounding floor");
    return v;
  }

  const TailPlan plan = tail_plan(s, x, opts.tail_constant);
  for (std::size_t j = 1; j < plan.q.size(); ++j) {
    if (plan.q[j] > BigInt(opts.max_terms)) break;
    if (plan.bound[j] > 0.5 * tol) continue;
    const auto N = static_cast<std::uint64_t>(plan.q[j]);
    ComplexValue v = partial_sum(s, N, x);
    v.err += plan.bound[j];
    return v;
  }
  std::ostringstream msg;
  msg << "limit_value: tolerance " << tol << " out of reach within " << opts.max_terms << " terms";
  for (std::size_t j = plan.q.size(); j-- > 0;) {
    if (plan.q[j] <= BigInt(opts.max_terms)) {
      msg << " (tail bound at N = " << plan.q[j] << " is " << plan.bound[j] << ")";
      break;
    }
  }
  throw RegimeError(msg.str());
}

}  // namespace lacunary
