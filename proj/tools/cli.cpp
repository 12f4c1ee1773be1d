#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "lacunary/asymptotics.hpp"
#include "lacunary/diophantine.hpp"
#include "lacunary/errors.hpp"
#include "lacunary/local_l2.hpp"
#include "lacunary/parallel.hpp"
#include "lacunary/series.hpp"
#include "lacunary/verify.hpp"

namespace lacunary::cli {

namespace {

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_number(v[i]);
  return out;
}

template <typename T>
std::string join_ints(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::string join_strings(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

struct Artifact {
  std::vector<std::pair<std::string, Record>> summaries;
  std::vector<Record> rows;
};

void emit(const RunConfig& cfg, const Artifact& a, std::ostream& stream) {
  std::ofstream file;
  if (!cfg.out.empty()) {
    file.open(cfg.out, std::ios::binary | std::ios::trunc);
    if (!file) throw ParameterError("cannot open output file '" + cfg.out + "'");
  }
  std::ostream& os = cfg.out.empty() ? stream : file;
  const AuditHeader audit = audit_header(cfg);
  if (cfg.format == Format::Json) {
    std::vector<Record> lines;
    for (const auto& [name, rec] : a.summaries) lines.push_back(rec);
    lines.insert(lines.end(), a.rows.begin(), a.rows.end());
    write_json_lines(os, audit, lines);
  } else {
    AuditHeader header = audit;
    for (const auto& [name, rec] : a.summaries) {
      for (const auto& f : rec) header.emplace_back("result." + (name.empty() ? "" : name + ".") + f.key, format_value(f.value));
    }
    write_csv(os, header, a.rows);
  }
  if (!os) throw ParameterError("write failed for '" + (cfg.out.empty() ? std::string("stdout") : cfg.out) + "'");
}

// ---------------------------------------------------------------------------

Artifact analyze(const RunConfig& cfg) {
  const RealPoint x = parse_point(cfg.point);
  const ConvergenceVerdict verdict = classify_convergence(x, cfg.s);
  Record summary = {{"point", x.to_string()}, {"s", cfg.s}};
  std::map<std::size_t, double> sigma_terms;
  if (x.is_rational()) {
    summary.push_back({"rate_odd", Value()});
    summary.push_back({"rate_exact", Value()});
  } else {
    const RateEstimate rate = approx_rate_odd(x, cfg.convergents);
    summary.push_back({"rate_odd", rate.value});
    summary.push_back({"rate_exact", rate.exact});
    const SigmaResult sigma = sigma_s(x, cfg.s, cfg.convergents);
    summary.push_back({"sigma_partial", sigma.partial_sum});
    summary.push_back({"sigma_verdict", std::string(to_string(sigma.verdict))});
    for (const auto& t : sigma.terms) sigma_terms[t.index] = t.value;
    if (verdict.tag != Convergence::Diverges) {
      summary.push_back({"predicted_alpha", predicted_alpha(cfg.s, rate.value)});
    } else {
      summary.push_back({"predicted_alpha", Value()});
    }
  }
  summary.push_back({"verdict", std::string(to_string(verdict.tag))});
  summary.push_back({"witness", verdict.witness});
  summary.push_back({"reason", verdict.reason});

  Artifact a;
  a.summaries.emplace_back("", summary);
  for (const auto& c : convergents(x, cfg.convergents)) {
    Record r = to_record(c);
    const auto it = sigma_terms.find(c.index);
    r.push_back({"sigma_term", it == sigma_terms.end() ? Value() : Value(it->second)});
    a.rows.push_back(std::move(r));
  }
  return a;
}

Artifact eval(const RunConfig& cfg) {
  if (cfg.N && cfg.tol) throw ParameterError("eval: give either --N or --tol, not both");
  const RealPoint x = parse_point(cfg.point);
  Record r = {{"point", x.to_string()}, {"s", cfg.s}};
  ComplexValue v;
  if (cfg.N) {
    require_supported_s(cfg.s);
    if (*cfg.N < 1) throw ParameterError("eval: N must be at least 1");
    v = partial_sum(cfg.s, *cfg.N, x);
    r.push_back({"mode", std::string("partial_sum")});
    r.push_back({"N", static_cast<std::int64_t>(*cfg.N)});
  } else {
    const double tol = cfg.tol.value_or(1e-6);
    v = limit_value(cfg.s, x, tol);
    r.push_back({"mode", std::string("limit")});
    r.push_back({"tol", tol});
  }
  for (auto& f : to_record(v)) r.push_back(std::move(f));
  Artifact a;
  a.rows.push_back(std::move(r));
  return a;
}
AlphaPlan alpha_plan(const RunConfig& cfg, std::size_t j_first, std::size_t j_last) {
  AlphaPlan plan;
  plan.K = cfg.K;
  plan.j_first = j_first;
  plan.j_last = j_last;
  plan.diff.audit_fraction = cfg.audit_fraction;
  plan.diff.quad.rel_tol = cfg.quad_rel_tol;
  return plan;
}

Artifact exponent(const RunConfig& cfg) {
  const RealPoint x = parse_point(cfg.point);
  const AlphaReport report = estimate_alpha(x, cfg.s, alpha_plan(cfg, cfg.j_first, cfg.j_last));
  Record summary = {{"point", x.to_string()},
                    {"s", cfg.s},
                    {"rate", report.rate},
                    {"predicted_alpha", report.predicted}};
  for (auto& f : to_record(report.measured)) summary.push_back(std::move(f));
  summary.push_back({"deviation", report.measured.slope - report.predicted});
  summary.push_back({"scale_plan", report.profile.scale_plan});
  Artifact a;
  a.summaries.emplace_back("", summary);
  a.rows = cfg.scale_rows ? scale_records(report) : profile_records(report.profile);
  return a;
}

Record spectrum_row(const std::string& kind, const std::string& point, Value alpha, Value d, Value rate,
                    Value predicted, Value stderr_, Value points, const std::string& note) {
  return {{"kind", kind},           {"point", point},       {"alpha", std::move(alpha)},
          {"d", std::move(d)},      {"rate", std::move(rate)}, {"predicted_alpha", std::move(predicted)},
          {"slope_stderr", std::move(stderr_)}, {"points_used", std::move(points)}, {"note", note}};
}

Artifact spectrum(const RunConfig& cfg) {
  require_supported_s(cfg.s);
  if (cfg.grid < 2) throw ParameterError("spectrum: grid must be at least 2");
  const double alpha_max = cfg.s / 2.0 - 0.25;
  Artifact a;
  a.summaries.emplace_back("", Record{{"s", cfg.s}, {"alpha_max", alpha_max}, {"grid", static_cast<std::int64_t>(cfg.grid)}});
  for (std::size_t i = 0; i < cfg.grid; ++i) {
    const double alpha = alpha_max * static_cast<double>(i) / static_cast<double>(cfg.grid - 1);
    const std::optional<double> d = spectrum_point(cfg.s, alpha);
    const double rate = 1.0 / (2.0 * alpha + 1.0 - cfg.s);
    a.rows.push_back(spectrum_row("formula", "", alpha, d ? Value(*d) : Value(), rate, alpha, Value(), Value(), ""));
  }
  for (double r : cfg.rates) {
    const std::string point = "rate:r=" + format_number(r) + ",seed=" + std::to_string(cfg.seed);
    const RealPoint x = parse_point(point);
    try {
      const AlphaReport rep = measure_alpha(x, cfg.s, alpha_plan(cfg, cfg.rate_j_first, cfg.rate_j_last));
      a.rows.push_back(spectrum_row("measured", point, rep.measured.slope, jarnik_dim(r), r, rep.predicted,
                                    rep.measured.slope_stderr,
                                    static_cast<std::int64_t>(rep.measured.points_used), ""));
    } catch (const RegimeError& e) {
      a.rows.push_back(spectrum_row("measured", point, Value(), jarnik_dim(r), r, predicted_alpha(cfg.s, r),
                                    Value(), Value(), e.what()));
    }
  }
  return a;
}

struct VerifyOutcome {
  Artifact artifact;
  bool pass = true;
};

VerifyOutcome verify(const RunConfig& cfg, std::ostream& err) {
  std::vector<CheckId> ids;
  if (cfg.checks.empty()) ids = all_checks();
  for (const auto& name : cfg.checks) ids.push_back(check_id_from_string(name));
  VerifyOutcome o;
  std::vector<CheckReport> reports;
  for (CheckId id : ids) {
    CheckGrid grid = default_grid(id);
    if (cfg.check_tolerance) grid.tolerance = *cfg.check_tolerance;
    reports.push_back(run_check(id, grid));
    const CheckReport& rep = reports.back();
    o.pass = o.pass && rep.pass;
    o.artifact.summaries.emplace_back(to_string(id), summary_record(rep));
    for (auto& r : sample_records(rep)) o.artifact.rows.push_back(std::move(r));
  }
  err << check_table(reports);
  return o;
}

template <typename F>
double best_seconds(int reps, F&& f) {
  double best = INFINITY;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    best = std::min(best, dt.count());
  }
  return best;
}

Artifact bench(const RunConfig& cfg) {
  require_supported_s(cfg.s);
  if (cfg.bench_reps < 1) throw ParameterError("bench: reps must be at least 1");
  const std::vector<std::uint64_t> Ns = cfg.bench_N.empty() ? std::vector<std::uint64_t>{1u << 14, 1u << 17, 1u << 20}
                                                            : cfg.bench_N;
  const std::vector<std::int64_t> qs = cfg.bench_q.empty() ? std::vector<std::int64_t>{3, 31, 257, 1021} : cfg.bench_q;
  Artifact a;
  for (std::uint64_t N : Ns) {
    for (std::int64_t q : qs) {
      if (q < 1 || static_cast<std::uint64_t>(q) > N) throw ParameterError("bench: need 1 <= q <= N");
      const DD h(0.25 / (static_cast<double>(N) * static_cast<double>(q)));
      const PointDecomposition d = make_decomposition(1, q, h);
      ComplexValue direct;
      FastBlockResult fast;
      const double t_direct = best_seconds(cfg.bench_reps, [&] { direct = dyadic_block(cfg.s, N, d); });
      const double t_fast = best_seconds(cfg.bench_reps, [&] { fast = fast_block(cfg.s, N, 1, q, h, cfg.cal); });
      const double diff = std::abs(fast.value() - direct.value);
      a.rows.push_back({{"N", static_cast<std::int64_t>(N)},
                        {"p", std::int64_t{1}},
                        {"q", q},
                        {"h", h.to_double()},
                        {"t_direct", t_direct},
                        {"t_fast", t_fast},
                        {"speedup", t_direct / t_fast},
                        {"abs_diff", diff},
                        {"err_model", fast.err_model},
                        {"within_model", diff <= fast.err_model}});
    }
  }
  return a;
}

}  // namespace

AuditHeader audit_header(const RunConfig& cfg) {
  AuditHeader h = {{"tool", "lacunary"},
                   {"version", LACUNARY_VERSION},
                   {"command", cfg.command},
                   {"point", cfg.point},
                   {"s", format_number(cfg.s)},
                   {"N", cfg.N ? std::to_string(*cfg.N) : ""},
                   {"tol", cfg.tol ? format_number(*cfg.tol) : ""},
                   {"convergents", std::to_string(cfg.convergents)},
                   {"K", format_number(cfg.K)},
                   {"j_first", std::to_string(cfg.j_first)},
                   {"j_last", std::to_string(cfg.j_last)},
                   {"audit_fraction", format_number(cfg.audit_fraction)},
                   {"quad_rel_tol", format_number(cfg.quad_rel_tol)},
                   {"scale_rows", cfg.scale_rows ? "true" : "false"},
                   {"grid", std::to_string(cfg.grid)},
                   {"rates", join(cfg.rates)},
                   {"rate_j_first", std::to_string(cfg.rate_j_first)},
                   {"rate_j_last", std::to_string(cfg.rate_j_last)},
                   {"seed", std::to_string(cfg.seed)},
                   {"checks", join_strings(cfg.checks)},
                   {"check_tolerance", cfg.check_tolerance ? format_number(*cfg.check_tolerance) : ""},
                   {"bench_N", join_ints(cfg.bench_N)},
                   {"bench_q", join_ints(cfg.bench_q)},
                   {"bench_reps", std::to_string(cfg.bench_reps)},
                   {"kappa", format_number(cfg.cal.kappa)},
                   {"kappa_prime", format_number(cfg.cal.kappa_prime)},
                   {"q2h_threshold", format_number(cfg.cal.q2h_threshold)},
                   {"threads", std::to_string(thread_cap())},
                   {"format", to_string(cfg.format)}};
  return h;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.threads > 0) set_thread_cap(cfg.threads);
    int status = kOk;
    Artifact a;
    if (cfg.command == "analyze") a = analyze(cfg);
    else if (cfg.command == "eval") a = eval(cfg);
    else if (cfg.command == "exponent") a = exponent(cfg);
    else if (cfg.command == "spectrum") a = spectrum(cfg);
    else if (cfg.command == "bench") a = bench(cfg);
    else if (cfg.command == "verify") {
      VerifyOutcome o = verify(cfg, err);
      a = std::move(o.artifact);
      if (!o.pass) status = kCheckFailed;
    } else {
      throw ParameterError("unknown command '" + cfg.command + "'");
    }
    emit(cfg, a, out);
    return status;
  } catch (const RegimeError& e) {
    err << "refused: " << e.what() << '\n';
    return kRegimeRefused;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Quadratic lacunary Fourier series: convergence, values, local exponents"};
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string format = "json";
  bool no_measure = false;
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.add_option("--point", cfg.point, "Point: rat:p/q, quad:(a+b*sqrt(d))/c+k, cf:[a0;a1,a2,...], rate:r=R,seed=S");
  app.add_option("--s", cfg.s, "Decay exponent s in (1/2, 1]");
  app.add_option("--N", cfg.N, "Partial-sum length (eval)");
  app.add_option("--tol", cfg.tol, "Target absolute tolerance (eval)")->check(CLI::PositiveNumber);
  app.add_option("--convergents", cfg.convergents, "Convergents to compute")->check(CLI::Range(1, 200));
  app.add_option("--K", cfg.K, "Scale factor: H_j = |h_j|/K")->check(CLI::PositiveNumber);
  app.add_option("--j-first,--j_first", cfg.j_first, "First convergent scale");
  app.add_option("--j-last,--j_last", cfg.j_last, "Last convergent scale");
  app.add_option("--audit-fraction,--audit_fraction", cfg.audit_fraction, "Largest audit/mean ratio accepted")->check(CLI::Range(0.0, 1.0));
  app.add_option("--quad-rel-tol,--quad_rel_tol", cfg.quad_rel_tol, "Relative tolerance of the annulus quadrature")->check(CLI::PositiveNumber);
  app.add_flag("--scale-rows,--scale_rows", cfg.scale_rows, "exponent: write per-scale audit rows");
  app.add_option("--grid", cfg.grid, "Spectrum grid points");
  app.add_option("--rates", cfg.rates, "Constructed rates measured by spectrum")
      ->delimiter(',');
  app.add_flag("--no-measure,--no_measure", no_measure, "spectrum: formula rows only");
  app.add_option("--rate-j-first,--rate_j_first", cfg.rate_j_first, "First scale for constructed points");
  app.add_option("--rate-j-last,--rate_j_last", cfg.rate_j_last, "Last scale for constructed points");
  app.add_option("--seed", cfg.seed, "Seed for constructed points");
  app.add_option("--check,--checks", cfg.checks, "verify: checks to run (default all)")->delimiter(',');
  app.add_option("--check-tolerance,--check_tolerance", cfg.check_tolerance, "verify: tolerance for every check")
      ->check(CLI::PositiveNumber);
  app.add_option("--bench-N,--bench_N", cfg.bench_N, "bench: block lengths")->delimiter(',');
  app.add_option("--bench-q,--bench_q", cfg.bench_q, "bench: denominators")->delimiter(',');
  app.add_option("--bench-reps,--bench_reps", cfg.bench_reps, "bench: repetitions (best time kept)")->check(CLI::Range(1, 1000));
  app.add_option("--kappa", cfg.cal.kappa, "fast_block error constant")->check(CLI::PositiveNumber);
  app.add_option("--kappa-prime,--kappa_prime", cfg.cal.kappa_prime, "fast_diff error constant")->check(CLI::PositiveNumber);
  app.add_option("--q2h-threshold,--q2h_threshold", cfg.cal.q2h_threshold, "fast_diff regime threshold")->check(CLI::PositiveNumber);
  app.add_option("--threads", cfg.threads, "Worker threads (0: LACUNARY_THREADS or hardware)")->envname("LACUNARY_THREADS");
  app.add_option("--out", cfg.out, "Output file (default stdout)");
  app.add_option("--format", format, "Artifact format")->check(CLI::IsMember({"json", "csv"}));

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"analyze", "Convergents, approximation rate and convergence verdict"},
      {"eval", "Partial sum at --N or the limit to --tol"},
      {"exponent", "Local L2 exponent at a convergent point"},
      {"spectrum", "Spectrum of local exponents, formula and measured"},
      {"verify", "Numerical checks of the analytic estimates"},
      {"bench", "fast_block against direct dyadic blocks"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  cfg.format = format_from_string(format);
  if (no_measure) cfg.rates.clear();
  if ((cfg.command == "analyze" || cfg.command == "eval" || cfg.command == "exponent") && cfg.point.empty()) {
    err << "error: " << cfg.command << " requires --point\n";
    return kUsageError;
  }
  return run(cfg, out, err);
}

}  // namespace lacunary::cli
