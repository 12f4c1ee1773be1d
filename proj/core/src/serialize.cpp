#include "lacunary/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lacunary/errors.hpp"

namespace lacunary {

namespace {

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string text(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "";
        else if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(x);
        else if constexpr (std::is_same_v<T, double>) return format_number(x);
        else return x;
      },
      v);
}

std::string json_value(const Value& v) {
  if (std::holds_alternative<std::monostate>(v)) return "null";
  if (const auto* d = std::get_if<double>(&v); d && !std::isfinite(*d)) return "null";
  if (const auto* s = std::get_if<std::string>(&v)) return quoted(*s);
  return text(v);
}

std::string json_object(const Record& r) {
  std::string out = "{";
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) out += ",";
    out += quoted(r[i].key) + ":" + json_value(r[i].value);
  }
  return out + "}";
}

Value opt(const std::optional<double>& v) { return v ? Value(*v) : Value(); }

}  // namespace

const char* to_string(Format f) { return f == Format::Csv ? "csv" : "json"; }

Format format_from_string(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw ParseError("unknown format '" + name + "' (expected csv or json)");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_value(const Value& v) { return text(v); }

void write_csv(std::ostream& os, const AuditHeader& audit, const std::vector<Record>& rows) {
  for (const auto& [k, v] : audit) os << "# " << k << " = " << v << '\n';
  if (rows.empty()) return;
  const Record& first = rows.front();
  for (std::size_t i = 0; i < first.size(); ++i) os << (i ? "," : "") << csv_cell(first[i].key);
  os << '\n';
  for (const auto& r : rows) {
    if (r.size() != first.size()) throw ParameterError("write_csv: rows have different columns");
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i].key != first[i].key) throw ParameterError("write_csv: column '" + r[i].key + "' out of order");
      os << (i ? "," : "") << csv_cell(text(r[i].value));
    }
    os << '\n';
  }
}

void write_json_lines(std::ostream& os, const AuditHeader& audit, const std::vector<Record>& rows) {
  Record header;
  for (const auto& [k, v] : audit) header.push_back({k, v});
  os << "{\"audit\":" << json_object(header) << "}\n";
  for (const auto& r : rows) os << json_object(r) << '\n';
}

void write_records(std::ostream& os, Format f, const AuditHeader& audit, const std::vector<Record>& rows) {
  if (f == Format::Csv) write_csv(os, audit, rows);
  else write_json_lines(os, audit, rows);
}

Record to_record(const Convergent& c) {
  return {{"j", static_cast<std::int64_t>(c.index)},
          {"p", c.p.str()},
          {"q", c.q.str()},
          {"h", static_cast<double>(c.h)},
          {"rate", opt(c.rate)},
          {"parity", std::string(to_string(c.parity))}};
}

Record to_record(const ComplexValue& v) {
  return {{"re", v.value.real()}, {"im", v.value.imag()}, {"err", v.err}};
}

Record to_record(const ScalingFit& fit) {
  return {{"slope", fit.slope},
          {"intercept", fit.intercept},
          {"slope_stderr", fit.slope_stderr},
          {"residual_rms", fit.residual_rms},
          {"points_used", static_cast<std::int64_t>(fit.points_used)},
          {"points_dropped", static_cast<std::int64_t>(fit.points_dropped)}};
}

std::vector<Record> profile_records(const AnnulusProfile& profile) {
  std::vector<Record> out;
  for (const auto& s : profile.samples) {
    out.push_back({{"H", s.H}, {"mean", s.mean}, {"n_quad", static_cast<std::int64_t>(s.n_quad)}});
  }
  return out;
}

std::vector<Record> scale_records(const AlphaReport& report) {
  std::vector<Record> out;
  for (const auto& r : report.scales) {
    out.push_back({{"j", static_cast<std::int64_t>(r.j)},
                   {"H", r.H},
                   {"centre_index", static_cast<std::int64_t>(r.centre_index)},
                   {"centre_q", r.centre_q},
                   {"mean", r.sample.mean},
                   {"n_quad", static_cast<std::int64_t>(r.sample.n_quad)},
                   {"dual_terms", static_cast<std::int64_t>(r.sample.dual_terms)},
                   {"tail_fraction", r.sample.tail_fraction},
                   {"audit", r.sample.audit},
                   {"used", r.used},
                   {"note", r.note}});
  }
  return out;
}

std::vector<Record> sample_records(const CheckReport& report) {
  std::vector<Record> out;
  for (const auto& s : report.samples) {
    out.push_back({{"check", std::string(to_string(report.id))},
                   {"cell", s.cell},
                   {"x", s.x},
                   {"value", s.value},
                   {"bound", s.bound},
                   {"ok", s.ok}});
  }
  return out;
}

Record summary_record(const CheckReport& report) {
  Record r = {{"check", std::string(to_string(report.id))},
              {"pass", report.pass},
              {"tolerance", report.tolerance},
              {"criterion", report.criterion},
              {"grid", report.grid},
              {"first_failure", report.first_failure}};
  for (const auto& [k, v] : report.constants) r.push_back({k, v});
  return r;
}

std::string check_table(const std::vector<CheckReport>& reports) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %-5s %-12s %s\n", "check", "pass", "tolerance", "constants");
  os << line;
  for (const auto& r : reports) {
    std::string consts;
    for (std::size_t i = 0; i < r.constants.size() && i < 4; ++i) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%s%s=%.4g", i ? ", " : "", r.constants[i].first.c_str(), r.constants[i].second);
      consts += buf;
    }
    if (r.constants.size() > 4) consts += ", ...";
    std::snprintf(line, sizeof line, "%-18s %-5s %-12.4g ", to_string(r.id), r.pass ? "yes" : "NO", r.tolerance);
    os << line << consts << '\n';
    if (!r.pass) os << "  first failure: " << r.first_failure << '\n';
  }
  return os.str();
}

}  // namespace lacunary
