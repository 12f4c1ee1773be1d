#pragma once

// Artifact writers. Numbers are printed with 17 significant digits, CSV
// files start with "# key = value" audit lines followed by a header row,
// and JSON output is one object per line after an {"audit": ...} line.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lacunary/diophantine.hpp"
#include "lacunary/local_l2.hpp"
#include "lacunary/series.hpp"
#include "lacunary/verify.hpp"

namespace lacunary {

using Value = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

struct Field {
  std::string key;
  Value value;
};

using Record = std::vector<Field>;

/// Resolved configuration, in the order it should be printed.
using AuditHeader = std::vector<std::pair<std::string, std::string>>;

enum class Format { Csv, Json };

const char* to_string(Format f);
/// "csv" or "json"; throws ParseError otherwise.
Format format_from_string(const std::string& name);

/// %.17g; "inf", "-inf", "nan" for non-finite values.
std::string format_number(double v);

/// Plain text of a value as it appears in a CSV cell, before quoting.
std::string format_value(const Value& v);

/// All records must share the keys of the first one. Throws ParameterError.
void write_csv(std::ostream& os, const AuditHeader& audit, const std::vector<Record>& rows);
void write_json_lines(std::ostream& os, const AuditHeader& audit, const std::vector<Record>& rows);
void write_records(std::ostream& os, Format f, const AuditHeader& audit, const std::vector<Record>& rows);

Record to_record(const Convergent& c);
/// {re, im, err}.
Record to_record(const ComplexValue& v);
Record to_record(const ScalingFit& fit);
/// Rows with columns H, mean, n_quad.
std::vector<Record> profile_records(const AnnulusProfile& profile);
/// Per-scale audit trail of an exponent measurement.
std::vector<Record> scale_records(const AlphaReport& report);
/// One row per sample, tagged with the check id.
std::vector<Record> sample_records(const CheckReport& report);
Record summary_record(const CheckReport& report);

/// Aligned text table: check, pass, key constants, first failure.
std::string check_table(const std::vector<CheckReport>& reports);

}  // namespace lacunary
