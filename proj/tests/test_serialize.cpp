#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "lacunary/errors.hpp"
#include "lacunary/serialize.hpp"

using namespace lacunary;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Serialize, SeventeenDigitsRoundTrip) {
  for (double v : {0.1, -0.6931471805599453, 1.0 / 3.0, 6.02214076e23, 5e-324, 0.125}) {
    const std::string s = format_number(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
  }
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(INFINITY), "inf");
  EXPECT_EQ(format_number(-INFINITY), "-inf");
  EXPECT_EQ(format_number(NAN), "nan");
}

TEST(Serialize, CsvHasAuditThenHeader) {
  std::ostringstream os;
  const AuditHeader audit = {{"command", "exponent"}, {"s", "0.75"}};
  write_csv(os, audit, {{{"H", 0.5}, {"mean", 0.25}, {"n_quad", std::int64_t{64}}},
                        {{"H", 0.25}, {"mean", 0.125}, {"n_quad", std::int64_t{128}}}});
  const auto l = lines(os.str());
  ASSERT_EQ(l.size(), 5u);
  EXPECT_EQ(l[0], "# command = exponent");
  EXPECT_EQ(l[1], "# s = 0.75");
  EXPECT_EQ(l[2], "H,mean,n_quad");
  EXPECT_EQ(l[3], "0.5,0.25,64");
}

TEST(Serialize, CsvQuotesAndRejectsRaggedRows) {
  std::ostringstream os;
  write_csv(os, {}, {{{"note", std::string("a, \"b\"")}}});
  EXPECT_EQ(lines(os.str()).at(1), "\"a, \"\"b\"\"\"");
  EXPECT_THROW(write_csv(os, {}, {{{"a", 1.0}}, {{"b", 1.0}}}), ParameterError);
  EXPECT_THROW(write_csv(os, {}, {{{"a", 1.0}}, {{"a", 1.0}, {"b", 2.0}}}), ParameterError);
}

TEST(Serialize, JsonLinesParse) {
  std::ostringstream os;
  const ComplexValue v{Complex(-0.6931471805599453, 1e-20), 3e-12};
  write_json_lines(os, {{"point", "rat:1/2"}}, {to_record(v), {{"x", NAN}, {"flag", true}, {"none", Value{}}}});
  const auto l = lines(os.str());
  ASSERT_EQ(l.size(), 3u);
  const auto audit = nlohmann::json::parse(l[0]);
  EXPECT_EQ(audit["audit"]["point"], "rat:1/2");
  const auto rec = nlohmann::json::parse(l[1]);
  EXPECT_EQ(rec["re"].get<double>(), -0.6931471805599453);
  EXPECT_EQ(rec["im"].get<double>(), 1e-20);
  EXPECT_EQ(rec["err"].get<double>(), 3e-12);
  const auto other = nlohmann::json::parse(l[2]);
  EXPECT_TRUE(other["x"].is_null());
  EXPECT_TRUE(other["flag"].get<bool>());
  EXPECT_TRUE(other["none"].is_null());
}

TEST(Serialize, ProfileColumns) {
  AnnulusProfile p;
  p.samples = {{1e-3, 0.5, 64}, {1e-4, 0.3, 128}};
  const auto rows = profile_records(p);
  ASSERT_EQ(rows.size(), 2u);
  ASSERT_EQ(rows[0].size(), 3u);
  EXPECT_EQ(rows[0][0].key, "H");
  EXPECT_EQ(rows[0][1].key, "mean");
  EXPECT_EQ(rows[0][2].key, "n_quad");
}

TEST(Serialize, ConvergentRecordIsExact) {
  const auto cs = convergents(parse_point("quad:(0+1*sqrt(2))/1-1"), 40);
  const Record r = to_record(cs.back());
  EXPECT_EQ(std::get<std::string>(r[2].value), cs.back().q.str());
  EXPECT_GT(std::get<std::string>(r[2].value).size(), 15u);
}

TEST(Serialize, Deterministic) {
  auto render = [] {
    std::ostringstream os;
    write_records(os, Format::Json, {{"seed", "7"}}, {to_record(ComplexValue{Complex(1.0 / 3.0, -2.0 / 7.0), 1e-9})});
    write_records(os, Format::Csv, {{"seed", "7"}}, {to_record(ComplexValue{Complex(1.0 / 3.0, -2.0 / 7.0), 1e-9})});
    return os.str();
  };
  EXPECT_EQ(render(), render());
}

TEST(Serialize, FormatNames) {
  EXPECT_EQ(format_from_string("csv"), Format::Csv);
  EXPECT_EQ(format_from_string("json"), Format::Json);
  EXPECT_THROW(format_from_string("xml"), ParseError);
}

TEST(Serialize, CheckTableListsEveryCheck) {
  CheckReport a;
  a.id = CheckId::Poisson;
  a.pass = true;
  a.constants = {{"max_deviation", 1e-14}};
  CheckReport b;
  b.id = CheckId::GL2Average;
  b.first_failure = "spread s=0.75";
  const std::string t = check_table({a, b});
  EXPECT_NE(t.find("Poisson"), std::string::npos);
  EXPECT_NE(t.find("first failure: spread s=0.75"), std::string::npos);
  EXPECT_EQ(summary_record(b)[1].key, "pass");
}
