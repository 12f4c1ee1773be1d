#include <cstdlib>
#include <regex>
#include <string>

#include "lacunary/diophantine.hpp"
#include "lacunary/errors.hpp"

namespace lacunary {

namespace {

const std::regex& re_rat() {
  static const std::regex re(R"(^rat:\s*([+-]?\d+)\s*/\s*([+-]?\d+)\s*$)");
  return re;
}
const std::regex& re_quad() {
  static const std::regex re(
    R"(^quad:\s*\(\s*([+-]?\d+)\s*([+-])\s*(?:(\d+)\s*\*\s*)?sqrt\(\s*(\d+)\s*\)\s*\)\s*/\s*([+-]?\d+)\s*(?:([+-])\s*(\d+))?\s*$)");
  return re;
}
const std::regex& re_cf() {
  static const std::regex re(R"(^cf:\s*\[\s*([+-]?\d+)\s*(?:;\s*(\d+(?:\s*,\s*\d+)*))?\s*\]\s*$)");
  return re;
}
const std::regex& re_rate() {
  static const std::regex re(R"(^rate:\s*r\s*=\s*([^,\s]+)\s*(?:,\s*seed\s*=\s*([+-]?\d+))?\s*$)");
  return re;
}
const std::regex& re_digits() {
  static const std::regex re(R"(\d+)");
  return re;
}

BigInt big(const std::string& s) {
  if (!s.empty() && s[0] == '+') return BigInt(s.substr(1));
  return BigInt(s);
}

RealPoint parse_impl(const std::string& raw) {
  const auto first = raw.find_first_not_of(" \t\r\n");
  const auto last = raw.find_last_not_of(" \t\r\n");
  const std::string text = first == std::string::npos ? std::string() : raw.substr(first, last - first + 1);
  std::smatch m;
  if (std::regex_match(text, m, re_rat())) return RealPoint::rational(big(m[1]), big(m[2]));
  if (std::regex_match(text, m, re_quad())) {
    BigInt a = big(m[1]);
    BigInt b = m[3].matched ? big(m[3]) : BigInt(1);
    if (m[2] == "-") b = -b;
    const BigInt d = big(m[4]);
    const BigInt c = big(m[5]);
    if (m[6].matched) {
      const BigInt k = big(m[7]);
      a += (m[6] == "-" ? -k : k) * c;
    }
    return RealPoint::quadratic(a, b, d, c);
  }
  if (std::regex_match(text, m, re_cf())) {
    std::vector<BigInt> digits{big(m[1])};
    if (m[2].matched) {
      const std::string rest = m[2];
      for (std::sregex_iterator it(rest.begin(), rest.end(), re_digits()), end; it != end; ++it) {
        digits.push_back(big(it->str()));
      }
    }
    return RealPoint::explicit_cf(std::move(digits));
  }
  if (std::regex_match(text, m, re_rate())) {
    const std::string rs = m[1];
    char* endp = nullptr;
    const double r = std::strtod(rs.c_str(), &endp);
    if (endp != rs.c_str() + rs.size()) throw ParseError("bad rate value: " + rs);
    const std::int64_t seed = m[2].matched ? std::stoll(m[2]) : 0;
    return RealPoint::generated(r, seed);
  }
  throw ParseError("unrecognised point: '" + text + "'");
}

}  // namespace

RealPoint parse_point(const std::string& text) {
  try {
    return parse_impl(text);
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid point '") + text + "': " + e.what());
  }
}

}  // namespace lacunary
