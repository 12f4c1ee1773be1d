#include "lacunary/precision.hpp"

namespace lacunary {

DD to_dd(const BigFloat& x) {
  const double hi = x.convert_to<double>();
  if (!std::isfinite(hi) || hi == 0.0) return DD(hi);
  const double lo = BigFloat(x - BigFloat(hi)).convert_to<double>();
  return eft::quick_two_sum(hi, lo);
}

BigFloat from_dd(const DD& x) { return BigFloat(x.hi) + BigFloat(x.lo); }

}  // namespace lacunary
