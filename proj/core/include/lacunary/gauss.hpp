#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "lacunary/diophantine.hpp"
#include "lacunary/precision.hpp"

namespace lacunary {

/// theta_m = tau_m / sqrt(q), tau_m = sum_{b=0}^{q-1} e^{2 pi i (p b^2 + m b)/q}.
struct GaussTheta {
  std::int64_t p = 0;
  std::int64_t q = 1;
  std::vector<Complex> table;  // theta_0 .. theta_{q-1}
  ParityClass parity = ParityClass::NotTwoOdd;

  /// theta_m for any integer m (the table is q-periodic).
  [[nodiscard]] const Complex& operator[](std::int64_t m) const {
    std::int64_t r = m % q;
    if (r < 0) r += q;
    return table[static_cast<std::size_t>(r)];
  }
};

/// Full table by direct summation. Requires q >= 1 and gcd(p, q) = 1.
GaussTheta gauss_theta(std::int64_t p, std::int64_t q);

/// Tables for every p in [0, q) coprime to q, in increasing p. Same direct
/// sums as gauss_theta, with the cosine rows shared across p.
std::vector<GaussTheta> gauss_theta_family(std::int64_t q);

/// One theta_m by direct summation in O(q).
Complex gauss_theta_at(std::int64_t p, std::int64_t q, std::int64_t m);

/// Literal O(q) sum over all b with no symmetry folding.
Complex gauss_theta_reference(std::int64_t p, std::int64_t q, std::int64_t m);

/// Shared, lazily built table keyed by (p mod q, q).
std::shared_ptr<const GaussTheta> cached_gauss_theta(std::int64_t p, std::int64_t q);
void clear_gauss_cache();

/// CSV with columns m,re,im,abs.
void write_theta_csv(std::ostream& os, const GaussTheta& g);

}  // namespace lacunary
