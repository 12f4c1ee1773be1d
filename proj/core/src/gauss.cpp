#include "lacunary/gauss.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <shared_mutex>
#include <utility>

#include "lacunary/errors.hpp"
#include "lacunary/parallel.hpp"

namespace lacunary {

namespace {

__extension__ using Int128 = __int128;

void check_args(std::int64_t p, std::int64_t q) {
  if (q <= 0) throw ParameterError("gauss_theta: q must be positive");
  if (std::gcd(p, q) != 1) throw ParameterError("gauss_theta: p and q must be coprime");
}

std::int64_t mod(std::int64_t a, std::int64_t q) {
  const std::int64_t r = a % q;
  return r < 0 ? r + q : r;
}

std::vector<Complex> roots_of_unity(std::int64_t q) {
  std::vector<Complex> w(static_cast<std::size_t>(q));
  for (std::int64_t k = 0; k < q; ++k) {
    // Use the nearer of k and k - q to keep the argument small.
    const double t = static_cast<double>(2 * k <= q ? k : k - q) / static_cast<double>(q);
    w[static_cast<std::size_t>(k)] = expi_turns(t);
  }
  return w;
}

// u_b = e(p b^2 / q) for b in [0, q/2].
std::vector<Complex> quadratic_phases(std::int64_t p, std::int64_t q, const std::vector<Complex>& w) {
  const std::int64_t half = q / 2;
  std::vector<Complex> u(static_cast<std::size_t>(half + 1));
  for (std::int64_t b = 0; b <= half; ++b) {
    const auto k = static_cast<std::int64_t>((static_cast<Int128>(b) * b % q) * p % q);
    u[static_cast<std::size_t>(b)] = w[static_cast<std::size_t>(k)];
  }
  return u;
}

// tau_m with the terms b and q - b folded into u_b * 2 cos(2 pi m b / q).
Complex folded_tau(std::int64_t m, std::int64_t q, const std::vector<Complex>& u,
                   const std::vector<Complex>& w) {
  const std::int64_t upper = (q + 1) / 2;  // b in [1, upper) pairs with q - b
  double re = u[0].real();
  double im = u[0].imag();
  std::int64_t idx = 0;
  for (std::int64_t b = 1; b < upper; ++b) {
    idx += m;
    if (idx >= q) idx -= q;
    const double c = 2.0 * w[static_cast<std::size_t>(idx)].real();
    re += c * u[static_cast<std::size_t>(b)].real();
    im += c * u[static_cast<std::size_t>(b)].imag();
  }
  if (q % 2 == 0) {
    const Complex mid = u[static_cast<std::size_t>(q / 2)];
    const double sign = m % 2 == 0 ? 1.0 : -1.0;
    re += sign * mid.real();
    im += sign * mid.imag();
  }
  return {re, im};
}

}  // namespace

GaussTheta gauss_theta(std::int64_t p, std::int64_t q) {
  check_args(p, q);
  GaussTheta g;
  g.q = q;
  g.p = mod(p, q);
  g.parity = parity_of(BigInt(q));
  g.table.assign(static_cast<std::size_t>(q), Complex{});
  const auto w = roots_of_unity(q);
  const auto u = quadratic_phases(g.p, q, w);
  const double norm = 1.0 / std::sqrt(static_cast<double>(q));
  const std::int64_t half = q / 2;
  constexpr std::int64_t kChunk = 64;
  const auto chunks = static_cast<std::size_t>((half + kChunk) / kChunk);
  parallel_for(chunks, [&](std::size_t c) {
    const std::int64_t lo = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t hi = std::min(half, lo + kChunk - 1);
    for (std::int64_t m = lo; m <= hi; ++m) {
      const Complex t = folded_tau(m, q, u, w) * norm;
      g.table[static_cast<std::size_t>(m)] = t;
      if (m != 0) g.table[static_cast<std::size_t>(q - m)] = t;
    }
  });
  return g;
}

std::vector<GaussTheta> gauss_theta_family(std::int64_t q) {
  if (q <= 0) throw ParameterError("gauss_theta_family: q must be positive");
  const auto w = roots_of_unity(q);
  const std::int64_t half = q / 2;
  const std::int64_t upper = (q + 1) / 2;
  const double norm = 1.0 / std::sqrt(static_cast<double>(q));

  std::vector<GaussTheta> out;
  std::vector<std::vector<double>> ure, uim;
  for (std::int64_t p = 0; p < q; ++p) {
    if (std::gcd(p, q) != 1) continue;
    GaussTheta g;
    g.p = p;
    g.q = q;
    g.parity = parity_of(BigInt(q));
    g.table.assign(static_cast<std::size_t>(q), Complex{});
    const auto u = quadratic_phases(p, q, w);
    std::vector<double> re(u.size()), im(u.size());
    for (std::size_t b = 0; b < u.size(); ++b) {
      re[b] = u[b].real();
      im[b] = u[b].imag();
    }
    ure.push_back(std::move(re));
    uim.push_back(std::move(im));
    out.push_back(std::move(g));
  }

  const auto nb = static_cast<std::size_t>(upper);
  parallel_for(static_cast<std::size_t>(half + 1), [&](std::size_t mi) {
    const auto m = static_cast<std::int64_t>(mi);
    std::vector<double> row(nb, 0.0);
    std::int64_t idx = 0;
    for (std::size_t b = 1; b < nb; ++b) {
      idx += m;
      if (idx >= q) idx -= q;
      row[b] = 2.0 * w[static_cast<std::size_t>(idx)].real();
    }
    const double sign = m % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t k = 0; k < out.size(); ++k) {
      const double* re = ure[k].data();
      const double* im = uim[k].data();
      double r[4] = {re[0], 0.0, 0.0, 0.0};
      double i[4] = {im[0], 0.0, 0.0, 0.0};
      std::size_t b = 1;
      for (; b + 4 <= nb; b += 4) {
        for (int l = 0; l < 4; ++l) {
          r[l] += row[b + l] * re[b + l];
          i[l] += row[b + l] * im[b + l];
        }
      }
      for (; b < nb; ++b) {
        r[0] += row[b] * re[b];
        i[0] += row[b] * im[b];
      }
      double tr = (r[0] + r[1]) + (r[2] + r[3]);
      double ti = (i[0] + i[1]) + (i[2] + i[3]);
      if (q % 2 == 0) {
        tr += sign * re[half];
        ti += sign * im[half];
      }
      const Complex t = Complex{tr, ti} * norm;
      out[k].table[mi] = t;
      if (m != 0) out[k].table[static_cast<std::size_t>(q - m)] = t;
    }
  });
  return out;
}

Complex gauss_theta_at(std::int64_t p, std::int64_t q, std::int64_t m) {
  check_args(p, q);
  const auto w = roots_of_unity(q);
  const auto u = quadratic_phases(mod(p, q), q, w);
  return folded_tau(mod(m, q), q, u, w) / std::sqrt(static_cast<double>(q));
}

Complex gauss_theta_reference(std::int64_t p, std::int64_t q, std::int64_t m) {
  check_args(p, q);
  const std::int64_t pr = mod(p, q);
  const std::int64_t mr = mod(m, q);
  Complex acc{};
  for (std::int64_t b = 0; b < q; ++b) {
    const auto k = static_cast<std::int64_t>(
        (static_cast<Int128>(pr) * b % q * b + static_cast<Int128>(mr) * b) % q);
    acc += expi_turns(static_cast<double>(k) / static_cast<double>(q));
  }
  return acc / std::sqrt(static_cast<double>(q));
}

namespace {

std::shared_mutex g_cache_mutex;
std::map<std::pair<std::int64_t, std::int64_t>, std::shared_ptr<const GaussTheta>> g_cache;

}  // namespace

std::shared_ptr<const GaussTheta> cached_gauss_theta(std::int64_t p, std::int64_t q) {
  check_args(p, q);
  const auto key = std::make_pair(mod(p, q), q);
  {
    std::shared_lock lock(g_cache_mutex);
    auto it = g_cache.find(key);
    if (it != g_cache.end()) return it->second;
  }
  auto built = std::make_shared<const GaussTheta>(gauss_theta(key.first, q));
  std::unique_lock lock(g_cache_mutex);
  auto [it, inserted] = g_cache.emplace(key, std::move(built));
  return it->second;
}

void clear_gauss_cache() {
  std::unique_lock lock(g_cache_mutex);
  g_cache.clear();
}

void write_theta_csv(std::ostream& os, const GaussTheta& g) {
  const auto old = os.precision(17);
  os << "m,re,im,abs\n";
  for (std::size_t m = 0; m < g.table.size(); ++m) {
    const Complex& t = g.table[m];
    os << m << ',' << t.real() << ',' << t.imag() << ',' << std::abs(t) << '\n';
  }
  os.precision(old);
}

}  // namespace lacunary
