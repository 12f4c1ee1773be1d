#pragma once

#include <functional>

#include "lacunary/precision.hpp"

namespace lacunary {

struct QuadResult {
  Complex value;
  double err = 0.0;  // QUADPACK-style estimate from the embedded Gauss rule
  double abs = 0.0;  // integral of |f|, for rounding bounds

  QuadResult& operator+=(const QuadResult& o);
};

/// 15-point Gauss-Kronrod rule on [a, b] for a complex integrand.
QuadResult gauss_kronrod_panel(const std::function<Complex(double)>& f, double a, double b);

}  // namespace lacunary
