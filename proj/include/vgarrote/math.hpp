#pragma once

#include <cmath>

namespace vg {

/// Logistic 1/(1+e^-x), evaluated without overflow for either sign of x.
inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double logit(double m) { return std::log(m / (1.0 - m)); }

/// m log m + (1-m) log(1-m), with 0 log 0 = 0.
inline double binary_neg_entropy(double m) {
  double h = 0.0;
  if (m > 0.0) h += m * std::log(m);
  if (m < 1.0) h += (1.0 - m) * std::log1p(-m);
  return h;
}

}  // namespace vg
