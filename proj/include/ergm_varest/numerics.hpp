#pragma once

#include <cmath>

namespace ergm {

inline double logistic(double x) {
  if (x >= 0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// log(1 + e^x) without overflow.
inline double log1p_exp(double x) {
  if (x > 0)
    return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

/// Bernoulli negative entropy I(x) = x log x + (1-x) log(1-x), with I(0) = I(1) = 0.
inline double bernoulli_entropy(double x) {
  double value = 0.0;
  if (x > 0.0)
    value += x * std::log(x);
  if (x < 1.0)
    value += (1.0 - x) * std::log1p(-x);
  return value;
}

} // namespace ergm
