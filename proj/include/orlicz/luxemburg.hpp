#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "orlicz/orlicz_function.hpp"
#include "orlicz/roots.hpp"
#include "orlicz/sequence.hpp"

namespace orlicz {

/// sum_i mult_i * M(|v_i| / rho).
inline double modular(const OrliczFunction& m, std::span<const RepeatedValue> values,
                      double rho) {
  double sum = 0.0;
  for (const auto& rv : values) sum += rv.multiplicity * m(std::abs(rv.value) / rho);
  return sum;
}

/// Luxemburg norm inf{rho > 0 : sum M(|a_i| / rho) <= 1} of a vector given as
/// repeated values. The returned rho is on the feasible side of the bisection
/// bracket, so the modular at rho is <= 1 and within rounding of 1.
inline double luxemburg_norm(const OrliczFunction& m, std::span<const RepeatedValue> values) {
  double largest = 0.0;
  for (const auto& rv : values)
    if (rv.multiplicity > 0.0) largest = std::max(largest, std::abs(rv.value));
  if (largest == 0.0) return 0.0;

  const auto excess = [&](double rho) { return 1.0 - modular(m, values, rho); };
  double hi = largest;
  for (int k = 0; excess(hi) < 0.0; ++k) {
    hi *= 2.0;
    if (k > 2000 || !std::isfinite(hi)) throw numeric_error("luxemburg_norm: modular stays above 1");
  }
  double lo = hi;
  for (int k = 0; excess(lo) >= 0.0; ++k) {
    lo *= 0.5;
    if (k > 2000 || lo == 0.0) throw numeric_error("luxemburg_norm: modular stays below 1");
  }
  return roots::bisect(excess, lo, hi).hi;
}

inline double luxemburg_norm(const OrliczFunction& m, const FiniteSequence& a) {
  std::vector<RepeatedValue> values;
  values.reserve(a.support_size());
  for (const auto& e : a.entries()) values.push_back({e.value, 1.0});
  return luxemburg_norm(m, values);
}

inline double modular(const OrliczFunction& m, const FiniteSequence& a, double rho) {
  double sum = 0.0;
  for (const auto& e : a.entries()) sum += m(std::abs(e.value) / rho);
  return sum;
}

}  // namespace orlicz
