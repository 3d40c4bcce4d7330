#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include <boost/math/tools/roots.hpp>

#include "orlicz/errors.hpp"

namespace orlicz::roots {

/// Bracket [lo, hi] of a monotone predicate, reduced to adjacent doubles.
struct Bracket {
  double lo;
  double hi;
};

/// Bisection on a function with f(lo) and f(hi) of opposite sign, run until
/// the bracket cannot shrink further. Both endpoints are returned so callers
/// can pick the side that satisfies their one-sided constraint.
template <class F>
Bracket bisect(F&& f, double lo, double hi) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return {lo, lo};
  if (fhi == 0.0) return {hi, hi};
  if ((flo < 0.0) == (fhi < 0.0)) {
    throw numeric_error("bisection: no sign change on [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
  }
  std::uintmax_t max_iter = 4000;
  const auto tol = [](double a, double b) {
    return std::nextafter(a, b) == b || a == b;
  };
  auto [a, b] = boost::math::tools::bisect(f, lo, hi, tol, max_iter);
  return {a, b};
}

/// Smallest-upper bracket for an increasing function: returns x with
/// f(x) >= target, adjacent to a point with f < target. The search grows
/// `hi` geometrically from `guess` when needed.
template <class F>
Bracket solve_increasing(F&& f, double target, double lo, double guess,
                         int max_expansions = 200) {
  double hi = guess > lo ? guess : lo + 1.0;
  int k = 0;
  while (f(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (++k > max_expansions || !std::isfinite(hi)) {
      throw numeric_error("bracket not found: f stays below " + std::to_string(target) +
                          " on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
  }
  if (f(lo) >= target) return {lo, lo};
  return bisect([&](double x) { return f(x) - target; }, lo, hi);
}

}  // namespace orlicz::roots
