#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/orlicz_function.hpp"

namespace orlicz {

struct SummabilityReport {
  double eps = 0.0;
  double s = 0.0;
  std::vector<double> terms;         // M(eps s^i) / M(s^i), i = 1..
  std::vector<double> partial_sums;
  double last_decade_increment = 0.0;  // sum of the last (up to) 10 terms
  std::vector<double> tail_ratios;     // term_{i+1} / term_i over the last 10 terms
  bool convergent = false;
  bool truncated = false;  // stopped early because M(s^i) left the normal range
  std::size_t truncated_at = 0;
};

/// Partial sums of sum_i M(eps s^i) / M(s^i). The series is called convergent
/// when every term ratio over the last ten terms stays below 1 - 1e-3.
inline SummabilityReport summability_check(const OrliczFunction& m, double eps, double s,
                                           std::size_t i_max) {
  if (!(eps > 0.0 && eps < 1.0)) throw validation_error("summability_check: eps must lie in (0,1)");
  if (!(s > 0.0 && s < 1.0)) throw validation_error("summability_check: s must lie in (0,1)");
  if (i_max == 0) throw validation_error("summability_check: i_max must be >= 1");

  SummabilityReport r;
  r.eps = eps;
  r.s = s;
  double sum = 0.0;
  for (std::size_t i = 1; i <= i_max; ++i) {
    const double x = std::pow(s, double(i));
    const double denom = m(x);
    const double numer = m(eps * x);
    if (denom == 0.0) {
      throw validation_error("summability_check: M(s^" + std::to_string(i) +
                             ") = 0, M is degenerate on the sampled range");
    }
    if (!(denom >= std::numeric_limits<double>::min()) ||
        !(numer >= std::numeric_limits<double>::min())) {
      r.truncated = true;
      r.truncated_at = i;
      break;
    }
    const double term = numer / denom;
    sum += term;
    r.terms.push_back(term);
    r.partial_sums.push_back(sum);
  }
  const std::size_t n = r.terms.size();
  const std::size_t window = std::min<std::size_t>(10, n);
  for (std::size_t k = n - window; k < n; ++k) r.last_decade_increment += r.terms[k];
  for (std::size_t k = n - window; k + 1 < n; ++k) {
    r.tail_ratios.push_back(r.terms[k + 1] / r.terms[k]);
  }
  r.convergent = !r.tail_ratios.empty();
  for (double q : r.tail_ratios)
    if (!(q < 1.0 - 1e-3)) r.convergent = false;
  return r;
}

struct EquivalenceVerdict {
  bool equivalent = false;
  double big_k = 0.0;  // K in K^{-1} M(t/k) <= N(t) <= K M(k t)
  double small_k = 0.0;
  std::optional<double> violating_t;  // for the last lattice pair tried
};

/// Searches K, k in {1, 2, 4, ..., 64} (k outer) for
/// K^{-1} M(t/k) <= N(t) <= K M(k t) on a log grid over [1e-8 t0, t0].
/// A negative verdict only means no lattice pair worked on this grid.
inline EquivalenceVerdict equivalence_check(const OrliczFunction& m, const OrliczFunction& n,
                                            double t0, std::size_t grid) {
  if (!(t0 > 0.0)) throw validation_error("equivalence_check: t0 must be positive");
  if (grid < 2) throw validation_error("equivalence_check: grid must have >= 2 points");
  std::vector<double> ts;
  const double a = std::log(t0 * 1e-8), b = std::log(t0);
  for (std::size_t k = 0; k < grid; ++k)
    ts.push_back(std::exp(a + (b - a) * double(k) / double(grid - 1)));
  ts.back() = t0;

  constexpr double slack = 1e-12;
  EquivalenceVerdict verdict;
  for (double small_k = 1.0; small_k <= 64.0; small_k *= 2.0) {
    for (double big_k = 1.0; big_k <= 64.0; big_k *= 2.0) {
      std::optional<double> bad;
      for (double t : ts) {
        const double nt = n(t);
        const double lower = m(t / small_k) / big_k;
        const double upper = big_k * m(small_k * t);
        if (nt < lower * (1.0 - slack) || nt > upper * (1.0 + slack)) {
          bad = t;
          break;
        }
      }
      if (!bad) return {true, big_k, small_k, std::nullopt};
      verdict.violating_t = bad;
    }
  }
  return verdict;
}

}  // namespace orlicz
