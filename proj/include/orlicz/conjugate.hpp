#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>


#include "orlicz/errors.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/roots.hpp"

namespace orlicz {

/// M together with its Legendre-Young conjugate M*(t) = sup_u (u t - M(u)).
///
/// The supremum is attained where M'(u) = t, so evaluation locates the
/// maximizer of the concave objective u t - M(u) by bisection on the sign of
/// its derivative t - M'(u). That maximizer is (M')^{-1}(t) = (M*)'(t).
class ConjugatePair {
public:
  explicit ConjugatePair(OrliczFunction base) : base_(std::move(base)) {
    if (auto defect = regularity_defect(base_)) {
      throw validation_error("conjugate of " + base_.spec() + ": " + *defect);
    }
  }

  const OrliczFunction& base() const { return base_; }

  /// (M*)'(t) = (M')^{-1}(t): the smallest u with M'(u) >= t.
  double derivative(double t) const {
    if (t <= 0.0) return 0.0;
    return maximizer(t).hi;
  }

  /// M*(t).
  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    const auto b = maximizer(t);
    return std::max(objective(b.lo, t), objective(b.hi, t));
  }
  double value(double t) const { return (*this)(t); }

  /// N(t) = M*(t) / t, defined for t > 0.
  double quotient(double t) const { return (*this)(t) / t; }

  /// (M*)^{-1}(y): the smallest t with M*(t) >= y.
  double inverse(double y) const {
    if (y <= 0.0) return 0.0;
    return roots::solve_increasing([this](double t) { return (*this)(t); }, y, 0.0, 1.0).hi;
  }

  /// M*(t) through the integral form int_0^t (M')^{-1}(u) du, evaluated by
  /// adaptive Gauss-Kronrod quadrature on dyadic pieces [t 2^-(k+1), t 2^-k];
  /// (M')^{-1} may rise steeply near 0. The leftover piece near 0 is bounded
  /// by its right-end value and counted as error. Independent of the
  /// variational route except for the shared inverse of M'.
  double by_quadrature(double t) const {
    if (t <= 0.0) return 0.0;
    const auto f = [this](double u) { return derivative(u); };
    double value = 0.0, err_total = 0.0, l1_total = 0.0;
    double hi = t;
    for (int k = 0; k < 200; ++k) {
      const double lo = 0.5 * hi;
      double err = 0.0, l1 = 0.0;
      value += quadrature::integrate<15>(f, lo, hi, 10, 1e-12, &err, &l1);
      err_total += err;
      l1_total += l1;
      hi = lo;
      if (hi * derivative(hi) <= 1e-12 * value) break;
    }
    err_total += hi * derivative(hi);
    if (!(err_total <= 1e-8 * l1_total + 1e-300)) {
      throw numeric_error("conjugate quadrature did not converge on " +
                          detail::interval(0.0, t));
    }
    return value;
  }

private:
  roots::Bracket maximizer(double t) const {
    return roots::solve_increasing([this](double u) { return base_.derivative(u); }, t, 0.0,
                                   1.0);
  }
  double objective(double u, double t) const { return u * t - base_(u); }

  OrliczFunction base_;
};

/// Builds the pair and cross-checks the variational conjugate against
/// quadrature at a few points. Returns the largest relative discrepancy
/// through `cross_check` when requested.
inline ConjugatePair conjugate(const OrliczFunction& m, double* cross_check = nullptr) {
  ConjugatePair pair(m);
  double worst = 0.0;
  for (double t : {0.05, 0.25, 0.5, 1.0}) {
    const double a = pair(t);
    const double b = pair.by_quadrature(t);
    if (a > 0.0) worst = std::max(worst, std::abs(a - b) / a);
  }
  if (worst > 1e-6) {
    throw numeric_error("conjugate of " + m.spec() +
                        ": variational and quadrature forms disagree (relative " +
                        detail::format_double(worst) + ")");
  }
  if (cross_check) *cross_check = worst;
  return pair;
}

/// Levels t_n = (M*)^{-1}(1/n), n = 1..n_max. Immutable once built.
class LevelSequence {
public:
  LevelSequence() = default;

  LevelSequence(const ConjugatePair& pair, std::size_t n_max) {
    if (n_max == 0) throw validation_error("level_sequence: n_max must be >= 1");
    values_.reserve(n_max);
    residuals_.reserve(n_max);
    double guess = 1.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
      const double target = 1.0 / double(n);
      const auto b =
          roots::solve_increasing([&](double t) { return pair(t); }, target, 0.0, guess);
      values_.push_back(b.hi);
      residuals_.push_back(std::abs(pair(b.hi) - target));
      guess = b.hi;
      if (n > 1 && !(values_[n - 1] < values_[n - 2])) {
        throw numeric_error("level_sequence: t_" + std::to_string(n) +
                            " is not below t_" + std::to_string(n - 1));
      }
    }
  }

  /// Explicit levels, for constructed problems; must be positive and non-increasing.
  explicit LevelSequence(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw validation_error("level sequence is empty");
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (!(values_[k] > 0.0)) throw validation_error("levels must be positive");
      if (k > 0 && values_[k] > values_[k - 1]) {
        throw validation_error("levels must be non-increasing");
      }
    }
    residuals_.assign(values_.size(), 0.0);
  }

  /// t_n for 1 <= n <= size().
  double operator()(std::size_t n) const {
    if (n == 0 || n > values_.size()) {
      throw validation_error("level t_" + std::to_string(n) + " not available (have " +
                             std::to_string(values_.size()) + ")");
    }
    return values_[n - 1];
  }

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  /// |M*(t_n) - 1/n| per level.
  const std::vector<double>& residuals() const { return residuals_; }
  double max_residual() const {
    return residuals_.empty() ? 0.0 : *std::max_element(residuals_.begin(), residuals_.end());
  }

private:
  std::vector<double> values_;
  std::vector<double> residuals_;
};

inline LevelSequence level_sequence(const ConjugatePair& pair, std::size_t n_max) {
  return LevelSequence(pair, n_max);
}

/// sup of M*(2t)/M*(t) over a log-spaced grid on [t_low, t_high]: the
/// Delta_2 constant estimate for M*.
inline double delta2_ratio(const ConjugatePair& pair, double t_low, double t_high,
                           std::size_t grid = 200) {
  if (!(t_low > 0.0)) throw validation_error("delta2_ratio: t_low must be positive");
  if (!(t_high > t_low)) throw validation_error("delta2_ratio: need t_low < t_high");
  const double t1 = pair.inverse(1.0);
  if (t_high > t1 * (1.0 + 1e-12)) {
    throw validation_error("delta2_ratio: t_high exceeds t_1 = " + detail::format_double(t1));
  }
  double sup = 0.0;
  const double a = std::log(t_low), b = std::log(t_high);
  for (std::size_t k = 0; k < grid; ++k) {
    const double t = grid == 1 ? t_low : std::exp(a + (b - a) * double(k) / double(grid - 1));
    sup = std::max(sup, pair(2.0 * t) / pair(t));
  }
  return sup;
}

}  // namespace orlicz
