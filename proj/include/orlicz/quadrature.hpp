#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace orlicz::quadrature {

/// Adaptive Gauss-Kronrod over [a, b], evaluated on the reference interval
/// [-1, 1]. Boost's recursion compares an error estimate taken on the
/// reference interval against a tolerance taken on [a, b], so integrating
/// short intervals directly forces full-depth recursion.
template <unsigned Points, class F>
double integrate(F&& f, double a, double b, unsigned max_depth, double tol, double* error,
                 double* l1) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const auto g = [&](double x) { return f(mid + half * x); };
  double err = 0.0, mass = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, Points>::integrate(
      g, -1.0, 1.0, max_depth, tol, &err, &mass);
  if (error) *error = err * half;
  if (l1) *l1 = mass * half;
  return value * half;
}

}  // namespace orlicz::quadrature
