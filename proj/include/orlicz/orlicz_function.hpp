#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>


#include "orlicz/errors.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/roots.hpp"

namespace orlicz {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Parameters (eps, s) of the summability hypothesis sum_i M(eps s^i)/M(s^i) < inf.
struct SummabilityParams {
  double eps;
  double s;
};

/// A convex non-decreasing function M on [0, inf) with M(0) = 0, given by a
/// value evaluator and a (right-)derivative evaluator. Instances are
/// immutable; copies share the underlying evaluators.
///
/// `domain_bound()` is the point T up to which the family's own formula is
/// used. Beyond T the evaluators continue with a quadratic convex extension
/// matching M(T) and M'(T), so M' grows without bound.
class OrliczFunction {
public:
  using Evaluator = std::function<double(double)>;

  OrliczFunction(std::string family, std::string spec, Evaluator value, Evaluator derivative,
                 double domain_bound, std::vector<double> breakpoints = {})
      : family_(std::move(family)),
        spec_(std::move(spec)),
        value_(std::move(value)),
        derivative_(std::move(derivative)),
        domain_bound_(domain_bound),
        breakpoints_(std::move(breakpoints)) {}

  double operator()(double t) const { return t <= 0.0 ? 0.0 : value_(t); }
  double value(double t) const { return (*this)(t); }
  double derivative(double t) const { return derivative_(t < 0.0 ? 0.0 : t); }

  const std::string& family() const { return family_; }
  const std::string& spec() const { return spec_; }
  double domain_bound() const { return domain_bound_; }

  /// Points where M' may have a kink (knots of tabulated data, the extension
  /// point T). Quadrature over M' splits at these.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  std::optional<SummabilityParams> summability;

private:
  std::string family_;
  std::string spec_;
  Evaluator value_;
  Evaluator derivative_;
  double domain_bound_;
  std::vector<double> breakpoints_;
};

namespace detail {

/// Curvature used for the quadratic extension past T.
inline double extension_curvature(double bound, double slope_at_bound) {
  return slope_at_bound > 0.0 ? slope_at_bound / bound : 1.0;
}

/// Wraps (value, derivative) valid on [0, bound] with the quadratic extension.
inline std::pair<OrliczFunction::Evaluator, OrliczFunction::Evaluator> with_extension(
    OrliczFunction::Evaluator value, OrliczFunction::Evaluator derivative, double bound) {
  if (!std::isfinite(bound)) return {std::move(value), std::move(derivative)};
  const double m_bound = value(bound);
  const double d_bound = derivative(bound);
  const double curvature = extension_curvature(bound, d_bound);
  auto v = [value, bound, m_bound, d_bound, curvature](double t) {
    if (t <= bound) return value(t);
    const double x = t - bound;
    return m_bound + d_bound * x + 0.5 * curvature * x * x;
  };
  auto d = [derivative, bound, d_bound, curvature](double t) {
    if (t <= bound) return derivative(t);
    return d_bound + curvature * (t - bound);
  };
  return {v, d};
}

/// Validation grid: log-spaced near zero plus uniform up to `upper`.
inline std::vector<double> validation_grid(double upper, std::size_t count = 400) {
  std::vector<double> grid{0.0};
  const double log_lo = std::log(1e-6);
  const double log_hi = std::log(upper);
  for (std::size_t k = 0; k < count; ++k) {
    grid.push_back(std::exp(log_lo + (log_hi - log_lo) * double(k) / double(count - 1)));
    grid.push_back(upper * double(k + 1) / double(count));
  }
  std::sort(grid.begin(), grid.end());
  // merge points closer than 1e-9 relative; they only test rounding
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return b - a <= 1e-9 * b; }),
             grid.end());
  return grid;
}

inline double validation_upper(const OrliczFunction& m) {
  return std::isfinite(m.domain_bound()) ? 1.5 * m.domain_bound() : 4.0;
}

inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string interval(double a, double b) {
  return "[" + format_double(a) + ", " + format_double(b) + "]";
}

}  // namespace detail

/// Grid check of the Orlicz invariants: M(0) = 0, M >= 0 non-decreasing, M'
/// non-decreasing. Throws validation_error naming the first violating interval.
inline void validate(const OrliczFunction& m) {
  if (m(0.0) != 0.0) throw validation_error(m.spec() + ": M(0) != 0");
  const auto grid = detail::validation_grid(detail::validation_upper(m));
  constexpr double slack = 1e-13;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double a = grid[k], b = grid[k + 1];
    const double ma = m(a), mb = m(b);
    if (!(ma >= 0.0) || mb < ma * (1.0 - slack)) {
      throw validation_error(m.spec() + ": M is not non-decreasing on " + detail::interval(a, b));
    }
    const double da = m.derivative(a), db = m.derivative(b);
    if (!(da >= 0.0) || db < da * (1.0 - slack)) {
      throw validation_error(m.spec() + ": convexity check failed, M' decreases on " +
                             detail::interval(a, b));
    }
  }
}

/// Why M' fails to be a bijection of [0, inf), or nullopt when it is one
/// (M'(0) = 0 and M' strictly increasing on the validation grid).
inline std::optional<std::string> regularity_defect(const OrliczFunction& m) {
  if (m.derivative(0.0) != 0.0) {
    return "M'(0) = " + detail::format_double(m.derivative(0.0)) +
           " != 0, so M' is not a bijection of [0, inf) and M* vanishes near 0";
  }
  const auto grid = detail::validation_grid(detail::validation_upper(m));
  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    if (!(m.derivative(grid[k + 1]) > m.derivative(grid[k]))) {
      return "M' is flat on " + detail::interval(grid[k], grid[k + 1]) +
             " and cannot be inverted; apply smooth(...) first";
    }
  }
  return std::nullopt;
}

inline bool is_regular(const OrliczFunction& m) { return !regularity_defect(m).has_value(); }

// ---------------------------------------------------------------------------
// Families

/// M(t) = t^p / p.
inline OrliczFunction power_family(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw validation_error("power family needs a finite exponent p > 0");
  }
  OrliczFunction m("power", "power:p=" + detail::format_double(p),
                   [p](double t) { return std::pow(t, p) / p; },
                   [p](double t) { return p == 1.0 ? 1.0 : std::pow(t, p - 1.0); }, kInfinity);
  validate(m);
  return m;
}

/// M(t) = t.
inline OrliczFunction linear_family() {
  return OrliczFunction("linear", "linear", [](double t) { return t; },
                        [](double) { return 1.0; }, kInfinity);
}

namespace detail {

inline double lt_core(double t) {
  if (t <= 0.0) return 0.0;
  const double u = std::log(t);
  return std::exp(u + u * std::abs(u));
}

// d/dt t^{1+|log t|}; for t < 1 this is exp(-u^2)(1 - 2u) with u = log t.
inline double lt_core_derivative(double t) {
  if (t <= 0.0) return 0.0;
  const double u = std::log(t);
  return lt_core(t) * (1.0 + 2.0 * std::abs(u)) / t;
}

/// Largest point of a uniform grid on (0, 1] up to which lt_core' is
/// increasing: the grid point preceding the first observed decrease.
inline double lt_validated_bound(std::size_t grid = 10000) {
  double prev = lt_core_derivative(1.0 / double(grid));
  for (std::size_t k = 2; k <= grid; ++k) {
    const double cur = lt_core_derivative(double(k) / double(grid));
    if (cur < prev) return double(k - 2) / double(grid);
    prev = cur;
  }
  return 1.0;
}

}  // namespace detail

/// M(t) = t^{1+|log t|} near zero. The formula is convex only up to the peak
/// of its derivative (about e^{-1/2}); the domain bound is shrunk to the last
/// validated grid point and the quadratic extension takes over from there.
/// Satisfies the summability hypothesis for every eps, s in (0, 1).
inline OrliczFunction lt_family() {
  const double bound = detail::lt_validated_bound();
  auto [v, d] = detail::with_extension(detail::lt_core, detail::lt_core_derivative, bound);
  OrliczFunction m("lt", "lt", v, d, bound, {bound});
  m.summability = SummabilityParams{0.5, 0.5};
  validate(m);
  return m;
}

/// Derivative samples (t_k, M'(t_k)); M' is linearly interpolated and M is its
/// exact integral. A leading (0, 0) sample is added when t_0 > 0.
inline OrliczFunction tabulated_family(std::vector<std::pair<double, double>> samples,
                                       std::string spec = "tabulated") {
  if (samples.empty()) throw validation_error(spec + ": no derivative samples");
  if (samples.front().first < 0.0) throw validation_error(spec + ": negative abscissa");
  if (samples.front().first > 0.0) samples.insert(samples.begin(), {0.0, 0.0});
  if (samples.size() < 2) throw validation_error(spec + ": need at least two samples");
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const auto [t0, d0] = samples[k];
    const auto [t1, d1] = samples[k + 1];
    if (!(t1 > t0)) {
      throw validation_error(spec + ": abscissae not strictly increasing at " +
                             detail::interval(t0, t1));
    }
    if (d0 < 0.0 || d1 < d0) {
      throw validation_error(spec + ": convexity check failed, M' decreases on " +
                             detail::interval(t0, t1));
    }
  }
  auto knots = std::make_shared<std::vector<std::pair<double, double>>>(std::move(samples));
  auto cumulative = std::make_shared<std::vector<double>>(knots->size(), 0.0);
  for (std::size_t k = 1; k < knots->size(); ++k) {
    const auto [t0, d0] = (*knots)[k - 1];
    const auto [t1, d1] = (*knots)[k];
    (*cumulative)[k] = (*cumulative)[k - 1] + 0.5 * (d0 + d1) * (t1 - t0);
  }
  const double bound = knots->back().first;

  auto segment = [knots](double t) {
    auto it = std::upper_bound(knots->begin(), knots->end(), t,
                               [](double x, const auto& s) { return x < s.first; });
    return std::size_t(std::max<std::ptrdiff_t>(0, (it - knots->begin()) - 1));
  };
  auto derivative = [knots, segment](double t) {
    const std::size_t k = std::min(segment(t), knots->size() - 2);
    const auto [t0, d0] = (*knots)[k];
    const auto [t1, d1] = (*knots)[k + 1];
    return d0 + (d1 - d0) * (t - t0) / (t1 - t0);
  };
  auto value = [knots, cumulative, segment](double t) {
    const std::size_t k = std::min(segment(t), knots->size() - 2);
    const auto [t0, d0] = (*knots)[k];
    const auto [t1, d1] = (*knots)[k + 1];
    const double x = t - t0;
    const double slope = (d1 - d0) / (t1 - t0);
    return (*cumulative)[k] + d0 * x + 0.5 * slope * x * x;
  };
  std::vector<double> breaks;
  for (const auto& s : *knots) breaks.push_back(s.first);
  auto [v, d] = detail::with_extension(value, derivative, bound);
  OrliczFunction m("tabulated", std::move(spec), v, d, bound, std::move(breaks));
  validate(m);
  return m;
}

/// Reads CSV rows "t,Mprime"; a non-numeric first row is treated as a header.
inline OrliczFunction tabulated_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("tabulated: cannot open " + path);
  std::vector<std::pair<double, double>> samples;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string a, b;
    if (!std::getline(fields, a, ',') || !std::getline(fields, b)) {
      throw validation_error("tabulated: malformed row " + std::to_string(row) + " in " + path);
    }
    try {
      samples.emplace_back(std::stod(a), std::stod(b));
    } catch (const std::exception&) {
      if (row == 1) continue;
      throw validation_error("tabulated: non-numeric row " + std::to_string(row) + " in " + path);
    }
  }
  return tabulated_family(std::move(samples), "tabulated:file=" + path);
}

// ---------------------------------------------------------------------------
// Constructions

/// M(t) = int_0^t (1 + u) M1'(u) du, using the right-derivative of M1.
/// M1 <= M <= 2 M1 on [0, 1] and M' = (1 + t) M1' is strictly increasing
/// wherever M1' > 0.
inline OrliczFunction smooth(const OrliczFunction& inner) {
  auto integrand = [inner](double u) { return (1.0 + u) * inner.derivative(u); };
  auto breaks = std::make_shared<std::vector<double>>(inner.breakpoints());
  auto value = [integrand, breaks, spec = inner.spec()](double t) {
    if (t <= 0.0) return 0.0;
    double total = 0.0;
    double a = 0.0;
    auto piece = [&](double b) {
      if (b <= a) return;
      double err = 0.0, l1 = 0.0;
      const double part = quadrature::integrate<21>(integrand, a, b, 15, 1e-13, &err, &l1);
      if (!(err <= 1e-10 * l1 + 1e-300)) {
        throw numeric_error("smooth(" + spec + "): quadrature did not converge on " +
                            detail::interval(a, b) + " (error estimate " +
                            detail::format_double(err) + ")");
      }
      total += part;
      a = b;
    };
    for (double b : *breaks) {
      if (b >= t) break;
      piece(b);
    }
    piece(t);
    return total;
  };
  auto derivative = [inner](double t) { return (1.0 + t) * inner.derivative(t); };
  OrliczFunction m("smooth", "smooth(" + inner.spec() + ")", value, derivative, kInfinity,
                   inner.breakpoints());
  m.summability = inner.summability;
  validate(m);
  return m;
}

/// t -> value_factor * M(arg_factor * t).
inline OrliczFunction scaled(const OrliczFunction& m, double value_factor, double arg_factor) {
  if (!(value_factor > 0.0) || !(arg_factor > 0.0)) {
    throw validation_error("scaled: factors must be positive");
  }
  std::vector<double> breaks;
  for (double b : m.breakpoints()) breaks.push_back(b / arg_factor);
  OrliczFunction out(
      "scaled",
      "scaled(" + m.spec() + ",value=" + detail::format_double(value_factor) +
          ",arg=" + detail::format_double(arg_factor) + ")",
      [m, value_factor, arg_factor](double t) { return value_factor * m(arg_factor * t); },
      [m, value_factor, arg_factor](double t) {
        return value_factor * arg_factor * m.derivative(arg_factor * t);
      },
      m.domain_bound() / arg_factor, std::move(breaks));
  return out;
}

/// Rescales the argument so that M(1) = 1: returns t -> M(k t) with M(k) = 1,
/// k the smallest double satisfying M(k) >= 1. Returns M unchanged when M(1) == 1.
inline OrliczFunction normalized_at_one(const OrliczFunction& m) {
  if (m(1.0) == 1.0) return m;
  const auto b = roots::solve_increasing([&](double t) { return m(t); }, 1.0, 0.0, 1.0);
  return scaled(m, 1.0, b.hi);
}

// ---------------------------------------------------------------------------
// Spec strings

/// Parses "power:p=<float>", "lt", "linear", "smooth(<spec>)",
/// "tabulated:file=<path>".
inline OrliczFunction make_family(std::string_view spec) {
  const auto trimmed = [](std::string_view s) {
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t");
    return a == std::string_view::npos ? std::string_view{} : s.substr(a, b - a + 1);
  };
  spec = trimmed(spec);
  if (spec == "lt") return lt_family();
  if (spec == "linear") return linear_family();
  if (spec.starts_with("smooth(") && spec.ends_with(")")) {
    return smooth(make_family(spec.substr(7, spec.size() - 8)));
  }
  if (spec.starts_with("power:p=")) {
    const auto text = spec.substr(8);
    double p = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), p);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw validation_error("bad exponent in family spec '" + std::string(spec) + "'");
    }
    return power_family(p);
  }
  if (spec.starts_with("tabulated:file=")) {
    return tabulated_from_csv(std::string(spec.substr(15)));
  }
  throw validation_error("unknown family spec '" + std::string(spec) + "'");
}

}  // namespace orlicz
