#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orlicz/conjugate.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/luxemburg.hpp"
#include "orlicz/roots.hpp"
#include "orlicz/sequence.hpp"

namespace orlicz {

/// A point of the norming set K: level n, support A with |A| <= n and signs,
/// realized as the sequence with entries sigma(i) t_n on A. Level 0 with an
/// empty support is the origin, shared by every K_n.
struct KPoint {
  std::size_t level = 0;
  std::vector<std::size_t> support;  // strictly increasing, 1-based
  std::vector<int> signs;            // +1 / -1, parallel to support

  static KPoint origin() { return {}; }
  bool is_origin() const { return level == 0; }

  void check() const {
    if (support.size() != signs.size()) throw validation_error("KPoint: support/sign size mismatch");
    if (level == 0 && !support.empty()) throw validation_error("KPoint: origin has empty support");
    if (support.size() > level && level > 0) {
      throw validation_error("KPoint: |A| = " + std::to_string(support.size()) +
                             " exceeds level " + std::to_string(level));
    }
    for (std::size_t k = 0; k < support.size(); ++k) {
      if (support[k] == 0 || (k > 0 && support[k] <= support[k - 1])) {
        throw validation_error("KPoint: support must be strictly increasing and 1-based");
      }
      if (signs[k] != 1 && signs[k] != -1) throw validation_error("KPoint: signs must be +-1");
    }
  }

  FiniteSequence realize(const LevelSequence& levels) const {
    std::vector<FiniteSequence::Entry> entries;
    if (!support.empty()) {
      const double t = levels(level);
      for (std::size_t k = 0; k < support.size(); ++k) entries.push_back({support[k], signs[k] * t});
    }
    return FiniteSequence(std::move(entries));
  }

  friend bool operator==(const KPoint&, const KPoint&) = default;
};

/// Convex decomposition b = sum_i c_i (t_i sum_{j<=i} e_j).
struct Decomposition {
  std::vector<double> coefficients;  // c_i >= 0
  std::vector<double> levels;        // t_i of each generator

  /// b_j = sum_{i>=j} c_i t_i.
  std::vector<double> reconstruct() const {
    std::vector<double> b(coefficients.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = coefficients.size(); i-- > 0;) {
      acc += coefficients[i] * levels[i];
      b[i] = acc;
    }
    return b;
  }

  double total() const {
    double s = 0.0;
    for (double c : coefficients) s += c;
    return s;
  }
};

/// Rescales b so that sum M*(s b_i) = 1; returns the scaled vector.
inline std::vector<double> normalize_to_conjugate_sphere(const ConjugatePair& pair,
                                                         std::span<const double> b) {
  const auto mass = [&](double s) {
    double sum = 0.0;
    for (double x : b) sum += pair(s * std::abs(x));
    return sum;
  };
  double largest = 0.0;
  for (double x : b) largest = std::max(largest, std::abs(x));
  if (largest == 0.0) throw validation_error("cannot normalize the zero vector");
  const auto bracket = roots::solve_increasing(mass, 1.0, 0.0, 1.0 / largest);
  const double s = std::abs(mass(bracket.lo) - 1.0) < std::abs(mass(bracket.hi) - 1.0)
                       ? bracket.lo
                       : bracket.hi;
  std::vector<double> out(b.begin(), b.end());
  for (double& x : out) x *= s;
  return out;
}

/// c_i = (b_i - b_{i+1}) / t_i for a non-negative non-increasing b with
/// sum M*(b_i) = 1 (within 1e-8). Unnormalized input is refused.
inline Decomposition decompose(std::span<const double> b, const ConjugatePair& pair,
                               const LevelSequence& levels) {
  if (b.empty()) throw validation_error("decompose: empty input");
  if (b.size() > levels.size()) throw validation_error("decompose: not enough levels");
  double mass = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] < 0.0) throw validation_error("decompose: negative entry at index " + std::to_string(i + 1));
    if (i > 0 && b[i] > b[i - 1]) {
      throw validation_error("decompose: input increases at index " + std::to_string(i + 1));
    }
    mass += pair(b[i]);
  }
  if (std::abs(mass - 1.0) > 1e-8) {
    throw validation_error("decompose: sum M*(b_i) = " + detail::format_double(mass) +
                           ", expected 1 (normalize first)");
  }
  Decomposition d;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double next = i + 1 < b.size() ? b[i + 1] : 0.0;
    d.levels.push_back(levels(i + 1));
    d.coefficients.push_back((b[i] - next) / levels(i + 1));
  }
  return d;
}

/// f(b) in summation-by-parts form sum_i w_i b_i, w_i = 1/t_i - 1/t_{i-1}.
inline double weighted_objective(std::span<const double> b, const LevelSequence& levels) {
  double f = 0.0, previous = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double inv = 1.0 / levels(i + 1);
    f += (inv - previous) * b[i];
    previous = inv;
  }
  return f;
}

/// (Tb)(x) = <b, x> = t_n sum_{i in A} sigma(i) b_i, summed in index order.
inline double evaluate(const FiniteSequence& b, const KPoint& x, const LevelSequence& levels) {
  if (x.support.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < x.support.size(); ++k) sum += x.signs[k] * b[x.support[k]];
  return levels(x.level) * sum;
}

/// Best point of level n for b: A = indices of the n largest |b_i| (ties to
/// the lower index), sigma = sign(b_i).
inline KPoint best_point_at_level(const FiniteSequence& b, std::size_t n) {
  auto entries = b.entries();
  std::stable_sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
    return std::abs(x.value) > std::abs(y.value);
  });
  entries.resize(std::min(n, entries.size()));
  std::sort(entries.begin(), entries.end(),
            [](const auto& x, const auto& y) { return x.index < y.index; });
  KPoint p;
  p.level = n;
  for (const auto& e : entries) {
    p.support.push_back(e.index);
    p.signs.push_back(e.value < 0.0 ? -1 : 1);
  }
  return p;
}

/// sup_{x in K_1 u ... u K_{n_max}} |<b, x>| by the selection rule
/// max_n t_n (sum of the n largest |b_i|). Levels past the support size
/// cannot improve the value since t_n decreases.
inline double sup_norm(const FiniteSequence& b, const LevelSequence& levels, std::size_t n_max) {
  if (b.is_zero()) return 0.0;
  const std::size_t top = std::min(n_max, b.support_size());
  double best = 0.0;
  for (std::size_t n = 1; n <= top; ++n) {
    best = std::max(best, evaluate(b, best_point_at_level(b, n), levels));
  }
  return best;
}

inline std::size_t truncated_k_guard() { return 12; }

/// Calls `visit` for every point (n, A, sigma) with n <= N, A a subset of
/// {1..I}, 1 <= |A| <= n, preceded by the origin once.
inline void for_each_truncated_k(std::size_t index_bound, std::size_t level_bound,
                                 const std::function<void(const KPoint&)>& visit) {
  if (index_bound > truncated_k_guard() || level_bound > truncated_k_guard()) {
    throw validation_error("truncated K enumeration limited to I, N <= 12");
  }
  visit(KPoint::origin());
  for (std::size_t n = 1; n <= level_bound; ++n) {
    for (std::uint32_t mask = 1; mask < (1u << index_bound); ++mask) {
      const auto card = std::size_t(std::popcount(mask));
      if (card > n) continue;
      KPoint p;
      p.level = n;
      for (std::size_t i = 0; i < index_bound; ++i)
        if (mask & (1u << i)) p.support.push_back(i + 1);
      for (std::uint32_t signs = 0; signs < (1u << card); ++signs) {
        p.signs.assign(card, 1);
        for (std::size_t k = 0; k < card; ++k)
          if (signs & (1u << k)) p.signs[k] = -1;
        visit(p);
      }
    }
  }
}

inline std::vector<KPoint> enumerate_truncated_k(std::size_t index_bound, std::size_t level_bound) {
  std::vector<KPoint> out;
  for_each_truncated_k(index_bound, level_bound, [&](const KPoint& p) { out.push_back(p); });
  return out;
}

/// max over the truncated enumeration of <b, x>.
inline double enumerated_sup(const FiniteSequence& b, const LevelSequence& levels,
                             std::size_t index_bound, std::size_t level_bound) {
  double best = 0.0;
  for_each_truncated_k(index_bound, level_bound,
                       [&](const KPoint& p) { best = std::max(best, evaluate(b, p, levels)); });
  return best;
}

struct NormSample {
  std::size_t sample_id = 0;
  double lux_norm = 0.0;
  double sup_norm = 0.0;
  double ratio = 0.0;
};

struct NormEquivalenceReport {
  std::vector<NormSample> samples;
  std::vector<std::size_t> skipped_zero;  // ids of zero samples
  double min_ratio = 0.0;                 // empirical norming constant 1/C_hat
  double max_ratio = 0.0;
  bool upper_bound_holds = true;          // every ratio <= 2 + 1e-9
};

/// r = sup_norm(b) / luxemburg_norm(b) per sample. The upper bound 2 comes
/// from pairing with points of K, which lie in the unit ball of h_{M*}.
inline NormEquivalenceReport norm_equivalence_report(const ConjugatePair& pair,
                                                     const LevelSequence& levels,
                                                     std::span<const FiniteSequence> samples) {
  NormEquivalenceReport report;
  bool first = true;
  for (std::size_t id = 0; id < samples.size(); ++id) {
    const auto& b = samples[id];
    if (b.is_zero()) {
      report.skipped_zero.push_back(id);
      continue;
    }
    NormSample s;
    s.sample_id = id;
    s.lux_norm = luxemburg_norm(pair.base(), b);
    s.sup_norm = sup_norm(b, levels, b.support_size());
    s.ratio = s.sup_norm / s.lux_norm;
    if (s.ratio > 2.0 + 1e-9) report.upper_bound_holds = false;
    report.min_ratio = first ? s.ratio : std::min(report.min_ratio, s.ratio);
    report.max_ratio = first ? s.ratio : std::max(report.max_ratio, s.ratio);
    first = false;
    report.samples.push_back(s);
  }
  return report;
}

}  // namespace orlicz
