#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "orlicz/conjugate.hpp"
#include "orlicz/embedding.hpp"
#include "orlicz/errors.hpp"

namespace orlicz {

/// The family {(n, A, sigma) : n_min <= n <= n_max, |A| <= kappa(n)} with the
/// affine cap rule kappa(n) = min(n - shift, ceiling), plus the origin when
/// `zero_flag` is set. Only levels with kappa(n) >= 0 are present.
///
/// K itself is kappa(n) = n for n >= 1; its m-th derived set is
/// kappa(n) = n - m for n >= m.
struct SymbolicFamily {
  std::size_t n_min = 1;
  std::optional<std::size_t> n_max;  // unbounded when empty
  long shift = 0;
  std::optional<long> ceiling;       // no cap when empty
  bool zero_flag = true;

  static SymbolicFamily full_k() { return {}; }

  /// kappa(n) = min(n, cap).
  static SymbolicFamily capped(long cap) {
    SymbolicFamily f;
    f.ceiling = cap;
    return f;
  }

  long cap(std::size_t n) const {
    long k = long(n) - shift;
    if (ceiling) k = std::min(k, *ceiling);
    return k;
  }

  /// Smallest level n >= n_min with kappa(n) >= threshold, if any.
  std::optional<std::size_t> first_level_with_cap(long threshold) const {
    if (ceiling && *ceiling < threshold) return std::nullopt;
    const long need = shift + threshold;
    const std::size_t lo = std::max<std::size_t>(n_min, need > 0 ? std::size_t(need) : 0);
    if (n_max && lo > *n_max) return std::nullopt;
    return lo;
  }

  bool has_levels() const { return first_level_with_cap(0).has_value(); }

  bool has_level(std::size_t n) const {
    return n >= n_min && (!n_max || n <= *n_max) && cap(n) >= 0;
  }

  bool contains(const KPoint& p) const {
    if (p.is_origin()) return zero_flag;
    return has_level(p.level) && long(p.support.size()) <= cap(p.level);
  }

  friend bool operator==(const SymbolicFamily&, const SymbolicFamily&) = default;
};

/// Derived set by rule: every cap drops by one and levels whose cap turns
/// negative disappear. A point (n, A) with |A| < kappa(n) is the limit of
/// (n, A u {j}) as j -> infinity, and points of one level cannot accumulate
/// at a different level. The origin survives exactly when some level still
/// carries a nonzero point, i.e. some kappa(n) >= 1.
inline SymbolicFamily derive(const SymbolicFamily& fam) {
  SymbolicFamily out = fam;
  const auto carrier = fam.first_level_with_cap(1);
  out.shift = fam.shift + 1;
  if (out.ceiling) *out.ceiling -= 1;
  out.zero_flag = carrier.has_value();
  if (carrier) {
    out.n_min = *carrier;
  } else if (out.n_max) {
    out.n_min = *out.n_max + 1;  // no levels left
  } else {
    out.ceiling = -1;
  }
  return out;
}

inline SymbolicFamily derive_times(SymbolicFamily fam, std::size_t m) {
  for (std::size_t k = 0; k < m; ++k) fam = derive(fam);
  return fam;
}

/// Cantor-Bendixson rank tag: a finite stage or omega.
struct RankTag {
  bool omega = false;
  std::size_t value = 0;
  std::string str() const { return omega ? "omega" : std::to_string(value); }
  friend bool operator==(const RankTag&, const RankTag&) = default;
};

/// Rank in K: the point (n, A, sigma) survives exactly n - |A| derivations;
/// the origin lies in every derived set. A per-level zero (n, {}) reports n.
inline RankTag cb_rank(const KPoint& x) {
  if (x.is_origin()) return {true, 0};
  if (x.support.size() > x.level) throw validation_error("cb_rank: point is not in K");
  return {false, x.level - x.support.size()};
}

/// Rank by repeated symbolic derivation; omega if the point is still present
/// after `stage_limit` derivations.
inline RankTag cb_rank_by_derivation(const SymbolicFamily& fam, const KPoint& x,
                                     std::size_t stage_limit) {
  if (!fam.contains(x)) throw validation_error("cb_rank_by_derivation: point is not in the family");
  SymbolicFamily cur = fam;
  for (std::size_t m = 0; m < stage_limit; ++m) {
    const auto next = derive(cur);
    if (!next.contains(x)) return {false, m};
    cur = next;
  }
  return {true, 0};
}

// ---------------------------------------------------------------------------
// Definition-based derived sets on a truncated universe.

namespace detail {

inline std::vector<double> realized_dense(const KPoint& p, const LevelSequence& levels,
                                          std::size_t index_bound) {
  std::vector<double> v(index_bound, 0.0);
  if (!p.support.empty()) {
    const double t = levels(p.level);
    for (std::size_t k = 0; k < p.support.size(); ++k) v[p.support[k] - 1] = p.signs[k] * t;
  }
  return v;
}

inline std::size_t max_index(const KPoint& p) {
  return p.support.empty() ? 0 : p.support.back();
}

}  // namespace detail

/// One derivation step of a finite point set in R^I at stage `stage`.
///
/// A basic neighbourhood of p pins the coordinates 1..w with
/// w = max(I - stage, max A_p): it always fixes p's own support, while the
/// indices above I - stage stay free for later stages to escape into. p is a
/// limit point when another point of the set agrees with p on that window.
/// Points are compared by their realized sequences, so the zero sequences of
/// all levels are one point.
inline std::vector<KPoint> limit_points(const std::vector<KPoint>& points,
                                        const LevelSequence& levels, std::size_t index_bound,
                                        std::size_t stage) {
  if (stage > index_bound) return {};
  std::vector<std::vector<double>> realized;
  realized.reserve(points.size());
  for (const auto& p : points) realized.push_back(detail::realized_dense(p, levels, index_bound));

  const std::size_t free_from = index_bound - stage;
  std::vector<KPoint> out;
  for (std::size_t a = 0; a < points.size(); ++a) {
    const std::size_t window = std::max(free_from, detail::max_index(points[a]));
    bool limit = false;
    for (std::size_t b = 0; b < points.size() && !limit; ++b) {
      if (realized[b] == realized[a]) continue;
      limit = std::equal(realized[a].begin(), realized[a].begin() + std::ptrdiff_t(window),
                         realized[b].begin());
    }
    if (limit) out.push_back(points[a]);
  }
  return out;
}

/// The universe: origin plus every (n, A, sigma) of K with A in {1..I}, n <= N.
inline std::vector<KPoint> truncated_universe(std::size_t index_bound, std::size_t level_bound) {
  if (index_bound > 6 || level_bound > 6) {
    throw validation_error("definition_based_derive: universe limited to I, N <= 6");
  }
  return enumerate_truncated_k(index_bound, level_bound);
}

/// m derivation steps of `points` from the limit-point definition.
inline std::vector<KPoint> definition_based_derive(std::vector<KPoint> points,
                                                   const LevelSequence& levels,
                                                   std::size_t index_bound,
                                                   std::size_t level_bound, std::size_t m) {
  if (index_bound > 6 || level_bound > 6) {
    throw validation_error("definition_based_derive: universe limited to I, N <= 6");
  }
  if (levels.size() < level_bound) throw validation_error("definition_based_derive: not enough levels");
  for (std::size_t stage = 1; stage <= m; ++stage) {
    points = limit_points(points, levels, index_bound, stage);
  }
  return points;
}

/// The symbolic m-th derived family restricted to the truncated universe:
/// nonzero points need A in {1..I-m} (one free index per escape step) and the
/// origin needs some nonzero point one stage earlier.
inline std::vector<KPoint> restrict_to_universe(const SymbolicFamily& base, std::size_t index_bound,
                                                std::size_t level_bound, std::size_t m) {
  const auto fam = derive_times(base, m);
  std::vector<KPoint> out;
  bool origin = false;
  if (fam.zero_flag) {
    if (m == 0) {
      origin = true;
    } else if (m <= index_bound) {
      const auto previous = derive_times(base, m - 1);
      const auto carrier = previous.first_level_with_cap(1);
      origin = carrier && *carrier <= level_bound;
    }
  }
  if (origin) out.push_back(KPoint::origin());
  for_each_truncated_k(index_bound, level_bound, [&](const KPoint& p) {
    if (p.is_origin()) return;
    if (detail::max_index(p) + m > index_bound) return;
    if (fam.contains(p)) out.push_back(p);
  });
  return out;
}

/// Closedness on the truncated universe: every candidate (any level <= N,
/// any support in {1..I}, including |A| > n) that is a limit point of
/// `points` at stage 1 already belongs to `points`.
inline bool limits_stay_in_family(const std::vector<KPoint>& points, const LevelSequence& levels,
                                  std::size_t index_bound, std::size_t level_bound) {
  std::vector<KPoint> candidates{KPoint::origin()};
  for (std::size_t n = 1; n <= level_bound; ++n) {
    for (std::uint32_t mask = 1; mask < (1u << index_bound); ++mask) {
      KPoint p;
      p.level = n;
      for (std::size_t i = 0; i < index_bound; ++i)
        if (mask & (1u << i)) p.support.push_back(i + 1);
      p.signs.assign(p.support.size(), 1);
      candidates.push_back(p);
    }
  }
  for (const auto& c : candidates) {
    std::vector<KPoint> probe = points;
    const bool member = std::find(points.begin(), points.end(), c) != points.end();
    if (!member) probe.push_back(c);
    const auto lim = limit_points(probe, levels, index_bound, 1);
    const bool is_limit = std::find(lim.begin(), lim.end(), c) != lim.end();
    if (is_limit && !member) {
      // c accumulates points of the family only if some other point agrees
      // with it on its window; the candidate itself does not count.
      return false;
    }
  }
  return true;
}

/// Set equality of two point lists, ignoring order and repeats.
inline bool same_points(std::vector<KPoint> a, std::vector<KPoint> b) {
  const auto key = [](const KPoint& p) { return std::tie(p.level, p.support, p.signs); };
  const auto less = [&](const KPoint& x, const KPoint& y) { return key(x) < key(y); };
  for (auto* v : {&a, &b}) {
    std::sort(v->begin(), v->end(), less);
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  return a == b;
}

struct OmegaStage {
  std::size_t m = 0;
  bool zero_present = false;
  std::optional<std::size_t> first_level;
};

struct OmegaReport {
  std::size_t m_max = 0;
  std::vector<OmegaStage> stages;
  bool zero_in_every_stage = true;
  bool nonzero_ranks_finite = true;  // every (n, k), 1 <= k <= n <= m_max, leaves at stage n-k+1
  bool passes = false;
};

/// Checks that the origin lies in every derived set up to m_max and that each
/// nonzero point (n, A) with n <= m_max drops out after exactly n - |A| steps.
inline OmegaReport verify_omega(const SymbolicFamily& fam, std::size_t m_max) {
  OmegaReport report;
  report.m_max = m_max;
  std::vector<SymbolicFamily> derived{fam};
  for (std::size_t m = 1; m <= m_max + 1; ++m) derived.push_back(derive(derived.back()));
  for (std::size_t m = 0; m <= m_max; ++m) {
    OmegaStage s;
    s.m = m;
    s.zero_present = derived[m].zero_flag && derived[m].has_levels();
    s.first_level = derived[m].first_level_with_cap(0);
    if (!s.zero_present) report.zero_in_every_stage = false;
    report.stages.push_back(s);
  }
  for (std::size_t n = 1; n <= m_max; ++n) {
    for (std::size_t k = 1; k <= n; ++k) {
      KPoint p;
      p.level = n;
      for (std::size_t i = 1; i <= k; ++i) p.support.push_back(i);
      p.signs.assign(k, 1);
      const std::size_t rank = n - k;
      if (!derived[rank].contains(p) || derived[rank + 1].contains(p)) {
        report.nonzero_ranks_finite = false;
      }
    }
  }
  report.passes = report.zero_in_every_stage && report.nonzero_ranks_finite;
  return report;
}

}  // namespace orlicz
