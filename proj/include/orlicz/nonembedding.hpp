#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/luxemburg.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/sequence.hpp"

namespace orlicz {

inline constexpr std::size_t kWitnessCoordinateGuard = 1'000'000;
inline constexpr double kExactIntegerLimit = 9007199254740992.0;  // 2^53
/// k M(1/j) >= 1 - kCoverSlack counts as covering: M(1/j) carries rounding
/// error, and without slack M(t) = t^2 would give j^2 + 1 for many j.
inline constexpr double kCoverSlack = 1e-12;

namespace detail {

inline void require_normalized(const OrliczFunction& m, const char* who) {
  if (std::abs(m(1.0) - 1.0) > 1e-12) {
    throw validation_error(std::string(who) + ": M(1) = " + format_double(m(1.0)) +
                           ", expected 1 (use normalized_at_one)");
  }
}

/// Smallest integer k with k * m >= 1 - kCoverSlack.
inline std::uint64_t covering_count(double m, std::size_t j) {
  if (!(m > 0.0)) {
    throw validation_error("M(1/" + std::to_string(j) +
                           ") = 0: M is degenerate at this scale, the witness does not exist");
  }
  const double guess = std::ceil(1.0 / m);
  if (!(guess <= kExactIntegerLimit)) {
    throw numeric_error("|A_" + std::to_string(j) + "| = " + format_double(guess) +
                        " exceeds the exact integer range");
  }
  auto k = std::uint64_t(guess);
  constexpr double target = 1.0 - kCoverSlack;
  while (double(k) * m < target) ++k;
  while (k > 1 && double(k - 1) * m >= target) --k;
  return k;
}

}  // namespace detail

/// |A_j| = smallest k with k M(1/j) >= 1 (up to kCoverSlack), j = 1..J.
inline std::vector<std::uint64_t> witness_sizes(const OrliczFunction& m, std::size_t horizon) {
  detail::require_normalized(m, "witness_sizes");
  if (horizon == 0) throw validation_error("witness_sizes: J must be >= 1");
  std::vector<std::uint64_t> sizes;
  sizes.reserve(horizon);
  for (std::size_t j = 1; j <= horizon; ++j) {
    sizes.push_back(detail::covering_count(m(1.0 / double(j)), j));
  }
  return sizes;
}

/// Block ends i_1 < i_2 < ...; block k is [i_{k-1} + 1, i_k] with i_0 = 0.
class BlockPartition {
public:
  explicit BlockPartition(std::vector<std::size_t> ends) : ends_(std::move(ends)) {
    for (std::size_t k = 0; k < ends_.size(); ++k) {
      const std::size_t prev = k == 0 ? 0 : ends_[k - 1];
      if (ends_[k] <= prev) throw validation_error("BlockPartition: ends must be strictly increasing");
    }
  }

  /// i_k = step * k for k = 1..count.
  static BlockPartition uniform(std::size_t step, std::size_t count) {
    if (step == 0) throw validation_error("BlockPartition: step must be >= 1");
    std::vector<std::size_t> ends;
    ends.reserve(count);
    for (std::size_t k = 1; k <= count; ++k) ends.push_back(step * k);
    return BlockPartition(std::move(ends));
  }

  std::size_t size() const { return ends_.size(); }
  /// i_k, 1-based.
  std::size_t end(std::size_t k) const { return ends_.at(k - 1); }
  std::size_t begin(std::size_t k) const { return k == 1 ? 1 : ends_.at(k - 2) + 1; }
  const std::vector<std::size_t>& ends() const { return ends_; }

private:
  std::vector<std::size_t> ends_;
};

struct WitnessGroup {
  std::size_t j = 0;
  std::size_t first_block = 0;  // A_j = {first_block, ..., last_block}
  std::size_t last_block = 0;
  double value = 0.0;           // 1/j
  std::size_t size() const { return last_block - first_block + 1; }
};

struct Witness {
  std::vector<std::uint64_t> sizes;
  std::vector<WitnessGroup> groups;
  FiniteSequence realized;  // value 1/j at coordinate i_k for k in A_j
};

/// The formal sum sum_j sum_{k in A_j} e_{i_k} / j truncated at J, with the
/// A_j taken as consecutive runs of block indices.
inline Witness build_witness(const OrliczFunction& m, const BlockPartition& partition,
                             std::size_t horizon) {
  Witness w;
  w.sizes = witness_sizes(m, horizon);
  std::uint64_t total = 0;
  for (auto s : w.sizes) {
    total += s;
    if (total > kWitnessCoordinateGuard) {
      throw validation_error("build_witness: more than 10^6 coordinates needed; lower J");
    }
  }
  if (total > partition.size()) {
    throw validation_error("build_witness: partition exhausted (" + std::to_string(partition.size()) +
                           " blocks, " + std::to_string(total) + " needed)");
  }
  std::vector<FiniteSequence::Entry> entries;
  entries.reserve(std::size_t(total));
  std::size_t next_block = 1;
  for (std::size_t j = 1; j <= horizon; ++j) {
    WitnessGroup g;
    g.j = j;
    g.value = 1.0 / double(j);
    g.first_block = next_block;
    g.last_block = next_block + std::size_t(w.sizes[j - 1]) - 1;
    for (std::size_t k = g.first_block; k <= g.last_block; ++k) {
      entries.push_back({partition.end(k), g.value});
    }
    next_block = g.last_block + 1;
    w.groups.push_back(g);
  }
  w.realized = FiniteSequence(std::move(entries));
  return w;
}

/// Luxemburg norm of the restriction of the witness to each block in A_1 u ... u A_J.
inline std::vector<double> block_norms(const Witness& w, const OrliczFunction& m,
                                       const BlockPartition& partition) {
  const auto& entries = w.realized.entries();
  std::size_t cursor = 0;
  std::vector<double> norms;
  std::vector<RepeatedValue> block;
  for (const auto& g : w.groups) {
    for (std::size_t k = g.first_block; k <= g.last_block; ++k) {
      block.clear();
      while (cursor < entries.size() && entries[cursor].index < partition.begin(k)) ++cursor;
      for (; cursor < entries.size() && entries[cursor].index <= partition.end(k); ++cursor) {
        block.push_back({entries[cursor].value, 1.0});
      }
      norms.push_back(luxemburg_norm(m, block));
    }
  }
  return norms;
}

/// Block norms grouped by j, computed from one representative block per group.
/// Usable when the witness itself would be too large to realize.
inline std::vector<double> group_block_norms(const OrliczFunction& m, std::size_t horizon) {
  witness_sizes(m, horizon);  // normalization and degeneracy checks
  std::vector<double> norms;
  for (std::size_t j = 1; j <= horizon; ++j) {
    const RepeatedValue single{1.0 / double(j), 1.0};
    norms.push_back(luxemburg_norm(m, std::span<const RepeatedValue>(&single, 1)));
  }
  return norms;
}

struct DivergenceReport {
  std::vector<std::uint64_t> sizes;
  std::vector<double> partial_sums;  // S_J = sum_{j<=J} |A_j| M(1/j)
  std::vector<double> norm_partials; // Luxemburg norm of the witness truncated at J
};

inline DivergenceReport divergence_partial_sums(const OrliczFunction& m, std::size_t horizon) {
  DivergenceReport r;
  r.sizes = witness_sizes(m, horizon);
  std::vector<RepeatedValue> grouped;
  double sum = 0.0;
  for (std::size_t j = 1; j <= horizon; ++j) {
    const double v = 1.0 / double(j);
    sum += double(r.sizes[j - 1]) * m(v);
    r.partial_sums.push_back(sum);
    grouped.push_back({v, double(r.sizes[j - 1])});
    r.norm_partials.push_back(luxemburg_norm(m, grouped));
  }
  return r;
}

struct NormThresholdSearch {
  double threshold = 0.0;
  std::size_t horizon = 0;
  std::optional<std::size_t> first_j;  // J* when found
  std::optional<double> norm_at_first_j;
  std::size_t searched_to = 0;         // last J examined
  double modular_at_threshold = 0.0;   // sum_{j<=searched_to} |A_j| M(1/(threshold j))
  bool truncated = false;              // |A_j| left the exact integer range
};

/// Smallest J <= horizon with norm(witness truncated at J) > threshold, found
/// through the cumulative modular at rho = threshold: the norm exceeds rho
/// exactly when the modular at rho exceeds 1. Ties within kCoverSlack do
/// not count as exceeding.
inline NormThresholdSearch first_norm_exceeding(const OrliczFunction& m, double threshold,
                                                std::size_t horizon) {
  detail::require_normalized(m, "first_norm_exceeding");
  if (!(threshold > 0.0)) throw validation_error("first_norm_exceeding: threshold must be positive");
  NormThresholdSearch r;
  r.threshold = threshold;
  r.horizon = horizon;
  std::vector<RepeatedValue> grouped;
  for (std::size_t j = 1; j <= horizon; ++j) {
    const double v = 1.0 / double(j);
    const double mv = m(v);
    if (!(mv > 0.0) || std::ceil(1.0 / mv) > kExactIntegerLimit) {
      r.truncated = true;
      break;
    }
    const auto size = detail::covering_count(mv, j);
    grouped.push_back({v, double(size)});
    r.modular_at_threshold += double(size) * m(v / threshold);
    r.searched_to = j;
    if (r.modular_at_threshold > 1.0 + kCoverSlack) {
      r.first_j = j;
      r.norm_at_first_j = luxemburg_norm(m, grouped);
      break;
    }
  }
  return r;
}

}  // namespace orlicz
