#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orlicz/errors.hpp"

namespace orlicz {

/// Finitely supported real sequence (an element of c00). Indices are 1-based
/// and stored sorted; zero values are not stored.
class FiniteSequence {
public:
  struct Entry {
    std::size_t index;
    double value;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  FiniteSequence() = default;

  explicit FiniteSequence(std::vector<Entry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.index < b.index; });
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      if (entries_[k].index == 0) throw validation_error("sequence indices start at 1");
      if (k > 0 && entries_[k].index == entries_[k - 1].index) {
        throw validation_error("duplicate sequence index " + std::to_string(entries_[k].index));
      }
    }
    std::erase_if(entries_, [](const Entry& e) { return e.value == 0.0; });
  }

  /// (a_1, ..., a_n) placed at indices 1..n.
  static FiniteSequence from_dense(std::span<const double> values) {
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < values.size(); ++i) entries.push_back({i + 1, values[i]});
    return FiniteSequence(std::move(entries));
  }

  /// Unit vector e_i.
  static FiniteSequence unit(std::size_t index) { return FiniteSequence({{index, 1.0}}); }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  bool is_zero() const { return entries_.empty(); }
  std::size_t max_index() const { return entries_.empty() ? 0 : entries_.back().index; }

  double operator[](std::size_t index) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                               [](const Entry& e, std::size_t i) { return e.index < i; });
    return it != entries_.end() && it->index == index ? it->value : 0.0;
  }

  /// Values at indices 1..max_index() with zeros filled in.
  std::vector<double> dense() const {
    std::vector<double> out(max_index(), 0.0);
    for (const auto& e : entries_) out[e.index - 1] = e.value;
    return out;
  }

  /// Restriction to indices in [first, last].
  FiniteSequence restricted(std::size_t first, std::size_t last) const {
    std::vector<Entry> kept;
    for (const auto& e : entries_)
      if (e.index >= first && e.index <= last) kept.push_back(e);
    return FiniteSequence(std::move(kept));
  }

  FiniteSequence scaled(double factor) const {
    std::vector<Entry> out = entries_;
    for (auto& e : out) e.value *= factor;
    return FiniteSequence(std::move(out));
  }

  friend bool operator==(const FiniteSequence&, const FiniteSequence&) = default;

private:
  std::vector<Entry> entries_;
};

/// A value repeated `multiplicity` times; lets norms of vectors with huge
/// supports but few distinct values be evaluated without materializing them.
struct RepeatedValue {
  double value;
  double multiplicity;
};

}  // namespace orlicz
