#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orlicz/conjugate.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/roots.hpp"

namespace orlicz {

/// maximize f(b) = sum_i (b_i - b_{i+1}) / t_i  (b_{n+1} = 0)
/// over non-negative non-increasing b in R^n with sum_i M*(b_i) = 1.
///
/// Summation by parts gives f(b) = sum_i w_i b_i with
/// w_i = 1/t_i - 1/t_{i-1} (1/t_0 = 0), so partial sums of w telescope to 1/t_k.
class ExtremalProblem {
public:
  ExtremalProblem(ConjugatePair pair, LevelSequence levels, std::size_t n)
      : pair_(std::move(pair)), levels_(std::move(levels)), n_(n) {
    if (n_ == 0) throw validation_error("extremal problem needs n >= 1");
    if (n_ > levels_.size()) {
      throw validation_error("extremal problem needs t_1..t_" + std::to_string(n_) + ", have " +
                             std::to_string(levels_.size()));
    }
    weights_.resize(n_);
    double previous = 0.0;
    for (std::size_t i = 1; i <= n_; ++i) {
      const double inv = 1.0 / levels_(i);
      weights_[i - 1] = inv - previous;
      previous = inv;
    }
    double partial = 0.0;
    for (std::size_t k = 1; k <= n_; ++k) {
      partial += weights_[k - 1];
      const double expected = 1.0 / levels_(k);
      if (std::abs(partial - expected) > 1e-12 * expected * double(k)) {
        throw numeric_error("weights fail to telescope to 1/t_" + std::to_string(k));
      }
    }
  }

  std::size_t size() const { return n_; }
  const std::vector<double>& weights() const { return weights_; }
  double level(std::size_t i) const { return levels_(i); }
  const LevelSequence& levels() const { return levels_; }
  const ConjugatePair& pair() const { return pair_; }

  /// f(b) through the definition sum (b_i - b_{i+1}) / t_i.
  double objective(std::span<const double> b) const {
    double f = 0.0;
    for (std::size_t i = 0; i < b.size() && i < n_; ++i) {
      const double next = i + 1 < b.size() ? b[i + 1] : 0.0;
      f += (b[i] - next) / levels_(i + 1);
    }
    return f;
  }

private:
  ConjugatePair pair_;
  LevelSequence levels_;
  std::size_t n_;
  std::vector<double> weights_;
};

inline ExtremalProblem build_problem(const ConjugatePair& pair, const LevelSequence& levels,
                                     std::size_t n) {
  return ExtremalProblem(pair, levels, n);
}

/// One run a_{i_{j-1}+1} = ... = a_{i_j} of the maximizer.
struct ExtremalBlock {
  std::size_t end;         // i_j
  std::size_t size;        // i_j - i_{j-1}
  double value;            // a_{i_j}
  double inverse_eta;      // 1/eta_j = 1/t_{i_j} - 1/t_{i_{j-1}}  (1/t_{i_1} for j = 1)
};

struct ExtremalSolution {
  std::size_t n = 0;
  std::vector<ExtremalBlock> blocks;  // blocks with positive value only
  double lambda = 0.0;
  double objective = 0.0;             // f* = sum_j a_{i_j} / eta_j
  double feasibility_residual = 0.0;  // sum_i M*(a_i) - 1, through the conjugate

  std::vector<std::size_t> boundaries() const {
    std::vector<std::size_t> out{0};
    for (const auto& b : blocks) out.push_back(b.end);
    return out;
  }

  /// (a_1, ..., a_n) with zeros past i_m.
  std::vector<double> expanded() const {
    std::vector<double> a(n, 0.0);
    std::size_t start = 0;
    for (const auto& b : blocks) {
      std::fill(a.begin() + std::ptrdiff_t(start), a.begin() + std::ptrdiff_t(b.end), b.value);
      start = b.end;
    }
    return a;
  }

  double eta(std::size_t j) const { return 1.0 / blocks.at(j).inverse_eta; }
};

namespace detail {

struct PooledBlock {
  double weight_sum;
  std::size_t count;
  double average() const { return weight_sum / double(count); }
};

/// Pool-adjacent-violators for a non-increasing fit of the weights with unit
/// multiplicities. Equal neighbours are pooled too, so block averages come out
/// strictly decreasing.
inline std::vector<PooledBlock> pool_non_increasing(std::span<const double> w) {
  std::vector<PooledBlock> blocks;
  blocks.reserve(w.size());
  for (double x : w) {
    blocks.push_back({x, 1});
    while (blocks.size() > 1) {
      const auto& cur = blocks.back();
      const auto& prev = blocks[blocks.size() - 2];
      if (prev.weight_sum * double(cur.count) > cur.weight_sum * double(prev.count)) break;
      const PooledBlock merged{prev.weight_sum + cur.weight_sum, prev.count + cur.count};
      blocks.pop_back();
      blocks.back() = merged;
    }
  }
  return blocks;
}

}  // namespace detail

/// Solves the problem from the stationarity structure: for a multiplier
/// lambda each block takes the value M'(W_B / lambda), W_B the block-averaged
/// weight, because (M*)' = (M')^{-1}. Since M' is increasing the order of
/// candidate values follows the order of the weights, so the pooled blocks do
/// not depend on lambda and are computed once. lambda is then found by
/// bisection on the feasibility residual sum |B| M*(b_B) - 1, which is
/// non-increasing in lambda.
inline ExtremalSolution solve(const ExtremalProblem& prob) {
  const auto& m = prob.pair().base();
  const auto pooled = detail::pool_non_increasing(prob.weights());

  std::vector<detail::PooledBlock> active;
  for (const auto& b : pooled)
    if (b.weight_sum > 0.0) active.push_back(b);
  if (active.empty()) throw numeric_error("extremal solve: all weights vanish");

  // M*(M'(x)) = x M'(x) - M(x): equality case of Young's inequality.
  const auto residual = [&](double lambda) {
    double total = 0.0;
    for (const auto& b : active) {
      const double x = b.average() / lambda;
      total += double(b.count) * (x * m.derivative(x) - m(x));
    }
    return total - 1.0;
  };

  const double lambda0 = 1.0 / prob.level(1);
  double lo = lambda0, hi = lambda0;
  for (int k = 0; residual(lo) < 0.0; ++k) {
    if (k >= 200) throw numeric_error("extremal solve: no lower multiplier bracket");
    lo /= 4.0;
  }
  for (int k = 0; residual(hi) > 0.0; ++k) {
    if (k >= 200) throw numeric_error("extremal solve: no upper multiplier bracket");
    hi *= 4.0;
  }
  const auto bracket = roots::bisect(residual, lo, hi);
  const double lambda =
      std::abs(residual(bracket.lo)) < std::abs(residual(bracket.hi)) ? bracket.lo : bracket.hi;

  ExtremalSolution sol;
  sol.n = prob.size();
  sol.lambda = lambda;
  std::size_t end = 0;
  for (const auto& b : pooled) {
    const std::size_t start = end;
    end += b.count;
    if (!(b.weight_sum > 0.0)) continue;
    ExtremalBlock block;
    block.end = end;
    block.size = b.count;
    block.value = m.derivative(b.average() / lambda);
    block.inverse_eta =
        start == 0 ? 1.0 / prob.level(end) : 1.0 / prob.level(end) - 1.0 / prob.level(start);
    if (!sol.blocks.empty() && !(block.value <= sol.blocks.back().value)) {
      throw numeric_error("extremal solve: pooled block values are not monotone (internal error)");
    }
    sol.blocks.push_back(block);
  }

  double feasibility = 0.0;
  for (const auto& b : sol.blocks) {
    sol.objective += b.value * b.inverse_eta;
    feasibility += double(b.size) * prob.pair()(b.value);
  }
  sol.feasibility_residual = feasibility - 1.0;
  return sol;
}

/// Per-block multiplier expressions
///   lambda_1 = 1 / (i_1 t_{i_1} (M*)'(a_{i_1})),
///   lambda_j = (1/t_{i_j} - 1/t_{i_{j-1}}) / ((i_j - i_{j-1}) (M*)'(a_{i_j})),
/// with (M*)' evaluated through the conjugate pair.
inline std::vector<double> block_multipliers(const ExtremalSolution& sol,
                                             const ConjugatePair& pair) {
  std::vector<double> out;
  for (const auto& b : sol.blocks) {
    out.push_back(b.inverse_eta / (double(b.size) * pair.derivative(b.value)));
  }
  return out;
}

/// max_j |lambda_j - lambda_1| / lambda_1. Zero for a single block.
inline double kkt_residual(const ExtremalSolution& sol, const ConjugatePair& pair) {
  const auto lambdas = block_multipliers(sol, pair);
  double worst = 0.0;
  for (std::size_t j = 1; j < lambdas.size(); ++j) {
    worst = std::max(worst, std::abs(lambdas[j] - lambdas[0]) / lambdas[0]);
  }
  return worst;
}

/// Exhaustive search over a grid in conjugate mass: u_i = M*(b_i) = k_i / grid
/// with k_1 >= ... >= k_n >= 0 and sum k_i = grid, so every grid point is
/// feasible and the last coordinate is fixed by the constraint.
inline double brute_force_oracle(const ExtremalProblem& prob, std::size_t grid) {
  const std::size_t n = prob.size();
  if (n > 4) throw validation_error("brute_force_oracle: n <= 4 required (cost guard)");
  if (grid == 0) throw validation_error("brute_force_oracle: grid must be positive");

  std::vector<double> b_of(grid + 1);
  for (std::size_t k = 0; k <= grid; ++k) {
    b_of[k] = prob.pair().inverse(double(k) / double(grid));
  }
  const auto& w = prob.weights();
  double best = -kInfinity;
  std::function<void(std::size_t, std::size_t, std::size_t, double)> descend =
      [&](std::size_t i, std::size_t remaining, std::size_t cap, double partial) {
        if (i + 1 == n) {
          if (remaining <= cap) best = std::max(best, partial + w[i] * b_of[remaining]);
          return;
        }
        const std::size_t slots = n - i;
        const std::size_t low = (remaining + slots - 1) / slots;
        for (std::size_t k = std::min(cap, remaining); k + 1 > low; --k) {
          descend(i + 1, remaining - k, k, partial + w[i] * b_of[k]);
          if (k == 0) break;
        }
      };
  descend(0, grid, grid, 0.0);
  return best;
}

struct ScanRow {
  std::size_t n = 0;
  double fstar = 0.0;
  double lambda = 0.0;
  std::vector<std::size_t> boundaries;
  double kkt_residual = 0.0;
  double feasibility_residual = 0.0;
  std::optional<std::string> error;
};

struct ScanTable {
  std::vector<ScanRow> rows;
  double c_hat = 0.0;  // max f*(n) over the scan
  /// (f*(n_last) - f*(n_ref)) / c_hat, n_ref the largest scanned n <= n_last / 10.
  double last_decade_increment = 0.0;
  std::size_t reference_n = 0;
  bool plateau = false;  // last_decade_increment < 0.05; empirical, not a certificate
  bool monotone = true;  // f*(n) non-decreasing along the scan
};

inline ScanTable boundedness_scan(const ConjugatePair& pair, const LevelSequence& levels,
                                  std::span<const std::size_t> n_list) {
  for (std::size_t k = 1; k < n_list.size(); ++k) {
    if (!(n_list[k] > n_list[k - 1])) throw validation_error("boundedness_scan: n_list must increase");
  }
  ScanTable table;
  for (std::size_t n : n_list) {
    ScanRow row;
    row.n = n;
    try {
      const auto sol = solve(ExtremalProblem(pair, levels, n));
      row.fstar = sol.objective;
      row.lambda = sol.lambda;
      row.boundaries = sol.boundaries();
      row.kkt_residual = kkt_residual(sol, pair);
      row.feasibility_residual = sol.feasibility_residual;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  }

  const ScanRow* last = nullptr;
  const ScanRow* previous = nullptr;
  for (const auto& row : table.rows) {
    if (row.error) continue;
    table.c_hat = std::max(table.c_hat, row.fstar);
    if (previous && row.fstar < previous->fstar) table.monotone = false;
    previous = &row;
    last = &row;
  }
  if (last && table.c_hat > 0.0) {
    const ScanRow* reference = nullptr;
    for (const auto& row : table.rows) {
      if (row.error) continue;
      if (!reference) reference = &row;
      if (row.n * 10 <= last->n) reference = &row;
    }
    table.reference_n = reference->n;
    table.last_decade_increment = (last->fstar - reference->fstar) / table.c_hat;
    table.plateau = table.last_decade_increment < 0.05;
  }
  return table;
}

}  // namespace orlicz
