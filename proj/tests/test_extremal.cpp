#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "orlicz/orlicz.hpp"

using namespace orlicz;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// power(2), n = 2: M* = t^2/2 makes the order constraint inactive, so
// b = sqrt(2) w / |w|, f* = sqrt(2) |w| and lambda = |w| / sqrt(2).
struct ClosedForm {
  double w1, w2, fstar, lambda;
};

ClosedForm power2_n2() {
  const double w1 = 1.0 / std::sqrt(2.0);
  const double w2 = 1.0 - w1;
  const double norm = std::hypot(w1, w2);
  return {w1, w2, std::sqrt(2.0) * norm, norm / std::sqrt(2.0)};
}

}  // namespace

TEST_CASE("weights telescope", "[extremal]") {
  const auto pair = conjugate(power_family(2.0));
  const LevelSequence levels(pair, 16);
  const auto prob = build_problem(pair, levels, 2);
  const auto cf = power2_n2();
  CHECK_THAT(prob.weights()[0], WithinRel(cf.w1, 1e-14));
  CHECK_THAT(prob.weights()[1], WithinRel(cf.w2, 1e-13));
  const auto big = build_problem(pair, levels, 16);
  const double total = std::accumulate(big.weights().begin(), big.weights().end(), 0.0);
  CHECK_THAT(total, WithinRel(1.0 / levels(16), 1e-13));
  CHECK_THROWS_AS(build_problem(pair, levels, 17), validation_error);
  CHECK_THROWS_AS(build_problem(pair, levels, 0), validation_error);
}

TEST_CASE("power(2) n = 2 closed form", "[extremal]") {
  const auto pair = conjugate(power_family(2.0));
  const LevelSequence levels(pair, 2);
  const auto prob = build_problem(pair, levels, 2);
  const auto sol = solve(prob);
  const auto cf = power2_n2();
  CHECK_THAT(sol.objective, WithinRel(cf.fstar, 1e-12));
  CHECK_THAT(sol.lambda, WithinRel(cf.lambda, 1e-12));
  CHECK_THAT(sol.objective, WithinAbs(1.08239, 1e-5));
  CHECK_THAT(sol.lambda, WithinAbs(0.54120, 1e-5));
  CHECK_THAT(prob.objective(sol.expanded()), WithinRel(sol.objective, 1e-12));
  CHECK(std::abs(sol.feasibility_residual) < 1e-12);
  CHECK(sol.blocks.size() == 2);
  CHECK(kkt_residual(sol, pair) < 1e-10);
}

TEST_CASE("solver against grid oracle", "[extremal]") {
  for (const char* spec : {"power:p=2", "power:p=3", "lt"}) {
    const auto pair = conjugate(make_family(spec));
    const LevelSequence levels(pair, 3);
    for (std::size_t n = 1; n <= 3; ++n) {
      const auto prob = build_problem(pair, levels, n);
      const auto sol = solve(prob);
      const double grid = brute_force_oracle(prob, 400);
      CHECK(grid <= sol.objective + 1e-9);
      CHECK(sol.objective - grid < 2e-2);
      CHECK(kkt_residual(sol, pair) <= 1e-6);
    }
  }
}

TEST_CASE("pooling merges blocks with increasing weights", "[extremal]") {
  const auto pair = conjugate(power_family(2.0));
  // w = (1, 1/0.9 - 1, 2 - 1/0.9): w_2 < w_3, so indices 2 and 3 pool
  const LevelSequence levels(std::vector<double>{1.0, 0.9, 0.5});
  const auto prob = build_problem(pair, levels, 3);
  const auto sol = solve(prob);
  REQUIRE(sol.blocks.size() == 2);
  CHECK(sol.blocks[0].size == 1);
  CHECK(sol.blocks[1].size == 2);
  CHECK(sol.boundaries() == std::vector<std::size_t>{0, 1, 3});
  const auto b = sol.expanded();
  CHECK(b[1] == b[2]);
  CHECK(kkt_residual(sol, pair) < 1e-10);
  const double grid = brute_force_oracle(prob, 2000);
  CHECK(std::abs(sol.objective - grid) < 5e-3);
  CHECK(grid <= sol.objective + 1e-12);
}

TEST_CASE("oracle guard", "[extremal]") {
  const auto pair = conjugate(power_family(2.0));
  const LevelSequence levels(pair, 5);
  CHECK_THROWS_AS(brute_force_oracle(build_problem(pair, levels, 5), 10), validation_error);
}

TEST_CASE("boundedness scan", "[extremal]") {
  const auto pair = conjugate(power_family(2.0));
  const LevelSequence levels(pair, 64);
  const std::vector<std::size_t> ns{1, 2, 4, 8, 16, 32, 64};
  const auto table = boundedness_scan(pair, levels, ns);
  REQUIRE(table.rows.size() == ns.size());
  CHECK(table.monotone);
  CHECK_THAT(table.rows[0].fstar, WithinRel(1.0, 1e-12));
  CHECK(table.reference_n == 4);
  CHECK(table.c_hat == table.rows.back().fstar);
  for (const auto& row : table.rows) {
    CHECK_FALSE(row.error.has_value());
    CHECK(row.kkt_residual < 1e-6);
  }
  const std::vector<std::size_t> bad{4, 2};
  CHECK_THROWS_AS(boundedness_scan(pair, levels, bad), validation_error);
}
