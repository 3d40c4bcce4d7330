// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "orlicz/orlicz.hpp"

using namespace orlicz;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::vector<std::string> kFamilies{"power:p=1.5", "power:p=2", "power:p=3", "lt",
                                         "smooth(power:p=2)"};

// 1 ---------------------------------------------------------------------------
Outcome check_conjugate_correctness() {
  double worst = 0.0;
  for (double p : {1.5, 2.0, 3.0}) {
    const auto pair = conjugate(power_family(p));
    const double q = p / (p - 1.0);
    for (int k = 0; k < 50; ++k) {
      const double t = std::pow(10.0, -4.0 + 4.0 * k / 49.0);
      const double exact = std::pow(t, q) / q;
      worst = std::max(worst, std::abs(pair(t) - exact) / exact);
    }
  }
  return {worst <= 1e-8, "max relative error " + fmt(worst) + " (limit 1e-8)"};
}

// 2 ---------------------------------------------------------------------------
Outcome check_level_sequence() {
  const std::size_t n_max = 10000;
  const LevelSequence p2(conjugate(power_family(2.0)), n_max);
  double worst = 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    worst = std::max(worst, std::abs(p2(n) - std::sqrt(2.0 / double(n))));
  }
  bool decreasing = true;
  std::string failing;
  for (const auto& spec : kFamilies) {
    const LevelSequence levels(conjugate(make_family(spec)), n_max);
    for (std::size_t n = 2; n <= n_max; ++n) {
      if (!(levels(n) < levels(n - 1))) {
        decreasing = false;
        failing += " " + spec;
        break;
      }
    }
  }
  return {worst <= 1e-10 && decreasing,
          "power(2) max |t_n - sqrt(2/n)| = " + fmt(worst) + " for n <= 1e4; strictly decreasing: " +
              (decreasing ? "all families" : "no," + failing)};
}

// 3 ---------------------------------------------------------------------------
Outcome check_luxemburg_closed_form() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> size(1, 20);
  std::uniform_real_distribution<double> value(-5.0, 5.0);
  double worst = 0.0;
  for (double p : {1.5, 2.0, 3.0}) {
    const auto m = normalized_at_one(power_family(p));  // t^p
    for (int s = 0; s < 100; ++s) {
      std::vector<double> a(std::size_t(size(rng)));
      double lp = 0.0;
      for (double& x : a) {
        x = value(rng);
        lp += std::pow(std::abs(x), p);
      }
      lp = std::pow(lp, 1.0 / p);
      const double lux = luxemburg_norm(m, FiniteSequence::from_dense(a));
      worst = std::max(worst, std::abs(lux - lp) / lp);
    }
  }
  return {worst <= 1e-8, "max relative error " + fmt(worst) + " over 300 vectors (limit 1e-8)"};
}

// 4 ---------------------------------------------------------------------------
Outcome check_solver_vs_oracle() {
  double worst_gap = 0.0, worst_kkt = 0.0;
  for (const char* spec : {"power:p=2", "power:p=3", "lt"}) {
    const auto pair = conjugate(make_family(spec));
    const LevelSequence levels(pair, 4);
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto prob = build_problem(pair, levels, n);
      const auto sol = solve(prob);
      worst_gap = std::max(worst_gap, std::abs(sol.objective - brute_force_oracle(prob, 2000)));
      worst_kkt = std::max(worst_kkt, kkt_residual(sol, pair));
    }
  }
  return {worst_gap <= 5e-3 && worst_kkt <= 1e-6,
          "max |f*_solve - f*_grid| = " + fmt(worst_gap) + " (limit 5e-3), max KKT residual " +
              fmt(worst_kkt) + " (limit 1e-6)"};
}

// 5 ---------------------------------------------------------------------------
Outcome check_closed_form_spot() {
  const auto pair = conjugate(power_family(2.0));
  const auto sol = solve(build_problem(pair, LevelSequence(pair, 2), 2));
  const bool ok = std::abs(sol.objective - 1.08239) <= 1e-5 && std::abs(sol.lambda - 0.54120) <= 1e-5;
  return {ok, "f* = " + fmt(sol.objective) + ", lambda = " + fmt(sol.lambda)};
}

// 6 ---------------------------------------------------------------------------
std::vector<std::size_t> dyadic_scan() {
  std::vector<std::size_t> ns;
  for (std::size_t k = 0; k <= 12; ++k) ns.push_back(std::size_t(1) << k);
  return ns;
}

double lt_c_hat = 0.0;

Outcome check_boundedness_dichotomy() {
  const auto ns = dyadic_scan();
  auto t0 = std::chrono::steady_clock::now();
  const auto p2 = conjugate(power_family(2.0));
  const auto p2_table = boundedness_scan(p2, LevelSequence(p2, ns.back()), ns);
  const double p2_time = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto lt = conjugate(lt_family());
  const auto lt_table = boundedness_scan(lt, LevelSequence(lt, ns.back()), ns);
  const double lt_time = seconds_since(t0);
  lt_c_hat = lt_table.c_hat;

  bool strictly = true;
  for (std::size_t k = 1; k < p2_table.rows.size(); ++k) {
    if (p2_table.rows[k].error || !(p2_table.rows[k].fstar > p2_table.rows[k - 1].fstar)) strictly = false;
  }
  bool lt_clean = true;
  for (const auto& r : lt_table.rows) lt_clean = lt_clean && !r.error;
  const bool ok = strictly && p2_table.last_decade_increment > 0.05 && lt_clean &&
                  lt_table.last_decade_increment < 0.05 && p2_time < 60.0 && lt_time < 60.0;
  return {ok, "power(2) strictly increasing: " + std::string(strictly ? "yes" : "no") +
                  ", increment " + fmt(p2_table.last_decade_increment) + " (> 0.05); lt increment " +
                  fmt(lt_table.last_decade_increment) + " (< 0.05), C_hat " + fmt(lt_table.c_hat) +
                  "; times " + fmt(p2_time) + " s / " + fmt(lt_time) + " s"};
}

// 7 ---------------------------------------------------------------------------
Outcome check_decomposition() {
  const auto pair = conjugate(lt_family());
  const std::size_t max_len = 200;
  const LevelSequence levels(pair, max_len);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_rec = 0.0, worst_sum = 0.0, largest_total = 0.0;
  for (int s = 0; s < 200; ++s) {
    std::vector<double> raw(len(rng));
    for (double& x : raw) x = u(rng);
    std::sort(raw.rbegin(), raw.rend());
    const auto b = normalize_to_conjugate_sphere(pair, raw);
    const auto d = decompose(b, pair, levels);
    const auto back = d.reconstruct();
    for (std::size_t i = 0; i < b.size(); ++i) {
      worst_rec = std::max(worst_rec, std::abs(back[i] - b[i]) / b.front());
    }
    worst_sum = std::max(worst_sum, std::abs(d.total() - weighted_objective(b, levels)));
    largest_total = std::max(largest_total, d.total());
  }
  const bool ok = worst_rec <= 1e-14 && worst_sum <= 1e-12 && lt_c_hat > 0.0 &&
                  largest_total <= 1.1 * lt_c_hat;
  return {ok, "reconstruction " + fmt(worst_rec) + " (1e-14), |sum c - f| " + fmt(worst_sum) +
                  " (1e-12), max sum c " + fmt(largest_total) + " <= 1.1 C_hat = " +
                  fmt(1.1 * lt_c_hat)};
}

// 8 ---------------------------------------------------------------------------
FiniteSequence random_vector(std::mt19937_64& rng, std::size_t max_support, std::size_t index_bound) {
  std::uniform_int_distribution<std::size_t> size(1, max_support);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::vector<std::size_t> idx(index_bound);
  for (std::size_t i = 0; i < index_bound; ++i) idx[i] = i + 1;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<FiniteSequence::Entry> e;
  const std::size_t k = std::min(size(rng), index_bound);
  for (std::size_t i = 0; i < k; ++i) e.push_back({idx[i], value(rng)});
  return FiniteSequence(std::move(e));
}

Outcome check_embedding_sandwich() {
  std::mt19937_64 rng(8);
  double worst = 0.0;
  bool all = true;
  for (const auto& spec : kFamilies) {
    const auto pair = conjugate(make_family(spec));
    const LevelSequence levels(pair, 50);
    std::vector<FiniteSequence> samples;
    for (int s = 0; s < 500; ++s) samples.push_back(random_vector(rng, 50, 100));
    const auto r = norm_equivalence_report(pair, levels, samples);
    all = all && r.upper_bound_holds;
    worst = std::max(worst, r.max_ratio);
  }
  const auto pair = conjugate(power_family(2.0));
  const auto e1 = FiniteSequence::unit(1);
  const double ratio = sup_norm(e1, LevelSequence(pair, 1), 1) / luxemburg_norm(pair.base(), e1);
  const bool ok = all && std::abs(ratio - 2.0) <= 1e-9;
  return {ok, "max ratio " + fmt(worst) + " over 2500 vectors (<= 2 + 1e-9); e1 ratio for power(2) = " +
                  fmt(ratio)};
}

// 9 ---------------------------------------------------------------------------
Outcome check_sup_norm_exactness() {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> dyadic(-64, 64);
  std::size_t checked = 0, mismatched = 0;
  for (const char* spec : {"power:p=2", "power:p=3", "lt"}) {
    const auto pair = conjugate(make_family(spec));
    const LevelSequence levels(pair, 8);
    for (int s = 0; s < 40; ++s) {
      auto b = random_vector(rng, 6, 6);
      if (s % 2 == 1) {  // dyadic values produce ties
        std::vector<FiniteSequence::Entry> e;
        for (const auto& x : b.entries()) e.push_back({x.index, dyadic(rng) / 16.0});
        b = FiniteSequence(std::move(e));
      }
      ++checked;
      if (sup_norm(b, levels, 8) != enumerated_sup(b, levels, 8, 8)) ++mismatched;
    }
  }
  return {mismatched == 0, std::to_string(checked - mismatched) + "/" + std::to_string(checked) +
                               " vectors with bitwise-equal sup over I = N = 8"};
}

// 10 --------------------------------------------------------------------------
Outcome check_derived_sets() {
  bool closed_form = true;
  auto fam = SymbolicFamily::full_k();
  for (std::size_t m = 0; m <= 64; ++m) {
    for (std::size_t n = 1; n <= 100; ++n) {
      const bool present = n >= m;
      if (fam.has_level(n) != present || (present && fam.cap(n) != long(n) - long(m))) closed_form = false;
    }
    if (!fam.zero_flag) closed_form = false;
    fam = derive(fam);
  }
  const auto levels = LevelSequence(conjugate(power_family(2.0)), 6);
  std::size_t universes = 0, mismatches = 0;
  for (std::size_t i = 1; i <= 6; ++i) {
    for (std::size_t n = 1; n <= 6; ++n) {
      ++universes;
      auto current = truncated_universe(i, n);
      bool ok = same_points(current, restrict_to_universe(SymbolicFamily::full_k(), i, n, 0));
      for (std::size_t m = 1; m <= n; ++m) {
        current = limit_points(current, levels, i, m);
        ok = ok && same_points(current, restrict_to_universe(SymbolicFamily::full_k(), i, n, m));
      }
      if (!ok) ++mismatches;
    }
  }
  const bool omega = verify_omega(SymbolicFamily::full_k(), 50).passes;
  return {closed_form && mismatches == 0 && omega,
          std::string("closed form for m <= 64: ") + (closed_form ? "yes" : "no") + "; oracle agrees on " +
              std::to_string(universes - mismatches) + "/" + std::to_string(universes) +
              " universes (I, N <= 6, m <= N); verify_omega(50): " + (omega ? "pass" : "fail")};
}

// 11 --------------------------------------------------------------------------
Outcome check_non_embedding() {
  struct Case {
    const char* name;
    OrliczFunction m;
  };
  const std::vector<Case> cases{{"linear", normalized_at_one(linear_family())},
                                {"power(2)", normalized_at_one(power_family(2.0))},
                                {"lt", normalized_at_one(lt_family())}};
  const std::size_t horizon_j = 100, search_horizon = 1000;
  Outcome out;
  for (const auto& c : cases) {
    const auto div = divergence_partial_sums(c.m, horizon_j);
    bool sums = true;
    for (std::size_t j = 1; j <= horizon_j; ++j) {
      if (!(div.partial_sums[j - 1] >= double(j) * (1.0 - kCoverSlack))) sums = false;
    }
    // block norms: realized witness where it fits, one block per group otherwise
    bool blocks = true;
    std::uint64_t total = 0;
    for (auto s : div.sizes) total += s;
    std::string block_source;
    if (total <= kWitnessCoordinateGuard) {
      const auto partition = BlockPartition::uniform(1, std::size_t(total));
      const auto w = build_witness(c.m, partition, horizon_j);
      const auto norms = block_norms(w, c.m, partition);
      std::size_t k = 0;
      for (const auto& g : w.groups) {
        for (std::size_t b = 0; b < g.size(); ++b, ++k) {
          if (norms[k] > (1.0 / double(g.j)) * (1.0 + 1e-10)) blocks = false;
        }
      }
      block_source = "realized witness, " + std::to_string(total) + " blocks";
    } else {
      const auto norms = group_block_norms(c.m, horizon_j);
      for (std::size_t j = 1; j <= horizon_j; ++j) {
        if (norms[j - 1] > (1.0 / double(j)) * (1.0 + 1e-10)) blocks = false;
      }
      block_source = "one block per j, witness needs " + fmt(double(total)) + " coordinates";
    }
    const auto search = first_norm_exceeding(c.m, 10.0, search_horizon);
    const bool exceeded = search.first_j.has_value();
    const bool ok = sums && blocks && exceeded;
    out.pass = out.pass && ok;
    std::string line = std::string("  11.") + c.name + " " + (ok ? "PASS" : "FAIL") +
                       ": S_J >= J for J <= 100: " + (sums ? "yes" : "no") +
                       "; block norms <= 1/j: " + (blocks ? "yes" : "no") + " (" + block_source +
                       "); norm > 10: ";
    if (exceeded) {
      line += "at J* = " + std::to_string(*search.first_j) + " (norm " + fmt(*search.norm_at_first_j) + ")";
    } else {
      line += "not reached up to J = " + std::to_string(search.searched_to) +
              (search.truncated ? " (|A_j| beyond 2^53 after that)" : "") +
              ", modular at rho = 10 is " + fmt(search.modular_at_threshold) + ", norm " +
              fmt(div.norm_partials.back()) + " at J = 100";
    }
    out.detail += "\n" + line;
  }
  return out;
}

// 12 --------------------------------------------------------------------------
std::string capture(const std::string& args) {
  const std::string cmd = std::string(ORLICZ_CLI_PATH) + " " + args;
  std::string text;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {};
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) text.append(buf.data(), got);
  if (pclose(pipe) != 0) return {};
  return text;
}

Outcome check_determinism() {
  const std::vector<std::string> configs{
      "conjugate lt --n 64",
      "norm power:p=3 1 -2 0.5",
      "extremal-scan lt --n 1,2,4,8,16",
      "decompose power:p=2 3 2 1 --normalize",
      "embed-verify power:p=1.5 --samples 100 --support 20 --seed 42 --I 6 --N 6",
      "derive --m 4 --I 5 --N 5",
      "nonembed power:p=2 --J 50"};
  std::size_t identical = 0;
  for (const auto& c : configs) {
    const auto a = capture(c), b = capture(c);
    if (a.empty() || b.empty()) continue;
    const auto ja = nlohmann::json::parse(a), jb = nlohmann::json::parse(b);
    if (ja["payload"].dump() == jb["payload"].dump() && ja["config"].dump() == jb["config"].dump()) {
      ++identical;
    }
  }
  return {identical == configs.size(), std::to_string(identical) + "/" + std::to_string(configs.size()) +
                                           " CLI configs byte-identical across two runs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"conjugate correctness", check_conjugate_correctness},
      {"level sequence", check_level_sequence},
      {"Luxemburg norm", check_luxemburg_closed_form},
      {"extremal solver vs oracle", check_solver_vs_oracle},
      {"closed-form spot check", check_closed_form_spot},
      {"boundedness dichotomy", check_boundedness_dichotomy},
      {"decomposition", check_decomposition},
      {"embedding sandwich", check_embedding_sandwich},
      {"sup_norm exactness", check_sup_norm_exactness},
      {"derived sets", check_derived_sets},
      {"non-embedding witness", check_non_embedding},
      {"determinism", check_determinism}};
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k + 1 << " (" << criteria[k].first
              << ", " << fmt(seconds_since(t0)) << " s): " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " criterion(s) FAIL") << std::endl;
  return failures == 0 ? 0 : 1;
}
