// orlicz_cli: experiments over Orlicz sequence spaces with JSON reports.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "orlicz/orlicz.hpp"
#include "orlicz/report.hpp"

namespace {

using orlicz::json;

constexpr const char* kTool = "orlicz_cli";
constexpr const char* kVersion = "1.0.0";

struct Options {
  std::string command;
  std::string spec;
  std::size_t n = 16;
  std::vector<std::size_t> n_list;
  std::vector<double> values;
  std::size_t big_j = 100;
  std::size_t big_i = 8;
  std::size_t big_n = 8;
  std::size_t grid = 2000;
  double tol = 1e-9;
  std::uint64_t seed = 1;
  std::size_t samples = 500;
  std::size_t support = 50;
  std::size_t m = 3;
  std::optional<long> ceiling;
  std::size_t horizon = 1000;
  double threshold = 10.0;
  bool normalize = false;
  std::string out;
  std::string csv;
};

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_atomically(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw orlicz::validation_error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw orlicz::validation_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

json function_info(const orlicz::OrliczFunction& m) {
  json j = {{"family", m.family()}, {"spec", m.spec()}};
  j["domain_bound"] = std::isfinite(m.domain_bound()) ? json(m.domain_bound()) : json(nullptr);
  return j;
}

// --- subcommands -----------------------------------------------------------

json run_conjugate(const Options& o) {
  const auto m = orlicz::make_family(o.spec);
  double cross = 0.0;
  const auto pair = orlicz::conjugate(m, &cross);
  const orlicz::LevelSequence levels(pair, o.n);
  const std::size_t rows = std::clamp<std::size_t>(o.grid, 2, 200);
  const double t1 = levels(1);
  json table = json::array();
  for (std::size_t k = 0; k < rows; ++k) {
    const double t = t1 * double(k + 1) / double(rows);
    table.push_back({{"t", t}, {"M", m(t)}, {"Mstar", pair(t)}});
  }
  return {{"op", "conjugate"},
          {"inputs", {{"function", function_info(m)}, {"n", o.n}, {"rows", rows}}},
          {"outputs", {{"levels", levels.values()}, {"table", table}}},
          {"residuals",
           {{"level_max", levels.max_residual()}, {"quadrature_cross_check", cross}}}};
}

json run_norm(const Options& o) {
  const auto m = orlicz::make_family(o.spec);
  if (o.values.empty()) throw orlicz::validation_error("norm: no vector entries given");
  const auto b = orlicz::FiniteSequence::from_dense(o.values);
  const double norm = orlicz::luxemburg_norm(m, b);
  const double mod = norm > 0.0 ? orlicz::modular(m, b, norm) : 0.0;
  return {{"op", "luxemburg_norm"},
          {"inputs", {{"function", function_info(m)}, {"values", o.values}}},
          {"outputs", {{"norm", norm}}},
          {"residuals", {{"modular_at_norm_minus_one", norm > 0.0 ? mod - 1.0 : 0.0}}}};
}

std::vector<std::size_t> default_scan() {
  std::vector<std::size_t> ns;
  for (std::size_t k = 0; k <= 12; ++k) ns.push_back(std::size_t(1) << k);
  return ns;
}

json run_extremal_scan(const Options& o) {
  const auto m = orlicz::make_family(o.spec);
  const auto pair = orlicz::conjugate(m);
  auto ns = o.n_list.empty() ? default_scan() : o.n_list;
  if (std::any_of(ns.begin(), ns.end(), [](std::size_t n) { return n == 0; })) {
    throw orlicz::validation_error("extremal-scan: n must be >= 1");
  }
  const orlicz::LevelSequence levels(pair, *std::max_element(ns.begin(), ns.end()));
  const auto table = orlicz::boundedness_scan(pair, levels, ns);
  json payload = {{"function", function_info(m)}, {"scan", orlicz::to_json(table)}};
  json oracle = json::array();
  for (std::size_t n : ns) {
    if (n > 4) continue;
    const auto prob = orlicz::build_problem(pair, levels, n);
    const double grid_value = orlicz::brute_force_oracle(prob, o.grid);
    oracle.push_back({{"n", n}, {"grid", o.grid}, {"fstar_grid", grid_value}});
  }
  payload["oracle"] = oracle;
  if (!o.csv.empty()) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "n,fstar,lambda,kkt_residual\n";
    for (const auto& r : table.rows) {
      csv << r.n << ',' << r.fstar << ',' << r.lambda << ',' << r.kkt_residual << '\n';
    }
    write_atomically(o.csv, csv.str());
  }
  return payload;
}

json run_decompose(const Options& o) {
  const auto m = orlicz::make_family(o.spec);
  const auto pair = orlicz::conjugate(m);
  if (o.values.empty()) throw orlicz::validation_error("decompose: no vector entries given");
  const orlicz::LevelSequence levels(pair, o.values.size());
  std::vector<double> b = o.values;
  if (o.normalize) b = orlicz::normalize_to_conjugate_sphere(pair, b);
  const auto d = orlicz::decompose(b, pair, levels);
  double worst = 0.0, largest = 0.0;
  const auto back = d.reconstruct();
  for (std::size_t i = 0; i < b.size(); ++i) {
    worst = std::max(worst, std::abs(back[i] - b[i]));
    largest = std::max(largest, std::abs(b[i]));
  }
  const double f = orlicz::weighted_objective(b, levels);
  return {{"op", "decompose"},
          {"inputs", {{"function", function_info(m)}, {"values", b}, {"normalized", o.normalize}}},
          {"outputs", orlicz::to_json(d)},
          {"residuals",
           {{"reconstruction_relative", largest > 0.0 ? worst / largest : 0.0},
            {"total_minus_objective", d.total() - f}}}};
}

orlicz::FiniteSequence random_sequence(std::mt19937_64& rng, std::size_t max_support,
                                       std::size_t index_bound) {
  std::uniform_int_distribution<std::size_t> size_dist(1, max_support);
  std::uniform_real_distribution<double> value_dist(-1.0, 1.0);
  std::vector<std::size_t> indices(index_bound);
  std::iota(indices.begin(), indices.end(), std::size_t(1));
  std::shuffle(indices.begin(), indices.end(), rng);
  const std::size_t k = std::min(size_dist(rng), index_bound);
  std::vector<orlicz::FiniteSequence::Entry> entries;
  for (std::size_t i = 0; i < k; ++i) entries.push_back({indices[i], value_dist(rng)});
  return orlicz::FiniteSequence(std::move(entries));
}

json run_embed_verify(const Options& o) {
  const auto m = orlicz::make_family(o.spec);
  const auto pair = orlicz::conjugate(m);
  if (o.support == 0) throw orlicz::validation_error("embed-verify: --support must be >= 1");
  if (o.big_i > orlicz::truncated_k_guard() || o.big_n > orlicz::truncated_k_guard()) {
    throw orlicz::validation_error("embed-verify: --I and --N are limited to 12");
  }
  const orlicz::LevelSequence levels(pair, std::max({o.support, o.big_n, std::size_t(1)}));
  std::mt19937_64 rng(o.seed);
  std::vector<orlicz::FiniteSequence> samples;
  for (std::size_t s = 0; s < o.samples; ++s) {
    samples.push_back(random_sequence(rng, o.support, 2 * o.support));
  }
  const auto report = orlicz::norm_equivalence_report(pair, levels, samples);
  const auto e1 = orlicz::FiniteSequence::unit(1);
  const double e1_ratio = orlicz::sup_norm(e1, levels, 1) / orlicz::luxemburg_norm(m, e1);

  std::size_t matches = 0, oracle_vectors = 0;
  double max_diff = 0.0;
  if (o.big_i > 0 && o.big_n > 0) {
    for (std::size_t s = 0; s < 50; ++s) {
      const auto b = random_sequence(rng, o.big_i, o.big_i);
      const double fast = orlicz::sup_norm(b, levels, o.big_n);
      const double brute = orlicz::enumerated_sup(b, levels, o.big_i, o.big_n);
      max_diff = std::max(max_diff, std::abs(fast - brute));
      if (std::abs(fast - brute) <= o.tol) ++matches;
      ++oracle_vectors;
    }
  }
  return {{"function", function_info(m)},
          {"seed", o.seed},
          {"report", orlicz::to_json(report)},
          {"e1_ratio", e1_ratio},
          {"oracle",
           {{"I", o.big_i},
            {"N", o.big_n},
            {"vectors", oracle_vectors},
            {"matches", matches},
            {"max_abs_difference", max_diff},
            {"tol", o.tol}}}};
}

json run_derive(const Options& o) {
  auto base = orlicz::SymbolicFamily::full_k();
  if (o.ceiling) base = orlicz::SymbolicFamily::capped(*o.ceiling);
  json stages = json::array();
  auto fam = base;
  for (std::size_t k = 0; k <= o.m; ++k) {
    stages.push_back({{"m", k}, {"family", orlicz::to_json(fam)}});
    fam = orlicz::derive(fam);
  }
  json ranks = json::array();
  for (std::size_t n = 1; n <= o.big_n; ++n) {
    for (std::size_t k = 0; k <= n; ++k) {
      orlicz::KPoint p;
      p.level = n;
      for (std::size_t i = 1; i <= k; ++i) p.support.push_back(i);
      p.signs.assign(k, 1);
      if (!base.contains(p)) continue;
      ranks.push_back({{"n", n},
                       {"size", k},
                       {"rank", orlicz::cb_rank_by_derivation(base, p, o.m + o.big_n + 1).str()}});
    }
  }
  json payload = {{"base", orlicz::to_json(base)},
                  {"stages", stages},
                  {"ranks", ranks},
                  {"zero_rank", orlicz::cb_rank(orlicz::KPoint::origin()).str()}};

  if (o.big_i <= 6 && o.big_n <= 6) {
    const auto m = orlicz::make_family(o.spec.empty() ? "power:p=2" : o.spec);
    const auto pair = orlicz::conjugate(m);
    const orlicz::LevelSequence levels(pair, std::max<std::size_t>(o.big_n, 1));
    const auto start = orlicz::restrict_to_universe(base, o.big_i, o.big_n, 0);
    json rows = json::array();
    bool all = true;
    auto current = start;
    for (std::size_t k = 0; k <= o.m; ++k) {
      if (k > 0) current = orlicz::limit_points(current, levels, o.big_i, k);
      const auto symbolic = orlicz::restrict_to_universe(base, o.big_i, o.big_n, k);
      const bool match = orlicz::same_points(current, symbolic);
      all = all && match;
      rows.push_back({{"m", k},
                      {"oracle_count", current.size()},
                      {"symbolic_count", symbolic.size()},
                      {"match", match}});
    }
    payload["oracle"] = {{"I", o.big_i}, {"N", o.big_n}, {"stages", rows}, {"all_match", all}};
  } else {
    payload["oracle"] = nullptr;
  }
  payload["omega"] = orlicz::to_json(orlicz::verify_omega(base, std::max<std::size_t>(o.m, 1)));
  return payload;
}

json run_nonembed(const Options& o) {
  const auto m = orlicz::normalized_at_one(orlicz::make_family(o.spec));
  const auto div = orlicz::divergence_partial_sums(m, o.big_j);
  const auto groups = orlicz::group_block_norms(m, o.big_j);
  const std::size_t tail = std::min<std::size_t>(10, groups.size());
  std::vector<double> block_tail(groups.end() - std::ptrdiff_t(tail), groups.end());
  const auto search = orlicz::first_norm_exceeding(m, o.threshold, std::max(o.horizon, o.big_j));

  json witness = nullptr;
  const std::uint64_t total = std::accumulate(div.sizes.begin(), div.sizes.end(), std::uint64_t(0));
  if (total <= orlicz::kWitnessCoordinateGuard) {
    const auto partition = orlicz::BlockPartition::uniform(2, std::size_t(total));
    const auto w = orlicz::build_witness(m, partition, o.big_j);
    const auto norms = orlicz::block_norms(w, m, partition);
    witness = {{"coordinates", w.realized.support_size()},
               {"max_block_norm", *std::max_element(norms.begin(), norms.end())},
               {"last_block_norm", norms.back()}};
  }
  if (!o.csv.empty()) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "J,size,partial_sum,norm_partial\n";
    for (std::size_t j = 0; j < div.sizes.size(); ++j) {
      csv << j + 1 << ',' << div.sizes[j] << ',' << div.partial_sums[j] << ','
          << div.norm_partials[j] << '\n';
    }
    write_atomically(o.csv, csv.str());
  }
  return {{"function", function_info(m)},
          {"J", o.big_j},
          {"sizes", div.sizes},
          {"block_norm_tail", block_tail},
          {"partial_sums", div.partial_sums},
          {"norm_partials", div.norm_partials},
          {"threshold_search", orlicz::to_json(search)},
          {"witness", witness}};
}

json config_json(const Options& o) {
  json c = {{"command", o.command}, {"spec", o.spec}, {"seed", o.seed}, {"tol", o.tol},
            {"grid", o.grid}};
  if (o.command == "conjugate") c["n"] = o.n;
  if (o.command == "extremal-scan") c["n"] = o.n_list;
  if (o.command == "norm" || o.command == "decompose") c["values"] = o.values;
  if (o.command == "decompose") c["normalize"] = o.normalize;
  if (o.command == "embed-verify") {
    c["samples"] = o.samples;
    c["support"] = o.support;
  }
  if (o.command == "embed-verify" || o.command == "derive") {
    c["I"] = o.big_i;
    c["N"] = o.big_n;
  }
  if (o.command == "derive") {
    c["m"] = o.m;
    c["ceiling"] = o.ceiling ? json(*o.ceiling) : json(nullptr);
  }
  if (o.command == "nonembed") {
    c["J"] = o.big_j;
    c["threshold"] = o.threshold;
    c["horizon"] = o.horizon;
  }
  return c;
}

int fail(const char* kind, const std::string& message, int code) {
  json err = {{"tool", kTool}, {"error", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << err.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Orlicz sequence space experiments"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  const auto common = [&](CLI::App* sub, bool needs_spec) {
    if (needs_spec) {
      sub->add_option("spec", o.spec, "function spec: power:p=<p>, lt, linear, smooth(<spec>), tabulated:file=<csv>")
          ->required();
    }
    sub->add_option("--out", o.out, "report path (default: $ORLICZ_OUT_DIR/<command>.json or stdout)");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--tol", o.tol, "comparison tolerance");
    sub->add_option("--grid", o.grid, "grid size");
  };

  auto* conj = app.add_subcommand("conjugate", "tables of M, M* and the levels t_n");
  common(conj, true);
  conj->add_option("--n", o.n, "number of levels")->check(CLI::PositiveNumber);

  auto* norm = app.add_subcommand("norm", "Luxemburg norm of a vector");
  common(norm, true);
  norm->add_option("values", o.values, "vector entries a_1 a_2 ...")->required();

  auto* scan = app.add_subcommand("extremal-scan", "extremal values f*(n) with KKT residuals");
  common(scan, true);
  scan->add_option("--n", o.n_list, "comma separated sizes")->delimiter(',');
  scan->add_option("--csv", o.csv, "also write the scan as CSV");

  auto* dec = app.add_subcommand("decompose", "convex decomposition over the generators");
  common(dec, true);
  dec->add_option("values", o.values, "non-increasing non-negative entries")->required();
  dec->add_flag("--normalize", o.normalize, "rescale onto sum M*(b_i) = 1 first");

  auto* emb = app.add_subcommand("embed-verify", "sup-norm against Luxemburg norm on random vectors");
  common(emb, true);
  emb->add_option("--samples", o.samples, "number of random vectors");
  emb->add_option("--support", o.support, "maximal support size");
  emb->add_option("--I", o.big_i, "index bound of the enumeration oracle");
  emb->add_option("--N", o.big_n, "level bound of the enumeration oracle");

  auto* der = app.add_subcommand("derive", "derived sets of K and ranks");
  common(der, false);
  der->add_option("spec", o.spec, "function spec for the realized levels (default power:p=2)");
  der->add_option("--m", o.m, "number of derivations");
  der->add_option("--I", o.big_i, "index bound of the definition-based oracle (<= 6)");
  der->add_option("--N", o.big_n, "level bound (<= 6 for the oracle)");
  der->add_option("--ceiling", o.ceiling, "start from kappa(n) = min(n, ceiling)");

  auto* non = app.add_subcommand("nonembed", "non-embedding witness and divergence");
  common(non, true);
  non->add_option("--J", o.big_j, "truncation horizon")->check(CLI::PositiveNumber);
  non->add_option("--threshold", o.threshold, "norm level searched for");
  non->add_option("--horizon", o.horizon, "largest J examined by the threshold search");
  non->add_option("--csv", o.csv, "also write the divergence table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }
  o.command = app.get_subcommands().front()->get_name();
  if (o.command == "derive") {
    o.big_i = der->count("--I") ? o.big_i : 4;
    o.big_n = der->count("--N") ? o.big_n : 4;
  }

  try {
    json payload;
    if (o.command == "conjugate") payload = run_conjugate(o);
    else if (o.command == "norm") payload = run_norm(o);
    else if (o.command == "extremal-scan") payload = run_extremal_scan(o);
    else if (o.command == "decompose") payload = run_decompose(o);
    else if (o.command == "embed-verify") payload = run_embed_verify(o);
    else if (o.command == "derive") payload = run_derive(o);
    else payload = run_nonembed(o);

    const json report = {{"tool", kTool},
                         {"version", kVersion},
                         {"generated_at", utc_now()},
                         {"config", config_json(o)},
                         {"payload", payload}};
    const std::string line = report.dump() + "\n";
    std::string target = o.out;
    if (target.empty()) {
      if (const char* dir = std::getenv("ORLICZ_OUT_DIR"); dir && *dir) {
        target = (std::filesystem::path(dir) / (o.command + ".json")).string();
      }
    }
    if (target.empty()) {
      std::cout << line;
    } else {
      write_atomically(target, line);
    }
    return 0;
  } catch (const orlicz::validation_error& e) {
    return fail("validation", e.what(), 2);
  } catch (const orlicz::numeric_error& e) {
    return fail("numeric", e.what(), 3);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
}
