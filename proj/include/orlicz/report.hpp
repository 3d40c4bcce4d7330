#pragma once

// JSON serialization of the result types. Requires nlohmann/json.

#include <string>

#include <json.hpp>

#include "orlicz/embedding.hpp"
#include "orlicz/extremal.hpp"
#include "orlicz/nonembedding.hpp"
#include "orlicz/ordinal.hpp"

namespace orlicz {

using json = nlohmann::ordered_json;

inline json to_json(const KPoint& p) {
  return {{"level", p.level}, {"support", p.support}, {"signs", p.signs}};
}

inline json to_json(const ScanTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = {{"n", r.n},
                {"fstar", r.fstar},
                {"lambda", r.lambda},
                {"blocks", r.boundaries},
                {"kkt_residual", r.kkt_residual},
                {"feasibility_residual", r.feasibility_residual}};
    if (r.error) row["error"] = *r.error;
    rows.push_back(row);
  }
  return {{"rows", rows},
          {"c_hat", t.c_hat},
          {"last_decade_increment", t.last_decade_increment},
          {"reference_n", t.reference_n},
          {"plateau", t.plateau},
          {"monotone", t.monotone}};
}

inline json to_json(const Decomposition& d) {
  return {{"coefficients", d.coefficients},
          {"levels", d.levels},
          {"total", d.total()},
          {"reconstructed", d.reconstruct()}};
}

inline json to_json(const NormEquivalenceReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples) {
    samples.push_back({{"sample_id", s.sample_id},
                       {"lux_norm", s.lux_norm},
                       {"sup_norm", s.sup_norm},
                       {"ratio", s.ratio}});
  }
  return {{"samples", samples},
          {"skipped_zero", r.skipped_zero},
          {"min_ratio", r.min_ratio},
          {"max_ratio", r.max_ratio},
          {"upper_bound_holds", r.upper_bound_holds}};
}

inline json to_json(const SymbolicFamily& f) {
  json caps = {{"rule", "min(n - shift, ceiling)"}, {"shift", f.shift}};
  caps["ceiling"] = f.ceiling ? json(*f.ceiling) : json(nullptr);
  return {{"n_min", f.n_min},
          {"n_max", f.n_max ? json(*f.n_max) : json(nullptr)},
          {"caps", caps},
          {"zero_flag", f.zero_flag}};
}

inline json to_json(const OmegaReport& r) {
  json stages = json::array();
  for (const auto& s : r.stages) {
    stages.push_back({{"m", s.m},
                      {"zero_present", s.zero_present},
                      {"first_level", s.first_level ? json(*s.first_level) : json(nullptr)}});
  }
  return {{"m_max", r.m_max},
          {"stages", stages},
          {"zero_in_every_stage", r.zero_in_every_stage},
          {"nonzero_ranks_finite", r.nonzero_ranks_finite},
          {"passes", r.passes}};
}

inline json to_json(const NormThresholdSearch& s) {
  return {{"threshold", s.threshold},
          {"horizon", s.horizon},
          {"first_j", s.first_j ? json(*s.first_j) : json(nullptr)},
          {"norm_at_first_j", s.norm_at_first_j ? json(*s.norm_at_first_j) : json(nullptr)},
          {"searched_to", s.searched_to},
          {"modular_at_threshold", s.modular_at_threshold},
          {"truncated", s.truncated}};
}

}  // namespace orlicz
