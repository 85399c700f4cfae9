#include "sfl/record.hpp"

#include <cstdio>

#include "sfl/config.hpp"
#include "sfl/version.hpp"

namespace sfl {

using nlohmann::json;

json to_json(const std::vector<EpsilonStat>& stats) {
  json arr = json::array();
  for (const EpsilonStat& s : stats) {
    arr.push_back(json{{"epsilon", s.epsilon},
                       {"hits", s.hits},
                       {"trials", s.trials},
                       {"estimate", s.estimate},
                       {"ci_lo", s.ci_lo},
                       {"ci_hi", s.ci_hi}});
  }
  return arr;
}

json to_json(const TailRecord& rec) {
  return json{{"threshold_unit", rec.threshold_unit},
              {"s_min", rec.s_min},
              {"s_max", rec.s_max},
              {"truncation_hits_total", rec.truncation_hits_total},
              {"tail", to_json(rec.tail)}};
}

json to_json(const EdgeRecord& rec) {
  return json{{"aspect", rec.aspect},
              {"predicted_smin_ratio", rec.predicted_smin_ratio},
              {"predicted_smax_ratio", rec.predicted_smax_ratio},
              {"mean_smin_ratio", rec.mean_smin_ratio},
              {"smin_ci", json::array({rec.smin_ci_lo, rec.smin_ci_hi})},
              {"mean_smax_ratio", rec.mean_smax_ratio},
              {"smax_ci", json::array({rec.smax_ci_lo, rec.smax_ci_hi})},
              {"smin_ratio", rec.smin_ratio},
              {"smax_ratio", rec.smax_ratio}};
}

json to_json(const DistanceRecord& rec) {
  return json{{"m", rec.m},
              {"d", rec.d},
              {"l", rec.l},
              {"resample_count", rec.resample_count},
              {"dist_v0", rec.dist_v0},
              {"dist_vr", rec.dist_vr},
              {"w_ratio", rec.w_ratio},
              {"tail_v0", to_json(rec.tail_v0)},
              {"tail_vr", to_json(rec.tail_vr)}};
}

json to_json(const DecouplingRecord& rec) {
  json rows = json::array();
  for (const DecouplingRow& r : rec.rows) {
    rows.push_back(json{{"a", r.a},
                        {"b", r.b},
                        {"lhs_hits", r.lhs_hits},
                        {"lhs", r.lhs},
                        {"lhs_ci", json::array({r.lhs_lo, r.lhs_hi})},
                        {"sup_factor", r.sup_factor},
                        {"tail_factor", r.tail_factor},
                        {"rhs", r.rhs},
                        {"holds", r.holds}});
  }
  return json{{"m", rec.m},
              {"n_dim", rec.n_dim},
              {"k1", rec.k1},
              {"a_grid", rec.a_grid},
              {"b_grid", rec.b_grid},
              {"rows", rows},
              {"satisfied_fraction", rec.satisfied_fraction}};
}

json to_json(const TensorizationRecord& rec) {
  json rows = json::array();
  for (const TensorizationRow& r : rec.rows) {
    rows.push_back(json{{"family", r.family},
                        {"n", r.n},
                        {"param", r.param},
                        {"hits", r.hits},
                        {"estimate", r.estimate},
                        {"ci", json::array({r.ci_lo, r.ci_hi})},
                        {"fitted", r.fitted}});
  }
  return json{{"bernoulli_mu", rec.bernoulli_mu}, {"rows", rows}};
}

json to_json(const SubspaceIncompRecord& rec) {
  return json{{"l", rec.l},
              {"m", rec.m},
              {"dim_h", rec.dim_h},
              {"directions", rec.directions},
              {"compressible_hits", rec.compressible_hits},
              {"min_dist_to_sparse", rec.min_dist_to_sparse},
              {"lcd_exceed_count", rec.lcd_exceed_count},
              {"lcd_ceiling", rec.lcd_ceiling},
              {"min_lcd_value", rec.min_lcd_value},
              {"model_resamples", rec.model_resamples}};
}

std::string record_line(const std::string& kind, const ExperimentConfig& cfg,
                        const json& payload) {
  json line{{"schema_version", kSchemaVersion},
            {"code_version", kCodeVersion},
            {"kind", kind},
            {"config_hash", config_hash(cfg)},
            {"config", canonical_config_json(cfg)},
            {"record", payload}};
  return line.dump();
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string epsilon_csv(const std::vector<EpsilonStat>& stats) {
  std::string out = "epsilon,hits,trials,estimate,ci_lo,ci_hi\n";
  for (const EpsilonStat& s : stats) {
    out += format_g17(s.epsilon);
    out += ',';
    out += std::to_string(s.hits);
    out += ',';
    out += std::to_string(s.trials);
    out += ',';
    out += format_g17(s.estimate);
    out += ',';
    out += format_g17(s.ci_lo);
    out += ',';
    out += format_g17(s.ci_hi);
    out += '\n';
  }
  return out;
}

}  // namespace sfl
