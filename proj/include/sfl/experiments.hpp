#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfl/deformations.hpp"
#include "sfl/ensembles.hpp"
#include "sfl/geometry.hpp"
#include "sfl/lcd.hpp"
#include "sfl/reduction.hpp"
#include "sfl/rng.hpp"

namespace sfl {

struct ExperimentConfig {
  DimensionConfig dims;
  EntryDistribution dist;
  DeformationSpec deformation;
  std::optional<TruncationParams> truncation;
  SparsityParams sparsity;
  LcdParams lcd;
  std::vector<double> epsilon_grid;
  std::int64_t trials = 0;
  rng::SeedSpec master_seed;
  // Extra N^-tau factor on the tail threshold unit; 0 disables it.
  double tau = 0.0;
  // Codimension of the random subspace experiment (set explicitly; the
  // spread-block derivation does not apply there).
  int codim_l = 0;
  // Overrides the derived block size m in the distance experiment;
  // bypasses the l <= beta N regime gate for degenerate probes.
  int m_override = 0;

  void validate_common() const;
};

struct EpsilonStat {
  double epsilon = 0.0;
  std::int64_t hits = 0;
  std::int64_t trials = 0;
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

std::vector<EpsilonStat> tail_stats(const std::vector<double>& values,
                                    const std::vector<double>& epsilon_grid,
                                    double unit);

struct TailRecord {
  double threshold_unit = 0.0;  // (sqrt N - sqrt(n-1)) * N^-tau
  std::vector<double> s_min;    // per trial, trial order
  std::vector<double> s_max;
  std::int64_t truncation_hits_total = 0;
  std::vector<EpsilonStat> tail;
};

TailRecord tail_probability(const ExperimentConfig& cfg, int workers);

struct EdgeRecord {
  double aspect = 0.0;
  double predicted_smin_ratio = 0.0;
  double predicted_smax_ratio = 0.0;
  double mean_smin_ratio = 0.0;
  double smin_ci_lo = 0.0, smin_ci_hi = 0.0;
  double mean_smax_ratio = 0.0;
  double smax_ci_lo = 0.0, smax_ci_hi = 0.0;
  std::vector<double> smin_ratio;
  std::vector<double> smax_ratio;
};

EdgeRecord edge_convergence(const ExperimentConfig& cfg, int workers);

struct DistanceRecord {
  std::int64_t m = 0, d = 0, l = 0;
  std::int64_t resample_count = 0;
  std::vector<double> dist_v0;  // dist(PX, H), per trial
  std::vector<double> dist_vr;  // dist(PX - v, H), gaussian v
  std::vector<double> w_ratio;  // |W| / sqrt(d)
  std::vector<EpsilonStat> tail_v0;  // thresholds eps * sqrt(l)
  std::vector<EpsilonStat> tail_vr;
};

DistanceRecord distance_experiment(const ExperimentConfig& cfg, int workers);

struct DecouplingRow {
  double a = 0.0, b = 0.0;
  std::int64_t lhs_hits = 0;
  double lhs = 0.0, lhs_lo = 0.0, lhs_hi = 0.0;
  double sup_factor = 0.0;   // sup_y L(A X y, sqrt2 a / k1)
  double tail_factor = 0.0;  // P(|A X| > b / sqrt2)
  double rhs = 0.0;          // 2 * sup_factor * tail_factor
  bool holds = false;        // lhs CI consistent with lhs <= rhs
};

struct DecouplingRecord {
  std::int64_t m = 0, n_dim = 0;
  double k1 = 0.0;
  std::vector<double> a_grid, b_grid;
  std::vector<DecouplingRow> rows;
  double satisfied_fraction = 0.0;
};

DecouplingRecord decoupling_check(const ExperimentConfig& cfg, int workers);

struct TensorizationRow {
  std::string family;  // "abs_gaussian", "abs_uniform", "bernoulli"
  int n = 0;
  double param = 0.0;  // epsilon for part 1, lambda_1 for part 2
  std::int64_t hits = 0;
  double estimate = 0.0, ci_lo = 0.0, ci_hi = 0.0;
  // part 1: C with estimate = (C B eps)^n; part 2: estimate^(1/n)
  double fitted = 0.0;
};

struct TensorizationRecord {
  double bernoulli_mu = 0.0;
  std::vector<TensorizationRow> rows;
};

TensorizationRecord tensorization_check(const ExperimentConfig& cfg,
                                        int workers);

struct SubspaceIncompRecord {
  std::int64_t l = 0, m = 0, dim_h = 0;
  std::int64_t directions = 0;
  std::int64_t compressible_hits = 0;
  double min_dist_to_sparse = 0.0;
  std::int64_t lcd_exceed_count = 0;
  double lcd_ceiling = 0.0;
  // smallest finite LCD value seen; 0 when every direction exceeded
  double min_lcd_value = 0.0;
  std::int64_t model_resamples = 0;
};

SubspaceIncompRecord random_subspace_incompressibility(
    const ExperimentConfig& cfg, int workers);

}  // namespace sfl
