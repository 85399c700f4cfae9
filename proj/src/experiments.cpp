#include "sfl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sfl/concentration.hpp"
#include "sfl/parallel.hpp"
#include "sfl/stats.hpp"

namespace sfl {
namespace {

// Trial streams and model-level streams live under different parents so role
// indices can never collide.
rng::SeedSpec trial_seed(rng::SeedSpec master, std::int64_t t) {
  return rng::substream(rng::substream(master, 1),
                        static_cast<std::uint64_t>(t));
}

rng::SeedSpec model_seed(rng::SeedSpec master, std::uint64_t slot) {
  return rng::substream(rng::substream(master, 2), slot);
}

double quantile_of_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  double pos = q * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

void ExperimentConfig::validate_common() const {
  dims.validate();
  if (trials < 1) {
    throw std::invalid_argument("config: trials must be >= 1");
  }
  if (tau < 0.0) {
    throw std::invalid_argument("config: tau must be >= 0");
  }
  double prev = -1.0;
  for (double e : epsilon_grid) {
    if (!(e >= 0.0) || e <= prev) {
      throw std::invalid_argument(
          "config: epsilon_grid must be strictly increasing and nonnegative");
    }
    prev = e;
  }
}

std::vector<EpsilonStat> tail_stats(const std::vector<double>& values,
                                    const std::vector<double>& epsilon_grid,
                                    double unit) {
  std::vector<EpsilonStat> out;
  out.reserve(epsilon_grid.size());
  auto trials = static_cast<std::int64_t>(values.size());
  for (double eps : epsilon_grid) {
    EpsilonStat st;
    st.epsilon = eps;
    st.trials = trials;
    double thr = eps * unit;
    for (double v : values) {
      if (v <= thr) ++st.hits;
    }
    st.estimate = static_cast<double>(st.hits) / static_cast<double>(trials);
    stats::Interval ci = stats::wilson(st.hits, trials);
    st.ci_lo = ci.lo;
    st.ci_hi = ci.hi;
    out.push_back(st);
  }
  return out;
}

TailRecord tail_probability(const ExperimentConfig& cfg, int workers) {
  cfg.validate_common();
  if (cfg.epsilon_grid.empty()) {
    throw std::invalid_argument("config: epsilon_grid is required for tail");
  }
  if (cfg.truncation) cfg.truncation->validate();
  auto [t_mat, f] = build_T(cfg.dims, cfg.deformation);
  Matrix b = build_B(cfg.dims, cfg.deformation);

  struct Out {
    double smin, smax;
    std::int64_t hits;
  };
  auto res = run_trials<Out>(cfg.trials, workers, [&](std::int64_t t) {
    rng::SeedSpec ts = trial_seed(cfg.master_seed, t);
    Matrix x = sample_matrix(cfg.dims.M, cfg.dims.n, cfg.dist,
                             rng::substream(ts, 0));
    Matrix z;
    std::int64_t hits = 0;
    if (cfg.truncation) {
      ReducedModel rm = reduce(x, f, b, cfg.dist, *cfg.truncation);
      hits = rm.truncation_hit_count;
      z = reassemble(f, rm);
    } else {
      z = t_mat * x - b;
    }
    Vector s = singular_values(z);
    return Out{s(s.size() - 1), s(0), hits};
  });

  TailRecord rec;
  double n_dbl = cfg.dims.n, big_n = cfg.dims.N;
  rec.threshold_unit = (std::sqrt(big_n) - std::sqrt(n_dbl - 1.0)) *
                       std::pow(big_n, -cfg.tau);
  rec.s_min.reserve(res.size());
  rec.s_max.reserve(res.size());
  for (const Out& o : res) {
    rec.s_min.push_back(o.smin);
    rec.s_max.push_back(o.smax);
    rec.truncation_hits_total += o.hits;
  }
  rec.tail = tail_stats(rec.s_min, cfg.epsilon_grid, rec.threshold_unit);
  return rec;
}

EdgeRecord edge_convergence(const ExperimentConfig& cfg, int workers) {
  cfg.validate_common();
  const double sqrt_n_big = std::sqrt(static_cast<double>(cfg.dims.N));
  auto res = run_trials<std::pair<double, double>>(
      cfg.trials, workers, [&](std::int64_t t) {
        Matrix x = sample_matrix(cfg.dims.N, cfg.dims.n, cfg.dist,
                                 rng::substream(trial_seed(cfg.master_seed, t), 0));
        Vector s = singular_values(x);
        return std::make_pair(s(s.size() - 1) / sqrt_n_big, s(0) / sqrt_n_big);
      });

  EdgeRecord rec;
  rec.aspect = cfg.dims.aspect();
  double root = std::sqrt(rec.aspect);
  rec.predicted_smin_ratio = 1.0 - root;
  rec.predicted_smax_ratio = 1.0 + root;
  for (const auto& [lo, hi] : res) {
    rec.smin_ratio.push_back(lo);
    rec.smax_ratio.push_back(hi);
  }
  rec.mean_smin_ratio = stats::mean(rec.smin_ratio);
  rec.mean_smax_ratio = stats::mean(rec.smax_ratio);
  if (cfg.trials >= 2) {
    stats::Interval lo_ci = stats::mean_ci(rec.smin_ratio);
    stats::Interval hi_ci = stats::mean_ci(rec.smax_ratio);
    rec.smin_ci_lo = lo_ci.lo;
    rec.smin_ci_hi = lo_ci.hi;
    rec.smax_ci_lo = hi_ci.lo;
    rec.smax_ci_hi = hi_ci.hi;
  }
  return rec;
}

DistanceRecord distance_experiment(const ExperimentConfig& cfg, int workers) {
  cfg.validate_common();
  cfg.sparsity.validate();
  if (cfg.epsilon_grid.empty()) {
    throw std::invalid_argument("config: epsilon_grid is required for distance");
  }
  const Index n = cfg.dims.n, big_n = cfg.dims.N, m_cols = cfg.dims.M;
  const Index d = cfg.dims.d();
  Index m = cfg.m_override > 0 ? cfg.m_override
                               : spread_block_size(d, n, cfg.sparsity);
  if (m < 1 || m > n) {
    throw std::invalid_argument(
        "distance: spread block size degenerate; adjust (delta, rho) or "
        "set m_override");
  }
  const Index l = m + d - 1;
  if (cfg.m_override == 0 && static_cast<double>(l) > 0.25 * static_cast<double>(big_n)) {
    throw std::invalid_argument("distance: l = m + d - 1 exceeds beta * N");
  }

  auto [t_mat, f] = build_T(cfg.dims, cfg.deformation);
  (void)t_mat;
  Matrix b = build_B(cfg.dims, cfg.deformation);
  Matrix p = projection_P(f);
  Matrix a0 = f.d.cwiseInverse().asDiagonal() * (f.u.transpose() * b);

  struct Out {
    double d0, dr, w_ratio;
    std::int64_t resamples;
  };
  auto res = run_trials<Out>(cfg.trials, workers, [&](std::int64_t t) {
    rng::SeedSpec ts = trial_seed(cfg.master_seed, t);
    Out out{0.0, 0.0, 0.0, 0};
    for (std::uint64_t attempt = 0;; ++attempt) {
      if (attempt >= 50) {
        throw NumericalError("distance: persistent rank deficiency in H");
      }
      Matrix y = sample_matrix(m_cols, n, cfg.dist,
                               rng::substream(ts, 4 * attempt));
      rng::Philox jgen(rng::substream(ts, 4 * attempt + 1), 0);
      std::vector<Index> j = sample_subset(n, m, jgen);
      std::vector<bool> in_j(static_cast<std::size_t>(n), false);
      for (Index k : j) in_j[static_cast<std::size_t>(k)] = true;

      Matrix z = p * y - a0;
      Matrix outside(big_n, n - m);
      Index col = 0;
      for (Index k = 0; k < n; ++k) {
        if (!in_j[static_cast<std::size_t>(k)]) outside.col(col++) = z.col(k);
      }
      Subspace h = Subspace::span_of(outside);
      if (h.dim() != n - m) {
        ++out.resamples;
        continue;
      }
      Vector x = sample_vector(m_cols, cfg.dist,
                               rng::substream(ts, 4 * attempt + 2));
      Vector v = sample_gaussian_vector(big_n,
                                        rng::substream(ts, 4 * attempt + 3));
      Vector px = p * x;
      out.d0 = dist_to_subspace(px, h);
      out.dr = dist_to_subspace(px - v, h);

      Matrix yj(m_cols, m);
      for (Index k = 0; k < m; ++k) yj.col(k) = y.col(j[static_cast<std::size_t>(k)]);
      Matrix c = orthonormal_complement(h).basis();  // N x l
      Matrix w = c.transpose() * (p * yj);
      out.w_ratio = operator_norm(w) / std::sqrt(static_cast<double>(d));
      return out;
    }
  });

  DistanceRecord rec;
  rec.m = m;
  rec.d = d;
  rec.l = l;
  for (const Out& o : res) {
    rec.dist_v0.push_back(o.d0);
    rec.dist_vr.push_back(o.dr);
    rec.w_ratio.push_back(o.w_ratio);
    rec.resample_count += o.resamples;
  }
  double unit = std::sqrt(static_cast<double>(l));
  rec.tail_v0 = tail_stats(rec.dist_v0, cfg.epsilon_grid, unit);
  rec.tail_vr = tail_stats(rec.dist_vr, cfg.epsilon_grid, unit);
  return rec;
}

DecouplingRecord decoupling_check(const ExperimentConfig& cfg, int workers) {
  cfg.validate_common();
  cfg.sparsity.validate();
  const Index m = cfg.dims.n, big_n = cfg.dims.N;
  if (m > 6 || big_n > 40) {
    throw std::invalid_argument(
        "decoupling: desk-scale instance required (m <= 6, N <= 40)");
  }

  DimensionConfig square;
  square.n = square.N = square.M = static_cast<int>(big_n);
  square.lambda_cap = cfg.dims.lambda_cap;
  square.k0 = cfg.dims.k0;
  DeformationSpec aspec = cfg.deformation;
  aspec.b_kind = ShiftKind::Zero;
  aspec.b_norm_target = 0.0;
  Matrix a_mat = build_T(square, aspec).first;

  SpreadWindow window = SpreadWindow::make(m, cfg.sparsity);
  rng::Philox zgen(model_seed(cfg.master_seed, 0), 0);
  Vector z(m);
  for (Index k = 0; k < m; ++k) {
    z(k) = (zgen.next_unit() < 0.5 ? 1.0 : -1.0) /
           std::sqrt(static_cast<double>(m));
  }
  Vector v = sample_gaussian_vector(big_n, model_seed(cfg.master_seed, 1));
  Vector av = a_mat * v;

  std::vector<Matrix> xs(static_cast<std::size_t>(cfg.trials));
  auto samples = run_trials<std::pair<double, double>>(
      cfg.trials, workers, [&](std::int64_t t) {
        Matrix x = sample_matrix(big_n, m, cfg.dist,
                                 rng::substream(trial_seed(cfg.master_seed, t), 0));
        double s1 = (a_mat * (x * z) - av).norm();
        double s2 = operator_norm(a_mat * x);
        xs[static_cast<std::size_t>(t)] = std::move(x);
        return std::make_pair(s1, s2);
      });

  std::vector<double> s1_sorted, s2_sorted;
  for (const auto& [s1, s2] : samples) {
    s1_sorted.push_back(s1);
    s2_sorted.push_back(s2);
  }
  std::sort(s1_sorted.begin(), s1_sorted.end());
  std::sort(s2_sorted.begin(), s2_sorted.end());

  DecouplingRecord rec;
  rec.m = m;
  rec.n_dim = big_n;
  rec.k1 = window.k1;
  rec.a_grid = {quantile_of_sorted(s1_sorted, 0.05),
                quantile_of_sorted(s1_sorted, 0.2),
                quantile_of_sorted(s1_sorted, 0.5)};
  rec.b_grid = {quantile_of_sorted(s2_sorted, 0.25),
                quantile_of_sorted(s2_sorted, 0.5),
                quantile_of_sorted(s2_sorted, 0.75)};

  // candidate directions for the sup over (y, u)
  std::vector<Vector> cands;
  cands.push_back(z / z.norm());
  for (Index k = 0; k < m; ++k) {
    Vector e = Vector::Zero(m);
    e(k) = 1.0;
    cands.push_back(e);
  }
  for (std::uint64_t i = 0; i < 8; ++i) {
    cands.push_back(sample_unit_sphere(m, model_seed(cfg.master_seed, 2 + i)));
  }
  std::vector<std::vector<Vector>> images(cands.size());
  for (std::size_t c = 0; c < cands.size(); ++c) {
    images[c].reserve(static_cast<std::size_t>(cfg.trials));
    for (const Matrix& x : xs) {
      images[c].push_back(a_mat * (x * cands[c]));
    }
  }

  std::int64_t satisfied = 0;
  for (double a : rec.a_grid) {
    for (double b : rec.b_grid) {
      DecouplingRow row;
      row.a = a;
      row.b = b;
      for (const auto& [s1, s2] : samples) {
        if (s1 < a && s2 > b) ++row.lhs_hits;
      }
      row.lhs = static_cast<double>(row.lhs_hits) /
                static_cast<double>(cfg.trials);
      stats::Interval lhs_ci = stats::wilson(row.lhs_hits, cfg.trials);
      row.lhs_lo = lhs_ci.lo;
      row.lhs_hi = lhs_ci.hi;

      double radius = std::sqrt(2.0) * a / window.k1;
      double sup_est = 0.0, sup_hi = 0.0;
      for (const auto& img : images) {
        ConcentrationEstimate ce = levy_concentration(img, radius, 2048);
        if (ce.estimate > sup_est) {
          sup_est = ce.estimate;
          sup_hi = ce.ci_hi;
        }
      }
      row.sup_factor = sup_est;

      double b_cut = b / std::sqrt(2.0);
      std::int64_t tail_hits = 0;
      for (const auto& [s1, s2] : samples) {
        (void)s1;
        if (s2 > b_cut) ++tail_hits;
      }
      row.tail_factor = static_cast<double>(tail_hits) /
                        static_cast<double>(cfg.trials);
      stats::Interval tail_ci = stats::wilson(tail_hits, cfg.trials);
      row.rhs = std::min(1.0, 2.0 * row.sup_factor * row.tail_factor);
      double rhs_hi = std::min(1.0, 2.0 * sup_hi * tail_ci.hi);
      row.holds = row.lhs_lo <= rhs_hi;
      if (row.holds) ++satisfied;
      rec.rows.push_back(row);
    }
  }
  rec.satisfied_fraction = static_cast<double>(satisfied) /
                           static_cast<double>(rec.rows.size());
  return rec;
}

TensorizationRecord tensorization_check(const ExperimentConfig& cfg,
                                        int workers) {
  if (cfg.trials < 1) {
    throw std::invalid_argument("config: trials must be >= 1");
  }
  TensorizationRecord rec;
  rec.bernoulli_mu = 0.3;
  const std::vector<int> n_grid = {1, 4, 16};
  const std::vector<double> eps_grid = {0.25, 0.5, 1.0};
  const std::vector<double> lambda1_grid = {0.25, 0.5, 0.75};

  struct Family {
    const char* name;
    double b_const;  // density-level bound L(zeta, eps) <= B eps; 0 = part 2
  };
  const Family families[] = {
      {"abs_gaussian", std::sqrt(2.0 / M_PI)},
      {"abs_uniform", 1.0 / std::sqrt(3.0)},
      {"bernoulli", 0.0},
  };

  for (std::size_t fi = 0; fi < 3; ++fi) {
    const Family& fam = families[fi];
    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
      int n = n_grid[ni];
      rng::SeedSpec seed = model_seed(cfg.master_seed, 100 * fi + ni);
      auto sums = run_trials<double>(cfg.trials, workers, [&](std::int64_t t) {
        rng::Philox gen(rng::substream(seed, static_cast<std::uint64_t>(t)), 0);
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
          double zeta;
          if (fi == 0) {
            zeta = std::abs(gen.next_gaussian());
          } else if (fi == 1) {
            zeta = std::abs(2.0 * gen.next_unit() - 1.0) * std::sqrt(3.0);
          } else {
            zeta = gen.next_unit() < rec.bernoulli_mu ? 0.0 : 1.0;
          }
          s += zeta * zeta;
        }
        return s;
      });

      const std::vector<double>& params =
          fam.b_const > 0.0 ? eps_grid : lambda1_grid;
      for (double param : params) {
        TensorizationRow row;
        row.family = fam.name;
        row.n = n;
        row.param = param;
        double cut = fam.b_const > 0.0
                         ? param * param * static_cast<double>(n)
                         : param * static_cast<double>(n);
        for (double s : sums) {
          if (s < cut) ++row.hits;
        }
        row.estimate = static_cast<double>(row.hits) /
                       static_cast<double>(cfg.trials);
        stats::Interval ci = stats::wilson(row.hits, cfg.trials);
        row.ci_lo = ci.lo;
        row.ci_hi = ci.hi;
        double root = row.estimate > 0.0
                          ? std::pow(row.estimate, 1.0 / static_cast<double>(n))
                          : 0.0;
        row.fitted = fam.b_const > 0.0 ? root / (fam.b_const * param) : root;
        rec.rows.push_back(std::move(row));
      }
    }
  }
  return rec;
}

SubspaceIncompRecord random_subspace_incompressibility(
    const ExperimentConfig& cfg, int workers) {
  cfg.validate_common();
  cfg.sparsity.validate();
  cfg.lcd.validate();
  const Index n = cfg.dims.n, big_n = cfg.dims.N, m_cols = cfg.dims.M;
  const Index l = cfg.codim_l;
  if (l < 1) {
    throw std::invalid_argument("subspace-incomp: codim_l must be >= 1");
  }
  if (static_cast<double>(l) > 0.25 * static_cast<double>(big_n)) {
    throw std::invalid_argument("subspace-incomp: l exceeds beta * N");
  }
  const Index m = l - cfg.dims.d() + 1;
  if (m < 1 || m > n) {
    throw std::invalid_argument(
        "subspace-incomp: implied block size m = l - d + 1 out of range");
  }

  auto [t_mat, f] = build_T(cfg.dims, cfg.deformation);
  (void)t_mat;
  Matrix b = build_B(cfg.dims, cfg.deformation);
  Matrix p = projection_P(f);
  Matrix a0 = f.d.cwiseInverse().asDiagonal() * (f.u.transpose() * b);

  SubspaceIncompRecord rec;
  rec.l = l;
  rec.m = m;
  rec.directions = cfg.trials;
  rec.lcd_ceiling = cfg.lcd.ceiling(m_cols);

  Subspace h = Subspace::zero(big_n);
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt >= 50) {
      throw NumericalError("subspace-incomp: persistent rank deficiency in H");
    }
    Matrix y = sample_matrix(m_cols, n, cfg.dist,
                             model_seed(cfg.master_seed, 10 + attempt));
    rng::Philox jgen(model_seed(cfg.master_seed, 60 + attempt), 0);
    std::vector<Index> j = sample_subset(n, m, jgen);
    std::vector<bool> in_j(static_cast<std::size_t>(n), false);
    for (Index k : j) in_j[static_cast<std::size_t>(k)] = true;
    Matrix z = p * y - a0;
    Matrix outside(big_n, n - m);
    Index col = 0;
    for (Index k = 0; k < n; ++k) {
      if (!in_j[static_cast<std::size_t>(k)]) outside.col(col++) = z.col(k);
    }
    h = Subspace::span_of(outside);
    if (h.dim() == n - m) break;
    ++rec.model_resamples;
  }
  rec.dim_h = h.dim();

  Matrix c = orthonormal_complement(h).basis();  // N x l
  Matrix e_basis = p.transpose() * c;            // M x l, orthonormal
  Matrix gram = e_basis.transpose() * e_basis;
  gram.diagonal().array() -= 1.0;
  if (gram.cwiseAbs().maxCoeff() > 1e-8) {
    throw NumericalError("subspace-incomp: E basis lost orthonormality");
  }

  struct Out {
    double dist;
    bool compressible;
    bool exceeds;
    double lcd_value;
  };
  auto res = run_trials<Out>(cfg.trials, workers, [&](std::int64_t t) {
    Vector dir = e_basis * sample_unit_sphere(l, trial_seed(cfg.master_seed, t));
    Out out;
    out.dist = dist_to_sparse(dir, cfg.sparsity);
    out.compressible = out.dist <= cfg.sparsity.rho;
    LcdResult r = lcd_vector(dir, cfg.lcd);
    out.exceeds = r.exceeds_ceiling;
    out.lcd_value = r.exceeds_ceiling ? 0.0 : r.value;
    return out;
  });

  rec.min_dist_to_sparse = std::numeric_limits<double>::infinity();
  double min_lcd = std::numeric_limits<double>::infinity();
  for (const Out& o : res) {
    rec.min_dist_to_sparse = std::min(rec.min_dist_to_sparse, o.dist);
    if (o.compressible) ++rec.compressible_hits;
    if (o.exceeds) {
      ++rec.lcd_exceed_count;
    } else {
      min_lcd = std::min(min_lcd, o.lcd_value);
    }
  }
  rec.min_lcd_value = std::isinf(min_lcd) ? 0.0 : min_lcd;
  return rec;
}

}  // namespace sfl
