// Command-line front end: runs experiments from JSON configs, answers
// single LCD/net queries, and aggregates record directories into reports.
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sfl/concentration.hpp"
#include "sfl/config.hpp"
#include "sfl/error.hpp"
#include "sfl/experiments.hpp"
#include "sfl/geometry.hpp"
#include "sfl/lcd.hpp"
#include "sfl/parallel.hpp"
#include "sfl/record.hpp"
#include "sfl/reduction.hpp"
#include "sfl/stats.hpp"
#include "sfl/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  int workers = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  bool seed_set = false;
  bool stream_set = false;
};

void add_common(CLI::App* sub, CommonOpts& o, bool needs_config = true) {
  auto* c = sub->add_option("--config", o.config_path, "JSON experiment config");
  if (needs_config) c->required();
  sub->add_option("--out", o.out_dir,
                  "Output directory (default $SFL_OUT_DIR or ./out)");
  sub->add_option("--workers", o.workers, "Worker threads; 0 = auto");
  sub->add_option("--seed", o.seed, "Override master seed from the config")
      ->each([&o](const std::string&) { o.seed_set = true; });
  sub->add_option("--stream", o.stream, "Override seed stream id")
      ->each([&o](const std::string&) { o.stream_set = true; });
}

std::string resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("SFL_OUT_DIR"); env && *env) return env;
  return "out";
}

sfl::ExperimentConfig load_config(const CommonOpts& o) {
  sfl::ExperimentConfig cfg = sfl::parse_config(sfl::load_json_file(o.config_path));
  if (o.seed_set) cfg.master_seed.master_seed = o.seed;
  if (o.stream_set) cfg.master_seed.stream_id = o.stream;
  return cfg;
}

std::string iso_utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sfl::ConfigError("cannot write " + path.string());
  out << content;
}

// Timestamps and timing live here, never in the JSONL record (record lines
// must be byte-identical across reruns of the same config).
json manifest_json(const std::string& kind, const CommonOpts& o,
                   const std::string& hash, const std::string& out_dir,
                   double elapsed_seconds, int workers) {
  return json{{"schema_version", sfl::kSchemaVersion},
              {"code_version", sfl::kCodeVersion},
              {"kind", kind},
              {"config_path", o.config_path},
              {"config_hash", hash},
              {"output_dir", out_dir},
              {"created_utc", iso_utc_now()},
              {"elapsed_seconds", elapsed_seconds},
              {"workers", workers}};
}

int emit(const std::string& kind, const sfl::ExperimentConfig& cfg,
         const json& payload, const std::string& csv, const CommonOpts& o,
         double elapsed_seconds, int workers) {
  std::string out_dir = resolve_out_dir(o.out_dir);
  fs::create_directories(out_dir);
  std::string hash = sfl::config_hash(cfg);
  std::string base = kind + "-" + hash;
  fs::path record_path = fs::path(out_dir) / (base + ".jsonl");
  fs::path csv_path = fs::path(out_dir) / (base + ".csv");
  fs::path manifest_path = fs::path(out_dir) / (base + ".manifest.json");

  write_text(record_path, sfl::record_line(kind, cfg, payload) + "\n");
  if (!csv.empty()) write_text(csv_path, csv);
  write_text(manifest_path,
             manifest_json(kind, o, hash, out_dir, elapsed_seconds, workers)
                     .dump(2) +
                 "\n");

  json status{{"kind", kind},
              {"config_hash", hash},
              {"record", record_path.string()},
              {"manifest", manifest_path.string()}};
  if (!csv.empty()) status["csv"] = csv_path.string();
  std::cout << status.dump() << "\n";
  return 0;
}

std::string kv_csv(const std::vector<std::pair<std::string, double>>& rows) {
  std::string out = "quantity,value\n";
  for (const auto& [k, v] : rows) out += k + "," + sfl::format_g17(v) + "\n";
  return out;
}

json lcd_result_json(const sfl::LcdResult& r) {
  json wp = json::array();
  for (sfl::Index i = 0; i < r.witness_point.size(); ++i)
    wp.push_back(r.witness_point(i));
  return json{{"exceeds_ceiling", r.exceeds_ceiling},
              {"value", r.value},
              {"witness_theta", r.witness_theta},
              {"witness_point", wp},
              {"witness_lattice", r.witness_lattice},
              {"certified", r.certified},
              {"mc_samples", r.mc_samples},
              {"mc_exceed_count", r.mc_exceed_count}};
}

// Whitespace-, comma-, or semicolon-separated numbers; one matrix row per line.
std::vector<std::vector<double>> parse_numeric_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sfl::ConfigError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    for (char& c : line)
      if (c == ',' || c == ';') c = ' ';
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) throw sfl::ConfigError(path + ": non-numeric token");
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw sfl::ConfigError(path + ": no numeric data");
  return rows;
}

// ---- experiment subcommands ----

int run_tail(const CommonOpts& o) {
  sfl::ExperimentConfig cfg = load_config(o);
  int workers = o.workers > 0 ? o.workers : sfl::resolve_workers(0);
  auto t0 = std::chrono::steady_clock::now();
  sfl::TailRecord rec = sfl::tail_probability(cfg, workers);
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return emit("tail", cfg, sfl::to_json(rec), sfl::epsilon_csv(rec.tail), o, dt,
              workers);
}

int run_edges(const CommonOpts& o) {
  sfl::ExperimentConfig cfg = load_config(o);
  int workers = o.workers > 0 ? o.workers : sfl::resolve_workers(0);
  auto t0 = std::chrono::steady_clock::now();
  sfl::EdgeRecord rec = sfl::edge_convergence(cfg, workers);
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string csv = kv_csv({{"aspect", rec.aspect},
                            {"predicted_smin_ratio", rec.predicted_smin_ratio},
                            {"mean_smin_ratio", rec.mean_smin_ratio},
                            {"smin_ci_lo", rec.smin_ci_lo},
                            {"smin_ci_hi", rec.smin_ci_hi},
                            {"predicted_smax_ratio", rec.predicted_smax_ratio},
                            {"mean_smax_ratio", rec.mean_smax_ratio},
                            {"smax_ci_lo", rec.smax_ci_lo},
                            {"smax_ci_hi", rec.smax_ci_hi}});
  return emit("edges", cfg, sfl::to_json(rec), csv, o, dt, workers);
}

std::string series_csv(
    const std::vector<std::pair<std::string, const std::vector<sfl::EpsilonStat>*>>&
        blocks) {
  std::string out = "series,epsilon,hits,trials,estimate,ci_lo,ci_hi\n";
  for (const auto& [name, stats] : blocks) {
    for (const sfl::EpsilonStat& s : *stats) {
      out += name + "," + sfl::format_g17(s.epsilon) + "," +
             std::to_string(s.hits) + "," + std::to_string(s.trials) + "," +
             sfl::format_g17(s.estimate) + "," + sfl::format_g17(s.ci_lo) +
             "," + sfl::format_g17(s.ci_hi) + "\n";
    }
  }
  return out;
}

int run_distance(const CommonOpts& o) {
  sfl::ExperimentConfig cfg = load_config(o);
  int workers = o.workers > 0 ? o.workers : sfl::resolve_workers(0);
  auto t0 = std::chrono::steady_clock::now();
  sfl::DistanceRecord rec = sfl::distance_experiment(cfg, workers);
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string csv = series_csv({{"v0", &rec.tail_v0}, {"vr", &rec.tail_vr}});
  return emit("distance", cfg, sfl::to_json(rec), csv, o, dt, workers);
}

int run_decoupling(const CommonOpts& o) {
  sfl::ExperimentConfig cfg = load_config(o);
  int workers = o.workers > 0 ? o.workers : sfl::resolve_workers(0);
  auto t0 = std::chrono::steady_clock::now();
  sfl::DecouplingRecord rec = sfl::decoupling_check(cfg, workers);
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string csv =
      "a,b,lhs_hits,lhs,lhs_lo,lhs_hi,sup_factor,tail_factor,rhs,holds\n";
  for (const sfl::DecouplingRow& r : rec.rows) {
    csv += sfl::format_g17(r.a) + "," + sfl::format_g17(r.b) + "," +
           std::to_string(r.lhs_hits) + "," + sfl::format_g17(r.lhs) + "," +
           sfl::format_g17(r.lhs_lo) + "," + sfl::format_g17(r.lhs_hi) + "," +
           sfl::format_g17(r.sup_factor) + "," + sfl::format_g17(r.tail_factor) +
           "," + sfl::format_g17(r.rhs) + "," + (r.holds ? "1" : "0") + "\n";
  }
  return emit("decoupling", cfg, sfl::to_json(rec), csv, o, dt, workers);
}

int run_tensorize(const CommonOpts& o) {
  sfl::ExperimentConfig cfg = load_config(o);
  int workers = o.workers > 0 ? o.workers : sfl::resolve_workers(0);
  auto t0 = std::chrono::steady_clock::now();
  sfl::TensorizationRecord rec = sfl::tensorization_check(cfg, workers);
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string csv = "family,n,param,hits,estimate,ci_lo,ci_hi,fitted\n";
  for (const sfl::TensorizationRow& r : rec.rows) {
    csv += r.family + "," + std::to_string(r.n) + "," + sfl::format_g17(r.param) +
           "," + std::to_string(r.hits) + "," + sfl::format_g17(r.estimate) +
           "," + sfl::format_g17(r.ci_lo) + "," + sfl::format_g17(r.ci_hi) +
           "," + sfl::format_g17(r.fitted) + "\n";
  }
  return emit("tensorize", cfg, sfl::to_json(rec), csv, o, dt, workers);
}

int run_subspace_incomp(const CommonOpts& o) {
  sfl::ExperimentConfig cfg = load_config(o);
  int workers = o.workers > 0 ? o.workers : sfl::resolve_workers(0);
  auto t0 = std::chrono::steady_clock::now();
  sfl::SubspaceIncompRecord rec =
      sfl::random_subspace_incompressibility(cfg, workers);
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string csv =
      kv_csv({{"l", double(rec.l)},
              {"m", double(rec.m)},
              {"dim_h", double(rec.dim_h)},
              {"directions", double(rec.directions)},
              {"compressible_hits", double(rec.compressible_hits)},
              {"min_dist_to_sparse", rec.min_dist_to_sparse},
              {"lcd_exceed_count", double(rec.lcd_exceed_count)},
              {"lcd_ceiling", rec.lcd_ceiling},
              {"min_lcd_value", rec.min_lcd_value},
              {"model_resamples", double(rec.model_resamples)}});
  return emit("subspace-incomp", cfg, sfl::to_json(rec), csv, o, dt, workers);
}

int run_reduce_verify(const CommonOpts& o) {
  sfl::ExperimentConfig cfg = load_config(o);
  if (!cfg.truncation)
    throw sfl::ConfigError("/truncation: section required for reduce-verify");
  auto t0 = std::chrono::steady_clock::now();
  auto [t_mat, f] = sfl::build_T(cfg.dims, cfg.deformation);
  sfl::Matrix b = sfl::build_B(cfg.dims, cfg.deformation);
  sfl::rng::SeedSpec xs = sfl::rng::substream(cfg.master_seed, 7);
  sfl::Matrix x = sfl::sample_matrix(cfg.dims.M, cfg.dims.n, cfg.dist, xs);
  sfl::ReducedModel rm = sfl::reduce(x, f, b, cfg.dist, *cfg.truncation);

  // Rebuild the truncated matrix from the centered model and compare both
  // routes to T*Xt - B.
  sfl::TruncatedMoments tm =
      sfl::truncated_moments(cfg.dist, cfg.truncation->level(cfg.dims.N));
  sfl::Matrix xt = rm.y * rm.d1.asDiagonal();
  xt.array() += tm.mean;
  sfl::Matrix direct = t_mat * xt - b;
  sfl::Matrix reassembled = sfl::reassemble(f, rm);
  double direct_norm = direct.norm();
  double residual_rel =
      (direct - reassembled).norm() / std::max(direct_norm, 1e-300);
  double smin_direct = sfl::smallest_singular_value(direct);
  double smin_reduced = sfl::smallest_singular_value(reassembled);
  double smin_rel_diff = std::abs(smin_direct - smin_reduced) /
                         std::max(std::abs(smin_direct), 1e-300);
  sfl::ReducedContractReport report = sfl::verify_reduced_contract(rm);
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json payload{{"residual_rel", residual_rel},
               {"s_min_direct", smin_direct},
               {"s_min_reduced", smin_reduced},
               {"s_min_rel_diff", smin_rel_diff},
               {"truncation_hits", report.truncation_hit_count},
               {"omega_event_held", report.omega_event_held},
               {"y_bound", report.y_bound},
               {"max_abs_y", report.max_abs_y},
               {"y_bound_ok", report.y_bound_ok},
               {"variances_ok", report.variances_ok},
               {"violations", report.violations}};
  std::string csv = kv_csv({{"residual_rel", residual_rel},
                            {"s_min_direct", smin_direct},
                            {"s_min_reduced", smin_reduced},
                            {"s_min_rel_diff", smin_rel_diff},
                            {"truncation_hits", double(report.truncation_hit_count)},
                            {"max_abs_y", report.max_abs_y}});
  int rc = emit("reduce-verify", cfg, payload, csv, o, dt, 1);
  if (rc != 0) return rc;
  if (residual_rel > 1e-8 || smin_rel_diff > 1e-8) {
    std::cerr << "numerical failure: reconstruction residual " << residual_rel
              << ", s_min relative difference " << smin_rel_diff << "\n";
    return 3;
  }
  return 0;
}

// ---- single-query subcommands ----

struct LcdOpts {
  std::string vector_path;
  std::string basis_path;
  std::string out_dir;
  double alpha = 1.0;
  double gamma = 0.1;
  double theta_max = 0.0;
  double tolerance = 1e-6;
  std::string mode = "certified";
  std::int64_t samples = 200;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

int run_lcd(const LcdOpts& o) {
  if (o.vector_path.empty() == o.basis_path.empty())
    throw sfl::ConfigError("exactly one of --vector or --basis is required");
  sfl::LcdParams params;
  params.alpha = o.alpha;
  params.gamma = o.gamma;
  params.theta_max = o.theta_max;
  params.grid_tolerance = o.tolerance;
  params.validate();

  json out;
  out["params"] = json{{"alpha", params.alpha},
                       {"gamma", params.gamma},
                       {"theta_max", params.theta_max},
                       {"grid_tolerance", params.grid_tolerance}};
  if (!o.vector_path.empty()) {
    auto rows = parse_numeric_rows(o.vector_path);
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    sfl::Vector a(static_cast<sfl::Index>(flat.size()));
    for (std::size_t i = 0; i < flat.size(); ++i)
      a(static_cast<sfl::Index>(i)) = flat[i];
    out["input"] = "vector";
    out["dim"] = flat.size();
    out["result"] = lcd_result_json(sfl::lcd_vector(a, params));
  } else {
    auto rows = parse_numeric_rows(o.basis_path);
    std::size_t cols = rows[0].size();
    for (const auto& r : rows)
      if (r.size() != cols)
        throw sfl::ConfigError(o.basis_path + ": ragged matrix rows");
    sfl::Matrix basis(static_cast<sfl::Index>(rows.size()),
                      static_cast<sfl::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols; ++j)
        basis(static_cast<sfl::Index>(i), static_cast<sfl::Index>(j)) = rows[i][j];
    sfl::Subspace e(basis.rows(), basis);
    out["input"] = "subspace";
    out["ambient"] = basis.rows();
    out["dim"] = basis.cols();
    sfl::rng::SeedSpec seed{o.seed, o.stream};
    if (o.mode == "certified") {
      out["result"] =
          lcd_result_json(sfl::lcd_subspace(e, params, sfl::LcdMode::Certified));
    } else if (o.mode == "montecarlo") {
      out["result"] = lcd_result_json(sfl::lcd_subspace(
          e, params, sfl::LcdMode::MonteCarlo, o.samples, seed));
    } else if (o.mode == "both") {
      out["certified"] =
          lcd_result_json(sfl::lcd_subspace(e, params, sfl::LcdMode::Certified));
      out["montecarlo"] = lcd_result_json(sfl::lcd_subspace(
          e, params, sfl::LcdMode::MonteCarlo, o.samples, seed));
    } else {
      throw sfl::ConfigError("--mode must be certified, montecarlo, or both");
    }
  }
  std::string line = out.dump();
  std::cout << line << "\n";
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    write_text(fs::path(o.out_dir) / "lcd-result.json", line + "\n");
  }
  return 0;
}

struct NetOpts {
  int n = 2;
  double epsilon = 0.5;
  std::string mode = "greedy";
  std::string out_dir;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::int64_t probes = 100000;
};

int run_net(const NetOpts& o) {
  sfl::NetMode mode;
  if (o.mode == "greedy") {
    mode = sfl::NetMode::GreedyRandom;
  } else if (o.mode == "lattice") {
    mode = sfl::NetMode::Lattice;
  } else {
    throw sfl::ConfigError("--mode must be greedy or lattice");
  }
  sfl::EpsilonNet net =
      sfl::build_net(o.n, o.epsilon, mode, {o.seed, o.stream}, o.probes);
  json out{{"n", o.n},
           {"epsilon", net.epsilon},
           {"mode", o.mode},
           {"points", net.points.size()},
           {"cardinality_bound", net.cardinality_bound},
           {"covering_probes", net.covering_probes},
           {"covering_repairs", net.covering_repairs}};
  std::cout << out.dump() << "\n";
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    std::string csv;
    for (const sfl::Vector& p : net.points) {
      for (sfl::Index i = 0; i < p.size(); ++i) {
        if (i) csv += ",";
        csv += sfl::format_g17(p(i));
      }
      csv += "\n";
    }
    write_text(fs::path(o.out_dir) / "net-points.csv", csv);
  }
  return 0;
}

// ---- report ----

struct RecordEntry {
  std::string kind;
  std::string pool_hash;
  sfl::ExperimentConfig cfg;
  json record;
  std::string source;
};

void pool_curve(const std::string& label, const std::string& out_name,
                const std::vector<const json*>& curves, const fs::path& out_dir,
                std::ostream& text, double expected_slope) {
  if (curves.empty() || curves[0]->empty()) return;
  std::size_t rows = curves[0]->size();
  std::vector<sfl::EpsilonStat> pooled(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    pooled[i].epsilon = (*curves[0])[i]["epsilon"].get<double>();
    for (const json* c : curves) {
      const json& row = (*c)[i];
      if (std::abs(row["epsilon"].get<double>() - pooled[i].epsilon) >
          1e-12 * std::max(1.0, pooled[i].epsilon))
        throw sfl::ConfigError("pooled records disagree on the epsilon grid");
      pooled[i].hits += row["hits"].get<std::int64_t>();
      pooled[i].trials += row["trials"].get<std::int64_t>();
    }
    pooled[i].estimate =
        pooled[i].trials > 0
            ? double(pooled[i].hits) / double(pooled[i].trials)
            : 0.0;
    sfl::stats::Interval ci = sfl::stats::wilson(pooled[i].hits, pooled[i].trials);
    pooled[i].ci_lo = ci.lo;
    pooled[i].ci_hi = ci.hi;
  }
  write_text(out_dir / out_name, sfl::epsilon_csv(pooled));
  std::vector<double> xs, ys;
  for (const sfl::EpsilonStat& s : pooled) {
    xs.push_back(s.epsilon);
    ys.push_back(s.estimate);
  }
  sfl::stats::LogLogFit fit = sfl::stats::fit_log_log(xs, ys);
  text << "  " << label << ": " << out_name << ", " << rows << " epsilon rows";
  if (fit.points_used >= 2) {
    text << ", log-log slope " << fit.slope << " (expected about "
         << expected_slope << ")";
    if (fit.slope > 0)
      text << ", implied constant " << std::exp(fit.intercept / fit.slope);
  }
  text << "\n";
}

int run_report(const std::string& dir, const std::string& out_flag) {
  fs::path in_dir(dir);
  if (!fs::is_directory(in_dir))
    throw sfl::ConfigError(dir + ": not a directory");
  std::vector<RecordEntry> entries;
  std::string schema;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(in_dir))
    if (e.is_regular_file() && e.path().extension() == ".jsonl")
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const fs::path& p : files) {
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded())
        throw sfl::ConfigError(p.string() + ": malformed record line");
      std::string sv = j.at("schema_version").get<std::string>();
      if (schema.empty()) {
        schema = sv;
      } else if (schema != sv) {
        throw sfl::ConfigError("mixed schema versions: " + schema + " vs " +
                               sv + " in " + p.string());
      }
      RecordEntry ent;
      ent.kind = j.at("kind").get<std::string>();
      ent.cfg = sfl::parse_config(j.at("config"));
      if (sfl::config_hash(ent.cfg) != j.at("config_hash").get<std::string>())
        throw sfl::ConfigError(p.string() +
                               ": stored config hash does not match config");
      ent.pool_hash = sfl::config_pool_hash(ent.cfg);
      ent.record = j.at("record");
      ent.source = p.filename().string();
      entries.push_back(std::move(ent));
    }
  }
  if (entries.empty())
    throw sfl::ConfigError(dir + ": no records found");

  fs::path out_dir(out_flag.empty() ? dir : out_flag);
  fs::create_directories(out_dir);

  std::map<std::string, std::vector<const RecordEntry*>> pools;
  for (const RecordEntry& e : entries)
    pools[e.kind + "|" + e.pool_hash].push_back(&e);

  std::ostringstream text;
  text << "report: " << entries.size() << " record(s), " << pools.size()
       << " config pool(s), schema " << schema << "\n";
  for (const auto& [key, group] : pools) {
    const RecordEntry& head = *group.front();
    text << "pool " << head.kind << " " << head.pool_hash << ": "
         << group.size() << " record(s)";
    std::int64_t trials = 0;
    for (const RecordEntry* e : group) trials += e->cfg.trials;
    text << ", " << trials << " trials total\n";
    int d = head.cfg.dims.d();
    if (head.kind == "tail") {
      std::vector<const json*> curves;
      for (const RecordEntry* e : group) curves.push_back(&e->record.at("tail"));
      pool_curve("tail", "curve-tail-" + head.pool_hash + ".csv", curves,
                 out_dir, text, double(d));
    } else if (head.kind == "distance") {
      std::vector<const json*> v0, vr;
      for (const RecordEntry* e : group) {
        v0.push_back(&e->record.at("tail_v0"));
        vr.push_back(&e->record.at("tail_vr"));
      }
      std::int64_t l = head.record.at("l").get<std::int64_t>();
      pool_curve("distance v0", "curve-distance-v0-" + head.pool_hash + ".csv",
                 v0, out_dir, text, double(l));
      pool_curve("distance vr", "curve-distance-vr-" + head.pool_hash + ".csv",
                 vr, out_dir, text, double(l));
    } else {
      for (const RecordEntry* e : group)
        text << "  " << e->source << "\n";
    }
  }
  std::string summary = text.str();
  std::cout << summary;
  write_text(out_dir / "report-summary.txt", summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for smallest singular values of deformed "
               "random rectangular matrices"};
  app.require_subcommand(1);

  CommonOpts tail_o, edges_o, distance_o, decoupling_o, tensorize_o,
      subspace_o, reduce_o;
  auto* tail_cmd = app.add_subcommand("tail", "Small-ball tail of s_n(TX - B)");
  add_common(tail_cmd, tail_o);
  auto* edges_cmd =
      app.add_subcommand("edges", "Singular value edges of X/sqrt(N)");
  add_common(edges_cmd, edges_o);
  auto* distance_cmd = app.add_subcommand(
      "distance", "Distance of a projected column block to a random subspace");
  add_common(distance_cmd, distance_o);
  auto* decoupling_cmd = app.add_subcommand(
      "decoupling", "Quadratic decoupling inequality sweep");
  add_common(decoupling_cmd, decoupling_o);
  auto* tensorize_cmd = app.add_subcommand(
      "tensorize", "Tensorization of small-ball estimates");
  add_common(tensorize_cmd, tensorize_o);
  auto* subspace_cmd = app.add_subcommand(
      "subspace-incomp", "Incompressibility and LCD of a random subspace");
  add_common(subspace_cmd, subspace_o);
  auto* reduce_cmd = app.add_subcommand(
      "reduce-verify", "Truncation-reduction identity check on one sample");
  add_common(reduce_cmd, reduce_o);

  LcdOpts lcd_o;
  auto* lcd_cmd =
      app.add_subcommand("lcd", "Least common denominator of a vector or subspace");
  lcd_cmd->add_option("--vector", lcd_o.vector_path, "Numeric vector file");
  lcd_cmd->add_option("--basis", lcd_o.basis_path,
                      "Orthonormal basis matrix file (one row per line)");
  lcd_cmd->add_option("--alpha", lcd_o.alpha, "Admissibility cap alpha");
  lcd_cmd->add_option("--gamma", lcd_o.gamma, "Relative accuracy gamma");
  lcd_cmd->add_option("--theta-max", lcd_o.theta_max,
                      "Search ceiling; 0 = 10 sqrt(dim)");
  lcd_cmd->add_option("--tolerance", lcd_o.tolerance, "Certification tolerance");
  lcd_cmd->add_option("--mode", lcd_o.mode, "certified | montecarlo | both");
  lcd_cmd->add_option("--samples", lcd_o.samples, "Monte Carlo directions");
  lcd_cmd->add_option("--seed", lcd_o.seed, "Monte Carlo master seed");
  lcd_cmd->add_option("--stream", lcd_o.stream, "Monte Carlo stream id");
  lcd_cmd->add_option("--out", lcd_o.out_dir, "Also write the result JSON here");

  NetOpts net_o;
  auto* net_cmd = app.add_subcommand("net", "Epsilon-net on the unit sphere");
  net_cmd->add_option("--n", net_o.n, "Ambient dimension (<= 8)")->required();
  net_cmd->add_option("--epsilon", net_o.epsilon, "Net resolution")->required();
  net_cmd->add_option("--mode", net_o.mode, "greedy | lattice");
  net_cmd->add_option("--seed", net_o.seed, "Master seed");
  net_cmd->add_option("--stream", net_o.stream, "Stream id");
  net_cmd->add_option("--probes", net_o.probes, "Covering probes per round");
  net_cmd->add_option("--out", net_o.out_dir, "Also write net points CSV here");

  std::string report_dir, report_out;
  auto* report_cmd =
      app.add_subcommand("report", "Aggregate a directory of JSONL records");
  report_cmd->add_option("dir", report_dir, "Record directory")->required();
  report_cmd->add_option("--out", report_out,
                         "Curve output directory (default: record directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (tail_cmd->parsed()) return run_tail(tail_o);
    if (edges_cmd->parsed()) return run_edges(edges_o);
    if (distance_cmd->parsed()) return run_distance(distance_o);
    if (decoupling_cmd->parsed()) return run_decoupling(decoupling_o);
    if (tensorize_cmd->parsed()) return run_tensorize(tensorize_o);
    if (subspace_cmd->parsed()) return run_subspace_incomp(subspace_o);
    if (reduce_cmd->parsed()) return run_reduce_verify(reduce_o);
    if (lcd_cmd->parsed()) return run_lcd(lcd_o);
    if (net_cmd->parsed()) return run_net(net_o);
    if (report_cmd->parsed()) return run_report(report_dir, report_out);
  } catch (const sfl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const sfl::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
