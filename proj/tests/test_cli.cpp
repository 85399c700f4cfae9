// Drives the installed binary end to end: config errors, record files,
// determinism across reruns and worker counts, single queries, and reports.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "sfl/config.hpp"
#include "sfl/record.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& scratch() {
  static const fs::path root = [] {
    fs::path p =
        fs::temp_directory_path() / ("sfl-cli-" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return root;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run_cli(const std::string& args) {
  static int call = 0;
  fs::path out_log = scratch() / ("stdout-" + std::to_string(call) + ".log");
  fs::path err_log = scratch() / ("stderr-" + std::to_string(call) + ".log");
  ++call;
  std::string cmd = std::string("\"") + SFL_BIN + "\" " + args + " >\"" +
                    out_log.string() + "\" 2>\"" + err_log.string() + "\"";
  int raw = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out_log);
  r.err = slurp(err_log);
  return r;
}

sfl::ExperimentConfig tail_config(std::uint64_t seed) {
  sfl::ExperimentConfig cfg;
  cfg.dims.n = 3;
  cfg.dims.N = 8;
  cfg.dims.M = 10;
  cfg.dist = sfl::EntryDistribution{sfl::EntryKind::Gaussian};
  cfg.deformation.spectrum = sfl::constant_spectrum(8, 1.0);
  cfg.deformation.rotation_seed = {1000, 0};
  cfg.trials = 60;
  cfg.master_seed = {seed, 0};
  cfg.epsilon_grid = {0.1, 0.5, 2.0};
  return cfg;
}

fs::path write_config(const std::string& name, const sfl::ExperimentConfig& cfg) {
  fs::path p = scratch() / name;
  spit(p, sfl::canonical_config_json(cfg).dump(2) + "\n");
  return p;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

TEST_CASE("malformed invocations and configs exit with code 2") {
  CHECK(run_cli("bogus-subcommand").code == 2);
  CHECK(run_cli("tail").code == 2);  // --config is required

  fs::path empty = scratch() / "empty.json";
  spit(empty, "");
  CHECK(run_cli("tail --config \"" + empty.string() + "\"").code == 2);

  json broken = sfl::canonical_config_json(tail_config(1));
  broken.erase("trials");
  fs::path no_trials = scratch() / "no-trials.json";
  spit(no_trials, broken.dump(2));
  CliRun r = run_cli("tail --config \"" + no_trials.string() + "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("config error") != std::string::npos);
  CHECK(r.err.find("/trials") != std::string::npos);
}

TEST_CASE("tail run writes a record, a csv, and a manifest") {
  sfl::ExperimentConfig cfg = tail_config(2000);
  fs::path cfg_path = write_config("tail.json", cfg);
  fs::path out_dir = scratch() / "run-a";
  CliRun r = run_cli("tail --config \"" + cfg_path.string() + "\" --out \"" +
                     out_dir.string() + "\"");
  REQUIRE(r.code == 0);

  json status = json::parse(r.out);
  std::string hash = sfl::config_hash(cfg);
  CHECK(status.at("kind") == "tail");
  CHECK(status.at("config_hash") == hash);
  fs::path record_path = status.at("record").get<std::string>();
  fs::path csv_path = status.at("csv").get<std::string>();
  fs::path manifest_path = status.at("manifest").get<std::string>();
  REQUIRE(fs::exists(record_path));
  REQUIRE(fs::exists(csv_path));
  REQUIRE(fs::exists(manifest_path));
  CHECK(record_path.filename().string() == "tail-" + hash + ".jsonl");

  std::string line = slurp(record_path);
  REQUIRE(!line.empty());
  CHECK(line.back() == '\n');
  json rec = json::parse(line);
  CHECK(rec.at("schema_version") == "1");
  CHECK(rec.at("kind") == "tail");
  CHECK(rec.at("config_hash") == hash);
  CHECK(sfl::config_hash(sfl::parse_config(rec.at("config"))) == hash);
  REQUIRE(rec.at("record").at("tail").size() == 3);
  std::int64_t trials = rec.at("record").at("tail").at(0).at("trials");
  CHECK(trials == 60);

  auto csv = parse_csv(slurp(csv_path));
  REQUIRE(csv.size() == 4);
  CHECK(csv[0][0] == "epsilon");
  CHECK(csv[0][4] == "ci_lo");

  json manifest = json::parse(slurp(manifest_path));
  CHECK(manifest.at("kind") == "tail");
  CHECK(manifest.at("config_hash") == hash);
  CHECK(manifest.at("workers").get<int>() >= 1);
}

TEST_CASE("reruns and worker counts leave the record bytes unchanged") {
  sfl::ExperimentConfig cfg = tail_config(2000);
  fs::path cfg_path = write_config("tail.json", cfg);
  std::string hash = sfl::config_hash(cfg);
  std::string rel = "tail-" + hash + ".jsonl";

  fs::path d1 = scratch() / "run-w1";
  fs::path d4 = scratch() / "run-w4";
  REQUIRE(run_cli("tail --workers 1 --config \"" + cfg_path.string() +
                  "\" --out \"" + d1.string() + "\"")
              .code == 0);
  REQUIRE(run_cli("tail --workers 4 --config \"" + cfg_path.string() +
                  "\" --out \"" + d4.string() + "\"")
              .code == 0);
  CHECK(slurp(d1 / rel) == slurp(d4 / rel));
  CHECK(slurp(d1 / ("tail-" + hash + ".csv")) ==
        slurp(d4 / ("tail-" + hash + ".csv")));

  fs::path d1b = scratch() / "run-w1-again";
  REQUIRE(run_cli("tail --workers 1 --config \"" + cfg_path.string() +
                  "\" --out \"" + d1b.string() + "\"")
              .code == 0);
  CHECK(slurp(d1 / rel) == slurp(d1b / rel));
}

TEST_CASE("lcd vector query prints the certified value") {
  fs::path vec = scratch() / "e1.txt";
  spit(vec, "1 0 0 0 0\n");
  fs::path out_dir = scratch() / "lcd-out";
  CliRun r = run_cli("lcd --vector \"" + vec.string() + "\" --out \"" +
                     out_dir.string() + "\"");
  REQUIRE(r.code == 0);
  json out = json::parse(r.out);
  CHECK(out.at("input") == "vector");
  CHECK(out.at("dim") == 5);
  CHECK(out.at("params").at("gamma") == doctest::Approx(0.1));
  const json& res = out.at("result");
  CHECK(res.at("certified") == true);
  CHECK(res.at("value").get<double>() ==
        doctest::Approx(1.0 / 1.1).epsilon(1e-4));
  std::vector<long long> lattice =
      res.at("witness_lattice").get<std::vector<long long>>();
  CHECK(lattice == std::vector<long long>{1, 0, 0, 0, 0});
  CHECK(slurp(out_dir / "lcd-result.json") == r.out);
}

TEST_CASE("lcd subspace modes produce certified and sampled results") {
  fs::path basis = scratch() / "span-e1.txt";
  spit(basis, "1\n0\n0\n");

  CliRun both = run_cli("lcd --basis \"" + basis.string() +
                        "\" --mode both --samples 100 --seed 5");
  REQUIRE(both.code == 0);
  json out = json::parse(both.out);
  CHECK(out.at("input") == "subspace");
  CHECK(out.at("ambient") == 3);
  CHECK(out.at("dim") == 1);
  REQUIRE(out.contains("certified"));
  REQUIRE(out.contains("montecarlo"));
  double certified = out.at("certified").at("value").get<double>();
  double sampled = out.at("montecarlo").at("value").get<double>();
  // every unit vector of the line is a sign flip of e1
  CHECK(certified == doctest::Approx(1.0 / 1.1).epsilon(1e-4));
  CHECK(sampled == doctest::Approx(1.0 / 1.1).epsilon(1e-4));

  CliRun single = run_cli("lcd --basis \"" + basis.string() + "\"");
  REQUIRE(single.code == 0);
  CHECK(json::parse(single.out).contains("result"));

  CHECK(run_cli("lcd --basis \"" + basis.string() + "\" --mode sideways").code ==
        2);
  CHECK(run_cli("lcd --vector a.txt --basis b.txt").code == 2);
}

TEST_CASE("non-orthonormal basis input is rejected") {
  fs::path basis = scratch() / "bad-basis.txt";
  spit(basis, "2\n0\n0\n");
  CliRun r = run_cli("lcd --basis \"" + basis.string() + "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("config error") != std::string::npos);
}

TEST_CASE("net query reports points and writes them") {
  fs::path out_dir = scratch() / "net-out";
  CliRun r = run_cli("net --n 1 --epsilon 0.5 --out \"" + out_dir.string() +
                     "\"");
  REQUIRE(r.code == 0);
  json out = json::parse(r.out);
  CHECK(out.at("points") == 2);
  CHECK(out.at("cardinality_bound") == 2);
  auto rows = parse_csv(slurp(out_dir / "net-points.csv"));
  REQUIRE(rows.size() == 2);
  double a = std::stod(rows[0][0]);
  double b = std::stod(rows[1][0]);
  CHECK(std::min(a, b) == doctest::Approx(-1.0));
  CHECK(std::max(a, b) == doctest::Approx(1.0));

  CHECK(run_cli("net --n 9 --epsilon 0.5").code == 2);
  CHECK(run_cli("net --n 2 --epsilon 0.5 --mode diagonal").code == 2);
}

TEST_CASE("report pools seed variants and matches a recomputed interval") {
  sfl::ExperimentConfig cfg = tail_config(2000);
  fs::path cfg_path = write_config("tail.json", cfg);
  fs::path rec_dir = scratch() / "records";
  std::vector<std::uint64_t> seeds = {123, 456, 789};
  for (std::uint64_t s : seeds) {
    REQUIRE(run_cli("tail --config \"" + cfg_path.string() + "\" --seed " +
                    std::to_string(s) + " --out \"" + rec_dir.string() + "\"")
                .code == 0);
  }
  std::vector<fs::path> jsonl;
  for (const auto& e : fs::directory_iterator(rec_dir))
    if (e.path().extension() == ".jsonl") jsonl.push_back(e.path());
  REQUIRE(jsonl.size() == 3);  // seed overrides land in distinct hashes

  std::vector<json> records;
  for (const fs::path& p : jsonl) records.push_back(json::parse(slurp(p)));
  std::string pool =
      sfl::config_pool_hash(sfl::parse_config(records[0].at("config")));
  for (const json& r : records)
    CHECK(sfl::config_pool_hash(sfl::parse_config(r.at("config"))) == pool);

  fs::path rep_dir = scratch() / "report";
  CliRun rep = run_cli("report \"" + rec_dir.string() + "\" --out \"" +
                       rep_dir.string() + "\"");
  REQUIRE(rep.code == 0);
  CHECK(rep.out.find("3 record(s), 1 config pool(s)") != std::string::npos);
  CHECK(slurp(rep_dir / "report-summary.txt") == rep.out);

  auto curve = parse_csv(slurp(rep_dir / ("curve-tail-" + pool + ".csv")));
  REQUIRE(curve.size() == 4);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    double eps = std::stod(curve[i][0]);
    std::int64_t hits = std::stoll(curve[i][1]);
    std::int64_t trials = std::stoll(curve[i][2]);
    std::int64_t want_hits = 0;
    for (const json& r : records) {
      const json& row = r.at("record").at("tail").at(i - 1);
      CHECK(row.at("epsilon").get<double>() == doctest::Approx(eps));
      want_hits += row.at("hits").get<std::int64_t>();
    }
    CHECK(hits == want_hits);
    CHECK(trials == 180);
    CHECK(std::stod(curve[i][3]) ==
          doctest::Approx(double(hits) / 180.0).epsilon(1e-12));
    auto [lo, hi] = oracle::wilson(hits, trials);
    CHECK(std::stod(curve[i][4]) == doctest::Approx(lo).epsilon(1e-9));
    CHECK(std::stod(curve[i][5]) == doctest::Approx(hi).epsilon(1e-9));
  }
}

TEST_CASE("report rejects empty directories and mixed schemas") {
  fs::path empty_dir = scratch() / "no-records";
  fs::create_directories(empty_dir);
  CliRun r = run_cli("report \"" + empty_dir.string() + "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("no records found") != std::string::npos);

  CHECK(run_cli("report \"" + (scratch() / "missing-dir").string() + "\"").code ==
        2);

  // produce one good record, then clone it with a bumped schema version
  sfl::ExperimentConfig cfg = tail_config(31);
  cfg.trials = 5;
  fs::path cfg_path = write_config("tiny.json", cfg);
  fs::path mixed_dir = scratch() / "mixed";
  REQUIRE(run_cli("tail --config \"" + cfg_path.string() + "\" --out \"" +
                  mixed_dir.string() + "\"")
              .code == 0);
  fs::path good = mixed_dir / ("tail-" + sfl::config_hash(cfg) + ".jsonl");
  json rec = json::parse(slurp(good));
  rec["schema_version"] = "2";
  spit(mixed_dir / "zz-other-schema.jsonl", rec.dump() + "\n");
  CliRun mixed = run_cli("report \"" + mixed_dir.string() + "\"");
  CHECK(mixed.code == 2);
  CHECK(mixed.err.find("mixed schema versions") != std::string::npos);
}
