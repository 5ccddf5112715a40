#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "mqnet/experiment.hpp"

namespace fs = std::filesystem;
using namespace mqnet;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(static_cast<bool>(in));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) rows.push_back(split_csv_line(line));
  return rows;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(static_cast<bool>(in));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Mirrors the aggregator arithmetic: mean then population std, summing in
// input order.
void mean_std_ref(const std::vector<double>& xs, double& mean, double& sd) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(xs.size()));
}

SweepSpec small_sweep(const fs::path& dir) {
  SweepSpec spec;
  spec.strategies = {"random", "conf"};
  spec.noise_ratios = {0.2};
  spec.cost_ood_grid = {1.0};
  spec.seeds = {1, 2, 3};
  spec.base.rounds = 2;
  spec.base.budget = 4.0;
  spec.base.benchmark.pool_size = 60;
  spec.base.benchmark.test_per_class = 40;
  spec.base.classifier_train.iterations = 200;
  spec.out_dir = dir.string();
  return spec;
}

}  // namespace

TEST_CASE("parse_config_text: empty object keeps every default") {
  const SweepSpec spec = parse_config_text("{}");
  CHECK(spec.strategies == std::vector<std::string>{"mqnet"});
  CHECK(spec.noise_ratios == std::vector<double>{0.2});
  CHECK(spec.cost_ood_grid == std::vector<double>{1.0});
  CHECK(spec.seeds == std::vector<std::uint64_t>{1});
  CHECK(spec.out_dir.empty());
  CHECK(spec.base.rounds == 10);
  CHECK(spec.base.budget == 30.0);
  CHECK(spec.base.strategy == "mqnet");
  CHECK(spec.base.benchmark.pool_size == 600);
  CHECK(spec.base.meta_hidden_dim == 64);
  CHECK(spec.base.classifier_hidden == 32);
  CHECK_FALSE(spec.base.meta.strict_margin);
}

TEST_CASE("parse_config_text: scalar keys fill base and collapse the lists") {
  const SweepSpec spec = parse_config_text(R"({
    "strategy": "conf",
    "noise_ratio": 0.4,
    "cost_ood": 2.0,
    "seed": 9,
    "rounds": 3,
    "budget": 12.5,
    "cost_in": 1.5,
    "pool_size": 300,
    "num_classes": 5,
    "ood_clusters": 10,
    "cluster_radius": 3.0,
    "in_std": 0.7,
    "ood_std": 0.4,
    "class_share_decay": 0.6,
    "ood_ring_base": 0.4,
    "ood_ring_step": 0.7,
    "ood_interior_share": 0.9,
    "test_per_class": 100,
    "meta_hidden_dim": 16,
    "meta_epochs": 50,
    "meta_lr": 0.02,
    "meta_margin": 0.2,
    "meta_pair_batch": 32,
    "meta_lr_decay_factor": 0.5,
    "meta_lr_decay_at": 0.25,
    "strict_margin": true,
    "classifier_hidden": 24,
    "classifier_iterations": 500,
    "classifier_lr": 0.1,
    "classifier_batch": 8,
    "purity_source": "mahalanobis",
    "informativeness_source": "confidence",
    "out_dir": "results"
  })");
  CHECK(spec.strategies == std::vector<std::string>{"conf"});
  CHECK(spec.noise_ratios == std::vector<double>{0.4});
  CHECK(spec.cost_ood_grid == std::vector<double>{2.0});
  CHECK(spec.seeds == std::vector<std::uint64_t>{9});
  CHECK(spec.base.strategy == "conf");
  CHECK(spec.base.benchmark.noise_ratio == 0.4);
  CHECK(spec.base.cost.c_ood == 2.0);
  CHECK(spec.base.cost.c_in == 1.5);
  CHECK(spec.base.seed == 9);
  CHECK(spec.base.rounds == 3);
  CHECK(spec.base.budget == 12.5);
  CHECK(spec.base.benchmark.pool_size == 300);
  CHECK(spec.base.benchmark.num_classes == 5);
  CHECK(spec.base.benchmark.ood_clusters == 10);
  CHECK(spec.base.benchmark.cluster_radius == 3.0);
  CHECK(spec.base.benchmark.in_std == 0.7);
  CHECK(spec.base.benchmark.ood_std == 0.4);
  CHECK(spec.base.benchmark.class_share_decay == 0.6);
  CHECK(spec.base.benchmark.ood_ring_base == 0.4);
  CHECK(spec.base.benchmark.ood_ring_step == 0.7);
  CHECK(spec.base.benchmark.ood_interior_share == 0.9);
  CHECK(spec.base.benchmark.test_per_class == 100);
  CHECK(spec.base.meta_hidden_dim == 16);
  CHECK(spec.base.meta.epochs == 50);
  CHECK(spec.base.meta.learning_rate == 0.02);
  CHECK(spec.base.meta.margin == 0.2);
  CHECK(spec.base.meta.pair_batch_size == 32);
  CHECK(spec.base.meta.lr_decay_factor == 0.5);
  CHECK(spec.base.meta.lr_decay_at_fraction == 0.25);
  CHECK(spec.base.meta.strict_margin);
  CHECK(spec.base.classifier_hidden == 24);
  CHECK(spec.base.classifier_train.iterations == 500);
  CHECK(spec.base.classifier_train.learning_rate == 0.1);
  CHECK(spec.base.classifier_train.batch_size == 8);
  CHECK(spec.base.purity_source == "mahalanobis");
  CHECK(spec.base.informativeness_source == "confidence");
  CHECK(spec.out_dir == "results");
}

TEST_CASE("parse_config_text: plural keys define the grid and seed the base") {
  const SweepSpec spec = parse_config_text(R"({
    "strategies": ["random", "mqnet"],
    "noise_ratios": [0.1, 0.3],
    "cost_ood_grid": [0.5, 1, 2, 4],
    "seeds": [7, 8]
  })");
  CHECK(spec.strategies == std::vector<std::string>{"random", "mqnet"});
  CHECK(spec.noise_ratios == std::vector<double>{0.1, 0.3});
  CHECK(spec.cost_ood_grid == std::vector<double>{0.5, 1.0, 2.0, 4.0});
  CHECK(spec.seeds == std::vector<std::uint64_t>{7, 8});
  CHECK(spec.base.strategy == "random");
  CHECK(spec.base.benchmark.noise_ratio == 0.1);
  CHECK(spec.base.cost.c_ood == 0.5);
  CHECK(spec.base.seed == 7);
}

TEST_CASE("parse_config_text: explicit scalar wins over the list head") {
  const SweepSpec spec = parse_config_text(R"({
    "strategy": "conf",
    "noise_ratios": [0.1, 0.3]
  })");
  CHECK(spec.strategies == std::vector<std::string>{"conf"});
  CHECK(spec.noise_ratios == std::vector<double>{0.1, 0.3});
  CHECK(spec.base.benchmark.noise_ratio == 0.1);
}

TEST_CASE("parse_config_text: errors name the offending key") {
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"tau": 0.2})"),
                       "unknown config key: tau", std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"noise_ratio": 1.2})"),
                       "noise_ratio: must be in [0, 1)", std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"budget": -3})"),
                       "budget: must be positive", std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"rounds": "ten"})"),
                       "rounds: expected a non-negative integer",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"rounds": 0})"),
                       "rounds: must be at least 1", std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"num_classes": 1})"),
                       "num_classes: must be at least 2",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_config_text(R"({"strategies": ["random", "bogus"]})"),
      "strategies: unknown strategy 'bogus'", std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"strategy": 3})"),
                       "strategy: expected a string", std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"purity_source": "react"})"),
                       "purity_source: must be 'energy' or 'mahalanobis'",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_config_text(R"({"informativeness_source": "badge"})"),
      "informativeness_source: must be 'entropy' or 'confidence'",
      std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"seeds": []})"),
                       "seeds: expected a non-empty array of seeds",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"cost_ood_grid": [1, -2]})"),
                       "cost_ood_grid: must be positive",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"strict_margin": "yes"})"),
                       "strict_margin: expected a boolean",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"class_share_decay": 0})"),
                       "class_share_decay: must be in (0, 1]",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"class_share_decay": 1.1})"),
                       "class_share_decay: must be in (0, 1]",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"ood_ring_base": 0})"),
                       "ood_ring_base: must be positive",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"ood_ring_step": -0.1})"),
                       "ood_ring_step: must be non-negative",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"ood_interior_share": 0})"),
                       "ood_interior_share: must be in (0, 1]",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"ood_interior_share": 1.5})"),
                       "ood_interior_share: must be in (0, 1]",
                       std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("not json"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text("[1, 2]"),
                       "config root must be a JSON object",
                       std::invalid_argument);
}

TEST_CASE("parse_config_file: reads a file and rejects missing paths") {
  const fs::path dir = fresh_dir("mqnet_cfg_test");
  const fs::path cfg = dir / "cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({"strategy": "linear", "seed": 4})";
  }
  const SweepSpec spec = parse_config_file(cfg.string());
  CHECK(spec.base.strategy == "linear");
  CHECK(spec.seeds == std::vector<std::uint64_t>{4});
  CHECK_THROWS_AS(parse_config_file((dir / "missing.json").string()),
                  std::runtime_error);
}

TEST_CASE("run_csv_name: compact deterministic cell names") {
  CHECK(run_csv_name("mqnet", 0.2, 1.0, 3) == "run_mqnet_tau0.2_cood1_seed3.csv");
  CHECK(run_csv_name("conf", 0.0, 0.5, 12) == "run_conf_tau0_cood0.5_seed12.csv");
  CHECK(run_csv_name("random", 0.45, 4.0, 7) ==
        "run_random_tau0.45_cood4_seed7.csv");
}

TEST_CASE("write_run_csv: exact columns, %.17g doubles, empty optional cell") {
  const fs::path dir = fresh_dir("mqnet_runcsv_test");
  std::vector<RoundRecord> records(2);
  records[0].round_index = 1;
  records[0].test_accuracy = 0.8425;
  records[0].query_in_ratio = 2.0 / 3.0;
  records[0].cost_spent = 30.5;
  records[0].purity_auroc = 0.9125;
  records[0].strategy_name = "mqnet";
  records[1].round_index = 2;
  records[1].test_accuracy = 0.9;
  records[1].query_in_ratio = 1.0;
  records[1].cost_spent = 30.0;
  records[1].pool_exhausted = true;
  records[1].strategy_name = "mqnet";

  const fs::path csv = dir / "run.csv";
  write_run_csv(records, 0.2, 2.0, 11, csv.string());

  const auto rows = read_csv(csv);
  REQUIRE(rows.size() == 3);
  const std::vector<std::string> header{
      "round",          "strategy",   "noise_ratio",  "cost_ood",
      "seed",           "test_accuracy", "query_in_ratio", "cost_spent",
      "purity_auroc",   "pool_exhausted"};
  CHECK(rows[0] == header);
  CHECK(rows[1][0] == "1");
  CHECK(rows[1][1] == "mqnet");
  CHECK(std::stod(rows[1][2]) == 0.2);
  CHECK(std::stod(rows[1][3]) == 2.0);
  CHECK(rows[1][4] == "11");
  CHECK(std::stod(rows[1][5]) == 0.8425);
  CHECK(std::stod(rows[1][6]) == 2.0 / 3.0);
  CHECK(std::stod(rows[1][7]) == 30.5);
  CHECK(std::stod(rows[1][8]) == 0.9125);
  CHECK(rows[1][9] == "0");
  CHECK(rows[2][8] == "");
  CHECK(rows[2][9] == "1");

  // '\n' line endings, no carriage returns anywhere.
  const std::string raw = slurp(csv);
  CHECK(raw.find('\r') == std::string::npos);
  CHECK(raw.back() == '\n');
}

TEST_CASE("run_sweep: one CSV per cell run plus a reproducible aggregate") {
  const fs::path dir = fresh_dir("mqnet_sweep_a");
  const SweepSpec spec = small_sweep(dir);
  const std::vector<AggregateRow> rows = run_sweep(spec);

  // 2 strategies x 1 tau x 1 cost x 3 seeds = 6 run files.
  std::size_t run_files = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("run_", 0) == 0) ++run_files;
  }
  CHECK(run_files == 6);
  CHECK(fs::exists(dir / "aggregate.csv"));

  // 2 cells x 2 rounds.
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].strategy == "random");
  CHECK(rows[0].round == 1);
  CHECK(rows[1].round == 2);
  CHECK(rows[2].strategy == "conf");
  for (const AggregateRow& row : rows) {
    CHECK(row.seed_count == 3);
    CHECK(row.noise_ratio == 0.2);
    CHECK(row.cost_ood == 1.0);
    CHECK(row.acc_mean > 0.0);
    CHECK(row.acc_mean <= 1.0);
    CHECK(row.acc_std >= 0.0);
    CHECK(row.cost_mean >= spec.base.budget);
    CHECK(row.auroc_count == 3);
  }

  // The aggregate must be recomputable from the per-run CSVs alone.
  const auto agg = read_csv(dir / "aggregate.csv");
  REQUIRE(agg.size() == 5);
  std::size_t agg_row = 1;
  for (const std::string& strategy : spec.strategies) {
    std::vector<std::vector<std::vector<std::string>>> per_seed;
    for (std::uint64_t seed : spec.seeds) {
      per_seed.push_back(
          read_csv(dir / run_csv_name(strategy, 0.2, 1.0, seed)));
    }
    for (std::size_t r = 1; r <= spec.base.rounds; ++r, ++agg_row) {
      std::vector<double> acc, ratio, cost, auroc;
      for (const auto& csv : per_seed) {
        REQUIRE(csv.size() == spec.base.rounds + 1);
        const auto& fields = csv[r];
        REQUIRE(fields.size() == 10);
        CHECK(fields[1] == strategy);
        acc.push_back(std::stod(fields[5]));
        ratio.push_back(std::stod(fields[6]));
        cost.push_back(std::stod(fields[7]));
        if (!fields[8].empty()) auroc.push_back(std::stod(fields[8]));
      }
      const auto& a = agg[agg_row];
      REQUIRE(a.size() == 14);
      CHECK(a[0] == strategy);
      CHECK(std::stoul(a[3]) == r);
      CHECK(std::stoul(a[4]) == 3);
      double mean = 0.0, sd = 0.0;
      mean_std_ref(acc, mean, sd);
      CHECK(std::abs(std::stod(a[5]) - mean) <= 1e-12);
      CHECK(std::abs(std::stod(a[6]) - sd) <= 1e-12);
      mean_std_ref(ratio, mean, sd);
      CHECK(std::abs(std::stod(a[7]) - mean) <= 1e-12);
      CHECK(std::abs(std::stod(a[8]) - sd) <= 1e-12);
      mean_std_ref(cost, mean, sd);
      CHECK(std::abs(std::stod(a[9]) - mean) <= 1e-12);
      CHECK(std::abs(std::stod(a[10]) - sd) <= 1e-12);
      REQUIRE(auroc.size() == 3);
      mean_std_ref(auroc, mean, sd);
      CHECK(std::abs(std::stod(a[12]) - mean) <= 1e-12);
      CHECK(std::abs(std::stod(a[13]) - sd) <= 1e-12);
    }
  }
}

TEST_CASE("run_sweep: reruns are byte-identical") {
  const fs::path dir_a = fresh_dir("mqnet_sweep_b1");
  const fs::path dir_b = fresh_dir("mqnet_sweep_b2");
  SweepSpec spec = small_sweep(dir_a);
  spec.strategies = {"random"};
  spec.seeds = {1, 2};
  run_sweep(spec);
  spec.out_dir = dir_b.string();
  run_sweep(spec);

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir_a)) {
    names.push_back(entry.path().filename().string());
  }
  CHECK(names.size() == 3);  // 2 runs + aggregate
  for (const std::string& name : names) {
    CAPTURE(name);
    REQUIRE(fs::exists(dir_b / name));
    CHECK(slurp(dir_a / name) == slurp(dir_b / name));
  }
}

TEST_CASE("run_sweep: a failing cell is skipped, the rest aggregate") {
  const fs::path dir = fresh_dir("mqnet_sweep_fail");
  SweepSpec spec;
  spec.strategies = {"random"};
  spec.noise_ratios = {0.5};
  // At c_ood = 0.05 the whole pool costs 10.5 < budget, so the cell fails.
  spec.cost_ood_grid = {1.0, 0.05};
  spec.seeds = {1, 2};
  spec.base.rounds = 1;
  spec.base.budget = 11.0;
  spec.base.benchmark.pool_size = 20;
  spec.base.benchmark.test_per_class = 20;
  spec.base.classifier_train.iterations = 100;
  spec.out_dir = dir.string();

  const std::vector<AggregateRow> rows = run_sweep(spec);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].cost_ood == 1.0);
  CHECK(rows[0].seed_count == 2);
  CHECK(fs::exists(dir / run_csv_name("random", 0.5, 1.0, 1)));
  CHECK(fs::exists(dir / run_csv_name("random", 0.5, 1.0, 2)));
  CHECK_FALSE(fs::exists(dir / run_csv_name("random", 0.5, 0.05, 1)));
  const auto agg = read_csv(dir / "aggregate.csv");
  CHECK(agg.size() == 2);
}

TEST_CASE("run_sweep: noise_ratio 0 leaves the auroc columns empty") {
  const fs::path dir = fresh_dir("mqnet_sweep_tau0");
  SweepSpec spec;
  spec.strategies = {"random"};
  spec.noise_ratios = {0.0};
  spec.cost_ood_grid = {1.0};
  spec.seeds = {1};
  spec.base.rounds = 1;
  spec.base.budget = 5.0;
  spec.base.benchmark.pool_size = 40;
  spec.base.benchmark.test_per_class = 20;
  spec.base.classifier_train.iterations = 100;
  spec.out_dir = dir.string();

  const std::vector<AggregateRow> rows = run_sweep(spec);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].auroc_count == 0);
  const std::string raw = slurp(dir / "aggregate.csv");
  const auto agg = read_csv(dir / "aggregate.csv");
  REQUIRE(agg.size() == 2);
  REQUIRE(agg[1].size() == 14);
  CHECK(agg[1][11] == "0");
  CHECK(agg[1][12] == "");
  CHECK(agg[1][13] == "");
}

TEST_CASE("run_sweep: rejects empty grids") {
  SweepSpec spec;
  spec.strategies.clear();
  CHECK_THROWS_WITH_AS(run_sweep(spec), "strategies: must be non-empty",
                       std::invalid_argument);
  spec = SweepSpec{};
  spec.seeds.clear();
  CHECK_THROWS_WITH_AS(run_sweep(spec), "seeds: must be non-empty",
                       std::invalid_argument);
}

TEST_CASE("emit_score_grid: row-major layout with both axes monotone") {
  const fs::path dir = fresh_dir("mqnet_grid_test");
  MonotoneMlp mlp;
  mlp.hidden_dim = 2;
  mlp.raw_w1 = {0.5, -0.3, 0.2, 0.8};
  mlp.raw_b1 = {0.1, -0.2};
  mlp.raw_w2 = {1.0, 0.5};
  mlp.raw_b2 = 0.3;

  const fs::path csv = dir / "grid.csv";
  const std::size_t res = 10;
  emit_score_grid(mlp, 0.05, 7.5, res, csv.string());

  const auto rows = read_csv(csv);
  REQUIRE(rows.size() == 1 + res * res);
  CHECK(rows[0] == std::vector<std::string>{"informativeness", "purity",
                                            "score"});
  std::vector<double> info(res * res), purity(res * res), score(res * res);
  for (std::size_t i = 0; i < res * res; ++i) {
    REQUIRE(rows[1 + i].size() == 3);
    info[i] = std::stod(rows[1 + i][0]);
    purity[i] = std::stod(rows[1 + i][1]);
    score[i] = std::stod(rows[1 + i][2]);
  }

  // Informativeness varies fastest; purity is constant within each block.
  for (std::size_t pi = 0; pi < res; ++pi) {
    for (std::size_t ii = 0; ii < res; ++ii) {
      const std::size_t at = pi * res + ii;
      CHECK(purity[at] == purity[pi * res]);
      if (ii > 0) CHECK(info[at] > info[at - 1]);
    }
  }
  CHECK(info[0] == 0.05);
  CHECK(info[res - 1] == 7.5);
  CHECK(purity[0] == 0.05);
  CHECK(purity[res * res - 1] == 7.5);

  // Monotone along each axis.
  for (std::size_t pi = 0; pi < res; ++pi) {
    for (std::size_t ii = 1; ii < res; ++ii) {
      CHECK(score[pi * res + ii] >= score[pi * res + ii - 1] - 1e-12);
    }
  }
  for (std::size_t ii = 0; ii < res; ++ii) {
    for (std::size_t pi = 1; pi < res; ++pi) {
      CHECK(score[pi * res + ii] >= score[(pi - 1) * res + ii] - 1e-12);
    }
  }
}

TEST_CASE("emit_score_grid: validates resolution and range") {
  MonotoneMlp mlp;
  mlp.hidden_dim = 1;
  mlp.raw_w1 = {0.1, 0.1};
  mlp.raw_b1 = {0.0};
  mlp.raw_w2 = {1.0};

  CHECK_THROWS_WITH_AS(emit_score_grid(mlp, 0.05, 7.5, 1, "unused.csv"),
                       "resolution must be at least 2", std::invalid_argument);
  CHECK_THROWS_WITH_AS(emit_score_grid(mlp, 0.0, 7.5, 10, "unused.csv"),
                       "grid range must satisfy 0 < lo < hi",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(emit_score_grid(mlp, 2.0, 2.0, 10, "unused.csv"),
                       "grid range must satisfy 0 < lo < hi",
                       std::invalid_argument);
}
