#include "mqnet/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mqnet {
namespace {

using nlohmann::json;

constexpr const char* kStrategyNames[] = {
    "mqnet",  "random",  "conf",        "coreset",
    "linear", "product", "purity_only", "info_only"};

bool known_strategy(const std::string& name) {
  for (const char* s : kStrategyNames) {
    if (name == s) return true;
  }
  return false;
}

[[noreturn]] void fail_key(const std::string& key, const std::string& what) {
  throw std::invalid_argument(key + ": " + what);
}

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) fail_key(key, "expected a number");
  return v.get<double>();
}

std::uint64_t as_uint(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  fail_key(key, "expected a non-negative integer");
}

std::size_t as_count(const json& v, const std::string& key,
                     std::size_t min_value) {
  const std::uint64_t u = as_uint(v, key);
  if (u < min_value) {
    fail_key(key, "must be at least " + std::to_string(min_value));
  }
  return static_cast<std::size_t>(u);
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) fail_key(key, "expected a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) fail_key(key, "expected a boolean");
  return v.get<bool>();
}

double checked_positive(double v, const std::string& key) {
  if (!std::isfinite(v) || v <= 0.0) fail_key(key, "must be positive");
  return v;
}

double checked_nonnegative(double v, const std::string& key) {
  if (!std::isfinite(v) || v < 0.0) fail_key(key, "must be non-negative");
  return v;
}

double checked_noise_ratio(double v, const std::string& key) {
  if (!(v >= 0.0 && v < 1.0)) fail_key(key, "must be in [0, 1)");
  return v;
}

double checked_unit_fraction(double v, const std::string& key) {
  if (!(v >= 0.0 && v <= 1.0)) fail_key(key, "must be in [0, 1]");
  return v;
}

std::string checked_strategy(const std::string& name, const std::string& key) {
  if (!known_strategy(name)) fail_key(key, "unknown strategy '" + name + "'");
  return name;
}

std::vector<double> as_number_array(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) {
    fail_key(key, "expected a non-empty array of numbers");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& e : v) out.push_back(as_number(e, key));
  return out;
}

// Doubles always print as %.17g so a CSV read-back reproduces the exact bits.
std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

// Shorter form for file names and log lines.
std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf);
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Population std; summation follows input order so rebuilds from the CSVs
// reproduce the same floating-point path.
MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd ms;
  if (xs.empty()) return ms;
  double sum = 0.0;
  for (double x : xs) sum += x;
  ms.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) {
    const double d = x - ms.mean;
    ss += d * d;
  }
  ms.std = std::sqrt(ss / static_cast<double>(xs.size()));
  return ms;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

}  // namespace

SweepSpec parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("config root must be a JSON object");
  }

  SweepSpec spec;
  bool saw_strategy = false, saw_strategies = false;
  bool saw_noise = false, saw_noises = false;
  bool saw_cood = false, saw_grid = false;
  bool saw_seed = false, saw_seeds = false;

  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    const json& v = item.value();
    if (key == "rounds") {
      spec.base.rounds = as_count(v, key, 1);
    } else if (key == "budget") {
      spec.base.budget = checked_positive(as_number(v, key), key);
    } else if (key == "seed") {
      spec.base.seed = as_uint(v, key);
      saw_seed = true;
    } else if (key == "seeds") {
      if (!v.is_array() || v.empty()) {
        fail_key(key, "expected a non-empty array of seeds");
      }
      spec.seeds.clear();
      for (const json& e : v) spec.seeds.push_back(as_uint(e, key));
      saw_seeds = true;
    } else if (key == "strategy") {
      spec.base.strategy = checked_strategy(as_string(v, key), key);
      saw_strategy = true;
    } else if (key == "strategies") {
      if (!v.is_array() || v.empty()) {
        fail_key(key, "expected a non-empty array of strategy names");
      }
      spec.strategies.clear();
      for (const json& e : v) {
        spec.strategies.push_back(checked_strategy(as_string(e, key), key));
      }
      saw_strategies = true;
    } else if (key == "noise_ratio") {
      spec.base.benchmark.noise_ratio =
          checked_noise_ratio(as_number(v, key), key);
      saw_noise = true;
    } else if (key == "noise_ratios") {
      spec.noise_ratios = as_number_array(v, key);
      for (double t : spec.noise_ratios) checked_noise_ratio(t, key);
      saw_noises = true;
    } else if (key == "cost_in") {
      spec.base.cost.c_in = checked_positive(as_number(v, key), key);
    } else if (key == "cost_ood") {
      spec.base.cost.c_ood = checked_positive(as_number(v, key), key);
      saw_cood = true;
    } else if (key == "cost_ood_grid") {
      spec.cost_ood_grid = as_number_array(v, key);
      for (double c : spec.cost_ood_grid) checked_positive(c, key);
      saw_grid = true;
    } else if (key == "pool_size") {
      spec.base.benchmark.pool_size = as_count(v, key, 1);
    } else if (key == "num_classes") {
      spec.base.benchmark.num_classes = as_count(v, key, 2);
    } else if (key == "ood_clusters") {
      spec.base.benchmark.ood_clusters = as_count(v, key, 1);
    } else if (key == "cluster_radius") {
      spec.base.benchmark.cluster_radius =
          checked_positive(as_number(v, key), key);
    } else if (key == "in_std") {
      spec.base.benchmark.in_std = checked_nonnegative(as_number(v, key), key);
    } else if (key == "ood_std") {
      spec.base.benchmark.ood_std =
          checked_nonnegative(as_number(v, key), key);
    } else if (key == "class_share_decay") {
      const double d = as_number(v, key);
      if (!(d > 0.0 && d <= 1.0)) fail_key(key, "must be in (0, 1]");
      spec.base.benchmark.class_share_decay = d;
    } else if (key == "ood_ring_base") {
      spec.base.benchmark.ood_ring_base =
          checked_positive(as_number(v, key), key);
    } else if (key == "ood_ring_step") {
      spec.base.benchmark.ood_ring_step =
          checked_nonnegative(as_number(v, key), key);
    } else if (key == "ood_interior_share") {
      const double d = as_number(v, key);
      if (!(d > 0.0 && d <= 1.0)) fail_key(key, "must be in (0, 1]");
      spec.base.benchmark.ood_interior_share = d;
    } else if (key == "test_per_class") {
      spec.base.benchmark.test_per_class = as_count(v, key, 1);
    } else if (key == "meta_hidden_dim") {
      spec.base.meta_hidden_dim = as_count(v, key, 1);
    } else if (key == "meta_epochs") {
      spec.base.meta.epochs = as_count(v, key, 1);
    } else if (key == "meta_lr") {
      spec.base.meta.learning_rate = checked_positive(as_number(v, key), key);
    } else if (key == "meta_margin") {
      spec.base.meta.margin = checked_positive(as_number(v, key), key);
    } else if (key == "meta_pair_batch") {
      spec.base.meta.pair_batch_size = as_count(v, key, 1);
    } else if (key == "meta_lr_decay_factor") {
      const double f = as_number(v, key);
      if (!(f > 0.0 && f <= 1.0)) fail_key(key, "must be in (0, 1]");
      spec.base.meta.lr_decay_factor = f;
    } else if (key == "meta_lr_decay_at") {
      spec.base.meta.lr_decay_at_fraction =
          checked_unit_fraction(as_number(v, key), key);
    } else if (key == "strict_margin") {
      spec.base.meta.strict_margin = as_bool(v, key);
    } else if (key == "classifier_hidden") {
      spec.base.classifier_hidden = as_count(v, key, 1);
    } else if (key == "classifier_iterations") {
      spec.base.classifier_train.iterations = as_count(v, key, 0);
    } else if (key == "classifier_lr") {
      spec.base.classifier_train.learning_rate =
          checked_positive(as_number(v, key), key);
    } else if (key == "classifier_batch") {
      spec.base.classifier_train.batch_size = as_count(v, key, 1);
    } else if (key == "purity_source") {
      const std::string s = as_string(v, key);
      if (s != "energy" && s != "mahalanobis") {
        fail_key(key, "must be 'energy' or 'mahalanobis'");
      }
      spec.base.purity_source = s;
    } else if (key == "informativeness_source") {
      const std::string s = as_string(v, key);
      if (s != "entropy" && s != "confidence") {
        fail_key(key, "must be 'entropy' or 'confidence'");
      }
      spec.base.informativeness_source = s;
    } else if (key == "out_dir") {
      spec.out_dir = as_string(v, key);
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }

  // Scalar and list forms of the same knob stay consistent: an explicit list
  // wins for the sweep grid, an explicit scalar wins for the base config,
  // and whichever is missing is derived from the other.
  if (saw_strategies) {
    if (!saw_strategy) spec.base.strategy = spec.strategies.front();
  } else {
    spec.strategies = {spec.base.strategy};
  }
  if (saw_noises) {
    if (!saw_noise) spec.base.benchmark.noise_ratio = spec.noise_ratios.front();
  } else {
    spec.noise_ratios = {spec.base.benchmark.noise_ratio};
  }
  if (saw_grid) {
    if (!saw_cood) spec.base.cost.c_ood = spec.cost_ood_grid.front();
  } else {
    spec.cost_ood_grid = {spec.base.cost.c_ood};
  }
  if (saw_seeds) {
    if (!saw_seed) spec.base.seed = spec.seeds.front();
  } else {
    spec.seeds = {spec.base.seed};
  }
  return spec;
}

SweepSpec parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string run_csv_name(const std::string& strategy, double noise_ratio,
                         double cost_ood, std::uint64_t seed) {
  return "run_" + strategy + "_tau" + fmt_short(noise_ratio) + "_cood" +
         fmt_short(cost_ood) + "_seed" + std::to_string(seed) + ".csv";
}

void write_run_csv(const std::vector<RoundRecord>& records, double noise_ratio,
                   double cost_ood, std::uint64_t seed,
                   const std::string& path) {
  std::ofstream out = open_output(path);
  out << "round,strategy,noise_ratio,cost_ood,seed,test_accuracy,"
         "query_in_ratio,cost_spent,purity_auroc,pool_exhausted\n";
  for (const RoundRecord& r : records) {
    out << r.round_index << ',' << r.strategy_name << ','
        << fmt_double(noise_ratio) << ',' << fmt_double(cost_ood) << ','
        << seed << ',' << fmt_double(r.test_accuracy) << ','
        << fmt_double(r.query_in_ratio) << ',' << fmt_double(r.cost_spent)
        << ',';
    if (r.purity_auroc.has_value()) out << fmt_double(*r.purity_auroc);
    out << ',' << (r.pool_exhausted ? 1 : 0) << '\n';
  }
  if (!out.good()) throw std::runtime_error("failed while writing " + path);
}

std::vector<AggregateRow> run_sweep(const SweepSpec& spec) {
  if (spec.strategies.empty()) fail_key("strategies", "must be non-empty");
  if (spec.noise_ratios.empty()) fail_key("noise_ratios", "must be non-empty");
  if (spec.cost_ood_grid.empty()) {
    fail_key("cost_ood_grid", "must be non-empty");
  }
  if (spec.seeds.empty()) fail_key("seeds", "must be non-empty");

  namespace fs = std::filesystem;
  const fs::path dir = spec.out_dir.empty() ? fs::path(".")
                                            : fs::path(spec.out_dir);
  fs::create_directories(dir);

  std::vector<AggregateRow> rows;
  for (const std::string& strategy : spec.strategies) {
    for (double tau : spec.noise_ratios) {
      for (double cood : spec.cost_ood_grid) {
        std::vector<std::vector<RoundRecord>> completed;
        for (std::uint64_t seed : spec.seeds) {
          ExperimentConfig cfg = spec.base;
          cfg.strategy = strategy;
          cfg.benchmark.noise_ratio = tau;
          cfg.cost.c_ood = cood;
          cfg.seed = seed;
          try {
            ExperimentResult res = run_experiment(cfg);
            const fs::path file =
                dir / run_csv_name(strategy, tau, cood, seed);
            write_run_csv(res.records, tau, cood, seed, file.string());
            completed.push_back(std::move(res.records));
          } catch (const std::exception& e) {
            std::cerr << "sweep cell failed: strategy=" << strategy
                      << " noise_ratio=" << fmt_short(tau)
                      << " cost_ood=" << fmt_short(cood) << " seed=" << seed
                      << ": " << e.what() << '\n';
          }
        }
        if (completed.empty()) continue;
        const std::size_t rounds = completed.front().size();
        for (std::size_t r = 0; r < rounds; ++r) {
          AggregateRow row;
          row.strategy = strategy;
          row.noise_ratio = tau;
          row.cost_ood = cood;
          row.round = completed.front()[r].round_index;
          row.seed_count = completed.size();
          std::vector<double> acc, ratio, cost, auroc;
          for (const auto& recs : completed) {
            acc.push_back(recs[r].test_accuracy);
            ratio.push_back(recs[r].query_in_ratio);
            cost.push_back(recs[r].cost_spent);
            if (recs[r].purity_auroc.has_value()) {
              auroc.push_back(*recs[r].purity_auroc);
            }
          }
          const MeanStd a = mean_std(acc);
          row.acc_mean = a.mean;
          row.acc_std = a.std;
          const MeanStd q = mean_std(ratio);
          row.in_ratio_mean = q.mean;
          row.in_ratio_std = q.std;
          const MeanStd c = mean_std(cost);
          row.cost_mean = c.mean;
          row.cost_std = c.std;
          row.auroc_count = auroc.size();
          if (!auroc.empty()) {
            const MeanStd u = mean_std(auroc);
            row.auroc_mean = u.mean;
            row.auroc_std = u.std;
          }
          rows.push_back(std::move(row));
        }
      }
    }
  }

  std::ofstream out = open_output((dir / "aggregate.csv").string());
  out << "strategy,noise_ratio,cost_ood,round,seed_count,acc_mean,acc_std,"
         "in_ratio_mean,in_ratio_std,cost_mean,cost_std,auroc_count,"
         "auroc_mean,auroc_std\n";
  for (const AggregateRow& row : rows) {
    out << row.strategy << ',' << fmt_double(row.noise_ratio) << ','
        << fmt_double(row.cost_ood) << ',' << row.round << ','
        << row.seed_count << ',' << fmt_double(row.acc_mean) << ','
        << fmt_double(row.acc_std) << ',' << fmt_double(row.in_ratio_mean)
        << ',' << fmt_double(row.in_ratio_std) << ','
        << fmt_double(row.cost_mean) << ',' << fmt_double(row.cost_std) << ','
        << row.auroc_count << ',';
    if (row.auroc_count > 0) {
      out << fmt_double(row.auroc_mean) << ',' << fmt_double(row.auroc_std);
    } else {
      out << ',';
    }
    out << '\n';
  }
  if (!out.good()) {
    throw std::runtime_error("failed while writing aggregate.csv");
  }
  return rows;
}

void emit_score_grid(const MonotoneMlp& mlp, double lo, double hi,
                     std::size_t resolution, const std::string& path) {
  if (resolution < 2) {
    throw std::invalid_argument("resolution must be at least 2");
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo <= 0.0 || hi <= lo) {
    throw std::invalid_argument("grid range must satisfy 0 < lo < hi");
  }
  std::ofstream out = open_output(path);
  out << "informativeness,purity,score\n";
  const double step = (hi - lo) / static_cast<double>(resolution - 1);
  const auto grid_value = [&](std::size_t t) {
    return t + 1 == resolution ? hi : lo + step * static_cast<double>(t);
  };
  for (std::size_t pi = 0; pi < resolution; ++pi) {
    const double purity = grid_value(pi);
    for (std::size_t ii = 0; ii < resolution; ++ii) {
      const double info = grid_value(ii);
      const double score = forward(mlp, ScorePair(purity, info));
      out << fmt_double(info) << ',' << fmt_double(purity) << ','
          << fmt_double(score) << '\n';
    }
  }
  if (!out.good()) throw std::runtime_error("failed while writing " + path);
}

}  // namespace mqnet
