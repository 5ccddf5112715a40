#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mqnet/experiment.hpp"

namespace {

// Flag overrides shared by `run` and `sweep`. Option pointers let us tell
// "flag given" apart from the default value.
struct SharedFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string strategy;
  double noise_ratio = 0.0;
  double budget = 0.0;
  std::size_t rounds = 0;
  double cost_ood = 0.0;
  bool strict_margin = false;
  CLI::Option* opt_seed = nullptr;
  CLI::Option* opt_strategy = nullptr;
  CLI::Option* opt_noise = nullptr;
  CLI::Option* opt_budget = nullptr;
  CLI::Option* opt_rounds = nullptr;
  CLI::Option* opt_cood = nullptr;
};

void add_shared(CLI::App* sub, SharedFlags& f) {
  sub->add_option("--config", f.config_path, "JSON config file");
  f.opt_seed = sub->add_option("--seed", f.seed, "Base RNG seed");
  f.opt_strategy = sub->add_option("--strategy", f.strategy, "Query strategy");
  f.opt_noise = sub->add_option("--noise-ratio", f.noise_ratio,
                                "Open-set noise ratio in [0, 1)");
  f.opt_budget =
      sub->add_option("--budget", f.budget, "Per-round labeling budget");
  f.opt_rounds =
      sub->add_option("--rounds", f.rounds, "Number of query rounds");
  f.opt_cood = sub->add_option("--cost-ood", f.cost_ood,
                               "Labeling cost of an OOD example");
  sub->add_option("--out", f.out_dir, "Output directory");
  sub->add_flag("--strict-margin", f.strict_margin,
                "Use the enforcing ranking margin");
}

// A flag overrides both the base config and the matching sweep list.
mqnet::SweepSpec load_spec(const SharedFlags& f) {
  mqnet::SweepSpec spec = f.config_path.empty()
                              ? mqnet::SweepSpec{}
                              : mqnet::parse_config_file(f.config_path);
  if (f.opt_seed->count() > 0) {
    spec.base.seed = f.seed;
    spec.seeds = {f.seed};
  }
  if (f.opt_strategy->count() > 0) {
    spec.base.strategy = f.strategy;
    spec.strategies = {f.strategy};
  }
  if (f.opt_noise->count() > 0) {
    spec.base.benchmark.noise_ratio = f.noise_ratio;
    spec.noise_ratios = {f.noise_ratio};
  }
  if (f.opt_budget->count() > 0) spec.base.budget = f.budget;
  if (f.opt_rounds->count() > 0) spec.base.rounds = f.rounds;
  if (f.opt_cood->count() > 0) {
    spec.base.cost.c_ood = f.cost_ood;
    spec.cost_ood_grid = {f.cost_ood};
  }
  if (f.strict_margin) spec.base.meta.strict_margin = true;
  return spec;
}

// --out beats the config, the config beats MQNET_OUT_DIR, then ./out.
std::string resolve_out_dir(const std::string& cli_out,
                            const std::string& config_out) {
  if (!cli_out.empty()) return cli_out;
  if (!config_out.empty()) return config_out;
  if (const char* env = std::getenv("MQNET_OUT_DIR");
      env != nullptr && *env != '\0') {
    return env;
  }
  return "./out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Skyline-constrained meta-query scoring for open-set active learning"};
  app.require_subcommand(1);

  SharedFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand(
      "run", "Run a single experiment and write its per-round CSV");
  add_shared(run_cmd, run_flags);

  SharedFlags sweep_flags;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Run the strategy x noise x cost x seed grid");
  add_shared(sweep_cmd, sweep_flags);

  std::string model_path;
  std::string grid_out;
  double grid_lo = 0.05;
  double grid_hi = std::exp(2.0);
  std::size_t grid_res = 50;
  CLI::App* grid_cmd = app.add_subcommand(
      "grid", "Evaluate a saved meta-model on a uniform score grid");
  grid_cmd->add_option("--model", model_path, "Meta-model checkpoint")
      ->required();
  grid_cmd->add_option("--lo", grid_lo, "Grid lower bound (> 0)");
  grid_cmd->add_option("--hi", grid_hi, "Grid upper bound");
  grid_cmd->add_option("--resolution", grid_res, "Grid points per axis");
  grid_cmd->add_option("--out", grid_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    namespace fs = std::filesystem;
    if (run_cmd->parsed()) {
      const mqnet::SweepSpec spec = load_spec(run_flags);
      const fs::path dir = resolve_out_dir(run_flags.out_dir, spec.out_dir);
      fs::create_directories(dir);
      const mqnet::ExperimentResult res = mqnet::run_experiment(spec.base);
      const fs::path csv =
          dir / mqnet::run_csv_name(spec.base.strategy,
                                    spec.base.benchmark.noise_ratio,
                                    spec.base.cost.c_ood, spec.base.seed);
      mqnet::write_run_csv(res.records, spec.base.benchmark.noise_ratio,
                           spec.base.cost.c_ood, spec.base.seed, csv.string());
      std::cout << "wrote " << csv.string() << " (final accuracy "
                << res.records.back().test_accuracy << ")\n";
      if (spec.base.strategy == "mqnet") {
        const fs::path ckpt = dir / "meta_model.bin";
        mqnet::save_checkpoint(res.meta_model, ckpt.string());
        std::cout << "wrote " << ckpt.string() << '\n';
      }
    } else if (sweep_cmd->parsed()) {
      mqnet::SweepSpec spec = load_spec(sweep_flags);
      spec.out_dir = resolve_out_dir(sweep_flags.out_dir, spec.out_dir);
      const std::vector<mqnet::AggregateRow> rows = mqnet::run_sweep(spec);
      std::cout << "wrote aggregate.csv (" << rows.size() << " rows) to "
                << spec.out_dir << '\n';
    } else {
      const mqnet::MonotoneMlp mlp = mqnet::load_checkpoint(model_path);
      const fs::path dir = resolve_out_dir(grid_out, "");
      fs::create_directories(dir);
      const fs::path csv = dir / "score_grid.csv";
      mqnet::emit_score_grid(mlp, grid_lo, grid_hi, grid_res, csv.string());
      std::cout << "wrote " << csv.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
