#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mqnet/al_simulator.hpp"
#include "mqnet/meta_scorer.hpp"

namespace mqnet {

// One sweep = the cross product of strategies x noise ratios x OOD costs x
// seeds, each cell a full run_experiment.
struct SweepSpec {
  ExperimentConfig base;
  std::vector<std::string> strategies{"mqnet"};
  std::vector<double> noise_ratios{0.2};
  std::vector<double> cost_ood_grid{1.0};
  std::vector<std::uint64_t> seeds{1};
  std::string out_dir;
};

// Mean and population std of every round metric across the seeds of a cell.
struct AggregateRow {
  std::string strategy;
  double noise_ratio = 0.0;
  double cost_ood = 0.0;
  std::size_t round = 0;
  std::size_t seed_count = 0;
  double acc_mean = 0.0;
  double acc_std = 0.0;
  double in_ratio_mean = 0.0;
  double in_ratio_std = 0.0;
  double cost_mean = 0.0;
  double cost_std = 0.0;
  std::size_t auroc_count = 0;  // rounds carrying an AUROC value
  double auroc_mean = 0.0;
  double auroc_std = 0.0;
};

/*!
 * Reads a flat JSON object into a SweepSpec. Scalar keys fill the base
 * config and collapse the matching sweep list to one entry; plural keys
 * (strategies, noise_ratios, cost_ood_grid, seeds) define the grid. Unknown
 * keys and out-of-range values raise errors naming the key.
 */
SweepSpec parse_config_file(const std::string& path);

// Same parsing applied to an in-memory JSON string.
SweepSpec parse_config_text(const std::string& text);

// Deterministic cell file name, e.g. run_mqnet_tau0.2_cood1_seed3.csv.
std::string run_csv_name(const std::string& strategy, double noise_ratio,
                         double cost_ood, std::uint64_t seed);

// Per-round CSV for a single run. Columns: round, strategy, noise_ratio,
// cost_ood, seed, test_accuracy, query_in_ratio, cost_spent, purity_auroc
// (empty when absent), pool_exhausted. Doubles print as %.17g.
void write_run_csv(const std::vector<RoundRecord>& records, double noise_ratio,
                   double cost_ood, std::uint64_t seed,
                   const std::string& path);

/*!
 * Runs every cell in spec order, writing one CSV per run plus aggregate.csv
 * into spec.out_dir. A failing cell is reported on stderr and skipped; its
 * seeds are simply missing from the aggregate. Returns the aggregate rows.
 */
std::vector<AggregateRow> run_sweep(const SweepSpec& spec);

/*!
 * Evaluates forward() on a uniform resolution x resolution grid over
 * [lo, hi]^2 and writes informativeness,purity,score rows, informativeness
 * varying fastest. Requires 0 < lo < hi and resolution >= 2.
 */
void emit_score_grid(const MonotoneMlp& mlp, double lo, double hi,
                     std::size_t resolution, const std::string& path);

}  // namespace mqnet
