#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mqnet/meta_scorer.hpp"
#include "mqnet/rng.hpp"
#include "mqnet/score_conversion.hpp"
#include "mqnet/target_model.hpp"

namespace mqnet {

// Pool unit. class_label and is_in are ground truth; selection strategies
// only ever look at id and features, the rest is revealed through the oracle.
struct Example {
  int id = 0;
  std::vector<double> features;
  int class_label = -1;  // meaningful only when is_in
  bool is_in = false;
};

struct CostModel {
  double c_in = 1.0;
  double c_ood = 1.0;
};

struct LabeledExample {
  Example example;
  int label = 0;
};

// Labeled IN examples plus examples marked as open-set noise.
struct LabeledSet {
  std::vector<LabeledExample> in_items;
  std::vector<Example> ood_items;

  std::size_t size() const { return in_items.size() + ood_items.size(); }
};

struct RoundRecord {
  std::size_t round_index = 0;
  double test_accuracy = 0.0;
  double query_in_ratio = 0.0;
  double cost_spent = 0.0;
  // Absent when the pool holds a single class (e.g. noise_ratio 0).
  std::optional<double> purity_auroc;
  bool pool_exhausted = false;
  std::string strategy_name;
};

struct TruthEntry {
  bool is_in = false;
  int class_label = -1;
};

// Output of generate_benchmark: the unlabeled pool, a fresh IN-only test
// set, and the ground-truth table indexed by example id.
struct Benchmark {
  std::vector<Example> pool;
  std::vector<LabeledFeature> test_set;
  std::vector<TruthEntry> truth;
};

struct OracleOutcome {
  bool is_in = false;
  int label = -1;  // valid only when is_in
  double cost = 0.0;
};

// Stateful labeler: reveals ground truth at a cost and rejects double labels.
class Oracle {
 public:
  explicit Oracle(const std::vector<TruthEntry>& truth);

  OracleOutcome label(const Example& example, const CostModel& cost);
  bool is_labeled(int id) const;
  std::size_t labeled_count() const { return labeled_count_; }

 private:
  std::vector<TruthEntry> truth_;
  std::vector<bool> labeled_;
  std::size_t labeled_count_ = 0;
};

struct BenchmarkConfig {
  std::size_t pool_size = 600;
  std::size_t num_classes = 4;
  std::size_t ood_clusters = 8;
  double noise_ratio = 0.2;
  double cluster_radius = 4.0;
  // 0 means auto: in_std from the neighboring-cluster gap, ood_std a
  // fraction of in_std. The default matches num_classes=4 on radius 4,
  // where neighboring clusters overlap by roughly 8%.
  double in_std = 2.0;
  double ood_std = 0.0;
  // Pool share of IN class c is proportional to decay^c, so the last class
  // is rare and labels keep their marginal value; 1 means balanced.
  double class_share_decay = 0.5;
  // OOD ring j sits at radius * (base + step * j). The first ring lies
  // deep between the IN means, where every class competes and the
  // classifier stays maximally uncertain; later rings move outward past
  // the circle. ood_interior_share is the fraction of OOD examples placed
  // on the first ring; the rest spread over the outer rings.
  double ood_ring_base = 0.5;
  double ood_ring_step = 0.55;
  double ood_interior_share = 0.75;
  std::size_t test_per_class = 500;
};

/*!
 * Synthetic open-set benchmark. num_classes isotropic Gaussian IN clusters
 * sit equally spaced on a circle; OOD clusters sit on the mid-angles between
 * them, the first ring well inside the circle, further rings beyond it. The
 * pool holds ceil(noise_ratio * pool_size) OOD examples, ids carry no class
 * information, and the test set is IN-only and freshly drawn.
 */
Benchmark generate_benchmark(const BenchmarkConfig& cfg, std::uint64_t seed);

struct SelectionResult {
  LabeledSet query;
  bool pool_exhausted = false;
};

/*!
 * Uniform random labeling until the accumulated cost reaches budget, with
 * the same stopping rule as select_queries. Selected examples are removed
 * from the pool. Throws when the pool empties before the budget is met.
 */
LabeledSet initial_labeled(std::vector<Example>& pool, double budget,
                           const CostModel& cost, Oracle& oracle, Rng& rng);

double query_cost(const LabeledSet& set, const CostModel& cost);

using ScoreFn = std::function<double(const Example&)>;

/*!
 * Budgeted greedy selection: repeatedly labels the highest-scoring pool
 * example (ties to the lowest id) and stops before the query that would
 * start with accumulated cost >= budget. Under unit costs this selects
 * exactly `budget` items. Selected examples are removed from the pool;
 * pool_exhausted is set when the pool emptied with the budget unmet.
 */
SelectionResult select_queries(const ScoreFn& score_fn,
                               std::vector<Example>& pool, double budget,
                               const CostModel& cost, Oracle& oracle);

// Round 1 falls back to purity + informativeness; later rounds score through
// the meta-model.
ScoreFn mqnet_scores(std::size_t round_index, const MonotoneMlp& mlp,
                     const std::unordered_map<int, ScorePair>& score_pairs);

/*!
 * Static scoring baselines: random, conf, linear, product, purity_only,
 * info_only. coreset is stateful and lives in select_coreset_queries;
 * requesting it here (or anything unknown) throws.
 */
ScoreFn baseline_scores(const std::string& strategy, const Classifier& clf,
                        const std::vector<Example>& pool,
                        const std::unordered_map<int, ScorePair>& score_pairs,
                        Rng& rng);

/*!
 * k-center greedy in penultimate-feature space: each step picks the pool
 * example farthest from the labeled-so-far plus already-selected centers,
 * under the same stopping rule as select_queries.
 */
SelectionResult select_coreset_queries(const Classifier& clf,
                                       std::vector<Example>& pool,
                                       const LabeledSet& labeled, double budget,
                                       const CostModel& cost, Oracle& oracle);

// Fraction of IN examples in a query set; empty set is an error.
double in_ratio(const LabeledSet& query);

/*!
 * Probability that a random positive outranks a random negative, ties
 * counted half. Computed from average ranks; exactly equal to the all-pairs
 * count. Needs both classes.
 */
double auroc(const std::vector<double>& scores,
             const std::vector<bool>& is_positive);

struct ExperimentConfig {
  std::size_t rounds = 10;
  double budget = 30.0;
  std::uint64_t seed = 1;
  std::string strategy = "mqnet";
  CostModel cost;
  BenchmarkConfig benchmark;
  MetaTrainConfig meta;
  std::size_t meta_hidden_dim = 64;
  TrainConfig classifier_train;
  std::size_t classifier_hidden = 32;
  std::string purity_source = "energy";          // or "mahalanobis"
  std::string informativeness_source = "entropy";  // or "confidence"
};

// Per-round view for instrumentation; all references die with the call.
struct RoundTelemetry {
  std::size_t round_index = 0;
  const LabeledSet& query;
  const std::vector<SelfValItem>& self_val;
  const Classifier& classifier;
  std::size_t pool_remaining = 0;
  std::size_t labeled_total = 0;
  std::size_t ood_examples_in_training = 0;
};

using RoundObserver = std::function<void(const RoundTelemetry&)>;

struct ExperimentResult {
  std::vector<RoundRecord> records;
  MonotoneMlp meta_model;
};

/*!
 * Full open-set AL loop: initial random labeling, then per round a freshly
 * initialized classifier trained on the labeled IN examples, per-pool purity
 * and informativeness scores under that round's normalization statistics,
 * budgeted selection by the configured strategy, and (for mqnet) meta-model
 * training on the fresh query set. Deterministic per config and seed.
 */
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const RoundObserver& observer = {});

}  // namespace mqnet
