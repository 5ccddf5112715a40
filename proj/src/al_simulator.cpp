#include "mqnet/al_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace mqnet {

namespace {

constexpr std::size_t kFeatureDim = 2;
constexpr double kPi = 3.14159265358979323846;

void validate_benchmark_config(const BenchmarkConfig& cfg) {
  if (!(cfg.noise_ratio >= 0.0) || cfg.noise_ratio >= 1.0) {
    throw std::invalid_argument("noise_ratio must be in [0,1)");
  }
  if (cfg.pool_size == 0) {
    throw std::invalid_argument("pool_size must be positive");
  }
  if (cfg.num_classes < 2) {
    throw std::invalid_argument("num_classes must be at least 2");
  }
  if (cfg.ood_clusters == 0) {
    throw std::invalid_argument("ood_clusters must be positive");
  }
  if (!(cfg.cluster_radius > 0.0)) {
    throw std::invalid_argument("cluster_radius must be positive");
  }
  if (cfg.in_std < 0.0 || cfg.ood_std < 0.0) {
    throw std::invalid_argument("cluster spreads must be nonnegative");
  }
  if (!(cfg.class_share_decay > 0.0 && cfg.class_share_decay <= 1.0)) {
    throw std::invalid_argument("class_share_decay must be in (0, 1]");
  }
  if (!(cfg.ood_ring_base > 0.0)) {
    throw std::invalid_argument("ood_ring_base must be positive");
  }
  if (cfg.ood_ring_step < 0.0) {
    throw std::invalid_argument("ood_ring_step must be nonnegative");
  }
  if (!(cfg.ood_interior_share > 0.0 && cfg.ood_interior_share <= 1.0)) {
    throw std::invalid_argument("ood_interior_share must be in (0, 1]");
  }
  if (cfg.test_per_class == 0) {
    throw std::invalid_argument("test_per_class must be positive");
  }
}

// Largest-remainder split of n_in across classes with shares decay^c.
std::vector<std::size_t> class_counts(std::size_t n_in, std::size_t k,
                                      double decay) {
  std::vector<double> weight(k);
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    weight[c] = std::pow(decay, static_cast<double>(c));
    total += weight[c];
  }
  std::vector<std::size_t> counts(k);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < k; ++c) {
    counts[c] = static_cast<std::size_t>(
        std::floor(static_cast<double>(n_in) * weight[c] / total));
    assigned += counts[c];
  }
  // Remainder goes to the largest classes first; deterministic.
  for (std::size_t c = 0; assigned < n_in; c = (c + 1) % k) {
    ++counts[c];
    ++assigned;
  }
  return counts;
}

void validate_cost(const CostModel& cost) {
  if (!(cost.c_in > 0.0) || !(cost.c_ood > 0.0)) {
    throw std::invalid_argument("labeling costs must be positive");
  }
}

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

// Moves the labeled outcome into the query set.
void absorb(LabeledSet& query, const Example& ex, const OracleOutcome& out) {
  if (out.is_in) {
    query.in_items.push_back(LabeledExample{ex, out.label});
  } else {
    query.ood_items.push_back(ex);
  }
}

void erase_selected(std::vector<Example>& pool,
                    const std::vector<bool>& selected) {
  std::size_t keep = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!selected[i]) {
      if (keep != i) pool[keep] = std::move(pool[i]);
      ++keep;
    }
  }
  pool.resize(keep);
}

}  // namespace

Oracle::Oracle(const std::vector<TruthEntry>& truth)
    : truth_(truth), labeled_(truth.size(), false) {}

OracleOutcome Oracle::label(const Example& example, const CostModel& cost) {
  validate_cost(cost);
  if (example.id < 0 ||
      static_cast<std::size_t>(example.id) >= truth_.size()) {
    throw std::invalid_argument("unknown example id: " +
                                std::to_string(example.id));
  }
  const std::size_t id = static_cast<std::size_t>(example.id);
  if (labeled_[id]) {
    throw std::invalid_argument("example already labeled: " +
                                std::to_string(example.id));
  }
  labeled_[id] = true;
  ++labeled_count_;
  const TruthEntry& t = truth_[id];
  if (t.is_in) return OracleOutcome{true, t.class_label, cost.c_in};
  return OracleOutcome{false, -1, cost.c_ood};
}

bool Oracle::is_labeled(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= labeled_.size()) return false;
  return labeled_[static_cast<std::size_t>(id)];
}

Benchmark generate_benchmark(const BenchmarkConfig& cfg, std::uint64_t seed) {
  validate_benchmark_config(cfg);
  const std::size_t k = cfg.num_classes;
  const std::size_t n_ood = static_cast<std::size_t>(
      std::ceil(cfg.noise_ratio * static_cast<double>(cfg.pool_size)));
  const std::size_t n_in = cfg.pool_size - n_ood;

  const double rho = cfg.cluster_radius;
  // Neighboring IN means sit 2 rho sin(pi/k) apart; a spread of gap/3.2
  // leaves roughly 5-10% of each cluster inside its neighbor's territory.
  const double gap = 2.0 * rho * std::sin(kPi / static_cast<double>(k));
  const double in_std = cfg.in_std > 0.0 ? cfg.in_std : gap / 3.2;
  const double ood_std = cfg.ood_std > 0.0 ? cfg.ood_std : 0.25 * in_std;

  std::vector<std::vector<double>> in_means(k);
  for (std::size_t c = 0; c < k; ++c) {
    const double a = 2.0 * kPi * static_cast<double>(c) / static_cast<double>(k);
    in_means[c] = {rho * std::cos(a), rho * std::sin(a)};
  }
  // OOD centers occupy the mid-angles between IN means; the first wheel of
  // num_classes clusters sits on the interior side where every class
  // competes, each further wheel moves outward past the circle.
  std::vector<std::vector<double>> ood_means(cfg.ood_clusters);
  for (std::size_t j = 0; j < cfg.ood_clusters; ++j) {
    const std::size_t slot = j % k;
    const std::size_t ring = j / k;
    const double a = 2.0 * kPi * (static_cast<double>(slot) + 0.5) /
                     static_cast<double>(k);
    const double r =
        rho * (cfg.ood_ring_base + cfg.ood_ring_step * static_cast<double>(ring));
    ood_means[j] = {r * std::cos(a), r * std::sin(a)};
  }

  // Cluster markers are laid out round-robin and then shuffled so that ids
  // carry no information about class or IN/OOD identity.
  struct Marker {
    bool is_in;
    std::size_t cluster;
  };
  std::vector<Marker> markers;
  markers.reserve(cfg.pool_size);
  const std::vector<std::size_t> per_class =
      class_counts(n_in, k, cfg.class_share_decay);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < per_class[c]; ++i) markers.push_back({true, c});
  }
  const std::size_t interior_clusters = std::min(k, cfg.ood_clusters);
  const std::size_t outer_clusters = cfg.ood_clusters - interior_clusters;
  const std::size_t n_interior =
      outer_clusters == 0
          ? n_ood
          : std::min(n_ood, static_cast<std::size_t>(std::floor(
                                cfg.ood_interior_share *
                                    static_cast<double>(n_ood) +
                                0.5)));
  for (std::size_t i = 0; i < n_interior; ++i) {
    markers.push_back({false, i % interior_clusters});
  }
  for (std::size_t i = 0; i < n_ood - n_interior; ++i) {
    markers.push_back({false, interior_clusters + i % outer_clusters});
  }
  Rng marker_rng(derive_seed(seed, 1));
  marker_rng.shuffle(markers);

  Benchmark bench;
  bench.pool.reserve(cfg.pool_size);
  bench.truth.resize(cfg.pool_size);
  Rng feat_rng(derive_seed(seed, 2));
  for (std::size_t id = 0; id < cfg.pool_size; ++id) {
    const Marker& m = markers[id];
    const std::vector<double>& mu = m.is_in ? in_means[m.cluster]
                                            : ood_means[m.cluster];
    const double sd = m.is_in ? in_std : ood_std;
    Example ex;
    ex.id = static_cast<int>(id);
    ex.features = {mu[0] + feat_rng.normal(0.0, sd),
                   mu[1] + feat_rng.normal(0.0, sd)};
    ex.is_in = m.is_in;
    ex.class_label = m.is_in ? static_cast<int>(m.cluster) : -1;
    bench.truth[id] = TruthEntry{m.is_in, ex.class_label};
    bench.pool.push_back(std::move(ex));
  }

  Rng test_rng(derive_seed(seed, 3));
  bench.test_set.reserve(cfg.test_per_class * k);
  for (std::size_t t = 0; t < cfg.test_per_class * k; ++t) {
    const std::size_t c = t % k;
    bench.test_set.push_back(
        LabeledFeature{{in_means[c][0] + test_rng.normal(0.0, in_std),
                        in_means[c][1] + test_rng.normal(0.0, in_std)},
                       static_cast<int>(c)});
  }
  return bench;
}

LabeledSet initial_labeled(std::vector<Example>& pool, double budget,
                           const CostModel& cost, Oracle& oracle, Rng& rng) {
  if (pool.empty()) throw std::invalid_argument("empty pool");
  if (!(budget > 0.0)) throw std::invalid_argument("budget must be positive");
  validate_cost(cost);

  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);

  LabeledSet labeled;
  std::vector<bool> selected(pool.size(), false);
  double accumulated = 0.0;
  for (std::size_t pos : order) {
    if (accumulated >= budget) break;
    const OracleOutcome out = oracle.label(pool[pos], cost);
    absorb(labeled, pool[pos], out);
    selected[pos] = true;
    accumulated += out.cost;
  }
  if (accumulated < budget) {
    throw std::runtime_error("pool exhausted before the initial budget was met");
  }
  erase_selected(pool, selected);
  return labeled;
}

double query_cost(const LabeledSet& set, const CostModel& cost) {
  return static_cast<double>(set.in_items.size()) * cost.c_in +
         static_cast<double>(set.ood_items.size()) * cost.c_ood;
}

SelectionResult select_queries(const ScoreFn& score_fn,
                               std::vector<Example>& pool, double budget,
                               const CostModel& cost, Oracle& oracle) {
  if (pool.empty()) throw std::invalid_argument("empty pool");
  if (!(budget > 0.0)) throw std::invalid_argument("budget must be positive");
  validate_cost(cost);

  // Scores are fixed for the round, so the greedy argmax sequence is the
  // score-descending, id-ascending order.
  struct Scored {
    double score;
    int id;
    std::size_t pos;
  };
  std::vector<Scored> ranked;
  ranked.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    ranked.push_back(Scored{score_fn(pool[i]), pool[i].id, i});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });

  SelectionResult result;
  std::vector<bool> selected(pool.size(), false);
  double accumulated = 0.0;
  bool budget_met = false;
  for (const Scored& cand : ranked) {
    if (accumulated >= budget) {
      budget_met = true;
      break;
    }
    const OracleOutcome out = oracle.label(pool[cand.pos], cost);
    absorb(result.query, pool[cand.pos], out);
    selected[cand.pos] = true;
    accumulated += out.cost;
  }
  result.pool_exhausted = !budget_met && accumulated < budget;
  erase_selected(pool, selected);
  return result;
}

ScoreFn mqnet_scores(std::size_t round_index, const MonotoneMlp& mlp,
                     const std::unordered_map<int, ScorePair>& score_pairs) {
  if (round_index == 0) {
    throw std::invalid_argument("round_index is 1-based");
  }
  if (round_index == 1) {
    return [score_pairs](const Example& ex) {
      const ScorePair& z = score_pairs.at(ex.id);
      return z.purity + z.informativeness;
    };
  }
  return [mlp, score_pairs](const Example& ex) {
    return forward(mlp, score_pairs.at(ex.id));
  };
}

ScoreFn baseline_scores(const std::string& strategy, const Classifier& clf,
                        const std::vector<Example>& pool,
                        const std::unordered_map<int, ScorePair>& score_pairs,
                        Rng& rng) {
  if (strategy == "random") {
    std::unordered_map<int, double> scores;
    scores.reserve(pool.size());
    for (const Example& ex : pool) scores.emplace(ex.id, rng.uniform());
    return [scores](const Example& ex) { return scores.at(ex.id); };
  }
  if (strategy == "conf") {
    std::unordered_map<int, double> scores;
    scores.reserve(pool.size());
    for (const Example& ex : pool) {
      scores.emplace(ex.id, confidence_q(probs(clf, ex.features)));
    }
    return [scores](const Example& ex) { return scores.at(ex.id); };
  }
  if (strategy == "linear") {
    return [score_pairs](const Example& ex) {
      const ScorePair& z = score_pairs.at(ex.id);
      return z.purity + z.informativeness;
    };
  }
  if (strategy == "product") {
    return [score_pairs](const Example& ex) {
      const ScorePair& z = score_pairs.at(ex.id);
      return z.purity * z.informativeness;
    };
  }
  if (strategy == "purity_only") {
    return [score_pairs](const Example& ex) {
      return score_pairs.at(ex.id).purity;
    };
  }
  if (strategy == "info_only") {
    return [score_pairs](const Example& ex) {
      return score_pairs.at(ex.id).informativeness;
    };
  }
  if (strategy == "coreset") {
    throw std::invalid_argument(
        "coreset requires stateful selection; use select_coreset_queries");
  }
  throw std::invalid_argument("unknown strategy: " + strategy);
}

SelectionResult select_coreset_queries(const Classifier& clf,
                                       std::vector<Example>& pool,
                                       const LabeledSet& labeled, double budget,
                                       const CostModel& cost, Oracle& oracle) {
  if (pool.empty()) throw std::invalid_argument("empty pool");
  if (!(budget > 0.0)) throw std::invalid_argument("budget must be positive");
  validate_cost(cost);

  std::vector<std::vector<double>> feats(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    feats[i] = penultimate_features(clf, pool[i].features);
  }
  // Coverage distance to every already-labeled center, IN and OOD alike.
  std::vector<double> min_dist(pool.size(),
                               std::numeric_limits<double>::infinity());
  const auto tighten = [&](const std::vector<double>& center) {
    for (std::size_t i = 0; i < pool.size(); ++i) {
      min_dist[i] = std::min(min_dist[i], euclidean(feats[i], center));
    }
  };
  for (const LabeledExample& it : labeled.in_items) {
    tighten(penultimate_features(clf, it.example.features));
  }
  for (const Example& it : labeled.ood_items) {
    tighten(penultimate_features(clf, it.features));
  }

  SelectionResult result;
  std::vector<bool> selected(pool.size(), false);
  double accumulated = 0.0;
  std::size_t remaining = pool.size();
  bool budget_met = false;
  while (remaining > 0) {
    if (accumulated >= budget) {
      budget_met = true;
      break;
    }
    std::size_t best = pool.size();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (selected[i]) continue;
      if (best == pool.size() || min_dist[i] > min_dist[best] ||
          (min_dist[i] == min_dist[best] && pool[i].id < pool[best].id)) {
        best = i;
      }
    }
    const OracleOutcome out = oracle.label(pool[best], cost);
    absorb(result.query, pool[best], out);
    selected[best] = true;
    --remaining;
    accumulated += out.cost;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (!selected[i]) {
        min_dist[i] = std::min(min_dist[i], euclidean(feats[i], feats[best]));
      }
    }
  }
  result.pool_exhausted = !budget_met && accumulated < budget;
  erase_selected(pool, selected);
  return result;
}

double in_ratio(const LabeledSet& query) {
  const std::size_t total = query.size();
  if (total == 0) throw std::invalid_argument("empty query set");
  return static_cast<double>(query.in_items.size()) /
         static_cast<double>(total);
}

double auroc(const std::vector<double>& scores,
             const std::vector<bool>& is_positive) {
  if (scores.size() != is_positive.size()) {
    throw std::invalid_argument("scores and labels must align");
  }
  std::size_t n_pos = 0;
  for (bool b : is_positive) n_pos += b ? 1 : 0;
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument(
        "auroc requires both positive and negative labels");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  // Average ranks over tie groups; every rank is an exact multiple of 0.5,
  // so the rank sum reproduces the all-pairs count bit for bit.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() &&
           scores[order[j + 1]] == scores[order[i]]) {
      ++j;
    }
    const double avg_rank =
        0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) {
      if (is_positive[order[k]]) rank_sum_pos += avg_rank;
    }
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const RoundObserver& observer) {
  if (cfg.rounds == 0) throw std::invalid_argument("rounds must be positive");
  if (!(cfg.budget > 0.0)) {
    throw std::invalid_argument("budget must be positive");
  }
  validate_cost(cfg.cost);
  validate_benchmark_config(cfg.benchmark);
  if (cfg.meta_hidden_dim == 0) {
    throw std::invalid_argument("meta_hidden_dim must be positive");
  }
  if (cfg.classifier_hidden == 0) {
    throw std::invalid_argument("classifier_hidden must be positive");
  }
  static const std::vector<std::string> kStrategies{
      "mqnet", "random", "conf", "coreset",
      "linear", "product", "purity_only", "info_only"};
  if (std::find(kStrategies.begin(), kStrategies.end(), cfg.strategy) ==
      kStrategies.end()) {
    throw std::invalid_argument("unknown strategy: " + cfg.strategy);
  }
  if (cfg.purity_source != "energy" && cfg.purity_source != "mahalanobis") {
    throw std::invalid_argument("unknown purity source: " + cfg.purity_source);
  }
  if (cfg.informativeness_source != "entropy" &&
      cfg.informativeness_source != "confidence") {
    throw std::invalid_argument("unknown informativeness source: " +
                                cfg.informativeness_source);
  }
  {
    const std::size_t n_ood = static_cast<std::size_t>(std::ceil(
        cfg.benchmark.noise_ratio * static_cast<double>(cfg.benchmark.pool_size)));
    const std::size_t n_in = cfg.benchmark.pool_size - n_ood;
    const double total_cost = static_cast<double>(n_in) * cfg.cost.c_in +
                              static_cast<double>(n_ood) * cfg.cost.c_ood;
    if (cfg.budget > total_cost) {
      throw std::invalid_argument("budget exceeds total pool cost");
    }
  }

  Benchmark bench = generate_benchmark(cfg.benchmark, cfg.seed);
  Oracle oracle(bench.truth);
  std::vector<Example> pool = std::move(bench.pool);

  Rng init_rng(derive_seed(cfg.seed, 10));
  Rng meta_init_rng(derive_seed(cfg.seed, 11));
  Rng meta_train_rng(derive_seed(cfg.seed, 12));
  Rng clf_rng(derive_seed(cfg.seed, 13));
  Rng baseline_rng(derive_seed(cfg.seed, 14));

  LabeledSet labeled =
      initial_labeled(pool, cfg.budget, cfg.cost, oracle, init_rng);
  MonotoneMlp mlp = init_monotone_mlp(cfg.meta_hidden_dim, meta_init_rng);

  ExperimentResult result;
  result.records.reserve(cfg.rounds);
  for (std::size_t round = 1; round <= cfg.rounds; ++round) {
    if (pool.empty()) {
      throw std::runtime_error("pool exhausted before round " +
                               std::to_string(round));
    }
    // Fresh classifier each round, trained on the labeled IN examples only.
    std::vector<LabeledFeature> train_set;
    train_set.reserve(labeled.in_items.size());
    std::size_t ood_in_training = 0;
    for (const LabeledExample& it : labeled.in_items) {
      if (!bench.truth[static_cast<std::size_t>(it.example.id)].is_in) {
        ++ood_in_training;
      }
      train_set.push_back(LabeledFeature{it.example.features, it.label});
    }
    Classifier clf = init_classifier(
        ClassifierDims{kFeatureDim, cfg.classifier_hidden,
                       cfg.benchmark.num_classes},
        derive_seed(cfg.seed, 1000 + round));
    clf = train_classifier(clf, train_set, cfg.classifier_train, clf_rng);
    const double acc = test_accuracy(clf, bench.test_set);

    // Per-round conversion statistics over the current unlabeled pool.
    std::vector<double> ood_scores(pool.size());
    std::vector<double> q_scores(pool.size());
    const bool use_mahalanobis = cfg.purity_source == "mahalanobis";
    ClassGaussianStats gauss;
    if (use_mahalanobis) {
      std::vector<std::vector<double>> feats;
      std::vector<int> labels;
      feats.reserve(labeled.in_items.size());
      labels.reserve(labeled.in_items.size());
      for (const LabeledExample& it : labeled.in_items) {
        feats.push_back(penultimate_features(clf, it.example.features));
        labels.push_back(it.label);
      }
      gauss = fit_class_gaussian_stats(feats, labels);
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (use_mahalanobis) {
        ood_scores[i] = mahalanobis_ood_score(
            penultimate_features(clf, pool[i].features), gauss);
      } else {
        ood_scores[i] = energy_ood_score(logits(clf, pool[i].features), 1.0);
      }
      const std::vector<double> p = probs(clf, pool[i].features);
      q_scores[i] = cfg.informativeness_source == "confidence"
                        ? confidence_q(p)
                        : entropy_q(p);
    }
    std::vector<double> negated(ood_scores.size());
    for (std::size_t i = 0; i < ood_scores.size(); ++i) {
      negated[i] = -ood_scores[i];
    }
    const NormStats stats_neg_o = compute_norm_stats(negated);
    const NormStats stats_q = compute_norm_stats(q_scores);
    const std::vector<double> purity = to_purity(ood_scores, stats_neg_o);
    const std::vector<double> informativeness =
        to_informativeness(q_scores, stats_q);

    std::unordered_map<int, ScorePair> score_pairs;
    score_pairs.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      score_pairs.emplace(pool[i].id,
                          ScorePair(purity[i], informativeness[i]));
    }

    std::optional<double> purity_auroc;
    {
      std::vector<bool> is_in_pool(pool.size());
      std::size_t pos = 0;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        is_in_pool[i] = bench.truth[static_cast<std::size_t>(pool[i].id)].is_in;
        pos += is_in_pool[i] ? 1 : 0;
      }
      if (pos > 0 && pos < pool.size()) {
        purity_auroc = auroc(purity, is_in_pool);
      }
    }

    SelectionResult sel;
    if (cfg.strategy == "mqnet") {
      sel = select_queries(mqnet_scores(round, mlp, score_pairs), pool,
                           cfg.budget, cfg.cost, oracle);
    } else if (cfg.strategy == "coreset") {
      sel = select_coreset_queries(clf, pool, labeled, cfg.budget, cfg.cost,
                                   oracle);
    } else {
      sel = select_queries(
          baseline_scores(cfg.strategy, clf, pool, score_pairs, baseline_rng),
          pool, cfg.budget, cfg.cost, oracle);
    }

    // Self-validation set is exactly this round's query, scored under this
    // round's frozen statistics and the current classifier.
    std::vector<SelfValItem> self_val;
    self_val.reserve(sel.query.size());
    for (const LabeledExample& it : sel.query.in_items) {
      self_val.push_back(make_self_val_item(
          score_pairs.at(it.example.id),
          ce_loss(clf, it.example.features, it.label), true));
    }
    for (const Example& it : sel.query.ood_items) {
      self_val.push_back(
          make_self_val_item(score_pairs.at(it.id), 0.0, false));
    }
    if (cfg.strategy == "mqnet") {
      mlp = train_meta(std::move(mlp), self_val, cfg.meta, meta_train_rng);
    }

    RoundRecord record;
    record.round_index = round;
    record.test_accuracy = acc;
    record.query_in_ratio = in_ratio(sel.query);
    record.cost_spent = query_cost(sel.query, cfg.cost);
    record.purity_auroc = purity_auroc;
    record.pool_exhausted = sel.pool_exhausted;
    record.strategy_name = cfg.strategy;

    labeled.in_items.insert(labeled.in_items.end(), sel.query.in_items.begin(),
                            sel.query.in_items.end());
    labeled.ood_items.insert(labeled.ood_items.end(),
                             sel.query.ood_items.begin(),
                             sel.query.ood_items.end());

    if (observer) {
      observer(RoundTelemetry{round, sel.query, self_val, clf, pool.size(),
                              labeled.size(), ood_in_training});
    }
    result.records.push_back(std::move(record));
  }
  result.meta_model = std::move(mlp);
  return result;
}

}  // namespace mqnet
