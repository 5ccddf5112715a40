#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mqnet/rng.hpp"
#include "mqnet/score_conversion.hpp"

namespace mqnet {

/*!
 * 2-layer meta-scorer over z = (purity, informativeness).
 *
 * Raw parameters are unconstrained; the network always evaluates through
 * their ReLU projection, so the effective weights are non-negative and the
 * score is componentwise non-decreasing on the positive orthant.
 */
struct MonotoneMlp {
  static constexpr std::size_t kInputDim = 2;

  std::size_t hidden_dim = 0;
  std::vector<double> raw_w1;  // hidden_dim x 2, row-major
  std::vector<double> raw_b1;  // hidden_dim
  std::vector<double> raw_w2;  // hidden_dim
  double raw_b2 = 0.0;
};

// ReLU projection of the raw parameters; what forward() actually uses.
struct EffectiveParams {
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;
};

// One entry of the self-validation set built from a freshly labeled query.
// masked_loss is zero for every OOD item.
struct SelfValItem {
  ScorePair score_pair;
  double masked_loss = 0.0;
  bool is_in = false;
};

struct MetaTrainConfig {
  double margin = 0.1;
  std::size_t pair_batch_size = 64;
  std::size_t epochs = 100;
  double learning_rate = 0.01;
  double lr_decay_factor = 0.1;
  double lr_decay_at_fraction = 0.5;
  // Ablation switch: replace max(0, -Sign*(d+margin)) with the enforcing
  // form max(0, -Sign*d + margin) for Sign != 0.
  bool strict_margin = false;
};

struct IndexPair {
  std::size_t first = 0;
  std::size_t second = 0;
};

// Gradient with respect to the raw parameters, same shapes as MonotoneMlp.
struct MetaGradient {
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;
};

// Weights drawn from uniform(-0.05, 0.05), biases zero.
MonotoneMlp init_monotone_mlp(std::size_t hidden_dim, Rng& rng);

EffectiveParams project_params(const MonotoneMlp& mlp);

// score = w2_eff . sigmoid(w1_eff z + b1_eff) + b2_eff. Throws on non-finite
// meta inputs.
double forward(const MonotoneMlp& mlp, const ScorePair& z);

// ce when the item is IN, zero otherwise.
double masked_loss(double ce, bool is_in);

SelfValItem make_self_val_item(const ScorePair& z, double ce, bool is_in);

// +1 if a > b, 0 if equal, -1 otherwise.
int sign3(double a, double b);

/*!
 * Draws 2M indices without replacement from item_indices and pairs position
 * k with position M+k. M is reduced to floor(n/2) when the set is small.
 * Throws "self-validation set too small" when fewer than 2 items exist.
 */
std::vector<IndexPair> pair_minibatch(
    const std::vector<std::size_t>& item_indices, std::size_t pair_count,
    Rng& rng);

// max(0, -Sign(mloss_i, mloss_j) * (score_i - score_j + margin)); the strict
// variant uses max(0, -Sign * (score_i - score_j) + margin) for Sign != 0.
double pair_loss(double score_i, double score_j, double mloss_i,
                 double mloss_j, double margin, bool strict_margin = false);

double batch_loss(const MonotoneMlp& mlp, const std::vector<SelfValItem>& items,
                  const std::vector<IndexPair>& pairs, double margin,
                  bool strict_margin = false);

/*!
 * Analytic gradient of batch_loss over the raw parameters. The projection
 * contributes subgradient 1[raw > 0] and the hinge contributes 0 at its kink,
 * so pairs with zero loss never move the parameters.
 */
MetaGradient gradient(const MonotoneMlp& mlp,
                      const std::vector<SelfValItem>& items,
                      const std::vector<IndexPair>& pairs, double margin,
                      bool strict_margin = false);

/*!
 * cfg.epochs steps of paired mini-batch SGD, w <- w - lr * grad, with the
 * learning rate multiplied by lr_decay_factor once at lr_decay_at_fraction
 * of the total steps. Deterministic given the generator state.
 */
MonotoneMlp train_meta(MonotoneMlp mlp, const std::vector<SelfValItem>& self_val,
                       const MetaTrainConfig& cfg, Rng& rng);

// Binary checkpoint of the raw parameters; round trip is bit-exact.
void save_checkpoint(const MonotoneMlp& mlp, const std::string& path);
MonotoneMlp load_checkpoint(const std::string& path);

}  // namespace mqnet
