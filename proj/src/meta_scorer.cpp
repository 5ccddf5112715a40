#include "mqnet/meta_scorer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace mqnet {

namespace {

constexpr std::uint32_t kCheckpointMagic = 0x4d514e31;  // "MQN1" big-endian bytes

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double relu(double x) { return x > 0.0 ? x : 0.0; }

void check_shapes(const MonotoneMlp& mlp) {
  if (mlp.hidden_dim == 0 ||
      mlp.raw_w1.size() != mlp.hidden_dim * MonotoneMlp::kInputDim ||
      mlp.raw_b1.size() != mlp.hidden_dim ||
      mlp.raw_w2.size() != mlp.hidden_dim) {
    throw std::invalid_argument("meta model has inconsistent parameter shapes");
  }
}

void validate_config(const MetaTrainConfig& cfg) {
  if (!(cfg.margin > 0.0)) {
    throw std::invalid_argument("meta train config: margin must be positive");
  }
  if (cfg.pair_batch_size == 0 || cfg.epochs == 0) {
    throw std::invalid_argument(
        "meta train config: batch size and epochs must be positive");
  }
  if (!(cfg.learning_rate > 0.0)) {
    throw std::invalid_argument(
        "meta train config: learning rate must be positive");
  }
  if (!(cfg.lr_decay_factor > 0.0) || cfg.lr_decay_factor > 1.0 ||
      !(cfg.lr_decay_at_fraction > 0.0) || cfg.lr_decay_at_fraction > 1.0) {
    throw std::invalid_argument("meta train config: decay parameters out of range");
  }
}

// Forward pass keeping the hidden activations; shared by loss and gradient.
double forward_with_hidden(const EffectiveParams& eff, const ScorePair& z,
                           std::vector<double>* hidden) {
  const std::size_t m = eff.b1.size();
  double score = eff.b2;
  for (std::size_t h = 0; h < m; ++h) {
    const double a = eff.w1[h * 2] * z.purity +
                     eff.w1[h * 2 + 1] * z.informativeness + eff.b1[h];
    const double g = sigmoid(a);
    if (hidden) (*hidden)[h] = g;
    score += eff.w2[h] * g;
  }
  return score;
}

}  // namespace

MonotoneMlp init_monotone_mlp(std::size_t hidden_dim, Rng& rng) {
  if (hidden_dim == 0) {
    throw std::invalid_argument("hidden dimension must be positive");
  }
  MonotoneMlp mlp;
  mlp.hidden_dim = hidden_dim;
  mlp.raw_w1.resize(hidden_dim * MonotoneMlp::kInputDim);
  mlp.raw_b1.assign(hidden_dim, 0.0);
  mlp.raw_w2.resize(hidden_dim);
  mlp.raw_b2 = 0.0;
  for (double& w : mlp.raw_w1) w = rng.uniform(-0.05, 0.05);
  for (double& w : mlp.raw_w2) w = rng.uniform(-0.05, 0.05);
  return mlp;
}

EffectiveParams project_params(const MonotoneMlp& mlp) {
  check_shapes(mlp);
  EffectiveParams eff;
  eff.w1.resize(mlp.raw_w1.size());
  eff.b1.resize(mlp.raw_b1.size());
  eff.w2.resize(mlp.raw_w2.size());
  std::transform(mlp.raw_w1.begin(), mlp.raw_w1.end(), eff.w1.begin(), relu);
  std::transform(mlp.raw_b1.begin(), mlp.raw_b1.end(), eff.b1.begin(), relu);
  std::transform(mlp.raw_w2.begin(), mlp.raw_w2.end(), eff.w2.begin(), relu);
  eff.b2 = relu(mlp.raw_b2);
  return eff;
}

double forward(const MonotoneMlp& mlp, const ScorePair& z) {
  if (!std::isfinite(z.purity) || !std::isfinite(z.informativeness)) {
    throw std::invalid_argument("non-finite meta input");
  }
  const EffectiveParams eff = project_params(mlp);
  return forward_with_hidden(eff, z, nullptr);
}

double masked_loss(double ce, bool is_in) { return is_in ? ce : 0.0; }

SelfValItem make_self_val_item(const ScorePair& z, double ce, bool is_in) {
  return SelfValItem{z, masked_loss(ce, is_in), is_in};
}

int sign3(double a, double b) {
  if (a > b) return 1;
  if (a < b) return -1;
  return 0;
}

std::vector<IndexPair> pair_minibatch(
    const std::vector<std::size_t>& item_indices, std::size_t pair_count,
    Rng& rng) {
  if (item_indices.size() < 2) {
    throw std::invalid_argument("self-validation set too small");
  }
  const std::size_t m = std::min(pair_count, item_indices.size() / 2);
  std::vector<std::size_t> drawn = item_indices;
  rng.partial_shuffle(drawn, 2 * m);
  std::vector<IndexPair> pairs(m);
  for (std::size_t k = 0; k < m; ++k) {
    pairs[k] = IndexPair{drawn[k], drawn[m + k]};
  }
  return pairs;
}

double pair_loss(double score_i, double score_j, double mloss_i,
                 double mloss_j, double margin, bool strict_margin) {
  const int sign = sign3(mloss_i, mloss_j);
  if (sign == 0) return 0.0;
  const double delta = score_i - score_j;
  const double arg = strict_margin ? -sign * delta + margin
                                   : -sign * (delta + margin);
  return arg > 0.0 ? arg : 0.0;
}

double batch_loss(const MonotoneMlp& mlp, const std::vector<SelfValItem>& items,
                  const std::vector<IndexPair>& pairs, double margin,
                  bool strict_margin) {
  check_shapes(mlp);
  const EffectiveParams eff = project_params(mlp);
  double total = 0.0;
  for (const IndexPair& p : pairs) {
    if (p.first >= items.size() || p.second >= items.size()) {
      throw std::out_of_range("pair index outside the self-validation set");
    }
    const SelfValItem& a = items[p.first];
    const SelfValItem& b = items[p.second];
    const double sa = forward_with_hidden(eff, a.score_pair, nullptr);
    const double sb = forward_with_hidden(eff, b.score_pair, nullptr);
    total += pair_loss(sa, sb, a.masked_loss, b.masked_loss, margin,
                       strict_margin);
  }
  return total;
}

MetaGradient gradient(const MonotoneMlp& mlp,
                      const std::vector<SelfValItem>& items,
                      const std::vector<IndexPair>& pairs, double margin,
                      bool strict_margin) {
  check_shapes(mlp);
  const EffectiveParams eff = project_params(mlp);
  const std::size_t m = mlp.hidden_dim;

  MetaGradient grad;
  grad.w1.assign(mlp.raw_w1.size(), 0.0);
  grad.b1.assign(m, 0.0);
  grad.w2.assign(m, 0.0);
  grad.b2 = 0.0;

  std::vector<double> hidden_i(m);
  std::vector<double> hidden_j(m);

  // Accumulates d(score)/d(raw params) scaled by dscore for one endpoint.
  const auto accumulate = [&](const ScorePair& z, const std::vector<double>& g,
                              double dscore) {
    if (dscore == 0.0) return;
    for (std::size_t h = 0; h < m; ++h) {
      if (mlp.raw_w2[h] > 0.0) grad.w2[h] += dscore * g[h];
      const double da = dscore * eff.w2[h] * g[h] * (1.0 - g[h]);
      if (da == 0.0) continue;
      if (mlp.raw_w1[h * 2] > 0.0) grad.w1[h * 2] += da * z.purity;
      if (mlp.raw_w1[h * 2 + 1] > 0.0) {
        grad.w1[h * 2 + 1] += da * z.informativeness;
      }
      if (mlp.raw_b1[h] > 0.0) grad.b1[h] += da;
    }
    if (mlp.raw_b2 > 0.0) grad.b2 += dscore;
  };

  for (const IndexPair& p : pairs) {
    if (p.first >= items.size() || p.second >= items.size()) {
      throw std::out_of_range("pair index outside the self-validation set");
    }
    const SelfValItem& a = items[p.first];
    const SelfValItem& b = items[p.second];
    const int sign = sign3(a.masked_loss, b.masked_loss);
    if (sign == 0) continue;

    const double sa = forward_with_hidden(eff, a.score_pair, &hidden_i);
    const double sb = forward_with_hidden(eff, b.score_pair, &hidden_j);
    const double delta = sa - sb;
    const double arg = strict_margin ? -sign * delta + margin
                                     : -sign * (delta + margin);
    if (!(arg > 0.0)) continue;  // flat or kink: no flow

    // d(arg)/d(sa) = -sign, d(arg)/d(sb) = +sign in both margin forms.
    accumulate(a.score_pair, hidden_i, -static_cast<double>(sign));
    accumulate(b.score_pair, hidden_j, +static_cast<double>(sign));
  }
  return grad;
}

MonotoneMlp train_meta(MonotoneMlp mlp, const std::vector<SelfValItem>& self_val,
                       const MetaTrainConfig& cfg, Rng& rng) {
  check_shapes(mlp);
  validate_config(cfg);
  if (self_val.size() < 2) {
    throw std::invalid_argument("self-validation set too small");
  }

  std::vector<std::size_t> indices(self_val.size());
  std::iota(indices.begin(), indices.end(), std::size_t{0});

  const std::size_t decay_step = static_cast<std::size_t>(
      std::floor(static_cast<double>(cfg.epochs) * cfg.lr_decay_at_fraction));
  for (std::size_t step = 0; step < cfg.epochs; ++step) {
    const double lr = step >= decay_step
                          ? cfg.learning_rate * cfg.lr_decay_factor
                          : cfg.learning_rate;
    const std::vector<IndexPair> pairs =
        pair_minibatch(indices, cfg.pair_batch_size, rng);
    const MetaGradient g =
        gradient(mlp, self_val, pairs, cfg.margin, cfg.strict_margin);
    // Mini-batch SGD steps by the mean pair gradient; the summed gradient
    // would make the step size depend on the batch size.
    const double scale =
        lr / static_cast<double>(std::max<std::size_t>(pairs.size(), 1));
    for (std::size_t k = 0; k < mlp.raw_w1.size(); ++k) {
      mlp.raw_w1[k] -= scale * g.w1[k];
    }
    for (std::size_t k = 0; k < mlp.hidden_dim; ++k) {
      mlp.raw_b1[k] -= scale * g.b1[k];
      mlp.raw_w2[k] -= scale * g.w2[k];
    }
    mlp.raw_b2 -= scale * g.b2;
  }
  return mlp;
}

void save_checkpoint(const MonotoneMlp& mlp, const std::string& path) {
  check_shapes(mlp);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open checkpoint file: " + path);
  const std::uint32_t magic = kCheckpointMagic;
  const std::uint32_t dim = static_cast<std::uint32_t>(mlp.hidden_dim);
  out.write(reinterpret_cast<const char*>(&magic), sizeof(magic));
  out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
  out.write(reinterpret_cast<const char*>(mlp.raw_w1.data()),
            static_cast<std::streamsize>(mlp.raw_w1.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(mlp.raw_b1.data()),
            static_cast<std::streamsize>(mlp.raw_b1.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(mlp.raw_w2.data()),
            static_cast<std::streamsize>(mlp.raw_w2.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(&mlp.raw_b2), sizeof(double));
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

MonotoneMlp load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint file: " + path);
  std::uint32_t magic = 0;
  std::uint32_t dim = 0;
  in.read(reinterpret_cast<char*>(&magic), sizeof(magic));
  in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
  if (!in || magic != kCheckpointMagic) {
    throw std::runtime_error("bad checkpoint header: " + path);
  }
  if (dim == 0) throw std::runtime_error("bad checkpoint header: " + path);
  MonotoneMlp mlp;
  mlp.hidden_dim = dim;
  mlp.raw_w1.resize(mlp.hidden_dim * MonotoneMlp::kInputDim);
  mlp.raw_b1.resize(mlp.hidden_dim);
  mlp.raw_w2.resize(mlp.hidden_dim);
  in.read(reinterpret_cast<char*>(mlp.raw_w1.data()),
          static_cast<std::streamsize>(mlp.raw_w1.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(mlp.raw_b1.data()),
          static_cast<std::streamsize>(mlp.raw_b1.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(mlp.raw_w2.data()),
          static_cast<std::streamsize>(mlp.raw_w2.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(&mlp.raw_b2), sizeof(double));
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
  char extra = 0;
  if (in.read(&extra, 1)) {
    throw std::runtime_error("trailing bytes in checkpoint: " + path);
  }
  return mlp;
}

}  // namespace mqnet
