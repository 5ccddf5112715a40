#include "mqnet/target_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mqnet {

namespace {

void check_dims(const ClassifierDims& dims) {
  if (dims.input_dim == 0 || dims.hidden_dim == 0) {
    throw std::invalid_argument("classifier dims must be positive");
  }
  if (dims.num_classes < 2) {
    throw std::invalid_argument("classifier needs at least 2 classes");
  }
}

void check_feature(const Classifier& clf, const std::vector<double>& features) {
  if (features.size() != clf.dims.input_dim) {
    throw std::invalid_argument("feature dimension mismatch");
  }
}

std::vector<double> hidden_activations(const Classifier& clf,
                                       const std::vector<double>& x) {
  const std::size_t h = clf.dims.hidden_dim;
  const std::size_t d = clf.dims.input_dim;
  std::vector<double> g(h);
  for (std::size_t i = 0; i < h; ++i) {
    double a = clf.b1[i];
    for (std::size_t j = 0; j < d; ++j) a += clf.w1[i * d + j] * x[j];
    g[i] = std::tanh(a);
  }
  return g;
}

std::vector<double> logits_from_hidden(const Classifier& clf,
                                       const std::vector<double>& g) {
  const std::size_t k = clf.dims.num_classes;
  const std::size_t h = clf.dims.hidden_dim;
  std::vector<double> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    double l = clf.b2[c];
    for (std::size_t i = 0; i < h; ++i) l += clf.w2[c * h + i] * g[i];
    out[c] = l;
  }
  return out;
}

double logsumexp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - m);
  return m + std::log(sum);
}

}  // namespace

Classifier init_classifier(const ClassifierDims& dims, std::uint64_t seed) {
  check_dims(dims);
  Classifier clf;
  clf.dims = dims;
  clf.seed = seed;
  clf.w1.resize(dims.hidden_dim * dims.input_dim);
  clf.b1.assign(dims.hidden_dim, 0.0);
  clf.w2.resize(dims.num_classes * dims.hidden_dim);
  clf.b2.assign(dims.num_classes, 0.0);

  Rng rng(seed);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(dims.input_dim));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(dims.hidden_dim));
  for (double& w : clf.w1) w = rng.uniform(-s1, s1);
  for (double& w : clf.w2) w = rng.uniform(-s2, s2);
  return clf;
}

Classifier train_classifier(Classifier clf,
                            const std::vector<LabeledFeature>& labeled_in,
                            const TrainConfig& cfg, Rng& rng) {
  check_dims(clf.dims);
  if (labeled_in.empty()) throw std::invalid_argument("empty labeled set");
  if (!(cfg.learning_rate > 0.0) || cfg.batch_size == 0) {
    throw std::invalid_argument("train config: learning rate and batch size must be positive");
  }
  const std::size_t d = clf.dims.input_dim;
  const std::size_t h = clf.dims.hidden_dim;
  const std::size_t k = clf.dims.num_classes;
  for (const LabeledFeature& ex : labeled_in) {
    if (ex.features.size() != d) {
      throw std::invalid_argument("feature dimension mismatch");
    }
    if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= k) {
      throw std::invalid_argument("label out of range");
    }
  }

  std::vector<double> gw1(h * d), gb1(h), gw2(k * h), gb2(k);
  for (std::size_t step = 0; step < cfg.iterations; ++step) {
    std::fill(gw1.begin(), gw1.end(), 0.0);
    std::fill(gb1.begin(), gb1.end(), 0.0);
    std::fill(gw2.begin(), gw2.end(), 0.0);
    std::fill(gb2.begin(), gb2.end(), 0.0);

    for (std::size_t b = 0; b < cfg.batch_size; ++b) {
      const LabeledFeature& ex = labeled_in[rng.uniform_index(labeled_in.size())];
      const std::vector<double> g = hidden_activations(clf, ex.features);
      std::vector<double> l = logits_from_hidden(clf, g);
      const double lse = logsumexp(l);
      // dCE/dlogit_c = p_c - 1[c == label]
      for (std::size_t c = 0; c < k; ++c) l[c] = std::exp(l[c] - lse);
      l[static_cast<std::size_t>(ex.label)] -= 1.0;

      for (std::size_t c = 0; c < k; ++c) {
        gb2[c] += l[c];
        for (std::size_t i = 0; i < h; ++i) gw2[c * h + i] += l[c] * g[i];
      }
      for (std::size_t i = 0; i < h; ++i) {
        double dg = 0.0;
        for (std::size_t c = 0; c < k; ++c) dg += l[c] * clf.w2[c * h + i];
        const double da = dg * (1.0 - g[i] * g[i]);
        gb1[i] += da;
        for (std::size_t j = 0; j < d; ++j) gw1[i * d + j] += da * ex.features[j];
      }
    }

    const double scale = cfg.learning_rate / static_cast<double>(cfg.batch_size);
    for (std::size_t i = 0; i < h * d; ++i) clf.w1[i] -= scale * gw1[i];
    for (std::size_t i = 0; i < h; ++i) clf.b1[i] -= scale * gb1[i];
    for (std::size_t i = 0; i < k * h; ++i) clf.w2[i] -= scale * gw2[i];
    for (std::size_t i = 0; i < k; ++i) clf.b2[i] -= scale * gb2[i];
    ++clf.sgd_steps;
  }
  return clf;
}

std::vector<double> logits(const Classifier& clf,
                           const std::vector<double>& features) {
  check_feature(clf, features);
  return logits_from_hidden(clf, hidden_activations(clf, features));
}

std::vector<double> probs(const Classifier& clf,
                          const std::vector<double>& features) {
  std::vector<double> l = logits(clf, features);
  const double lse = logsumexp(l);
  for (double& v : l) v = std::exp(v - lse);
  return l;
}

double ce_loss(const Classifier& clf, const std::vector<double>& features,
               int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= clf.dims.num_classes) {
    throw std::invalid_argument("label out of range");
  }
  const std::vector<double> l = logits(clf, features);
  return logsumexp(l) - l[static_cast<std::size_t>(label)];
}

std::vector<double> penultimate_features(const Classifier& clf,
                                         const std::vector<double>& features) {
  check_feature(clf, features);
  return hidden_activations(clf, features);
}

double test_accuracy(const Classifier& clf,
                     const std::vector<LabeledFeature>& test_set) {
  if (test_set.empty()) throw std::invalid_argument("empty test set");
  std::size_t correct = 0;
  for (const LabeledFeature& ex : test_set) {
    const std::vector<double> l = logits(clf, ex.features);
    std::size_t best = 0;
    for (std::size_t c = 1; c < l.size(); ++c) {
      if (l[c] > l[best]) best = c;  // strict: ties keep the lowest index
    }
    if (static_cast<int>(best) == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test_set.size());
}

}  // namespace mqnet
