#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mqnet/rng.hpp"

namespace mqnet {

struct ClassifierDims {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t num_classes = 0;
};

// One-hidden-layer softmax network: tanh hidden layer, linear head.
// sgd_steps counts every gradient step ever applied, regardless of data size.
struct Classifier {
  ClassifierDims dims;
  std::vector<double> w1;  // hidden_dim x input_dim, row-major
  std::vector<double> b1;  // hidden_dim
  std::vector<double> w2;  // num_classes x hidden_dim, row-major
  std::vector<double> b2;  // num_classes
  std::uint64_t seed = 0;
  std::uint64_t sgd_steps = 0;
};

// Training always runs for a fixed number of iterations, independent of the
// labeled-set size.
struct TrainConfig {
  std::size_t iterations = 2000;
  double learning_rate = 0.05;
  std::size_t batch_size = 16;
};

struct LabeledFeature {
  std::vector<double> features;
  int label = 0;
};

// Weights uniform in (-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
// Requires num_classes >= 2.
Classifier init_classifier(const ClassifierDims& dims, std::uint64_t seed);

// cfg.iterations steps of mini-batch SGD on mean cross-entropy, batches
// sampled with replacement. The caller guarantees labeled_in holds IN
// examples only.
Classifier train_classifier(Classifier clf,
                            const std::vector<LabeledFeature>& labeled_in,
                            const TrainConfig& cfg, Rng& rng);

std::vector<double> logits(const Classifier& clf,
                           const std::vector<double>& features);

// softmax(logits) with max-shift; sums to 1 within 1e-9.
std::vector<double> probs(const Classifier& clf,
                          const std::vector<double>& features);

// -log probs[label], computed as logsumexp(logits) - logits[label].
double ce_loss(const Classifier& clf, const std::vector<double>& features,
               int label);

// Hidden-layer activations, dimension hidden_dim.
std::vector<double> penultimate_features(const Classifier& clf,
                                         const std::vector<double>& features);

// Fraction of argmax-correct predictions; ties pick the lowest class index.
double test_accuracy(const Classifier& clf,
                     const std::vector<LabeledFeature>& test_set);

}  // namespace mqnet
