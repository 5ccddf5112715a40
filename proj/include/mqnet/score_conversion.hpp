#ifndef MQNET_SCORE_CONVERSION_HPP_
#define MQNET_SCORE_CONVERSION_HPP_

#include <cstddef>
#include <vector>

namespace mqnet {

/// Meta-input tuple z = (purity, informativeness). Strictly positive by
/// construction: the monotonicity guarantee of the meta-scorer requires
/// inputs on the nonnegative orthant, and the exp conversion below delivers
/// strictly positive values.
struct ScorePair {
  ScorePair(double purity_score, double informativeness_score);

  double purity;
  double informativeness;
};

/// Mean and population standard deviation of a reference score batch,
/// computed once per round over the current unlabeled pool.
struct NormStats {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Per-class mean vectors plus the inverse of a single shared covariance,
/// fitted on labeled in-distribution features.
struct ClassGaussianStats {
  std::size_t dim = 0;
  std::vector<std::vector<double>> class_means;
  std::vector<double> cov_inv;  // dim x dim, row-major, symmetric PSD
};

/// Throws "empty score batch" on empty input. Divides by N, not N-1: the
/// batch is the whole reference pool rather than a sample.
NormStats compute_norm_stats(const std::vector<double>& values);

/// (v - mean) / stddev per element; a zero-spread batch maps to all zeros.
std::vector<double> zscore(const std::vector<double>& values,
                           const NormStats& stats);

/// P = exp(zscore(-O)). Strictly positive, order-reversing in the OOD score.
/// `stats_of_negated` must come from compute_norm_stats on the negated OOD
/// scores of the reference pool.
std::vector<double> to_purity(const std::vector<double>& ood_scores,
                              const NormStats& stats_of_negated);

/// I = exp(zscore(Q)). Strictly positive, order-preserving in the query score.
std::vector<double> to_informativeness(const std::vector<double>& q_scores,
                                       const NormStats& stats);

/// Energy score E(x) = -T log sum_c exp(logit_c / T), computed with the
/// max-shift trick. Higher value means more likely out-of-distribution.
double energy_ood_score(const std::vector<double>& logits, double temperature);

/// Fits per-class means and one shared covariance from class-centered
/// features, with ridge `ridge`*I added before inversion. Labels select the
/// classes to fit; classes need at least one example each.
ClassGaussianStats fit_class_gaussian_stats(
    const std::vector<std::vector<double>>& features,
    const std::vector<int>& labels, double ridge = 1e-6);

/// Min over fitted classes of the squared Mahalanobis distance
/// (x-mu_c)^T Sigma^-1 (x-mu_c). Higher means more likely OOD.
double mahalanobis_ood_score(const std::vector<double>& feature,
                             const ClassGaussianStats& stats);

/// Uncertainty score 1 - max_c p_c in [0, 1]; higher = more informative.
double confidence_q(const std::vector<double>& probs);

/// Shannon entropy -sum p log p (natural log, 0 log 0 := 0).
double entropy_q(const std::vector<double>& probs);

}  // namespace mqnet

#endif  // MQNET_SCORE_CONVERSION_HPP_
