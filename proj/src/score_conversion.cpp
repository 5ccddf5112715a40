#include "mqnet/score_conversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace mqnet {

namespace {

void check_simplex(const std::vector<double>& probs) {
  if (probs.empty()) throw std::invalid_argument("invalid simplex: empty");
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("invalid simplex: entries must be finite and nonnegative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw std::invalid_argument("invalid simplex: entries must sum to 1");
  }
}

// Cholesky factorization of a symmetric positive-definite matrix (row-major).
// Returns the lower factor L with A = L L^T.
std::vector<double> cholesky(const std::vector<double>& a, std::size_t n) {
  std::vector<double> l(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) sum -= l[i * n + k] * l[j * n + k];
      if (i == j) {
        if (sum <= 0.0) {
          throw std::runtime_error("covariance is not positive definite");
        }
        l[i * n + i] = std::sqrt(sum);
      } else {
        l[i * n + j] = sum / l[j * n + j];
      }
    }
  }
  return l;
}

// Inverse of an SPD matrix through its Cholesky factor.
std::vector<double> spd_inverse(const std::vector<double>& a, std::size_t n) {
  const std::vector<double> l = cholesky(a, n);
  // Invert L by forward substitution.
  std::vector<double> linv(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    linv[i * n + i] = 1.0 / l[i * n + i];
    for (std::size_t j = 0; j < i; ++j) {
      double sum = 0.0;
      for (std::size_t k = j; k < i; ++k) sum += l[i * n + k] * linv[k * n + j];
      linv[i * n + j] = -sum / l[i * n + i];
    }
  }
  // A^-1 = L^-T L^-1.
  std::vector<double> inv(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = 0.0;
      for (std::size_t k = i; k < n; ++k) sum += linv[k * n + i] * linv[k * n + j];
      inv[i * n + j] = sum;
      inv[j * n + i] = sum;
    }
  }
  return inv;
}

}  // namespace

ScorePair::ScorePair(double purity_score, double informativeness_score)
    : purity(purity_score), informativeness(informativeness_score) {
  if (!std::isfinite(purity) || !std::isfinite(informativeness) ||
      purity <= 0.0 || informativeness <= 0.0) {
    throw std::invalid_argument("score pair entries must be finite and strictly positive");
  }
}

NormStats compute_norm_stats(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("empty score batch");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return NormStats{mean, std::sqrt(var)};
}

std::vector<double> zscore(const std::vector<double>& values,
                           const NormStats& stats) {
  std::vector<double> out(values.size(), 0.0);
  if (stats.stddev <= 0.0) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (values[i] - stats.mean) / stats.stddev;
  }
  return out;
}

std::vector<double> to_purity(const std::vector<double>& ood_scores,
                              const NormStats& stats_of_negated) {
  std::vector<double> negated(ood_scores.size());
  for (std::size_t i = 0; i < ood_scores.size(); ++i) negated[i] = -ood_scores[i];
  std::vector<double> out = zscore(negated, stats_of_negated);
  for (double& v : out) v = std::exp(v);
  return out;
}

std::vector<double> to_informativeness(const std::vector<double>& q_scores,
                                       const NormStats& stats) {
  std::vector<double> out = zscore(q_scores, stats);
  for (double& v : out) v = std::exp(v);
  return out;
}

double energy_ood_score(const std::vector<double>& logits, double temperature) {
  if (logits.empty()) throw std::invalid_argument("energy score: empty logits");
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("energy score: temperature must be positive");
  }
  double max_scaled = -std::numeric_limits<double>::infinity();
  for (double l : logits) {
    if (!std::isfinite(l)) throw std::invalid_argument("energy score: non-finite logit");
    max_scaled = std::max(max_scaled, l / temperature);
  }
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l / temperature - max_scaled);
  return -temperature * (max_scaled + std::log(sum));
}

ClassGaussianStats fit_class_gaussian_stats(
    const std::vector<std::vector<double>>& features,
    const std::vector<int>& labels, double ridge) {
  if (features.empty() || features.size() != labels.size()) {
    throw std::invalid_argument("gaussian stats: features and labels must be non-empty and aligned");
  }
  const std::size_t dim = features[0].size();
  std::map<int, std::vector<double>> sums;
  std::map<int, std::size_t> counts;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != dim) {
      throw std::invalid_argument("gaussian stats: inconsistent feature dimension");
    }
    auto& sum = sums.try_emplace(labels[i], dim, 0.0).first->second;
    for (std::size_t d = 0; d < dim; ++d) sum[d] += features[i][d];
    ++counts[labels[i]];
  }

  ClassGaussianStats stats;
  stats.dim = dim;
  std::map<int, std::size_t> mean_index;
  for (auto& [label, sum] : sums) {
    for (double& v : sum) v /= static_cast<double>(counts[label]);
    mean_index[label] = stats.class_means.size();
    stats.class_means.push_back(sum);
  }

  // Shared covariance of class-centered features, divided by N.
  std::vector<double> cov(dim * dim, 0.0);
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& mu = stats.class_means[mean_index[labels[i]]];
    for (std::size_t r = 0; r < dim; ++r) {
      const double dr = features[i][r] - mu[r];
      for (std::size_t c = 0; c <= r; ++c) {
        cov[r * dim + c] += dr * (features[i][c] - mu[c]);
      }
    }
  }
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c <= r; ++c) {
      const double v = cov[r * dim + c] / static_cast<double>(features.size());
      cov[r * dim + c] = v;
      cov[c * dim + r] = v;
    }
    cov[r * dim + r] += ridge;
  }
  stats.cov_inv = spd_inverse(cov, dim);
  return stats;
}

double mahalanobis_ood_score(const std::vector<double>& feature,
                             const ClassGaussianStats& stats) {
  if (stats.class_means.empty()) {
    throw std::invalid_argument("mahalanobis score: no fitted classes");
  }
  if (feature.size() != stats.dim) {
    throw std::invalid_argument("mahalanobis score: feature dimension mismatch");
  }
  const std::size_t n = stats.dim;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> diff(n);
  for (const auto& mu : stats.class_means) {
    for (std::size_t d = 0; d < n; ++d) diff[d] = feature[d] - mu[d];
    double dist = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double row = 0.0;
      for (std::size_t c = 0; c < n; ++c) row += stats.cov_inv[r * n + c] * diff[c];
      dist += diff[r] * row;
    }
    best = std::min(best, dist);
  }
  return std::max(best, 0.0);
}

double confidence_q(const std::vector<double>& probs) {
  check_simplex(probs);
  return 1.0 - *std::max_element(probs.begin(), probs.end());
}

double entropy_q(const std::vector<double>& probs) {
  check_simplex(probs);
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

}  // namespace mqnet
