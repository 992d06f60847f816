#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "shapekit/errors.hpp"

namespace shapekit {

enum class ClassifierKind { lda, logistic, knn };

/// A trained binary classification rule over flattened shape variables.
/// classes[1] is the designated positive class (SAM / group-1); sensitivity
/// is always reported for it.
struct ClassifierModel {
  ClassifierKind kind = ClassifierKind::lda;
  std::array<std::string, 2> classes;  // [0] negative, [1] positive
  int p = 0;

  // LDA
  Eigen::VectorXd lda_mean_neg, lda_mean_pos;
  Eigen::MatrixXd lda_pooled_cov;      // denominator n - 2
  Eigen::MatrixXd lda_cov_inv;         // inverse or pseudo-inverse
  std::array<double, 2> lda_priors{0.0, 0.0};
  int lda_cov_rank = 0;
  bool lda_used_pseudo_inverse = false;

  // Logistic regression (intercept first)
  Eigen::VectorXd lr_coefficients;
  bool lr_separation_flagged = false;

  // kNN
  Eigen::MatrixXd knn_train;           // n x p
  std::vector<int> knn_labels;         // 0 negative, 1 positive
  int knn_k = 0;

  std::vector<std::string> warnings;
};

struct Prediction {
  std::string label;
  double score = 0.0;  // positive-class probability / positive-neighbor fraction
};

/// Resolves the (negative, positive) class pair from the labels present.
/// An empty hint picks SAM, then group-1, then the lexicographically
/// smallest label as positive.
std::array<std::string, 2> resolve_classes(const std::vector<std::string>& labels,
                                           const std::string& positive_hint);

ClassifierModel train(ClassifierKind kind, const Eigen::MatrixXd& X,
                      const std::vector<std::string>& labels,
                      const std::string& positive_hint, int knn_k = 0);

Prediction predict(const ClassifierModel& model, const Eigen::VectorXd& x);

/// Oracle choice of k: the candidate maximizing in-sample accuracy with
/// training sample equal to test sample; ties break toward smaller k.
int select_k(const Eigen::MatrixXd& X, const std::vector<std::string>& labels,
             const std::string& positive_hint, const std::vector<int>& candidates);

struct ClassificationMetrics {
  long tp = 0, fn = 0, tn = 0, fp = 0;
  double accuracy = 0.0, sensitivity = 0.0, specificity = 0.0;
};

ClassificationMetrics metrics(const std::vector<std::string>& predictions,
                              const std::vector<std::string>& truth,
                              const std::string& positive_label);

/// Rebuilds the LDA inverse-or-pseudo-inverse from a stored covariance.
/// Deterministic, so reloading an artifact reproduces scores bitwise.
void finalize_lda_inverse(ClassifierModel& model);

}  // namespace shapekit
