#include "shapekit/classify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace shapekit {

namespace {

constexpr double kRankTolerance = 1e-9;      // relative to the largest eigenvalue
constexpr double kSeparationBound = 1e6;
constexpr double kRidgePenalty = 1e-6;

double sigmoid(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

std::vector<int> encode_labels(const std::vector<std::string>& labels,
                               const std::array<std::string, 2>& classes) {
  std::vector<int> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == classes[1]) y[i] = 1;
    else if (labels[i] == classes[0]) y[i] = 0;
    else
      raise(ErrorCode::degenerate_labels,
            "label '" + labels[i] + "' is neither '" + classes[0] + "' nor '" +
                classes[1] + "'");
  }
  return y;
}

void train_lda(ClassifierModel& model, const Eigen::MatrixXd& X,
               const std::vector<int>& y) {
  const int n = static_cast<int>(X.rows());
  const int p = model.p;
  Eigen::VectorXd mean[2] = {Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(p)};
  int count[2] = {0, 0};
  for (int i = 0; i < n; ++i) {
    mean[y[i]] += X.row(i).transpose();
    ++count[y[i]];
  }
  mean[0] /= count[0];
  mean[1] /= count[1];

  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd d = X.row(i).transpose() - mean[y[i]];
    scatter.noalias() += d * d.transpose();
  }
  model.lda_mean_neg = mean[0];
  model.lda_mean_pos = mean[1];
  model.lda_pooled_cov = scatter / (n - 2);
  model.lda_priors = {double(count[0]) / n, double(count[1]) / n};
  finalize_lda_inverse(model);
  if (model.lda_used_pseudo_inverse)
    model.warnings.push_back(
        "LDA pooled covariance is rank deficient (rank " +
        std::to_string(model.lda_cov_rank) + " of " + std::to_string(p) +
        "); using a pseudo-inverse");
}

// One IRLS run; returns false when the fit diverged to non-finite values.
bool irls(const Eigen::MatrixXd& design, const std::vector<int>& y,
          double ridge, Eigen::VectorXd& beta) {
  const int n = static_cast<int>(design.rows());
  const int q = static_cast<int>(design.cols());
  beta = Eigen::VectorXd::Zero(q);
  Eigen::MatrixXd penalty = Eigen::MatrixXd::Zero(q, q);
  for (int j = 1; j < q; ++j) penalty(j, j) = ridge;  // intercept unpenalized

  double previous_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 100; ++iter) {
    const Eigen::VectorXd eta = design * beta;
    Eigen::VectorXd prob(n), w(n), z(n);
    double ll = 0.0;
    for (int i = 0; i < n; ++i) {
      const double pi = std::clamp(sigmoid(eta[i]), 1e-12, 1.0 - 1e-12);
      prob[i] = pi;
      w[i] = std::max(pi * (1.0 - pi), 1e-12);
      z[i] = eta[i] + (y[i] - pi) / w[i];
      ll += y[i] ? std::log(pi) : std::log(1.0 - pi);
    }
    ll -= 0.5 * ridge * beta.tail(q - 1).squaredNorm();
    const Eigen::MatrixXd xtwx =
        design.transpose() * w.asDiagonal() * design + penalty;
    const Eigen::VectorXd xtwz = design.transpose() * (w.array() * z.array()).matrix();
    beta = xtwx.ldlt().solve(xtwz);
    if (!beta.allFinite()) return false;
    if (std::abs(ll - previous_ll) < 1e-10) break;
    previous_ll = ll;
  }
  return beta.allFinite();
}

void train_logistic(ClassifierModel& model, const Eigen::MatrixXd& X,
                    const std::vector<int>& y) {
  const int n = static_cast<int>(X.rows());
  Eigen::MatrixXd design(n, model.p + 1);
  design.col(0).setOnes();
  design.rightCols(model.p) = X;

  Eigen::VectorXd beta;
  bool ok = irls(design, y, 0.0, beta);
  if (!ok || beta.cwiseAbs().maxCoeff() > kSeparationBound) {
    model.lr_separation_flagged = true;
    model.warnings.push_back(
        "logistic regression detected separation or a singular fit; refit with "
        "ridge penalty 1e-6");
    if (!irls(design, y, kRidgePenalty, beta))
      raise(ErrorCode::invalid_input, "logistic regression failed to converge");
  }
  model.lr_coefficients = beta;
}

}  // namespace

std::array<std::string, 2> resolve_classes(const std::vector<std::string>& labels,
                                           const std::string& positive_hint) {
  std::set<std::string> distinct(labels.begin(), labels.end());
  distinct.erase("");
  if (distinct.size() < 2)
    raise(ErrorCode::degenerate_labels,
          "training labels contain a single class; two are required");
  if (distinct.size() > 2)
    raise(ErrorCode::degenerate_labels,
          "training labels contain more than two classes");
  std::string positive;
  if (!positive_hint.empty()) {
    if (!distinct.count(positive_hint))
      raise(ErrorCode::degenerate_labels,
            "positive class '" + positive_hint + "' is absent from the labels");
    positive = positive_hint;
  } else if (distinct.count("SAM")) {
    positive = "SAM";
  } else if (distinct.count("group-1")) {
    positive = "group-1";
  } else {
    positive = *distinct.begin();
  }
  std::string negative;
  for (const auto& c : distinct)
    if (c != positive) negative = c;
  return {negative, positive};
}

void finalize_lda_inverse(ClassifierModel& model) {
  const int p = model.p;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(model.lda_pooled_cov);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double largest = std::max(values.maxCoeff(), 0.0);
  const double tol = largest * kRankTolerance;
  model.lda_cov_rank = 0;
  Eigen::MatrixXd inv = Eigen::MatrixXd::Zero(p, p);
  for (int j = 0; j < p; ++j) {
    if (values[j] > tol && values[j] > 0.0) {
      inv.noalias() +=
          eig.eigenvectors().col(j) * eig.eigenvectors().col(j).transpose() /
          values[j];
      ++model.lda_cov_rank;
    }
  }
  model.lda_cov_inv = inv;
  model.lda_used_pseudo_inverse = model.lda_cov_rank < p;
}

ClassifierModel train(ClassifierKind kind, const Eigen::MatrixXd& X,
                      const std::vector<std::string>& labels,
                      const std::string& positive_hint, int knn_k) {
  const int n = static_cast<int>(X.rows());
  if (n == 0 || static_cast<int>(labels.size()) != n)
    raise(ErrorCode::invalid_input, "design matrix and labels disagree");
  if (!X.allFinite())
    raise(ErrorCode::invalid_input, "design matrix contains non-finite values");

  ClassifierModel model;
  model.kind = kind;
  model.p = static_cast<int>(X.cols());
  model.classes = resolve_classes(labels, positive_hint);
  const std::vector<int> y = encode_labels(labels, model.classes);
  if (n < model.p + 2)
    model.warnings.push_back("n = " + std::to_string(n) +
                             " is below the recommended p + 2 = " +
                             std::to_string(model.p + 2));

  switch (kind) {
    case ClassifierKind::lda:
      train_lda(model, X, y);
      break;
    case ClassifierKind::logistic:
      train_logistic(model, X, y);
      break;
    case ClassifierKind::knn:
      if (knn_k < 1 || knn_k > n)
        raise(ErrorCode::invalid_input,
              "kNN needs 1 <= k <= n, got k = " + std::to_string(knn_k));
      model.knn_train = X;
      model.knn_labels = y;
      model.knn_k = knn_k;
      break;
  }
  return model;
}

Prediction predict(const ClassifierModel& model, const Eigen::VectorXd& x) {
  if (static_cast<int>(x.size()) != model.p)
    raise(ErrorCode::template_mismatch,
          "query has " + std::to_string(x.size()) + " variables, model expects " +
              std::to_string(model.p));

  double score = 0.0;
  switch (model.kind) {
    case ClassifierKind::lda: {
      const Eigen::VectorXd a_pos = model.lda_cov_inv * model.lda_mean_pos;
      const Eigen::VectorXd a_neg = model.lda_cov_inv * model.lda_mean_neg;
      const double d_pos = x.dot(a_pos) - 0.5 * model.lda_mean_pos.dot(a_pos) +
                           std::log(model.lda_priors[1]);
      const double d_neg = x.dot(a_neg) - 0.5 * model.lda_mean_neg.dot(a_neg) +
                           std::log(model.lda_priors[0]);
      score = sigmoid(d_pos - d_neg);
      break;
    }
    case ClassifierKind::logistic: {
      double eta = model.lr_coefficients[0];
      for (int j = 0; j < model.p; ++j) eta += model.lr_coefficients[j + 1] * x[j];
      score = sigmoid(eta);
      break;
    }
    case ClassifierKind::knn: {
      const int n = static_cast<int>(model.knn_train.rows());
      std::vector<std::pair<double, int>> order(n);
      for (int i = 0; i < n; ++i)
        order[i] = {(model.knn_train.row(i).transpose() - x).squaredNorm(), i};
      std::partial_sort(order.begin(), order.begin() + model.knn_k, order.end());
      int positives = 0;
      for (int j = 0; j < model.knn_k; ++j)
        positives += model.knn_labels[order[j].second];
      score = double(positives) / model.knn_k;
      break;
    }
  }
  // Ties (score exactly 0.5) resolve to the positive class.
  return {model.classes[score >= 0.5 ? 1 : 0], score};
}

int select_k(const Eigen::MatrixXd& X, const std::vector<std::string>& labels,
             const std::string& positive_hint, const std::vector<int>& candidates) {
  if (candidates.empty())
    raise(ErrorCode::invalid_input, "select_k needs at least one candidate");
  const int n = static_cast<int>(X.rows());
  int best_k = 0;
  double best_accuracy = -1.0;
  for (int k : candidates) {
    const ClassifierModel model = train(ClassifierKind::knn, X, labels,
                                        positive_hint, k);
    int correct = 0;
    for (int i = 0; i < n; ++i)
      if (predict(model, X.row(i).transpose()).label == labels[i]) ++correct;
    const double accuracy = double(correct) / n;
    if (accuracy > best_accuracy ||
        (accuracy == best_accuracy && k < best_k)) {
      best_accuracy = accuracy;
      best_k = k;
    }
  }
  return best_k;
}

ClassificationMetrics metrics(const std::vector<std::string>& predictions,
                              const std::vector<std::string>& truth,
                              const std::string& positive_label) {
  if (predictions.empty() || predictions.size() != truth.size())
    raise(ErrorCode::invalid_input, "predictions and truth must be non-empty and equal length");
  ClassificationMetrics m;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool actual = truth[i] == positive_label;
    const bool predicted = predictions[i] == positive_label;
    if (actual && predicted) ++m.tp;
    else if (actual) ++m.fn;
    else if (predicted) ++m.fp;
    else ++m.tn;
  }
  if (m.tp + m.fn == 0 || m.tn + m.fp == 0)
    raise(ErrorCode::degenerate_labels,
          "metrics need both classes present in the truth labels");
  m.accuracy = double(m.tp + m.tn) / double(m.tp + m.fn + m.tn + m.fp);
  m.sensitivity = double(m.tp) / double(m.tp + m.fn);
  m.specificity = double(m.tn) / double(m.tn + m.fp);
  return m;
}

}  // namespace shapekit
