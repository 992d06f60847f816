#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shapekit/allometry.hpp"
#include "shapekit/classify.hpp"
#include "shapekit/geometry.hpp"
#include "shapekit/procrustes.hpp"

namespace shapekit {

enum class ReferenceTarget { mean, functional_median };

struct KnnSpec {
  int k = 0;                    // > 0: fixed
  std::vector<int> candidates;  // used when k == 0: oracle in-sample selection
};

struct PipelineConfig {
  bool size_correction = true;
  ReferenceTarget target = ReferenceTarget::mean;
  ClassifierKind classifier = ClassifierKind::lda;
  KnnSpec knn;
  std::vector<int> removed_landmarks = {2, 3};  // 1-based collinearity removal
  std::string positive_class;                   // empty = auto (SAM / group-1)
  std::uint64_t seed = 0;

  // Seam for future alignment methods; only GPA is implemented.
  enum class Alignment { gpa } alignment = Alignment::gpa;
};

/// Everything Algorithm 1 freezes after training: the aligned reference
/// sample, the allometric coefficients, the registration target RT and the
/// classification rule. Immutable once built.
struct FrozenReference {
  int template_k = 0;  // landmarks before removal
  std::vector<int> removed_landmarks;
  ShapeSample aligned_training;
  std::optional<AllometricModel> allometry;
  LandmarkConfiguration reference_target;
  ClassifierModel classifier;
  PipelineConfig config;
  std::vector<std::string> warnings;
};

/// Algorithm 1 steps 1-3: landmark removal, fGPA, optional allometric
/// residualization, reference target, classifier training.
FrozenReference build_reference(const ShapeSample& training,
                                const PipelineConfig& config);

/// build_reference on the sample with one member left out (Algorithm 2's
/// per-fold reference; the held-out member is never read).
FrozenReference build_fold_reference(const ShapeSample& sample,
                                     const PipelineConfig& config,
                                     int exclude_index);

struct ClassifyDiagnostics {
  double fopa_residual_ss = 0.0;  // out-of-distribution hint; no thresholding
};

struct ClassificationOutcome {
  std::string label;
  double score = 0.0;
  ClassifyDiagnostics diagnostics;
};

/// Algorithm 1 steps 4-5: fOPA of the raw individual onto RT, optional
/// residualization with the frozen coefficients, classification.
ClassificationOutcome classify_new(const FrozenReference& reference,
                                   const LandmarkConfiguration& raw_new);

struct LooRecord {
  std::string id, truth, predicted;
  double score = 0.0;
  double fopa_residual_ss = 0.0;
};

struct LooResult {
  ClassificationMetrics summary;
  std::vector<LooRecord> records;
};

/// Algorithm 2: per fold, a fresh fGPA / allometry / RT / classifier on the
/// other n-1, then out-of-sample classification of the held-out individual.
LooResult loo_out_of_sample(const ShapeSample& sample, const PipelineConfig& config);

/// Variant grid evaluated against shared per-fold alignment stages. The
/// alignment, allometry and depth ranking of a fold do not depend on the
/// classifier or target choice, so results equal per-variant Algorithm 2 runs.
struct LooVariant {
  ClassifierKind classifier = ClassifierKind::lda;
  int knn_k = 0;
  ReferenceTarget target = ReferenceTarget::mean;
};

std::vector<LooResult> loo_out_of_sample_multi(const ShapeSample& sample,
                                               const PipelineConfig& base,
                                               const std::vector<LooVariant>& variants);

/// In-sample cross validation: one global fGPA (+ allometry), then
/// leave-one-out over classifier training only.
ClassificationMetrics loo_in_sample(const ShapeSample& sample,
                                    const PipelineConfig& config);

struct StratumResult {
  std::string stratum;
  int n = 0;
  LooResult result;
};

/// Runs loo_out_of_sample independently within each stratum. Keys are
/// covariate names; the derived key "age24" splits on age_months <= 24.
std::vector<StratumResult> stratified_evaluation(const ShapeSample& sample,
                                                 const PipelineConfig& config,
                                                 const std::vector<std::string>& strata_keys);

struct PcaResult {
  Eigen::MatrixXd scores;              // n x components
  Eigen::MatrixXd loadings;            // p x components
  Eigen::VectorXd eigenvalues;         // length components, descending
  Eigen::VectorXd variance_fractions;  // of the total variance
};

PcaResult pca_shape(const ShapeSample& aligned, int components);

/// Test generator for landmark collinearity: appends landmarks that are
/// exact affine functions of existing ones.
struct CollinearRule {
  std::vector<std::pair<int, double>> terms;  // (1-based source landmark, weight)
  Eigen::RowVector2d offset = Eigen::RowVector2d::Zero();
};

ShapeSample collinear_augment(const ShapeSample& sample,
                              const std::vector<CollinearRule>& rules);

/// Feature matrix the classifier consumes (flattened member coordinates).
Eigen::MatrixXd feature_matrix(const ShapeSample& sample);

}  // namespace shapekit
