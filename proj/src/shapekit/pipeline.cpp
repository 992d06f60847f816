#include "shapekit/pipeline.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "shapekit/central.hpp"
#include "shapekit/parallel.hpp"

namespace shapekit {

namespace {

struct AlignedStage {
  ShapeSample aligned;    // reduced template, GPA coordinates
  ShapeSample features;   // classifier input: residuals when size-corrected
  std::vector<double> log_sizes;
  std::optional<AllometricModel> allometry;
};

AlignedStage run_alignment(const ShapeSample& raw, const PipelineConfig& config) {
  AlignedStage stage;
  const ShapeSample reduced = remove_landmarks(raw, config.removed_landmarks);
  stage.log_sizes.reserve(reduced.members.size());
  for (const auto& member : reduced.members)
    stage.log_sizes.push_back(std::log(centroid_size(member)));
  stage.aligned = fgpa(reduced).aligned;
  if (config.size_correction) {
    stage.allometry = fit_allometry(stage.aligned, stage.log_sizes);
    stage.features = residualize(stage.aligned, stage.log_sizes, *stage.allometry);
  } else {
    stage.features = stage.aligned;
  }
  return stage;
}

// RT always comes from the aligned Procrustes coordinates. Allometric
// residuals have column means of zero, so a residual-based mean target
// would collapse fOPA; the residuals stay in the classifier space only.
LandmarkConfiguration compute_target(const ShapeSample& aligned,
                                     ReferenceTarget target) {
  return target == ReferenceTarget::mean ? mean_shape(aligned)
                                         : functional_median(aligned);
}

std::vector<std::string> member_labels(const ShapeSample& sample) {
  std::vector<std::string> labels;
  labels.reserve(sample.members.size());
  for (const auto& member : sample.members) labels.push_back(member.label);
  return labels;
}

int resolve_knn_k(const Eigen::MatrixXd& X, const std::vector<std::string>& labels,
                  const PipelineConfig& config) {
  if (config.knn.k > 0) return config.knn.k;
  if (config.knn.candidates.empty())
    raise(ErrorCode::invalid_input,
          "kNN needs either a fixed k or oracle candidates");
  return select_k(X, labels, config.positive_class, config.knn.candidates);
}

ClassifierModel train_stage_classifier(const AlignedStage& stage,
                                       const PipelineConfig& config,
                                       ClassifierKind kind, int knn_k) {
  const Eigen::MatrixXd X = feature_matrix(stage.features);
  const std::vector<std::string> labels = member_labels(stage.features);
  if (kind == ClassifierKind::knn && knn_k == 0)
    knn_k = resolve_knn_k(X, labels, config);
  return train(kind, X, labels, config.positive_class, knn_k);
}

ShapeSample erase_member(const ShapeSample& sample, int index) {
  ShapeSample out;
  out.state = sample.state;
  out.members.reserve(sample.members.size() - 1);
  for (int i = 0; i < sample.n(); ++i)
    if (i != index) out.members.push_back(sample.members[i]);
  return out;
}

ClassificationMetrics summarize(const std::vector<LooRecord>& records,
                                const std::string& positive) {
  std::vector<std::string> predicted, truth;
  predicted.reserve(records.size());
  truth.reserve(records.size());
  for (const auto& record : records) {
    predicted.push_back(record.predicted);
    truth.push_back(record.truth);
  }
  return metrics(predicted, truth, positive);
}

}  // namespace

Eigen::MatrixXd feature_matrix(const ShapeSample& sample) {
  Eigen::MatrixXd X(sample.n(), 2 * sample.k());
  for (int i = 0; i < sample.n(); ++i)
    X.row(i) = flatten(sample.members[i]).transpose();
  return X;
}

FrozenReference build_reference(const ShapeSample& training,
                                const PipelineConfig& config) {
  validate_sample(training);
  if (training.state != AlignmentState::raw)
    raise(ErrorCode::invalid_input, "build_reference expects raw configurations");

  FrozenReference ref;
  ref.template_k = training.k();
  ref.removed_landmarks = config.removed_landmarks;
  ref.config = config;
  if (config.target == ReferenceTarget::functional_median &&
      config.removed_landmarks.empty())
    ref.warnings.push_back(
        "functional-median registration with no collinearity removal is "
        "numerically unstable for LDA/LR; consider dropping the dependent "
        "landmarks");

  AlignedStage stage = run_alignment(training, config);
  ref.reference_target = compute_target(stage.aligned, config.target);
  ref.classifier = train_stage_classifier(stage, config, config.classifier,
                                          config.knn.k);
  ref.aligned_training = std::move(stage.aligned);
  ref.allometry = std::move(stage.allometry);
  for (const auto& warning : ref.classifier.warnings) ref.warnings.push_back(warning);
  return ref;
}

FrozenReference build_fold_reference(const ShapeSample& sample,
                                     const PipelineConfig& config,
                                     int exclude_index) {
  if (exclude_index < 0 || exclude_index >= sample.n())
    raise(ErrorCode::invalid_input, "fold index out of range");
  return build_reference(erase_member(sample, exclude_index), config);
}

ClassificationOutcome classify_new(const FrozenReference& reference,
                                   const LandmarkConfiguration& raw_new) {
  if (raw_new.k() != reference.template_k)
    raise(ErrorCode::template_mismatch,
          "individual '" + raw_new.id + "' has " + std::to_string(raw_new.k()) +
              " landmarks, the reference template has " +
              std::to_string(reference.template_k));
  const LandmarkConfiguration reduced =
      remove_landmarks(raw_new, reference.removed_landmarks);
  const OpaResult opa = fopa(reduced, reference.reference_target);
  const LandmarkConfiguration features =
      reference.allometry ? residualize_new(opa.aligned, reduced, *reference.allometry)
                          : opa.aligned;
  const Prediction prediction = predict(reference.classifier, flatten(features));
  return {prediction.label, prediction.score, {opa.residual_ss}};
}

std::vector<LooResult> loo_out_of_sample_multi(const ShapeSample& sample,
                                               const PipelineConfig& base,
                                               const std::vector<LooVariant>& variants) {
  validate_sample(sample);
  if (sample.n() < 4)
    raise(ErrorCode::insufficient_sample,
          "leave-one-out needs at least 4 individuals");
  if (variants.empty())
    raise(ErrorCode::invalid_input, "no evaluation variants given");
  const auto classes = resolve_classes(member_labels(sample), base.positive_class);

  // The kNN oracle (when requested) is resolved once, on the in-sample
  // features of the whole sample, then held fixed across folds.
  std::vector<LooVariant> resolved = variants;
  {
    bool needs_oracle = false;
    for (const auto& variant : resolved)
      needs_oracle |= variant.classifier == ClassifierKind::knn && variant.knn_k == 0;
    if (needs_oracle) {
      const AlignedStage whole = run_alignment(sample, base);
      const int k = resolve_knn_k(feature_matrix(whole.features),
                                  member_labels(whole.features), base);
      for (auto& variant : resolved)
        if (variant.classifier == ClassifierKind::knn && variant.knn_k == 0)
          variant.knn_k = k;
    }
  }

  const int n = sample.n();
  std::vector<std::vector<LooRecord>> records(resolved.size());
  for (auto& r : records) r.resize(n);

  parallel_for(n, [&](int i) {
    const ShapeSample fold_sample = erase_member(sample, i);
    const AlignedStage stage = run_alignment(fold_sample, base);

    std::map<ClassifierKind, ClassifierModel> classifiers;
    std::map<ReferenceTarget, FrozenReference> references;
    for (const auto& variant : resolved) {
      if (!classifiers.count(variant.classifier))
        classifiers.emplace(variant.classifier,
                            train_stage_classifier(stage, base, variant.classifier,
                                                   variant.knn_k));
      if (!references.count(variant.target)) {
        FrozenReference ref;
        ref.template_k = sample.k();
        ref.removed_landmarks = base.removed_landmarks;
        ref.config = base;
        ref.reference_target = compute_target(stage.aligned, variant.target);
        ref.allometry = stage.allometry;
        references.emplace(variant.target, std::move(ref));
      }
    }

    for (std::size_t v = 0; v < resolved.size(); ++v) {
      FrozenReference ref = references.at(resolved[v].target);
      ref.classifier = classifiers.at(resolved[v].classifier);
      const ClassificationOutcome outcome = classify_new(ref, sample.members[i]);
      records[v][i] = {sample.members[i].id, sample.members[i].label, outcome.label,
                       outcome.score, outcome.diagnostics.fopa_residual_ss};
    }
  });

  std::vector<LooResult> results(resolved.size());
  for (std::size_t v = 0; v < resolved.size(); ++v) {
    results[v].records = std::move(records[v]);
    results[v].summary = summarize(results[v].records, classes[1]);
  }
  return results;
}

LooResult loo_out_of_sample(const ShapeSample& sample, const PipelineConfig& config) {
  const LooVariant variant{config.classifier, config.knn.k, config.target};
  return loo_out_of_sample_multi(sample, config, {variant}).front();
}

ClassificationMetrics loo_in_sample(const ShapeSample& sample,
                                    const PipelineConfig& config) {
  validate_sample(sample);
  if (sample.n() < 4)
    raise(ErrorCode::insufficient_sample,
          "leave-one-out needs at least 4 individuals");
  const auto classes = resolve_classes(member_labels(sample), config.positive_class);

  const AlignedStage stage = run_alignment(sample, config);
  const Eigen::MatrixXd X = feature_matrix(stage.features);
  const std::vector<std::string> labels = member_labels(stage.features);
  int knn_k = config.classifier == ClassifierKind::knn
                  ? resolve_knn_k(X, labels, config)
                  : 0;

  const int n = sample.n();
  std::vector<std::string> predicted(n);
  parallel_for(n, [&](int i) {
    Eigen::MatrixXd fold_X(n - 1, X.cols());
    std::vector<std::string> fold_labels;
    fold_labels.reserve(n - 1);
    int row = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      fold_X.row(row++) = X.row(j);
      fold_labels.push_back(labels[j]);
    }
    const ClassifierModel model =
        train(config.classifier, fold_X, fold_labels, config.positive_class, knn_k);
    predicted[i] = predict(model, X.row(i).transpose()).label;
  });
  return metrics(predicted, labels, classes[1]);
}

std::vector<StratumResult> stratified_evaluation(const ShapeSample& sample,
                                                 const PipelineConfig& config,
                                                 const std::vector<std::string>& strata_keys) {
  validate_sample(sample);
  if (strata_keys.empty())
    raise(ErrorCode::invalid_input, "no strata keys given");

  auto stratum_of = [&](const LandmarkConfiguration& member) {
    std::string name;
    for (const auto& key : strata_keys) {
      std::string part;
      if (key == "age24") {
        auto hit = member.covariates.find("age_months");
        if (hit == member.covariates.end())
          raise(ErrorCode::invalid_input,
                "individual '" + member.id + "' lacks the age_months covariate");
        double age = 0.0;
        try {
          age = std::stod(hit->second);
        } catch (const std::exception&) {
          raise(ErrorCode::invalid_input,
                "individual '" + member.id + "' has non-numeric age_months '" +
                    hit->second + "'");
        }
        part = age <= 24.0 ? "age<=24" : "age>24";
      } else {
        auto hit = member.covariates.find(key);
        if (hit == member.covariates.end())
          raise(ErrorCode::invalid_input,
                "individual '" + member.id + "' lacks the '" + key + "' covariate");
        part = key + "=" + hit->second;
      }
      if (!name.empty()) name += "/";
      name += part;
    }
    return name;
  };

  std::map<std::string, ShapeSample> strata;
  for (const auto& member : sample.members) {
    auto& stratum = strata[stratum_of(member)];
    stratum.state = sample.state;
    stratum.members.push_back(member);
  }

  std::vector<StratumResult> results;
  results.reserve(strata.size());
  for (auto& [name, stratum] : strata) {
    try {
      StratumResult entry;
      entry.stratum = name;
      entry.n = stratum.n();
      entry.result = loo_out_of_sample(stratum, config);
      results.push_back(std::move(entry));
    } catch (const Error& e) {
      raise(e.code(), "stratum '" + name + "': " + e.what());
    }
  }
  return results;
}

PcaResult pca_shape(const ShapeSample& aligned, int components) {
  validate_sample(aligned);
  if (aligned.state == AlignmentState::raw)
    raise(ErrorCode::invalid_input, "PCA expects aligned coordinates");
  const int n = aligned.n();
  const int p = 2 * aligned.k();
  if (components < 1 || components > std::min(n - 1, p))
    raise(ErrorCode::invalid_input,
          "components must lie in [1, min(n-1, p)] = [1, " +
              std::to_string(std::min(n - 1, p)) + "]");

  Eigen::MatrixXd X = feature_matrix(aligned);
  const Eigen::RowVectorXd mean = X.colwise().mean();
  X.rowwise() -= mean;
  const Eigen::MatrixXd cov = X.transpose() * X / double(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const double total = std::max(cov.trace(), 0.0);

  PcaResult result;
  result.loadings.resize(p, components);
  result.eigenvalues.resize(components);
  result.variance_fractions.resize(components);
  for (int c = 0; c < components; ++c) {
    const int which = p - 1 - c;
    Eigen::VectorXd axis = eig.eigenvectors().col(which);
    int arg = 0;
    for (int r = 1; r < p; ++r)
      if (std::abs(axis[r]) > std::abs(axis[arg])) arg = r;
    if (axis[arg] < 0.0) axis = -axis;
    result.loadings.col(c) = axis;
    result.eigenvalues[c] = std::max(eig.eigenvalues()[which], 0.0);
    result.variance_fractions[c] =
        total > 0.0 ? result.eigenvalues[c] / total : 0.0;
  }
  result.scores = X * result.loadings;
  return result;
}

ShapeSample collinear_augment(const ShapeSample& sample,
                              const std::vector<CollinearRule>& rules) {
  validate_sample(sample);
  if (rules.empty()) return sample;
  const int k = sample.k();
  for (const auto& rule : rules) {
    if (rule.terms.empty())
      raise(ErrorCode::invalid_input, "collinear rule has no source terms");
    for (const auto& [source, weight] : rule.terms) {
      (void)weight;
      if (source < 1 || source > k)
        raise(ErrorCode::invalid_input,
              "collinear rule references landmark " + std::to_string(source) +
                  " outside the template of size " + std::to_string(k));
    }
  }

  ShapeSample out = sample;
  for (auto& member : out.members) {
    Eigen::MatrixX2d extended(k + static_cast<int>(rules.size()), 2);
    extended.topRows(k) = member.points;
    for (std::size_t r = 0; r < rules.size(); ++r) {
      Eigen::RowVector2d point = rules[r].offset;
      for (const auto& [source, weight] : rules[r].terms)
        point += weight * member.points.row(source - 1);
      extended.row(k + static_cast<int>(r)) = point;
    }
    member.points = std::move(extended);
  }
  return out;
}

}  // namespace shapekit
