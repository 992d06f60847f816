#include "shapekit/artifact.hpp"

#include <json.hpp>

#include "shapekit/tps.hpp"

namespace shapekit {

namespace {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  return m;
}

std::string target_name(ReferenceTarget target) {
  return target == ReferenceTarget::mean ? "mean" : "functional-median";
}

ReferenceTarget target_from_name(const std::string& name) {
  if (name == "mean") return ReferenceTarget::mean;
  if (name == "functional-median") return ReferenceTarget::functional_median;
  raise(ErrorCode::integrity_error, "unknown reference target '" + name + "'");
}

std::string classifier_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::lda: return "lda";
    case ClassifierKind::logistic: return "lr";
    case ClassifierKind::knn: return "knn";
  }
  return "lda";
}

ClassifierKind classifier_from_name(const std::string& name) {
  if (name == "lda") return ClassifierKind::lda;
  if (name == "lr") return ClassifierKind::logistic;
  if (name == "knn") return ClassifierKind::knn;
  raise(ErrorCode::integrity_error, "unknown classifier kind '" + name + "'");
}

json config_to_json(const PipelineConfig& config) {
  json j;
  j["size_correction"] = config.size_correction;
  j["target"] = target_name(config.target);
  j["classifier"] = classifier_name(config.classifier);
  j["knn_k"] = config.knn.k;
  j["knn_candidates"] = config.knn.candidates;
  j["removed_landmarks"] = config.removed_landmarks;
  j["positive_class"] = config.positive_class;
  j["seed"] = config.seed;
  j["alignment"] = "gpa";
  return j;
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig config;
  config.size_correction = j.at("size_correction").get<bool>();
  config.target = target_from_name(j.at("target").get<std::string>());
  config.classifier = classifier_from_name(j.at("classifier").get<std::string>());
  config.knn.k = j.at("knn_k").get<int>();
  config.knn.candidates = j.at("knn_candidates").get<std::vector<int>>();
  config.removed_landmarks = j.at("removed_landmarks").get<std::vector<int>>();
  config.positive_class = j.at("positive_class").get<std::string>();
  config.seed = j.at("seed").get<std::uint64_t>();
  return config;
}

json classifier_to_json(const ClassifierModel& model) {
  json j;
  j["kind"] = classifier_name(model.kind);
  j["classes"] = {model.classes[0], model.classes[1]};
  j["p"] = model.p;
  switch (model.kind) {
    case ClassifierKind::lda:
      j["mean_neg"] = vector_to_json(model.lda_mean_neg);
      j["mean_pos"] = vector_to_json(model.lda_mean_pos);
      j["pooled_covariance"] = matrix_to_json(model.lda_pooled_cov);
      j["priors"] = {model.lda_priors[0], model.lda_priors[1]};
      break;
    case ClassifierKind::logistic:
      j["coefficients"] = vector_to_json(model.lr_coefficients);
      j["separation_flagged"] = model.lr_separation_flagged;
      break;
    case ClassifierKind::knn:
      j["k"] = model.knn_k;
      j["train"] = matrix_to_json(model.knn_train);
      j["labels"] = model.knn_labels;
      j["privacy_note"] =
          "kNN artifacts embed every training individual's coordinates and "
          "class label; distribute with the same care as the raw data";
      break;
  }
  return j;
}

ClassifierModel classifier_from_json(const json& j) {
  ClassifierModel model;
  model.kind = classifier_from_name(j.at("kind").get<std::string>());
  model.classes[0] = j.at("classes")[0].get<std::string>();
  model.classes[1] = j.at("classes")[1].get<std::string>();
  model.p = j.at("p").get<int>();
  switch (model.kind) {
    case ClassifierKind::lda:
      model.lda_mean_neg = vector_from_json(j.at("mean_neg"));
      model.lda_mean_pos = vector_from_json(j.at("mean_pos"));
      model.lda_pooled_cov = matrix_from_json(j.at("pooled_covariance"));
      model.lda_priors = {j.at("priors")[0].get<double>(),
                          j.at("priors")[1].get<double>()};
      finalize_lda_inverse(model);  // deterministic, so scores reload bitwise
      break;
    case ClassifierKind::logistic:
      model.lr_coefficients = vector_from_json(j.at("coefficients"));
      model.lr_separation_flagged = j.at("separation_flagged").get<bool>();
      break;
    case ClassifierKind::knn:
      model.knn_k = j.at("k").get<int>();
      model.knn_train = matrix_from_json(j.at("train"));
      model.knn_labels = j.at("labels").get<std::vector<int>>();
      break;
  }
  return model;
}

}  // namespace

std::string artifact_bytes(const FrozenReference& reference) {
  json payload;
  payload["template"] = {{"k", reference.template_k},
                         {"removed", reference.removed_landmarks}};
  payload["config"] = config_to_json(reference.config);
  payload["reference_target"] = vector_to_json(flatten(reference.reference_target));
  payload["allometry"] = nullptr;
  if (reference.allometry) {
    payload["allometry"] = {
        {"intercepts", vector_to_json(reference.allometry->intercepts)},
        {"slopes", vector_to_json(reference.allometry->slopes)},
        {"trained_on_n", reference.allometry->trained_on_n}};
  }
  payload["classifier"] = classifier_to_json(reference.classifier);
  payload["metrics"] = {{"positive_class", reference.classifier.classes[1]}};
  payload["provenance"] = {
      {"seed", reference.config.seed},
      {"config_digest", hex64(fnv1a64(config_to_json(reference.config).dump()))}};

  const std::string payload_bytes = payload.dump();
  json envelope;
  envelope["format"] = "shapekit-model";
  envelope["version"] = kArtifactVersion;
  envelope["checksum"] = hex64(fnv1a64(payload_bytes));
  envelope["payload"] = std::move(payload);
  return envelope.dump(2) + "\n";
}

FrozenReference artifact_from_bytes(const std::string& bytes) {
  json envelope;
  try {
    envelope = json::parse(bytes);
  } catch (const json::exception& e) {
    raise(ErrorCode::integrity_error,
          std::string("model artifact is not valid JSON: ") + e.what());
  }
  try {
    if (envelope.value("format", "") != "shapekit-model")
      raise(ErrorCode::integrity_error, "not a shapekit model artifact");
    const int version = envelope.at("version").get<int>();
    if (version != kArtifactVersion)
      raise(ErrorCode::version_mismatch,
            "artifact version " + std::to_string(version) +
                " is not supported (expected " + std::to_string(kArtifactVersion) + ")");
    const json& payload = envelope.at("payload");
    if (envelope.at("checksum").get<std::string>() != hex64(fnv1a64(payload.dump())))
      raise(ErrorCode::integrity_error, "artifact checksum mismatch");

    FrozenReference reference;
    reference.template_k = payload.at("template").at("k").get<int>();
    reference.removed_landmarks =
        payload.at("template").at("removed").get<std::vector<int>>();
    reference.config = config_from_json(payload.at("config"));
    reference.reference_target.id = "reference_target";
    reference.reference_target.points =
        unflatten(vector_from_json(payload.at("reference_target")));
    if (!payload.at("allometry").is_null()) {
      AllometricModel model;
      model.intercepts = vector_from_json(payload.at("allometry").at("intercepts"));
      model.slopes = vector_from_json(payload.at("allometry").at("slopes"));
      model.trained_on_n = payload.at("allometry").at("trained_on_n").get<int>();
      reference.allometry = std::move(model);
    }
    reference.classifier = classifier_from_json(payload.at("classifier"));
    reference.aligned_training.state = AlignmentState::aligned;  // not persisted
    return reference;
  } catch (const json::exception& e) {
    raise(ErrorCode::integrity_error,
          std::string("model artifact payload is malformed: ") + e.what());
  }
}

void save_artifact(const FrozenReference& reference, const std::string& path) {
  write_text_file(path, artifact_bytes(reference));
}

FrozenReference load_artifact(const std::string& path) {
  return artifact_from_bytes(read_text_file(path));
}

}  // namespace shapekit
