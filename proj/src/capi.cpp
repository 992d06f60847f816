#include "shapekit/shapekit.h"

#include <cmath>
#include <cstring>
#include <sstream>
#include <tuple>

#include "shapekit/artifact.hpp"
#include "shapekit/central.hpp"
#include "shapekit/edma.hpp"
#include "shapekit/pipeline.hpp"
#include "shapekit/procrustes.hpp"
#include "shapekit/simulate.hpp"
#include "shapekit/tps.hpp"

using namespace shapekit;

namespace {

thread_local std::string g_last_error;

sk_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return SK_ERR_INVALID_INPUT;
    case ErrorCode::template_mismatch: return SK_ERR_TEMPLATE_MISMATCH;
    case ErrorCode::degenerate_configuration: return SK_ERR_DEGENERATE_CONFIGURATION;
    case ErrorCode::insufficient_sample: return SK_ERR_INSUFFICIENT_SAMPLE;
    case ErrorCode::singular_regressor: return SK_ERR_SINGULAR_REGRESSOR;
    case ErrorCode::degenerate_labels: return SK_ERR_DEGENERATE_LABELS;
    case ErrorCode::parse_error: return SK_ERR_PARSE;
    case ErrorCode::io_error: return SK_ERR_IO;
    case ErrorCode::version_mismatch: return SK_ERR_VERSION_MISMATCH;
    case ErrorCode::integrity_error: return SK_ERR_INTEGRITY;
  }
  return SK_ERR_INTERNAL;
}

template <typename Fn>
sk_status guarded(Fn&& fn) {
  try {
    fn();
    return SK_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SK_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SK_ERR_INTERNAL;
  }
}

[[noreturn]] void require_fail(const char* what) {
  raise(ErrorCode::invalid_input, std::string("null ") + what);
}

template <typename T>
const T* required(const T* ptr, const char* what) {
  if (!ptr) require_fail(what);
  return ptr;
}

std::string target_label(ReferenceTarget target) {
  return target == ReferenceTarget::mean ? "mean" : "functional-median";
}

std::string classifier_label(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::lda: return "lda";
    case ClassifierKind::logistic: return "lr";
    case ClassifierKind::knn: return "knn";
  }
  return "lda";
}

}  // namespace

struct sk_sample {
  ShapeSample sample;
  std::vector<double> raw_sizes;  // per member, when aligned
};

struct sk_model {
  FrozenReference reference;
};

struct sk_table {
  struct Column {
    std::string name;
    int kind = SK_COL_TEXT;
    std::vector<std::string> text;
    std::vector<double> numbers;
  };
  std::vector<Column> columns;
  int rows = 0;

  Column& add(const std::string& name, int kind) {
    columns.push_back({name, kind, {}, {}});
    return columns.back();
  }
  void put(Column& col, const std::string& value) { col.text.push_back(value); }
  void put(Column& col, double value) { col.numbers.push_back(value); }
};

namespace {

sk_table* metrics_rows_table(const std::vector<std::tuple<std::string, int, ClassificationMetrics>>& rows,
                             const std::string& key_name) {
  auto* table = new sk_table;
  auto& key = table->add(key_name, SK_COL_TEXT);
  auto& n = table->add("n", SK_COL_METRIC);
  auto& tp = table->add("TP", SK_COL_METRIC);
  auto& fn = table->add("FN", SK_COL_METRIC);
  auto& tn = table->add("TN", SK_COL_METRIC);
  auto& fp = table->add("FP", SK_COL_METRIC);
  auto& acc = table->add("Acc", SK_COL_METRIC);
  auto& sens = table->add("Sens", SK_COL_METRIC);
  auto& spec = table->add("Spec", SK_COL_METRIC);
  for (const auto& [name, count, m] : rows) {
    table->put(key, name);
    table->put(n, double(count));
    table->put(tp, double(m.tp));
    table->put(fn, double(m.fn));
    table->put(tn, double(m.tn));
    table->put(fp, double(m.fp));
    table->put(acc, m.accuracy);
    table->put(sens, m.sensitivity);
    table->put(spec, m.specificity);
  }
  table->rows = static_cast<int>(rows.size());
  return table;
}

void fill_metrics(const ClassificationMetrics& m, sk_metrics* out) {
  out->accuracy = m.accuracy;
  out->sensitivity = m.sensitivity;
  out->specificity = m.specificity;
  out->tp = m.tp;
  out->fn = m.fn;
  out->tn = m.tn;
  out->fp = m.fp;
}

PipelineConfig convert_config(const sk_config* config) {
  required(config, "config");
  PipelineConfig out;
  out.size_correction = config->size_correction != 0;
  out.target = config->target == SK_TARGET_FUNCTIONAL_MEDIAN
                   ? ReferenceTarget::functional_median
                   : ReferenceTarget::mean;
  switch (config->classifier) {
    case SK_CLASSIFIER_LDA: out.classifier = ClassifierKind::lda; break;
    case SK_CLASSIFIER_LR: out.classifier = ClassifierKind::logistic; break;
    case SK_CLASSIFIER_KNN: out.classifier = ClassifierKind::knn; break;
    default:
      raise(ErrorCode::invalid_input, "unknown classifier code " +
                                          std::to_string(config->classifier));
  }
  out.knn.k = config->knn_k;
  if (config->knn_candidates && config->n_knn_candidates > 0)
    out.knn.candidates.assign(config->knn_candidates,
                              config->knn_candidates + config->n_knn_candidates);
  out.removed_landmarks.clear();
  if (config->drop_landmarks && config->n_drop > 0)
    out.removed_landmarks.assign(config->drop_landmarks,
                                 config->drop_landmarks + config->n_drop);
  if (config->positive_class) out.positive_class = config->positive_class;
  out.seed = config->seed;
  return out;
}

MeanShapePair means_or_builtin(const char* means_tps) {
  return means_tps && *means_tps ? load_mean_shapes(means_tps)
                                 : builtin_mean_shapes();
}

LooResult ratio_features_loo(const ShapeSample& sample, const PipelineConfig& config) {
  const int n = sample.n();
  if (n < 4)
    raise(ErrorCode::insufficient_sample, "leave-one-out needs at least 4 individuals");
  Eigen::MatrixXd X(n, 4);
  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) {
    const RatioVector r = ratios(sample.members[i]);
    X.row(i) << r.r1, r.r2, r.r3, r.r4;
    labels[i] = sample.members[i].label;
  }
  const auto classes = resolve_classes(labels, config.positive_class);
  int knn_k = 0;
  if (config.classifier == ClassifierKind::knn) {
    knn_k = config.knn.k > 0
                ? config.knn.k
                : select_k(X, labels, config.positive_class,
                           config.knn.candidates.empty()
                               ? std::vector<int>{3, 5, 7, 9, 11}
                               : config.knn.candidates);
  }
  LooResult result;
  result.records.resize(n);
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd fold_X(n - 1, 4);
    std::vector<std::string> fold_labels;
    fold_labels.reserve(n - 1);
    int row = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      fold_X.row(row++) = X.row(j);
      fold_labels.push_back(labels[j]);
    }
    const ClassifierModel model = train(config.classifier, fold_X, fold_labels,
                                        config.positive_class, knn_k);
    const Prediction pred = predict(model, X.row(i).transpose());
    result.records[i] = {sample.members[i].id, labels[i], pred.label, pred.score, 0.0};
  }
  std::vector<std::string> predicted(n), truth(n);
  for (int i = 0; i < n; ++i) {
    predicted[i] = result.records[i].predicted;
    truth[i] = result.records[i].truth;
  }
  result.summary = metrics(predicted, truth, classes[1]);
  return result;
}

}  // namespace

extern "C" {

const char* sk_version(void) { return "1.0.0"; }

const char* sk_last_error(void) { return g_last_error.c_str(); }

sk_status sk_sample_read_tps(const char* tps_path, const char* labels_csv,
                             sk_sample** out) {
  return guarded([&] {
    required(tps_path, "tps_path");
    required(out, "output handle");
    const auto records = read_tps_file(tps_path);
    if (labels_csv && *labels_csv) {
      const LabelTable labels = read_labels_csv(labels_csv);
      *out = new sk_sample{sample_from_records(records, &labels), {}};
    } else {
      *out = new sk_sample{sample_from_records(records), {}};
    }
  });
}

sk_status sk_sample_read_aligned_csv(const char* csv_path, sk_sample** out) {
  return guarded([&] {
    required(csv_path, "csv_path");
    required(out, "output handle");
    const std::string text = read_text_file(csv_path);
    std::istringstream stream(text);
    std::string line;
    if (!std::getline(stream, line))
      raise(ErrorCode::parse_error, "aligned CSV is empty");
    auto split = [](const std::string& s) {
      std::vector<std::string> cells;
      std::string cell;
      std::istringstream row(s);
      while (std::getline(row, cell, ',')) cells.push_back(cell);
      return cells;
    };
    const auto header = split(line);
    if (header.size() < 4 || header[0] != "id" || header[1] != "label")
      raise(ErrorCode::parse_error,
            "aligned CSV must start with 'id,label[,csize],x1,y1,...'");
    const bool has_size = header[2] == "csize";
    const std::size_t first_coord = has_size ? 3 : 2;
    const std::size_t n_coords = header.size() - first_coord;
    if (n_coords < 6 || n_coords % 2 != 0)
      raise(ErrorCode::parse_error, "aligned CSV needs >= 3 landmark columns");

    auto* handle = new sk_sample;
    handle->sample.state = AlignmentState::aligned;
    int line_number = 1;
    try {
      while (std::getline(stream, line)) {
        ++line_number;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size())
          raise(ErrorCode::parse_error,
                "aligned CSV line " + std::to_string(line_number) +
                    " has the wrong cell count");
        LandmarkConfiguration config;
        config.id = cells[0];
        config.label = cells[1];
        if (has_size) handle->raw_sizes.push_back(std::stod(cells[2]));
        config.points.resize(n_coords / 2, 2);
        for (std::size_t c = 0; c < n_coords; ++c)
          config.points(c / 2, c % 2) = std::stod(cells[first_coord + c]);
        handle->sample.members.push_back(std::move(config));
      }
      validate_sample(handle->sample);
    } catch (...) {
      delete handle;
      throw;
    }
    *out = handle;
  });
}

sk_status sk_sample_write_tps(const sk_sample* sample, const char* path) {
  return guarded([&] {
    required(sample, "sample");
    required(path, "path");
    write_tps_file(records_from_sample(sample->sample), path);
  });
}

void sk_sample_free(sk_sample* sample) { delete sample; }

int sk_sample_size(const sk_sample* sample) {
  return sample ? sample->sample.n() : 0;
}

int sk_sample_landmarks(const sk_sample* sample) {
  return sample ? sample->sample.k() : 0;
}

sk_status sk_sample_to_table(const sk_sample* sample, sk_table** out) {
  return guarded([&] {
    required(sample, "sample");
    required(out, "output handle");
    const ShapeSample& s = sample->sample;
    const bool aligned = s.state != AlignmentState::raw &&
                         sample->raw_sizes.size() == s.members.size();
    auto* table = new sk_table;
    auto& id = table->add("id", SK_COL_TEXT);
    auto& label = table->add("label", SK_COL_TEXT);
    sk_table::Column* csize = aligned ? &table->add("csize", SK_COL_COORDINATE) : nullptr;
    std::vector<sk_table::Column*> coords;
    for (int l = 1; l <= s.k(); ++l) {
      coords.push_back(&table->add("x" + std::to_string(l), SK_COL_COORDINATE));
      coords.push_back(&table->add("y" + std::to_string(l), SK_COL_COORDINATE));
    }
    for (int i = 0; i < s.n(); ++i) {
      table->put(id, s.members[i].id);
      table->put(label, s.members[i].label);
      if (csize) table->put(*csize, sample->raw_sizes[i]);
      for (int l = 0; l < s.k(); ++l) {
        table->put(*coords[2 * l], s.members[i].points(l, 0));
        table->put(*coords[2 * l + 1], s.members[i].points(l, 1));
      }
    }
    table->rows = s.n();
    *out = table;
  });
}

void sk_config_init(sk_config* config) {
  if (!config) return;
  static const int default_drop[2] = {2, 3};
  std::memset(config, 0, sizeof(*config));
  config->size_correction = 1;
  config->target = SK_TARGET_MEAN;
  config->classifier = SK_CLASSIFIER_LDA;
  config->drop_landmarks = default_drop;
  config->n_drop = 2;
}

sk_status sk_align(const sk_sample* raw, sk_sample** aligned_out) {
  return guarded([&] {
    required(raw, "sample");
    required(aligned_out, "output handle");
    auto* handle = new sk_sample;
    try {
      for (const auto& member : raw->sample.members)
        handle->raw_sizes.push_back(centroid_size(member));
      handle->sample = fgpa(raw->sample).aligned;
    } catch (...) {
      delete handle;
      throw;
    }
    *aligned_out = handle;
  });
}

sk_status sk_train(const sk_sample* raw, const sk_config* config, sk_model** out) {
  return guarded([&] {
    required(raw, "sample");
    required(out, "output handle");
    *out = new sk_model{build_reference(raw->sample, convert_config(config))};
  });
}

sk_status sk_model_save(const sk_model* model, const char* path) {
  return guarded([&] {
    required(model, "model");
    required(path, "path");
    save_artifact(model->reference, path);
  });
}

sk_status sk_model_load(const char* path, sk_model** out) {
  return guarded([&] {
    required(path, "path");
    required(out, "output handle");
    *out = new sk_model{load_artifact(path)};
  });
}

void sk_model_free(sk_model* model) { delete model; }

int sk_model_warning_count(const sk_model* model) {
  return model ? static_cast<int>(model->reference.warnings.size()) : 0;
}

const char* sk_model_warning(const sk_model* model, int index) {
  if (!model || index < 0 ||
      index >= static_cast<int>(model->reference.warnings.size()))
    return nullptr;
  return model->reference.warnings[index].c_str();
}

sk_status sk_classify(const sk_model* model, const sk_sample* raw, sk_table** out) {
  return guarded([&] {
    required(model, "model");
    required(raw, "sample");
    required(out, "output handle");
    auto* table = new sk_table;
    try {
      auto& id = table->add("id", SK_COL_TEXT);
      auto& predicted = table->add("predicted", SK_COL_TEXT);
      auto& score = table->add("score", SK_COL_METRIC);
      auto& residual = table->add("fopa_residual_ss", SK_COL_METRIC);
      for (const auto& member : raw->sample.members) {
        const ClassificationOutcome outcome = classify_new(model->reference, member);
        table->put(id, member.id);
        table->put(predicted, outcome.label);
        table->put(score, outcome.score);
        table->put(residual, outcome.diagnostics.fopa_residual_ss);
      }
      table->rows = raw->sample.n();
    } catch (...) {
      delete table;
      throw;
    }
    *out = table;
  });
}

sk_status sk_loo(const sk_sample* raw, const sk_config* config, sk_metrics* out,
                 sk_table** records_out) {
  return guarded([&] {
    required(raw, "sample");
    required(out, "metrics output");
    const LooResult result = loo_out_of_sample(raw->sample, convert_config(config));
    fill_metrics(result.summary, out);
    if (records_out) {
      auto* table = new sk_table;
      auto& id = table->add("id", SK_COL_TEXT);
      auto& truth = table->add("truth", SK_COL_TEXT);
      auto& predicted = table->add("predicted", SK_COL_TEXT);
      auto& score = table->add("score", SK_COL_METRIC);
      auto& residual = table->add("fopa_residual_ss", SK_COL_METRIC);
      for (const auto& record : result.records) {
        table->put(id, record.id);
        table->put(truth, record.truth);
        table->put(predicted, record.predicted);
        table->put(score, record.score);
        table->put(residual, record.fopa_residual_ss);
      }
      table->rows = static_cast<int>(result.records.size());
      *records_out = table;
    }
  });
}

sk_status sk_loo_in_sample(const sk_sample* raw, const sk_config* config,
                           sk_metrics* out) {
  return guarded([&] {
    required(raw, "sample");
    required(out, "metrics output");
    fill_metrics(loo_in_sample(raw->sample, convert_config(config)), out);
  });
}

sk_status sk_loo_stratified(const sk_sample* raw, const sk_config* config,
                            const char* strata_keys, sk_table** out) {
  return guarded([&] {
    required(raw, "sample");
    required(strata_keys, "strata keys");
    required(out, "output handle");
    std::vector<std::string> keys;
    std::istringstream stream(strata_keys);
    std::string key;
    while (std::getline(stream, key, ','))
      if (!key.empty()) keys.push_back(key);
    const auto strata =
        stratified_evaluation(raw->sample, convert_config(config), keys);
    std::vector<std::tuple<std::string, int, ClassificationMetrics>> rows;
    rows.reserve(strata.size());
    for (const auto& stratum : strata)
      rows.emplace_back(stratum.stratum, stratum.n, stratum.result.summary);
    *out = metrics_rows_table(rows, "stratum");
  });
}

sk_status sk_pca(const sk_sample* aligned, int components, sk_table** scores_out,
                 sk_table** summary_out) {
  return guarded([&] {
    required(aligned, "sample");
    required(scores_out, "scores output");
    required(summary_out, "summary output");
    const PcaResult pca = pca_shape(aligned->sample, components);

    auto* scores = new sk_table;
    auto& id = scores->add("id", SK_COL_TEXT);
    auto& label = scores->add("label", SK_COL_TEXT);
    std::vector<sk_table::Column*> pcs;
    for (int c = 1; c <= components; ++c)
      pcs.push_back(&scores->add("pc" + std::to_string(c), SK_COL_COORDINATE));
    for (int i = 0; i < aligned->sample.n(); ++i) {
      scores->put(id, aligned->sample.members[i].id);
      scores->put(label, aligned->sample.members[i].label);
      for (int c = 0; c < components; ++c) scores->put(*pcs[c], pca.scores(i, c));
    }
    scores->rows = aligned->sample.n();

    auto* summary = new sk_table;
    auto& component = summary->add("component", SK_COL_METRIC);
    auto& eigenvalue = summary->add("eigenvalue", SK_COL_METRIC);
    auto& fraction = summary->add("variance_fraction", SK_COL_METRIC);
    for (int c = 0; c < components; ++c) {
      summary->put(component, double(c + 1));
      summary->put(eigenvalue, pca.eigenvalues[c]);
      summary->put(fraction, pca.variance_fractions[c]);
    }
    summary->rows = components;

    *scores_out = scores;
    *summary_out = summary;
  });
}

sk_status sk_ratios(const sk_sample* sample, sk_table** out) {
  return guarded([&] {
    required(sample, "sample");
    required(out, "output handle");
    auto* table = new sk_table;
    try {
      auto& id = table->add("id", SK_COL_TEXT);
      auto& label = table->add("label", SK_COL_TEXT);
      auto& r1 = table->add("r1", SK_COL_METRIC);
      auto& r2 = table->add("r2", SK_COL_METRIC);
      auto& r3 = table->add("r3", SK_COL_METRIC);
      auto& r4 = table->add("r4", SK_COL_METRIC);
      for (const auto& member : sample->sample.members) {
        const RatioVector r = ratios(member);
        table->put(id, member.id);
        table->put(label, member.label);
        table->put(r1, r.r1);
        table->put(r2, r.r2);
        table->put(r3, r.r3);
        table->put(r4, r.r4);
      }
      table->rows = sample->sample.n();
    } catch (...) {
      delete table;
      throw;
    }
    *out = table;
  });
}

sk_status sk_ratio_loo(const sk_sample* sample, const sk_config* config,
                       sk_table** out) {
  return guarded([&] {
    required(sample, "sample");
    required(out, "output handle");
    const PipelineConfig cfg = convert_config(config);
    std::vector<std::tuple<std::string, int, ClassificationMetrics>> rows;
    rows.emplace_back("whole", sample->sample.n(),
                      ratio_features_loo(sample->sample, cfg).summary);

    bool has_age = true;
    for (const auto& member : sample->sample.members)
      has_age &= member.covariates.count("age_months") > 0;
    if (has_age) {
      ShapeSample young, old;
      young.state = old.state = sample->sample.state;
      for (const auto& member : sample->sample.members) {
        (std::stod(member.covariates.at("age_months")) <= 24.0 ? young : old)
            .members.push_back(member);
      }
      if (!young.members.empty())
        rows.emplace_back("age<=24", young.n(),
                          ratio_features_loo(young, cfg).summary);
      if (!old.members.empty())
        rows.emplace_back("age>24", old.n(), ratio_features_loo(old, cfg).summary);
    }
    *out = metrics_rows_table(rows, "stratum");
  });
}

sk_status sk_edma_tests(const sk_sample* sample, const char* numerator_label,
                        const char* denominator_label, int bootstrap_B,
                        double confidence, unsigned long long seed,
                        double* observed_T, double* p_value, sk_table** local_out) {
  return guarded([&] {
    required(sample, "sample");
    required(observed_T, "observed_T output");
    required(p_value, "p_value output");

    std::vector<std::string> labels;
    for (const auto& member : sample->sample.members)
      labels.push_back(member.label);
    std::string num = numerator_label ? numerator_label : "";
    std::string den = denominator_label ? denominator_label : "";
    if (num.empty() || den.empty()) {
      const auto classes = resolve_classes(labels, num);
      num = classes[1];
      den = classes[0];
    }

    ShapeSample group_num, group_den;
    group_num.state = group_den.state = sample->sample.state;
    for (const auto& member : sample->sample.members) {
      if (member.label == num) group_num.members.push_back(member);
      else if (member.label == den) group_den.members.push_back(member);
    }
    if (group_num.members.empty() || group_den.members.empty())
      raise(ErrorCode::insufficient_sample,
            "labels '" + num + "' / '" + den + "' do not define two non-empty groups");

    const EdmaGlobalResult global =
        edma_global_test(group_num, group_den, bootstrap_B, seed);
    *observed_T = global.observed_T;
    *p_value = global.p_value;

    if (local_out) {
      const auto entries =
          edma_local_test(group_num, group_den, bootstrap_B, confidence, seed);
      auto* table = new sk_table;
      auto& li = table->add("landmark_i", SK_COL_METRIC);
      auto& lj = table->add("landmark_j", SK_COL_METRIC);
      auto& ratio = table->add("ratio", SK_COL_METRIC);
      auto& lower = table->add("lower", SK_COL_METRIC);
      auto& upper = table->add("upper", SK_COL_METRIC);
      auto& significant = table->add("significant", SK_COL_METRIC);
      for (const auto& entry : entries) {
        table->put(li, double(entry.landmark_i));
        table->put(lj, double(entry.landmark_j));
        table->put(ratio, entry.ratio);
        table->put(lower, entry.lower);
        table->put(upper, entry.upper);
        table->put(significant, entry.significant ? 1.0 : 0.0);
      }
      table->rows = static_cast<int>(entries.size());
      *local_out = table;
    }
  });
}

sk_status sk_edma_mds(const sk_sample* sample, int dims, sk_table** out) {
  return guarded([&] {
    required(sample, "sample");
    required(out, "output handle");
    const int n = sample->sample.n();
    const int use_dims = std::min(dims, n);
    if (dims < 1) raise(ErrorCode::invalid_input, "dims must be >= 1");
    const Eigen::MatrixXd distances = edma_distance_matrix(sample->sample);
    const Eigen::MatrixXd coords = classical_mds(distances, use_dims);
    auto* table = new sk_table;
    auto& id = table->add("id", SK_COL_TEXT);
    auto& label = table->add("label", SK_COL_TEXT);
    std::vector<sk_table::Column*> axes;
    for (int c = 1; c <= use_dims; ++c)
      axes.push_back(&table->add("mds" + std::to_string(c), SK_COL_COORDINATE));
    for (int i = 0; i < n; ++i) {
      table->put(id, sample->sample.members[i].id);
      table->put(label, sample->sample.members[i].label);
      for (int c = 0; c < use_dims; ++c) table->put(*axes[c], coords(i, c));
    }
    table->rows = n;
    *out = table;
  });
}

sk_status sk_simulate_sample(const char* means_tps, int scenario, int n_per_group,
                             double noise_c, unsigned long long seed,
                             sk_sample** out) {
  return guarded([&] {
    required(out, "output handle");
    ScenarioSpec spec;
    spec.scenario_id = scenario;
    spec.n_per_group = n_per_group;
    spec.means = means_or_builtin(means_tps);
    spec.noise_c = noise_c;
    spec.seed = seed;
    *out = new sk_sample{generate(spec), {}};
  });
}

sk_status sk_simulate_study(const char* means_tps, const int* scenarios,
                            int n_scenarios, int runs, int n_per_group,
                            double noise_c, int knn_k, unsigned long long seed,
                            sk_table** out) {
  return guarded([&] {
    required(scenarios, "scenarios");
    required(out, "output handle");
    const std::vector<int> scenario_list(scenarios, scenarios + n_scenarios);
    const auto rows =
        run_study(scenario_list, runs, n_per_group, noise_c, seed,
                  means_or_builtin(means_tps), study_variants(knn_k));
    auto* table = new sk_table;
    auto& scenario = table->add("scenario", SK_COL_METRIC);
    auto& classifier = table->add("classifier", SK_COL_TEXT);
    auto& target = table->add("target", SK_COL_TEXT);
    auto& run_count = table->add("runs", SK_COL_METRIC);
    auto& acc = table->add("Acc", SK_COL_METRIC);
    auto& sens = table->add("Sens", SK_COL_METRIC);
    auto& spec = table->add("Spec", SK_COL_METRIC);
    for (const auto& row : rows) {
      table->put(scenario, double(row.scenario));
      table->put(classifier, classifier_label(row.classifier) +
                                 (row.classifier == ClassifierKind::knn
                                      ? "(k=" + std::to_string(row.knn_k) + ")"
                                      : ""));
      table->put(target, target_label(row.target));
      table->put(run_count, double(row.runs));
      table->put(acc, row.accuracy);
      table->put(sens, row.sensitivity);
      table->put(spec, row.specificity);
    }
    table->rows = static_cast<int>(rows.size());
    *out = table;
  });
}

sk_status sk_calibrate_noise(const char* means_tps, const double* grid, int n_grid,
                             int runs, int n_per_group, unsigned long long seed,
                             sk_table** out, double* chosen_c) {
  return guarded([&] {
    required(grid, "grid");
    required(out, "output handle");
    required(chosen_c, "chosen_c output");
    const std::vector<double> grid_list(grid, grid + n_grid);
    const CalibrationResult result = calibrate_noise_constant(
        grid_list, runs, n_per_group, seed, means_or_builtin(means_tps));
    auto* table = new sk_table;
    auto& c = table->add("c", SK_COL_METRIC);
    auto& acc = table->add("Acc", SK_COL_METRIC);
    for (const auto& point : result.sweep) {
      table->put(c, point.c);
      table->put(acc, point.accuracy);
    }
    table->rows = static_cast<int>(result.sweep.size());
    *out = table;
    *chosen_c = result.chosen_c;
  });
}

sk_status sk_derive_mean_shapes(const char* tps_group1, const char* tps_group2,
                                const char* out_path) {
  return guarded([&] {
    required(tps_group1, "tps_group1");
    required(tps_group2, "tps_group2");
    required(out_path, "out_path");
    std::vector<TpsRecord> fixture;
    const char* ids[2] = {"group1_mean", "group2_mean"};
    const char* paths[2] = {tps_group1, tps_group2};
    for (int g = 0; g < 2; ++g) {
      const ShapeSample sample = sample_from_records(read_tps_file(paths[g]));
      const GpaResult gpa = fgpa(sample);
      TpsRecord record;
      record.points = mean_shape(gpa.aligned).points;
      record.id = ids[g];
      fixture.push_back(std::move(record));
    }
    write_tps_file(fixture, out_path);
  });
}

int sk_table_rows(const sk_table* table) { return table ? table->rows : 0; }

int sk_table_cols(const sk_table* table) {
  return table ? static_cast<int>(table->columns.size()) : 0;
}

const char* sk_table_name(const sk_table* table, int col) {
  if (!table || col < 0 || col >= static_cast<int>(table->columns.size()))
    return nullptr;
  return table->columns[col].name.c_str();
}

int sk_table_col_kind(const sk_table* table, int col) {
  if (!table || col < 0 || col >= static_cast<int>(table->columns.size()))
    return SK_COL_TEXT;
  return table->columns[col].kind;
}

double sk_table_number(const sk_table* table, int row, int col) {
  if (!table || col < 0 || col >= static_cast<int>(table->columns.size()))
    return 0.0;
  const auto& numbers = table->columns[col].numbers;
  if (row < 0 || row >= static_cast<int>(numbers.size())) return 0.0;
  return numbers[row];
}

const char* sk_table_text(const sk_table* table, int row, int col) {
  if (!table || col < 0 || col >= static_cast<int>(table->columns.size()))
    return nullptr;
  const auto& text = table->columns[col].text;
  if (row < 0 || row >= static_cast<int>(text.size())) return nullptr;
  return text[row].c_str();
}

void sk_table_free(sk_table* table) { delete table; }

}  // extern "C"
