// shapekit command-line interface. Talks to the library exclusively through
// the C API in shapekit/shapekit.h; all report formatting lives here.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "shapekit/shapekit.h"

namespace {

struct TableDeleter {
  void operator()(sk_table* t) const { sk_table_free(t); }
};
struct SampleDeleter {
  void operator()(sk_sample* s) const { sk_sample_free(s); }
};
struct ModelDeleter {
  void operator()(sk_model* m) const { sk_model_free(m); }
};
using TablePtr = std::unique_ptr<sk_table, TableDeleter>;
using SamplePtr = std::unique_ptr<sk_sample, SampleDeleter>;
using ModelPtr = std::unique_ptr<sk_model, ModelDeleter>;

[[noreturn]] void die(const std::string& context) {
  std::fprintf(stderr, "shapekit: %s: %s\n", context.c_str(), sk_last_error());
  std::exit(1);
}

void check(sk_status status, const std::string& context) {
  if (status != SK_OK) die(context);
}

// All outputs go through a temp file + rename so readers never see a
// partially written report.
void write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) {
    std::fprintf(stderr, "shapekit: cannot open '%s' for writing\n", tmp.c_str());
    std::exit(1);
  }
  const bool ok = std::fwrite(content.data(), 1, content.size(), f) == content.size();
  std::fclose(f);
  if (!ok || std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::fprintf(stderr, "shapekit: failed writing '%s'\n", path.c_str());
    std::exit(1);
  }
}

std::string format_number(double value, int kind, int decimals) {
  char buf[48];
  if (kind == SK_COL_COORDINATE)
    std::snprintf(buf, sizeof(buf), "%.17g", value);
  else if (decimals > 0)
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  else
    std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

std::string table_to_csv(const sk_table* table, int decimals) {
  std::string out;
  const int cols = sk_table_cols(table);
  for (int c = 0; c < cols; ++c) {
    if (c) out += ',';
    out += sk_table_name(table, c);
  }
  out += '\n';
  for (int r = 0; r < sk_table_rows(table); ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c) out += ',';
      if (sk_table_col_kind(table, c) == SK_COL_TEXT) {
        const char* text = sk_table_text(table, r, c);
        out += text ? text : "";
      } else {
        out += format_number(sk_table_number(table, r, c),
                             sk_table_col_kind(table, c), decimals);
      }
    }
    out += '\n';
  }
  return out;
}

void print_model_warnings(const sk_model* model) {
  for (int i = 0; i < sk_model_warning_count(model); ++i)
    std::fprintf(stderr, "shapekit: warning: %s\n", sk_model_warning(model, i));
}

// Options shared by the commands that build or evaluate classifiers.
struct ConfigOptions {
  bool size_correction = true;
  std::string target = "mean";
  std::string classifier = "lda";
  int knn_k = 0;
  std::vector<int> knn_candidates;
  std::string drop = "2,3";
  std::string positive;
  unsigned long long seed = 0;

  std::vector<int> drop_list;  // filled by resolve()

  void add_to(CLI::App* cmd, bool with_classifier = true) {
    cmd->add_flag("--size-correction,!--no-size-correction", size_correction,
                  "apply allometric regression and classify residuals (default on)");
    cmd->add_option("--target", target, "fOPA registration target")
        ->check(CLI::IsMember({"mean", "median", "functional-median"}));
    if (with_classifier) {
      cmd->add_option("--classifier", classifier, "classification method")
          ->check(CLI::IsMember({"lda", "lr", "knn"}));
      cmd->add_option("--knn-k", knn_k, "fixed k for kNN (0 = oracle selection)");
      cmd->add_option("--knn-candidates", knn_candidates,
                      "candidate k values for the oracle selection");
    }
    cmd->add_option("--drop", drop,
                    "1-based landmarks to remove for collinearity ('none' keeps all)");
    cmd->add_option("--positive", positive,
                    "positive class for sensitivity (default SAM, then group-1)");
    cmd->add_option("--seed", seed, "random seed")->envname("SHAPEKIT_SEED");
  }

  sk_config resolve() {
    sk_config config;
    sk_config_init(&config);
    config.size_correction = size_correction ? 1 : 0;
    config.target = (target == "mean") ? SK_TARGET_MEAN : SK_TARGET_FUNCTIONAL_MEDIAN;
    config.classifier = classifier == "lda"  ? SK_CLASSIFIER_LDA
                        : classifier == "lr" ? SK_CLASSIFIER_LR
                                             : SK_CLASSIFIER_KNN;
    config.knn_k = knn_k;
    if (config.classifier == SK_CLASSIFIER_KNN && knn_k == 0 &&
        knn_candidates.empty())
      knn_candidates = {3, 5, 7, 9, 11};
    config.knn_candidates = knn_candidates.data();
    config.n_knn_candidates = static_cast<int>(knn_candidates.size());

    drop_list.clear();
    if (drop != "none" && !drop.empty()) {
      std::string token;
      for (char c : drop + ",") {
        if (c == ',') {
          if (!token.empty()) drop_list.push_back(std::atoi(token.c_str()));
          token.clear();
        } else {
          token += c;
        }
      }
    }
    config.drop_landmarks = drop_list.data();
    config.n_drop = static_cast<int>(drop_list.size());
    config.positive_class = positive.empty() ? nullptr : positive.c_str();
    config.seed = seed;
    return config;
  }
};

SamplePtr read_sample(const std::string& tps, const std::string& labels) {
  sk_sample* sample = nullptr;
  check(sk_sample_read_tps(tps.c_str(), labels.empty() ? nullptr : labels.c_str(),
                           &sample),
        "reading '" + tps + "'");
  return SamplePtr(sample);
}

std::string loo_metrics_csv(const ConfigOptions& options, const sk_sample* sample,
                            const sk_metrics& m, const char* mode, int decimals) {
  const int k = sk_sample_landmarks(sample);
  const int retained = k - static_cast<int>(
      std::count_if(options.drop_list.begin(), options.drop_list.end(),
                    [&](int idx) { return idx >= 1 && idx <= k; }));
  std::string csv =
      "mode,classifier,size_correction,target,landmarks,variables,n,TP,FN,TN,FP,"
      "Acc,Sens,Spec\n";
  csv += std::string(mode) + "," + options.classifier + "," +
         (options.size_correction ? "yes" : "no") + "," +
         (options.target == "mean" ? "mean" : "functional-median") + "," +
         std::to_string(retained) + "," + std::to_string(2 * retained) + "," +
         std::to_string(sk_sample_size(sample)) + "," + std::to_string(m.tp) + "," +
         std::to_string(m.fn) + "," + std::to_string(m.tn) + "," +
         std::to_string(m.fp) + "," + format_number(m.accuracy, SK_COL_METRIC, decimals) +
         "," + format_number(m.sensitivity, SK_COL_METRIC, decimals) + "," +
         format_number(m.specificity, SK_COL_METRIC, decimals) + "\n";
  return csv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shapekit — landmark shape space construction and out-of-sample "
               "classification"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a configuration file");
  int decimals = 0;
  app.add_option("--decimals", decimals,
                 "fixed decimal places for metric columns (default: 6 significant "
                 "digits)");

  // align ---------------------------------------------------------------
  auto* align = app.add_subcommand("align", "fGPA-align a TPS sample, write CSV");
  std::string align_tps, align_labels, align_out;
  align->add_option("input", align_tps, "TPS file")->required();
  align->add_option("--labels", align_labels, "labels CSV (id,label[,covariates])");
  align->add_option("-o,--output", align_out, "aligned CSV path")->required();
  align->callback([&] {
    SamplePtr raw = read_sample(align_tps, align_labels);
    sk_sample* aligned = nullptr;
    check(sk_align(raw.get(), &aligned), "aligning sample");
    SamplePtr aligned_owner(aligned);
    sk_table* table = nullptr;
    check(sk_sample_to_table(aligned, &table), "exporting aligned sample");
    TablePtr table_owner(table);
    write_file(align_out, table_to_csv(table, decimals));
  });

  // train ----------------------------------------------------------------
  auto* train = app.add_subcommand("train", "freeze a reference model from a "
                                            "labeled TPS sample");
  std::string train_tps, train_labels, train_out;
  ConfigOptions train_config;
  train->add_option("input", train_tps, "TPS file")->required();
  train->add_option("--labels", train_labels, "labels CSV")->required();
  train->add_option("-o,--output", train_out, "model artifact path")->required();
  train_config.add_to(train);
  train->callback([&] {
    SamplePtr raw = read_sample(train_tps, train_labels);
    sk_config config = train_config.resolve();
    sk_model* model = nullptr;
    check(sk_train(raw.get(), &config, &model), "training");
    ModelPtr model_owner(model);
    print_model_warnings(model);
    check(sk_model_save(model, train_out.c_str()), "saving '" + train_out + "'");
  });

  // classify ---------------------------------------------------------------
  auto* classify = app.add_subcommand("classify", "classify new individuals "
                                                  "against a frozen model");
  std::string classify_model, classify_tps, classify_out;
  classify->add_option("model", classify_model, "model artifact")->required();
  classify->add_option("input", classify_tps, "TPS file of new individuals")
      ->required();
  classify->add_option("-o,--output", classify_out, "per-specimen CSV")->required();
  classify->callback([&] {
    sk_model* model = nullptr;
    check(sk_model_load(classify_model.c_str(), &model),
          "loading '" + classify_model + "'");
    ModelPtr model_owner(model);
    print_model_warnings(model);
    SamplePtr raw = read_sample(classify_tps, "");
    sk_table* table = nullptr;
    check(sk_classify(model, raw.get(), &table), "classifying");
    TablePtr table_owner(table);
    write_file(classify_out, table_to_csv(table, decimals));
  });

  // loo ----------------------------------------------------------------------
  auto* loo = app.add_subcommand("loo", "leave-one-out evaluation (Algorithm 2)");
  std::string loo_tps, loo_labels, loo_out, loo_records, loo_strata;
  bool loo_in_sample_flag = false;
  ConfigOptions loo_config;
  loo->add_option("input", loo_tps, "TPS file")->required();
  loo->add_option("--labels", loo_labels, "labels CSV")->required();
  loo->add_option("-o,--output", loo_out, "metrics CSV")->required();
  loo->add_option("--per-individual", loo_records, "per-individual records CSV");
  loo->add_option("--strata", loo_strata,
                  "comma list of covariate keys (e.g. age24,sex) for per-stratum "
                  "evaluation");
  loo->add_flag("--in-sample", loo_in_sample_flag,
                "one global alignment, LOO over classifier training only");
  loo_config.add_to(loo);
  loo->callback([&] {
    SamplePtr raw = read_sample(loo_tps, loo_labels);
    sk_config config = loo_config.resolve();
    if (!loo_strata.empty()) {
      sk_table* table = nullptr;
      check(sk_loo_stratified(raw.get(), &config, loo_strata.c_str(), &table),
            "stratified evaluation");
      TablePtr table_owner(table);
      write_file(loo_out, table_to_csv(table, decimals));
      return;
    }
    sk_metrics m{};
    if (loo_in_sample_flag) {
      check(sk_loo_in_sample(raw.get(), &config, &m), "in-sample LOO");
      write_file(loo_out, loo_metrics_csv(loo_config, raw.get(), m, "in-sample",
                                          decimals));
      return;
    }
    sk_table* records = nullptr;
    check(sk_loo(raw.get(), &config, &m, loo_records.empty() ? nullptr : &records),
          "out-of-sample LOO");
    TablePtr records_owner(records);
    write_file(loo_out,
               loo_metrics_csv(loo_config, raw.get(), m, "out-of-sample", decimals));
    if (!loo_records.empty())
      write_file(loo_records, table_to_csv(records, decimals));
  });

  // simulate -------------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "scenario study (synthetic "
                                                  "two-group samples)");
  std::string sim_means, sim_out, sim_emit_tps;
  std::vector<int> sim_scenarios{1, 2, 3, 4, 5};
  int sim_runs = 100, sim_n = 50, sim_knn_k = 5, sim_emit_scenario = 1;
  double sim_c = 0.0;
  unsigned long long sim_seed = 0;
  bool sim_calibrate = false;
  std::vector<double> sim_grid;
  simulate->add_option("--means", sim_means,
                       "two-record TPS fixture of group mean shapes (default: "
                       "built-in fixture)");
  simulate->add_option("--scenario", sim_scenarios, "scenario ids (1..5)");
  simulate->add_option("--runs", sim_runs, "Monte-Carlo runs per scenario");
  simulate->add_option("--n-per-group", sim_n, "individuals per group");
  simulate->add_option("--noise-c", sim_c,
                       "noise constant (<= 0 uses the calibrated default)");
  simulate->add_option("--knn-k", sim_knn_k, "k for the kNN study arm");
  simulate->add_option("--seed", sim_seed, "random seed")->envname("SHAPEKIT_SEED");
  simulate->add_option("-o,--output", sim_out, "study table CSV")->required();
  simulate->add_flag("--calibrate", sim_calibrate,
                     "sweep the noise constant against the scenario-1 operating "
                     "point instead of running the study");
  simulate->add_option("--c-grid", sim_grid, "noise constants for --calibrate");
  simulate->add_option("--emit-tps", sim_emit_tps,
                       "also write one generated sample as TPS");
  simulate->add_option("--emit-scenario", sim_emit_scenario,
                       "scenario for --emit-tps");
  simulate->callback([&] {
    const char* means = sim_means.empty() ? nullptr : sim_means.c_str();
    if (!sim_emit_tps.empty()) {
      sk_sample* sample = nullptr;
      check(sk_simulate_sample(means, sim_emit_scenario, sim_n, sim_c, sim_seed,
                               &sample),
            "generating sample");
      SamplePtr owner(sample);
      check(sk_sample_write_tps(sample, sim_emit_tps.c_str()),
            "writing '" + sim_emit_tps + "'");
    }
    if (sim_calibrate) {
      if (sim_grid.empty())
        for (double c = 0.04; c <= 0.401; c += 0.02) sim_grid.push_back(c);
      sk_table* table = nullptr;
      double chosen = 0.0;
      check(sk_calibrate_noise(means, sim_grid.data(),
                               static_cast<int>(sim_grid.size()), sim_runs, sim_n,
                               sim_seed, &table, &chosen),
            "calibration sweep");
      TablePtr owner(table);
      write_file(sim_out, table_to_csv(table, decimals));
      std::printf("chosen c = %.6g\n", chosen);
      return;
    }
    sk_table* table = nullptr;
    check(sk_simulate_study(means, sim_scenarios.data(),
                            static_cast<int>(sim_scenarios.size()), sim_runs, sim_n,
                            sim_c, sim_knn_k, sim_seed, &table),
          "simulation study");
    TablePtr owner(table);
    write_file(sim_out, table_to_csv(table, decimals));
  });

  // edma ------------------------------------------------------------------
  auto* edma = app.add_subcommand("edma", "Euclidean distance matrix analysis "
                                          "(global/local tests + MDS)");
  std::string edma_tps, edma_labels, edma_prefix, edma_num, edma_den;
  int edma_B = 1000, edma_dims = 40;
  double edma_confidence = 0.95;
  unsigned long long edma_seed = 0;
  edma->add_option("input", edma_tps, "TPS file")->required();
  edma->add_option("--labels", edma_labels, "labels CSV")->required();
  edma->add_option("--num", edma_num, "numerator group label (default: positive "
                                      "class)");
  edma->add_option("--den", edma_den, "denominator group label");
  edma->add_option("--bootstrap", edma_B, "bootstrap replicates");
  edma->add_option("--confidence", edma_confidence, "local-test confidence level");
  edma->add_option("--mds-dims", edma_dims, "MDS projection dimension (capped at n)");
  edma->add_option("--seed", edma_seed, "random seed")->envname("SHAPEKIT_SEED");
  edma->add_option("--out-prefix", edma_prefix, "output prefix")->required();
  edma->callback([&] {
    SamplePtr sample = read_sample(edma_tps, edma_labels);
    double observed_T = 0.0, p_value = 1.0;
    sk_table* local = nullptr;
    check(sk_edma_tests(sample.get(), edma_num.empty() ? nullptr : edma_num.c_str(),
                        edma_den.empty() ? nullptr : edma_den.c_str(), edma_B,
                        edma_confidence, edma_seed, &observed_T, &p_value, &local),
          "EDMA tests");
    TablePtr local_owner(local);
    std::string global_csv = "observed_T,p_value,bootstrap_B,confidence,seed\n";
    global_csv += format_number(observed_T, SK_COL_METRIC, decimals) + "," +
                  format_number(p_value, SK_COL_METRIC, decimals) + "," +
                  std::to_string(edma_B) + "," +
                  format_number(edma_confidence, SK_COL_METRIC, decimals) + "," +
                  std::to_string(edma_seed) + "\n";
    write_file(edma_prefix + "_global.csv", global_csv);
    write_file(edma_prefix + "_local.csv", table_to_csv(local, decimals));

    sk_table* mds = nullptr;
    check(sk_edma_mds(sample.get(), edma_dims, &mds), "EDMA MDS");
    TablePtr mds_owner(mds);
    write_file(edma_prefix + "_mds.csv", table_to_csv(mds, decimals));
  });

  // ratios ------------------------------------------------------------------
  auto* ratios_cmd = app.add_subcommand("ratios", "arm measurement ratios r1..r4 "
                                                  "and their LOO classification");
  std::string ratios_tps, ratios_labels, ratios_prefix;
  ConfigOptions ratios_config;
  ratios_config.knn_k = 5;  // the ratio tables fix k = 5
  ratios_cmd->add_option("input", ratios_tps, "TPS file (20-landmark template)")
      ->required();
  ratios_cmd->add_option("--labels", ratios_labels, "labels CSV");
  ratios_cmd->add_option("--out-prefix", ratios_prefix, "output prefix")->required();
  ratios_config.add_to(ratios_cmd);
  ratios_cmd->callback([&] {
    SamplePtr sample = read_sample(ratios_tps, ratios_labels);
    sk_table* table = nullptr;
    check(sk_ratios(sample.get(), &table), "computing ratios");
    TablePtr owner(table);
    write_file(ratios_prefix + "_ratios.csv", table_to_csv(table, decimals));
    if (!ratios_labels.empty()) {
      sk_config config = ratios_config.resolve();
      sk_table* loo_table = nullptr;
      check(sk_ratio_loo(sample.get(), &config, &loo_table), "ratio LOO");
      TablePtr loo_owner(loo_table);
      write_file(ratios_prefix + "_loo.csv", table_to_csv(loo_table, decimals));
    }
  });

  // pca ------------------------------------------------------------------
  auto* pca = app.add_subcommand("pca", "PCA of aligned coordinates");
  std::string pca_csv, pca_prefix;
  int pca_components = 0;
  pca->add_option("input", pca_csv, "aligned CSV (from 'align')")->required();
  pca->add_option("--components", pca_components,
                  "number of components (default min(n-1, 2k))");
  pca->add_option("--out-prefix", pca_prefix, "output prefix")->required();
  pca->callback([&] {
    sk_sample* sample = nullptr;
    check(sk_sample_read_aligned_csv(pca_csv.c_str(), &sample),
          "reading '" + pca_csv + "'");
    SamplePtr owner(sample);
    int components = pca_components;
    if (components <= 0)
      components = std::min(sk_sample_size(sample) - 1,
                            2 * sk_sample_landmarks(sample));
    sk_table* scores = nullptr;
    sk_table* summary = nullptr;
    check(sk_pca(sample, components, &scores, &summary), "PCA");
    TablePtr scores_owner(scores), summary_owner(summary);
    write_file(pca_prefix + "_scores.csv", table_to_csv(scores, decimals));
    write_file(pca_prefix + "_summary.csv", table_to_csv(summary, decimals));
  });

  // means -------------------------------------------------------------------
  auto* means = app.add_subcommand("means", "derive a two-record mean-shape "
                                            "fixture from two TPS datasets");
  std::string means_a, means_b, means_out;
  means->add_option("group1", means_a, "TPS dataset of group 1")->required();
  means->add_option("group2", means_b, "TPS dataset of group 2")->required();
  means->add_option("-o,--output", means_out, "fixture TPS path")->required();
  means->callback([&] {
    check(sk_derive_mean_shapes(means_a.c_str(), means_b.c_str(), means_out.c_str()),
          "deriving mean shapes");
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}
