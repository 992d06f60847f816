#include "shapekit/edma.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <utility>

#include "shapekit/rng.hpp"

namespace shapekit {

namespace {

double pair_distance(const LandmarkConfiguration& config, int a, int b) {
  return (config.points.row(a - 1) - config.points.row(b - 1)).norm();
}

double mean_distance(const LandmarkConfiguration& config,
                     std::initializer_list<std::pair<int, int>> pairs) {
  double sum = 0.0;
  for (const auto& [a, b] : pairs) sum += pair_distance(config, a, b);
  return sum / static_cast<double>(pairs.size());
}

Eigen::MatrixXd mean_form_matrix(const std::vector<Eigen::MatrixXd>& fms,
                                 const std::vector<int>& indices) {
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(fms.front().rows(), fms.front().cols());
  for (int idx : indices) mean += fms[idx];
  return mean / static_cast<double>(indices.size());
}

std::vector<int> identity_indices(int n) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

std::vector<int> resample(std::mt19937_64& rng, int count, int universe) {
  std::uniform_int_distribution<int> pick(0, universe - 1);
  std::vector<int> idx(count);
  for (int i = 0; i < count; ++i) idx[i] = pick(rng);
  return idx;
}

// Linear-interpolation sample quantile of a sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double h = q * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
}

std::vector<Eigen::MatrixXd> member_form_matrices(const ShapeSample& sample) {
  std::vector<Eigen::MatrixXd> fms;
  fms.reserve(sample.members.size());
  for (const auto& member : sample.members) fms.push_back(form_matrix(member));
  return fms;
}

void check_groups(const ShapeSample& a, const ShapeSample& b) {
  if (a.members.empty() || b.members.empty())
    raise(ErrorCode::insufficient_sample, "both EDMA groups must be non-empty");
  validate_sample(a);
  validate_sample(b);
  if (a.k() != b.k())
    raise(ErrorCode::template_mismatch, "EDMA groups use different templates");
}

}  // namespace

RatioVector ratios(const LandmarkConfiguration& config) {
  validate_configuration(config);
  if (config.k() != 20)
    raise(ErrorCode::template_mismatch,
          "ratio variables are defined on the 20-landmark template, got k = " +
              std::to_string(config.k()));

  const double upper_arm_length = mean_distance(config, {{1, 17}, {4, 18}});
  const double forearm_length = mean_distance(config, {{17, 19}, {18, 20}});
  const double upper_arm_width =
      mean_distance(config, {{1, 4}, {11, 12}, {13, 14}, {15, 16}});
  const double forearm_width =
      mean_distance(config, {{5, 6}, {7, 8}, {9, 10}, {19, 20}});
  if (upper_arm_length <= 0.0 || forearm_length <= 0.0 ||
      upper_arm_width <= 0.0 || forearm_width <= 0.0)
    raise(ErrorCode::degenerate_configuration,
          "configuration '" + config.id + "' has a zero arm measurement");

  return {upper_arm_length / forearm_length, upper_arm_width / forearm_width,
          upper_arm_width / upper_arm_length, forearm_width / forearm_length};
}

Eigen::MatrixXd form_matrix(const LandmarkConfiguration& config) {
  validate_configuration(config);
  const int k = config.k();
  Eigen::MatrixXd fm = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      fm(i, j) = fm(j, i) = (config.points.row(i) - config.points.row(j)).norm();
  return fm;
}

FormDifferenceMatrix fdm(const Eigen::MatrixXd& numerator,
                         const Eigen::MatrixXd& denominator) {
  if (numerator.rows() != denominator.rows() || numerator.rows() != numerator.cols() ||
      denominator.rows() != denominator.cols())
    raise(ErrorCode::template_mismatch, "form matrices have mismatched dimensions");
  const int k = static_cast<int>(numerator.rows());

  FormDifferenceMatrix out;
  out.ratios = Eigen::MatrixXd::Zero(k, k);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      if (denominator(i, j) <= 0.0)
        raise(ErrorCode::degenerate_configuration,
              "form difference matrix has a zero denominator distance at pair (" +
                  std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      out.ratios(i, j) = numerator(i, j) / denominator(i, j);
      lo = std::min(lo, out.ratios(i, j));
      hi = std::max(hi, out.ratios(i, j));
    }
  out.T = hi / lo;
  return out;
}

Eigen::MatrixXd edma_distance_matrix(const ShapeSample& sample) {
  validate_sample(sample);
  const auto fms = member_form_matrices(sample);
  const int n = sample.n();
  Eigen::MatrixXd distances = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      distances(i, j) = distances(j, i) = std::log(fdm(fms[i], fms[j]).T);
  return distances;
}

Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& distances, int dims,
                              std::vector<std::string>* warnings) {
  const int n = static_cast<int>(distances.rows());
  if (distances.cols() != n)
    raise(ErrorCode::invalid_input, "distance matrix must be square");
  if (dims < 1 || dims > n)
    raise(ErrorCode::invalid_input,
          "MDS dimension must lie in [1, n], got " + std::to_string(dims));

  // Torgerson double centering of squared distances.
  const Eigen::MatrixXd d2 = distances.array().square();
  const Eigen::MatrixXd centered =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  const Eigen::MatrixXd gram = -0.5 * centered * d2 * centered;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(n, dims);
  bool truncated = false;
  for (int c = 0; c < dims; ++c) {
    const int which = n - 1 - c;  // eigenvalues come back ascending
    const double value = eig.eigenvalues()[which];
    if (value <= 0.0) {
      if (value < 0.0) truncated = true;
      continue;
    }
    coords.col(c) = eig.eigenvectors().col(which) * std::sqrt(value);
    // Deterministic sign: largest-magnitude loading positive.
    int arg = 0;
    for (int r = 1; r < n; ++r)
      if (std::abs(coords(r, c)) > std::abs(coords(arg, c))) arg = r;
    if (coords(arg, c) < 0.0) coords.col(c) = -coords.col(c);
  }
  if (truncated && warnings)
    warnings->push_back(
        "distance matrix is not Euclidean-embeddable in the requested dimension; "
        "negative eigenvalues truncated to zero");
  return coords;
}

EdmaGlobalResult edma_global_test(const ShapeSample& group_a,
                                  const ShapeSample& group_b, int bootstrap_B,
                                  std::uint64_t seed,
                                  std::vector<std::string>* warnings) {
  check_groups(group_a, group_b);
  if (bootstrap_B < 100 && warnings)
    warnings->push_back("bootstrap_B below 100 gives unstable p-values");

  auto fms = member_form_matrices(group_a);
  const auto fms_b = member_form_matrices(group_b);
  const int n_a = group_a.n(), n_b = group_b.n();
  fms.insert(fms.end(), fms_b.begin(), fms_b.end());  // pooled

  std::vector<int> first(n_a), second(n_b);
  for (int i = 0; i < n_a; ++i) first[i] = i;
  for (int i = 0; i < n_b; ++i) second[i] = n_a + i;
  const double observed =
      fdm(mean_form_matrix(fms, first), mean_form_matrix(fms, second)).T;

  int exceed = 0;
  for (int b = 0; b < bootstrap_B; ++b) {
    auto rng = make_rng(derive_seed(seed, b, 1));
    const auto idx_a = resample(rng, n_a, n_a + n_b);
    const auto idx_b = resample(rng, n_b, n_a + n_b);
    const double t =
        fdm(mean_form_matrix(fms, idx_a), mean_form_matrix(fms, idx_b)).T;
    if (t >= observed) ++exceed;
  }

  EdmaGlobalResult result;
  result.observed_T = observed;
  result.bootstrap_B = bootstrap_B;
  result.p_value = double(exceed + 1) / double(bootstrap_B + 1);
  return result;
}

std::vector<EdmaLocalEntry> edma_local_test(const ShapeSample& group_a,
                                            const ShapeSample& group_b,
                                            int bootstrap_B, double confidence,
                                            std::uint64_t seed,
                                            std::vector<std::string>* warnings) {
  check_groups(group_a, group_b);
  if (confidence <= 0.0 || confidence >= 1.0)
    raise(ErrorCode::invalid_input, "confidence must lie strictly between 0 and 1");
  if (bootstrap_B < 100 && warnings)
    warnings->push_back("bootstrap_B below 100 gives unstable intervals");

  const auto fms_a = member_form_matrices(group_a);
  const auto fms_b = member_form_matrices(group_b);
  const int n_a = group_a.n(), n_b = group_b.n();
  const int k = group_a.k();
  const Eigen::MatrixXd observed =
      fdm(mean_form_matrix(fms_a, identity_indices(n_a)),
          mean_form_matrix(fms_b, identity_indices(n_b)))
          .ratios;

  const int n_pairs = k * (k - 1) / 2;
  std::vector<std::vector<double>> draws(n_pairs, std::vector<double>(bootstrap_B));
  for (int b = 0; b < bootstrap_B; ++b) {
    auto rng = make_rng(derive_seed(seed, b, 2));
    const auto idx_a = resample(rng, n_a, n_a);
    const auto idx_b = resample(rng, n_b, n_b);
    const Eigen::MatrixXd ratios =
        fdm(mean_form_matrix(fms_a, idx_a), mean_form_matrix(fms_b, idx_b)).ratios;
    int pair = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) draws[pair++][b] = ratios(i, j);
  }

  const double alpha = 1.0 - confidence;
  std::vector<EdmaLocalEntry> entries;
  entries.reserve(n_pairs);
  int pair = 0;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j, ++pair) {
      std::sort(draws[pair].begin(), draws[pair].end());
      EdmaLocalEntry entry;
      entry.landmark_i = i + 1;
      entry.landmark_j = j + 1;
      entry.ratio = observed(i, j);
      entry.lower = quantile_sorted(draws[pair], alpha / 2.0);
      entry.upper = quantile_sorted(draws[pair], 1.0 - alpha / 2.0);
      entry.significant = entry.lower > 1.0 || entry.upper < 1.0;
      entries.push_back(entry);
    }
  return entries;
}

}  // namespace shapekit
