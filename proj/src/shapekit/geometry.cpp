#include "shapekit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace shapekit {

void validate_configuration(const LandmarkConfiguration& config) {
  if (config.k() < 1)
    raise(ErrorCode::invalid_input,
          "configuration '" + config.id + "' has no landmarks");
  if (!config.points.allFinite())
    raise(ErrorCode::invalid_input,
          "configuration '" + config.id + "' contains non-finite coordinates");
}

void validate_sample(const ShapeSample& sample) {
  if (sample.members.empty())
    raise(ErrorCode::insufficient_sample, "sample is empty");
  const int k = sample.members.front().k();
  if (k < 3)
    raise(ErrorCode::invalid_input,
          "sample templates need at least 3 landmarks, got " + std::to_string(k));
  for (const auto& member : sample.members) {
    validate_configuration(member);
    if (member.k() != k)
      raise(ErrorCode::template_mismatch,
            "configuration '" + member.id + "' has " +
                std::to_string(member.k()) + " landmarks, template has " +
                std::to_string(k));
  }
}

Eigen::RowVector2d centroid(const LandmarkConfiguration& config) {
  validate_configuration(config);
  return config.points.colwise().mean();
}

double centroid_size(const LandmarkConfiguration& config) {
  const Eigen::RowVector2d c = centroid(config);
  const double size = (config.points.rowwise() - c).norm();
  if (size < kDegenerateSize)
    raise(ErrorCode::degenerate_configuration,
          "configuration '" + config.id + "' is degenerate (all points coincident)");
  return size;
}

LandmarkConfiguration center_and_scale(const LandmarkConfiguration& config) {
  const Eigen::RowVector2d c = centroid(config);
  const double size = centroid_size(config);
  LandmarkConfiguration out = config;
  out.points = (config.points.rowwise() - c) / size;
  return out;
}

Eigen::VectorXd flatten(const LandmarkConfiguration& config) {
  Eigen::VectorXd v(2 * config.k());
  for (int l = 0; l < config.k(); ++l) {
    v[2 * l] = config.points(l, 0);
    v[2 * l + 1] = config.points(l, 1);
  }
  return v;
}

Eigen::MatrixX2d unflatten(const Eigen::VectorXd& values) {
  if (values.size() % 2 != 0)
    raise(ErrorCode::invalid_input, "flattened coordinate vector has odd length");
  const int k = static_cast<int>(values.size() / 2);
  Eigen::MatrixX2d pts(k, 2);
  for (int l = 0; l < k; ++l) {
    pts(l, 0) = values[2 * l];
    pts(l, 1) = values[2 * l + 1];
  }
  return pts;
}

LandmarkConfiguration remove_landmarks(const LandmarkConfiguration& config,
                                       const std::vector<int>& indices_1based) {
  if (indices_1based.empty()) return config;
  std::set<int> drop(indices_1based.begin(), indices_1based.end());
  for (int idx : drop)
    if (idx < 1 || idx > config.k())
      raise(ErrorCode::invalid_input,
            "landmark index " + std::to_string(idx) + " outside template of size " +
                std::to_string(config.k()));
  LandmarkConfiguration out = config;
  out.points.resize(config.k() - static_cast<int>(drop.size()), 2);
  int row = 0;
  for (int l = 0; l < config.k(); ++l)
    if (!drop.count(l + 1)) out.points.row(row++) = config.points.row(l);
  return out;
}

ShapeSample remove_landmarks(const ShapeSample& sample,
                             const std::vector<int>& indices_1based) {
  ShapeSample out;
  out.state = sample.state;
  out.members.reserve(sample.members.size());
  for (const auto& member : sample.members)
    out.members.push_back(remove_landmarks(member, indices_1based));
  return out;
}

}  // namespace shapekit
