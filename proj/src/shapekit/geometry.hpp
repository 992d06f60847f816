#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "shapekit/errors.hpp"

namespace shapekit {

/// Centroid sizes below this are treated as "all points coincident".
inline constexpr double kDegenerateSize = 1e-12;

/// One individual's landmark configuration: k points in the plane, in
/// template order. Landmark indices are 1-based in all user-facing I/O.
struct LandmarkConfiguration {
  Eigen::MatrixX2d points;  // row l = landmark l+1
  std::string id;
  std::string label;  // empty when unlabeled
  std::map<std::string, std::string> covariates;

  int k() const { return static_cast<int>(points.rows()); }
};

enum class AlignmentState { raw, aligned, allometric_residual };

/// An ordered collection of configurations sharing one landmark template.
struct ShapeSample {
  std::vector<LandmarkConfiguration> members;
  AlignmentState state = AlignmentState::raw;

  int n() const { return static_cast<int>(members.size()); }
  int k() const { return members.empty() ? 0 : members.front().k(); }
};

/// Throws unless every member is finite and shares the sample's template.
void validate_sample(const ShapeSample& sample);
void validate_configuration(const LandmarkConfiguration& config);

Eigen::RowVector2d centroid(const LandmarkConfiguration& config);

/// sqrt of the summed squared deviations from the centroid; the size
/// variable of geometric morphometrics.
double centroid_size(const LandmarkConfiguration& config);

/// Translates the centroid to the origin and rescales to centroid size 1.
LandmarkConfiguration center_and_scale(const LandmarkConfiguration& config);

/// Row-major interleaved flattening: (x1, y1, x2, y2, ...).
Eigen::VectorXd flatten(const LandmarkConfiguration& config);
Eigen::MatrixX2d unflatten(const Eigen::VectorXd& values);

/// Drops the given 1-based landmark indices, preserving order of the rest.
LandmarkConfiguration remove_landmarks(const LandmarkConfiguration& config,
                                       const std::vector<int>& indices_1based);
ShapeSample remove_landmarks(const ShapeSample& sample,
                             const std::vector<int>& indices_1based);

}  // namespace shapekit
