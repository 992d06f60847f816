#pragma once

#include <Eigen/Core>
#include <vector>

#include "shapekit/geometry.hpp"

namespace shapekit {

/// Per-coordinate ordinary least squares of aligned coordinates on the
/// natural log of centroid size. Sizes are always measured on the raw
/// (pre-alignment) configurations, since fOPA destroys size information.
struct AllometricModel {
  Eigen::VectorXd intercepts;  // length 2k, interleaved (x1, y1, ...)
  Eigen::VectorXd slopes;
  int trained_on_n = 0;
};

AllometricModel fit_allometry(const ShapeSample& aligned,
                              const std::vector<double>& log_sizes);

/// Replaces every member by observed - (intercept + slope * log_size).
ShapeSample residualize(const ShapeSample& aligned,
                        const std::vector<double>& log_sizes,
                        const AllometricModel& model);

/// Residual for one new individual, with the log centroid size taken from
/// its raw configuration and the frozen training coefficients.
LandmarkConfiguration residualize_new(const LandmarkConfiguration& aligned_new,
                                      const LandmarkConfiguration& raw_new,
                                      const AllometricModel& model);

}  // namespace shapekit
