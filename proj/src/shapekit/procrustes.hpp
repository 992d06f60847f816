#pragma once

#include <Eigen/Core>

#include "shapekit/geometry.hpp"

namespace shapekit {

/// A proper similarity transform (no reflection). Points transform as
/// rows: y = scale * x * R(angle) + translation, with
/// R(a) = [[cos a, sin a], [-sin a, cos a]].
struct SimilarityTransform {
  double rotation_angle = 0.0;
  double scale = 1.0;
  Eigen::RowVector2d translation = Eigen::RowVector2d::Zero();

  Eigen::Matrix2d rotation() const;
  Eigen::MatrixX2d apply(const Eigen::MatrixX2d& points) const;
};

struct OpaResult {
  LandmarkConfiguration aligned;
  SimilarityTransform transform;
  double residual_ss = 0.0;
};

/// Full ordinary Procrustes analysis: the rotation/scale/translation of
/// `source` minimizing the summed squared distance to `target`, closed
/// form via SVD of the centered cross-covariance. Reflections are never
/// produced (determinant sign corrected).
OpaResult fopa(const LandmarkConfiguration& source,
               const LandmarkConfiguration& target);

struct GpaOptions {
  double tolerance = 1e-10;            // on the change in total Procrustes SS
  double movement_tolerance = 1e-11;   // on per-iteration coordinate movement
  int max_iterations = 200;
};

struct GpaResult {
  ShapeSample aligned;              // alignment_state = aligned
  LandmarkConfiguration mean_shape; // arithmetic mean of the aligned members
  int iterations = 0;
  double final_change = 0.0;
  double total_ss = 0.0;            // sum of squared deviations from the mean
};

/// Full generalized Procrustes analysis. All members are centered and
/// scaled to unit size, then repeatedly fit by fOPA to a reference that is
/// recomputed each round as the coordinate-wise mean rescaled to unit
/// centroid size, until the total Procrustes sum of squares stabilizes.
GpaResult fgpa(const ShapeSample& sample, const GpaOptions& options = {});

}  // namespace shapekit
