#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "shapekit/geometry.hpp"

namespace shapekit {

/// Arm measurement ratios over the 20-landmark template:
///   upper arm length = mean d(1,17), d(4,18)
///   forearm length   = mean d(17,19), d(18,20)
///   upper arm width  = mean d(1,4), d(11,12), d(13,14), d(15,16)
///   forearm width    = mean d(5,6), d(7,8), d(9,10), d(19,20)
/// r1 = UAL/FL, r2 = UAW/FW, r3 = UAW/UAL, r4 = FW/FL.
struct RatioVector {
  double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0;
};

RatioVector ratios(const LandmarkConfiguration& config);

/// The form matrix: all pairwise inter-landmark Euclidean distances.
Eigen::MatrixXd form_matrix(const LandmarkConfiguration& config);

/// Elementwise off-diagonal ratio of two form matrices, with
/// T = max ratio / min ratio (T = 1 iff the shapes are similar).
struct FormDifferenceMatrix {
  Eigen::MatrixXd ratios;  // off-diagonal entries; diagonal left at zero
  double T = 1.0;
};

FormDifferenceMatrix fdm(const Eigen::MatrixXd& numerator,
                         const Eigen::MatrixXd& denominator);

/// Symmetric inter-individual distances, entry (i,j) = log T(FDM(FM_i, FM_j)).
Eigen::MatrixXd edma_distance_matrix(const ShapeSample& sample);

/// Torgerson classical scaling of a distance matrix. Negative eigenvalues
/// are truncated to zero (with a warning); every axis is flipped so that
/// its largest-magnitude loading is positive.
Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& distances, int dims,
                              std::vector<std::string>* warnings = nullptr);

struct EdmaGlobalResult {
  double observed_T = 1.0;
  double p_value = 1.0;
  int bootstrap_B = 0;
};

/// Global shape-difference test: observed T from the FDM of the two mean
/// form matrices; the null distribution resamples the pooled sample into the
/// original group sizes, with the +1/(B+1) continuity correction.
EdmaGlobalResult edma_global_test(const ShapeSample& group_a,
                                  const ShapeSample& group_b, int bootstrap_B,
                                  std::uint64_t seed,
                                  std::vector<std::string>* warnings = nullptr);

struct EdmaLocalEntry {
  int landmark_i = 0, landmark_j = 0;  // 1-based, i < j
  double ratio = 1.0, lower = 1.0, upper = 1.0;
  bool significant = false;            // interval excludes 1
};

/// Percentile bootstrap intervals for every off-diagonal FDM entry,
/// resampling each group independently with replacement.
std::vector<EdmaLocalEntry> edma_local_test(const ShapeSample& group_a,
                                            const ShapeSample& group_b,
                                            int bootstrap_B, double confidence,
                                            std::uint64_t seed,
                                            std::vector<std::string>* warnings = nullptr);

}  // namespace shapekit
