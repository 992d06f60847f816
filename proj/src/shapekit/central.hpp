#pragma once

#include <vector>

#include "shapekit/geometry.hpp"

namespace shapekit {

LandmarkConfiguration mean_shape(const ShapeSample& sample);

/// Coordinate-wise univariate median (mean of the middle two for even n).
LandmarkConfiguration pointwise_median(const ShapeSample& sample);

struct DepthRanking {
  std::vector<double> depths;  // one per member, in (0, 1]
  int deepest_index = 0;       // argmax, ties broken to the lowest index
};

/// Modified band depth with J = 2 bands, treating each coordinate dimension
/// as a discretely observed curve over the landmark index domain. Band
/// containment is inclusive and pairs containing the curve itself count.
/// The final depth is the mean of the x- and y-dimension depths.
DepthRanking modified_band_depth(const ShapeSample& sample);

/// The deepest member under modified band depth — always an observed
/// configuration of the sample.
LandmarkConfiguration functional_median(const ShapeSample& sample);

}  // namespace shapekit
