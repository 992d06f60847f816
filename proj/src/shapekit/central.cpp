#include "shapekit/central.hpp"

#include <algorithm>
#include <numeric>

namespace shapekit {

LandmarkConfiguration mean_shape(const ShapeSample& sample) {
  validate_sample(sample);
  LandmarkConfiguration mean;
  mean.id = "mean_shape";
  mean.points = Eigen::MatrixX2d::Zero(sample.k(), 2);
  for (const auto& member : sample.members) mean.points += member.points;
  mean.points /= static_cast<double>(sample.n());
  return mean;
}

LandmarkConfiguration pointwise_median(const ShapeSample& sample) {
  validate_sample(sample);
  const int n = sample.n();
  LandmarkConfiguration median;
  median.id = "pointwise_median";
  median.points.resize(sample.k(), 2);
  std::vector<double> values(n);
  for (int l = 0; l < sample.k(); ++l) {
    for (int d = 0; d < 2; ++d) {
      for (int i = 0; i < n; ++i) values[i] = sample.members[i].points(l, d);
      std::sort(values.begin(), values.end());
      median.points(l, d) = (n % 2 == 1)
                                ? values[n / 2]
                                : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    }
  }
  return median;
}

DepthRanking modified_band_depth(const ShapeSample& sample) {
  validate_sample(sample);
  const int n = sample.n();
  const int k = sample.k();
  if (n < 2)
    raise(ErrorCode::insufficient_sample,
          "modified band depth needs at least 2 configurations");

  // Rank-count formulation: a value is inside a pair band unless both band
  // members lie strictly below or strictly above it, so per landmark index
  //   #containing pairs = C(n,2) - C(#below,2) - C(#above,2).
  DepthRanking ranking;
  ranking.depths.assign(n, 0.0);
  const double all_pairs = 0.5 * n * (n - 1);
  std::vector<double> values(n);
  for (int d = 0; d < 2; ++d) {
    for (int l = 0; l < k; ++l) {
      for (int i = 0; i < n; ++i) values[i] = sample.members[i].points(l, d);
      for (int i = 0; i < n; ++i) {
        long below = 0, above = 0;
        for (int m = 0; m < n; ++m) {
          if (values[m] < values[i]) ++below;
          else if (values[m] > values[i]) ++above;
        }
        ranking.depths[i] += all_pairs - 0.5 * below * (below - 1) -
                             0.5 * above * (above - 1);
      }
    }
  }
  for (auto& depth : ranking.depths) depth /= 2.0 * k * all_pairs;

  ranking.deepest_index = 0;
  for (int i = 1; i < n; ++i)
    if (ranking.depths[i] > ranking.depths[ranking.deepest_index])
      ranking.deepest_index = i;
  return ranking;
}

LandmarkConfiguration functional_median(const ShapeSample& sample) {
  const DepthRanking ranking = modified_band_depth(sample);
  return sample.members[ranking.deepest_index];
}

}  // namespace shapekit
