#include <doctest.h>

#include "helpers.hpp"
#include "shapekit/central.hpp"

using namespace shapekit;
using namespace testutil;

namespace {

// Exhaustive O(n^2 k) modified band depth: every pair of members, inclusive
// containment, pairs containing the curve itself included.
std::vector<double> brute_force_mbd(const ShapeSample& sample) {
  const int n = sample.n(), k = sample.k();
  std::vector<double> depths(n, 0.0);
  for (int d = 0; d < 2; ++d) {
    for (int i = 0; i < n; ++i) {
      double total = 0.0;
      for (int j = 0; j < n; ++j) {
        for (int l = j + 1; l < n; ++l) {
          int inside = 0;
          for (int t = 0; t < k; ++t) {
            const double v = sample.members[i].points(t, d);
            const double lo = std::min(sample.members[j].points(t, d),
                                       sample.members[l].points(t, d));
            const double hi = std::max(sample.members[j].points(t, d),
                                       sample.members[l].points(t, d));
            if (v >= lo && v <= hi) ++inside;
          }
          total += double(inside) / k;
        }
      }
      depths[i] += total / (0.5 * n * (n - 1));
    }
  }
  for (auto& depth : depths) depth /= 2.0;
  return depths;
}

}  // namespace

TEST_CASE("mean and pointwise median of simple samples") {
  const auto a = make_config({{0, 0}, {1, 0}, {0, 1}}, "a");
  const auto b = make_config({{2, 2}, {3, 2}, {2, 3}}, "b");
  auto sample = make_sample({a, b}, AlignmentState::aligned);
  const auto mean = mean_shape(sample);
  CHECK(mean.points(0, 0) == doctest::Approx(1.0));
  CHECK(mean.points(2, 1) == doctest::Approx(2.0));
  const auto median = pointwise_median(sample);
  CHECK(max_abs_diff(median.points, mean.points) < 1e-15);  // n = 2: midpoint

  auto identical = make_sample({a, a, a}, AlignmentState::aligned);
  CHECK(max_abs_diff(mean_shape(identical).points, a.points) == 0.0);
  CHECK(max_abs_diff(pointwise_median(identical).points, a.points) == 0.0);
}

TEST_CASE("mean matches the per-coordinate summation oracle") {
  std::mt19937_64 rng(41);
  ShapeSample sample = perturbed_family(rng, 5, 6, 0.5);
  sample.state = AlignmentState::aligned;
  const auto mean = mean_shape(sample);
  for (int l = 0; l < 6; ++l)
    for (int d = 0; d < 2; ++d) {
      double sum = 0.0;
      for (const auto& member : sample.members) sum += member.points(l, d);
      CHECK(mean.points(l, d) == doctest::Approx(sum / 5).epsilon(1e-14));
    }
}

TEST_CASE("pointwise median conventions") {
  // per-coordinate values {1,2,3,100} -> 2.5 (mean of the middle two)
  std::vector<LandmarkConfiguration> members;
  for (double v : {1.0, 2.0, 3.0, 100.0})
    members.push_back(make_config({{v, v}, {v, v}, {v, v}}));
  const auto median =
      pointwise_median(make_sample(std::move(members), AlignmentState::aligned));
  CHECK(median.points(0, 0) == doctest::Approx(2.5));

  // an extreme outlier does not drag the odd-n median outside the pack
  std::vector<LandmarkConfiguration> outlier_members;
  for (double v : {1.0, 1.1, 0.9, 1.05, 1000.0})
    outlier_members.push_back(make_config({{v, 0}, {0, v}, {v, v}}));
  const auto robust = pointwise_median(
      make_sample(std::move(outlier_members), AlignmentState::aligned));
  CHECK(robust.points(0, 0) <= 1.1);
  CHECK(robust.points(0, 0) >= 0.9);
}

TEST_CASE("modified band depth on three nested curves") {
  // B strictly between A and C at every landmark in both dimensions:
  // depth(B) = (1+1+1)/3 = 1, depth(A) = depth(C) = 2/3.
  const auto a = make_config({{0.0, 0}, {1.0, 0}, {2.0, 0}, {3.0, 0}}, "A");
  const auto b = make_config({{0.1, 1}, {1.1, 1}, {2.1, 1}, {3.1, 1}}, "B");
  const auto c = make_config({{0.2, 2}, {1.2, 2}, {2.2, 2}, {3.2, 2}}, "C");
  const DepthRanking ranking =
      modified_band_depth(make_sample({a, b, c}, AlignmentState::aligned));
  CHECK(ranking.depths[1] == doctest::Approx(1.0));
  CHECK(ranking.depths[0] == doctest::Approx(2.0 / 3));
  CHECK(ranking.depths[2] == doctest::Approx(2.0 / 3));
  CHECK(ranking.deepest_index == 1);

  const auto oracle = brute_force_mbd(make_sample({a, b, c}, AlignmentState::aligned));
  for (int i = 0; i < 3; ++i)
    CHECK(ranking.depths[i] == doctest::Approx(oracle[i]).epsilon(1e-14));

  // the nested-curves functional median is the middle curve
  CHECK(functional_median(make_sample({a, b, c}, AlignmentState::aligned)).id == "B");
}

TEST_CASE("identical members tie with depth 1 and break to the lowest index") {
  const auto a = make_config({{0, 0}, {1, 0}, {2, 1}}, "a");
  const DepthRanking ranking =
      modified_band_depth(make_sample({a, a, a, a}, AlignmentState::aligned));
  for (double depth : ranking.depths) CHECK(depth == doctest::Approx(1.0));
  CHECK(ranking.deepest_index == 0);
}

TEST_CASE("modified band depth equals the exhaustive enumeration oracle") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> pick_n(2, 6), pick_k(3, 10);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = pick_n(rng), k = pick_k(rng);
    std::vector<LandmarkConfiguration> members;
    for (int i = 0; i < n; ++i) members.push_back(random_config(rng, k, 2.0));
    // duplicated coordinate values exercise the tie handling
    if (trial % 3 == 0 && n >= 2) members[1].points(0, 0) = members[0].points(0, 0);
    const auto sample = make_sample(std::move(members), AlignmentState::aligned);
    const DepthRanking ranking = modified_band_depth(sample);
    const auto oracle = brute_force_mbd(sample);
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(ranking.depths[i] - oracle[i]) < 1e-12);
  }
}

TEST_CASE("depths are permutation-equivariant") {
  std::mt19937_64 rng(43);
  ShapeSample sample = perturbed_family(rng, 6, 5, 0.4);
  sample.state = AlignmentState::aligned;
  const DepthRanking ranking = modified_band_depth(sample);

  ShapeSample reversed = sample;
  std::reverse(reversed.members.begin(), reversed.members.end());
  const DepthRanking reversed_ranking = modified_band_depth(reversed);
  for (int i = 0; i < 6; ++i)
    CHECK(ranking.depths[i] ==
          doctest::Approx(reversed_ranking.depths[5 - i]).epsilon(1e-14));
}

TEST_CASE("functional median is an observed member") {
  std::mt19937_64 rng(44);
  ShapeSample sample = perturbed_family(rng, 7, 6, 0.3);
  sample.state = AlignmentState::aligned;
  const auto median = functional_median(sample);
  bool found = false;
  for (const auto& member : sample.members)
    found |= (member.points - median.points).cwiseAbs().maxCoeff() == 0.0;
  CHECK(found);

  // identical members: tie-break picks the first
  auto identical = make_sample(
      {sample.members[0], sample.members[0], sample.members[0]},
      AlignmentState::aligned);
  identical.members[0].id = "first";
  CHECK(functional_median(identical).id == "first");
}

TEST_CASE("duplicating an extreme member moves the mean but not the median member") {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 10; ++trial) {
    // strictly nested family around a middle member, plus an outlier that
    // coincides with the middle except for one wildly displaced landmark
    const auto base = random_config(rng, 7, 1.0, "base");
    ShapeSample sample;
    sample.state = AlignmentState::aligned;
    for (int m = 0; m < 7; ++m) {
      LandmarkConfiguration member = base;
      member.id = "m" + std::to_string(m);
      member.points.array() += (m - 3) * 0.01;
      sample.members.push_back(member);
    }
    LandmarkConfiguration outlier = sample.members[3];
    outlier.id = "outlier";
    outlier.points(0, 0) += 100.0;
    sample.members.push_back(outlier);

    const auto median_before = functional_median(sample);
    const auto mean_before = mean_shape(sample);
    ShapeSample duplicated = sample;
    duplicated.members.push_back(outlier);
    const auto median_after = functional_median(duplicated);
    const auto mean_after = mean_shape(duplicated);

    CHECK(max_abs_diff(mean_after.points, mean_before.points) > 0.05);
    CHECK(max_abs_diff(median_after.points, median_before.points) == 0.0);
    CHECK(median_after.id == "m3");
  }
}

TEST_CASE("depth needs at least two members") {
  const auto a = make_config({{0, 0}, {1, 0}, {0, 1}});
  CHECK_THROWS_AS(modified_band_depth(make_sample({a}, AlignmentState::aligned)),
                  Error);
}
