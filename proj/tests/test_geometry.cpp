#include <doctest.h>

#include "helpers.hpp"
#include "shapekit/geometry.hpp"

using namespace shapekit;
using namespace testutil;

TEST_CASE("centroid of simple configurations") {
  const auto triangle = make_config({{0, 0}, {1, 0}, {0, 1}});
  const Eigen::RowVector2d c = centroid(triangle);
  CHECK(c(0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(c(1) == doctest::Approx(1.0 / 3).epsilon(1e-15));

  const auto repeated = make_config({{5, 5}, {5, 5}, {5, 5}, {5, 5}});
  CHECK(centroid(repeated)(0) == doctest::Approx(5.0));
  CHECK(centroid(repeated)(1) == doctest::Approx(5.0));
}

TEST_CASE("centroid matches per-axis summation oracle on random points") {
  std::mt19937_64 rng(11);
  const auto config = random_config(rng, 8, 3.0);
  double sx = 0.0, sy = 0.0;
  for (int l = 0; l < 8; ++l) {
    sx += config.points(l, 0);
    sy += config.points(l, 1);
  }
  const Eigen::RowVector2d c = centroid(config);
  CHECK(c(0) == doctest::Approx(sx / 8).epsilon(1e-14));
  CHECK(c(1) == doctest::Approx(sy / 8).epsilon(1e-14));
}

TEST_CASE("centroid rejects non-finite input") {
  auto bad = make_config({{0, 0}, {1, 0}, {0, 1}});
  bad.points(1, 1) = std::nan("");
  CHECK_THROWS_AS(centroid(bad), Error);
}

TEST_CASE("centroid size of the unit right triangle") {
  // sum of squared deviations = 12/9, by hand
  const auto triangle = make_config({{0, 0}, {1, 0}, {0, 1}});
  CHECK(centroid_size(triangle) == doctest::Approx(std::sqrt(4.0 / 3)).epsilon(1e-14));
}

TEST_CASE("centroid size is similarity-covariant") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 25; ++trial) {
    const auto config = random_config(rng, 6 + trial % 5, 2.0);
    const double size = centroid_size(config);
    std::uniform_real_distribution<double> u_angle(0, 2 * M_PI), u_scale(0.1, 5.0),
        u_shift(-10, 10);
    const double s = u_scale(rng);
    const auto moved =
        apply_similarity(config, u_angle(rng), s, u_shift(rng), u_shift(rng));
    CHECK(centroid_size(moved) == doctest::Approx(s * size).epsilon(1e-10));
  }
  const auto config = make_config({{0, 0}, {1, 0}, {0, 1}});
  const auto scaled = apply_similarity(config, 0.0, 3.0, 0.0, 0.0);
  CHECK(centroid_size(scaled) == doctest::Approx(3.0 * centroid_size(config)));
  const auto rotated = apply_similarity(config, 1.234, 1.0, 0.0, 0.0);
  CHECK(centroid_size(rotated) ==
        doctest::Approx(centroid_size(config)).epsilon(1e-12));
}

TEST_CASE("coincident points are degenerate") {
  const auto flat = make_config({{2, 2}, {2, 2}, {2, 2}});
  CHECK_THROWS_AS(centroid_size(flat), Error);
  try {
    centroid_size(flat);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_configuration);
  }
  CHECK_THROWS_AS(center_and_scale(flat), Error);
}

TEST_CASE("center_and_scale of a two-point segment") {
  const auto segment = make_config({{0, 0}, {2, 0}});
  const auto normalized = center_and_scale(segment);
  CHECK(normalized.points(0, 0) == doctest::Approx(-1.0 / std::sqrt(2)).epsilon(1e-14));
  CHECK(normalized.points(1, 0) == doctest::Approx(1.0 / std::sqrt(2)).epsilon(1e-14));
  CHECK(normalized.points(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("center_and_scale postconditions and idempotence") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto config = random_config(rng, 5 + trial % 7, 4.0);
    const auto normalized = center_and_scale(config);
    CHECK(centroid(normalized).norm() < 1e-12);
    CHECK(centroid_size(normalized) == doctest::Approx(1.0).epsilon(1e-12));
    const auto twice = center_and_scale(normalized);
    CHECK(max_abs_diff(twice.points, normalized.points) < 1e-12);
  }
}

TEST_CASE("flatten round-trips") {
  std::mt19937_64 rng(14);
  const auto config = random_config(rng, 9, 2.0);
  const Eigen::VectorXd flat = flatten(config);
  CHECK(flat.size() == 18);
  CHECK(flat[0] == config.points(0, 0));
  CHECK(flat[1] == config.points(0, 1));
  CHECK(max_abs_diff(unflatten(flat), config.points) == 0.0);
}

TEST_CASE("remove_landmarks drops 1-based indices") {
  const auto config =
      make_config({{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}}, "specimen");
  const auto reduced = remove_landmarks(config, {2, 3});
  REQUIRE(reduced.k() == 3);
  CHECK(reduced.points(0, 0) == 0.0);
  CHECK(reduced.points(1, 0) == 3.0);
  CHECK(reduced.points(2, 0) == 4.0);
  CHECK_THROWS_AS(remove_landmarks(config, {0}), Error);
  CHECK_THROWS_AS(remove_landmarks(config, {6}), Error);
}

TEST_CASE("sample validation enforces the shared template") {
  std::mt19937_64 rng(15);
  auto sample = make_sample({random_config(rng, 5), random_config(rng, 5)});
  CHECK_NOTHROW(validate_sample(sample));
  sample.members.push_back(random_config(rng, 6));
  CHECK_THROWS_AS(validate_sample(sample), Error);
}
