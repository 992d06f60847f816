#include <doctest.h>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "shapekit/procrustes.hpp"

using namespace shapekit;
using namespace testutil;

namespace {

// Brute-force fOPA oracle: rotation grid, scale and translation solved in
// closed form per angle (translation = centroid match, scale = projection).
double grid_search_residual(const LandmarkConfiguration& source,
                            const LandmarkConfiguration& target,
                            double step = 1e-3) {
  const Eigen::RowVector2d sc = source.points.colwise().mean();
  const Eigen::RowVector2d tc = target.points.colwise().mean();
  const Eigen::MatrixX2d s = source.points.rowwise() - sc;
  const Eigen::MatrixX2d t = target.points.rowwise() - tc;
  const double s_ss = s.squaredNorm();
  const double t_ss = t.squaredNorm();
  double best = t_ss;
  for (double angle = 0.0; angle < 2 * M_PI; angle += step) {
    Eigen::Matrix2d r;
    r << std::cos(angle), std::sin(angle), -std::sin(angle), std::cos(angle);
    const double cross = (s * r).cwiseProduct(t).sum();
    if (cross <= 0.0) continue;  // optimal scale would not be positive
    best = std::min(best, t_ss - cross * cross / s_ss);
  }
  return best;
}

}  // namespace

TEST_CASE("fopa of a configuration onto itself is the identity") {
  std::mt19937_64 rng(21);
  const auto config = random_config(rng, 7, 2.0);
  const OpaResult result = fopa(config, config);
  CHECK(std::abs(result.transform.rotation_angle) < 1e-12);
  CHECK(result.transform.scale == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(result.transform.translation.norm() < 1e-12);
  CHECK(result.residual_ss < 1e-20);
}

TEST_CASE("fopa recovers a known similarity transform exactly") {
  std::mt19937_64 rng(22);
  const auto base = random_config(rng, 8, 1.5);
  // Y = 2 * X * R(30 deg) + (3, -1); aligning Y back onto X must undo it.
  const auto moved = apply_similarity(base, M_PI / 6, 2.0, 3.0, -1.0);
  const OpaResult result = fopa(moved, base);
  CHECK(result.transform.scale == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(result.transform.rotation_angle == doctest::Approx(-M_PI / 6).epsilon(1e-12));
  CHECK(result.residual_ss < 1e-18);
  CHECK(max_abs_diff(result.aligned.points, base.points) < 1e-10);
}

TEST_CASE("fopa residual matches the rotation-grid oracle") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto source = random_config(rng, 8, 2.0, "s");
    const auto target = random_config(rng, 8, 2.0, "t");
    const OpaResult result = fopa(source, target);
    const double oracle = grid_search_residual(source, target);
    const double scale = (target.points.rowwise() - target.points.colwise().mean().eval()).squaredNorm();
    CHECK(result.residual_ss <= oracle + 1e-9 * scale);
    CHECK(oracle - result.residual_ss <= 1e-6 * scale);
  }
}

TEST_CASE("fopa optimality against random transform triples") {
  std::mt19937_64 rng(24);
  const auto source = random_config(rng, 6, 1.0, "s");
  const auto target = random_config(rng, 6, 1.0, "t");
  const OpaResult result = fopa(source, target);
  std::uniform_real_distribution<double> u_angle(0, 2 * M_PI), u_scale(0.05, 4.0),
      u_shift(-3, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto candidate = apply_similarity(source, u_angle(rng), u_scale(rng),
                                            u_shift(rng), u_shift(rng));
    const double ss = (candidate.points - target.points).squaredNorm();
    CHECK(result.residual_ss <= ss + 1e-12);
  }
}

TEST_CASE("fopa validates its inputs") {
  std::mt19937_64 rng(25);
  const auto a = random_config(rng, 5);
  const auto b = random_config(rng, 6);
  CHECK_THROWS_AS(fopa(a, b), Error);
  const auto flat = make_config({{1, 1}, {1, 1}, {1, 1}});
  CHECK_THROWS_AS(fopa(a, make_config({{1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}})),
                  Error);
  CHECK_THROWS_AS(fopa(flat, make_config({{0, 0}, {1, 0}, {0, 1}})), Error);
}

TEST_CASE("fopa never produces a reflection") {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 50; ++trial) {
    const auto source = random_config(rng, 5, 1.0, "s");
    auto target = source;
    target.points.col(0) = -target.points.col(0);  // mirrored copy
    const OpaResult result = fopa(source, target);
    CHECK(result.transform.rotation().determinant() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.transform.scale > 0.0);
  }
}

TEST_CASE("fgpa on identical configurations collapses to zero spread") {
  std::mt19937_64 rng(27);
  const auto base = random_config(rng, 6, 1.0);
  std::vector<LandmarkConfiguration> members;
  for (int i = 0; i < 5; ++i) {
    auto copy = base;
    copy.id = "m" + std::to_string(i);
    members.push_back(copy);
  }
  const GpaResult result = fgpa(make_sample(std::move(members)));
  CHECK(result.total_ss < 1e-20);
  for (const auto& member : result.aligned.members)
    CHECK(max_abs_diff(member.points, result.mean_shape.points) < 1e-10);
}

TEST_CASE("fgpa aligns similarity-transformed copies of one shape") {
  std::mt19937_64 rng(28);
  const auto base = random_config(rng, 7, 1.0);
  std::uniform_real_distribution<double> u_angle(0, 2 * M_PI), u_scale(0.2, 5.0),
      u_shift(-8, 8);
  std::vector<LandmarkConfiguration> members;
  for (int i = 0; i < 6; ++i) {
    auto copy = apply_similarity(base, u_angle(rng), u_scale(rng), u_shift(rng),
                                 u_shift(rng));
    copy.id = "m" + std::to_string(i);
    members.push_back(copy);
  }
  const GpaResult result = fgpa(make_sample(std::move(members)));
  for (const auto& member : result.aligned.members)
    CHECK(max_abs_diff(member.points, result.aligned.members.front().points) < 1e-8);
}

TEST_CASE("fgpa mean is the arithmetic mean of the aligned members") {
  std::mt19937_64 rng(29);
  ShapeSample sample = perturbed_family(rng, 5, 8, 0.15);
  const GpaResult result = fgpa(sample);
  Eigen::MatrixX2d mean = Eigen::MatrixX2d::Zero(8, 2);
  for (const auto& member : result.aligned.members) mean += member.points;
  mean /= 5.0;
  CHECK(max_abs_diff(mean, result.mean_shape.points) < 1e-10);
  CHECK(result.aligned.state == AlignmentState::aligned);
}

TEST_CASE("fgpa fixed point: re-running fopa against the unit reference") {
  std::mt19937_64 rng(30);
  std::vector<LandmarkConfiguration> members;
  for (int i = 0; i < 3; ++i) members.push_back(random_config(rng, 8, 1.0, "m" + std::to_string(i)));
  const GpaResult result = fgpa(make_sample(std::move(members)));
  const LandmarkConfiguration unit_reference = center_and_scale(result.mean_shape);
  for (const auto& member : result.aligned.members) {
    const OpaResult re = fopa(member, unit_reference);
    CHECK(std::abs(re.transform.rotation_angle) < 1e-6);
    CHECK(re.transform.scale == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(re.transform.translation.norm() < 1e-6);
  }
}

TEST_CASE("fgpa is idempotent on an already-aligned sample") {
  std::mt19937_64 rng(31);
  ShapeSample sample = perturbed_family(rng, 8, 6, 0.2);
  const GpaResult first = fgpa(sample);
  ShapeSample again = first.aligned;
  again.state = AlignmentState::raw;
  const GpaResult second = fgpa(again);
  for (int i = 0; i < first.aligned.n(); ++i)
    CHECK(max_abs_diff(first.aligned.members[i].points,
                       second.aligned.members[i].points) < 1e-8);
}

TEST_CASE("fgpa is invariant to per-member similarity transforms") {
  std::mt19937_64 rng(32);
  ShapeSample sample = perturbed_family(rng, 7, 8, 0.1);
  const GpaResult plain = fgpa(sample);

  std::uniform_real_distribution<double> u_angle(0, 2 * M_PI), u_scale(0.3, 4.0),
      u_shift(-6, 6);
  ShapeSample moved = sample;
  for (auto& member : moved.members)
    member = apply_similarity(member, u_angle(rng), u_scale(rng), u_shift(rng),
                              u_shift(rng));
  const GpaResult transformed = fgpa(moved);

  // One global rotation (fixed by the reference) may separate the results.
  const OpaResult bridge = fopa(transformed.mean_shape, plain.mean_shape);
  for (int i = 0; i < sample.n(); ++i) {
    const Eigen::MatrixX2d mapped =
        bridge.transform.apply(transformed.aligned.members[i].points);
    CHECK(max_abs_diff(mapped, plain.aligned.members[i].points) < 1e-8);
  }
}

TEST_CASE("fgpa names the degenerate member") {
  std::mt19937_64 rng(33);
  auto sample = perturbed_family(rng, 4, 5, 0.1);
  sample.members[2].points.setConstant(3.14);
  sample.members[2].id = "broken-one";
  try {
    fgpa(sample);
    FAIL("expected degenerate-configuration error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_configuration);
    CHECK(std::string(e.what()).find("broken-one") != std::string::npos);
  }
}

TEST_CASE("fgpa requires at least two members and a raw sample") {
  std::mt19937_64 rng(34);
  CHECK_THROWS_AS(fgpa(make_sample({random_config(rng, 5)})), Error);
  auto aligned = perturbed_family(rng, 4, 5, 0.1);
  aligned.state = AlignmentState::aligned;
  CHECK_THROWS_AS(fgpa(aligned), Error);
}
