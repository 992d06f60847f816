#pragma once

#include <cmath>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

#include "shapekit/geometry.hpp"
#include "shapekit/procrustes.hpp"

namespace testutil {

using namespace shapekit;

inline LandmarkConfiguration make_config(
    std::initializer_list<std::pair<double, double>> pts, std::string id = "c") {
  LandmarkConfiguration config;
  config.id = std::move(id);
  config.points.resize(static_cast<int>(pts.size()), 2);
  int row = 0;
  for (const auto& [x, y] : pts) {
    config.points(row, 0) = x;
    config.points(row, 1) = y;
    ++row;
  }
  return config;
}

inline LandmarkConfiguration random_config(std::mt19937_64& rng, int k,
                                           double spread = 1.0,
                                           std::string id = "r") {
  std::uniform_real_distribution<double> u(-spread, spread);
  LandmarkConfiguration config;
  config.id = std::move(id);
  config.points.resize(k, 2);
  for (int l = 0; l < k; ++l) {
    config.points(l, 0) = u(rng);
    config.points(l, 1) = u(rng);
  }
  return config;
}

inline LandmarkConfiguration apply_similarity(const LandmarkConfiguration& config,
                                              double angle, double scale,
                                              double tx, double ty) {
  SimilarityTransform t;
  t.rotation_angle = angle;
  t.scale = scale;
  t.translation = Eigen::RowVector2d(tx, ty);
  LandmarkConfiguration out = config;
  out.points = t.apply(config.points);
  return out;
}

inline ShapeSample make_sample(std::vector<LandmarkConfiguration> members,
                               AlignmentState state = AlignmentState::raw) {
  ShapeSample sample;
  sample.members = std::move(members);
  sample.state = state;
  return sample;
}

// n noisy copies of one base shape, ids m1..mn.
inline ShapeSample perturbed_family(std::mt19937_64& rng, int n, int k,
                                    double noise) {
  const LandmarkConfiguration base = random_config(rng, k, 1.0, "base");
  std::normal_distribution<double> gauss(0.0, noise);
  ShapeSample sample;
  for (int i = 0; i < n; ++i) {
    LandmarkConfiguration member = base;
    member.id = "m" + std::to_string(i + 1);
    for (int l = 0; l < k; ++l) {
      member.points(l, 0) += gauss(rng);
      member.points(l, 1) += gauss(rng);
    }
    sample.members.push_back(std::move(member));
  }
  return sample;
}

// Two-class raw sample: class means separated along a shape direction.
inline ShapeSample two_class_sample(std::mt19937_64& rng, int n_per_class, int k,
                                    double noise, double separation,
                                    const std::string& label_a = "SAM",
                                    const std::string& label_b = "ONC") {
  const LandmarkConfiguration base = random_config(rng, k, 1.0, "base");
  LandmarkConfiguration shifted = base;
  for (int l = 0; l < k; ++l)
    shifted.points(l, 0) += separation * ((l % 2 == 0) ? 1.0 : -0.5);
  std::normal_distribution<double> gauss(0.0, noise);
  ShapeSample sample;
  for (int c = 0; c < 2; ++c) {
    const LandmarkConfiguration& mu = c == 0 ? base : shifted;
    for (int i = 0; i < n_per_class; ++i) {
      LandmarkConfiguration member = mu;
      member.label = c == 0 ? label_a : label_b;
      member.id = member.label + "-" + std::to_string(i + 1);
      for (int l = 0; l < k; ++l) {
        member.points(l, 0) += gauss(rng);
        member.points(l, 1) += gauss(rng);
      }
      sample.members.push_back(std::move(member));
    }
  }
  return sample;
}

inline double max_abs_diff(const Eigen::MatrixX2d& a, const Eigen::MatrixX2d& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testutil
