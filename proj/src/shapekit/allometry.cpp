#include "shapekit/allometry.hpp"

#include <cmath>

namespace shapekit {

namespace {

void check_template(const AllometricModel& model, int k) {
  if (model.intercepts.size() != 2 * k || model.slopes.size() != 2 * k)
    raise(ErrorCode::template_mismatch,
          "allometric model has " + std::to_string(model.intercepts.size()) +
              " coefficients, configuration needs " + std::to_string(2 * k));
}

}  // namespace

AllometricModel fit_allometry(const ShapeSample& aligned,
                              const std::vector<double>& log_sizes) {
  validate_sample(aligned);
  if (aligned.state == AlignmentState::raw)
    raise(ErrorCode::invalid_input, "allometric regression expects an aligned sample");
  const int n = aligned.n();
  if (n < 3)
    raise(ErrorCode::insufficient_sample,
          "allometric regression needs at least 3 individuals");
  if (static_cast<int>(log_sizes.size()) != n)
    raise(ErrorCode::invalid_input, "log_sizes length does not match the sample");

  double mean_log = 0.0;
  for (double s : log_sizes) mean_log += s;
  mean_log /= n;
  double sxx = 0.0;
  for (double s : log_sizes) sxx += (s - mean_log) * (s - mean_log);
  if (sxx < 1e-14)
    raise(ErrorCode::singular_regressor,
          "log centroid sizes are constant; allometric slope is unidentifiable");

  const int p = 2 * aligned.k();
  AllometricModel model;
  model.intercepts.resize(p);
  model.slopes.resize(p);
  model.trained_on_n = n;
  for (int j = 0; j < p; ++j) {
    const int l = j / 2, d = j % 2;
    double mean_y = 0.0;
    for (int i = 0; i < n; ++i) mean_y += aligned.members[i].points(l, d);
    mean_y /= n;
    double sxy = 0.0;
    for (int i = 0; i < n; ++i)
      sxy += (log_sizes[i] - mean_log) * (aligned.members[i].points(l, d) - mean_y);
    model.slopes[j] = sxy / sxx;
    model.intercepts[j] = mean_y - model.slopes[j] * mean_log;
  }
  return model;
}

ShapeSample residualize(const ShapeSample& aligned,
                        const std::vector<double>& log_sizes,
                        const AllometricModel& model) {
  validate_sample(aligned);
  check_template(model, aligned.k());
  if (static_cast<int>(log_sizes.size()) != aligned.n())
    raise(ErrorCode::invalid_input, "log_sizes length does not match the sample");

  ShapeSample out = aligned;
  out.state = AlignmentState::allometric_residual;
  for (int i = 0; i < aligned.n(); ++i) {
    for (int l = 0; l < aligned.k(); ++l)
      for (int d = 0; d < 2; ++d) {
        const int j = 2 * l + d;
        out.members[i].points(l, d) -=
            model.intercepts[j] + model.slopes[j] * log_sizes[i];
      }
  }
  return out;
}

LandmarkConfiguration residualize_new(const LandmarkConfiguration& aligned_new,
                                      const LandmarkConfiguration& raw_new,
                                      const AllometricModel& model) {
  check_template(model, aligned_new.k());
  const double log_size = std::log(centroid_size(raw_new));
  LandmarkConfiguration out = aligned_new;
  for (int l = 0; l < aligned_new.k(); ++l)
    for (int d = 0; d < 2; ++d) {
      const int j = 2 * l + d;
      out.points(l, d) -= model.intercepts[j] + model.slopes[j] * log_size;
    }
  return out;
}

}  // namespace shapekit
