#include "shapekit/procrustes.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace shapekit {

Eigen::Matrix2d SimilarityTransform::rotation() const {
  const double c = std::cos(rotation_angle), s = std::sin(rotation_angle);
  Eigen::Matrix2d r;
  r << c, s, -s, c;
  return r;
}

Eigen::MatrixX2d SimilarityTransform::apply(const Eigen::MatrixX2d& points) const {
  return ((scale * points) * rotation()).rowwise() + translation;
}

OpaResult fopa(const LandmarkConfiguration& source,
               const LandmarkConfiguration& target) {
  if (source.k() != target.k())
    raise(ErrorCode::template_mismatch,
          "fOPA source has " + std::to_string(source.k()) +
              " landmarks, target has " + std::to_string(target.k()));

  const Eigen::RowVector2d source_centroid = centroid(source);
  const Eigen::RowVector2d target_centroid = centroid(target);
  const double source_size = centroid_size(source);
  const double target_size = centroid_size(target);
  (void)source_size;
  (void)target_size;  // both raise on degenerate inputs

  const Eigen::MatrixX2d sc = source.points.rowwise() - source_centroid;
  const Eigen::MatrixX2d tc = target.points.rowwise() - target_centroid;

  // Rotation maximizing <sc * R, tc>; proper rotation enforced by flipping
  // the sign of the smaller singular value when needed.
  const Eigen::Matrix2d cross = sc.transpose() * tc;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(cross,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix2d u = svd.matrixU();
  const Eigen::Matrix2d v = svd.matrixV();
  Eigen::Vector2d d(1.0, (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0);
  const Eigen::Matrix2d rot = u * d.asDiagonal() * v.transpose();

  const double trace = svd.singularValues()(0) + d(1) * svd.singularValues()(1);
  const double scale = trace / sc.squaredNorm();
  if (!(scale > 0.0))
    raise(ErrorCode::degenerate_configuration,
          "fOPA collapsed to non-positive scale (source '" + source.id + "')");

  OpaResult result;
  result.transform.rotation_angle = std::atan2(rot(0, 1), rot(0, 0));
  result.transform.scale = scale;
  result.transform.translation = target_centroid - (scale * source_centroid) * rot;
  result.aligned = source;
  result.aligned.points = ((scale * sc) * rot).rowwise() + target_centroid;
  result.residual_ss = (result.aligned.points - target.points).squaredNorm();
  return result;
}

namespace {

LandmarkConfiguration sample_mean(const std::vector<LandmarkConfiguration>& members) {
  LandmarkConfiguration mean;
  mean.id = "mean";
  mean.points = Eigen::MatrixX2d::Zero(members.front().k(), 2);
  for (const auto& member : members) mean.points += member.points;
  mean.points /= static_cast<double>(members.size());
  return mean;
}

double total_procrustes_ss(const std::vector<LandmarkConfiguration>& members,
                           const LandmarkConfiguration& mean) {
  double ss = 0.0;
  for (const auto& member : members)
    ss += (member.points - mean.points).squaredNorm();
  return ss;
}

}  // namespace

GpaResult fgpa(const ShapeSample& sample, const GpaOptions& options) {
  validate_sample(sample);
  if (sample.state != AlignmentState::raw)
    raise(ErrorCode::invalid_input, "fGPA expects a raw sample");
  if (sample.n() < 2)
    raise(ErrorCode::insufficient_sample, "fGPA needs at least 2 configurations");

  GpaResult result;
  result.aligned.state = AlignmentState::aligned;
  result.aligned.members.reserve(sample.members.size());
  for (const auto& member : sample.members)
    result.aligned.members.push_back(center_and_scale(member));  // raises with the offending id
  auto& work = result.aligned.members;

  LandmarkConfiguration reference = sample_mean(work);
  {
    // Random orientations can cancel in the initial mean; fall back to the
    // first member so the reference is a usable shape.
    const double size = (reference.points.rowwise() - reference.points.colwise().mean().eval()).norm();
    if (size < 1e-9)
      reference = work.front();
    reference = center_and_scale(reference);
  }

  double previous_ss = std::numeric_limits<double>::infinity();
  LandmarkConfiguration mean = reference;
  for (result.iterations = 1; result.iterations <= options.max_iterations;
       ++result.iterations) {
    double movement = 0.0;
    for (auto& member : work) {
      const Eigen::MatrixX2d before = member.points;
      member = fopa(member, reference).aligned;
      movement = std::max(movement, (member.points - before).cwiseAbs().maxCoeff());
    }
    mean = sample_mean(work);
    result.total_ss = total_procrustes_ss(work, mean);
    result.final_change = std::abs(previous_ss - result.total_ss);
    previous_ss = result.total_ss;
    // The SS tolerance alone can stop well away from the fixed point; the
    // movement criterion pins the coordinates themselves, which the
    // idempotence and invariance guarantees are stated on.
    if (result.final_change < options.tolerance &&
        movement < options.movement_tolerance)
      break;
    reference = center_and_scale(mean);
  }
  if (result.iterations > options.max_iterations)
    result.iterations = options.max_iterations;

  mean.id = "mean_shape";
  mean.label.clear();
  result.mean_shape = mean;
  return result;
}

}  // namespace shapekit
