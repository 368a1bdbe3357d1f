#include "wornsim/sensing.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "wornsim/errors.hpp"

namespace wornsim {

Eigen::Quaterniond random_rotation_noise(std::mt19937_64& rng, double sigma) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector3d axis;
  do {
    axis = Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
  } while (axis.norm() < 1e-12);
  const double angle = sigma * normal(rng);
  return from_rotation_vector(axis.normalized() * angle);
}

MocapSample mocap_measure(const Transform& true_pose, double sigma_t, double sigma_r, std::uint64_t seed,
                          double timestamp) {
  if (!(sigma_t >= 0.0) || !(sigma_r >= 0.0)) throw DomainError("mocap_measure: noise must be non-negative");
  MocapSample sample{true_pose.from(), true_pose, sigma_t, sigma_r, timestamp};
  if (sigma_t == 0.0 && sigma_r == 0.0) return sample;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector3d t = true_pose.translation();
  for (int i = 0; i < 3; ++i) t[i] += sigma_t * normal(rng);
  Eigen::Quaterniond r = true_pose.rotation();
  if (sigma_r > 0.0) r = random_rotation_noise(rng, sigma_r) * r;
  sample.pose = Transform(true_pose.from(), true_pose.to(), Rigid(r, t));
  return sample;
}

SlamDrift::SlamDrift(double drift_rate, std::uint64_t seed) : drift_rate_(drift_rate), rng_(seed) {
  if (!(drift_rate >= 0.0)) throw DomainError("slam drift rate must be non-negative");
  const double s = std::sqrt(kGrid);
  next_ = Eigen::Vector3d(s * normal_(rng_), s * normal_(rng_), s * normal_(rng_));
}

Eigen::Vector3d SlamDrift::bias_at(double elapsed) {
  if (drift_rate_ == 0.0 || elapsed <= 0.0) return Eigen::Vector3d::Zero();
  const double cells = elapsed / kGrid;
  if (cells + 1e-9 < static_cast<double>(steps_)) {
    throw DomainError("slam drift queried backwards in time");
  }
  const double s = std::sqrt(kGrid);
  while (static_cast<double>(steps_ + 1) <= cells + 1e-9) {
    walk_ += next_;
    ++steps_;
    next_ = Eigen::Vector3d(s * normal_(rng_), s * normal_(rng_), s * normal_(rng_));
  }
  const double frac = std::max(0.0, cells - static_cast<double>(steps_));
  const Eigen::Vector3d walk = walk_ + frac * next_;
  return drift_rate_ * std::sqrt(elapsed / (8.0 / M_PI)) * walk;
}

Transform slam_head_pose(const Transform& true_head_pose, double drift_rate, double elapsed, std::uint64_t seed) {
  if (drift_rate == 0.0) return true_head_pose;
  SlamDrift drift(drift_rate, seed);
  return Transform(true_head_pose.from(), true_head_pose.to(),
                   Rigid::translate(drift.bias_at(elapsed)) * true_head_pose.motion());
}

std::vector<FrameId> imu_segments() { return {human::kTrunk, human::kUpperArm, human::kForearm}; }

std::vector<ImuSample> synthesize_imus(const std::map<FrameId, Transform>& body,
                                       const std::map<FrameId, Transform>* previous, double dt,
                                       double sigma_r, std::uint64_t seed, double timestamp) {
  if (!(sigma_r >= 0.0)) throw DomainError("synthesize_imus: noise must be non-negative");
  std::mt19937_64 rng(seed);
  std::vector<ImuSample> out;
  for (const FrameId& segment : imu_segments()) {
    const auto it = body.find(segment);
    if (it == body.end()) throw MissingSegment("no pose for segment " + segment.name());
    ImuSample sample;
    sample.segment = segment;
    sample.timestamp = timestamp;
    sample.orientation = it->second.rotation();
    if (previous && dt > 0.0) {
      const auto before = previous->find(segment);
      if (before != previous->end()) {
        sample.angular_velocity =
            rotation_vector(sample.orientation * before->second.rotation().conjugate()) / dt;
      }
    }
    if (sigma_r > 0.0) sample.orientation = canonical(random_rotation_noise(rng, sigma_r) * sample.orientation);
    out.push_back(sample);
  }
  return out;
}

namespace {

const Eigen::Quaterniond& orientation_of(const std::vector<ImuSample>& imus, const FrameId& segment) {
  for (auto it = imus.rbegin(); it != imus.rend(); ++it) {
    if (it->segment == segment) return it->orientation;
  }
  throw MissingSegment("no IMU sample for segment " + segment.name());
}

}  // namespace

UpperBodyEstimate reconstruct_upper_body(const Transform& head_pose, const std::vector<ImuSample>& imus,
                                         const BodyModel& model) {
  const Eigen::Matrix3d trunk = orientation_of(imus, human::kTrunk).normalized().toRotationMatrix();
  const Eigen::Matrix3d upper = orientation_of(imus, human::kUpperArm).normalized().toRotationMatrix();
  const Eigen::Matrix3d fore = orientation_of(imus, human::kForearm).normalized().toRotationMatrix();
  const Eigen::Matrix3d head = head_pose.rotation().toRotationMatrix();
  const Eigen::Matrix3d pelvis = model.root.rotation.toRotationMatrix();

  JointVector q(static_cast<Eigen::Index>(human::kDof));
  // Trunk: Rz(yaw) Ry(pitch) Rx(roll) relative to the pelvis.
  const Eigen::Matrix3d t = pelvis.transpose() * trunk;
  q[0] = std::atan2(t(1, 0), t(0, 0));
  q[1] = std::atan2(-t(2, 0), std::hypot(t(2, 1), t(2, 2)));
  q[2] = std::atan2(t(2, 1), t(2, 2));
  // Shoulder: Ry(-flex) Rx(abd) Rz(rot) relative to the trunk.
  const Eigen::Matrix3d s = trunk.transpose() * upper;
  q[3] = -std::atan2(s(0, 2), s(2, 2));
  q[4] = std::atan2(-s(1, 2), std::hypot(s(0, 2), s(2, 2)));
  q[5] = std::atan2(s(1, 0), s(1, 1));
  // Elbow: Ry(-flex) relative to the upper arm.
  const Eigen::Matrix3d e = upper.transpose() * fore;
  q[6] = -std::atan2(e(0, 2), e(0, 0));
  // Neck: Ry(pitch) Rz(yaw) relative to the trunk.
  const Eigen::Matrix3d n = trunk.transpose() * head;
  q[7] = std::atan2(n(0, 2), n(2, 2));
  q[8] = std::atan2(n(1, 0), n(1, 1));

  // Place the pelvis so that the chain ends on the measured head position.
  const KinematicTree tree = make_human_model(model);
  const Transform unplaced(tree.root(), head_pose.to(), Rigid(model.root.rotation, Eigen::Vector3d::Zero()));
  const Eigen::Vector3d head_offset = tree.frame_poses(q, unplaced).at(human::kHead).translation();
  UpperBodyEstimate estimate;
  estimate.q = q;
  estimate.root_pose =
      Transform(tree.root(), head_pose.to(), Rigid(model.root.rotation, head_pose.translation() - head_offset));
  estimate.frames = tree.frame_poses(q, estimate.root_pose);
  return estimate;
}

CalibrationResult calibrate_robot_to_world(const std::vector<std::pair<Transform, Transform>>& correspondences) {
  const std::size_t n = correspondences.size();
  if (n < 3) throw DegenerateGeometry("calibration needs at least 3 correspondences");
  Eigen::Matrix3Xd robot(3, n), world(3, n);
  for (std::size_t i = 0; i < n; ++i) {
    robot.col(static_cast<Eigen::Index>(i)) = correspondences[i].first.translation();
    world.col(static_cast<Eigen::Index>(i)) = correspondences[i].second.translation();
  }
  const Eigen::Vector3d robot_mean = robot.rowwise().mean();
  const Eigen::Vector3d world_mean = world.rowwise().mean();
  const Eigen::Matrix3Xd a = robot.colwise() - robot_mean;
  const Eigen::Matrix3Xd b = world.colwise() - world_mean;

  Eigen::JacobiSVD<Eigen::Matrix3Xd> spread(a);
  if (spread.singularValues()[1] <= 1e-9) {
    throw DegenerateGeometry("calibration points are collinear");
  }

  const Eigen::Matrix3d h = a * b.transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Eigen::Matrix3d r = svd.matrixV() * d * svd.matrixU().transpose();
  const Eigen::Vector3d t = world_mean - r * robot_mean;

  CalibrationResult result;
  result.robot_to_world = Transform(correspondences.front().first.to(), correspondences.front().second.to(),
                                    Rigid(Eigen::Quaterniond(r), t));
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    sq += (result.robot_to_world.motion().apply(robot.col(c)) - world.col(c)).squaredNorm();
  }
  result.residual_rms = std::sqrt(sq / static_cast<double>(n));
  return result;
}

}  // namespace wornsim
