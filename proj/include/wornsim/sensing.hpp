#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "wornsim/geom.hpp"
#include "wornsim/kinematics.hpp"
#include "wornsim/models.hpp"

namespace wornsim {

struct MocapSample {
  FrameId frame;
  Transform pose;  // frame -> W
  double sigma_t = 0.0;
  double sigma_r = 0.0;
  double timestamp = 0.0;
};

/// One optical marker reading: Gaussian noise of std sigma_t per axis on the
/// translation, and a rotation of N(0, sigma_r) radians about a uniformly
/// random axis applied in the world frame.
MocapSample mocap_measure(const Transform& true_pose, double sigma_t, double sigma_r, std::uint64_t seed,
                          double timestamp = 0.0);

/// Random small rotation: N(0, sigma) radians about a uniform random axis.
Eigen::Quaterniond random_rotation_noise(std::mt19937_64& rng, double sigma);

/// Translation bias of the headset self-localization. The bias is a 3-D
/// Brownian path sampled on a 10 ms grid (linear in between), scaled by
/// drift_rate * sqrt(t) / sqrt(8/pi) so that E|bias(t)| = drift_rate * t.
/// Queries must be non-decreasing in time.
class SlamDrift {
 public:
  static constexpr double kGrid = 0.01;

  SlamDrift(double drift_rate, std::uint64_t seed);

  Eigen::Vector3d bias_at(double elapsed);

 private:
  double drift_rate_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  long steps_ = 0;              // grid points integrated into walk_
  Eigen::Vector3d walk_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d next_ = Eigen::Vector3d::Zero();  // increment toward grid point steps_ + 1
};

/// Head pose as reported by the headset: the true pose offset by the drift
/// bias after `elapsed` seconds.
Transform slam_head_pose(const Transform& true_head_pose, double drift_rate, double elapsed, std::uint64_t seed);

struct ImuSample {
  FrameId segment;  // trunk, upper_arm or forearm
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();  // segment -> W
  Eigen::Vector3d angular_velocity = Eigen::Vector3d::Zero();      // rad/s, world frame
  double timestamp = 0.0;
};

/// Segments carrying an IMU.
std::vector<FrameId> imu_segments();

/// IMU readings from body frame poses. The angular velocity is the finite
/// difference against `previous` (zero without it). Orientation noise of
/// sigma_r radians is drawn per segment from `seed`.
std::vector<ImuSample> synthesize_imus(const std::map<FrameId, Transform>& body,
                                       const std::map<FrameId, Transform>* previous, double dt,
                                       double sigma_r, std::uint64_t seed, double timestamp = 0.0);

struct UpperBodyEstimate {
  JointVector q;                       // human joint vector
  Transform root_pose;                 // pelvis -> W
  std::map<FrameId, Transform> frames; // T_{frame -> W} for every named frame
};

/// Rebuild the upper body from the headset pose and the segment IMUs. The
/// chain is anchored at the head and propagated down the neck and trunk; the
/// pelvis keeps the orientation of `model.root`, so a pelvis yaw shows up as
/// trunk yaw. Throws MissingSegment.
UpperBodyEstimate reconstruct_upper_body(const Transform& head_pose, const std::vector<ImuSample>& imus,
                                         const BodyModel& model = {});

struct CalibrationResult {
  Transform robot_to_world;  // T_{robot_base -> W}
  double residual_rms = 0.0; // m
};

/// Least-squares rigid alignment of corresponding positions (Kabsch). Each
/// pair is (pose in robot_base, pose in W); only translations are used.
/// Throws DegenerateGeometry for fewer than 3 points or collinear points.
CalibrationResult calibrate_robot_to_world(const std::vector<std::pair<Transform, Transform>>& correspondences);

}  // namespace wornsim
