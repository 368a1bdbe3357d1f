#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <compare>
#include <ostream>
#include <string>

namespace wornsim {

/// Symbolic name of a coordinate frame. Right-handed, meters, radians.
class FrameId {
 public:
  FrameId() = default;
  explicit FrameId(std::string name) : name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }
  bool empty() const noexcept { return name_.empty(); }

  auto operator<=>(const FrameId&) const = default;

 private:
  std::string name_;
};

std::ostream& operator<<(std::ostream& os, const FrameId& frame);

namespace frames {
inline const FrameId kWorld{"W"};
inline const FrameId kBody{"E_H"};
inline const FrameId kVirtualEffector{"E_AR"};
inline const FrameId kRobotEffector{"E_R"};
inline const FrameId kRobotBase{"robot_base"};
inline const FrameId kHeadset{"headset"};
}  // namespace frames

/// Unit quaternion with the double cover resolved: w >= 0, and when w == 0
/// the first non-zero vector component is positive.
Eigen::Quaterniond canonical(Eigen::Quaterniond q);

/// Rotation vector (axis * angle, angle in [0, pi]) of a unit quaternion.
Eigen::Vector3d rotation_vector(const Eigen::Quaterniond& q);
Eigen::Quaterniond from_rotation_vector(const Eigen::Vector3d& v);

/// Rotation angle in [0, pi] of a unit quaternion.
double rotation_angle(const Eigen::Quaterniond& q);

/// Frame-free rigid motion acting on points as p -> R p + t.
/// `a * b` applies b first, then a. Every product is renormalized and
/// canonicalized.
struct Rigid {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Rigid() = default;
  Rigid(const Eigen::Quaterniond& q, const Eigen::Vector3d& t);

  static Rigid identity() { return {}; }
  static Rigid translate(double x, double y, double z);
  static Rigid translate(const Eigen::Vector3d& t);
  static Rigid rotate(const Eigen::Vector3d& axis, double angle);
  static Rigid rot_x(double angle);
  static Rigid rot_y(double angle);
  static Rigid rot_z(double angle);

  Rigid operator*(const Rigid& rhs) const;
  Rigid inverse() const;
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const;
  Eigen::Matrix4d matrix() const;

  bool operator==(const Rigid& rhs) const;
};

/// Rigid transform T_{from -> to}: maps coordinates expressed in `from`
/// into `to`.
class Transform {
 public:
  Transform() = default;
  Transform(FrameId from, FrameId to, const Rigid& motion = Rigid::identity());

  static Transform identity(FrameId from, FrameId to) {
    return Transform(std::move(from), std::move(to));
  }

  const FrameId& from() const noexcept { return from_; }
  const FrameId& to() const noexcept { return to_; }
  const Rigid& motion() const noexcept { return motion_; }
  const Eigen::Quaterniond& rotation() const noexcept { return motion_.rotation; }
  const Eigen::Vector3d& translation() const noexcept { return motion_.translation; }

  Transform relabeled(FrameId from, FrameId to) const {
    return Transform(std::move(from), std::move(to), motion_);
  }

  bool operator==(const Transform& rhs) const = default;

 private:
  FrameId from_;
  FrameId to_;
  Rigid motion_;
};

std::ostream& operator<<(std::ostream& os, const Transform& t);

/// Serial connection: compose(T_{A->B}, T_{B->C}) = T_{A->C}.
/// Throws FrameMismatch when a.to() != b.from().
Transform compose(const Transform& a, const Transform& b);

/// T_{A->B} -> T_{B->A}.
Transform inverse(const Transform& t);

struct PoseError {
  double translation = 0.0;  // meters
  double rotation = 0.0;     // radians, [0, pi]
};

/// Distance between two poses expressed in the same reference frame.
/// The source frames may differ (e.g. E_R vs E_AR, both in W); the
/// reference frames must agree or FrameMismatch is thrown.
PoseError pose_error(const Transform& a, const Transform& b);

/// Linear interpolation of translation, shortest-arc slerp of rotation.
/// Throws DomainError when s is outside [0, 1] and FrameMismatch when the
/// endpoints do not share frames.
Transform interpolate(const Transform& a, const Transform& b, double s);

}  // namespace wornsim
