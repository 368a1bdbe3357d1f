#include "wornsim/geom.hpp"

#include <cmath>

#include "wornsim/errors.hpp"

namespace wornsim {

std::ostream& operator<<(std::ostream& os, const FrameId& frame) {
  return os << frame.name();
}

Eigen::Quaterniond canonical(Eigen::Quaterniond q) {
  q.normalize();
  bool flip = q.w() < 0.0;
  if (q.w() == 0.0) {
    for (int i = 0; i < 3; ++i) {
      if (q.vec()[i] != 0.0) {
        flip = q.vec()[i] < 0.0;
        break;
      }
    }
  }
  if (flip) q.coeffs() = -q.coeffs();
  return q;
}

Eigen::Vector3d rotation_vector(const Eigen::Quaterniond& q) {
  const double vnorm = q.vec().norm();
  const double w = q.w();
  const double sign = w < 0.0 ? -1.0 : 1.0;
  if (vnorm < 1e-12) {
    // First-order expansion around the identity.
    return (2.0 * sign / std::abs(w)) * q.vec();
  }
  const double angle = 2.0 * std::atan2(vnorm, std::abs(w));
  return (sign * angle / vnorm) * q.vec();
}

Eigen::Quaterniond from_rotation_vector(const Eigen::Vector3d& v) {
  const double angle = v.norm();
  if (angle < 1e-12) {
    Eigen::Quaterniond q(1.0, 0.5 * v.x(), 0.5 * v.y(), 0.5 * v.z());
    return canonical(q);
  }
  return canonical(Eigen::Quaterniond(Eigen::AngleAxisd(angle, v / angle)));
}

double rotation_angle(const Eigen::Quaterniond& q) {
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
}

Rigid::Rigid(const Eigen::Quaterniond& q, const Eigen::Vector3d& t)
    : rotation(canonical(q)), translation(t) {}

Rigid Rigid::translate(double x, double y, double z) {
  return translate(Eigen::Vector3d(x, y, z));
}

Rigid Rigid::translate(const Eigen::Vector3d& t) {
  return Rigid(Eigen::Quaterniond::Identity(), t);
}

Rigid Rigid::rotate(const Eigen::Vector3d& axis, double angle) {
  return Rigid(Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis.normalized())),
               Eigen::Vector3d::Zero());
}

Rigid Rigid::rot_x(double angle) { return rotate(Eigen::Vector3d::UnitX(), angle); }
Rigid Rigid::rot_y(double angle) { return rotate(Eigen::Vector3d::UnitY(), angle); }
Rigid Rigid::rot_z(double angle) { return rotate(Eigen::Vector3d::UnitZ(), angle); }

Rigid Rigid::operator*(const Rigid& rhs) const {
  return Rigid(rotation * rhs.rotation, rotation * rhs.translation + translation);
}

Rigid Rigid::inverse() const {
  const Eigen::Quaterniond inv = rotation.conjugate();
  return Rigid(inv, -(inv * translation));
}

Eigen::Vector3d Rigid::apply(const Eigen::Vector3d& p) const {
  return rotation * p + translation;
}

Eigen::Matrix4d Rigid::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation.toRotationMatrix();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

bool Rigid::operator==(const Rigid& rhs) const {
  return rotation.coeffs() == rhs.rotation.coeffs() && translation == rhs.translation;
}

Transform::Transform(FrameId from, FrameId to, const Rigid& motion)
    : from_(std::move(from)), to_(std::move(to)), motion_(motion) {}

std::ostream& operator<<(std::ostream& os, const Transform& t) {
  const auto& q = t.rotation();
  const auto& p = t.translation();
  return os << "T{" << t.from() << "->" << t.to() << " q=[" << q.w() << ", " << q.x()
            << ", " << q.y() << ", " << q.z() << "] t=[" << p.x() << ", " << p.y()
            << ", " << p.z() << "]}";
}

Transform compose(const Transform& a, const Transform& b) {
  if (a.to() != b.from()) {
    throw FrameMismatch("compose: " + a.from().name() + "->" + a.to().name() +
                        " cannot feed " + b.from().name() + "->" + b.to().name());
  }
  return Transform(a.from(), b.to(), b.motion() * a.motion());
}

Transform inverse(const Transform& t) {
  return Transform(t.to(), t.from(), t.motion().inverse());
}

PoseError pose_error(const Transform& a, const Transform& b) {
  if (a.to() != b.to()) {
    throw FrameMismatch("pose_error: poses expressed in " + a.to().name() + " and " +
                        b.to().name());
  }
  PoseError err;
  err.translation = (a.translation() - b.translation()).norm();
  err.rotation = rotation_angle(a.rotation().conjugate() * b.rotation());
  return err;
}

Transform interpolate(const Transform& a, const Transform& b, double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw DomainError("interpolate: parameter " + std::to_string(s) + " outside [0, 1]");
  }
  if (a.from() != b.from() || a.to() != b.to()) {
    throw FrameMismatch("interpolate: endpoints do not share frames");
  }
  if (s == 0.0) return a;
  if (s == 1.0 || a.motion() == b.motion()) return b;
  const Eigen::Vector3d t = a.translation() + s * (b.translation() - a.translation());
  // Eigen's slerp takes the shortest arc.
  const Eigen::Quaterniond q = a.rotation().slerp(s, b.rotation());
  return Transform(a.from(), a.to(), Rigid(q, t));
}

}  // namespace wornsim
