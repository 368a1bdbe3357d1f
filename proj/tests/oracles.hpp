#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's quaternion or chain code: rotations are built with Rodrigues'
// formula and chained as plain 4x4 homogeneous matrices.

#include <Eigen/Core>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "wornsim/geom.hpp"
#include "wornsim/kinematics.hpp"

namespace oracle {

using Mat4 = Eigen::Matrix4d;

inline Eigen::Matrix3d rodrigues(const Eigen::Vector3d& axis, double angle) {
  const Eigen::Vector3d k = axis / axis.norm();
  Eigen::Matrix3d K;
  K << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  return Eigen::Matrix3d::Identity() + std::sin(angle) * K + (1 - std::cos(angle)) * K * K;
}

inline Mat4 homogeneous(const Eigen::Matrix3d& r, const Eigen::Vector3d& t) {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = r;
  m.topRightCorner<3, 1>() = t;
  return m;
}

inline Mat4 rot(const Eigen::Vector3d& axis, double angle) {
  return homogeneous(rodrigues(axis, angle), Eigen::Vector3d::Zero());
}

inline Mat4 trans(double x, double y, double z) {
  return homogeneous(Eigen::Matrix3d::Identity(), Eigen::Vector3d(x, y, z));
}

/// Matrix of a rigid motion, built from the quaternion coefficients by the
/// textbook formula (not Eigen's toRotationMatrix).
inline Mat4 matrix_of(const wornsim::Rigid& r) {
  const double w = r.rotation.w(), x = r.rotation.x(), y = r.rotation.y(), z = r.rotation.z();
  Eigen::Matrix3d m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return homogeneous(m, r.translation);
}

inline Mat4 matrix_of(const wornsim::Transform& t) { return matrix_of(t.motion()); }

inline double max_abs_diff(const Mat4& a, const Mat4& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// Naive forward kinematics: product of per-joint 4x4 matrices.
inline Mat4 chain_fk(const wornsim::KinematicChain& chain, const Eigen::VectorXd& q) {
  Mat4 m = Mat4::Identity();
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    const auto& joint = chain.joints()[i];
    m = m * matrix_of(joint.offset);
    const double v = q[static_cast<Eigen::Index>(i)];
    if (joint.kind == wornsim::JointKind::kRevolute) {
      m = m * rot(joint.axis, v);
    } else {
      m = m * homogeneous(Eigen::Matrix3d::Identity(), joint.axis * v);
    }
  }
  return m * matrix_of(chain.tip_offset());
}

/// Rotation angle of a rotation matrix, via the trace.
inline double angle_of(const Eigen::Matrix3d& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

/// Rotation vector of a rotation matrix (log map), for angles below pi.
inline Eigen::Vector3d log_of(const Eigen::Matrix3d& r) {
  const double angle = angle_of(r);
  const Eigen::Vector3d v(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  if (angle < 1e-12) return 0.5 * v;
  return angle / (2.0 * std::sin(angle)) * v;
}

inline Eigen::Vector3d random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector3d v(n(rng), n(rng), n(rng));
  return v / v.norm();
}

inline wornsim::Rigid random_rigid(std::mt19937_64& rng, double max_translation = 1.0) {
  std::uniform_real_distribution<double> u(-max_translation, max_translation);
  std::uniform_real_distribution<double> a(-M_PI, M_PI);
  return wornsim::Rigid(Eigen::Quaterniond(Eigen::AngleAxisd(a(rng), random_unit(rng))),
                        Eigen::Vector3d(u(rng), u(rng), u(rng)));
}

/// Random chain of n joints (about 1 in 4 prismatic) with random offsets.
inline wornsim::KinematicChain random_chain(std::mt19937_64& rng, std::size_t n,
                                            const std::string& prefix = "j") {
  std::vector<wornsim::JointSpec> joints;
  std::uniform_int_distribution<int> kind(0, 3);
  for (std::size_t i = 0; i < n; ++i) {
    wornsim::JointSpec j;
    j.name = prefix + std::to_string(i);
    j.kind = kind(rng) == 0 ? wornsim::JointKind::kPrismatic : wornsim::JointKind::kRevolute;
    j.axis = random_unit(rng);
    j.limits = {-M_PI, M_PI};
    j.offset = random_rigid(rng, 0.5);
    joints.push_back(j);
  }
  return wornsim::KinematicChain(wornsim::FrameId(prefix + "_base"), std::move(joints),
                                 wornsim::FrameId(prefix + "_tip"), random_rigid(rng, 0.3));
}

inline Eigen::VectorXd random_q(std::mt19937_64& rng, const wornsim::KinematicChain& chain) {
  Eigen::VectorXd q(static_cast<Eigen::Index>(chain.dof()));
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    const auto& lim = chain.joints()[i].limits;
    std::uniform_real_distribution<double> u(lim.min, lim.max);
    q[static_cast<Eigen::Index>(i)] = u(rng);
  }
  return q;
}

/// Central finite-difference Jacobian of chain FK (linear; world-frame angular).
inline Eigen::MatrixXd fd_jacobian(const wornsim::KinematicChain& chain, const Eigen::VectorXd& q,
                                   double eps) {
  Eigen::MatrixXd jac(6, q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    Eigen::VectorXd qp = q, qm = q;
    qp[i] += eps;
    qm[i] -= eps;
    const Mat4 mp = chain_fk(chain, qp);
    const Mat4 mm = chain_fk(chain, qm);
    jac.block<3, 1>(0, i) = (mp.topRightCorner<3, 1>() - mm.topRightCorner<3, 1>()) / (2 * eps);
    const Eigen::Matrix3d drel =
        mp.topLeftCorner<3, 3>() * mm.topLeftCorner<3, 3>().transpose();
    jac.block<3, 1>(3, i) = log_of(drel) / (2 * eps);
  }
  return jac;
}

}  // namespace oracle
