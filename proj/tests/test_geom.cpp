#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wornsim/errors.hpp"
#include "wornsim/geom.hpp"

using namespace wornsim;

namespace {

const FrameId A{"A"}, B{"B"}, C{"C"}, D{"D"};

Transform T(const FrameId& from, const FrameId& to, const Rigid& r) { return Transform(from, to, r); }

bool near(const Transform& a, const Transform& b, double tol) {
  return a.from() == b.from() && a.to() == b.to() &&
         oracle::max_abs_diff(oracle::matrix_of(a), oracle::matrix_of(b)) <= tol;
}

}  // namespace

TEST_CASE("compose: identity and pure translations") {
  const Transform t = T(A, B, Rigid::rot_x(0.3) * Rigid::translate(1, 2, 3));
  CHECK(compose(Transform::identity(A, A), t) == t);
  CHECK(near(compose(t, Transform::identity(B, B)), t, 0.0));

  const Transform sum = compose(T(A, B, Rigid::translate(1, 0, 0)), T(B, C, Rigid::translate(0, 1, 0)));
  CHECK(sum.from() == A);
  CHECK(sum.to() == C);
  CHECK(sum.translation().isApprox(Eigen::Vector3d(1, 1, 0)));
}

TEST_CASE("compose: quarter turn then translation matches the 4x4 product") {
  const Transform a = T(A, B, Rigid::rot_z(M_PI / 2));
  const Transform b = T(B, C, Rigid::translate(1, 0, 0));
  const oracle::Mat4 expected =
      oracle::trans(1, 0, 0) * oracle::rot(Eigen::Vector3d::UnitZ(), M_PI / 2);
  CHECK(oracle::max_abs_diff(oracle::matrix_of(compose(a, b)), expected) < 1e-12);

  // The other order rotates the translation.
  const Transform c = compose(T(A, B, Rigid::translate(1, 0, 0)), T(B, C, Rigid::rot_z(M_PI / 2)));
  CHECK(c.translation().isApprox(Eigen::Vector3d(0, 1, 0)));
}

TEST_CASE("compose rejects mismatched inner frames") {
  CHECK_THROWS_AS(compose(T(A, B, {}), T(C, D, {})), FrameMismatch);
}

TEST_CASE("inverse") {
  CHECK(inverse(Transform::identity(A, B)) == Transform::identity(B, A));
  const Transform t = inverse(T(A, B, Rigid::translate(1, 2, 3)));
  CHECK(t.from() == B);
  CHECK(t.to() == A);
  CHECK(t.translation() == Eigen::Vector3d(-1, -2, -3));

  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Transform r = T(A, B, oracle::random_rigid(rng, 2.0));
    const oracle::Mat4 expected = oracle::matrix_of(r).inverse();
    CHECK(oracle::max_abs_diff(oracle::matrix_of(inverse(r)), expected) < 1e-12);
    CHECK(near(compose(r, inverse(r)), Transform::identity(A, A), 1e-9));
  }
}

TEST_CASE("pose_error") {
  const Transform t = T(A, C, Rigid::rot_y(0.4) * Rigid::translate(0.1, 0.2, 0.3));
  const PoseError zero = pose_error(t, t);
  CHECK(zero.translation == 0.0);
  CHECK(zero.rotation == 0.0);

  const PoseError e345 = pose_error(Transform::identity(A, C), T(A, C, Rigid::translate(3, 4, 0)));
  CHECK(e345.translation == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(e345.rotation == 0.0);

  const PoseError quarter = pose_error(Transform::identity(A, C), T(A, C, Rigid::rot_z(M_PI / 2)));
  CHECK(quarter.translation == 0.0);
  CHECK(quarter.rotation == doctest::Approx(M_PI / 2).epsilon(1e-14));

  // Different sources in a common reference are comparable; different
  // references are not.
  CHECK_NOTHROW(pose_error(T(A, C, {}), T(B, C, {})));
  CHECK_THROWS_AS(pose_error(T(A, B, {}), T(A, C, {})), FrameMismatch);
}

TEST_CASE("pose_error is symmetric") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const Transform a = T(A, C, oracle::random_rigid(rng));
    const Transform b = T(B, C, oracle::random_rigid(rng));
    const PoseError ab = pose_error(a, b);
    const PoseError ba = pose_error(b, a);
    CHECK(std::abs(ab.translation - ba.translation) <= 1e-12);
    CHECK(std::abs(ab.rotation - ba.rotation) <= 1e-12);
    CHECK(ab.rotation >= 0.0);
    CHECK(ab.rotation <= M_PI);
    // Independent angle from the relative rotation matrix.
    const Eigen::Matrix3d ra = oracle::matrix_of(a).topLeftCorner<3, 3>();
    const Eigen::Matrix3d rb = oracle::matrix_of(b).topLeftCorner<3, 3>();
    CHECK(ab.rotation == doctest::Approx(oracle::angle_of(ra.transpose() * rb)).epsilon(1e-6));
  }
}

TEST_CASE("interpolate") {
  const Transform a = T(A, B, Rigid::rot_x(0.2) * Rigid::translate(1, 0, 0));
  const Transform b = T(A, B, Rigid::rot_y(1.2) * Rigid::translate(0, 2, 0));
  CHECK(interpolate(a, b, 0.0) == a);
  CHECK(interpolate(a, b, 1.0) == b);

  const Transform mid = interpolate(Transform::identity(A, B), T(A, B, Rigid::translate(2, 0, 0)), 0.5);
  CHECK(mid.translation().isApprox(Eigen::Vector3d(1, 0, 0)));

  // Slerp closed form: halfway along a quarter turn about z is an eighth turn.
  const Transform half = interpolate(Transform::identity(A, B), T(A, B, Rigid::rot_z(M_PI / 2)), 0.5);
  const oracle::Mat4 expected = oracle::rot(Eigen::Vector3d::UnitZ(), M_PI / 4);
  CHECK(oracle::max_abs_diff(oracle::matrix_of(half), expected) < 1e-12);

  CHECK_THROWS_AS(interpolate(a, b, -0.01), DomainError);
  CHECK_THROWS_AS(interpolate(a, b, 1.01), DomainError);
  CHECK_THROWS_AS(interpolate(a, b, std::nan("")), DomainError);
  CHECK_THROWS_AS(interpolate(a, T(A, C, {}), 0.5), FrameMismatch);
}

TEST_CASE("interpolate takes the shortest arc") {
  // 350 degrees one way is 10 degrees the other.
  const Transform a = Transform::identity(A, B);
  const Transform b = T(A, B, Rigid::rot_z(350.0 * M_PI / 180.0));
  const Transform mid = interpolate(a, b, 0.5);
  CHECK(pose_error(a, mid).rotation == doctest::Approx(5.0 * M_PI / 180.0).epsilon(1e-12));
}

TEST_CASE("interpolated rotation angle grows monotonically in s") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Transform a = T(A, B, oracle::random_rigid(rng));
    const Transform b = T(A, B, oracle::random_rigid(rng));
    double previous = -1.0;
    for (int k = 0; k <= 100; ++k) {
      const double angle = pose_error(a, interpolate(a, b, k / 100.0)).rotation;
      CHECK(angle >= previous - 1e-12);
      previous = angle;
    }
  }
}

TEST_CASE("composition is associative") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Transform a = T(A, B, oracle::random_rigid(rng));
    const Transform b = T(B, C, oracle::random_rigid(rng));
    const Transform c = T(C, D, oracle::random_rigid(rng));
    const Transform left = compose(compose(a, b), c);
    const Transform right = compose(a, compose(b, c));
    REQUIRE(near(left, right, 1e-9));
  }
}

TEST_CASE("quaternion norm survives long composition chains") {
  std::mt19937_64 rng(3);
  Transform acc = Transform::identity(A, A);
  const Transform step = T(A, A, oracle::random_rigid(rng, 1e-3));
  for (int i = 0; i < 100000; ++i) acc = compose(acc, step);
  CHECK(std::abs(acc.rotation().norm() - 1.0) <= 1e-9);
  CHECK(acc.rotation().w() >= 0.0);
}

TEST_CASE("canonical quaternions have non-negative w") {
  const Eigen::Quaterniond q = canonical(Eigen::Quaterniond(-0.5, 0.5, -0.5, 0.5));
  CHECK(q.w() == doctest::Approx(0.5));
  CHECK(q.x() == doctest::Approx(-0.5));
  const Eigen::Quaterniond half_turn = canonical(Eigen::Quaterniond(0.0, 0.0, -1.0, 0.0));
  CHECK(half_turn.y() == 1.0);
}

TEST_CASE("rotation vector round trip") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d v = oracle::random_unit(rng) * (0.1 + 3.0 * i / 200.0);
    const Eigen::Vector3d back = rotation_vector(from_rotation_vector(v));
    CHECK((back - v).norm() < 1e-12);
  }
  const Eigen::Vector3d tiny(1e-14, -2e-14, 0.0);
  CHECK((rotation_vector(from_rotation_vector(tiny)) - tiny).norm() < 1e-20);
}
