#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "wbc/kinematics.hpp"

using namespace wbc;

namespace {

/// Unskew a 3x3 antisymmetric matrix into its axis vector.
Vector3d unskew(const Matrix3d& s) {
  return Vector3d(s(2, 1), s(0, 2), s(1, 0));
}

Vector6d random_joints(std::mt19937& rng, const RobotModel& model, double margin) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector6d q;
  for (int i = 0; i < 6; ++i) {
    const double half = 0.5 * (model.joint_upper[i] - model.joint_lower[i]);
    const double mid = 0.5 * (model.joint_upper[i] + model.joint_lower[i]);
    q[i] = mid + margin * half * u(rng);
  }
  return q;
}

}  // namespace

TEST_CASE("home pose matches the documented geometry") {
  const RobotModel model = RobotModel::reference();
  const Pose mount = forward_kinematics(Vector6d::Zero(), model);
  CHECK(mount.position.x() == doctest::Approx(0.38).epsilon(1e-12));
  CHECK(mount.position.y() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mount.position.z() == doctest::Approx(-0.32).epsilon(1e-12));
  Matrix3d expected;
  expected << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  CHECK((mount.orientation - expected).norm() < 1e-12);

  const Pose base = ee_in_base(Vector6d::Zero(), model);
  CHECK(base.position.x() == doctest::Approx(0.38).epsilon(1e-12));
  CHECK(base.position.z() == doctest::Approx(0.03).epsilon(1e-12));
  CHECK((base.orientation - expected).norm() < 1e-12);
}

TEST_CASE("rotation matrices stay orthonormal across the joint range") {
  const RobotModel model = RobotModel::reference();
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector6d q = random_joints(rng, model, 1.0);
    const Pose pose = forward_kinematics(q, model);
    CHECK((pose.orientation * pose.orientation.transpose() - Matrix3d::Identity())
              .norm() < 1e-12);
    CHECK(pose.orientation.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("arm jacobian agrees with finite differences of the kinematics") {
  const RobotModel model = RobotModel::reference();
  std::mt19937 rng(11);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const Vector6d q = random_joints(rng, model, 0.8);
    const Matrix6d j = arm_jacobian(q, model);
    for (int i = 0; i < 6; ++i) {
      Vector6d qp = q, qm = q;
      qp[i] += h;
      qm[i] -= h;
      const Pose pp = forward_kinematics(qp, model);
      const Pose pm = forward_kinematics(qm, model);
      const Vector3d lin = (pp.position - pm.position) / (2.0 * h);
      const Pose p0 = forward_kinematics(q, model);
      const Matrix3d dr = (pp.orientation - pm.orientation) / (2.0 * h);
      const Vector3d ang = unskew(dr * p0.orientation.transpose());
      CHECK((j.block<3, 1>(0, i) - lin).norm() < 1e-6);
      CHECK((j.block<3, 1>(3, i) - ang).norm() < 1e-6);
    }
  }
}

TEST_CASE("base jacobian has the planar rigid-body structure") {
  const Vector3d ee(0.41, -0.13, 0.52);
  const Matrix63d jb = base_jacobian(ee);
  Matrix63d expected = Matrix63d::Zero();
  expected(0, 0) = 1.0;
  expected(0, 2) = 0.13;  // -y
  expected(1, 1) = 1.0;
  expected(1, 2) = 0.41;  // x
  expected(5, 2) = 1.0;
  CHECK((jb - expected).norm() < 1e-15);
}

TEST_CASE("world-to-base rotation undoes the base yaw") {
  const double yaw = 0.73;
  const Matrix3d r = world_to_base_rotation(yaw);
  const Vector3d world_dir(std::cos(yaw), std::sin(yaw), 0.0);
  CHECK((r * world_dir - Vector3d::UnitX()).norm() < 1e-12);
  CHECK((r * r.transpose() - Matrix3d::Identity()).norm() < 1e-12);
}

TEST_CASE("twist rotation is block diagonal") {
  const Matrix3d r = Eigen::AngleAxisd(0.4, Vector3d::UnitZ()).toRotationMatrix();
  const Matrix6d t = twist_rotation(r);
  CHECK((t.topLeftCorner<3, 3>() - r).norm() < 1e-15);
  CHECK((t.bottomRightCorner<3, 3>() - r).norm() < 1e-15);
  CHECK(t.topRightCorner<3, 3>().norm() == 0.0);
  CHECK(t.bottomLeftCorner<3, 3>().norm() == 0.0);
}

TEST_CASE("whole-body jacobian assembles the arm and base maps") {
  RobotModel model = RobotModel::reference();
  model.arm_mount_rotation =
      Eigen::AngleAxisd(0.3, Vector3d::UnitZ()).toRotationMatrix();
  std::mt19937 rng(3);
  const Vector6d q = random_joints(rng, model, 0.6);

  WholeBodyState state;
  state.base_pose = Vector3d(0.2, -0.4, 0.9);
  state.arm_joints = q;
  state.ee_pose_in_base = ee_in_base(q, model);

  const Matrix69d j = whole_body_jacobian(state, model);
  const Matrix6d left = twist_rotation(model.arm_mount_rotation);
  const Matrix63d right = base_jacobian(state.ee_pose_in_base.position);
  CHECK((j.leftCols<6>() - left).norm() < 1e-12);
  CHECK((j.rightCols<3>() - right).norm() < 1e-12);

  // A pure base twist maps through the base block alone.
  Vector9d v = Vector9d::Zero();
  v.tail<3>() = Vector3d(0.1, -0.2, 0.5);
  CHECK((j * v - right * v.tail<3>()).norm() < 1e-12);
}

TEST_CASE("mount transform relates the two end-effector poses") {
  const RobotModel model = RobotModel::reference();
  std::mt19937 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector6d q = random_joints(rng, model, 0.8);
    const Pose in_mount = forward_kinematics(q, model);
    const Pose in_base = ee_in_base(q, model);
    const Vector3d expected = model.arm_mount_rotation * in_mount.position +
                              model.arm_mount_translation;
    CHECK((in_base.position - expected).norm() < 1e-12);
    CHECK((in_base.orientation - model.arm_mount_rotation * in_mount.orientation)
              .norm() < 1e-12);
  }
}
