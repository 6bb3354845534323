#include "wbc/kinematics.hpp"

#include <cmath>

namespace wbc {

namespace {

Matrix3d rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Matrix3d r;
  r << 1, 0, 0, 0, c, -s, 0, s, c;
  return r;
}

Matrix3d rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Matrix3d r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

/// Transform of link i relative to link i-1 for a given joint angle.
Pose link_transform(const LinkParameters& link, double q) {
  const Matrix3d rx = rot_x(link.twist);
  const Matrix3d rz = rot_z(q + link.joint_offset);
  Pose t;
  t.orientation = rx * rz;
  t.position = rx * (Vector3d(link.length, 0, 0) + rz * Vector3d(0, 0, link.offset));
  return t;
}

}  // namespace

RobotModel RobotModel::reference() {
  constexpr double kPi = 3.14159265358979323846;
  RobotModel m;
  // {length a, twist alpha, offset d, joint offset}
  m.arm_links = {
      {0.00, 0.0, 0.22, 0.0},
      {0.00, -kPi / 2, 0.00, 0.0},
      {0.38, 0.0, 0.00, 0.0},
      {0.00, -kPi / 2, 0.42, 0.0},
      {0.00, kPi / 2, 0.00, 0.0},
      {0.00, -kPi / 2, 0.12, 0.0},
  };
  const double deg = kPi / 180.0;
  Vector6d upper;
  upper << 175 * deg, 135 * deg, 150 * deg, 175 * deg, 135 * deg, 175 * deg;
  m.joint_upper = upper;
  m.joint_lower = -upper;
  m.base_radius = 0.3;
  m.arm_mount_rotation = Matrix3d::Identity();
  m.arm_mount_translation = Vector3d(0, 0, 0.35);
  return m;
}

Pose forward_kinematics(const Vector6d& q_a, const RobotModel& model) {
  Pose out;  // identity = arm mount frame
  for (int i = 0; i < 6; ++i) {
    const Pose t = link_transform(model.arm_links[static_cast<size_t>(i)], q_a[i]);
    out.position += out.orientation * t.position;
    out.orientation = out.orientation * t.orientation;
  }
  return out;
}

Pose ee_in_base(const Vector6d& q_a, const RobotModel& model) {
  const Pose fk = forward_kinematics(q_a, model);
  Pose out;
  out.position = model.arm_mount_translation + model.arm_mount_rotation * fk.position;
  out.orientation = model.arm_mount_rotation * fk.orientation;
  return out;
}

Matrix6d arm_jacobian(const Vector6d& q_a, const RobotModel& model) {
  // Joint i rotates frame i about that frame's z axis, and the frame origin
  // lies on the axis (the link offset slides along it), so one chain walk
  // yields every axis/origin pair.
  Vector3d axes[6];
  Vector3d origins[6];
  Pose walk;
  for (int i = 0; i < 6; ++i) {
    const Pose t = link_transform(model.arm_links[static_cast<size_t>(i)], q_a[i]);
    walk.position += walk.orientation * t.position;
    walk.orientation = walk.orientation * t.orientation;
    axes[i] = walk.orientation.col(2);
    origins[i] = walk.position;
  }
  const Vector3d p_ee = walk.position;
  Matrix6d j;
  for (int i = 0; i < 6; ++i) {
    j.block<3, 1>(0, i) = axes[i].cross(p_ee - origins[i]);
    j.block<3, 1>(3, i) = axes[i];
  }
  return j;
}

Matrix63d base_jacobian(const Vector3d& ee_pos_in_base) {
  Matrix63d j = Matrix63d::Zero();
  j(0, 0) = 1.0;
  j(1, 1) = 1.0;
  j(0, 2) = -ee_pos_in_base.y();
  j(1, 2) = ee_pos_in_base.x();
  j(5, 2) = 1.0;
  return j;
}

Matrix3d world_to_base_rotation(double yaw) { return rot_z(-yaw); }

Matrix6d twist_rotation(const Matrix3d& r) {
  Matrix6d out = Matrix6d::Zero();
  out.topLeftCorner<3, 3>() = r;
  out.bottomRightCorner<3, 3>() = r;
  return out;
}

Matrix69d whole_body_jacobian(const WholeBodyState& state, const RobotModel& model) {
  Matrix69d j;
  j.leftCols<6>() = twist_rotation(model.arm_mount_rotation);
  j.rightCols<3>() = base_jacobian(state.ee_pose_in_base.position);
  return j;
}

}  // namespace wbc
