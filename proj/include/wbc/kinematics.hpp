#pragma once

#include <vector>

#include "wbc/types.hpp"

namespace wbc {

/// One link of the serial arm in modified Denavit-Hartenberg form:
/// T_i = RotX(twist) * TransX(length) * RotZ(q_i + joint_offset) * TransZ(offset).
struct LinkParameters {
  double length = 0.0;        ///< a, m
  double twist = 0.0;         ///< alpha, rad
  double offset = 0.0;        ///< d, m
  double joint_offset = 0.0;  ///< added to the joint angle, rad
};

/// Geometry of the 9-DoF platform: a 6-DoF serial arm on an omnidirectional base.
struct RobotModel {
  std::vector<LinkParameters> arm_links;
  Vector6d joint_lower;
  Vector6d joint_upper;
  double base_radius = 0.3;              ///< footprint disc, m
  Matrix3d arm_mount_rotation;           ///< base frame -> arm mount frame
  Vector3d arm_mount_translation;        ///< arm mount origin in base frame, m

  /// The documented reference arm: anthropomorphic with a spherical wrist,
  /// link lengths {0.22, 0.38, 0.42, 0, 0, 0.12} m, limits
  /// +-175/135/150/175/135/175 deg, identity mount rotation, mount 0.35 m up.
  static RobotModel reference();
};

/// Position + orientation of a frame.
struct Pose {
  Vector3d position = Vector3d::Zero();
  Matrix3d orientation = Matrix3d::Identity();
};

/// Snapshot of the platform: base planar pose in the world frame, arm joints,
/// and the commands/pose bookkeeping the controller works with.
struct WholeBodyState {
  Vector3d base_pose = Vector3d::Zero();        ///< x, y, yaw in world frame
  Vector6d arm_joints = Vector6d::Zero();
  Vector3d base_velocity_cmd = Vector3d::Zero();   ///< vx, vy, wz in base frame
  Vector6d arm_cart_velocity_cmd = Vector6d::Zero();  ///< twist in arm mount frame
  Pose ee_pose_in_base;                         ///< must match FK composed with the mount
};

/// End-effector pose in the arm mount frame by chaining link transforms.
Pose forward_kinematics(const Vector6d& q_a, const RobotModel& model);

/// End-effector pose in the base frame (mount transform composed with FK).
Pose ee_in_base(const Vector6d& q_a, const RobotModel& model);

/// Geometric Jacobian of the arm in the arm mount frame (linear over angular).
Matrix6d arm_jacobian(const Vector6d& q_a, const RobotModel& model);

/// Maps base twist (vx, vy, wz) to the end-effector twist it induces, in the
/// base frame. Rows 3-5 are zero: a planar base cannot create z/roll/pitch rates.
Matrix63d base_jacobian(const Vector3d& ee_pos_in_base);

/// Rotation taking world-frame vectors into the base frame: Rot(z, -yaw).
Matrix3d world_to_base_rotation(double yaw);

/// 6x9 map [V_a; V_b] -> end-effector twist in the base frame:
/// left 6x6 block rotates the arm twist from the mount frame, right 6x3 is
/// base_jacobian at the current end-effector position.
Matrix69d whole_body_jacobian(const WholeBodyState& state, const RobotModel& model);

/// Block-diagonal 6x6 twist rotation built from a 3x3 rotation.
Matrix6d twist_rotation(const Matrix3d& r);

}  // namespace wbc
