#pragma once

#include <vector>

#include "wbc/kinematics.hpp"
#include "wbc/types.hpp"

namespace wbc {

/// Linear base behavior: a first-order velocity lag plus one lightly damped
/// structural mode excited by base acceleration.
struct BasePlantParams {
  double bandwidth = 6.0;     ///< dominant lag, rad/s
  double flex_freq = 25.0;    ///< structural mode, rad/s
  double flex_damping = 0.08;
  double flex_gain = 6.0;     ///< mode displacement per unit base acceleration
};

/// Plant memory: achieved velocity and the x-y flex mode states (base frame).
struct BasePlantState {
  Vector3d velocity = Vector3d::Zero();
  Vector2d flex_pos = Vector2d::Zero();
  Vector2d flex_vel = Vector2d::Zero();
};

/// A disc actor in the plane. `waypoints` (time, center) override the constant
/// velocity when present; centers interpolate linearly between entries.
struct ObstacleActor {
  Vector2d center = Vector2d::Zero();
  double radius = 0.0;
  Vector2d velocity = Vector2d::Zero();
  std::vector<std::pair<double, Vector2d>> waypoints;
};

/// Spring plane: reaction force = stiffness * penetration along the outward
/// normal (zero when not penetrating), no torque.
struct ContactSurface {
  bool present = false;
  Vector3d point = Vector3d::Zero();
  Vector3d normal = Vector3d::UnitX();
  double stiffness = 1000.0;
};

/// Time-indexed wrench samples, linearly interpolated.
struct ForceSample {
  double t = 0.0;
  Vector6d wrench = Vector6d::Zero();
};

/// Everything outside the robot.
struct World {
  std::vector<ObstacleActor> obstacles;
  ContactSurface surface;
  std::vector<ForceSample> force_script;
};

/// Advance the plant one sample. Returns the achieved base velocity (base
/// frame) and the structural displacement added to the measured end-effector
/// position (base frame x-y, zero z).
struct BasePlantResult {
  BasePlantState state;
  Vector3d actual_velocity = Vector3d::Zero();
  Vector3d ee_vibration_offset = Vector3d::Zero();
};
BasePlantResult base_plant_step(const Vector3d& cmd, const BasePlantState& state,
                                const BasePlantParams& params, double dt);

/// Track a Cartesian arm command through a damped least-squares inverse of the
/// arm Jacobian, integrate, and clamp at the joint limits.
Vector6d arm_plant_step(const Vector6d& cmd, const Vector6d& q_a, const RobotModel& model,
                        double dt);

/// Advance obstacle centers to time t + dt (waypoints win over velocity).
World world_step(const World& world, double t, double dt);

/// Scripted wrench at time t (linear interpolation, ends held).
Vector6d scripted_force(const World& world, double t);

/// Reaction wrench of the spring surface on an end-effector at `ee_position`.
Vector6d contact_force(const ContactSurface& surface, const Vector3d& ee_position);

/// Instantaneous minimum surface-to-surface distance between the base disc and
/// the obstacle discs, floored at 1e-3 m.
double measure_obstacle_distance(const World& world, const Vector3d& base_pose,
                                 double footprint_radius);

/// Sample-and-hold wrapper producing the sensed distance stream: re-measures
/// at `rate_hz`, holds the last value (and away-direction) in between.
class ObstacleSensor {
 public:
  explicit ObstacleSensor(double rate_hz = 15.0) : period_(1.0 / rate_hz) {}

  /// Update (if a sample is due at time t) and return the held measurement.
  void sample(const World& world, const Vector3d& base_pose, double footprint_radius,
              double t);

  bool valid() const { return valid_; }
  double distance() const { return distance_; }
  const Vector2d& away_direction() const { return away_; }

 private:
  double period_;
  double next_sample_ = 0.0;
  bool valid_ = false;
  double distance_ = 0.0;
  Vector2d away_ = Vector2d::Zero();
};

}  // namespace wbc
