#include "wbc/sim.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace wbc {

BasePlantResult base_plant_step(const Vector3d& cmd, const BasePlantState& state,
                                const BasePlantParams& params, double dt) {
  BasePlantResult out;
  const Vector3d accel = params.bandwidth * (cmd - state.velocity);
  out.state.velocity = state.velocity + dt * accel;

  // Structural mode driven by planar base acceleration.
  const double w = params.flex_freq;
  const double z = params.flex_damping;
  const Vector2d drive = -params.flex_gain * accel.head<2>() / (w * w);
  Vector2d pos = state.flex_pos;
  Vector2d vel = state.flex_vel;
  const Vector2d acc = -w * w * pos - 2.0 * z * w * vel + w * w * drive;
  vel += dt * acc;
  pos += dt * vel;
  out.state.flex_pos = pos;
  out.state.flex_vel = vel;

  out.actual_velocity = out.state.velocity;
  out.ee_vibration_offset = Vector3d(pos.x(), pos.y(), 0.0);
  return out;
}

Vector6d arm_plant_step(const Vector6d& cmd, const Vector6d& q_a, const RobotModel& model,
                        double dt) {
  const Matrix6d j = arm_jacobian(q_a, model);
  Eigen::JacobiSVD<Matrix6d> svd(j);
  double lambda = 0.0;
  if (svd.singularValues().minCoeff() < 1e-2) lambda = 1e-3;
  Matrix6d jjt = j * j.transpose();
  jjt.diagonal().array() += lambda * lambda;
  const Vector6d qdot = j.transpose() * jjt.ldlt().solve(cmd);
  Vector6d q = q_a + dt * qdot;
  for (int i = 0; i < 6; ++i) {
    q[i] = std::clamp(q[i], model.joint_lower[i], model.joint_upper[i]);
  }
  return q;
}

namespace {

Vector2d waypoint_center(const ObstacleActor& actor, double t) {
  const auto& wp = actor.waypoints;
  if (t <= wp.front().first) return wp.front().second;
  if (t >= wp.back().first) return wp.back().second;
  for (std::size_t i = 0; i + 1 < wp.size(); ++i) {
    if (t <= wp[i + 1].first) {
      const double span = wp[i + 1].first - wp[i].first;
      const double u = span > 0.0 ? (t - wp[i].first) / span : 1.0;
      return wp[i].second + u * (wp[i + 1].second - wp[i].second);
    }
  }
  return wp.back().second;
}

}  // namespace

World world_step(const World& world, double t, double dt) {
  World next = world;
  for (auto& actor : next.obstacles) {
    if (!actor.waypoints.empty()) {
      actor.center = waypoint_center(actor, t + dt);
    } else {
      actor.center += dt * actor.velocity;
    }
  }
  return next;
}

Vector6d scripted_force(const World& world, double t) {
  const auto& script = world.force_script;
  if (script.empty()) return Vector6d::Zero();
  if (t <= script.front().t) return script.front().wrench;
  if (t >= script.back().t) return script.back().wrench;
  for (std::size_t i = 0; i + 1 < script.size(); ++i) {
    if (t <= script[i + 1].t) {
      const double span = script[i + 1].t - script[i].t;
      const double u = span > 0.0 ? (t - script[i].t) / span : 1.0;
      return script[i].wrench + u * (script[i + 1].wrench - script[i].wrench);
    }
  }
  return script.back().wrench;
}

Vector6d contact_force(const ContactSurface& surface, const Vector3d& ee_position) {
  Vector6d wrench = Vector6d::Zero();
  if (!surface.present) return wrench;
  const Vector3d n = surface.normal.normalized();
  const double penetration = (surface.point - ee_position).dot(n);
  if (penetration > 0.0) {
    wrench.head<3>() = surface.stiffness * penetration * n;
  }
  return wrench;
}

double measure_obstacle_distance(const World& world, const Vector3d& base_pose,
                                 double footprint_radius) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& actor : world.obstacles) {
    const double center_gap = (actor.center - base_pose.head<2>()).norm();
    best = std::min(best, center_gap - actor.radius - footprint_radius);
  }
  return std::max(best, 1e-3);
}

void ObstacleSensor::sample(const World& world, const Vector3d& base_pose,
                            double footprint_radius, double t) {
  if (world.obstacles.empty()) {
    valid_ = false;
    return;
  }
  if (t + 1e-12 < next_sample_) return;
  next_sample_ += period_ * std::floor((t + 1e-12 - next_sample_) / period_ + 1.0);

  double best = std::numeric_limits<double>::infinity();
  Vector2d away = Vector2d::Zero();
  for (const auto& actor : world.obstacles) {
    const Vector2d offset = base_pose.head<2>() - actor.center;
    const double gap = offset.norm() - actor.radius - footprint_radius;
    if (gap < best) {
      best = gap;
      away = offset.norm() > 1e-12 ? Vector2d(offset.normalized()) : Vector2d::UnitX();
    }
  }
  valid_ = true;
  distance_ = std::max(best, 1e-3);
  away_ = away;
}

}  // namespace wbc
