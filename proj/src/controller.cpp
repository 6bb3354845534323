#include "wbc/controller.hpp"

#include <cmath>
#include <tuple>

namespace wbc {

namespace {

double sign_of(double v) { return v >= 0.0 ? 1.0 : -1.0; }

/// Extend and yaw-plane deflection of the end-effector w.r.t. the arm mount.
void mount_frame_extend(const Vector6d& q_a, const RobotModel& model, double& d,
                        double& phi, Vector3d& p_mount) {
  p_mount = forward_kinematics(q_a, model).position;
  d = p_mount.norm();
  phi = std::abs(std::atan2(p_mount.y(), p_mount.x()));
}

/// Cartesian gradients (mount frame) of the penalized capabilities
/// C_m*P_d*P_phi and C_m*P_phi, by product rule; the band-penalty derivatives
/// are taken numerically, the extend/deflection geometry analytically.
void penalized_gradients(const Vector3d& p_mount, const WorkspaceFactors& ws,
                         const CapabilityMetrics& metrics, const CmGradient& grad,
                         const ControllerConfig& config, Vector6d& grad_d,
                         Vector6d& grad_phi) {
  const LocalWorkspaceParams& w = config.workspace;
  const double h = 1e-6;
  const double dp_d = (transition_alpha(ws.d + h, w.extend_upper, w.extend_lower) -
                       transition_alpha(ws.d - h, w.extend_upper, w.extend_lower)) /
                      (2.0 * h);
  const double dp_phi = (transition_alpha(ws.phi + h, w.deflect_upper, w.deflect_lower) -
                         transition_alpha(ws.phi - h, w.deflect_upper, w.deflect_lower)) /
                        (2.0 * h);
  Vector6d dd = Vector6d::Zero();
  if (p_mount.norm() > 1e-9) dd.head<3>() = p_mount.normalized();
  Vector6d dphi = Vector6d::Zero();
  const double r2 = p_mount.x() * p_mount.x() + p_mount.y() * p_mount.y();
  if (r2 > 1e-12) {
    const double s = sign_of(std::atan2(p_mount.y(), p_mount.x()));
    dphi[0] = -s * p_mount.y() / r2;
    dphi[1] = s * p_mount.x() / r2;
  }
  grad_d = ws.p_d * ws.p_phi * grad.cartesian +
           metrics.capability * (ws.p_phi * dp_d * dd + ws.p_d * dp_phi * dphi);
  grad_phi = ws.p_phi * grad.cartesian + metrics.capability * dp_phi * dphi;
}

}  // namespace

WorkspaceFactors workspace_factors(const Vector6d& q_a, const Pose& /*ee_pose_in_base*/,
                                   const RobotModel& model, const ControllerConfig& config) {
  WorkspaceFactors out;
  Vector3d p_mount;
  mount_frame_extend(q_a, model, out.d, out.phi, p_mount);
  const LocalWorkspaceParams& w = config.workspace;
  // The transition function reads 1 below the band; invert so the penalty is
  // 1 inside the workspace and 0 beyond it.
  out.p_d = transition_alpha(out.d, w.extend_upper, w.extend_lower);
  out.p_phi = transition_alpha(out.phi, w.deflect_upper, w.deflect_lower);
  const CapabilityMetrics metrics = movement_capability(q_a, model, config.cm_params);
  const double cm_d = metrics.capability * out.p_d * out.p_phi;
  const double cm_phi = metrics.capability * out.p_phi;
  out.f_xy = 1.0 - transition_alpha(cm_d, config.cm_params.cm_upper, config.cm_params.cm_lower);
  out.f_phi =
      1.0 - transition_alpha(cm_phi, config.cm_params.cm_upper, config.cm_params.cm_lower);
  return out;
}

std::pair<double, double> deactivation_sigma(double f_xy, double f_phi,
                                             const Vector6d& grad_d,
                                             const Vector6d& grad_phi,
                                             const Vector6d& v_ee, double d_rate,
                                             double phi_rate) {
  const double sxy = (grad_d.dot(v_ee) > 0.0 || d_rate < 0.0) ? 1.0 : f_xy;
  const double sphi = (grad_phi.dot(v_ee) > 0.0 || phi_rate < 0.0) ? 1.0 : f_phi;
  return {sxy, sphi};
}

ControlOutputs control_step(const WholeBodyState& state, const ReferenceInput& references,
                            const SensorReadings& sensors, const ControllerConfig& config,
                            const RobotModel& model, LoopContext& ctx) {
  ControlOutputs out;
  const double dt = config.dt;

  // Geometry for this cycle.
  const Pose ee_b = ee_in_base(state.arm_joints, model);
  const Matrix3d b_r_w = world_to_base_rotation(state.base_pose[2]);
  const Matrix3d w_r_b = b_r_w.transpose();
  const Vector3d ee_pos_w =
      Vector3d(state.base_pose[0], state.base_pose[1], 0.0) + w_r_b * ee_b.position;
  const Matrix3d ee_rot_w = w_r_b * ee_b.orientation;
  const double ee_yaw_w = std::atan2(ee_rot_w(1, 0), ee_rot_w(0, 0));

  if (!ctx.initialized) {
    Eigen::Vector4d wb0;
    wb0 << ee_pos_w, ee_yaw_w;
    ctx.wb = CdmpState::at_goal(wb0);
    ctx.base = CdmpState::at_goal(state.base_pose.head<2>());
    Vector6d arm0 = Vector6d::Zero();
    arm0.head<3>() = forward_kinematics(state.arm_joints, model).position;
    ctx.arm = CdmpState::at_goal(arm0);
    ctx.initialized = true;
  }

  // (1) Whole-body primitive in world coordinates (x, y, z, yaw).
  CdmpParams wb_params = config.dmp;
  wb_params.dims = 4;
  if (references.has_goal) ctx.wb.g = references.goal;
  CouplingInputs wb_in;
  wb_in.velocity_cmd = VectorXd(4);
  wb_in.velocity_cmd << references.ee_velocity_world.head<3>(), references.ee_velocity_world[5];
  wb_in.external_force = VectorXd(4);
  wb_in.external_force << sensors.external_force_world.head<3>(), sensors.external_force_world[5];
  wb_in.admittance_gain = VectorXd::Constant(4, config.hri_gain);
  wb_in.hri_switch = config.hri_switch;
  VectorXd err4(4);
  err4 << ctx.error_integral_world.head<3>(), ctx.error_integral_world[5];
  const CdmpState wb_next = wholebody_cdmp_step(ctx.wb, wb_in, err4, wb_params, dt);
  Vector6d v_ee_w;
  v_ee_w.head<3>() = (wb_next.y.head(3) - ctx.wb.y.head(3)) / dt;
  v_ee_w[3] = references.ee_velocity_world[3];  // roll/pitch rates bypass the primitive
  v_ee_w[4] = references.ee_velocity_world[4];
  v_ee_w[5] = (wb_next.y[3] - ctx.wb.y[3]) / dt;
  ctx.wb = wb_next;

  // (2) Reference twist into the base frame.
  const Vector6d v_ee_b = twist_rotation(b_r_w) * v_ee_w;

  // (3) Weighting factors, adaptive in the pHRI mode.
  const CapabilityMetrics metrics = movement_capability(state.arm_joints, model, config.cm_params);
  const CmGradient grad = cm_gradient(state.arm_joints, model, config.cm_params);
  out.metrics = metrics;
  double sigma_xy = 0.0, sigma_phi = 0.0;
  switch (config.mode) {
    case MotionMode::kLocomotion:
      sigma_xy = 0.0;
      sigma_phi = 0.0;
      break;
    case MotionMode::kManipulation:
      sigma_xy = 1.0;
      sigma_phi = 1.0;
      break;
    case MotionMode::kLocoManipulation:
      sigma_xy = config.factors.sigma_xy;
      sigma_phi = config.factors.sigma_phi;
      break;
    case MotionMode::kIntuitivePhri: {
      const WorkspaceFactors ws = workspace_factors(state.arm_joints, ee_b, model, config);
      out.workspace = ws;
      if (!ctx.have_rates) {
        ctx.prev_d = ws.d;
        ctx.prev_phi = ws.phi;
        ctx.d_rate = 0.0;
        ctx.phi_rate = 0.0;
        ctx.have_rates = true;
      } else {
        const double blend = std::min(1.0, 30.0 * dt);
        ctx.d_rate += blend * ((ws.d - ctx.prev_d) / dt - ctx.d_rate);
        ctx.phi_rate += blend * ((ws.phi - ctx.prev_phi) / dt - ctx.phi_rate);
        ctx.prev_d = ws.d;
        ctx.prev_phi = ws.phi;
      }
      Vector3d p_mount;
      double d_unused, phi_unused;
      mount_frame_extend(state.arm_joints, model, d_unused, phi_unused, p_mount);
      Vector6d grad_d, grad_phi;
      penalized_gradients(p_mount, ws, metrics, grad, config, grad_d, grad_phi);
      const Vector6d v_ee_a =
          twist_rotation(model.arm_mount_rotation).transpose() * v_ee_b;
      std::tie(sigma_xy, sigma_phi) = deactivation_sigma(
          ws.f_xy, ws.f_phi, grad_d, grad_phi, v_ee_a, ctx.d_rate, ctx.phi_rate);
      out.d_rate = ctx.d_rate;
      out.phi_rate = ctx.phi_rate;
      break;
    }
  }
  out.sigma_xy = sigma_xy;
  out.sigma_phi = sigma_phi;

  // (4) Weighted least-norm split with capability upkeep in the null space.
  const Matrix9d q_weight = weighting_matrix({sigma_xy, sigma_phi});
  Vector9d null_velocity = Vector9d::Zero();
  if (metrics.capability < config.cm_params.cm_upper && !grad.degenerate) {
    null_velocity.head<6>() = config.cm_params.null_gain * grad.cartesian;
  }
  WholeBodyState state_now = state;
  state_now.ee_pose_in_base = ee_b;
  const Matrix69d j_wb = whole_body_jacobian(state_now, model);
  Vector9d v_wb;
  try {
    v_wb = resolve_wln(v_ee_b, j_wb, q_weight, null_velocity);
  } catch (const SingularTask&) {
    v_wb = resolve_wln_damped(v_ee_b, j_wb, q_weight, null_velocity);
    out.degraded = true;
    if (!v_wb.allFinite()) {
      throw SingularTask("weighted split unsolvable even with damping");
    }
  }
  const Vector6d v_a = v_wb.head<6>();
  const Vector3d v_b = v_wb.tail<3>();
  out.arm_velocity_wln = v_a;
  out.base_velocity_raw = v_b;

  // (5) Base primitive adds the obstacle-avoidance acceleration (world x-y).
  CdmpParams base_params = config.base_dmp;
  base_params.dims = 2;
  CouplingInputs base_in;
  base_in.velocity_cmd = w_r_b.topLeftCorner<2, 2>() * v_b.head<2>();
  if (sensors.obstacle_valid) {
    base_in.avoid_force = repulsive_force_from_measurement(
        sensors.obstacle_distance, sensors.obstacle_away_direction, config.field);
  } else {
    base_in.avoid_force = Vector2d::Zero();
  }
  const CdmpState base_next = base_cdmp_step(ctx.base, base_in, base_params, dt);
  const Vector2d vb_corr_w = (base_next.y - ctx.base.y) / dt;
  ctx.base = base_next;
  Vector3d v_b_prime;
  v_b_prime.head<2>() = b_r_w.topLeftCorner<2, 2>() * vb_corr_w;
  v_b_prime[2] = v_b[2];
  out.base_velocity_corrected = v_b_prime;

  // (6) Low-pass the base command.
  Vector3d v_b_ref;
  if (config.filter_enabled) {
    auto [next_filter, filtered] = lowpass_step(ctx.filter, v_b_prime, config.filter);
    ctx.filter = next_filter;
    v_b_ref = filtered;
  } else {
    v_b_ref = v_b_prime;
  }
  out.base_velocity_ref = v_b_ref;

  // (7) Arm-side compensation of the base deviation, with cancellation along
  // the capability gradient inside the band.
  out.alpha = transition_alpha(metrics.capability, config.cm_params.cm_upper,
                               config.cm_params.cm_lower);
  const Vector3d delta_vb = v_b_ref - v_b;
  const CompensationResult comp =
      compensate(delta_vb, base_jacobian(ee_b.position),
                 twist_rotation(model.arm_mount_rotation),
                 grad.degenerate ? Vector6d::Zero() : grad.cartesian, out.alpha,
                 config.comp_switch != 0);
  out.ee_deviation = comp.ee_deviation;

  // (8) Arm hybrid primitive: compensated split plus stiffness/force coupling.
  CdmpParams arm_params = config.dmp;
  arm_params.dims = 6;
  const Matrix6d world_to_mount =
      twist_rotation(model.arm_mount_rotation).transpose() * twist_rotation(b_r_w);
  CouplingInputs arm_in;
  arm_in.velocity_cmd = v_a + comp.arm_correction;
  arm_in.external_force = world_to_mount * sensors.external_force_world;
  arm_in.desired_force = config.desired_force;
  arm_in.selection = config.selection;
  arm_in.stiffness_gain = config.force_gains.k_p;
  arm_in.stiffness_rate_gain = config.force_gains.k_d;
  arm_in.force_gain = config.force_gains.k_f;
  arm_in.hri_switch = config.hri_switch;
  const CdmpState arm_next = arm_cdmp_step(ctx.arm, arm_in, arm_params, dt);
  out.arm_velocity_ref = (arm_next.y - ctx.arm.y) / dt;
  ctx.arm = arm_next;

  // (9) Accumulate the end-effector deviation in world coordinates; the
  // whole-body primitive reads it next cycle.
  const Matrix6d mount_to_world =
      twist_rotation(w_r_b) * twist_rotation(model.arm_mount_rotation);
  ctx.error_integral_world = accumulate_deviation(
      ctx.error_integral_world, mount_to_world * comp.ee_deviation, dt);
  out.error_integral_world = ctx.error_integral_world;

  // Command-level end-effector twist for the log.
  Vector9d cmd;
  cmd << out.arm_velocity_ref, v_b_ref;
  out.ee_velocity_cmd_world = twist_rotation(w_r_b) * (j_wb * cmd);
  return out;
}

}  // namespace wbc
