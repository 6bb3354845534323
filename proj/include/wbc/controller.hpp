#pragma once

#include <limits>
#include <utility>

#include "wbc/coordination.hpp"
#include "wbc/dmp.hpp"
#include "wbc/kinematics.hpp"
#include "wbc/redundancy.hpp"
#include "wbc/types.hpp"

namespace wbc {

/// How the motion split between arm and base is chosen each cycle.
enum class MotionMode {
  kLocomotion,       ///< base only (sigma = 0)
  kManipulation,     ///< arm only (sigma = 1)
  kLocoManipulation, ///< fixed split from the configured factors
  kIntuitivePhri,    ///< adaptive split from arm configuration and workspace
};

/// Cone-shaped preferred workspace around the arm mount: an extend band (m)
/// and a deflection-angle band (rad) with raised-cosine penalties.
struct LocalWorkspaceParams {
  double extend_lower = 0.75;
  double extend_upper = 0.80;
  double deflect_lower = 30.0 * 3.14159265358979323846 / 180.0;
  double deflect_upper = 35.0 * 3.14159265358979323846 / 180.0;
};

/// Gains of the hybrid stiffness/force behavior on the arm.
struct ForceGains {
  double k_p = 5e-4;  ///< stiffness offset per N
  double k_d = 0.0;   ///< force-rate gain
  double k_f = 0.01;  ///< force-tracking velocity per N
};

/// Everything the per-cycle pipeline needs to know.
struct ControllerConfig {
  MotionMode mode = MotionMode::kLocoManipulation;
  WeightingFactors factors{0.5, 0.5};
  CmOptimizationParams cm_params;
  FilterParams filter;
  bool filter_enabled = true;
  RepulsiveFieldParams field;
  LocalWorkspaceParams workspace;
  CdmpParams dmp;            ///< shared attractor constants (dims set per primitive)
  CdmpParams base_dmp;       ///< base-primitive attractor constants (defaults to dmp)
  double hri_gain = 0.05;    ///< drag admittance, m/s per N
  int hri_switch = 0;        ///< 1 while a person drags the end-effector
  int comp_switch = 1;       ///< 0 keeps compensation exact (no cancellation)
  Vector6d selection = Vector6d::Ones();  ///< per-axis 1 = stiffness, 0 = force control
  Vector6d desired_force = Vector6d::Zero();  ///< force setpoint, arm mount frame
  ForceGains force_gains;
  double dt = 0.01;
};

/// Per-cycle sensor snapshot handed to the controller.
struct SensorReadings {
  Vector6d external_force_world = Vector6d::Zero();  ///< reaction wrench on the ee
  double obstacle_distance = std::numeric_limits<double>::infinity();
  Vector2d obstacle_away_direction = Vector2d::Zero();  ///< world frame, unit
  bool obstacle_valid = false;
};

/// Reference for the cycle: a world-frame end-effector twist, and optionally
/// a new whole-body goal (x, y, z, yaw in world).
struct ReferenceInput {
  Vector6d ee_velocity_world = Vector6d::Zero();
  bool has_goal = false;
  Eigen::Vector4d goal = Eigen::Vector4d::Zero();
};

/// Workspace gating results.
struct WorkspaceFactors {
  double f_xy = 1.0;
  double f_phi = 1.0;
  double d = 0.0;    ///< extend: distance from arm mount to ee, m
  double phi = 0.0;  ///< deflection: |yaw-plane angle off the mount +x axis|, rad
  double p_d = 1.0;
  double p_phi = 1.0;
};

/// Mutable loop memory owned by one controller instance.
struct LoopContext {
  FilterState filter;
  CdmpState wb;    ///< 4-D: world x, y, z, yaw of the end-effector
  CdmpState base;  ///< 2-D: world x, y of the base
  CdmpState arm;   ///< 6-D twist-integral coordinates in the arm mount frame
  Vector6d error_integral_world = Vector6d::Zero();
  double prev_d = 0.0, prev_phi = 0.0;
  double d_rate = 0.0, phi_rate = 0.0;
  bool have_rates = false;
  bool initialized = false;
};

/// Commands plus telemetry for one cycle.
struct ControlOutputs {
  Vector6d arm_velocity_ref = Vector6d::Zero();   ///< arm mount frame
  Vector3d base_velocity_ref = Vector3d::Zero();  ///< base frame (filtered)
  CapabilityMetrics metrics;
  double sigma_xy = 0.0, sigma_phi = 0.0;
  Vector6d ee_deviation = Vector6d::Zero();       ///< this cycle's twist shortfall, mount frame

  // telemetry
  Vector6d arm_velocity_wln = Vector6d::Zero();   ///< arm part of the raw split
  Vector3d base_velocity_raw = Vector3d::Zero();  ///< base part of the raw split
  Vector3d base_velocity_corrected = Vector3d::Zero();  ///< after obstacle correction
  Vector6d ee_velocity_cmd_world = Vector6d::Zero();    ///< command-level ee twist
  Vector6d error_integral_world = Vector6d::Zero();
  double alpha = 0.0;
  WorkspaceFactors workspace;
  double d_rate = 0.0, phi_rate = 0.0;
  bool degraded = false;  ///< damped fallback was needed this cycle
};

/// Extend/deflection of the end-effector w.r.t. the arm mount, penalized
/// capabilities, and the resulting weighting-factor candidates.
WorkspaceFactors workspace_factors(const Vector6d& q_a, const Pose& ee_pose_in_base,
                                   const RobotModel& model, const ControllerConfig& config);

/// Weighting factors with the release rule: a factor snaps back to 1 when the
/// motion improves the penalized capability or the band variable retreats.
std::pair<double, double> deactivation_sigma(double f_xy, double f_phi,
                                             const Vector6d& grad_d,
                                             const Vector6d& grad_phi,
                                             const Vector6d& v_ee, double d_rate,
                                             double phi_rate);

/// One control cycle: whole-body primitive -> frame change -> weighting
/// adaptation -> weighted split -> base obstacle correction -> low-pass ->
/// arm compensation -> arm hybrid primitive -> deviation bookkeeping.
/// Throws SingularTask only if the damped fallback also fails.
ControlOutputs control_step(const WholeBodyState& state, const ReferenceInput& references,
                            const SensorReadings& sensors, const ControllerConfig& config,
                            const RobotModel& model, LoopContext& loop_ctx);

}  // namespace wbc
