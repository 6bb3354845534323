#pragma once

#include <vector>

#include "wbc/types.hpp"

namespace wbc {

/// Time/gain constants of a goal-attractor primitive.
struct CdmpParams {
  double tau = 1.0;      ///< temporal scale, s
  double alpha_z = 25.0;
  double beta_z = 6.25;  ///< alpha_z/4: critically damped attractor
  double alpha_s = 4.0;  ///< phase decay
  int dims = 1;
};

/// Evolving state of one primitive. `coupling_integral` accumulates the
/// velocity-interface input so the goal attractor follows it; `error_integral`
/// mirrors the tracking-error integral used by the whole-body variant.
/// prev_force_term / force_term_rate hold the backward-difference memory for
/// force-derivative coupling terms.
struct CdmpState {
  VectorXd y;
  VectorXd z;
  VectorXd g;
  VectorXd coupling_integral;
  VectorXd error_integral;
  double s = 1.0;
  VectorXd prev_force_term;
  VectorXd force_term_rate;

  /// A primitive resting at `goal`: the velocity interface then passes its
  /// input through to ydot exactly.
  static CdmpState at_goal(const VectorXd& goal);
};

/// Inputs shared by the coupled step variants; leave fields empty (size 0)
/// when a variant does not use them, they read as zeros.
struct CouplingInputs {
  VectorXd velocity_cmd;     ///< velocity-interface input
  VectorXd external_force;   ///< measured force
  VectorXd desired_force;    ///< force setpoint
  VectorXd admittance_gain;  ///< diagonal gain on force error, per axis
  double stiffness_gain = 0.0;       ///< position offset per unit force
  double stiffness_rate_gain = 0.0;  ///< gain on the force rate
  double force_gain = 0.0;           ///< velocity per unit force error
  VectorXd selection;        ///< per-axis 1 = stiffness behavior, 0 = force control
  int hri_switch = 0;        ///< 1 disables the force-control term
  VectorXd avoid_force;      ///< repulsive field value, acceleration level
};

/// Radial-basis forcing term; evaluates to zero when empty. The s factor in
/// the evaluation drives it to zero as the phase decays.
struct ForcingTerm {
  VectorXd basis_centers;
  VectorXd basis_widths;
  MatrixXd weights;  ///< basis_count x dims

  VectorXd evaluate(double s, int dims) const;
};

/// Inverse-square repulsive field parameters.
struct RepulsiveFieldParams {
  double gain = 0.01;
  double threshold = 0.5;  ///< m, field support radius
};

/// Disc obstacle in the plane.
struct DiscObstacle {
  Vector2d center = Vector2d::Zero();
  double radius = 0.0;
};

/// One forward-Euler step of the phase: s' = s - dt*alpha_s*s/tau, kept positive.
double canonical_step(double s, const CdmpParams& params, double dt);

/// Plain goal-attractor step (semi-implicit Euler: z first, then y).
CdmpState dmp_step(const CdmpState& state, const ForcingTerm& forcing,
                   const CdmpParams& params, double dt);

/// Batch least-squares fit of RBF weights so the primitive reproduces a
/// uniformly sampled demonstration. Throws InsufficientData below 3 samples.
ForcingTerm learn_forcing_term(const std::vector<VectorXd>& demo_positions,
                               const CdmpParams& params, int basis_count, double dt);

/// Spring-like force coupling: the force offset enters ydot directly and its
/// (smoothed backward-difference) rate enters zdot.
CdmpState stiffness_coupled_step(const CdmpState& state, const CouplingInputs& inputs,
                                 const CdmpParams& params, double dt);

/// Velocity-resolved force coupling: force error drives both ydot and the
/// goal-offset integral, so steady-state velocity equals gain * force error.
CdmpState admittance_coupled_step(const CdmpState& state, const CouplingInputs& inputs,
                                  const CdmpParams& params, double dt);

/// Whole-body variant: velocity interface plus drag-force admittance, with the
/// accumulated tracking error shifting the attractor so the executed
/// end-effector point converges to the commanded one.
CdmpState wholebody_cdmp_step(const CdmpState& state, const CouplingInputs& inputs,
                              const VectorXd& error_integral, const CdmpParams& params,
                              double dt);

/// Base variant: velocity interface plus the repulsive field at acceleration level.
CdmpState base_cdmp_step(const CdmpState& state, const CouplingInputs& inputs,
                         const CdmpParams& params, double dt);

/// Arm variant: velocity interface plus per-axis hybrid behavior — stiffness
/// offsets on selected axes, a force-tracking velocity term on the rest
/// (disabled while the drag switch is on).
CdmpState arm_cdmp_step(const CdmpState& state, const CouplingInputs& inputs,
                        const CdmpParams& params, double dt);

/// Generic acceleration-level coupling injected into zdot.
CdmpState obstacle_coupled_step(const CdmpState& state, const VectorXd& coupling_accel,
                                const ForcingTerm& forcing, const CdmpParams& params,
                                double dt);

/// Negative gradient of the inverse-square potential
/// U = 0.5*gain*(1/d - 1/threshold)^2 over the support d <= threshold,
/// evaluated for the nearest disc obstacle; d is surface-to-surface distance
/// floored at 1e-3 m.
Vector2d repulsive_force(const Vector2d& base_xy, const std::vector<DiscObstacle>& obstacles,
                         const RepulsiveFieldParams& field, double footprint_radius);

/// Field magnitude-and-direction form for a pre-measured distance/direction
/// pair (how the controller consumes the sampled sensor value).
Vector2d repulsive_force_from_measurement(double distance, const Vector2d& away_direction,
                                          const RepulsiveFieldParams& field);

}  // namespace wbc
