#pragma once

#include <utility>

#include "wbc/types.hpp"

namespace wbc {

/// Second-order low-pass w^2/(s^2 + 2*zeta*w*s + w^2) applied to base commands.
struct FilterParams {
  double cutoff = 2.0 * 3.14159265358979323846;  ///< rad/s
  double damping = 1.0;
  double dt = 0.01;  ///< s
};

/// Per-axis filter memory: output value and its rate.
struct FilterState {
  Vector3d y = Vector3d::Zero();
  Vector3d ydot = Vector3d::Zero();
};

/// Advance the filter by one sample (exact zero-order-hold discretization of
/// the two-state realization); returns the new state and the filtered value.
std::pair<FilterState, Vector3d> lowpass_step(const FilterState& state,
                                              const Vector3d& input,
                                              const FilterParams& params);

/// Raised-cosine blend: 0 at/above `upper`, 1 at/below `lower`,
/// 0.5*(1 + cos(pi*(value-lower)/(upper-lower))) between.
double transition_alpha(double value, double upper, double lower);

/// Arm-side correction for a base command deviation, with the component along
/// the capability gradient optionally cancelled.
struct CompensationResult {
  Vector6d arm_correction = Vector6d::Zero();  ///< added to the arm command
  Vector6d ee_deviation = Vector6d::Zero();    ///< end-effector twist shortfall
  double alpha_used = 0.0;
};

/// Required correction is -R^T J_b dVb; the returned correction removes the
/// fraction `alpha` of its component along `cm_grad` (rank-1 projector), and
/// ee_deviation = correction - required. With comp_enabled off, alpha is
/// treated as 0 and the correction stays exact.
CompensationResult compensate(const Vector3d& delta_vb, const Matrix63d& j_b,
                              const Matrix6d& mount_rotation, const Vector6d& cm_grad,
                              double alpha, bool comp_enabled);

/// accumulator + deviation * dt.
Vector6d accumulate_deviation(const Vector6d& accumulator, const Vector6d& ee_deviation,
                              double dt);

}  // namespace wbc
