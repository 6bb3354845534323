#pragma once

#include "wbc/kinematics.hpp"
#include "wbc/types.hpp"

namespace wbc {

/// Motion split between arm and base: 1 = arm only, 0 = base only.
struct WeightingFactors {
  double sigma_xy = 0.5;   ///< x-y translation share, in [0,1]
  double sigma_phi = 0.5;  ///< yaw share, in [0,1]
};

/// Configuration quality of the arm.
struct CapabilityMetrics {
  double manipulability = 0.0;      ///< product of Jacobian singular values
  double joint_limit_penalty = 0.0; ///< in [0,1), 0 at any limit
  double capability = 0.0;          ///< manipulability * joint_limit_penalty
};

/// Gains and thresholds for capability upkeep in the null space.
struct CmOptimizationParams {
  double null_gain = 0.1;   ///< ascent gain, active only below cm_upper
  double cm_upper = 0.04;   ///< capability band upper edge
  double cm_lower = 0.035;  ///< capability band lower edge
  double jl_scale = 50.0;   ///< sharpness of the joint-limit penalty
  double grad_step = 1e-5;  ///< finite-difference step, rad
};

/// Capability gradient in joint space and mapped to Cartesian coordinates of
/// the arm. `degenerate` marks a vanishing Cartesian gradient; callers must
/// then treat any projector built from it as zero.
struct CmGradient {
  Vector6d cartesian = Vector6d::Zero();
  Vector6d joint = Vector6d::Zero();
  bool degenerate = true;
};

/// Diagonal motion-distribution matrix
/// diag(s_xy, s_xy, 1, 1, 1, s_phi, 1-s_xy, 1-s_xy, 1-s_phi).
Matrix9d weighting_matrix(const WeightingFactors& factors);

/// Manipulability times the joint-limit penalty. Each joint contributes the
/// factor (q-q_l)(q_u-q) normalized to peak 1 at mid-range; factors are clamped
/// at 0 so any joint at or past a limit zeroes the product.
CapabilityMetrics movement_capability(const Vector6d& q_a, const RobotModel& model,
                                      const CmOptimizationParams& params);

/// Central-difference capability gradient, mapped through a damped
/// inverse-transpose of the arm Jacobian (damping 1e-3 near singularity).
CmGradient cm_gradient(const Vector6d& q_a, const RobotModel& model,
                       const CmOptimizationParams& params);

/// Weighted least-norm resolution with a null-space term:
/// V = J# v + (I - J# J) n, J# = Q J^T (J Q J^T)^-1.
/// Throws SingularTask when cond(J Q J^T) exceeds 1e8.
Vector9d resolve_wln(const Vector6d& v_ee, const Matrix69d& j_wb,
                     const Matrix9d& q_weight, const Vector9d& null_velocity);

/// Fallback resolution with lambda added to the diagonal of the 6x6 system.
Vector9d resolve_wln_damped(const Vector6d& v_ee, const Matrix69d& j_wb,
                            const Matrix9d& q_weight, const Vector9d& null_velocity,
                            double lambda = 1e-3);

}  // namespace wbc
