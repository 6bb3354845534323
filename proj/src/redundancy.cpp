#include "wbc/redundancy.hpp"

#include <cmath>

namespace wbc {

Matrix9d weighting_matrix(const WeightingFactors& factors) {
  Vector9d d;
  d << factors.sigma_xy, factors.sigma_xy, 1, 1, 1, factors.sigma_phi,
      1 - factors.sigma_xy, 1 - factors.sigma_xy, 1 - factors.sigma_phi;
  return d.asDiagonal();
}

CapabilityMetrics movement_capability(const Vector6d& q_a, const RobotModel& model,
                                      const CmOptimizationParams& params) {
  CapabilityMetrics out;
  const Matrix6d j = arm_jacobian(q_a, model);
  // sqrt(det(J J^T)) = |det J| for a square Jacobian.
  out.manipulability = std::abs(j.determinant());
  double product = 1.0;
  for (int i = 0; i < 6; ++i) {
    const double lo = model.joint_lower[i];
    const double hi = model.joint_upper[i];
    const double half = 0.5 * (hi - lo);
    const double factor = (q_a[i] - lo) * (hi - q_a[i]) / (half * half);
    product *= std::max(factor, 0.0);
  }
  out.joint_limit_penalty = 1.0 - std::exp(-params.jl_scale * product);
  out.capability = out.manipulability * out.joint_limit_penalty;
  return out;
}

CmGradient cm_gradient(const Vector6d& q_a, const RobotModel& model,
                       const CmOptimizationParams& params) {
  CmGradient out;
  const double h = params.grad_step;
  for (int i = 0; i < 6; ++i) {
    Vector6d plus = q_a, minus = q_a;
    plus[i] += h;
    minus[i] -= h;
    out.joint[i] = (movement_capability(plus, model, params).capability -
                    movement_capability(minus, model, params).capability) /
                   (2.0 * h);
  }
  // Map grad_q = J^T grad_x to Cartesian coordinates; damp near singularity:
  // grad_x = J (J^T J + lambda^2 I)^-1 grad_q.
  const Matrix6d j = arm_jacobian(q_a, model);
  const Eigen::JacobiSVD<Matrix6d> svd(j);
  const double smallest = svd.singularValues()[5];
  const double lambda = smallest < 1e-2 ? 1e-3 : 0.0;
  const Matrix6d normal = j.transpose() * j + lambda * lambda * Matrix6d::Identity();
  out.cartesian = j * normal.ldlt().solve(out.joint);
  out.degenerate = out.cartesian.norm() < 1e-9;
  return out;
}

namespace {

Vector9d solve_wln(const Vector6d& v_ee, const Matrix69d& j_wb, const Matrix9d& q_weight,
                   const Vector9d& null_velocity, double lambda, bool check_condition) {
  const Eigen::Matrix<double, 9, 6> qjt = q_weight * j_wb.transpose();
  Matrix6d m = j_wb * qjt;
  if (check_condition) {
    const Eigen::SelfAdjointEigenSolver<Matrix6d> eig(m);
    const double lo = std::abs(eig.eigenvalues()[0]);
    const double hi = std::abs(eig.eigenvalues()[5]);
    if (!(lo > 0.0) || hi / lo > 1e8) {
      throw SingularTask("weighted task system condition number exceeds 1e8");
    }
  }
  m.diagonal().array() += lambda;
  const Eigen::LDLT<Matrix6d> fact(m);
  // V = J# v + (I - J# J) n with J# = Q J^T M^-1, applied without forming J#.
  const Vector9d particular = qjt * fact.solve(v_ee);
  const Vector9d null_part = null_velocity - qjt * fact.solve(j_wb * null_velocity);
  return particular + null_part;
}

}  // namespace

Vector9d resolve_wln(const Vector6d& v_ee, const Matrix69d& j_wb,
                     const Matrix9d& q_weight, const Vector9d& null_velocity) {
  return solve_wln(v_ee, j_wb, q_weight, null_velocity, 0.0, true);
}

Vector9d resolve_wln_damped(const Vector6d& v_ee, const Matrix69d& j_wb,
                            const Matrix9d& q_weight, const Vector9d& null_velocity,
                            double lambda) {
  return solve_wln(v_ee, j_wb, q_weight, null_velocity, lambda, false);
}

}  // namespace wbc
