#include "wbc/coordination.hpp"

#include <cmath>
#include <complex>

namespace wbc {

namespace {

/// Exact discrete transition for the state [y, ydot] of
/// yddot = -w^2 y - 2 zeta w ydot + w^2 u with u held over the sample:
/// phi = exp(A dt), and the input column is the first column of (I - phi)
/// because A^-1 B = (-1, 0).
void zoh_coefficients(const FilterParams& p, Eigen::Matrix2d& phi, Eigen::Vector2d& gamma) {
  const double w = p.cutoff;
  const double z = p.damping;
  Eigen::Matrix2d a;
  a << 0, 1, -w * w, -2 * z * w;
  const std::complex<double> disc = std::sqrt(std::complex<double>(z * z - 1.0, 0.0));
  const std::complex<double> l1 = (-z + disc) * w;
  const std::complex<double> l2 = (-z - disc) * w;
  const double dt = p.dt;
  if (std::abs(l1 - l2) < 1e-9 * w) {
    // Repeated eigenvalue: exp(A t) = e^{lt}((1 - l t) I + t A).
    const double l = -z * w;
    const double e = std::exp(l * dt);
    phi = e * ((1.0 - l * dt) * Eigen::Matrix2d::Identity() + dt * a);
  } else {
    const std::complex<double> e1 = std::exp(l1 * dt);
    const std::complex<double> e2 = std::exp(l2 * dt);
    const std::complex<double> c0 = (l1 * e2 - l2 * e1) / (l1 - l2);
    const std::complex<double> c1 = (e1 - e2) / (l1 - l2);
    phi = c0.real() * Eigen::Matrix2d::Identity() + c1.real() * a;
  }
  gamma = (Eigen::Matrix2d::Identity() - phi).col(0);
}

}  // namespace

std::pair<FilterState, Vector3d> lowpass_step(const FilterState& state,
                                              const Vector3d& input,
                                              const FilterParams& params) {
  Eigen::Matrix2d phi;
  Eigen::Vector2d gamma;
  zoh_coefficients(params, phi, gamma);
  FilterState next;
  for (int axis = 0; axis < 3; ++axis) {
    const Eigen::Vector2d x(state.y[axis], state.ydot[axis]);
    const Eigen::Vector2d xn = phi * x + gamma * input[axis];
    next.y[axis] = xn[0];
    next.ydot[axis] = xn[1];
  }
  return {next, next.y};
}

double transition_alpha(double value, double upper, double lower) {
  if (value >= upper) return 0.0;
  if (value <= lower) return 1.0;
  constexpr double kPi = 3.14159265358979323846;
  return 0.5 * (1.0 + std::cos(kPi * (value - lower) / (upper - lower)));
}

CompensationResult compensate(const Vector3d& delta_vb, const Matrix63d& j_b,
                              const Matrix6d& mount_rotation, const Vector6d& cm_grad,
                              double alpha, bool comp_enabled) {
  CompensationResult out;
  out.alpha_used = comp_enabled ? alpha : 0.0;
  const Vector6d required = -mount_rotation.transpose() * (j_b * delta_vb);
  const double g2 = cm_grad.squaredNorm();
  Vector6d along = Vector6d::Zero();
  if (g2 >= 1e-18) {  // vanishing gradient: projector is zero
    along = cm_grad * (cm_grad.dot(required) / g2);
  }
  out.arm_correction = required - out.alpha_used * along;
  out.ee_deviation = -out.alpha_used * along;
  return out;
}

Vector6d accumulate_deviation(const Vector6d& accumulator, const Vector6d& ee_deviation,
                              double dt) {
  return accumulator + ee_deviation * dt;
}

}  // namespace wbc
