#include "wbc/dmp.hpp"

#include <cmath>
#include <limits>

namespace wbc {

namespace {

VectorXd or_zero(const VectorXd& v, Eigen::Index n) {
  return v.size() == n ? v : VectorXd::Zero(n);
}

/// Smoothed backward difference of a coupling term; memory lives in the state.
/// First call seeds the history so no startup spike is produced.
VectorXd update_rate(CdmpState& state, const VectorXd& term, double dt) {
  const Eigen::Index n = term.size();
  if (state.prev_force_term.size() != n) {
    state.prev_force_term = term;
    state.force_term_rate = VectorXd::Zero(n);
    return state.force_term_rate;
  }
  const VectorXd raw = (term - state.prev_force_term) / dt;
  const double blend = std::min(1.0, 30.0 * dt);  // first-order smoothing, 30 rad/s
  state.force_term_rate += blend * (raw - state.force_term_rate);
  state.prev_force_term = term;
  return state.force_term_rate;
}

/// Shared integrator: z with the attractor pulled toward g + C (+ shift),
/// then y fed by the new z, the direct ydot terms, and the interface velocity,
/// then the interface integral and phase.
///   z' = z + dt/tau * (alpha_z*(beta_z*(g + C - y - shift) - z) + extra_z)
///   y' = y + dt/tau * (z' + extra_y) + dt * c_dot
///   C' = C + dt * c_dot
CdmpState integrate(const CdmpState& state, const CdmpParams& params, double dt,
                    const VectorXd& extra_z, const VectorXd& extra_y,
                    const VectorXd& c_dot, const VectorXd& shift) {
  CdmpState next = state;
  const Eigen::Index n = state.y.size();
  const VectorXd c = or_zero(state.coupling_integral, n);
  const VectorXd attractor_err = state.g + c - state.y - or_zero(shift, n);
  next.z = state.z +
           dt / params.tau *
               (params.alpha_z * (params.beta_z * attractor_err - state.z) + extra_z);
  next.y = state.y + dt / params.tau * (next.z + extra_y) + dt * c_dot;
  next.coupling_integral = c + dt * c_dot;
  next.s = canonical_step(state.s, params, dt);
  return next;
}

}  // namespace

CdmpState CdmpState::at_goal(const VectorXd& goal) {
  CdmpState st;
  st.y = goal;
  st.g = goal;
  st.z = VectorXd::Zero(goal.size());
  st.coupling_integral = VectorXd::Zero(goal.size());
  st.error_integral = VectorXd::Zero(goal.size());
  return st;
}

VectorXd ForcingTerm::evaluate(double s, int dims) const {
  if (weights.size() == 0) return VectorXd::Zero(dims);
  const Eigen::Index m = basis_centers.size();
  double norm = 0.0;
  VectorXd psi(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double d = s - basis_centers[i];
    psi[i] = std::exp(-basis_widths[i] * d * d);
    norm += psi[i];
  }
  if (norm < 1e-12) return VectorXd::Zero(dims);
  return (weights.transpose() * psi) * (s / norm);
}

double canonical_step(double s, const CdmpParams& params, double dt) {
  const double next = s - dt * params.alpha_s * s / params.tau;
  return std::max(next, 1e-12);
}

CdmpState dmp_step(const CdmpState& state, const ForcingTerm& forcing,
                   const CdmpParams& params, double dt) {
  const Eigen::Index n = state.y.size();
  const VectorXd f = forcing.evaluate(state.s, static_cast<int>(n));
  return integrate(state, params, dt, f, VectorXd::Zero(n), VectorXd::Zero(n),
                   VectorXd::Zero(n));
}

CdmpState stiffness_coupled_step(const CdmpState& state, const CouplingInputs& inputs,
                                 const CdmpParams& params, double dt) {
  const Eigen::Index n = state.y.size();
  CdmpState work = state;
  const VectorXd coupling = inputs.stiffness_gain * or_zero(inputs.external_force, n);
  const VectorXd rate = update_rate(work, coupling, dt);
  // Keep the goal attractor free of the force offset: it enters ydot only,
  // its rate enters zdot.
  const VectorXd extra_z = inputs.stiffness_rate_gain * rate;
  const VectorXd extra_y = params.tau * coupling;
  return integrate(work, params, dt, extra_z, extra_y, VectorXd::Zero(n),
                   VectorXd::Zero(n));
}

CdmpState admittance_coupled_step(const CdmpState& state, const CouplingInputs& inputs,
                                  const CdmpParams& params, double dt) {
  const Eigen::Index n = state.y.size();
  const VectorXd gain = or_zero(inputs.admittance_gain, n);
  const VectorXd c_dot = gain.cwiseProduct(or_zero(inputs.external_force, n) -
                                           or_zero(inputs.desired_force, n));
  return integrate(state, params, dt, VectorXd::Zero(n), VectorXd::Zero(n), c_dot,
                   VectorXd::Zero(n));
}

CdmpState wholebody_cdmp_step(const CdmpState& state, const CouplingInputs& inputs,
                              const VectorXd& error_integral, const CdmpParams& params,
                              double dt) {
  const Eigen::Index n = state.y.size();
  const VectorXd gain = or_zero(inputs.admittance_gain, n);
  const VectorXd c_dot =
      or_zero(inputs.velocity_cmd, n) +
      static_cast<double>(inputs.hri_switch) *
          gain.cwiseProduct(or_zero(inputs.external_force, n));
  CdmpState next = integrate(state, params, dt, VectorXd::Zero(n), VectorXd::Zero(n),
                             c_dot, error_integral);
  next.error_integral = or_zero(error_integral, n);
  return next;
}

CdmpState base_cdmp_step(const CdmpState& state, const CouplingInputs& inputs,
                         const CdmpParams& params, double dt) {
  const Eigen::Index n = state.y.size();
  return integrate(state, params, dt, or_zero(inputs.avoid_force, n), VectorXd::Zero(n),
                   or_zero(inputs.velocity_cmd, n), VectorXd::Zero(n));
}

CdmpState arm_cdmp_step(const CdmpState& state, const CouplingInputs& inputs,
                        const CdmpParams& params, double dt) {
  const Eigen::Index n = state.y.size();
  CdmpState work = state;
  const VectorXd sel = or_zero(inputs.selection, n);
  const VectorXd f_ext = or_zero(inputs.external_force, n);
  const VectorXd f_des = or_zero(inputs.desired_force, n);
  const VectorXd stiff = inputs.stiffness_gain * sel.cwiseProduct(f_ext);
  const VectorXd rate = update_rate(work, stiff, dt);
  // Force tracking on the non-selected axes: measured minus desired, so a
  // reaction force from a stiff surface closes a stable loop. Disabled while
  // the drag switch is on.
  const double force_on = inputs.hri_switch == 1 ? 0.0 : 1.0;
  const VectorXd c_dot =
      or_zero(inputs.velocity_cmd, n) +
      force_on * inputs.force_gain *
          (VectorXd::Ones(n) - sel).cwiseProduct(f_ext - f_des);
  const VectorXd extra_z = inputs.stiffness_rate_gain * rate;
  // The stiffness offset enters ydot unscaled (no tau factor).
  return integrate(work, params, dt, extra_z, stiff, c_dot, VectorXd::Zero(n));
}

CdmpState obstacle_coupled_step(const CdmpState& state, const VectorXd& coupling_accel,
                                const ForcingTerm& forcing, const CdmpParams& params,
                                double dt) {
  const Eigen::Index n = state.y.size();
  const VectorXd f = forcing.evaluate(state.s, static_cast<int>(n));
  return integrate(state, params, dt, f + or_zero(coupling_accel, n), VectorXd::Zero(n),
                   VectorXd::Zero(n), VectorXd::Zero(n));
}

ForcingTerm learn_forcing_term(const std::vector<VectorXd>& demo_positions,
                               const CdmpParams& params, int basis_count, double dt) {
  const size_t count = demo_positions.size();
  if (count < 3) throw InsufficientData("forcing-term fit needs at least 3 samples");
  const Eigen::Index dims = demo_positions.front().size();
  const Eigen::Index rows = static_cast<Eigen::Index>(count);

  // Differentiate the demonstration and back out the forcing signal that the
  // attractor equation requires to reproduce it.
  MatrixXd y(rows, dims), yd(rows, dims), ydd(rows, dims);
  for (Eigen::Index t = 0; t < rows; ++t) y.row(t) = demo_positions[static_cast<size_t>(t)];
  for (Eigen::Index t = 0; t < rows; ++t) {
    const Eigen::Index a = std::max<Eigen::Index>(t - 1, 0);
    const Eigen::Index b = std::min<Eigen::Index>(t + 1, rows - 1);
    yd.row(t) = (y.row(b) - y.row(a)) / (static_cast<double>(b - a) * dt);
  }
  for (Eigen::Index t = 0; t < rows; ++t) {
    const Eigen::Index a = std::max<Eigen::Index>(t - 1, 0);
    const Eigen::Index b = std::min<Eigen::Index>(t + 1, rows - 1);
    ydd.row(t) = (yd.row(b) - yd.row(a)) / (static_cast<double>(b - a) * dt);
  }
  const VectorXd goal = y.row(rows - 1);

  ForcingTerm term;
  term.basis_centers.resize(basis_count);
  term.basis_widths.resize(basis_count);
  // Centers follow the phase values at equally spaced times over the demo.
  VectorXd phase(rows);
  double s = 1.0;
  for (Eigen::Index t = 0; t < rows; ++t) {
    phase[t] = s;
    s = canonical_step(s, params, dt);
  }
  for (int i = 0; i < basis_count; ++i) {
    const double frac = basis_count == 1 ? 0.0
                                         : static_cast<double>(i) /
                                               static_cast<double>(basis_count - 1);
    const Eigen::Index idx = static_cast<Eigen::Index>(frac * static_cast<double>(rows - 1));
    term.basis_centers[i] = phase[idx];
  }
  for (int i = 0; i < basis_count; ++i) {
    const double gap = i + 1 < basis_count
                           ? std::abs(term.basis_centers[i + 1] - term.basis_centers[i])
                           : std::abs(term.basis_centers[i] -
                                      term.basis_centers[std::max(i - 1, 0)]);
    term.basis_widths[i] = 1.0 / std::max(2.0 * gap * gap, 1e-8);
  }

  // Weighted linear least squares: f_target = s * psi w / sum(psi).
  MatrixXd design(rows, basis_count);
  MatrixXd target(rows, dims);
  for (Eigen::Index t = 0; t < rows; ++t) {
    double norm = 0.0;
    for (int i = 0; i < basis_count; ++i) {
      const double d = phase[t] - term.basis_centers[i];
      design(t, i) = std::exp(-term.basis_widths[i] * d * d);
      norm += design(t, i);
    }
    design.row(t) *= phase[t] / std::max(norm, 1e-12);
    target.row(t) = params.tau * params.tau * ydd.row(t) -
                    params.alpha_z * (params.beta_z * (goal.transpose() - y.row(t)) -
                                      params.tau * yd.row(t));
  }
  term.weights = design.colPivHouseholderQr().solve(target);
  return term;
}

Vector2d repulsive_force_from_measurement(double distance, const Vector2d& away_direction,
                                          const RepulsiveFieldParams& field) {
  const double d = std::max(distance, 1e-3);
  if (d > field.threshold || field.gain <= 0.0) return Vector2d::Zero();
  const double magnitude = field.gain * (1.0 / d - 1.0 / field.threshold) / (d * d);
  return magnitude * away_direction;
}

Vector2d repulsive_force(const Vector2d& base_xy, const std::vector<DiscObstacle>& obstacles,
                         const RepulsiveFieldParams& field, double footprint_radius) {
  double best = std::numeric_limits<double>::infinity();
  Vector2d away = Vector2d::Zero();
  for (const DiscObstacle& obs : obstacles) {
    const Vector2d delta = base_xy - obs.center;
    const double d = delta.norm() - obs.radius - footprint_radius;
    if (d < best) {
      best = d;
      away = delta.norm() > 1e-12 ? Vector2d(delta / delta.norm()) : Vector2d(1, 0);
    }
  }
  if (!std::isfinite(best)) return Vector2d::Zero();
  return repulsive_force_from_measurement(best, away, field);
}

}  // namespace wbc
