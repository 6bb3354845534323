#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "wbc/dmp.hpp"

using namespace wbc;

namespace {

VectorXd scalar(double v) {
  VectorXd x(1);
  x[0] = v;
  return x;
}

}  // namespace

TEST_CASE("canonical phase decays linearly per step and stays positive") {
  CdmpParams params;  // alpha_s = 4, tau = 1
  CHECK(canonical_step(1.0, params, 0.01) == doctest::Approx(0.96).epsilon(1e-12));
  double s = 1.0;
  for (int i = 0; i < 10000; ++i) s = canonical_step(s, params, 0.05);
  CHECK(s > 0.0);
}

TEST_CASE("a primitive resting at its goal passes velocity through exactly") {
  const Eigen::Vector2d v(0.13, -0.07);
  CdmpState state = CdmpState::at_goal(Eigen::Vector2d(0.4, -0.1));
  CouplingInputs in;
  in.velocity_cmd = v;
  const CdmpParams params{1.0, 25.0, 6.25, 4.0, 2};
  const double dt = 0.01;
  for (int k = 1; k <= 100; ++k) {
    state = base_cdmp_step(state, in, params, dt);
    const Eigen::Vector2d expected = Eigen::Vector2d(0.4, -0.1) + k * dt * v;
    CHECK((state.y - expected).norm() < 1e-12);
    CHECK(state.z.norm() < 1e-12);
  }
}

TEST_CASE("whole-body and arm variants share the exact velocity interface") {
  const double dt = 0.01;
  {
    CdmpState state = CdmpState::at_goal(Eigen::Vector4d(0.1, 0.2, 0.5, 0.0));
    CouplingInputs in;
    in.velocity_cmd = Eigen::Vector4d(0.1, 0.0, -0.05, 0.2);
    const CdmpParams params{1.0, 25.0, 6.25, 4.0, 4};
    VectorXd shift = VectorXd::Zero(4);
    for (int k = 1; k <= 50; ++k) {
      state = wholebody_cdmp_step(state, in, shift, params, dt);
      const Eigen::Vector4d expected =
          Eigen::Vector4d(0.1, 0.2, 0.5, 0.0) + k * dt * in.velocity_cmd;
      CHECK((state.y - expected).norm() < 1e-12);
    }
  }
  {
    CdmpState state = CdmpState::at_goal(VectorXd::Zero(6));
    CouplingInputs in;
    in.velocity_cmd = VectorXd::Zero(6);
    in.velocity_cmd[0] = 0.3;
    in.velocity_cmd[5] = -0.1;
    const CdmpParams params{1.0, 25.0, 6.25, 4.0, 6};
    for (int k = 1; k <= 50; ++k) {
      state = arm_cdmp_step(state, in, params, dt);
      CHECK((state.y - k * dt * in.velocity_cmd).norm() < 1e-12);
    }
  }
}

TEST_CASE("plain attractor converges to the goal without forcing") {
  CdmpState state = CdmpState::at_goal(scalar(1.0));
  state.y = scalar(0.0);  // displaced start
  const CdmpParams params{1.0, 25.0, 6.25, 4.0, 1};
  ForcingTerm empty;
  double t = 0.0;
  while (t < 5.0) {
    state = dmp_step(state, empty, params, 0.01);
    t += 0.01;
  }
  CHECK(std::abs(state.y[0] - 1.0) < 1e-3);
  CHECK(std::abs(state.z[0]) < 1e-2);
}

TEST_CASE("stiffness coupling tracks the analytic second-order response") {
  // Continuous model: ydot = z/tau + k_p F, tau zdot = az(bz(g - y) - z).
  // Repeated eigenvalue -az/(2 tau); compare the semi-implicit discretization
  // against the matrix exponential at every sample.
  const double kp = 5e-4, force = 10.0, az = 25.0, bz = 6.25, tau = 1.0;
  const double dt = 0.01;
  const double goal = 0.2;
  const double y_ss = goal + tau * kp * force / bz;
  const double z_ss = -tau * kp * force;
  const double s_eig = -az / (2.0 * tau);

  CdmpState state = CdmpState::at_goal(scalar(goal));
  CouplingInputs in;
  in.external_force = scalar(force);
  in.stiffness_gain = kp;
  const CdmpParams params{tau, az, bz, 4.0, 1};

  Eigen::Matrix2d a;
  a << 0.0, 1.0 / tau, -az * bz / tau, -az / tau;
  const Eigen::Vector2d x0(goal - y_ss, -z_ss);  // x = state - equilibrium

  double worst = 0.0;
  for (int k = 1; k <= 150; ++k) {
    state = stiffness_coupled_step(state, in, params, dt);
    const double t = k * dt;
    const Eigen::Matrix2d phi =
        std::exp(s_eig * t) *
        ((1.0 - s_eig * t) * Eigen::Matrix2d::Identity() + t * a);
    const Eigen::Vector2d x = phi * x0;
    const double y_exact = y_ss + x[0];
    worst = std::max(worst, std::abs(state.y[0] - y_exact));
  }
  CHECK(worst < 0.02 * std::abs(y_ss - goal));

  // Steady state: offset k_p tau F / beta_z.
  for (int k = 0; k < 2000; ++k) state = stiffness_coupled_step(state, in, params, dt);
  CHECK(state.y[0] == doctest::Approx(y_ss).epsilon(1e-4));
}

TEST_CASE("force-rate gain leaves the stiffness steady state untouched") {
  CouplingInputs in;
  in.external_force = scalar(4.0);
  in.stiffness_gain = 5e-4;
  in.stiffness_rate_gain = 0.02;
  const CdmpParams params{1.0, 25.0, 6.25, 4.0, 1};
  CdmpState state = CdmpState::at_goal(scalar(0.0));
  for (int k = 0; k < 3000; ++k) state = stiffness_coupled_step(state, in, params, 0.01);
  CHECK(state.y[0] == doctest::Approx(5e-4 * 4.0 / 6.25).epsilon(1e-4));
}

TEST_CASE("admittance coupling settles at velocity gain times force error") {
  CouplingInputs in;
  in.external_force = scalar(6.0);
  in.desired_force = scalar(1.0);
  in.admittance_gain = scalar(0.02);
  const CdmpParams params{1.0, 25.0, 6.25, 4.0, 1};
  const double dt = 0.01;
  CdmpState state = CdmpState::at_goal(scalar(0.0));
  double prev = 0.0;
  double rate = 0.0;
  for (int k = 0; k < 400; ++k) {
    prev = state.y[0];
    state = admittance_coupled_step(state, in, params, dt);
    rate = (state.y[0] - prev) / dt;
  }
  CHECK(rate == doctest::Approx(0.02 * 5.0).epsilon(1e-2));
}

TEST_CASE("a learned forcing term reproduces a smooth demonstration") {
  const double dt = 0.01;
  const int samples = 101;
  std::vector<VectorXd> demo;
  demo.reserve(samples);
  for (int k = 0; k < samples; ++k) {
    const double p = static_cast<double>(k) / (samples - 1);
    demo.push_back(scalar(10.0 * p * p * p - 15.0 * p * p * p * p +
                          6.0 * p * p * p * p * p));  // min-jerk 0 -> 1
  }
  const CdmpParams params{1.0, 25.0, 6.25, 4.0, 1};
  const ForcingTerm term = learn_forcing_term(demo, params, 25, dt);

  CdmpState state;
  state.y = demo.front();
  state.z = scalar(0.0);
  state.g = demo.back();
  state.coupling_integral = scalar(0.0);
  state.error_integral = scalar(0.0);
  state.s = 1.0;

  double sum_sq = 0.0;
  for (int k = 1; k < samples; ++k) {
    state = dmp_step(state, term, params, dt);
    const double err = state.y[0] - demo[static_cast<size_t>(k)][0];
    sum_sq += err * err;
  }
  CHECK(std::sqrt(sum_sq / (samples - 1)) < 0.02);
}

TEST_CASE("learning refuses a demonstration that is too short") {
  std::vector<VectorXd> demo{scalar(0.0), scalar(1.0)};
  CHECK_THROWS_AS(learn_forcing_term(demo, {}, 10, 0.01), InsufficientData);
}

TEST_CASE("empty forcing term evaluates to zero") {
  ForcingTerm term;
  CHECK(term.evaluate(0.7, 3).norm() == 0.0);
}

TEST_CASE("repulsive field matches its closed form at a known standoff") {
  RepulsiveFieldParams field;  // gain 0.01, threshold 0.5
  std::vector<DiscObstacle> obstacles{{Vector2d(0.8, 0.0), 0.25}};
  // Surface distance: 0.8 - 0.3 - 0.25 = 0.25; magnitude k(1/d - 1/d_th)/d^2.
  const Vector2d f = repulsive_force(Vector2d::Zero(), obstacles, field, 0.3);
  CHECK(f.x() == doctest::Approx(-0.32).epsilon(1e-12));
  CHECK(f.y() == doctest::Approx(0.0).epsilon(1e-12));

  // Outside the support radius the field vanishes.
  std::vector<DiscObstacle> far{{Vector2d(2.0, 0.0), 0.25}};
  CHECK(repulsive_force(Vector2d::Zero(), far, field, 0.3).norm() == 0.0);

  // Overlap floors the distance instead of dividing by zero.
  std::vector<DiscObstacle> inside{{Vector2d(0.1, 0.0), 0.25}};
  const Vector2d deep = repulsive_force(Vector2d::Zero(), inside, field, 0.3);
  CHECK(deep.allFinite());
  CHECK(deep.x() < -1e3);
}

TEST_CASE("measured-distance field form agrees with the geometric form") {
  RepulsiveFieldParams field;
  std::vector<DiscObstacle> obstacles{{Vector2d(0.6, 0.45), 0.2}};
  const Vector2d geometric = repulsive_force(Vector2d::Zero(), obstacles, field, 0.3);
  const double d = std::hypot(0.6, 0.45) - 0.3 - 0.2;
  const Vector2d away = -Vector2d(0.6, 0.45).normalized();
  const Vector2d measured = repulsive_force_from_measurement(d, away, field);
  CHECK((geometric - measured).norm() < 1e-12);
}

TEST_CASE("acceleration coupling enters the z state first") {
  CdmpState state = CdmpState::at_goal(Eigen::Vector2d::Zero());
  const Eigen::Vector2d accel(2.0, -1.0);
  const CdmpParams params{1.0, 25.0, 6.25, 4.0, 2};
  ForcingTerm empty;
  state = obstacle_coupled_step(state, accel, empty, params, 0.01);
  CHECK((state.z - 0.01 * accel).norm() < 1e-15);
  CHECK((state.y - 0.0001 * accel).norm() < 1e-15);
}
