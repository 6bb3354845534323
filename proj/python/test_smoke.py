"""Smoke test for the pywbc module: a few golden values and one scenario run."""
import numpy as np

import pywbc


def main():
    model = pywbc.RobotModel.reference()

    # Home pose: straight-up arm, end effector 0.38 m ahead and just above
    # the base origin (mount height 0.35 m minus 0.32 m of downward reach).
    home = pywbc.ee_in_base(np.zeros(6), model)
    assert np.allclose(home.position, [0.38, 0.0, 0.03], atol=1e-12)
    ortho = home.orientation @ home.orientation.T
    assert np.allclose(ortho, np.eye(3), atol=1e-12)

    # The weighted split reproduces the task twist exactly.
    q = np.array([0.0, -0.75, 0.10, 0.0, 1.40, 0.0])
    jac = pywbc.whole_body_jacobian(q, model)
    assert jac.shape == (6, 9)
    weight = pywbc.weighting_matrix(0.5, 0.5)
    rng = np.random.default_rng(11)
    v = rng.normal(size=6)
    sol = pywbc.resolve_wln(v, jac, weight, np.zeros(9))
    assert np.linalg.norm(jac @ sol - v) <= 1e-9

    # Capability at the bent reference posture.
    metrics = pywbc.movement_capability(q, model)
    assert abs(metrics.capability - 0.0833) < 2e-3
    assert metrics.capability == metrics.manipulability * metrics.joint_limit_penalty
    grad = pywbc.cm_gradient(q, model)
    assert not grad.degenerate
    assert np.linalg.norm(grad.joint) > 0

    # Blend midpoint and the repulsive-field golden value.
    assert abs(pywbc.transition_alpha(0.0375, 0.04, 0.035) - 0.5) < 1e-12
    force = pywbc.repulsive_force(
        np.zeros(2), [pywbc.DiscObstacle(center=[0.8, 0.0], radius=0.25)]
    )
    assert np.allclose(force, [-0.32, 0.0], atol=1e-9)

    # Learning produces a forcing term of the requested size.
    demo = [np.array([(3 - 2 * p) * p * p]) for p in np.linspace(0, 1, 51)]
    term = pywbc.learn_forcing_term(demo, basis_count=10)
    assert term.weights.shape == (10, 1)
    assert term.evaluate(0.0, 1)[0] == 0.0

    # Config errors surface as typed exceptions.
    try:
        pywbc.validate_config("{ not json")
    except pywbc.ParseError:
        pass
    else:
        raise AssertionError("malformed JSON must raise ParseError")

    # A short scenario run is deterministic and matches the CSV header.
    text = pywbc.bundled_scenarios()["trajectory_tracking"]
    text = pywbc.apply_override(text, "duration=0.5")
    csv_a = pywbc.run_scenario(text)
    csv_b = pywbc.run_scenario(text)
    assert csv_a == csv_b
    lines = csv_a.strip().splitlines()
    assert lines[0] == pywbc.csv_header()
    assert len(lines) == 51  # header + 50 cycles at 100 Hz
    t = [float(row.split(",")[0]) for row in lines[1:]]
    assert all(b > a for a, b in zip(t, t[1:]))

    print("ok")


if __name__ == "__main__":
    main()
