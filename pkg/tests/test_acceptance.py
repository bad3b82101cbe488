"""Acceptance suite: every release criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS/FAIL line
per criterion.
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.optimize import brentq

from trms_ftc import ftc, harness, multimodel, observer, plant, synthesis
from trms_ftc.config import scenario_from_dict
from trms_ftc.params import TrmsParams, params_from_dict

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def scenario_iv_runs():
    """The flagship 50 s fault scenario: compensated twice, once without."""
    doc = json.loads((CONFIG_DIR / "scenario_iv.json").read_text())
    cfg = scenario_from_dict(doc)
    t0 = time.perf_counter()
    trace = harness.run_scenario(cfg)
    wall = time.perf_counter() - t0
    trace_repeat = harness.run_scenario(cfg)

    doc_off = json.loads((CONFIG_DIR / "scenario_iv.json").read_text())
    doc_off["controller"]["compensation"] = False
    trace_off = harness.run_scenario(scenario_from_dict(doc_off))
    profile = harness.profile_from_config(cfg)
    return trace, trace_repeat, trace_off, profile, wall


def test_rest_angle_settles(params):
    target = brentq(lambda a: plant.gravity_torque(a, params), -1.0, 0.0,
                    xtol=1e-14)
    t0 = time.perf_counter()
    x = (0.0,) * 6
    dt = 2e-3
    for _ in range(int(60.0 / dt)):
        x = plant._rk4(x, 0.0, 0.0, dt, params)
    wall = time.perf_counter() - t0
    err = abs(x[0] - target)
    _report("rest angle", err <= 0.01 and wall < 1.0 and abs(target + 0.671) < 1e-3,
            f"settled at {x[0]:+.4f} vs root {target:+.4f} (err {err:.2e}), "
            f"runtime {wall:.2f} s")


def test_energy_conservation():
    p = params_from_dict({"k_v": 0.0, "main_thrust_coeffs": [],
                          "tail_thrust_coeffs": []})
    x = (0.3, 0.0, 0.0, 0.0, 0.0, 0.0)

    def energy(state):
        omega_v, _ = plant.angular_rates(np.array(state), p)
        return (0.5 * p.j_v * omega_v ** 2
                - p.g * ((p.a_const - p.b_const) * math.sin(state[0])
                         + p.c_const * math.cos(state[0])))

    e0 = energy(x)
    worst = 0.0
    for k in range(10000):
        x = plant._rk4(x, 0.0, 0.0, 1e-3, p)
        if k % 100 == 99:
            worst = max(worst, abs(energy(x) - e0))
    drift = worst / abs(e0)
    _report("energy conservation", drift < 1e-6,
            f"relative drift {drift:.2e} over 10 s at dt=1e-3")


def test_linearization_ratio(params):
    rng = np.random.default_rng(123)
    worst = np.inf
    for node in multimodel.DEFAULT_NODES:
        x_star, u_star = plant.trim(node, 0.0, params)
        model = multimodel.linearize(params, x_star, u_star)
        f0 = plant.dynamics(x_star, u_star, params)
        for _ in range(100):
            direction = rng.standard_normal(6)
            delta = 1e-2 * direction / np.linalg.norm(direction)

            def residual(d):
                return np.linalg.norm(plant.dynamics(x_star + d, u_star, params)
                                      - f0 - model.a_mat @ d)

            worst = min(worst, residual(delta) / residual(delta / 2))
    _report("linearization ratio", worst >= 3.5,
            f"min residual shrink factor {worst:.2f} (need >= 3.5) "
            f"across 100 directions x 3 nodes")


def test_projector_identities(default_bank, default_design):
    _, uio = default_design
    worst = 0.0
    for model, h in zip(default_bank.models, uio.h_proj):
        c, l = model.c_mat, model.l_mat
        s = l.shape[1]
        worst = max(worst, np.abs(h @ (c @ l) - np.eye(s)).max())
        worst = max(worst, np.abs((np.eye(6) - l @ h @ c) @ l).max())
    _report("fault projector identities", worst <= 1e-10,
            f"max deviation {worst:.2e} over {len(default_bank)} models")


def test_closed_loop_stability_margins(default_bank, default_design):
    gains, uio = default_design
    c = default_bank.c_mat
    worst = -np.inf
    worst_union = 0.0
    for model, k1, h, a_bar, k2 in zip(default_bank.models, gains.k1,
                                       uio.h_proj, uio.a_bar, uio.k2):
        cl = np.linalg.eigvals(model.a_mat - model.b_mat @ k1)
        ob = np.linalg.eigvals(a_bar - k2 @ c)
        worst = max(worst, cl.real.max(), ob.real.max())
        a0 = synthesis.augmented_error_matrix(model, k1, h, a_bar, k2)
        full = np.sort_complex(np.linalg.eigvals(a0))
        union = np.sort_complex(np.concatenate([cl, ob]))
        worst_union = max(worst_union, np.abs(full - union).max())
    _report("combined error dynamics", worst < -0.05 and worst_union <= 1e-8,
            f"max eigenvalue real part {worst:.3f} (need < -0.05), "
            f"block-spectrum union deviation {worst_union:.2e}")


def _exact_affine_stepper(model, u_star, dt):
    # exact ZOH propagation oracle, independent of the package integrators
    import scipy.linalg
    n, s = 6, model.l_mat.shape[1]
    aug = np.zeros((n + s + 1, n + s + 1))
    aug[:n, :n] = model.a_mat
    aug[:n, n:n + s] = model.l_mat
    aug[:n, n + s] = model.b_mat @ u_star + model.delta_x
    phi = scipy.linalg.expm(aug * dt)

    def advance(x, f):
        return (phi @ np.concatenate([x, f, [1.0]]))[:6]

    return advance


def test_fault_estimation_speed_and_null(frozen_setup):
    bank, model, gains, uio, x_star, u_star = frozen_setup
    advance = _exact_affine_stepper(model, u_star, 1e-3)
    mu = np.array([1.0])

    x = x_star.copy()
    state = observer.ObserverState.initial(x, bank.c_mat @ x, 2)
    amp, t_fault = 1.0, 1.0
    worst = 0.0
    for k in range(int(4.0 / 1e-3)):
        t = k * 1e-3
        state = observer.uio_step(uio, bank, state, u_star, bank.c_mat @ x, mu, 1e-3)
        x = advance(x, np.array([amp if t >= t_fault else 0.0, 0.0]))
        if t >= t_fault + 2.0:
            worst = max(worst, abs(state.f_hat[0] - amp))

    x = x_star.copy()
    state = observer.ObserverState.initial(x + 0.01, bank.c_mat @ x, 2)
    for _ in range(int(10.0 / 1e-3)):
        state = observer.uio_step(uio, bank, state, u_star, bank.c_mat @ x, mu, 1e-3)
        x = advance(x, np.zeros(2))
    null_level = np.linalg.norm(state.f_hat)
    _report("fault estimation", worst <= 0.01 * amp and null_level <= 1e-6,
            f"step reconstruction error {worst:.2e} after 2 s (need <= 1e-2), "
            f"zero-fault estimate {null_level:.2e} after 10 s (need <= 1e-6)")


def test_exact_compensation(frozen_setup):
    bank, model, gains, uio, x_star, u_star = frozen_setup
    a, b, l, dxv = model.a_mat, model.b_mat, model.l_mat, model.delta_x
    dt, horizon = 1e-3, 10.0

    def run(faulty):
        x = x_star + np.array([0.05, 0.0, 0.0, -0.08, 0.0, 0.0])
        traj = np.empty((int(horizon / dt), 6))
        for k in range(traj.shape[0]):
            t = k * dt
            f = np.array([0.4 if (faulty and t >= 2.0) else 0.0,
                          -0.25 if (faulty and t >= 4.0) else 0.0])
            u_nom = u_star - gains.k1[0] @ (x - x_star)
            u_f = ftc.ftc_augment(gains, [1.0], u_nom, f, x, x, 1e9)
            x = observer.affine_rk4(a, b @ u_f + l @ f + dxv, x, dt)
            traj[k] = x
        return traj

    gap = np.abs(run(False) - run(True)).max()
    _report("exact compensation", gap <= 1e-8,
            f"max trajectory gap {gap:.2e} over 10 s (need <= 1e-8)")


def test_scenario_iv_ftc_benefit(scenario_iv_runs):
    trace, _, trace_off, profile, wall = scenario_iv_runs
    m = harness.compute_metrics(trace, profile)
    m_off = harness.compute_metrics(trace_off, profile)
    ok = (m.rms_pitch_post <= 2.0 * m.rms_pitch_pre
          and m.rms_yaw_post <= 2.0 * m.rms_yaw_pre
          and m.rms_pitch_post < m_off.rms_pitch_post
          and m.rms_yaw_post < m_off.rms_yaw_post
          and wall < 10.0)
    _report("intermittent-fault scenario", ok,
            f"post/pre pitch {m.rms_pitch_post:.4f}/{m.rms_pitch_pre:.4f}, "
            f"yaw {m.rms_yaw_post:.4f}/{m.rms_yaw_pre:.4f}; without the "
            f"compensation term pitch {m_off.rms_pitch_post:.4f}, "
            f"yaw {m_off.rms_yaw_post:.4f}; runtime {wall:.1f} s (need < 10)")


def test_determinism(scenario_iv_runs):
    trace, trace_repeat, _, _, _ = scenario_iv_runs
    same = trace.to_csv_text() == trace_repeat.to_csv_text()
    _report("determinism", same,
            "repeated 50 s scenario runs produced byte-identical CSV"
            if same else "CSV output differs between identical runs")
