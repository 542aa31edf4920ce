"""Reference model, MIT-rule adaptation, and hybrid channel structure tests."""
import math

import numpy as np
import pytest

from cartpend.classic import PidGains
from cartpend.fuzzy import fuzzy_infer, standard_fuzzy_system
from cartpend.hybrid import (
    AdaptiveParams,
    HybridChannel,
    ReferenceModel,
    hybrid_control_step,
    hybrid_position_topology,
    hybrid_simultaneous_topology,
    lambda_signals,
    mit_rule_update,
    reference_model_step,
)
from cartpend.plant import PlantParams, State
from cartpend.sim import ReferenceSpec, SimConfig, run_closed_loop

P = PlantParams()


def _angle_channel():
    return HybridChannel(
        channel_gains=PidGains(5.0, 0.0, 1.0, 0.01),
        crisp_gains=PidGains(40.0, 0.0, 4.0, 0.01),
        fuzzy_system=standard_fuzzy_system(1.0, 1.0, 8.0),
        adaptive=AdaptiveParams(gamma_p=0.001, gamma_i=0.001, gamma_d=0.001,
                                gamma_prime=0.001),
    )


def _position_channel():
    return HybridChannel(
        channel_gains=PidGains(3.5, 0.0, 3.0, 0.01),
        crisp_gains=PidGains(1.5, 0.0, 3.0, 0.01),
        fuzzy_system=standard_fuzzy_system(1.0, 1.0, 6.0),
        adaptive=AdaptiveParams(gamma_p=0.001, gamma_i=0.001, gamma_d=0.001,
                                gamma_prime=0.001),
    )


def _cart_channel():
    return HybridChannel(
        channel_gains=PidGains(1.5, 0.0, 1.4, 0.01),
        crisp_gains=PidGains(1.2, 0.0, 0.3, 0.01),
        fuzzy_system=standard_fuzzy_system(1.0, 1.0, 12.0),
        adaptive=AdaptiveParams(gamma_p=0.001, gamma_i=0.001, gamma_d=0.001,
                                gamma_prime=0.001),
    )


# ---------------- reference model ----------------

def test_reference_model_zero_input_stays_zero():
    m = ReferenceModel(1.0, 0.9)
    for _ in range(100):
        assert reference_model_step(m, 0.0, 1e-3) == 0.0


def test_reference_model_critically_damped_closed_form():
    m = ReferenceModel(1.0, 1.0)
    y = 0.0
    for _ in range(1000):
        y = reference_model_step(m, 1.0, 1e-3)
    assert y == pytest.approx(1.0 - 2.0 * math.exp(-1.0), abs=1e-6)


def test_reference_model_unit_dc_gain():
    m = ReferenceModel(1.0, 0.9)
    y = 0.0
    for _ in range(40000):
        y = reference_model_step(m, 1.0, 1e-3)
    assert y == pytest.approx(1.0, abs=1e-6)


def test_reference_model_validation():
    with pytest.raises(ValueError):
        ReferenceModel(0.0, 0.9)
    with pytest.raises(ValueError):
        ReferenceModel(1.0, -0.1)


# ---------------- MIT rule ----------------

def test_mit_rule_zero_rates_freeze_parameters():
    p = AdaptiveParams(gamma_p=0.0, gamma_i=0.0, gamma_d=0.0, gamma_prime=0.0)
    q = mit_rule_update(p, 0.5, 2.0, 1.5, 0.01)
    assert q == p


def test_mit_rule_zero_model_error_freezes_parameters():
    p = AdaptiveParams()
    q = mit_rule_update(p, 0.0, 2.0, 1.5, 0.01)
    assert (q.theta1, q.theta2, q.theta3, q.theta_prime) == (1.0, 1.0, 1.0, 1.0)


def test_mit_rule_gradient_arithmetic():
    p = AdaptiveParams(gamma_p=1.0, gamma_i=0.0, gamma_d=0.0, gamma_prime=0.0)
    q = mit_rule_update(p, 0.5, 2.0, 0.0, 0.01)
    assert q.theta1 == pytest.approx(1.0 - 0.01, abs=1e-15)
    assert q.theta2 == 1.0 and q.theta3 == 1.0 and q.theta_prime == 1.0


def test_mit_rule_uses_filtered_output_for_theta_prime():
    p = AdaptiveParams(gamma_p=0.0, gamma_i=0.0, gamma_d=0.0, gamma_prime=2.0)
    q = mit_rule_update(p, 0.5, 2.0, 1.5, 0.01)
    assert q.theta_prime == pytest.approx(1.0 - 2.0 * 0.5 * 1.5 * 0.01, abs=1e-15)


def test_mit_rule_safety_box_clamps():
    p = AdaptiveParams(theta1=99.999, gamma_p=1000.0)
    q = mit_rule_update(p, -1.0, 1.0, 1.0, 1.0, bound=100.0)
    assert q.theta1 == 100.0


def test_adaptive_params_reject_negative_rates():
    with pytest.raises(ValueError):
        AdaptiveParams(gamma_p=-0.01)


# ---------------- lambda signals ----------------

def test_lambda_signals_examples():
    p = AdaptiveParams(theta1=1.0, theta2=1.0, theta3=1.0, theta_prime=0.0)
    assert lambda_signals(p, 0.3, 5.0) == pytest.approx((0.3, 0.3, 0.3))
    p = AdaptiveParams(theta_prime=1.0)
    assert lambda_signals(p, 0.0, 0.2) == pytest.approx((-0.2, -0.2, -0.2))
    p = AdaptiveParams(theta1=2.0, theta2=0.0, theta3=1.0, theta_prime=1.0)
    assert lambda_signals(p, 1.0, 0.5) == pytest.approx((1.5, -0.5, 0.5))


# ---------------- channel structure ----------------

def test_channel_zero_history_zero_output():
    ch = _cart_channel()
    for _ in range(50):
        assert hybrid_control_step(ch, 0.0, 0.0, 0.0, 1e-3) == 0.0


def _reduction_reference(kp, ki, kd, cp, ci, cd, fsys, lam_seq, e_seq, edot_seq, tau, dt):
    # independent restatement of the adaptation-off pipeline arithmetic
    out = []
    i_lam = 0.0
    fd = 0.0
    lam_prev = lam_seq[0]
    i_e = 0.0
    e_prev = e_seq[0]
    for k, (lam, e, edot) in enumerate(zip(lam_seq, e_seq, edot_seq)):
        i_lam += dt * (lam + lam_prev) / 2.0
        raw = (lam - lam_prev) / dt
        fd += dt / (tau + dt) * (raw - fd)
        lam_prev = lam
        uf = fuzzy_infer(fsys, kp * lam + ki * i_lam, kd * fd)
        i_e += dt * (e + e_prev) / 2.0
        e_prev = e
        out.append(uf + cp * e + ci * i_e + cd * edot)
    return out


@pytest.mark.parametrize("theta_prime", [0.0, 1.0])
def test_adaptation_off_structural_reduction(theta_prime):
    # gamma = 0, theta = (1,1,1): lambda is r (theta'=0) or the error e (theta'=1)
    fsys = standard_fuzzy_system(1.0, 1.0, 5.0)
    ch = HybridChannel(
        channel_gains=PidGains(1.1, 0.4, 0.7, 0.01),
        crisp_gains=PidGains(2.0, 0.3, 0.5, 0.01),
        fuzzy_system=fsys,
        adaptive=AdaptiveParams(theta_prime=theta_prime, gamma_p=0.0, gamma_i=0.0,
                                gamma_d=0.0, gamma_prime=0.0),
    )
    dt = 0.01
    rs = [0.3] * 40
    ys = [0.02 * k * math.sin(0.4 * k) for k in range(40)]
    edots = [0.1 * math.cos(0.3 * k) for k in range(40)]
    es = [r - y for r, y in zip(rs, ys)]
    lams = rs if theta_prime == 0.0 else es
    want = _reduction_reference(1.1, 0.4, 0.7, 2.0, 0.3, 0.5, fsys, lams, es, edots, 0.01, dt)
    got = [ch.step(r, y, ed, dt) for r, y, ed in zip(rs, ys, edots)]
    assert got == pytest.approx(want, abs=1e-12)


def test_channel_clamp_logging():
    ch = HybridChannel(
        channel_gains=PidGains(1.0, 0.0, 0.0, 0.01),
        crisp_gains=PidGains(0.0, 0.0, 0.0, 0.01),
        fuzzy_system=standard_fuzzy_system(),
        adaptive=AdaptiveParams(gamma_p=1e7, gamma_i=1e7, gamma_d=1e7, gamma_prime=1e7),
        safety_bound=2.0,
    )
    for k in range(200):
        ch.step(1.0, -1.0, 0.0, 1e-2)
    assert len(ch.clamp_events) > 0
    a = ch.adaptive
    assert all(abs(v) <= 2.0 for v in (a.theta1, a.theta2, a.theta3, a.theta_prime))


def test_channel_no_clamp_events_at_default_rates():
    ch = _cart_channel()
    for k in range(2000):
        ch.step(1.0, 0.4 * math.sin(0.01 * k), 0.0, 1e-3)
    assert ch.clamp_events == []


def test_channel_reset():
    ch = _cart_channel()
    u0 = ch.step(1.0, 0.0, 0.0, 1e-3)
    for _ in range(100):
        ch.step(1.0, 0.3, -0.1, 1e-3)
    ch.reset()
    assert ch.step(1.0, 0.0, 0.0, 1e-3) == u0
    assert ch.clamp_events == []


# ---------------- topologies ----------------

def test_simultaneous_equilibrium_zero_output():
    ctrl = hybrid_simultaneous_topology(_angle_channel(), _position_channel())
    for _ in range(20):
        assert ctrl.step(0.0, State(0.0, 0.0, 0.0, 0.0), 1e-3) == 0.0


def test_simultaneous_stabilizes_small_tilt():
    ctrl = hybrid_simultaneous_topology(_angle_channel(), _position_channel())
    cfg = SimConfig(dt_s=1e-3, duration_s=15.0, reference=ReferenceSpec(0.0, 0.0))
    traj = run_closed_loop(P, ctrl, cfg, initial_state=State(0.05, 0.0, 0.0, 0.0))
    assert abs(traj.states[-1, 0]) < 5e-3
    assert abs(traj.states[-1, 2]) < 0.05
    assert np.max(np.abs(traj.states[-1000:, 0])) < 5e-3


def test_simultaneous_step_keeps_pendulum_tight():
    ctrl = hybrid_simultaneous_topology(_angle_channel(), _position_channel())
    cfg = SimConfig(dt_s=1e-3, duration_s=15.0, reference=ReferenceSpec(0.3, 0.0))
    traj = run_closed_loop(P, ctrl, cfg)
    th = np.abs(traj.states[:, 0])
    # pendulum excursion returns below 0.01 rad within 10 s and stays there
    over = np.nonzero(th > 0.01)[0]
    t_back = 0.0 if len(over) == 0 else traj.times_s[over[-1] + 1]
    assert t_back < 10.0
    assert abs(traj.states[-1, 2] - 0.3) < 0.01


def test_position_topology_reaches_cart_reference():
    ctrl = hybrid_position_topology(_cart_channel())
    cfg = SimConfig(dt_s=1e-3, duration_s=10.0, reference=ReferenceSpec(1.0, 0.0))
    traj = run_closed_loop(P, ctrl, cfg, initial_state=State(math.pi, 0.0, 0.0, 0.0))
    assert abs(traj.states[-1, 2] - 1.0) < 0.02
