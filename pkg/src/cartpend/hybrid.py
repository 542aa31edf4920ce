"""Model-reference adaptive fuzzy PI-D channel and its loop topologies.

One channel tracks a second-order reference model. A gradient (MIT-style)
rule adapts four mixing parameters from the model error; the adapted
signals feed a PI shaping path and a filtered-derivative path into a fuzzy
surface, and a crisp PID term on the raw error is added on top:

    ym   <- reference model driven by r
    em   = y - ym
    ymf  <- second model instance driven by ym (a filtered model output)
    theta1..3 -= gamma_* em ym dt, theta' -= gamma' em ymf dt   (boxed)
    lam_i = theta_i r - theta' y
    u = fuzzy(kp lam1 + ki int(lam2), kd dfilt(lam3)) + cp e + ci int(e) + cd edot

With the rates at zero and unit thetas the channel drops back to a fixed
fuzzy PI-D on r (theta' = 0) or on the error (theta' = 1); a property test
holds this reduction to float accuracy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .classic import PidGains
from .fuzzy import FuzzySystem, fuzzy_infer
from .plant import State


class ReferenceModel:
    """Second-order unit-DC-gain target response, advanced by RK4."""

    __slots__ = ("natural_frequency_rads", "damping_ratio", "y", "y_dot")

    def __init__(self, natural_frequency_rads: float, damping_ratio: float):
        if not (math.isfinite(natural_frequency_rads) and natural_frequency_rads > 0.0):
            raise ValueError(
                f"natural_frequency_rads must be positive, got {natural_frequency_rads!r}")
        if not (math.isfinite(damping_ratio) and damping_ratio >= 0.0):
            raise ValueError(f"damping_ratio must be >= 0, got {damping_ratio!r}")
        self.natural_frequency_rads = natural_frequency_rads
        self.damping_ratio = damping_ratio
        self.y = 0.0
        self.y_dot = 0.0


def reference_model_step(model: ReferenceModel, r: float, dt_s: float) -> float:
    """Advance ydd = w^2 (r - y) - 2 z w yd one step; returns the new y."""
    w2 = model.natural_frequency_rads * model.natural_frequency_rads
    tz = 2.0 * model.damping_ratio * model.natural_frequency_rads
    y, yd = model.y, model.y_dot

    def f(y_, yd_):
        return yd_, w2 * (r - y_) - tz * yd_

    k1 = f(y, yd)
    k2 = f(y + 0.5 * dt_s * k1[0], yd + 0.5 * dt_s * k1[1])
    k3 = f(y + 0.5 * dt_s * k2[0], yd + 0.5 * dt_s * k2[1])
    k4 = f(y + dt_s * k3[0], yd + dt_s * k3[1])
    model.y = y + dt_s / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    model.y_dot = yd + dt_s / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    return model.y


@dataclass(frozen=True)
class AdaptiveParams:
    """Mixing parameters and their adaptation rates.

    ``theta_prime`` scales the measured output inside the lambda signals;
    1 makes them error-like, 0 makes them reference-like.
    """

    theta1: float = 1.0
    theta2: float = 1.0
    theta3: float = 1.0
    theta_prime: float = 1.0
    gamma_p: float = 0.01
    gamma_i: float = 0.01
    gamma_d: float = 0.01
    gamma_prime: float = 0.01

    def __post_init__(self):
        for name in ("gamma_p", "gamma_i", "gamma_d", "gamma_prime"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be >= 0, got {v!r}")
        for name in ("theta1", "theta2", "theta3", "theta_prime"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


def _mit_targets(params: AdaptiveParams, e_model: float, y: float,
                 y_model_filtered: float, dt_s: float):
    step = e_model * y * dt_s
    return (params.theta1 - params.gamma_p * step,
            params.theta2 - params.gamma_i * step,
            params.theta3 - params.gamma_d * step,
            params.theta_prime - params.gamma_prime * e_model * y_model_filtered * dt_s)


def mit_rule_update(params: AdaptiveParams, e_model: float, y: float,
                    y_model_filtered: float, dt_s: float,
                    bound: float = 100.0) -> AdaptiveParams:
    """Gradient step on the mixing parameters, clipped to the safety box.

    theta1..3 descend along e_model * y; theta_prime along e_model times the
    filtered model output. The box keeps a mis-tuned rate from running away.
    """
    t1, t2, t3, tp = (min(max(v, -bound), bound)
                      for v in _mit_targets(params, e_model, y, y_model_filtered, dt_s))
    return replace(params, theta1=t1, theta2=t2, theta3=t3, theta_prime=tp)


def lambda_signals(params: AdaptiveParams, r: float, y: float):
    """The three adapted shaping signals lam_i = theta_i r - theta' y."""
    common = params.theta_prime * y
    return (params.theta1 * r - common,
            params.theta2 * r - common,
            params.theta3 * r - common)


class HybridChannel:
    """One adaptive fuzzy PI-D channel; see the module docstring for the law.

    ``step(r, y, edot, dt)`` takes the measured output and its rate (the
    crisp derivative acts on the measured rate, not a difference of errors,
    so reference steps do not kick it).
    """

    def __init__(self, channel_gains: PidGains, crisp_gains: PidGains,
                 fuzzy_system: FuzzySystem, adaptive: AdaptiveParams = AdaptiveParams(),
                 safety_bound: float = 100.0,
                 natural_frequency_rads: float = 1.0, damping_ratio: float = 0.9):
        if not (math.isfinite(safety_bound) and safety_bound > 0.0):
            raise ValueError(f"safety_bound must be positive, got {safety_bound!r}")
        self.channel_gains = channel_gains
        self.crisp_gains = crisp_gains
        self.fuzzy_system = fuzzy_system
        self.safety_bound = safety_bound
        self.natural_frequency_rads = natural_frequency_rads
        self.damping_ratio = damping_ratio
        self._initial = adaptive
        self.reset()

    def reset(self):
        self.adaptive = self._initial
        self.clamp_events = []
        self._model = ReferenceModel(self.natural_frequency_rads, self.damping_ratio)
        self._model_filter = ReferenceModel(self.natural_frequency_rads, self.damping_ratio)
        self._lambda_integral = 0.0
        self._lambda2_prev = 0.0
        self._lambda3_prev = 0.0
        self._derivative_filter = 0.0
        self._error_integral = 0.0
        self._error_prev = 0.0
        self._steps = 0
        self._first = True

    def step(self, r: float, y: float, edot: float, dt_s: float) -> float:
        y_model = reference_model_step(self._model, r, dt_s)
        e_model = y - y_model
        y_model_filtered = reference_model_step(self._model_filter, y_model, dt_s)

        targets = _mit_targets(self.adaptive, e_model, y, y_model_filtered, dt_s)
        self.adaptive = mit_rule_update(self.adaptive, e_model, y, y_model_filtered,
                                        dt_s, bound=self.safety_bound)
        clamped = (self.adaptive.theta1, self.adaptive.theta2, self.adaptive.theta3,
                   self.adaptive.theta_prime)
        for name, raw, boxed in zip(("theta1", "theta2", "theta3", "theta_prime"),
                                    targets, clamped):
            if raw != boxed:
                self.clamp_events.append((self._steps, name))

        lam1, lam2, lam3 = lambda_signals(self.adaptive, r, y)
        if self._first:
            self._lambda2_prev = lam2
            self._lambda3_prev = lam3
        self._lambda_integral += dt_s * (lam2 + self._lambda2_prev) / 2.0
        self._lambda2_prev = lam2
        raw_rate = 0.0 if self._first else (lam3 - self._lambda3_prev) / dt_s
        self._lambda3_prev = lam3
        tau = self.channel_gains.filter_tau_s
        self._derivative_filter += dt_s / (tau + dt_s) * (raw_rate - self._derivative_filter)

        g = self.channel_gains
        pi_input = g.kp * lam1 + g.ki * self._lambda_integral
        d_input = g.kd * self._derivative_filter
        u_fuzzy = fuzzy_infer(self.fuzzy_system, pi_input, d_input)

        e = r - y
        if self._first:
            self._error_prev = e
            self._first = False
        self._error_integral += dt_s * (e + self._error_prev) / 2.0
        self._error_prev = e

        c = self.crisp_gains
        self._steps += 1
        return u_fuzzy + c.kp * e + c.ki * self._error_integral + c.kd * edot


def hybrid_control_step(channel: HybridChannel, r: float, y: float, edot: float,
                        dt_s: float) -> float:
    """Function form of ``HybridChannel.step``."""
    return channel.step(r, y, edot, dt_s)


class _HybridPositionLoop:
    """Single channel driving the cart position of a hanging pendulum."""

    def __init__(self, channel: HybridChannel):
        self._channel = channel

    def step(self, reference: float, state: State, dt_s: float) -> float:
        return self._channel.step(reference, state.x_m, -state.x_dot_ms, dt_s)

    def reset(self):
        self._channel.reset()

    @property
    def clamp_events(self):
        return list(self._channel.clamp_events)


def hybrid_position_topology(channel: HybridChannel) -> _HybridPositionLoop:
    return _HybridPositionLoop(channel)


class _HybridSimultaneousLoop:
    """Angle channel regulates theta to zero, position channel is subtracted."""

    def __init__(self, angle_channel: HybridChannel, position_channel: HybridChannel):
        self._angle = angle_channel
        self._position = position_channel

    def step(self, reference: float, state: State, dt_s: float) -> float:
        u_angle = self._angle.step(0.0, state.theta_rad, -state.theta_dot_rads, dt_s)
        u_pos = self._position.step(reference, state.x_m, -state.x_dot_ms, dt_s)
        return u_angle - u_pos

    def reset(self):
        self._angle.reset()
        self._position.reset()

    @property
    def clamp_events(self):
        return list(self._angle.clamp_events) + list(self._position.clamp_events)


def hybrid_simultaneous_topology(angle_channel: HybridChannel,
                                 position_channel: HybridChannel) -> _HybridSimultaneousLoop:
    return _HybridSimultaneousLoop(angle_channel, position_channel)
