"""Fixed-step closed-loop simulation: RK4, step references, seeded disturbances.

The loop contract per step k:

1. read the reference r_k,
2. ask the controller for a force,
3. add the disturbance draw (only inside its time window; the generator is
   not advanced outside it),
4. clamp to the force limit when one is set,
5. log, then advance the plant one RK4 step.

Everything is deterministic given the config, so a rerun reproduces the
trajectory byte for byte.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .plant import PlantParams, State, nonlinear_derivative
from .rng import SplitMix64

Derivative = Callable[[State, float], State]

CSV_HEADER = "t,theta,theta_dot,x,x_dot,u,ref"


@dataclass(frozen=True)
class ReferenceSpec:
    """Step reference: 0 before ``step_time_s``, ``amplitude`` at and after."""

    amplitude: float = 0.3
    step_time_s: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.amplitude):
            raise ValueError(f"amplitude must be finite, got {self.amplitude!r}")
        if not (math.isfinite(self.step_time_s) and self.step_time_s >= 0.0):
            raise ValueError(f"step_time_s must be >= 0, got {self.step_time_s!r}")


@dataclass(frozen=True)
class DisturbanceSpec:
    """Additive input disturbance, active on [start_s, end_s] inclusive.

    ``uniform_noise`` draws from [-amplitude_N, +amplitude_N] each step.
    """

    kind: str = "none"
    amplitude_N: float = 0.0
    start_s: float = 0.0
    end_s: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "uniform_noise"):
            raise ValueError(f"unknown disturbance kind {self.kind!r}")
        if not (math.isfinite(self.amplitude_N) and self.amplitude_N >= 0.0):
            raise ValueError(f"amplitude_N must be >= 0, got {self.amplitude_N!r}")
        if self.start_s > self.end_s:
            raise ValueError(
                f"empty disturbance window [{self.start_s}, {self.end_s}]")


@dataclass(frozen=True)
class SimConfig:
    dt_s: float = 1e-3
    duration_s: float = 40.0
    reference: ReferenceSpec = field(default_factory=ReferenceSpec)
    disturbance: DisturbanceSpec = field(default_factory=DisturbanceSpec)
    seed: int = 12345
    force_limit_N: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.dt_s) and self.dt_s > 0.0):
            raise ValueError(f"dt_s must be positive, got {self.dt_s!r}")
        if not (math.isfinite(self.duration_s) and self.duration_s >= self.dt_s):
            raise ValueError(
                f"duration_s must be at least one step, got {self.duration_s!r}")
        steps = self.duration_s / self.dt_s
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ValueError(
                f"duration_s = {self.duration_s} is not an integer number of "
                f"dt_s = {self.dt_s} steps")
        if self.force_limit_N is not None and not (
                math.isfinite(self.force_limit_N) and self.force_limit_N > 0.0):
            raise ValueError(f"force_limit_N must be positive, got {self.force_limit_N!r}")

    @property
    def step_count(self) -> int:
        return int(round(self.duration_s / self.dt_s))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled closed-loop run; row k is the state at t = k dt.

    ``inputs_N`` holds the total applied force (controller plus disturbance,
    after clamping); the final row repeats the last applied value so all
    columns share one length.
    """

    times_s: np.ndarray
    states: np.ndarray
    inputs_N: np.ndarray
    references: np.ndarray

    def to_csv_text(self) -> str:
        rows = [CSV_HEADER]
        for k in range(len(self.times_s)):
            vals = (self.times_s[k], *self.states[k], self.inputs_N[k],
                    self.references[k])
            rows.append(",".join(format(v, ".15g") for v in vals))
        return "\n".join(rows) + "\n"

    @classmethod
    def from_csv_text(cls, text: str) -> "Trajectory":
        lines = [ln for ln in text.strip().splitlines() if ln]
        if not lines or lines[0] != CSV_HEADER:
            raise ValueError("unrecognized trajectory csv header")
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
        if data.ndim != 2 or data.shape[1] != 7:
            raise ValueError("trajectory csv must have 7 columns")
        return cls(times_s=data[:, 0], states=data[:, 1:5], inputs_N=data[:, 5],
                   references=data[:, 6])


class SimulationFault(RuntimeError):
    """Non-finite force or state; carries the finite prefix of the run."""

    def __init__(self, step_index: int, trajectory: Trajectory):
        super().__init__(f"simulation diverged at step {step_index}")
        self.step_index = step_index
        self.trajectory = trajectory


def rk4_step(f: Derivative, state: State, u: float, dt_s: float) -> State:
    """One classical Runge-Kutta step with the input held constant."""
    k1 = f(state, u)
    s2 = State(*(s + 0.5 * dt_s * k for s, k in zip(state, k1)))
    k2 = f(s2, u)
    s3 = State(*(s + 0.5 * dt_s * k for s, k in zip(state, k2)))
    k3 = f(s3, u)
    s4 = State(*(s + dt_s * k for s, k in zip(state, k3)))
    k4 = f(s4, u)
    return State(*(
        s + dt_s / 6.0 * (a + 2.0 * b + 2.0 * c + d)
        for s, a, b, c, d in zip(state, k1, k2, k3, k4)))


def make_derivative(params: PlantParams) -> Derivative:
    """Bind plant parameters into an ``f(state, force)`` field for rk4_step."""
    def f(state: State, u: float) -> State:
        return nonlinear_derivative(params, state, u)
    return f


def disturbance_sample(spec: DisturbanceSpec, t_s: float, rng: SplitMix64) -> float:
    """One disturbance draw; outside the window the generator is untouched."""
    if spec.kind == "none":
        return 0.0
    if t_s < spec.start_s or t_s > spec.end_s:
        return 0.0
    return spec.amplitude_N * (2.0 * rng.uniform() - 1.0)


def run_closed_loop(params: PlantParams, controller, config: SimConfig,
                    initial_state: State = State(0.0, 0.0, 0.0, 0.0)) -> Trajectory:
    """Simulate one controller against the nonlinear plant.

    ``controller`` needs a ``step(reference, state, dt_s) -> force`` method.
    Raises SimulationFault (with the finite prefix attached) the moment the
    force or the next state stops being finite.
    """
    n = config.step_count
    dt = config.dt_s
    times = np.arange(n + 1) * dt
    refs = np.where(times >= config.reference.step_time_s,
                    config.reference.amplitude, 0.0)
    states = np.empty((n + 1, 4))
    inputs = np.zeros(n + 1)
    states[0] = initial_state

    rng = SplitMix64(config.seed)
    f = make_derivative(params)
    s = initial_state

    def partial(k):
        return Trajectory(times_s=times[:k + 1].copy(), states=states[:k + 1].copy(),
                          inputs_N=inputs[:k + 1].copy(), references=refs[:k + 1].copy())

    for k in range(n):
        u = controller.step(float(refs[k]), s, dt)
        u = u + disturbance_sample(config.disturbance, float(times[k]), rng)
        if config.force_limit_N is not None:
            lim = config.force_limit_N
            u = lim if u > lim else (-lim if u < -lim else u)
        if not math.isfinite(u):
            raise SimulationFault(k, partial(k))
        inputs[k] = u
        try:
            s_next = rk4_step(f, s, u, dt)
        except (ValueError, OverflowError, FloatingPointError):
            raise SimulationFault(k, partial(k)) from None
        if not all(math.isfinite(v) for v in s_next):
            raise SimulationFault(k, partial(k))
        s = s_next
        states[k + 1] = s

    inputs[n] = inputs[n - 1] if n > 0 else 0.0
    return Trajectory(times_s=times, states=states, inputs_N=inputs, references=refs)
