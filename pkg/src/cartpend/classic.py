"""Classical control: discrete PID primitives, a CARE solver, LQR synthesis.

The PID primitive is a pure function over an explicit state tuple so loop
topologies can own priming and wiring decisions. The Riccati solver runs in
two phases: a forward differential-Riccati sweep from P = 0 until the
implied gain stabilizes the plant, then Newton iterations with exact
Lyapunov solves to drive the algebraic residual below tolerance. scipy has
an equivalent solver; it is deliberately only used in the test suite as an
independent cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Tuple

import numpy as np

from .plant import State, StateSpace


class ConvergenceError(RuntimeError):
    """Riccati iteration ran out of budget; carries the last residual."""

    def __init__(self, message: str, residual: float = math.nan):
        super().__init__(message)
        self.residual = residual


# ---------------------------------------------------------------- PID

@dataclass(frozen=True)
class PidGains:
    kp: float
    ki: float
    kd: float
    filter_tau_s: float = 0.01

    def __post_init__(self):
        if not (math.isfinite(self.filter_tau_s) and self.filter_tau_s >= 0.0):
            raise ValueError(f"filter_tau_s must be >= 0, got {self.filter_tau_s!r}")


class PidState(NamedTuple):
    integral_accumulator: float = 0.0
    previous_error: float = 0.0
    derivative_filter_state: float = 0.0


def pid_step(gains: PidGains, state: PidState, error: float,
             dt_s: float) -> Tuple[float, PidState]:
    """One PID update: trapezoidal integral, filtered backward difference.

    With ``filter_tau_s = 0`` the derivative is the raw difference quotient.
    The caller decides whether to prime ``previous_error`` before the first
    step; an unprimed zero history gives the textbook derivative kick.
    """
    integral = state.integral_accumulator + dt_s * (error + state.previous_error) / 2.0
    raw = (error - state.previous_error) / dt_s
    if gains.filter_tau_s > 0.0:
        alpha = dt_s / (gains.filter_tau_s + dt_s)
        derivative = state.derivative_filter_state + alpha * (raw - state.derivative_filter_state)
    else:
        derivative = raw
    u = gains.kp * error + gains.ki * integral + gains.kd * derivative
    return u, PidState(integral, error, derivative)


# ---------------------------------------------------------------- CARE / LQR

def _default_q() -> np.ndarray:
    return np.diag([1.0, 9.0, 230.0, 180.0])


@dataclass(frozen=True, eq=False)
class LqrWeights:
    """Quadratic state weight ``q`` (symmetric PSD) and input weight ``r > 0``."""

    q: np.ndarray = field(default_factory=_default_q)
    r: float = 1.5

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        object.__setattr__(self, "q", q)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError(f"q must be square, got shape {q.shape}")
        scale = float(np.max(np.abs(q))) if q.size else 0.0
        if np.max(np.abs(q - q.T)) > 1e-9 * (1.0 + scale):
            raise ValueError("q must be symmetric")
        if float(np.min(np.linalg.eigvalsh(q))) < -1e-12 * (1.0 + scale):
            raise ValueError("q must be positive semidefinite")
        if not (isinstance(self.r, (int, float)) and math.isfinite(self.r) and self.r > 0.0):
            raise ValueError(f"r must be positive, got {self.r!r}")


def _stabilizable(a: np.ndarray, b: np.ndarray) -> bool:
    # PBH test on the closed right half plane
    n = a.shape[0]
    eye = np.eye(n)
    for lam in np.linalg.eigvals(a):
        if lam.real < -1e-9:
            continue
        pencil = np.hstack([a - lam * eye, b]).astype(complex)
        s = np.linalg.svd(pencil, compute_uv=False)
        if s[0] == 0.0 or np.sum(s > max(pencil.shape) * 1e-12 * s[0]) < n:
            return False
    return True


def _lyapunov_solve(a_cl: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    # a_cl^T P + P a_cl = -rhs, vectorized column-major
    n = a_cl.shape[0]
    eye = np.eye(n)
    m = np.kron(eye, a_cl.T) + np.kron(a_cl.T, eye)
    p = np.linalg.solve(m, -rhs.flatten(order="F"))
    return p.reshape((n, n), order="F")


def _care_residual(a, b, q, r, p) -> float:
    return float(np.linalg.norm(a.T @ p + p @ a - p @ b @ (b.T @ p) / r + q, "fro"))


def solve_care(ss: StateSpace, weights: LqrWeights, tol: float = 1e-9,
               rde_dt: float = 1e-3, horizon_s: float = 50.0) -> np.ndarray:
    """Stabilizing solution of A'P + PA - PB(1/r)B'P + Q = 0.

    Phase one integrates the matrix Riccati flow dP/dtau = A'P + PA -
    PB(1/r)B'P + Q from P = 0 (fixed-step RK4, ``rde_dt``) until the gain it
    implies is stabilizing. Phase two polishes by Newton iteration, each
    step an exact Lyapunov solve, and demands residual <= tol. The seed
    gain can be barely stabilizing, so the early Newton steps may overshoot
    before the quadratic regime; the cap is sized for that.
    """
    a = np.asarray(ss.a, float)
    b = np.asarray(ss.b, float)
    n = a.shape[0]
    if b.ndim != 2 or b.shape != (n, 1):
        raise ValueError(f"b must be a column of height {n}, got shape {b.shape}")
    q = weights.q
    if q.shape != (n, n):
        raise ValueError(f"q shape {q.shape} does not match state dimension {n}")
    r = float(weights.r)
    if not _stabilizable(a, b):
        raise ValueError("(A, B) is not stabilizable; no stabilizing solution exists")

    g = b @ b.T / r

    def flow(p):
        return a.T @ p + p @ a - p @ g @ p + q

    def gain_stabilizes(p):
        k = (b.T @ p) / r
        return float(np.max(np.linalg.eigvals(a - b @ k).real)) < -1e-6

    p = np.zeros((n, n))
    steps = int(round(horizon_s / rde_dt))
    check_every = 100
    found = False
    for step in range(1, steps + 1):
        k1 = flow(p)
        k2 = flow(p + 0.5 * rde_dt * k1)
        k3 = flow(p + 0.5 * rde_dt * k2)
        k4 = flow(p + rde_dt * k3)
        p = p + rde_dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        p = 0.5 * (p + p.T)
        if not np.all(np.isfinite(p)):
            raise ConvergenceError("Riccati flow diverged", math.inf)
        if step % check_every == 0 and gain_stabilizes(p):
            found = True
            break
    if not found and not gain_stabilizes(p):
        raise ConvergenceError(
            f"no stabilizing gain within a {horizon_s} s Riccati sweep",
            _care_residual(a, b, q, r, p))

    for _ in range(50):
        k = (b.T @ p) / r
        a_cl = a - b @ k
        rhs = q + k.T @ (r * k)
        p = _lyapunov_solve(a_cl, rhs)
        p = 0.5 * (p + p.T)
        if _care_residual(a, b, q, r, p) <= tol:
            return p
    raise ConvergenceError("Newton polish did not reach tolerance",
                           _care_residual(a, b, q, r, p))


@dataclass(frozen=True, eq=False)
class LqrController:
    """Full-state feedback ``u = n_scale * r - k_gain . x``."""

    k_gain: np.ndarray
    n_scale: float
    tracked_output_index: int


def lqr_synthesize(ss: StateSpace, weights: LqrWeights,
                   tracked_output_index: int) -> LqrController:
    """Solve the CARE and attach the reference feedforward scale.

    ``n_scale`` is fixed so the closed loop has unit DC gain from the
    reference to the tracked state component.
    """
    p = solve_care(ss, weights)
    k = ((ss.b.T @ p) / weights.r).ravel()
    a_cl = ss.a - ss.b @ k[None, :]
    n = ss.a.shape[0]
    e_i = np.zeros(n)
    e_i[tracked_output_index] = 1.0
    dc = float(e_i @ np.linalg.solve(a_cl, ss.b[:, 0]))
    if dc == 0.0:
        raise ValueError("tracked output has no DC response; cannot scale reference")
    return LqrController(k_gain=k, n_scale=-1.0 / dc,
                         tracked_output_index=tracked_output_index)


def lqr_control(ctrl: LqrController, reference: float, state) -> float:
    return float(ctrl.n_scale * reference
                 - float(np.dot(ctrl.k_gain, np.asarray(state, float))))


class _LqrLoop:
    """State feedback about a fixed equilibrium offset."""

    def __init__(self, ctrl: LqrController, equilibrium: State):
        self._ctrl = ctrl
        self._eq = equilibrium

    def step(self, reference: float, state: State, dt_s: float) -> float:
        dev = State(*(s - e for s, e in zip(state, self._eq)))
        return lqr_control(self._ctrl, reference, dev)

    def reset(self):
        pass


def lqr_topology(ctrl: LqrController,
                 equilibrium: State = State(0.0, 0.0, 0.0, 0.0)) -> _LqrLoop:
    """Wrap a gain into the loop interface, measuring about ``equilibrium``."""
    return _LqrLoop(ctrl, equilibrium)


# ---------------------------------------------------------------- PID topologies

class _CascadeLoop:
    """Outer position PID commands velocity; inner velocity PID commands force.

    An all-zero inner gain set degrades to the single position loop, which
    is occasionally useful when retuning. Error histories are primed on the
    first call so a step reference does not produce a derivative spike.
    """

    def __init__(self, position_gains: PidGains, velocity_gains: PidGains):
        self._pos_g = position_gains
        self._vel_g = velocity_gains
        self.reset()

    def reset(self):
        self._pos_s = None
        self._vel_s = None

    def step(self, reference: float, state: State, dt_s: float) -> float:
        e_pos = reference - state.x_m
        if self._pos_s is None:
            self._pos_s = PidState(0.0, e_pos, 0.0)
        v_cmd, self._pos_s = pid_step(self._pos_g, self._pos_s, e_pos, dt_s)
        vg = self._vel_g
        if vg.kp == 0.0 and vg.ki == 0.0 and vg.kd == 0.0:
            return v_cmd
        e_vel = v_cmd - state.x_dot_ms
        if self._vel_s is None:
            self._vel_s = PidState(0.0, e_vel, 0.0)
        u, self._vel_s = pid_step(vg, self._vel_s, e_vel, dt_s)
        return u


def pid_position_topology(
        position_gains: PidGains = PidGains(0.6, 16.0, 10.0, 0.01),
        velocity_gains: PidGains = PidGains(10.0, 8.9, 0.009, 0.01)) -> _CascadeLoop:
    """Cart-position cascade for the hanging pendulum."""
    return _CascadeLoop(position_gains, velocity_gains)


class _SimultaneousLoop:
    """Angle PID and position PID act on the same force input.

    The angle loop regulates theta to zero; the position loop's output is
    subtracted, leaning the pendulum so that balancing drags the cart toward
    the reference.
    """

    def __init__(self, angle_gains: PidGains, position_gains: PidGains):
        self._ang_g = angle_gains
        self._pos_g = position_gains
        self.reset()

    def reset(self):
        self._ang_s = None
        self._pos_s = None

    def step(self, reference: float, state: State, dt_s: float) -> float:
        e_th = -state.theta_rad
        e_x = reference - state.x_m
        if self._ang_s is None:
            self._ang_s = PidState(0.0, e_th, 0.0)
            self._pos_s = PidState(0.0, e_x, 0.0)
        u_th, self._ang_s = pid_step(self._ang_g, self._ang_s, e_th, dt_s)
        u_x, self._pos_s = pid_step(self._pos_g, self._pos_s, e_x, dt_s)
        return u_th - u_x


def pid_simultaneous_topology(
        angle_gains: PidGains = PidGains(6.9, 0.009, 1.4, 0.01),
        position_gains: PidGains = PidGains(1.0, 18.0, 1.0, 0.01)) -> _SimultaneousLoop:
    """Balance-and-track loop pair for the upright pendulum."""
    return _SimultaneousLoop(angle_gains, position_gains)
