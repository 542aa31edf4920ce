"""Cart-pole rig: nonlinear dynamics, equilibrium linearizations, system checks.

State is ``(theta, theta_dot, x, x_dot)``. ``theta`` is the pendulum angle
measured from the upright vertical, with positive ``theta`` leaning the bob
toward negative ``x``; ``x`` is the cart position along the rail. ``theta = 0``
is the unstable balance point, ``theta = pi`` hangs at rest. A horizontal
force on the cart is the single input.

With cart mass M, bob mass m, rod length l and gravity g, the accelerations
solve the coupled Euler-Lagrange pair

    thetadd = ((M + m) g sin(theta) + cos(theta) (F - m l thetadot^2 sin(theta))) / den
    xdd     = l (F - m l thetadot^2 sin(theta) + m g sin(theta) cos(theta)) / den
    den     = l (M + m) - m l cos(theta)^2

which keeps total energy invariant at F = 0 (pointwise dE/dt = F xdot).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class State(NamedTuple):
    theta_rad: float
    theta_dot_rads: float
    x_m: float
    x_dot_ms: float


@dataclass(frozen=True)
class PlantParams:
    """Physical constants of the rig. All strictly positive."""

    cart_mass_kg: float = 1.2
    bob_mass_kg: float = 0.2
    pendulum_length_m: float = 0.36
    gravity_ms2: float = 9.8

    def __post_init__(self):
        for name in ("cart_mass_kg", "bob_mass_kg", "pendulum_length_m", "gravity_ms2"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")


@dataclass(frozen=True, eq=False)
class StateSpace:
    """Continuous-time (A, B, C, D) quadruple; arrays are not aliased by callers."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray


@dataclass(frozen=True)
class SystemAssessment:
    controllable: bool
    observable: bool
    stable: bool
    open_loop_poles: tuple


def nonlinear_derivative(params: PlantParams, state: State, force_N: float) -> State:
    """Exact state derivative under a horizontal cart force.

    Raises ValueError when the state or force is not finite; blowing up
    silently inside an integrator hides controller faults.
    """
    if not all(math.isfinite(v) for v in state):
        raise ValueError(f"non-finite state {tuple(state)}")
    if not math.isfinite(force_N):
        raise ValueError(f"non-finite force {force_N!r}")

    m_cart = params.cart_mass_kg
    m_bob = params.bob_mass_kg
    length = params.pendulum_length_m
    g = params.gravity_ms2

    th, thd, _, xd = state
    sin_th = math.sin(th)
    cos_th = math.cos(th)
    den = length * (m_cart + m_bob) - m_bob * length * cos_th * cos_th
    centripetal = force_N - m_bob * length * thd * thd * sin_th
    thetadd = ((m_cart + m_bob) * g * sin_th + cos_th * centripetal) / den
    xdd = length * (centripetal + m_bob * g * sin_th * cos_th) / den
    return State(thd, thetadd, xd, xdd)


def mechanical_energy(params: PlantParams, state: State) -> float:
    """Kinetic plus potential energy; conserved exactly at zero force."""
    m_cart = params.cart_mass_kg
    m_bob = params.bob_mass_kg
    length = params.pendulum_length_m
    g = params.gravity_ms2
    th, thd, _, xd = state
    kinetic = (0.5 * (m_cart + m_bob) * xd * xd
               - m_bob * length * math.cos(th) * xd * thd
               + 0.5 * m_bob * length * length * thd * thd)
    potential = m_bob * g * length * math.cos(th)
    return kinetic + potential


def linearize_at(params: PlantParams, theta_eq_rad: float) -> StateSpace:
    """Jacobian model about an unforced equilibrium (any multiple of pi).

    The angle coupling flips sign between the upright and hanging points
    while the cart coupling does not: d(xdd)/d(theta) carries cos(2 theta_e).
    """
    if abs(math.sin(theta_eq_rad)) > 1e-9:
        raise ValueError(
            f"theta = {theta_eq_rad!r} is not an unforced equilibrium; "
            "only multiples of pi qualify")
    m_cart = params.cart_mass_kg
    m_bob = params.bob_mass_kg
    length = params.pendulum_length_m
    g = params.gravity_ms2
    cos_e = math.cos(theta_eq_rad)

    a = np.zeros((4, 4))
    a[0, 1] = 1.0
    a[2, 3] = 1.0
    a[1, 0] = (m_cart + m_bob) * g * cos_e / (m_cart * length)
    a[3, 0] = m_bob * g * math.cos(2.0 * theta_eq_rad) / m_cart
    b = np.zeros((4, 1))
    b[1, 0] = cos_e / (m_cart * length)
    b[3, 0] = 1.0 / m_cart
    return StateSpace(a=a, b=b, c=np.eye(4), d=np.zeros((4, 1)))


def linearize(params: PlantParams) -> StateSpace:
    """Upright small-signal model; the balance task lives here."""
    return linearize_at(params, 0.0)


def _rank(mat: np.ndarray) -> int:
    s = np.linalg.svd(mat, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > max(mat.shape) * 1e-12 * s[0]))


def assess(ss: StateSpace) -> SystemAssessment:
    """Kalman rank checks and open-loop poles for a state-space model."""
    a, b, c = ss.a, ss.b, ss.c
    n = a.shape[0]
    blocks = [b]
    for _ in range(n - 1):
        blocks.append(a @ blocks[-1])
    ctrb = np.hstack(blocks)
    blocks = [c]
    for _ in range(n - 1):
        blocks.append(blocks[-1] @ a)
    obsv = np.vstack(blocks)
    poles = np.linalg.eigvals(a)
    return SystemAssessment(
        controllable=_rank(ctrb) == n,
        observable=_rank(obsv) == n,
        stable=bool(np.all(poles.real < 0.0)),
        open_loop_poles=tuple(poles),
    )
