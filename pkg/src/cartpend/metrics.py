"""Step-response quality measures and run summaries.

Settling uses a two percent band around the reference (absolute when the
reference is zero) and reports the first time after which the signal never
leaves the band again. Overshoot is the peak excursion past the reference
in percent of the reference magnitude; for a zero reference it is the
excursion past the initial magnitude, so a regulated state that only decays
scores zero. Steady-state error averages the reference minus the signal
over the final tail of the record.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sim import Trajectory


def settling_time(times_s, values, reference: float,
                  band_fraction: float = 0.02) -> float:
    """Time after which |value - reference| stays inside the band.

    The band is ``band_fraction * |reference|``, or ``band_fraction`` as an
    absolute width when the reference is zero. Returns ``times_s[0]`` offset
    zero when the signal never leaves the band and ``inf`` when the final
    sample is still outside.
    """
    times_s = np.asarray(times_s, dtype=float)
    values = np.asarray(values, dtype=float)
    if times_s.shape != values.shape or times_s.ndim != 1 or times_s.size == 0:
        raise ValueError("times and values must be equal-length 1-D arrays")
    if not (0.0 < band_fraction < 1.0):
        raise ValueError(f"band_fraction must be in (0, 1), got {band_fraction!r}")
    band = band_fraction * abs(reference) if reference != 0.0 else band_fraction
    outside = np.abs(values - reference) > band
    if outside[-1]:
        return math.inf
    if not outside.any():
        return 0.0
    last_out = int(np.flatnonzero(outside)[-1])
    return float(times_s[last_out + 1])


def overshoot_pct(values, reference: float) -> float:
    """Peak excursion past the reference, percent of reference magnitude.

    For a zero reference the baseline is the initial magnitude, so the
    number measures whether the transient ever grew beyond where it
    started; an all-zero record scores zero.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("values must be a non-empty 1-D array")
    if reference > 0.0:
        excess = float(np.max(values)) - reference
    elif reference < 0.0:
        excess = reference - float(np.min(values))
    else:
        baseline = abs(float(values[0]))
        if baseline == 0.0:
            return 0.0
        return max(0.0, 100.0 * (float(np.max(np.abs(values))) - baseline) / baseline)
    return max(0.0, 100.0 * excess / abs(reference))


def steady_state_error(values, reference: float, tail_fraction: float = 0.1) -> float:
    """Mean of (reference - value) over the trailing fraction of the record."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("values must be a non-empty 1-D array")
    if not (0.0 < tail_fraction <= 1.0):
        raise ValueError(f"tail_fraction must be in (0, 1], got {tail_fraction!r}")
    tail = max(1, int(round(tail_fraction * values.size)))
    return float(np.mean(reference - values[-tail:]))


@dataclass(frozen=True)
class Metrics:
    settled: bool
    settling_time_s: float
    overshoot_pct: float
    steady_state_error: float


def compute_metrics(times_s, values, reference: float) -> Metrics:
    s = settling_time(times_s, values, reference)
    return Metrics(settled=math.isfinite(s), settling_time_s=s,
                   overshoot_pct=overshoot_pct(values, reference),
                   steady_state_error=steady_state_error(values, reference))


@dataclass(frozen=True)
class Report:
    """Per-controller metrics for one scenario, renderable as text or CSV."""

    scenario_label: str
    entries: tuple

    def to_text(self) -> str:
        lines = [f"scenario {self.scenario_label}"]
        for name, m in self.entries:
            settle = f"{m.settling_time_s:.4g} s" if m.settled else "not settled"
            lines.append(f"  {name}: settling {settle}, "
                         f"overshoot {m.overshoot_pct:.4g}%, "
                         f"sse {m.steady_state_error:.4g}")
        ratio = self._settling_ratio()
        if ratio is not None:
            lines.append(f"  hybrid/pid settling ratio: {ratio}%")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = ["controller,scenario,settling_s,overshoot_pct,sse"]
        for name, m in self.entries:
            lines.append(f"{name},{self.scenario_label},{m.settling_time_s:.6g},"
                         f"{m.overshoot_pct:.6g},{m.steady_state_error:.6g}")
        return "\n".join(lines) + "\n"

    def _settling_ratio(self):
        hybrid = next((m for name, m in self.entries if "hybrid" in name), None)
        pid = next((m for name, m in self.entries if "pid" in name), None)
        if hybrid is None or pid is None:
            return None
        if not (hybrid.settled and pid.settled and pid.settling_time_s > 0.0):
            return None
        return round(100.0 * hybrid.settling_time_s / pid.settling_time_s)


def summarize(rows, scenario_label: str) -> Report:
    """Metrics for (name, Trajectory) pairs, judged on cart position."""
    entries = []
    for name, traj in rows:
        if not isinstance(traj, Trajectory):
            raise TypeError(f"expected Trajectory for {name!r}")
        reference = float(traj.references[-1])
        entries.append((name, compute_metrics(traj.times_s, traj.states[:, 2], reference)))
    return Report(scenario_label=scenario_label, entries=tuple(entries))
