"""Declarative run descriptions in a small INI dialect.

A scenario names a plant, a controller with its gains, a simulation window
with a step reference, and one of three study conditions: ``nominal``,
``disturbance`` (uniform random force noise at the input), or
``parameter-variation`` (plant multipliers applied to the simulated cart
while the controller keeps its nominal design). Text and dataclass forms
round-trip exactly; every field has a default, so the shortest valid config
is two lines naming a controller kind.

The built-in catalog covers two studies times three controller families
times three conditions: swing the cart of a hanging pendulum to a 1 m step,
and hold an upright pendulum while the cart tracks a 0.3 m step.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, replace

import numpy as np

from .classic import (
    LqrWeights,
    PidGains,
    lqr_synthesize,
    lqr_topology,
    pid_position_topology,
    pid_simultaneous_topology,
)
from .fuzzy import FuzzySystem, term_ladder
from .hybrid import (
    AdaptiveParams,
    HybridChannel,
    hybrid_position_topology,
    hybrid_simultaneous_topology,
)
from .plant import PlantParams, State, linearize_at
from .sim import DisturbanceSpec, ReferenceSpec, SimConfig, Trajectory, run_closed_loop


class ConfigError(ValueError):
    """Unparseable, unknown, or out-of-range scenario settings."""


_CONDITIONS = ("nominal", "disturbance", "parameter-variation")
_SECTIONS = ("scenario", "plant", "controller", "sim", "disturbance")

_DEFAULT_PEAKS = tuple((k - 3) / 3.0 for k in range(7))
_DEFAULT_RULES = tuple(tuple(min(max(i + j - 3, 0), 6) for j in range(7))
                       for i in range(7))

# key -> (value kind, default); kinds: float / int / str / floats / ints
_SCENARIO_KEYS = {
    "name": ("str", "custom"),
    "condition": ("str", "nominal"),
    "initial_theta_rad": ("float", 0.0),
}
_PLANT_KEYS = {
    "cart_mass_kg": ("float", 1.2),
    "bob_mass_kg": ("float", 0.2),
    "pendulum_length_m": ("float", 0.36),
    "gravity_ms2": ("float", 9.8),
    "cart_mass_multiplier": ("float", 1.0),
    "pendulum_length_multiplier": ("float", 1.0),
}
_SIM_KEYS = {
    "dt_s": ("float", 1e-3),
    "duration_s": ("float", 40.0),
    "seed": ("int", 12345),
    "force_limit_N": ("float", None),
    "reference_amplitude": ("float", 0.3),
    "reference_step_time_s": ("float", 0.0),
}
_DISTURBANCE_KEYS = {
    "kind": ("str", "uniform_noise"),
    "amplitude_N": ("float", 0.5),
    "start_s": ("float", 0.0),
    "end_s": ("float", None),  # None resolves to the run duration
}

_CONTROLLER_SCHEMAS = {
    "lqr": {
        "q_theta": ("float", 1.0),
        "q_theta_dot": ("float", 9.0),
        "q_x": ("float", 230.0),
        "q_x_dot": ("float", 180.0),
        "r": ("float", 1.5),
        "operating_point": ("str", "upright"),
    },
    "pid-position": {
        "position_kp": ("float", 1.2),
        "position_ki": ("float", 0.5),
        "position_kd": ("float", 0.3),
        "velocity_kp": ("float", 8.0),
        "velocity_ki": ("float", 2.0),
        "velocity_kd": ("float", 0.0),
        "filter_tau_s": ("float", 0.01),
    },
    "pid-simultaneous": {
        "angle_kp": ("float", 30.0),
        "angle_ki": ("float", 0.1),
        "angle_kd": ("float", 4.0),
        "position_kp": ("float", 1.8),
        "position_ki": ("float", 0.5),
        "position_kd": ("float", 3.0),
        "filter_tau_s": ("float", 0.01),
    },
    "hybrid": {
        "channel_kp": ("float", 1.5),
        "channel_ki": ("float", 0.0),
        "channel_kd": ("float", 1.4),
        "crisp_kp": ("float", 1.2),
        "crisp_ki": ("float", 0.0),
        "crisp_kd": ("float", 0.3),
        "input1_scale": ("float", 1.0),
        "input2_scale": ("float", 1.0),
        "output_scale": ("float", 12.0),
        "gamma": ("float", 0.001),
        "safety_bound": ("float", 100.0),
        "filter_tau_s": ("float", 0.01),
        "natural_frequency_rads": ("float", 1.0),
        "damping_ratio": ("float", 0.9),
        "input1_peaks": ("floats", _DEFAULT_PEAKS),
        "input2_peaks": ("floats", _DEFAULT_PEAKS),
        "output_centers": ("floats", _DEFAULT_PEAKS),
        **{f"rule_row{i}": ("ints", _DEFAULT_RULES[i]) for i in range(7)},
    },
    "hybrid-simultaneous": {
        "angle_channel_kp": ("float", 5.0),
        "angle_channel_ki": ("float", 0.0),
        "angle_channel_kd": ("float", 1.0),
        "angle_crisp_kp": ("float", 40.0),
        "angle_crisp_ki": ("float", 0.0),
        "angle_crisp_kd": ("float", 4.0),
        "angle_input1_scale": ("float", 1.0),
        "angle_input2_scale": ("float", 1.0),
        "angle_output_scale": ("float", 8.0),
        "position_channel_kp": ("float", 3.5),
        "position_channel_ki": ("float", 0.0),
        "position_channel_kd": ("float", 3.0),
        "position_crisp_kp": ("float", 1.5),
        "position_crisp_ki": ("float", 0.0),
        "position_crisp_kd": ("float", 3.0),
        "position_input1_scale": ("float", 1.0),
        "position_input2_scale": ("float", 1.0),
        "position_output_scale": ("float", 6.0),
        "gamma": ("float", 0.001),
        "safety_bound": ("float", 100.0),
        "filter_tau_s": ("float", 0.01),
        "natural_frequency_rads": ("float", 1.0),
        "damping_ratio": ("float", 0.9),
    },
}


@dataclass(frozen=True)
class Scenario:
    name: str
    condition: str
    plant: PlantParams
    controller_kind: str
    controller_config: dict
    sim: SimConfig
    initial_theta_rad: float = 0.0
    cart_mass_multiplier: float = 1.0
    pendulum_length_multiplier: float = 1.0


def _convert(section: str, key: str, kind: str, raw: str):
    raw = raw.strip()
    if kind == "str":
        return raw
    if kind in ("float", "int"):
        caster = float if kind == "float" else int
        try:
            return caster(raw)
        except ValueError:
            raise ConfigError(
                f"[{section}] {key}: cannot parse {raw!r} as a number") from None
    # whitespace-separated vectors
    caster = float if kind == "floats" else int
    try:
        values = tuple(caster(tok) for tok in raw.split())
    except ValueError:
        raise ConfigError(
            f"[{section}] {key}: cannot parse {raw!r} as numbers") from None
    if len(values) != 7:
        raise ConfigError(f"[{section}] {key}: expected 7 values, got {len(values)}")
    return values


def _read_section(cp, section: str, schema: dict) -> dict:
    out = {key: default for key, (_, default) in schema.items()}
    if not cp.has_section(section):
        return out
    for key, raw in cp.items(section):
        if key not in schema:
            raise ConfigError(f"unknown key [{section}] {key}")
        out[key] = _convert(section, key, schema[key][0], raw)
    return out


def parse_scenario(text: str) -> Scenario:
    cp = configparser.ConfigParser(interpolation=None, strict=True)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax: {exc}") from None
    for section in cp.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")

    meta = _read_section(cp, "scenario", _SCENARIO_KEYS)
    if meta["condition"] not in _CONDITIONS:
        raise ConfigError(f"[scenario] condition must be one of {_CONDITIONS}, "
                          f"got {meta['condition']!r}")

    if not cp.has_section("controller") or not cp.has_option("controller", "kind"):
        raise ConfigError("[controller] kind is required")
    kind = cp.get("controller", "kind").strip()
    if kind not in _CONTROLLER_SCHEMAS:
        raise ConfigError(f"[controller] kind: unknown kind {kind!r}; "
                          f"valid kinds: {', '.join(sorted(_CONTROLLER_SCHEMAS))}")
    schema = _CONTROLLER_SCHEMAS[kind]
    controller_config = {key: default for key, (_, default) in schema.items()}
    for key, raw in cp.items("controller"):
        if key == "kind":
            continue
        if key not in schema:
            raise ConfigError(f"unknown key [controller] {key}")
        controller_config[key] = _convert("controller", key, schema[key][0], raw)
    if kind == "lqr" and controller_config["operating_point"] not in ("upright", "hanging"):
        raise ConfigError(f"[controller] operating_point must be 'upright' or "
                          f"'hanging', got {controller_config['operating_point']!r}")

    plant_vals = _read_section(cp, "plant", _PLANT_KEYS)
    multipliers = {key: plant_vals.pop(key)
                   for key in ("cart_mass_multiplier", "pendulum_length_multiplier")}
    for key, v in multipliers.items():
        if not (math.isfinite(v) and v > 0.0):
            raise ConfigError(f"[plant] {key} must be positive, got {v!r}")
    try:
        plant = PlantParams(**plant_vals)
    except ValueError as exc:
        raise ConfigError(f"[plant] {exc}") from None

    sim_vals = _read_section(cp, "sim", _SIM_KEYS)
    duration = sim_vals["duration_s"]
    if cp.has_section("disturbance"):
        dist_vals = _read_section(cp, "disturbance", _DISTURBANCE_KEYS)
        end = dist_vals["end_s"] if dist_vals["end_s"] is not None else duration
        dist_args = dict(kind=dist_vals["kind"], amplitude_N=dist_vals["amplitude_N"],
                         start_s=dist_vals["start_s"], end_s=end)
    elif meta["condition"] == "disturbance":
        dist_args = dict(kind="uniform_noise", amplitude_N=0.5, start_s=0.0,
                         end_s=duration)
    else:
        dist_args = dict(kind="none", amplitude_N=0.0, start_s=0.0, end_s=0.0)
    try:
        disturbance = DisturbanceSpec(**dist_args)
        reference = ReferenceSpec(amplitude=sim_vals["reference_amplitude"],
                                  step_time_s=sim_vals["reference_step_time_s"])
        sim = SimConfig(dt_s=sim_vals["dt_s"], duration_s=duration,
                        reference=reference, disturbance=disturbance,
                        seed=sim_vals["seed"], force_limit_N=sim_vals["force_limit_N"])
    except ValueError as exc:
        raise ConfigError(f"[sim] {exc}") from None

    return Scenario(name=meta["name"], condition=meta["condition"], plant=plant,
                    controller_kind=kind, controller_config=controller_config,
                    sim=sim, initial_theta_rad=meta["initial_theta_rad"],
                    cart_mass_multiplier=multipliers["cart_mass_multiplier"],
                    pendulum_length_multiplier=multipliers["pendulum_length_multiplier"])


def _format_value(kind: str, value) -> str:
    if kind == "str":
        return str(value)
    if kind == "float":
        return repr(float(value))
    if kind == "int":
        return str(int(value))
    if kind == "floats":
        return " ".join(repr(float(v)) for v in value)
    return " ".join(str(int(v)) for v in value)


def serialize_scenario(s: Scenario) -> str:
    """Config text that parses back to an equal Scenario."""
    lines = ["[scenario]",
             f"name = {s.name}",
             f"condition = {s.condition}",
             f"initial_theta_rad = {s.initial_theta_rad!r}",
             "",
             "[plant]",
             f"cart_mass_kg = {s.plant.cart_mass_kg!r}",
             f"bob_mass_kg = {s.plant.bob_mass_kg!r}",
             f"pendulum_length_m = {s.plant.pendulum_length_m!r}",
             f"gravity_ms2 = {s.plant.gravity_ms2!r}",
             f"cart_mass_multiplier = {s.cart_mass_multiplier!r}",
             f"pendulum_length_multiplier = {s.pendulum_length_multiplier!r}",
             "",
             "[controller]",
             f"kind = {s.controller_kind}"]
    schema = _CONTROLLER_SCHEMAS[s.controller_kind]
    for key, (kind, default) in schema.items():
        value = s.controller_config.get(key, default)
        lines.append(f"{key} = {_format_value(kind, value)}")
    lines += ["",
              "[sim]",
              f"dt_s = {s.sim.dt_s!r}",
              f"duration_s = {s.sim.duration_s!r}",
              f"seed = {s.sim.seed}",
              f"reference_amplitude = {s.sim.reference.amplitude!r}",
              f"reference_step_time_s = {s.sim.reference.step_time_s!r}"]
    if s.sim.force_limit_N is not None:
        lines.append(f"force_limit_N = {s.sim.force_limit_N!r}")
    d = s.sim.disturbance
    if d.kind != "none":
        lines += ["",
                  "[disturbance]",
                  f"kind = {d.kind}",
                  f"amplitude_N = {d.amplitude_N!r}",
                  f"start_s = {d.start_s!r}",
                  f"end_s = {d.end_s!r}"]
    return "\n".join(lines) + "\n"


def effective_plant(s: Scenario) -> PlantParams:
    """The simulated plant: multipliers apply only under parameter variation."""
    if s.condition != "parameter-variation":
        return s.plant
    return replace(s.plant,
                   cart_mass_kg=s.plant.cart_mass_kg * s.cart_mass_multiplier,
                   pendulum_length_m=s.plant.pendulum_length_m * s.pendulum_length_multiplier)


def _build_channel(cc: dict, prefix: str = "") -> HybridChannel:
    def get(key):
        return cc[prefix + key] if prefix + key in cc else cc[key]

    if "input1_peaks" in cc:
        system = FuzzySystem(
            input1_terms=term_ladder(cc["input1_peaks"]),
            input2_terms=term_ladder(cc["input2_peaks"]),
            output_centers=tuple(float(v) for v in cc["output_centers"]),
            rule_table=tuple(tuple(int(v) for v in cc[f"rule_row{i}"]) for i in range(7)),
            input1_scale=get("input1_scale"),
            input2_scale=get("input2_scale"),
            output_scale=get("output_scale"))
    else:
        system = FuzzySystem(
            input1_terms=term_ladder(_DEFAULT_PEAKS),
            input2_terms=term_ladder(_DEFAULT_PEAKS),
            output_centers=_DEFAULT_PEAKS,
            rule_table=_DEFAULT_RULES,
            input1_scale=get("input1_scale"),
            input2_scale=get("input2_scale"),
            output_scale=get("output_scale"))
    gamma = cc["gamma"]
    adaptive = AdaptiveParams(gamma_p=gamma, gamma_i=gamma, gamma_d=gamma,
                              gamma_prime=gamma)
    tau = cc["filter_tau_s"]
    return HybridChannel(
        channel_gains=PidGains(get("channel_kp"), get("channel_ki"),
                               get("channel_kd"), tau),
        crisp_gains=PidGains(get("crisp_kp"), get("crisp_ki"), get("crisp_kd"), tau),
        fuzzy_system=system,
        adaptive=adaptive,
        safety_bound=cc["safety_bound"],
        natural_frequency_rads=cc["natural_frequency_rads"],
        damping_ratio=cc["damping_ratio"])


def build_controller(s: Scenario):
    """Instantiate the scenario's control loop against the nominal plant.

    Parameter variation deliberately never reaches this function: gains and
    LQR synthesis always use the nominal plant, and only the simulated
    dynamics drift.
    """
    cc = s.controller_config
    kind = s.controller_kind
    try:
        if kind == "lqr":
            weights = LqrWeights(q=np.diag([cc["q_theta"], cc["q_theta_dot"],
                                            cc["q_x"], cc["q_x_dot"]]), r=cc["r"])
            theta_e = 0.0 if cc["operating_point"] == "upright" else math.pi
            ss = linearize_at(s.plant, theta_e)
            ctrl = lqr_synthesize(ss, weights, tracked_output_index=2)
            return lqr_topology(ctrl, equilibrium=State(theta_e, 0.0, 0.0, 0.0))
        if kind == "pid-position":
            tau = cc["filter_tau_s"]
            return pid_position_topology(
                position_gains=PidGains(cc["position_kp"], cc["position_ki"],
                                        cc["position_kd"], tau),
                velocity_gains=PidGains(cc["velocity_kp"], cc["velocity_ki"],
                                        cc["velocity_kd"], tau))
        if kind == "pid-simultaneous":
            tau = cc["filter_tau_s"]
            return pid_simultaneous_topology(
                angle_gains=PidGains(cc["angle_kp"], cc["angle_ki"],
                                     cc["angle_kd"], tau),
                position_gains=PidGains(cc["position_kp"], cc["position_ki"],
                                        cc["position_kd"], tau))
        if kind == "hybrid":
            return hybrid_position_topology(_build_channel(cc))
        if kind == "hybrid-simultaneous":
            return hybrid_simultaneous_topology(_build_channel(cc, "angle_"),
                                                _build_channel(cc, "position_"))
    except ValueError as exc:
        raise ConfigError(f"[controller] {exc}") from None
    raise ConfigError(f"[controller] kind: unknown kind {kind!r}")


def run_scenario(s: Scenario) -> Trajectory:
    controller = build_controller(s)
    plant = effective_plant(s)
    initial = State(s.initial_theta_rad, 0.0, 0.0, 0.0)
    return run_closed_loop(plant, controller, s.sim, initial_state=initial)


def _catalog_text():
    """Config text for the built-in study matrix; parsed on demand."""
    texts = {}
    cart_kind = {"pid": "pid-position", "lqr": "lqr", "hybrid": "hybrid"}
    sim_kind = {"pid": "pid-simultaneous", "lqr": "lqr",
                "hybrid": "hybrid-simultaneous"}
    for family in ("pid", "lqr", "hybrid"):
        for condition in _CONDITIONS:
            name = f"cart-position-{family}-{condition}"
            lines = ["[scenario]", f"name = {name}", f"condition = {condition}",
                     f"initial_theta_rad = {math.pi!r}", "",
                     "[controller]", f"kind = {cart_kind[family]}"]
            if family == "lqr":
                lines.append("operating_point = hanging")
            lines += ["", "[sim]", "reference_amplitude = 1.0"]
            if family == "pid" and condition == "parameter-variation":
                lines.append("duration_s = 120.0")
            if condition == "parameter-variation":
                lines += ["", "[plant]", "cart_mass_multiplier = 1.2"]
            texts[name] = "\n".join(lines) + "\n"

            name = f"simultaneous-{family}-{condition}"
            lines = ["[scenario]", f"name = {name}", f"condition = {condition}", "",
                     "[controller]", f"kind = {sim_kind[family]}"]
            if condition == "parameter-variation":
                lines += ["", "[plant]", "cart_mass_multiplier = 1.15",
                          "pendulum_length_multiplier = 1.05"]
            texts[name] = "\n".join(lines) + "\n"
    return texts


def builtin_scenarios() -> dict:
    """Name -> Scenario for the full study matrix (18 runs)."""
    return {name: parse_scenario(text) for name, text in _catalog_text().items()}
