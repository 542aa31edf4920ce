"""Cart-pendulum control study: plant, controllers, simulation, metrics.

The package compares three controller families on the same nonlinear
pendulum-on-a-cart plant: cascade/simultaneous PID, LQR state feedback
with reference feedforward, and a hybrid model-reference adaptive fuzzy
PI-D. Scenario configs drive deterministic closed-loop runs; metrics and
a CLI turn them into comparable reports.
"""

from .classic import (
    ConvergenceError,
    LqrController,
    LqrWeights,
    PidGains,
    PidState,
    lqr_control,
    lqr_synthesize,
    lqr_topology,
    pid_position_topology,
    pid_simultaneous_topology,
    pid_step,
    solve_care,
)
from .fuzzy import (
    FuzzySystem,
    MembershipFunction,
    fuzzy_infer,
    fuzzify,
    standard_fuzzy_system,
    term_ladder,
)
from .hybrid import (
    AdaptiveParams,
    HybridChannel,
    ReferenceModel,
    hybrid_control_step,
    hybrid_position_topology,
    hybrid_simultaneous_topology,
    mit_rule_update,
    reference_model_step,
)
from .metrics import (
    Metrics,
    compute_metrics,
    overshoot_pct,
    settling_time,
    steady_state_error,
    summarize,
)
from .plant import (
    PlantParams,
    State,
    StateSpace,
    SystemAssessment,
    assess,
    linearize,
    linearize_at,
    mechanical_energy,
    nonlinear_derivative,
)
from .scenario import (
    ConfigError,
    Scenario,
    build_controller,
    builtin_scenarios,
    effective_plant,
    parse_scenario,
    run_scenario,
    serialize_scenario,
)
from .sim import (
    DisturbanceSpec,
    ReferenceSpec,
    SimConfig,
    SimulationFault,
    Trajectory,
    run_closed_loop,
)

__version__ = "0.1.0"
