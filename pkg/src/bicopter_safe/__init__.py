"""Safety-constrained backstepping control of a planar bicopter.

The controller maps the bounded position/velocity safe box onto an
unconstrained space with an atanh transformation, runs a four-stage
backstepping design there, and comes back with an explicit control law whose
Lyapunov derivative is nonpositive in closed form. The simulation harness
integrates the closed loop deterministically and monitors the safety and
stability claims at every step.
"""
from ._engine import HAVE_COMPILED, active_name, available
from .ctrl import (ControlGains, ControllerConfig, ErrorStack, control_law,
                   desired_z1, error_stack, lyapunov_V, lyapunov_Vdot_closed,
                   project_force)
from .errors import (BicopterError, ConfigError, ControllerSingularityError,
                     IntegrationBlowupError, LogSchemaError, PlanGeometryError,
                     ReferenceInfeasibleError, SafeSetViolationError,
                     SimulationError)
from .model import (ControlInput, PlantParams, PlantState, eval_g2, eval_g4,
                    eval_N, eval_Ndot, plant_derivative, rotor_forces)
from .sim import (LOG_COLUMNS, MonitorReport, Scenario, ScenarioLog,
                  monitor_invariants, read_log, rk4_step, run_scenario,
                  write_log)
from .traj import (ReferenceSample, WaypointPlan, plan_octagon,
                   sample_reference, segment_profile)
from .xform import (SafeSet, TransformedState, forward_map, inverse_map,
                    transformed_drift_F1, zeta_rates)

__version__ = "0.1.0"

__all__ = [
    "BicopterError", "ConfigError", "ControlGains", "ControlInput",
    "ControllerConfig", "ControllerSingularityError", "ErrorStack",
    "HAVE_COMPILED", "IntegrationBlowupError", "LOG_COLUMNS", "LogSchemaError",
    "MonitorReport", "PlanGeometryError", "PlantParams", "PlantState",
    "ReferenceInfeasibleError", "ReferenceSample", "SafeSet",
    "SafeSetViolationError", "Scenario", "ScenarioLog", "SimulationError",
    "TransformedState", "WaypointPlan", "active_name", "available",
    "control_law", "desired_z1", "error_stack", "eval_N", "eval_Ndot",
    "eval_g2", "eval_g4", "forward_map", "inverse_map", "lyapunov_V",
    "lyapunov_Vdot_closed", "monitor_invariants", "plan_octagon",
    "plant_derivative", "project_force", "read_log", "rk4_step",
    "rotor_forces", "run_scenario", "sample_reference", "segment_profile",
    "transformed_drift_F1", "write_log", "zeta_rates",
]
