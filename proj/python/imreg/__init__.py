"""Python bindings for the imreg internal-model regulator library."""

from ._imreg import (
    RegulatorConfig,
    Scenario,
    ScenarioError,
    bode,
    bound_constants,
    certify,
    example_scenario,
    high_gain_scenario,
    load_scenario,
    log_grid,
    parse_scenario,
    run_cli,
    simulate,
    transfer_gain,
    transfer_gain_resolvent,
)

__all__ = [
    "RegulatorConfig",
    "Scenario",
    "ScenarioError",
    "bode",
    "bound_constants",
    "certify",
    "example_scenario",
    "high_gain_scenario",
    "load_scenario",
    "log_grid",
    "parse_scenario",
    "run_cli",
    "simulate",
    "transfer_gain",
    "transfer_gain_resolvent",
]
