"""Python access to the dcosp scenario generator, solvers and oracles."""

import json

from . import _dcosp
from ._dcosp import (
    GenerationError,
    Scenario,
    SolverInvariantError,
    StructuralError,
    load_scenario,
    preset_names,
    solver_names,
)

__all__ = [
    "GenerationError",
    "Scenario",
    "SolverInvariantError",
    "StructuralError",
    "default_params",
    "generate",
    "load_scenario",
    "optimum",
    "preset_config",
    "preset_names",
    "run",
    "scenario_from_dict",
    "solver_names",
    "verify_run",
]


def preset_config(name):
    return json.loads(_dcosp.preset_config(name))


def _config_text(config):
    if isinstance(config, str):
        return _dcosp.preset_config(config)
    return json.dumps(config)


def generate(config="tiny", index=0):
    """Scenario `index` of a preset name or a config dict."""
    return _dcosp.generate(_config_text(config), index)


def scenario_from_dict(data):
    return _dcosp.scenario_from_json(json.dumps(data))


def default_params(config="tiny"):
    return json.loads(_dcosp.default_params(_config_text(config)))


def run(scenario, solver, params=None):
    """Runs one solver over every instance; returns the run record as a dict."""
    text = "" if params is None else json.dumps(params)
    return json.loads(_dcosp.run(scenario, solver, text))


def verify_run(scenario, record):
    """Problems found when replaying a stored run record (empty if consistent)."""
    return _dcosp.verify_run(scenario, json.dumps(record))


def optimum(scenario, method="bnb", node_budget=20_000_000, swo_rounds=50):
    return json.loads(_dcosp.optimum(scenario, method, node_budget, swo_rounds))
