import json

import pytest

import dcosp


def test_presets_and_solvers():
    assert "tiny" in dcosp.preset_names()
    assert dcosp.solver_names() == ["d-nss", "0-nss", "d-dsa", "0-dsa", "greedy", "random"]
    assert dcosp.preset_config("tiny")["preset"] == "tiny"


def test_generate_is_deterministic():
    a = dcosp.generate("tiny", 0)
    b = dcosp.generate("tiny", 0)
    assert a.to_json() == b.to_json()
    assert a.agents == 8
    assert a.instances >= 1
    assert a.ever_active <= a.requests


def test_scenario_round_trip(tmp_path):
    s = dcosp.generate("tiny", 1)
    path = tmp_path / "s.json"
    s.save(str(path))
    assert dcosp.load_scenario(str(path)).to_json() == s.to_json()
    assert dcosp.scenario_from_dict(json.loads(s.to_json())).to_json() == s.to_json()


def test_run_is_bounded_by_optimum_and_verifies():
    s = dcosp.generate("tiny", 2)
    best = dcosp.optimum(s)
    assert best["proven"]
    params = dcosp.default_params("tiny")
    for solver in dcosp.solver_names():
        record = dcosp.run(s, solver, params)
        assert record["metrics"]["dynamic_utility"] <= best["value"]
        assert dcosp.verify_run(s, record) == []
    greedy = dcosp.run(s, "greedy")
    assert greedy["metrics"]["ledger"]["total_bytes"] == 0


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        dcosp.preset_config("nonexistent")
    config = dcosp.preset_config("tiny")
    config["p_u"] = 1.5
    with pytest.raises(ValueError):
        dcosp.generate(config)
    with pytest.raises(ValueError):
        dcosp.run(dcosp.generate("tiny", 0), "nope")
