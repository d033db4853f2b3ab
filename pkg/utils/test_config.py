"""Tests for utils/config.py."""

from __future__ import annotations

import json

import numpy as np
import pytest

from utils.config import SEED_ENV_VAR, RunConfig, parse_eta_spec, seed_from_env
from utils.errors import ConfigError


@pytest.mark.parametrize("spec,expected", [
    ("identity", np.eye(2)),
    ("sigma3", np.diag([1.0, -1.0])),
    ("diag:4,1", np.diag([4.0, 1.0])),
    (" diag: 2, -3 ", np.diag([2.0, -3.0])),
])
def test_parse_eta_spec(spec, expected):
    np.testing.assert_allclose(parse_eta_spec(spec), expected)


def test_parse_eta_file(tmp_path):
    path = tmp_path / "eta.json"
    path.write_text(json.dumps([[2, [1, 1]], [[1, -1], 2]]))
    np.testing.assert_allclose(parse_eta_spec(f"file:{path}"), [[2, 1 + 1j], [1 - 1j, 2]])


@pytest.mark.parametrize("spec", ["", "diag:", "diag:x,1", "hermitian", "file:/nonexistent/eta.json"])
def test_parse_eta_spec_rejects(spec):
    with pytest.raises(ConfigError):
        parse_eta_spec(spec)


def test_parse_eta_file_rejects_ragged(tmp_path):
    path = tmp_path / "eta.json"
    path.write_text("[[1, 0], [0]]")
    with pytest.raises(ConfigError):
        parse_eta_spec(f"file:{path}")


def test_seed_from_env(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    assert seed_from_env(5) == 5
    monkeypatch.setenv(SEED_ENV_VAR, "0x10")
    assert seed_from_env(5) == 16
    monkeypatch.setenv(SEED_ENV_VAR, "seven")
    with pytest.raises(ConfigError):
        seed_from_env(5)


@pytest.mark.parametrize("changes", [
    {"command": "plot"},
    {"species": "gluon"},
    {"tolerance": 0.0},
    {"truncation": 1},
    {"ell": 13},
    {"epsilon": 0},
    {"seed": -1},
    {"output_format": "yaml"},
])
def test_run_config_validation(changes):
    fields = {"command": "lie", **changes}
    with pytest.raises(ConfigError):
        RunConfig(**fields)


def test_energy_default_depends_on_kind():
    assert RunConfig(command="oscillator").energy == 1.0
    assert RunConfig(command="oscillator", kind="boson-abnormal-phermion").energy == -1.0
    assert RunConfig(command="oscillator", E=2.5).energy == 2.5


def test_config_echo_is_per_command():
    echo = RunConfig(command="multi", ell=4, seed=9).to_dict()
    assert echo == {"command": "multi", "ell": 4, "tolerance": 1e-10, "seed": 9}
