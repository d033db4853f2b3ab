"""
config.py

Run configuration for the phermion-lab command line.

- Module-level defaults (tolerance, seed, truncation, ell range).
- RunConfig: a frozen dataclass built once from argparse flags and handed to
  the suites; nothing downstream reads flags or the environment directly.
- PHERMION_SEED in the environment overrides --seed.
- parse_eta_spec turns an --eta string into a metric matrix:

      identity            2x2 identity
      sigma3              diag(1, -1)
      diag:4,1            diag(4, 1)  (any length)
      file:metric.json    JSON list of rows; entries are numbers or [re, im]

Example usage:

    from utils.config import RunConfig, parse_eta_spec

    cfg = RunConfig(command="oscillator", kind="boson-phermion", eta_spec="diag:4,1")
    eta = parse_eta_spec(cfg.eta_spec)
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np

from utils.errors import ConfigError
from utils.matops import DEFAULT_SEED, DEFAULT_TOL
from utils.reports import matrix_from_entries

DEFAULT_TRUNCATION = 8
DEFAULT_E = 1.0
DEFAULT_ELL = 3
ELL_MIN, ELL_MAX = 2, 12
TRUNCATION_MIN = 2

SEED_ENV_VAR = "PHERMION_SEED"

SPECIES = ("boson", "fermion", "phermion", "abnormal-phermion")
KINDS = ("boson-fermion", "boson-phermion", "boson-abnormal-phermion")
COMMANDS = ("verify-algebra", "oscillator", "multi", "lie", "all")
FORMATS = ("table", "json")


# ----------------------------
# Helpers
# ----------------------------


def seed_from_env(default: int) -> int:
    """PHERMION_SEED wins over the flag; accepts decimal or 0x-prefixed hex."""
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw.strip() == "":
        return default
    try:
        seed = int(raw.strip(), 0)
    except ValueError:
        raise ConfigError(f"{SEED_ENV_VAR}={raw!r} is not an integer")
    if seed < 0:
        raise ConfigError(f"{SEED_ENV_VAR} must be non-negative, got {seed}")
    return seed


def _parse_diag(body: str) -> np.ndarray:
    parts = [p for p in body.replace(" ", "").split(",") if p]
    if not parts:
        raise ConfigError("diag: needs at least one entry, e.g. diag:4,1")
    try:
        vals = [complex(p.replace("i", "j")) for p in parts]
    except ValueError:
        raise ConfigError(f"could not parse diag entries {body!r}")
    return np.diag(np.array(vals, dtype=complex))


def _load_matrix_file(path: str) -> np.ndarray:
    if not os.path.exists(path):
        raise ConfigError(f"metric file not found: {path}")
    try:
        with open(path, encoding="utf-8") as f:
            rows = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"metric file {path} is not valid JSON: {e}")
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ConfigError(f"metric file {path} must hold a list of rows")
    if any(len(r) != len(rows) for r in rows):
        raise ConfigError(f"metric file {path} does not hold a square matrix")
    try:
        return matrix_from_entries(rows)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"metric file {path}: bad entry ({e})")


def parse_eta_spec(spec: str) -> np.ndarray:
    """
    Parse an --eta value into a complex matrix.

    Only the format is validated here; Hermiticity and invertibility are
    checked when the matrix is turned into a MetricOperator.
    """
    if spec is None:
        raise ConfigError("empty --eta spec")
    s = spec.strip()
    if s == "identity":
        return np.eye(2, dtype=complex)
    if s == "sigma3":
        return np.diag([1.0, -1.0]).astype(complex)
    if s.startswith("diag:"):
        return _parse_diag(s[len("diag:"):])
    if s.startswith("file:"):
        return _load_matrix_file(s[len("file:"):])
    raise ConfigError(
        f"unknown --eta spec {spec!r} (expected identity, sigma3, diag:<a,b,...> or file:<path>)"
    )


# ----------------------------
# RunConfig
# ----------------------------


@dataclass(frozen=True)
class RunConfig:
    command: str
    species: str = "fermion"
    kind: str = "boson-fermion"
    eta_spec: Optional[str] = None
    E: Optional[float] = None
    truncation: int = DEFAULT_TRUNCATION
    ell: int = DEFAULT_ELL
    epsilon: int = 1
    tolerance: float = DEFAULT_TOL
    seed: int = DEFAULT_SEED
    output_format: str = "table"
    verbose: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.species not in SPECIES:
            raise ConfigError(f"unknown species {self.species!r} (one of {', '.join(SPECIES)})")
        if self.kind not in KINDS:
            raise ConfigError(f"unknown oscillator kind {self.kind!r} (one of {', '.join(KINDS)})")
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance must be positive, got {self.tolerance}")
        if self.truncation < TRUNCATION_MIN:
            raise ConfigError(f"truncation must be >= {TRUNCATION_MIN}, got {self.truncation}")
        if not ELL_MIN <= self.ell <= ELL_MAX:
            raise ConfigError(f"ell must lie in [{ELL_MIN}, {ELL_MAX}], got {self.ell}")
        if self.epsilon not in (1, -1):
            raise ConfigError(f"epsilon must be +1 or -1, got {self.epsilon}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"unknown output format {self.output_format!r}")

    @property
    def energy(self) -> float:
        """E with its per-kind default: -1 for the abnormal oscillator, +1 otherwise."""
        if self.E is not None:
            return float(self.E)
        return -DEFAULT_E if self.kind == "boson-abnormal-phermion" else DEFAULT_E

    def to_dict(self) -> Dict[str, Any]:
        """Config echo for reports (only the fields the command uses)."""
        d = asdict(self)
        d["E"] = self.energy
        keep = {
            "verify-algebra": ("species", "eta_spec", "truncation"),
            "oscillator": ("kind", "eta_spec", "E", "truncation"),
            "multi": ("ell",),
            "lie": ("epsilon",),
            "all": ("truncation", "seed"),
        }[self.command]
        out = {"command": self.command}
        out.update({k: d[k] for k in keep})
        out.update({"tolerance": self.tolerance, "seed": self.seed})
        return out
