"""
reports.py — Residual records, verdicts, suite reports and their JSON form.

Everything here is JSON-serializable through `to_dict()`; complex scalars are
written as [re, im] pairs and matrices as lists of rows of such pairs.

Example:

    from utils.reports import check_relation

    r = check_relation("{c, c#} = 1", anticommutator(c, c_sharp), np.eye(2))
    r.passed, r.residual, r.tolerance
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import scipy.sparse

from utils.matops import DEFAULT_TOL, frob

SCHEMA = "phermion-lab/1"
ARTIFACT_VERSION = "0.3.0"


# ── JSON encoding ────────────────────────────────────────────────────────────

def complex_pair(z: complex) -> List[float]:
    """complex -> [re, im] with plain Python floats."""
    z = complex(z)
    return [float(z.real), float(z.imag)]


def matrix_entries(A: np.ndarray) -> List[List[List[float]]]:
    """Matrix -> rows of [re, im] pairs."""
    return [[complex_pair(z) for z in row] for row in np.asarray(A)]


def matrix_from_entries(rows: Sequence[Sequence[Sequence[float]]]) -> np.ndarray:
    """Inverse of matrix_entries. Real numbers are accepted in place of pairs."""
    out = []
    for row in rows:
        vals = []
        for e in row:
            if isinstance(e, (int, float)):
                vals.append(complex(e))
            else:
                re, im = e
                vals.append(complex(re, im))
        out.append(vals)
    return np.array(out, dtype=complex)


# ── Residuals and verdicts ───────────────────────────────────────────────────

@dataclass(frozen=True)
class RelationResidual:
    """
    One identity check.

    passed is residual <= tolerance; it is derived, never set independently.
    detail holds anything a reader needs to localise a failure (term
    breakdowns, the tuple under test, the truncation defect, ...).
    """

    name: str
    residual: float
    tolerance: float
    detail: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "relation": self.name,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass(frozen=True)
class Verdict:
    """A structured pass/fail that is not a single residual (theorem checks, counts)."""

    name: str
    passed: bool
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"verdict": self.name, "pass": bool(self.passed), "detail": self.detail}


Check = Union[RelationResidual, Verdict]


def residual_norm(A, projector: Optional[np.ndarray] = None) -> float:
    """Frobenius norm of A, or of P A P when a projector is given. A may be sparse."""
    if projector is not None:
        A = projector @ A @ projector
    return frob(A)


def check_relation(
    name: str,
    lhs: np.ndarray,
    rhs: Union[np.ndarray, complex, float],
    tol: float = DEFAULT_TOL,
    projector: Optional[np.ndarray] = None,
    detail: Optional[Dict[str, Any]] = None,
) -> RelationResidual:
    """
    Compare lhs against rhs (a matrix, or a scalar meaning scalar * I).

    The tolerance is tol * max(1, ||lhs||, ||rhs||) so that identities among
    large operators are not judged on absolute float error.
    """
    sparse = scipy.sparse.issparse(lhs) or scipy.sparse.issparse(rhs)
    if sparse:
        lhs = scipy.sparse.csr_matrix(lhs)
    else:
        lhs = np.asarray(lhs)
    if np.isscalar(rhs):
        eye = (scipy.sparse.identity(lhs.shape[0], dtype=complex, format="csr") if sparse
               else np.eye(lhs.shape[0], dtype=complex))
        rhs = complex(rhs) * eye
    rhs = scipy.sparse.csr_matrix(rhs) if sparse else np.asarray(rhs)
    if projector is not None:
        scale = max(1.0, residual_norm(lhs, projector), residual_norm(rhs, projector))
    else:
        scale = max(1.0, frob(lhs), frob(rhs))
    return RelationResidual(
        name=name,
        residual=residual_norm(lhs - rhs, projector),
        tolerance=tol * scale,
        detail=dict(detail or {}),
    )


def all_passed(checks: Sequence[Check]) -> bool:
    return all(c.passed for c in checks)


# ── Suite report ─────────────────────────────────────────────────────────────

@dataclass
class SuiteReport:
    """
    Result of one CLI command. `sections` keeps the checks grouped the way the
    table output prints them; `data` carries non-check payload (spectra,
    dimensions, the inner-product diagonal, ...).
    """

    command: str
    config: Dict[str, Any]
    sections: Dict[str, List[Check]] = field(default_factory=dict)
    data: Dict[str, Any] = field(default_factory=dict)
    wall_time_ms: float = 0.0

    def add(self, section: str, checks: Sequence[Check]) -> None:
        self.sections.setdefault(section, []).extend(checks)

    @property
    def checks(self) -> List[Check]:
        return [c for group in self.sections.values() for c in group]

    @property
    def passed(self) -> bool:
        return all_passed(self.checks)

    def counts(self) -> Dict[str, int]:
        checks = self.checks
        n_pass = sum(1 for c in checks if c.passed)
        return {"passed": n_pass, "failed": len(checks) - n_pass, "total": len(checks)}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema": SCHEMA,
            "artifactVersion": ARTIFACT_VERSION,
            "command": self.command,
            "config": self.config,
            "pass": self.passed,
            "summary": self.counts(),
            "sections": {k: [c.to_dict() for c in v] for k, v in self.sections.items()},
            "data": self.data,
            "wallTimeMs": round(float(self.wall_time_ms), 3),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)
