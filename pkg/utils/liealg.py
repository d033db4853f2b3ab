"""
liealg.py — J operators of the unified two-level algebra and their Lie brackets.

    J1 = (c + c#) / 2,   J2 = (c - c#) / (2i),   J3 = 1/2 - N

For eps = +1 (fermion, eta = 1) the brackets close on su(2); for eps = -1
(abnormal phermion, eta = sigma3) on su(1,1):

    [Ji, Jj] = i sum_k delta_k eps_ijk Jk,   delta = (1, 1, 1) or (1, 1, -1)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import numpy as np

from utils import algebra, matops
from utils.algebra import LadderRep
from utils.errors import ConfigError
from utils.matops import DEFAULT_TOL
from utils.reports import Check, RelationResidual, Verdict, check_relation, complex_pair

BRACKETS = ((1, 2, 3), (2, 3, 1), (3, 1, 2))

ALGEBRA_NAMES = {1: "su(2)", -1: "su(1,1)"}


@dataclass(frozen=True)
class JTriple:
    epsilon: int
    J: Tuple[np.ndarray, np.ndarray, np.ndarray]
    delta: Tuple[int, int, int]
    rep: LadderRep

    @property
    def algebra_name(self) -> str:
        return ALGEBRA_NAMES[self.epsilon]

    def __getitem__(self, k: int) -> np.ndarray:
        """1-based generator access: t[3] is J3."""
        return self.J[k - 1]


def build_j_triple(epsilon: int) -> JTriple:
    if epsilon not in (1, -1):
        raise ConfigError(f"epsilon must be +1 or -1, got {epsilon!r}")
    rep = algebra.make_fermion() if epsilon == 1 else algebra.make_abnormal_phermion()
    c, cs = rep.c, rep.c_star
    J1 = (c + cs) / 2
    J2 = (c - cs) / 2j
    J3 = np.eye(2) / 2 - rep.n
    delta = (1, 1, 1) if epsilon == 1 else (1, 1, -1)
    return JTriple(epsilon=epsilon, J=(J1, J2, J3), delta=delta, rep=rep)


def verify_brackets(t: JTriple, tol: float = DEFAULT_TOL) -> List[RelationResidual]:
    """[Ji, Jj] = i delta_k Jk for the three cyclic (i, j, k)."""
    out = []
    for i, j, k in BRACKETS:
        sign = "" if t.delta[k - 1] > 0 else "-"
        out.append(check_relation(
            f"[J{i}, J{j}] = {sign}i J{k}",
            matops.commutator(t[i], t[j]), 1j * t.delta[k - 1] * t[k], tol,
            detail={"ij": [i, j], "expectedK": k, "coefficient": complex_pair(1j * t.delta[k - 1])},
        ))
    return out


def casimir(t: JTriple) -> np.ndarray:
    """J1^2 + J2^2 + delta_3 J3^2 (3/4 for su(2), -3/4 for su(1,1) in these reps)."""
    return t[1] @ t[1] + t[2] @ t[2] + t.delta[2] * (t[3] @ t[3])


def casimir_checks(t: JTriple, tol: float = DEFAULT_TOL) -> List[Check]:
    """Supplementary: the Casimir is scalar, positive for su(2) and negative for su(1,1)."""
    C = casimir(t)
    value = complex(np.trace(C) / C.shape[0])
    return [
        check_relation("Casimir is a multiple of 1", C, value, tol,
                       detail={"value": complex_pair(value), "supplementary": True}),
        Verdict(f"Casimir sign matches {t.algebra_name}", np.sign(value.real) == t.epsilon,
                {"value": complex_pair(value), "supplementary": True}),
    ]


def hermiticity_profile(t: JTriple, tol: float = DEFAULT_TOL) -> List[Dict[str, Any]]:
    """Per generator: is it #-Hermitian (w.r.t. the species metric) and is it Hermitian."""
    out = []
    for k in (1, 2, 3):
        Jk = t[k]
        out.append({
            "generator": f"J{k}",
            "sharpHermitian": check_relation("", algebra.pseudo_adjoint(Jk, t.rep.eta), Jk, tol).passed,
            "hermitian": matops.is_hermitian(Jk, tol),
        })
    return out


def hermiticity_checks(t: JTriple, tol: float = DEFAULT_TOL) -> List[Check]:
    """
    Every Jk is #-Hermitian. For eps = -1, J1 and J2 are not Hermitian in the
    ordinary sense (they are anti-Hermitian), which is checked as well.
    """
    out: List[Check] = [
        check_relation(f"J{k}# = J{k}", algebra.pseudo_adjoint(t[k], t.rep.eta), t[k], tol)
        for k in (1, 2, 3)
    ]
    profile = hermiticity_profile(t, tol)
    expected = [True, True, True] if t.epsilon == 1 else [False, False, True]
    out.append(Verdict("ordinary Hermiticity pattern",
                       [p["hermitian"] for p in profile] == expected,
                       {"profile": profile, "expectedHermitian": expected}))
    return out


def unified_commutator_check(t: JTriple, tol: float = DEFAULT_TOL) -> RelationResidual:
    """[c, c#] = eps (1 - 2N) = 2 eps J3 in the basic representation."""
    rep = t.rep
    return check_relation("[c, c#] = 2 eps J3", matops.commutator(rep.c, rep.c_star),
                          2 * t.epsilon * t[3], tol)


def triple_to_dict(t: JTriple, checks: List[RelationResidual]) -> Dict[str, Any]:
    return {
        "epsilon": t.epsilon,
        "algebra": t.algebra_name,
        "deltaVector": list(t.delta),
        "brackets": [{"ij": r.detail["ij"], "expectedK": r.detail["expectedK"],
                      "residual": r.residual, "pass": r.passed} for r in checks],
        "casimir": complex_pair(np.trace(casimir(t)) / 2),
    }
