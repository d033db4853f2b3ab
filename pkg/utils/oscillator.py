"""
oscillator.py — Boson x two-level composite oscillators.

Three systems, all on (boson levels 0..T) ⊗ C^2, boson factor first:

    boson-fermion            H = E(N + N_f),   Q = sqrt(2E)   a^dagger ⊗ alpha,  eta = 1
    boson-phermion           H = E(N + N_+),   Q = sqrt(2E)   a^dagger ⊗ c_+,    eta = 1 ⊗ eta2
    boson-abnormal-phermion  H = E(N + N_-),   Q = sqrt(2|E|) a^dagger ⊗ c_-,    eta = 1 ⊗ sigma3, E < 0

tau = 1 ⊗ (1 - 2 N_two_level). Identities involving {Q, Q#} hold only on
the protected subspace (boson level <= T - 1); the projector onto it is
carried on the system.

Usage:

    from utils.oscillator import build_boson_fermion, spectrum_table

    sys = build_boson_fermion(E=1.0, truncation=4)
    for level in spectrum_table(sys):
        print(level.value, level.multiplicity, level.grades)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from utils import algebra, matops
from utils.algebra import LadderRep, MetricOperator
from utils.errors import ConfigError, DomainError, RangeError
from utils.matops import DEFAULT_TOL, ZERO_EIG_REL
from utils.reports import Check, RelationResidual, check_relation, complex_pair

BOSON_FERMION = "boson-fermion"
BOSON_PHERMION = "boson-phermion"
BOSON_ABNORMAL_PHERMION = "boson-abnormal-phermion"

BOSON, TWO_LEVEL = 0, 1


@dataclass(frozen=True)
class CompositeSystem:
    kind: str
    factors: Tuple[LadderRep, LadderRep]
    E: float
    truncation: int
    eta: MetricOperator
    tau: np.ndarray
    H: np.ndarray
    Q: np.ndarray
    protected_projector: np.ndarray
    lifted: Dict[Tuple[int, str], np.ndarray] = field(repr=False, default_factory=dict)

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    @property
    def Q_sharp(self) -> np.ndarray:
        return algebra.pseudo_adjoint(self.Q, self.eta)

    def op(self, factor: int, name: str) -> np.ndarray:
        """Lifted factor operator: op(0, "c") is a ⊗ 1, op(1, "n") is 1 ⊗ N, ..."""
        return self.lifted[(factor, name)]


def _check_truncation(truncation: int) -> None:
    if not isinstance(truncation, (int, np.integer)) or truncation < 2:
        raise ConfigError(f"truncation must be an integer >= 2, got {truncation!r}")


def _assemble(kind: str, boson: LadderRep, two: LadderRep, E: float) -> CompositeSystem:
    T = boson.truncation
    Ib = np.eye(T + 1, dtype=complex)
    I2 = np.eye(2, dtype=complex)

    lifted: Dict[Tuple[int, str], np.ndarray] = {}
    for name in ("c", "c_star", "n"):
        lifted[(BOSON, name)] = matops.kron(getattr(boson, name), I2)
        lifted[(TWO_LEVEL, name)] = matops.kron(Ib, getattr(two, name))
    lifted[(TWO_LEVEL, "eta")] = matops.kron(Ib, two.eta.matrix)

    eta = MetricOperator(
        matrix=lifted[(TWO_LEVEL, "eta")],
        inverse=matops.kron(Ib, two.eta.inverse),
        inertia=matops.Inertia(
            (T + 1) * two.eta.inertia.n_plus,
            (T + 1) * two.eta.inertia.n_minus,
            (T + 1) * two.eta.inertia.n_zero,
        ),
    )
    N_b, N_t = lifted[(BOSON, "n")], lifted[(TWO_LEVEL, "n")]
    H = E * (N_b + N_t)
    Q = np.sqrt(2 * abs(E)) * matops.kron(boson.c_star, two.c)
    tau = np.eye((T + 1) * 2, dtype=complex) - 2 * N_t
    protected = matops.kron(np.diag([1.0] * T + [0.0]), I2)

    return CompositeSystem(
        kind=kind,
        factors=(boson, two),
        E=float(E),
        truncation=T,
        eta=eta,
        tau=tau,
        H=H,
        Q=Q,
        protected_projector=protected,
        lifted=lifted,
    )


def build_boson_fermion(E: float, truncation: int) -> CompositeSystem:
    if not E > 0:
        raise ConfigError(f"boson-fermion oscillator needs E > 0, got {E}")
    _check_truncation(truncation)
    return _assemble(BOSON_FERMION, algebra.make_boson(truncation), algebra.make_fermion(), E)


def build_boson_phermion(E: float, truncation: int, eta2, tol: float = DEFAULT_TOL) -> CompositeSystem:
    """eta2 must be definite; an indefinite one raises AlgebraObstruction from make_phermion."""
    if not E > 0:
        raise ConfigError(f"boson-phermion oscillator needs E > 0, got {E}")
    _check_truncation(truncation)
    return _assemble(BOSON_PHERMION, algebra.make_boson(truncation),
                     algebra.make_phermion(eta2, tol), E)


def build_boson_abnormal_phermion(E: float, truncation: int) -> CompositeSystem:
    if not E < 0:
        raise ConfigError(f"boson-abnormal-phermion oscillator needs E < 0, got {E}")
    _check_truncation(truncation)
    return _assemble(BOSON_ABNORMAL_PHERMION, algebra.make_boson(truncation),
                     algebra.make_abnormal_phermion(), E)


def build_system(kind: str, E: float, truncation: int, eta2=None, tol: float = DEFAULT_TOL) -> CompositeSystem:
    if eta2 is not None and kind != BOSON_PHERMION:
        raise DomainError(f"{kind} has a fixed two-level metric; --eta applies to boson-phermion only")
    if kind == BOSON_FERMION:
        return build_boson_fermion(E, truncation)
    if kind == BOSON_PHERMION:
        return build_boson_phermion(E, truncation, algebra.I2 if eta2 is None else eta2, tol)
    if kind == BOSON_ABNORMAL_PHERMION:
        return build_boson_abnormal_phermion(E, truncation)
    raise ConfigError(f"unknown oscillator kind {kind!r}")


# ── Basis states ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class BasisState:
    boson_level: int
    grade: int
    vector: np.ndarray
    eta_norm: float


def _two_level_vacuum(rep: LadderRep) -> np.ndarray:
    """Kernel of c, phase fixed so the largest component is real positive."""
    v = scipy.linalg.null_space(rep.c, rcond=ZERO_EIG_REL)[:, 0]
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def basis_state(sys: CompositeSystem, n: int, grade: int) -> BasisState:
    """
    (n!)^(-1/2) (a^dagger)^n (c#)^((1-grade)/2) |0, +>, scaled to |eta-norm| = 1.
    """
    if not 0 <= n <= sys.truncation:
        raise RangeError(f"boson level {n} outside 0..{sys.truncation}")
    if grade not in (1, -1):
        raise RangeError(f"grade must be +1 or -1, got {grade}")
    boson, two = sys.factors
    vac_b = np.zeros(sys.truncation + 1, dtype=complex)
    vac_b[0] = 1.0
    v = np.kron(vac_b, _two_level_vacuum(two))
    if grade == -1:
        v = sys.op(TWO_LEVEL, "c_star") @ v
    v = np.linalg.matrix_power(sys.op(BOSON, "c_star"), n) @ v / np.sqrt(factorial(n))
    norm = sys.eta.norm(v)
    v = v / np.sqrt(abs(norm))
    return BasisState(boson_level=n, grade=grade, vector=v, eta_norm=float(np.sign(norm)))


# ── Checks ───────────────────────────────────────────────────────────────────

def relative_statistics_checks(sys: CompositeSystem, tol: float = DEFAULT_TOL) -> List[RelationResidual]:
    """Lifted boson ladder operators commute with every two-level operator and with eta."""
    out = []
    for b in ("c", "c_star"):
        B = sys.op(BOSON, b)
        for t in ("c", "c_star", "eta"):
            out.append(check_relation(f"[{b}_boson, {t}_two_level] = 0",
                                      matops.commutator(B, sys.op(TWO_LEVEL, t)), 0.0, tol))
    return out


def similarity_to_susy(sys: CompositeSystem, tol: float = DEFAULT_TOL) -> List[RelationResidual]:
    """
    Conjugation by U = 1 ⊗ eta2^(1/2) carries the boson-phermion (H, Q, Q#)
    onto the boson-fermion (H, Q, Q^dagger) with the same E and truncation.
    """
    if sys.kind != BOSON_PHERMION:
        raise DomainError("similarity_to_susy applies to boson-phermion systems")
    ref = build_boson_fermion(sys.E, sys.truncation)
    S = algebra.phermion_to_fermion_map(sys.factors[TWO_LEVEL].eta, tol)
    Ib = np.eye(sys.truncation + 1)
    U = matops.kron(Ib, S)
    U_inv = matops.kron(Ib, matops.inverse(S, tol))
    return [
        check_relation("U H U^-1 = H_susy", U @ sys.H @ U_inv, ref.H, tol),
        check_relation("U Q U^-1 = Q_susy", U @ sys.Q @ U_inv, ref.Q, tol),
        check_relation("U Q# U^-1 = Q_susy^dagger", U @ sys.Q_sharp @ U_inv, ref.Q.conj().T, tol),
    ]


# ── Spectrum ─────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SpectrumLevel:
    """
    One eigenvalue cluster of H. edge is True when every eigenvector of the
    level lies at the top boson level (outside the protected subspace);
    touches_truncation when at least one direction does.
    """

    value: complex
    multiplicity: int
    grades: Dict[str, int]
    edge: bool
    touches_truncation: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": complex_pair(self.value),
            "multiplicity": self.multiplicity,
            "grades": self.grades,
            "edge": self.edge,
            "touchesTruncation": self.touches_truncation,
        }


def sector_eigenpairs(H: np.ndarray, tau: np.ndarray) -> List[Tuple[complex, int, np.ndarray]]:
    """
    Eigenpairs of H computed per grade sector (H must commute with tau).
    Returns (eigenvalue, grade, full-space eigenvector) triples.
    """
    split = matops.involution_split(tau)
    out = []
    for grade, V in ((1, split.v_plus), (-1, split.v_minus)):
        if V.shape[1] == 0:
            continue
        dec = matops.eig(split.block(H, grade, grade))
        for lam, x in zip(dec.eigenvalues, dec.eigenvectors.T):
            v = V @ x
            out.append((complex(lam), grade, v / np.linalg.norm(v)))
    return out


def spectrum_table(sys: CompositeSystem, rel_tol: float = ZERO_EIG_REL) -> List[SpectrumLevel]:
    pairs = sector_eigenpairs(sys.H, sys.tau)
    values = [p[0] for p in pairs]
    P = sys.protected_projector
    levels = []
    for group in matops.group_eigenvalues(values, rel_tol):
        V = np.column_stack([pairs[i][2] for i in group])
        inside = np.linalg.matrix_rank(P @ V, tol=1e-8)
        levels.append(SpectrumLevel(
            value=complex(np.mean([values[i] for i in group])),
            multiplicity=len(group),
            grades={"+": sum(1 for i in group if pairs[i][1] == 1),
                    "-": sum(1 for i in group if pairs[i][1] == -1)},
            edge=bool(inside == 0),
            touches_truncation=bool(inside < len(group)),
        ))
    return levels


def system_to_dict(sys: CompositeSystem, checks: Optional[Sequence[Check]] = None) -> Dict[str, Any]:
    return {
        "kind": sys.kind,
        "factors": [algebra.rep_to_dict(f) for f in sys.factors],
        "E": sys.E,
        "truncation": sys.truncation,
        "dim": sys.dim,
        "spectrum": [lvl.to_dict() for lvl in spectrum_table(sys)],
        "checks": [c.to_dict() for c in (checks or [])],
    }
