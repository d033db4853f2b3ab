"""
algebra.py — Metric operators, pseudo-adjoints and single-species ladder representations.

Species covered:
  - boson              truncated ladder a|k> = sqrt(k)|k-1>, eta = 1
  - fermion            c = alpha = [[0,1],[0,0]], eta = 1
  - phermion           c = eta^(-1/2) alpha eta^(1/2) for a definite 2x2 eta
  - abnormal-phermion  c = i*alpha, eta = sigma3, {c, c#} = -1

For the two-level species the relations are written in the unified form

    c^2 = 0,   {c, c#} = eps,   N = eps * c# c,   [c, c#] = eps (1 - 2N)

with eps = +1 (fermion, phermion) or eps = -1 (abnormal phermion).

Verification functions return RelationResidual lists and never raise on a
failed identity; construction functions raise typed errors from utils.errors.

Example usage:

    from utils import algebra

    rep = algebra.make_phermion(np.diag([4.0, 1.0]))
    for r in algebra.verify_species(rep):
        print(r.name, r.passed)
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np
import scipy.linalg

from utils import matops
from utils.errors import AlgebraObstruction, ConfigError, DomainError, ShapeError
from utils.matops import DEFAULT_TOL, Inertia
from utils.reports import (
    RelationResidual,
    check_relation,
    matrix_entries,
    matrix_from_entries,
)

ALPHA = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)

ABNORMAL_OBSTRUCTION_EXPLANATION = (
    "A definite metric cannot carry the abnormal phermion: for eta > 0 the "
    "operator {a, a#} is similar to {b, b^dagger}, which is positive "
    "semidefinite and so never equals -1."
)


class Species(str, Enum):
    BOSON = "boson"
    FERMION = "fermion"
    PHERMION = "phermion"
    ABNORMAL_PHERMION = "abnormal-phermion"


# ── Metric operators ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class MetricOperator:
    """An invertible Hermitian matrix with its inverse and inertia cached."""

    matrix: np.ndarray
    inverse: np.ndarray
    inertia: Inertia

    @classmethod
    def from_matrix(cls, eta, tol: float = DEFAULT_TOL) -> "MetricOperator":
        M = matops.as_matrix(eta)
        if not matops.is_hermitian(M, tol):
            raise DomainError("metric operator must be Hermitian")
        M = (M + M.conj().T) / 2
        inv = matops.inverse(M, tol)
        return cls(matrix=M, inverse=inv, inertia=matops.inertia_of(M, tol))

    @classmethod
    def identity(cls, dim: int) -> "MetricOperator":
        I = np.eye(dim, dtype=complex)
        return cls(matrix=I, inverse=I.copy(), inertia=Inertia(dim, 0, 0))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_definite(self) -> bool:
        return self.inertia.is_definite

    @property
    def is_positive_definite(self) -> bool:
        return self.inertia.n_plus == self.dim

    def inner(self, u: np.ndarray, v: np.ndarray) -> complex:
        """<<u, v>> = <u| eta v>."""
        return complex(np.vdot(u, self.matrix @ v))

    def norm(self, u: np.ndarray) -> float:
        """eta-norm <<u, u>>, real for Hermitian eta."""
        return float(np.real(self.inner(u, u)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "entries": matrix_entries(self.matrix),
            "inertia": self.inertia.to_dict(),
            "condition": matops.condition_number(self.matrix),
        }


def as_metric(eta: Union[MetricOperator, np.ndarray], tol: float = DEFAULT_TOL) -> MetricOperator:
    return eta if isinstance(eta, MetricOperator) else MetricOperator.from_matrix(eta, tol)


def pseudo_adjoint(A, eta: Union[MetricOperator, np.ndarray]) -> np.ndarray:
    """A# = eta^-1 A^dagger eta."""
    A = matops.as_matrix(A)
    eta = as_metric(eta)
    if A.shape != eta.matrix.shape:
        raise ShapeError(f"operator shape {A.shape} does not match metric shape {eta.matrix.shape}")
    return eta.inverse @ A.conj().T @ eta.matrix


def congruence_to_sigma3(eta, tol: float = DEFAULT_TOL) -> np.ndarray:
    """
    For an indefinite invertible 2x2 Hermitian eta, return S with
    S^dagger eta S = sigma3. Columns of S are the eigenvectors of eta scaled
    by |eigenvalue|^(-1/2), positive eigenvalue first.
    """
    eta = as_metric(eta, tol)
    if eta.dim != 2 or not eta.inertia.is_indefinite:
        raise DomainError("congruence to sigma3 needs an indefinite 2x2 metric")
    w, V = scipy.linalg.eigh(eta.matrix)
    order = np.argsort(-w)
    w, V = w[order], V[:, order]
    return V / np.sqrt(np.abs(w))


# ── Ladder representations ───────────────────────────────────────────────────

@dataclass(frozen=True)
class LadderRep:
    """
    One particle species. c_star is the pseudo-adjoint of c with respect to
    eta; n is the number operator (c# c for bosons and fermions, -c# c for the
    abnormal phermion). flags records adjustments made during construction
    ("negated-metric" when a negative-definite metric was replaced by -eta).
    """

    species: Species
    c: np.ndarray
    c_star: np.ndarray
    n: np.ndarray
    eta: MetricOperator
    epsilon: int = 1
    truncation: Optional[int] = None
    flags: Tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    @property
    def two_level(self) -> bool:
        return self.species is not Species.BOSON


def make_boson(truncation: int) -> LadderRep:
    """Truncated boson ladder on levels 0..truncation."""
    if not isinstance(truncation, (int, np.integer)) or truncation < 2:
        raise ConfigError(f"boson truncation must be an integer >= 2, got {truncation!r}")
    a = np.diag(np.sqrt(np.arange(1, truncation + 1)), k=1).astype(complex)
    ad = a.conj().T
    return LadderRep(
        species=Species.BOSON,
        c=a,
        c_star=ad,
        n=ad @ a,
        eta=MetricOperator.identity(truncation + 1),
        epsilon=1,
        truncation=int(truncation),
    )


def make_fermion() -> LadderRep:
    return LadderRep(
        species=Species.FERMION,
        c=ALPHA.copy(),
        c_star=ALPHA.conj().T.copy(),
        n=ALPHA.conj().T @ ALPHA,
        eta=MetricOperator.identity(2),
    )


def make_phermion(eta, tol: float = DEFAULT_TOL) -> LadderRep:
    """
    Phermion for a definite 2x2 metric: c = eta^(-1/2) alpha eta^(1/2).

    A negative-definite metric is replaced by -eta (the pseudo-adjoint is
    unchanged by the sign) and flagged. An indefinite metric raises
    AlgebraObstruction.
    """
    eta = as_metric(eta, tol)
    if eta.dim != 2:
        raise ShapeError(f"phermion metric must be 2x2, got {eta.matrix.shape}")
    if eta.inertia.is_indefinite:
        raise AlgebraObstruction(
            f"phermion algebra has no representation with indefinite metric "
            f"(inertia {eta.inertia.as_tuple()})"
        )
    flags: Tuple[str, ...] = ()
    if not eta.is_positive_definite:
        eta = MetricOperator.from_matrix(-eta.matrix, tol)
        flags = ("negated-metric",)
    S = matops.sqrt_pos_def(eta.matrix, tol)
    S_inv = matops.inverse(S, tol)
    c = S_inv @ ALPHA @ S
    c_star = pseudo_adjoint(c, eta)
    return LadderRep(
        species=Species.PHERMION,
        c=c,
        c_star=c_star,
        n=c_star @ c,
        eta=eta,
        epsilon=1,
        flags=flags,
    )


def make_abnormal_phermion(eta=None, tol: float = DEFAULT_TOL) -> LadderRep:
    """
    Abnormal phermion. With eta = sigma3 (default): c = i*alpha, c# = i*alpha^dagger,
    N = -c# c = diag(0, 1). Any other indefinite 2x2 metric gets the sigma3
    representation transported by congruence_to_sigma3.
    """
    c0 = 1j * ALPHA
    if eta is not None and np.shape(getattr(eta, "matrix", eta)) == (2, 2) \
            and np.allclose(getattr(eta, "matrix", eta), SIGMA3):
        eta = None
    if eta is None:
        metric = MetricOperator.from_matrix(SIGMA3)
        c = c0
        flags: Tuple[str, ...] = ()
    else:
        metric = as_metric(eta, tol)
        if metric.dim != 2:
            raise ShapeError(f"abnormal phermion metric must be 2x2, got {metric.matrix.shape}")
        if not metric.inertia.is_indefinite:
            raise AlgebraObstruction(
                f"abnormal phermion needs an indefinite metric (inertia {metric.inertia.as_tuple()})",
                explanation=ABNORMAL_OBSTRUCTION_EXPLANATION,
            )
        S = congruence_to_sigma3(metric, tol)
        c = S @ c0 @ matops.inverse(S, tol)
        flags = ("transported-from-sigma3",)
    c_star = pseudo_adjoint(c, metric)
    return LadderRep(
        species=Species.ABNORMAL_PHERMION,
        c=c,
        c_star=c_star,
        n=-(c_star @ c),
        eta=metric,
        epsilon=-1,
        flags=flags,
    )


def make_species(species: str, eta=None, truncation: int = 8, tol: float = DEFAULT_TOL) -> LadderRep:
    """Dispatch by species name (the CLI's --species values)."""
    sp = Species(species)
    if eta is not None and sp in (Species.BOSON, Species.FERMION):
        raise DomainError(f"{species} has a fixed metric; --eta applies to phermion species only")
    if sp is Species.BOSON:
        return make_boson(truncation)
    if sp is Species.FERMION:
        return make_fermion()
    if sp is Species.PHERMION:
        return make_phermion(I2 if eta is None else eta, tol)
    return make_abnormal_phermion(eta, tol)


# ── Verification ─────────────────────────────────────────────────────────────

def _sign_label(eps: int) -> str:
    return "1" if eps > 0 else "-1"


def verify_species(rep: LadderRep, tol: float = DEFAULT_TOL) -> List[RelationResidual]:
    """One residual per defining relation of the species."""
    c, cs, n = rep.c, rep.c_star, rep.n
    out = [
        check_relation("c# = eta^-1 c^dagger eta", cs, pseudo_adjoint(c, rep.eta), tol),
        check_relation("[c, N] = c", matops.commutator(c, n), c, tol),
        check_relation("[c#, N] = -c#", matops.commutator(cs, n), -cs, tol),
        check_relation("N# = N", pseudo_adjoint(n, rep.eta), n, tol),
    ]
    if rep.species is Species.BOSON:
        T = rep.truncation
        comm = matops.commutator(c, cs)
        P = np.diag([1.0] * T + [0.0]).astype(complex)
        defect = comm - np.eye(T + 1)
        out.append(check_relation(
            "[a, a^dagger] = 1 (levels below truncation)", comm, 1.0, tol, projector=P,
            detail={
                "fullSpaceResidual": float(np.linalg.norm(defect)),
                "topLevelDefect": float(abs(defect[T, T])),
            },
        ))
        return out

    eps = rep.epsilon
    one_minus_2n = np.eye(rep.dim) - 2 * n
    out += [
        check_relation("c^2 = 0", c @ c, 0.0, tol),
        check_relation("(c#)^2 = 0", cs @ cs, 0.0, tol),
        check_relation(f"{{c, c#}} = {_sign_label(eps)}", matops.anticommutator(c, cs), float(eps), tol),
        check_relation(f"N = {'' if eps > 0 else '-'}c# c", n, eps * (cs @ c), tol),
        check_relation(
            "[c, c#] = 1 - 2N" if eps > 0 else "[c, c#] = -(1 - 2N)",
            matops.commutator(c, cs), eps * one_minus_2n, tol,
        ),
    ]
    return out


def audit_unified_commutator(rep: LadderRep, tol: float = DEFAULT_TOL) -> Dict[str, RelationResidual]:
    """
    [c, c#] against the commonly printed 1 - 2*eps*N and against eps*(1 - 2N).
    The two agree for eps = +1; for eps = -1 only the second holds.
    """
    if not rep.two_level:
        raise DomainError("the unified commutator applies to two-level species only")
    eps = rep.epsilon
    comm = matops.commutator(rep.c, rep.c_star)
    I = np.eye(rep.dim)
    printed = I - 2 * eps * rep.n
    corrected = eps * (I - 2 * rep.n)
    return {
        "printed": check_relation("[c, c#] = 1 - 2 eps N", comm, printed, tol,
                                  detail={"expected": matrix_entries(printed),
                                          "actual": matrix_entries(comm)}),
        "corrected": check_relation("[c, c#] = eps (1 - 2N)", comm, corrected, tol),
    }


# ── Metric classification ────────────────────────────────────────────────────

class MetricSolution(NamedTuple):
    matrix: np.ndarray
    inertia: Inertia


def hermitian_basis(n: int) -> List[np.ndarray]:
    """
    A real basis of the n x n Hermitian matrices. For n = 2 this is
    (I, sigma1, sigma2, sigma3); otherwise the elementary basis
    E_kk, E_kl + E_lk, i(E_kl - E_lk).
    """
    if n == 2:
        return [I2, SIGMA1, SIGMA2, SIGMA3]
    basis = []
    for k in range(n):
        B = np.zeros((n, n), dtype=complex)
        B[k, k] = 1
        basis.append(B)
    for k in range(n):
        for l in range(k + 1, n):
            B = np.zeros((n, n), dtype=complex)
            B[k, l] = B[l, k] = 1
            basis.append(B)
            B = np.zeros((n, n), dtype=complex)
            B[k, l], B[l, k] = 1j, -1j
            basis.append(B)
    return basis


def classify_metrics(c, c_star, tol: float = DEFAULT_TOL) -> List[MetricSolution]:
    """
    All Hermitian eta (up to linear combination) with eta c_star = c^dagger eta.

    The constraint is linear over the reals in the coefficients of eta in
    hermitian_basis; its real and imaginary parts are stacked and the null
    space read off with scipy.linalg.null_space. Each basis element is scaled
    to unit largest entry with its first nonzero coefficient positive. An
    empty list means no Hermitian solution.
    """
    c, c_star = matops.as_matrix(c), matops.as_matrix(c_star)
    if c.shape != c_star.shape:
        raise ShapeError(f"c and c_star shapes differ: {c.shape} vs {c_star.shape}")
    n = c.shape[0]
    basis = hermitian_basis(n)
    cols = []
    for B in basis:
        L = B @ c_star - c.conj().T @ B
        cols.append(np.concatenate([L.real.ravel(), L.imag.ravel()]))
    M = np.array(cols).T
    N = scipy.linalg.null_space(M, rcond=tol)
    out = []
    for x in N.T:
        lead = x[np.argmax(np.abs(x) > tol)]
        x = x * np.sign(lead)
        eta = sum(xk * B for xk, B in zip(x, basis))
        eta = eta / np.max(np.abs(eta))
        out.append(MetricSolution(eta, matops.inertia_of(eta)))
    return out


def generic_metric_inertia(solutions: List[MetricSolution],
                           rng: Optional[np.random.Generator] = None) -> Optional[Inertia]:
    """Inertia of a random real combination of the solution basis (None if empty)."""
    if not solutions:
        return None
    rng = rng or matops.rng_for()
    coeffs = rng.standard_normal(len(solutions))
    eta = sum(x * s.matrix for x, s in zip(coeffs, solutions))
    return matops.inertia_of(eta)


def obstruction_demo(u: complex, v: complex) -> np.ndarray:
    """
    {sigma, sigma3 sigma^dagger sigma3} for sigma = [[s, u], [v, -s]].

    s = sqrt(-uv) on the principal branch, which is what makes sigma
    nilpotent (sigma^2 = (s^2 + uv) I). The result is -(|u| - |v|)^2 I.
    """
    u, v = complex(u), complex(v)
    if u * v == 0:
        raise DomainError("obstruction demo needs u*v != 0")
    s = np.sqrt(-u * v)
    sigma = np.array([[s, u], [v, -s]], dtype=complex)
    return matops.anticommutator(sigma, SIGMA3 @ sigma.conj().T @ SIGMA3)


def obstruction_checks(u: complex, v: complex, tol: float = DEFAULT_TOL) -> List[RelationResidual]:
    u, v = complex(u), complex(v)
    s = np.sqrt(-u * v)
    sigma = np.array([[s, u], [v, -s]], dtype=complex)
    detail = {"u": [u.real, u.imag], "v": [v.real, v.imag]}
    return [
        check_relation("sigma^2 = 0", sigma @ sigma, 0.0, tol, detail=detail),
        check_relation("{sigma, sigma#} = -(|u| - |v|)^2",
                       obstruction_demo(u, v), -(abs(u) - abs(v)) ** 2, tol, detail=detail),
    ]


def abnormal_fermion_bound(c) -> float:
    """
    Smallest eigenvalue of {c, c^dagger}. It is never negative, so with
    eta = 1 the relation {c, c^dagger} = -1 has no solution.
    """
    c = matops.as_matrix(c)
    return float(scipy.linalg.eigvalsh(matops.anticommutator(c, c.conj().T))[0])


# ── Equivalences ─────────────────────────────────────────────────────────────

def phermion_to_fermion_map(eta, tol: float = DEFAULT_TOL) -> np.ndarray:
    """S = eta^(1/2); S c S^-1 is an ordinary fermion annihilator."""
    eta = as_metric(eta, tol)
    if not eta.is_positive_definite:
        raise DomainError(f"phermion-to-fermion map needs a positive-definite metric "
                          f"(inertia {eta.inertia.as_tuple()})")
    return matops.sqrt_pos_def(eta.matrix, tol)


def fermion_map_checks(rep: LadderRep, tol: float = DEFAULT_TOL) -> List[RelationResidual]:
    S = phermion_to_fermion_map(rep.eta, tol)
    S_inv = matops.inverse(S, tol)
    b = S @ rep.c @ S_inv
    b_star = S @ rep.c_star @ S_inv
    return [
        check_relation("S c# S^-1 = (S c S^-1)^dagger", b_star, b.conj().T, tol),
        check_relation("{b, b^dagger} = 1", matops.anticommutator(b, b.conj().T), 1.0, tol),
        check_relation("b^2 = 0", b @ b, 0.0, tol),
    ]


@dataclass(frozen=True)
class Complexification:
    c1: np.ndarray
    c2: np.ndarray
    n: np.ndarray
    checks: List[RelationResidual]


def complexify(rep: LadderRep, tol: float = DEFAULT_TOL) -> Complexification:
    """
    c1 = -i c, c2 = -i c#, n = c2 c1. For the abnormal phermion these obey the
    fermion relations as a complex associative algebra (no adjoint involved).
    """
    if not rep.two_level:
        raise DomainError("complexify applies to two-level species only")
    c1 = -1j * rep.c
    c2 = -1j * rep.c_star
    n = c2 @ c1
    checks = [
        check_relation("c1^2 = 0", c1 @ c1, 0.0, tol),
        check_relation("c2^2 = 0", c2 @ c2, 0.0, tol),
        check_relation("{c1, c2} = 1", matops.anticommutator(c1, c2), 1.0, tol),
        check_relation("[c1, n] = c1", matops.commutator(c1, n), c1, tol),
    ]
    return Complexification(c1=c1, c2=c2, n=n, checks=checks)


def physical_state_count(rep: LadderRep, tol: float = DEFAULT_TOL) -> int:
    """Number of number-operator eigenvectors with positive eta-norm."""
    dec = matops.eig(rep.n)
    norms = [rep.eta.norm(v) for v in dec.eigenvectors.T]
    return sum(1 for x in norms if x > tol)


# ── Serialization ────────────────────────────────────────────────────────────

def rep_to_dict(rep: LadderRep) -> Dict[str, Any]:
    return {
        "species": rep.species.value,
        "dim": rep.dim,
        "c": matrix_entries(rep.c),
        "eta": matrix_entries(rep.eta.matrix),
        "epsilon": rep.epsilon,
        "truncation": rep.truncation,
        "flags": list(rep.flags),
    }


def rep_from_dict(doc: Dict[str, Any], tol: float = DEFAULT_TOL) -> LadderRep:
    """Rebuild a LadderRep; c_star and n are recomputed from c and eta."""
    try:
        species = Species(doc["species"])
        c = matops.as_matrix(matrix_from_entries(doc["c"]))
        eta = MetricOperator.from_matrix(matrix_from_entries(doc["eta"]), tol)
        eps = int(doc.get("epsilon", 1))
    except (KeyError, TypeError) as e:
        raise ConfigError(f"malformed species document: {e}")
    if int(doc.get("dim", c.shape[0])) != c.shape[0]:
        raise ConfigError(f"species document dim {doc['dim']} does not match c {c.shape}")
    c_star = pseudo_adjoint(c, eta)
    n = c_star @ c if species is Species.BOSON else eps * (c_star @ c)
    return LadderRep(
        species=species,
        c=c,
        c_star=c_star,
        n=n,
        eta=eta,
        epsilon=eps,
        truncation=doc.get("truncation"),
        flags=tuple(doc.get("flags", ())),
    )
