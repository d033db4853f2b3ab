"""
pseudosusy.py — Generic checks for an N=2 pseudo-supersymmetric system (H, Q, tau, eta).

    Q^2 = 0,  [Q, H] = 0,  {Q, Q#} = 2H,  tau^2 = 1,  {tau, Q} = 0,  [tau, eta] = 0

Q maps one grade sector (the source) into the other (the target). Which one
is which depends on the construction, so two_component and pair_spectrum
detect it from the blocks of Q instead of assuming it. For the oscillators
in utils/oscillator.py, Q lowers the two-level occupation: the source sector
is grade -1.

Pairing and the eta-norm sign relation

    <<Q psi, Q psi>> = 2 E <<psi, psi>>

are checked on eigenvectors inside the protected subspace only.

Usage:

    from utils.oscillator import build_boson_abnormal_phermion
    from utils.pseudosusy import PseudoSusySystem, pair_spectrum, sign_theorem_check

    sys = PseudoSusySystem.from_composite(build_boson_abnormal_phermion(-1.0, 8))
    report = pair_spectrum(sys)
    checks = sign_theorem_check(sys, report)
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from utils import algebra, matops
from utils.algebra import MetricOperator
from utils.errors import DomainError, StructureError
from utils.matops import DEFAULT_TOL, ZERO_EIG_REL, SectorSplit
from utils.oscillator import CompositeSystem, sector_eigenpairs
from utils.reports import Check, RelationResidual, Verdict, check_relation, complex_pair

# Eigenvector-level comparisons (is Q psi an eigenvector? is psi protected?)
# are looser than operator identities: eig returns vectors good to ~1e-12.
VECTOR_TOL = 1e-8


@dataclass(frozen=True)
class PseudoSusySystem:
    H: np.ndarray
    Q: np.ndarray
    tau: np.ndarray
    eta: MetricOperator
    protected_projector: np.ndarray
    label: str = "custom"

    @classmethod
    def from_composite(cls, sys: CompositeSystem) -> "PseudoSusySystem":
        return cls(H=sys.H, Q=sys.Q, tau=sys.tau, eta=sys.eta,
                   protected_projector=sys.protected_projector, label=sys.kind)

    @classmethod
    def untruncated(cls, H, Q, tau, eta, label: str = "custom") -> "PseudoSusySystem":
        """System with no truncation: the protected projector is the identity."""
        H = matops.as_matrix(H)
        return cls(H=H, Q=matops.as_matrix(Q), tau=matops.as_matrix(tau),
                   eta=algebra.as_metric(eta),
                   protected_projector=np.eye(H.shape[0], dtype=complex), label=label)

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    @property
    def Q_sharp(self) -> np.ndarray:
        return algebra.pseudo_adjoint(self.Q, self.eta)

    def with_operators(self, **changes) -> "PseudoSusySystem":
        return replace(self, **changes)


def verify_algebra(sys: PseudoSusySystem, tol: float = DEFAULT_TOL) -> List[RelationResidual]:
    H, Q, tau, eta = sys.H, sys.Q, sys.tau, sys.eta.matrix
    P = sys.protected_projector
    return [
        check_relation("tau^2 = 1", tau @ tau, 1.0, tol),
        check_relation("tau^dagger = tau", tau.conj().T, tau, tol),
        check_relation("tau# = tau", algebra.pseudo_adjoint(tau, sys.eta), tau, tol),
        check_relation("{tau, Q} = 0", matops.anticommutator(tau, Q), 0.0, tol),
        check_relation("[tau, eta] = 0", matops.commutator(tau, eta), 0.0, tol),
        check_relation("Q^2 = 0", Q @ Q, 0.0, tol),
        check_relation("[Q, H] = 0", matops.commutator(Q, H), 0.0, tol),
        check_relation("{Q, Q#} = 2H (protected subspace)",
                       matops.anticommutator(Q, sys.Q_sharp), 2 * H, tol, projector=P),
    ]


# ── Two-component form ───────────────────────────────────────────────────────

def _orientation(sys: PseudoSusySystem, split: SectorSplit) -> int:
    """Grade of the sector Q acts on (the one it does not annihilate)."""
    to_plus = np.linalg.norm(split.block(sys.Q, 1, -1))
    to_minus = np.linalg.norm(split.block(sys.Q, -1, 1))
    return -1 if to_plus >= to_minus else 1


@dataclass(frozen=True)
class TwoComponentForm:
    """
    Q, H and eta in a tau-eigenbasis. D is the block of Q from the source
    sector into the target sector (rows: target, columns: source);
    D_sharp = eta_source^-1 D^dagger eta_target.
    """

    source_grade: int
    D: np.ndarray
    D_sharp: np.ndarray
    eta_source: np.ndarray
    eta_target: np.ndarray
    H_source: np.ndarray
    H_target: np.ndarray
    split: SectorSplit = field(repr=False)
    checks: List[RelationResidual] = field(default_factory=list)

    @property
    def target_grade(self) -> int:
        return -self.source_grade

    def eta_block(self, grade: int) -> np.ndarray:
        return self.eta_source if grade == self.source_grade else self.eta_target

    def H_block(self, grade: int) -> np.ndarray:
        return self.H_source if grade == self.source_grade else self.H_target

    @property
    def eta_plus(self) -> np.ndarray:
        return self.eta_block(1)

    @property
    def eta_minus(self) -> np.ndarray:
        return self.eta_block(-1)

    @property
    def H_plus(self) -> np.ndarray:
        return self.H_block(1)

    @property
    def H_minus(self) -> np.ndarray:
        return self.H_block(-1)


def _sector(split: SectorSplit, grade: int) -> Tuple[np.ndarray, np.ndarray]:
    return (split.v_plus, split.w_plus) if grade > 0 else (split.v_minus, split.w_minus)


def two_component(sys: PseudoSusySystem, tol: float = DEFAULT_TOL) -> TwoComponentForm:
    """
    Block form of the system. Raises StructureError when Q has a component
    besides the source->target block, or when eta mixes the two sectors.
    """
    split = matops.involution_split(sys.tau, tol)
    src = _orientation(sys, split)
    tgt = -src
    V_s, W_s = _sector(split, src)
    V_t, W_t = _sector(split, tgt)

    scale_q = max(1.0, float(np.linalg.norm(sys.Q)))
    leak_q = max(
        np.linalg.norm(split.block(sys.Q, src, tgt)),
        np.linalg.norm(split.block(sys.Q, src, src)),
        np.linalg.norm(split.block(sys.Q, tgt, tgt)),
    )
    if leak_q > tol * scale_q:
        raise StructureError(f"Q is not block off-diagonal in the tau basis (leakage {leak_q:.3e})")

    eta = sys.eta.matrix
    leak_eta = np.linalg.norm(V_s.conj().T @ eta @ V_t)
    if leak_eta > tol * max(1.0, float(np.linalg.norm(eta))):
        raise StructureError(f"eta mixes the grade sectors (off-diagonal block {leak_eta:.3e})")

    D = W_t @ sys.Q @ V_s
    eta_s = V_s.conj().T @ eta @ V_s
    eta_t = V_t.conj().T @ eta @ V_t
    D_sharp = matops.inverse(eta_s, tol) @ D.conj().T @ eta_t
    H_s = W_s @ sys.H @ V_s
    H_t = W_t @ sys.H @ V_t
    P_s = W_s @ sys.protected_projector @ V_s
    P_t = W_t @ sys.protected_projector @ V_t

    checks = [
        check_relation("D# = eta_src^-1 D^dagger eta_tgt", D_sharp, W_s @ sys.Q_sharp @ V_t, tol),
        check_relation("H_src = D# D / 2 (protected)", H_s, D_sharp @ D / 2, tol, projector=P_s),
        check_relation("H_tgt = D D# / 2 (protected)", H_t, D @ D_sharp / 2, tol, projector=P_t),
    ]
    return TwoComponentForm(
        source_grade=src,
        D=D,
        D_sharp=D_sharp,
        eta_source=eta_s,
        eta_target=eta_t,
        H_source=H_s,
        H_target=H_t,
        split=split,
        checks=checks,
    )


def reassemble(form: TwoComponentForm) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Q, H, eta) on the original space, rebuilt from the blocks."""
    V_s, W_s = _sector(form.split, form.source_grade)
    V_t, W_t = _sector(form.split, form.target_grade)
    Q = V_t @ form.D @ W_s
    H = V_s @ form.H_source @ W_s + V_t @ form.H_target @ W_t
    eta = W_s.conj().T @ form.eta_source @ W_s + W_t.conj().T @ form.eta_target @ W_t
    return Q, H, eta


# ── Spectral pairing ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Pair:
    """psi (source sector) and Q psi (target sector), both eigenvectors for value."""

    value: complex
    source_grade: int
    source_vector: np.ndarray
    target_vector: np.ndarray
    eta_norm_source: float
    eta_norm_target: float

    @property
    def plus_vector(self) -> np.ndarray:
        return self.source_vector if self.source_grade > 0 else self.target_vector

    @property
    def minus_vector(self) -> np.ndarray:
        return self.target_vector if self.source_grade > 0 else self.source_vector

    @property
    def eta_norm_plus(self) -> float:
        return self.eta_norm_source if self.source_grade > 0 else self.eta_norm_target

    @property
    def eta_norm_minus(self) -> float:
        return self.eta_norm_target if self.source_grade > 0 else self.eta_norm_source

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": complex_pair(self.value),
            "etaNormPlus": self.eta_norm_plus,
            "etaNormMinus": self.eta_norm_minus,
            "signPlus": int(np.sign(self.eta_norm_plus)),
            "signMinus": int(np.sign(self.eta_norm_minus)),
        }


@dataclass(frozen=True)
class Unpaired:
    value: complex
    vector: np.ndarray
    grade: int
    reason: str     # zero-mode | truncation-edge | no-source-partner

    def to_dict(self) -> Dict[str, Any]:
        return {"value": complex_pair(self.value), "grade": self.grade, "reason": self.reason}


@dataclass
class PairingReport:
    source_grade: int
    pairs: List[Pair] = field(default_factory=list)
    unpaired: List[Unpaired] = field(default_factory=list)
    complex_pairs: List[Tuple[complex, complex]] = field(default_factory=list)
    failures: List[Dict[str, Any]] = field(default_factory=list)
    eigenpairs: List[Tuple[complex, int, np.ndarray]] = field(default_factory=list, repr=False)
    groups: List[List[int]] = field(default_factory=list, repr=False)
    gap_histogram: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def paired_values(self) -> List[float]:
        return sorted({round(p.value.real, 9) for p in self.pairs})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sourceGrade": self.source_grade,
            "pairs": [p.to_dict() for p in self.pairs],
            "unpaired": [u.to_dict() for u in self.unpaired],
            "complexPairs": [[complex_pair(a), complex_pair(b)] for a, b in self.complex_pairs],
            "failures": self.failures,
            "gapHistogram": self.gap_histogram,
        }


def _random_unitary(rng: np.random.Generator, k: int) -> np.ndarray:
    X = matops.random_complex(rng, k)
    U, R = np.linalg.qr(X)
    return U * (np.diag(R) / np.abs(np.diag(R)))


def _remix(eigenpairs, groups, rng: np.random.Generator):
    """Rotate each degenerate same-grade eigenspace by a random unitary."""
    out = list(eigenpairs)
    for g in groups:
        for grade in (1, -1):
            idx = [i for i in g if eigenpairs[i][1] == grade]
            if len(idx) < 2:
                continue
            V = np.column_stack([eigenpairs[i][2] for i in idx]) @ _random_unitary(rng, len(idx))
            for j, i in enumerate(idx):
                out[i] = (eigenpairs[i][0], grade, V[:, j] / np.linalg.norm(V[:, j]))
    return out


def pair_spectrum(
    sys: PseudoSusySystem,
    rel_tol: float = ZERO_EIG_REL,
    rng: Optional[np.random.Generator] = None,
) -> PairingReport:
    """
    Group the spectrum of H and pair each source-sector eigenvector psi of a
    nonzero real eigenvalue with Q psi. With rng given, degenerate
    eigenvectors are first remixed by random unitaries (pair counts and
    eta-norm signs must not change).
    """
    if not matops.eig(sys.H).diagonalizable:
        raise DomainError("H is not diagonalizable")
    split = matops.involution_split(sys.tau)
    leak = max(np.linalg.norm(split.block(sys.H, 1, -1)), np.linalg.norm(split.block(sys.H, -1, 1)))
    if leak > VECTOR_TOL * max(1.0, float(np.linalg.norm(sys.H))):
        raise StructureError(f"H does not commute with tau (sector leakage {leak:.3e})")

    src = _orientation(sys, split)
    eigenpairs = sector_eigenpairs(sys.H, sys.tau)
    values = [p[0] for p in eigenpairs]
    groups = matops.group_eigenvalues(values, rel_tol)
    if rng is not None:
        eigenpairs = _remix(eigenpairs, groups, rng)

    radius = max(1.0, float(np.max(np.abs(values))))
    zero_thr = rel_tol * radius
    P = sys.protected_projector
    report = PairingReport(
        source_grade=src,
        eigenpairs=eigenpairs,
        groups=groups,
        gap_histogram=matops.gap_histogram([values[g[0]] for g in groups]),
    )
    reps = {gi: complex(np.mean([values[i] for i in g])) for gi, g in enumerate(groups)}

    for gi, g in enumerate(groups):
        lam = reps[gi]
        if abs(lam) <= zero_thr:
            report.unpaired += [Unpaired(lam, eigenpairs[i][2], eigenpairs[i][1], "zero-mode") for i in g]
            continue
        if abs(lam.imag) > zero_thr:
            if lam.imag > 0:
                partner = [reps[k] for k, h in enumerate(groups)
                           if abs(reps[k] - lam.conjugate()) <= zero_thr and len(h) == len(g)]
                if partner:
                    report.complex_pairs.append((lam, partner[0]))
                else:
                    report.failures.append({"value": complex_pair(lam),
                                            "reason": "complex eigenvalue without conjugate partner"})
            continue

        images = []
        for i in g:
            _, grade, psi = eigenpairs[i]
            if grade != src:
                continue
            if np.linalg.norm(P @ psi - psi) > VECTOR_TOL:
                report.unpaired.append(Unpaired(lam, psi, grade, "truncation-edge"))
                continue
            phi = sys.Q @ psi
            scale = np.linalg.norm(phi)
            if scale <= VECTOR_TOL:
                report.failures.append({"value": complex_pair(lam), "reason": "Q annihilates eigenvector"})
                continue
            phi = phi / scale
            eig_res = np.linalg.norm(sys.H @ phi - lam * phi)
            grade_res = np.linalg.norm(sys.tau @ phi + src * phi)
            if eig_res > VECTOR_TOL * radius or grade_res > VECTOR_TOL:
                report.failures.append({
                    "value": complex_pair(lam),
                    "reason": "Q psi is not an eigenvector of the opposite grade",
                    "eigenResidual": float(eig_res),
                    "gradeResidual": float(grade_res),
                })
                continue
            images.append(phi)
            report.pairs.append(Pair(
                value=complex(lam.real),
                source_grade=src,
                source_vector=psi,
                target_vector=phi,
                eta_norm_source=sys.eta.norm(psi),
                eta_norm_target=sys.eta.norm(phi),
            ))

        # target vectors of this level that no source vector maps onto
        Phi = np.column_stack(images) if images else np.zeros((sys.dim, 0))
        for i in g:
            _, grade, t = eigenpairs[i]
            if grade == src:
                continue
            if Phi.shape[1]:
                coef, *_ = np.linalg.lstsq(Phi, t, rcond=None)
                if np.linalg.norm(Phi @ coef - t) <= VECTOR_TOL:
                    continue
            report.unpaired.append(Unpaired(lam, t, grade, "no-source-partner"))

    return report


# ── Theorem and Corollary ────────────────────────────────────────────────────

def sign_theorem_check(sys: PseudoSusySystem, report: Optional[PairingReport] = None,
                       tol: float = DEFAULT_TOL) -> List[Check]:
    """
    Per pair: sign(<<Q psi, Q psi>>) = sign(E) sign(<<psi, psi>>), together
    with the magnitude relation, eta-orthogonality of eigenvectors of distinct
    real eigenvalues, <<psi, Q psi>> = 0, and the implication
    "some eigenvalue is negative => eta is indefinite".
    """
    report = report or pair_spectrum(sys)
    eta = sys.eta

    per_pair, worst_mag, mag_scale, worst_cross = [], 0.0, 1.0, 0.0
    for p in report.pairs:
        e = p.value.real
        expected = int(np.sign(e) * np.sign(p.eta_norm_source))
        got = int(np.sign(p.eta_norm_target))
        per_pair.append({"value": e, "signSource": int(np.sign(p.eta_norm_source)),
                         "signTarget": got, "expected": expected, "pass": got == expected})
        # eigenvectors are normalised, so compare <<Q psi>> through the unnormalised image
        raw = sys.Q @ p.source_vector
        lhs = eta.norm(raw)
        rhs = 2 * e * p.eta_norm_source
        worst_mag = max(worst_mag, abs(lhs - rhs))
        mag_scale = max(mag_scale, abs(rhs))
        worst_cross = max(worst_cross, abs(eta.inner(p.source_vector, p.target_vector)))

    # eta-orthogonality across distinct real eigenvalues
    vals = [complex(np.mean([report.eigenpairs[i][0] for i in g])) for g in report.groups]
    radius = max(1.0, max((abs(v) for v in vals), default=1.0))
    worst_orth = 0.0
    for a in range(len(report.groups)):
        if abs(vals[a].imag) > ZERO_EIG_REL * radius:
            continue
        for b in range(a + 1, len(report.groups)):
            if abs(vals[b].imag) > ZERO_EIG_REL * radius:
                continue
            for i in report.groups[a]:
                for j in report.groups[b]:
                    worst_orth = max(worst_orth, abs(eta.inner(report.eigenpairs[i][2],
                                                               report.eigenpairs[j][2])))

    eta_scale = max(1.0, float(np.linalg.norm(eta.matrix, 2)))
    negative = any(v.real < -ZERO_EIG_REL * radius and abs(v.imag) <= ZERO_EIG_REL * radius for v in vals)
    indefinite = eta.inertia.is_indefinite
    return [
        Verdict("pairing by Q", report.passed,
                {"pairs": len(report.pairs), "failures": report.failures}),
        Verdict("sign(<<Q psi, Q psi>>) = sign(E) sign(<<psi, psi>>)",
                all(d["pass"] for d in per_pair), {"pairs": per_pair}),
        RelationResidual("<<Q psi, Q psi>> = 2E <<psi, psi>>", worst_mag, tol * mag_scale),
        RelationResidual("<<psi, Q psi>> = 0", worst_cross, tol * eta_scale),
        RelationResidual("eta-orthogonality of distinct eigenvalues", worst_orth, tol * eta_scale),
        Verdict("negative eigenvalue implies indefinite eta", (not negative) or indefinite,
                {"negativeEigenvalue": negative, "etaIndefinite": indefinite,
                 "inertia": eta.inertia.to_dict()}),
    ]


def corollary_check(sys: PseudoSusySystem, report: Optional[PairingReport] = None,
                    tol: float = DEFAULT_TOL) -> Verdict:
    """When eta = tau, every nonzero real eigenvalue of H is negative."""
    applicable = float(np.linalg.norm(sys.eta.matrix - sys.tau)) <= tol * max(1.0, float(np.linalg.norm(sys.tau)))
    report = report or pair_spectrum(sys)
    vals = [complex(np.mean([report.eigenpairs[i][0] for i in g])) for g in report.groups]
    radius = max(1.0, max(abs(v) for v in vals))
    thr = ZERO_EIG_REL * radius
    nonzero_real = [v.real for v in vals if abs(v.imag) <= thr and abs(v) > thr]
    positives = [v for v in nonzero_real if v > 0]
    return Verdict(
        "eta = tau implies nonzero real eigenvalues negative",
        (not applicable) or not positives,
        {"applicable": applicable, "nonzeroRealEigenvalues": len(nonzero_real),
         "positive": positives},
    )
