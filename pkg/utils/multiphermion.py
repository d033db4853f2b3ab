"""
multiphermion.py — ell abnormal phermions with relative fermi statistics.

Site i (1-based) carries

    a_i  = sigma3^(i-1) ⊗ (i*alpha) ⊗ 1^(ell-i)
    a_i# = sigma3^(i-1) ⊗ (i*alpha^dagger) ⊗ 1^(ell-i)

with eta = sigma3^ell, so that {a_i, a_j} = 0 and {a_i, a_j#} = -delta_ij.
The sigma3 string on the left makes operators on different sites
anticommute; eta is also the parity operator (-1)^(total number).

Even-occupation states have eta-norm +1 and span the physical subspace
(dimension 2^(ell-1)). The composite operators

    alpha_ij  = a_i a_j            (i < j)
    alpha+_ij = a_j# a_i#          (i < j)
    beta_ij   = a_i# a_j           (all i, j)

preserve it.

Every operator here is a CSR matrix. Site operators and their products are
signed partial permutations (at most one nonzero per row and per column),
which keeps ell = 12 (dimension 4096) cheap and lets the vacuum and the
span of the physical creators be read off from sparsity patterns.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from utils import algebra, matops
from utils.algebra import ALPHA, SIGMA3
from utils.config import ELL_MAX, ELL_MIN
from utils.errors import ConfigError, StructureError
from utils.matops import DEFAULT_TOL, ZERO_EIG_REL, Inertia
from utils.reports import Check, RelationResidual, Verdict, check_relation, complex_pair

Pair = Tuple[int, int]
Sparse = scipy.sparse.csr_matrix


@dataclass(frozen=True)
class MultiPhermionSystem:
    ell: int
    annihilators: List[Sparse] = field(repr=False)
    creators: List[Sparse] = field(repr=False)
    eta_diagonal: np.ndarray = field(repr=False)
    total_number: Sparse = field(repr=False)

    @property
    def dim(self) -> int:
        return 2 ** self.ell

    @property
    def eta(self) -> Sparse:
        """sigma3^ell as a sparse diagonal; its own inverse."""
        return scipy.sparse.diags(self.eta_diagonal, format="csr")

    @property
    def inertia(self) -> Inertia:
        n_plus = int(np.sum(self.eta_diagonal > 0))
        return Inertia(n_plus, self.dim - n_plus, 0)

    def a(self, i: int) -> Sparse:
        return self.annihilators[i - 1]

    def a_sharp(self, i: int) -> Sparse:
        return self.creators[i - 1]

    @property
    def sites(self) -> range:
        return range(1, self.ell + 1)


def _site_operator(ell: int, i: int, local: np.ndarray) -> Sparse:
    factors = [SIGMA3] * (i - 1) + [local] + [algebra.I2] * (ell - i)
    return matops.sparse_kron_all(factors)


def _pattern(A: Sparse, what: str) -> Sparse:
    """A without stored zeros; raises unless A is a signed partial permutation."""
    P = scipy.sparse.csr_matrix(A, copy=True)
    P.eliminate_zeros()
    if P.nnz and (P.getnnz(axis=0).max() > 1 or P.getnnz(axis=1).max() > 1):
        raise StructureError(f"{what} has a row or column with more than one nonzero entry")
    return P


def build_multi(ell: int) -> MultiPhermionSystem:
    if not isinstance(ell, (int, np.integer)) or not ELL_MIN <= ell <= ELL_MAX:
        raise ConfigError(f"ell must be an integer in [{ELL_MIN}, {ELL_MAX}], got {ell!r}")
    ann = [_site_operator(ell, i, 1j * ALPHA) for i in range(1, ell + 1)]
    cre = [_site_operator(ell, i, 1j * ALPHA.conj().T) for i in range(1, ell + 1)]
    d = matops.sparse_kron_all([SIGMA3] * ell).diagonal().real
    N_tot = scipy.sparse.csr_matrix((2 ** ell, 2 ** ell), dtype=complex)
    for a, c in zip(ann, cre):
        N_tot = N_tot - c @ a
    return MultiPhermionSystem(ell=ell, annihilators=ann, creators=cre, eta_diagonal=d, total_number=N_tot)


def pseudo_adjoint(sys: MultiPhermionSystem, A: Sparse) -> Sparse:
    """A# = eta A^dagger eta (eta is diagonal with entries +-1)."""
    eta = sys.eta
    return scipy.sparse.csr_matrix(eta @ A.conj().T @ eta)


def parity_operator(sys: MultiPhermionSystem) -> Sparse:
    """(-1)^N_tot. With the sigma3-string realization this is eta itself."""
    return sys.eta


def rel_fermi_checks(sys: MultiPhermionSystem, tol: float = DEFAULT_TOL) -> List[RelationResidual]:
    out = []
    for i in sys.sites:
        out.append(check_relation(f"a{i}# = eta^-1 a{i}^dagger eta", sys.a_sharp(i),
                                  pseudo_adjoint(sys, sys.a(i)), tol))
    for i in sys.sites:
        for j in sys.sites:
            if i <= j:
                out.append(check_relation(f"{{a{i}, a{j}}} = 0",
                                          matops.anticommutator(sys.a(i), sys.a(j)), 0.0, tol))
            out.append(check_relation(f"{{a{i}, a{j}#}} = {'-1' if i == j else '0'}",
                                      matops.anticommutator(sys.a(i), sys.a_sharp(j)),
                                      -1.0 if i == j else 0.0, tol))
    return out


# ── Occupation basis ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class OccupationState:
    """(a_1#)^nu_1 ... (a_ell#)^nu_ell |0>, stored as amplitude * e_index."""

    occupations: Tuple[int, ...]
    index: int
    amplitude: complex
    eta_norm: float
    dim: int

    @property
    def parity(self) -> int:
        return sum(self.occupations) % 2

    @property
    def phase(self) -> complex:
        return self.amplitude / abs(self.amplitude)

    @property
    def vector(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index] = self.amplitude
        return v

    def to_dict(self) -> Dict[str, Any]:
        return {"occupations": list(self.occupations), "index": self.index,
                "etaNorm": self.eta_norm, "phase": complex_pair(self.phase)}


def vacuum(sys: MultiPhermionSystem) -> np.ndarray:
    """
    Simultaneous kernel of all site annihilators, normalised with a real
    positive entry. The nonzero columns of a signed partial permutation are
    independent, so the kernel is spanned by the basis vectors that every
    a_i sends to zero.
    """
    hit = np.zeros(sys.dim, dtype=bool)
    for i in sys.sites:
        hit |= _pattern(sys.a(i), f"a{i}").getnnz(axis=0) > 0
    kernel = np.flatnonzero(~hit)
    if kernel.size != 1:
        raise StructureError(f"vacuum is {kernel.size}-dimensional, expected 1")
    v = np.zeros(sys.dim, dtype=complex)
    v[kernel[0]] = 1.0
    return v


def occupation_basis(sys: MultiPhermionSystem) -> List[OccupationState]:
    """
    (a_1#)^nu_1 ... (a_ell#)^nu_ell |0>, for every nu in lexicographic order.
    The creator of the lowest site is applied last.
    """
    vac = vacuum(sys)
    states = []
    for nu in itertools.product((0, 1), repeat=sys.ell):
        v = vac
        for i in reversed(sys.sites):
            if nu[i - 1]:
                v = sys.a_sharp(i) @ v
        support = np.flatnonzero(np.abs(v) > ZERO_EIG_REL)
        if support.size != 1:
            raise StructureError(f"occupation state {nu} is not a single basis vector "
                                 f"({support.size} nonzero entries)")
        k = int(support[0])
        amp = complex(v[k])
        states.append(OccupationState(tuple(nu), k, amp, float(sys.eta_diagonal[k] * abs(amp) ** 2), sys.dim))
    return states


def _state_matrix(sys: MultiPhermionSystem, states: List[OccupationState]) -> Sparse:
    """Columns are the occupation states."""
    rows = [s.index for s in states]
    vals = [s.amplitude for s in states]
    return scipy.sparse.csr_matrix((vals, (rows, range(len(states)))), shape=(sys.dim, len(states)))


def inner_product_checks(sys: MultiPhermionSystem, states: List[OccupationState],
                         tol: float = DEFAULT_TOL) -> List[Check]:
    V = _state_matrix(sys, states)
    G = V.conj().T @ sys.eta @ V
    signs = [(-1) ** sum(s.occupations) for s in states]
    signs_ok = all(int(np.sign(s.eta_norm)) == sign for s, sign in zip(states, signs))
    misplaced = [list(s.occupations) for s in states
                 if s.index != int("".join(map(str, s.occupations)), 2)]
    counts = scipy.sparse.diags([float(sum(s.occupations)) for s in states], format="csr")
    return [
        check_relation("<<mu|nu>> = (-1)^(sum nu) delta_mu,nu", G,
                       scipy.sparse.diags(np.array(signs, dtype=float), format="csr"), tol),
        Verdict("eta-norm sign = (-1)^(sum nu)", signs_ok,
                {"diagonal": [int(np.sign(s.eta_norm)) for s in states]}),
        Verdict("|nu> lies on the basis vector with binary index nu", not misplaced,
                {"misplaced": misplaced}),
        check_relation("N_tot |nu> = (sum nu) |nu>", sys.total_number @ V, V @ counts, tol),
    ]


# ── Physical subspace ────────────────────────────────────────────────────────

@dataclass(frozen=True)
class PhysicalSubspace:
    states: List[OccupationState]
    projector: Sparse = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)


def physical_subspace(sys: MultiPhermionSystem, states: List[OccupationState] = None) -> PhysicalSubspace:
    states = states if states is not None else occupation_basis(sys)
    even = [s for s in states if s.parity == 0]
    V = _state_matrix(sys, even).tocsc()
    gram = (V.conj().T @ V).tocsc()
    P = V @ scipy.sparse.csr_matrix(scipy.sparse.linalg.spsolve(gram, V.conj().T.tocsc()))
    return PhysicalSubspace(states=even, projector=scipy.sparse.csr_matrix(P))


def single_site_physical_dimension() -> int:
    """An isolated abnormal phermion has one positive-norm state."""
    return algebra.physical_state_count(algebra.make_abnormal_phermion())


def fermion_dimension_identity(sys: MultiPhermionSystem, phys: PhysicalSubspace = None) -> Verdict:
    """dim(physical subspace of ell abnormal phermions) = dim(Fock space of ell-1 fermions)."""
    phys = phys or physical_subspace(sys)
    fermion_fock = int(np.prod([algebra.make_fermion().dim] * (sys.ell - 1)))
    return Verdict("physical dim = dim Fock(ell-1 fermions)", phys.dim == fermion_fock,
                   {"physicalDim": phys.dim, "fermionFockDim": fermion_fock})


def physical_span_check(sys: MultiPhermionSystem, ops: "PhysicalOperators",
                        phys: PhysicalSubspace, tol: float = DEFAULT_TOL) -> RelationResidual:
    """
    Products of physical creators on the vacuum span the physical subspace:
    the projector onto their span equals the even-sector projector. Each
    alpha+_ij maps basis vectors to multiples of basis vectors, so the span
    is tracked as a set of reachable basis indices.
    """
    patterns = [abs(_pattern(A, f"alpha+_{i}{j}")) for (i, j), A in sorted(ops.creators.items())]
    reach = np.abs(vacuum(sys)) > 0
    frontier = reach
    for _ in range(sys.ell // 2):
        hits = np.zeros(sys.dim, dtype=bool)
        for P in patterns:
            hits |= (P @ frontier.astype(float)) > 0
        frontier = hits & ~reach
        reach = reach | hits
    span = scipy.sparse.diags(reach.astype(complex), format="csr")
    return check_relation("span(alpha+ products |0>) = physical subspace",
                          span, phys.projector, tol,
                          detail={"spanDim": int(reach.sum())})


# ── Physical operators ───────────────────────────────────────────────────────

@dataclass(frozen=True)
class PhysicalOperators:
    creators: Dict[Pair, Sparse] = field(repr=False)
    annihilators: Dict[Pair, Sparse] = field(repr=False)
    shifts: Dict[Pair, Sparse] = field(repr=False)


def physical_ops(sys: MultiPhermionSystem) -> PhysicalOperators:
    pairs = [(i, j) for i in sys.sites for j in sys.sites if i < j]
    return PhysicalOperators(
        creators={(i, j): sys.a_sharp(j) @ sys.a_sharp(i) for i, j in pairs},
        annihilators={(i, j): sys.a(i) @ sys.a(j) for i, j in pairs},
        shifts={(i, j): sys.a_sharp(i) @ sys.a(j) for i in sys.sites for j in sys.sites},
    )


def physical_ops_checks(sys: MultiPhermionSystem, ops: PhysicalOperators,
                        phys: PhysicalSubspace, tol: float = DEFAULT_TOL) -> List[RelationResidual]:
    out = []
    vac = vacuum(sys)
    Q = scipy.sparse.identity(sys.dim, dtype=complex, format="csr") - phys.projector
    parity = parity_operator(sys)
    for (i, j), A in ops.annihilators.items():
        Ad = ops.creators[(i, j)]
        out += [
            check_relation(f"alpha_{i}{j}# = alpha+_{i}{j}", pseudo_adjoint(sys, A), Ad, tol),
            check_relation(f"alpha_{i}{j} |0> = 0", (A @ vac)[:, None], np.zeros((sys.dim, 1)), tol),
            check_relation(f"[alpha_{i}{j}, parity] = 0", matops.commutator(A, parity), 0.0, tol),
            check_relation(f"[alpha+_{i}{j}, parity] = 0", matops.commutator(Ad, parity), 0.0, tol),
            check_relation(f"alpha+_{i}{j} keeps the physical subspace",
                           Q @ Ad @ phys.projector, 0.0, tol),
        ]
    return out


def _delta(a: int, b: int) -> int:
    return 1 if a == b else 0


def _phys2_terms(i: int, j: int, k: int, l: int) -> Dict[str, int]:
    """Coefficients of the right-hand side of [alpha_ij, alpha+_kl] as printed."""
    return {
        "delta_ik delta_jl": _delta(i, k) * _delta(j, l),
        "-delta_ij delta_jk": -_delta(i, j) * _delta(j, k),
        "delta_ik beta_lj": _delta(i, k),
        "delta_jl beta_ki": _delta(j, l),
        "-delta_jk beta_li": -_delta(j, k),
        "-delta_il beta_kj": -_delta(i, l),
    }


def phys2_rhs(ops: PhysicalOperators, dim: int, i: int, j: int, k: int, l: int,
              identity_term: str = "printed") -> Sparse:
    """
    Right-hand side of [alpha_ij, alpha+_kl]. identity_term selects the
    second scalar term: "printed" (-delta_ij delta_jk) or "derived"
    (-delta_il delta_jk). Both vanish when i < j and k < l.
    """
    b = ops.shifts
    second = _delta(i, j) * _delta(j, k) if identity_term == "printed" else _delta(i, l) * _delta(j, k)
    terms = [
        (_delta(i, k) * _delta(j, l) - second, None),
        (_delta(i, k), b[(l, j)]),
        (_delta(j, l), b[(k, i)]),
        (-_delta(j, k), b[(l, i)]),
        (-_delta(i, l), b[(k, j)]),
    ]
    out = scipy.sparse.csr_matrix((dim, dim), dtype=complex)
    for coef, M in terms:
        if coef:
            out = out + coef * (scipy.sparse.identity(dim, dtype=complex, format="csr") if M is None else M)
    return out


def verify_phys_commutators(sys: MultiPhermionSystem, ops: PhysicalOperators = None,
                            tol: float = DEFAULT_TOL) -> Dict[str, List[RelationResidual]]:
    """
    Brute-force commutators against the closed forms, per index tuple.
    Returns {"phys-1": [...], "phys-2": [...], "shift-number": [...]}.
    Each phys-2 residual carries the active terms and the residual of the
    alternative identity term, so a disagreement can be localised.
    """
    ops = ops or physical_ops(sys)
    pairs = sorted(ops.annihilators)
    phys1, phys2 = [], []
    for (i, j), (k, l) in itertools.product(pairs, repeat=2):
        A_ij, A_kl = ops.annihilators[(i, j)], ops.annihilators[(k, l)]
        C_ij, C_kl = ops.creators[(i, j)], ops.creators[(k, l)]
        tup = [i, j, k, l]
        phys1.append(check_relation(f"[alpha_{i}{j}, alpha_{k}{l}] = 0",
                                    matops.commutator(A_ij, A_kl), 0.0, tol, detail={"tuple": tup}))
        phys1.append(check_relation(f"[alpha+_{i}{j}, alpha+_{k}{l}] = 0",
                                    matops.commutator(C_ij, C_kl), 0.0, tol, detail={"tuple": tup}))
        lhs = matops.commutator(A_ij, C_kl)
        derived = check_relation("derived", lhs, phys2_rhs(ops, sys.dim, i, j, k, l, "derived"), tol)
        terms = {name: c for name, c in _phys2_terms(i, j, k, l).items() if c}
        phys2.append(check_relation(
            f"[alpha_{i}{j}, alpha+_{k}{l}]", lhs, phys2_rhs(ops, sys.dim, i, j, k, l, "printed"), tol,
            detail={
                "tuple": tup,
                "termBreakdown": terms,
                "identityTermPrinted": -_delta(i, j) * _delta(j, k),
                "identityTermDerived": -_delta(i, l) * _delta(j, k),
                "derivedResidual": derived.residual,
            },
        ))
    shift = [
        check_relation(f"[beta_{i}{j}, N_tot] = 0", matops.commutator(B, sys.total_number), 0.0, tol)
        for (i, j), B in sorted(ops.shifts.items())
    ]
    return {"phys-1": phys1, "phys-2": phys2, "shift-number": shift}
