"""
suites.py — Assemble SuiteReports for the phermion-lab commands.

One function per command, each taking a RunConfig and returning a
SuiteReport. The CLI (tools/phermion_lab.py) only formats and chooses exit
codes; utils/test_tools.py drives the same functions through the CLI.

Usage:

    from utils.config import RunConfig
    from utils.suites import run

    report = run(RunConfig(command="lie", epsilon=-1))
    report.passed, report.counts()
"""

from __future__ import annotations

import time
from typing import Callable, Dict, List, Optional

import numpy as np
import scipy.linalg

from utils import algebra, liealg, matops, multiphermion, oscillator, pseudosusy
from utils.config import RunConfig, parse_eta_spec
from utils.reports import Check, RelationResidual, SuiteReport, Verdict, matrix_entries

PROPERTY_PAIRS = 500
PROPERTY_CONGRUENCES = 100
PROPERTY_OBSTRUCTIONS = 100
PROPERTY_CONJUGATIONS = 20

ALL_MULTI_ELLS = (2, 3, 4, 5)
ALL_PHERMION_ETA = "diag:4,1"


# ----------------------------
# verify-algebra
# ----------------------------


def _eta_from(cfg: RunConfig) -> Optional[np.ndarray]:
    return parse_eta_spec(cfg.eta_spec) if cfg.eta_spec else None


def _metric_classification(rep: algebra.LadderRep, tol: float) -> Verdict:
    """The solutions of eta c# = c^dagger eta are exactly the multiples of rep.eta."""
    sols = algebra.classify_metrics(rep.c, rep.c_star, tol)
    target = rep.eta.matrix / np.linalg.norm(rep.eta.matrix)
    aligned = False
    if len(sols) == 1:
        s = sols[0].matrix / np.linalg.norm(sols[0].matrix)
        aligned = min(np.linalg.norm(s - target), np.linalg.norm(s + target)) <= 1e-8
    return Verdict("metric solutions = span{eta}", aligned, {
        "solutionDim": len(sols),
        "solutions": [matrix_entries(s.matrix) for s in sols],
        "inertias": [s.inertia.to_dict() for s in sols],
    })


def run_verify_algebra(cfg: RunConfig) -> SuiteReport:
    tol = cfg.tolerance
    rep = algebra.make_species(cfg.species, _eta_from(cfg), cfg.truncation, tol)
    report = SuiteReport(command="verify-algebra", config=cfg.to_dict())
    report.add("relations", algebra.verify_species(rep, tol))
    report.data["rep"] = algebra.rep_to_dict(rep)
    report.data["metric"] = rep.eta.to_dict()
    report.data["physicalStates"] = algebra.physical_state_count(rep, tol)

    if rep.two_level:
        report.add("metric classification", [_metric_classification(rep, tol)])
        audit = algebra.audit_unified_commutator(rep, tol)
        report.data["unifiedCommutatorAudit"] = {k: r.to_dict() for k, r in audit.items()}
    if rep.species is algebra.Species.PHERMION:
        report.add("fermion equivalence", algebra.fermion_map_checks(rep, tol))
    if rep.species is algebra.Species.ABNORMAL_PHERMION:
        report.add("complexification", algebra.complexify(rep, tol).checks)
        bound = algebra.abnormal_fermion_bound(rep.c)
        report.add("definite metric bound", [Verdict(
            "min eig {c, c^dagger} >= 0, so eta = 1 cannot give -1", bound >= -tol,
            {"smallestEigenvalue": bound})])
    return report


# ----------------------------
# oscillator
# ----------------------------


def oscillator_report(sys: oscillator.CompositeSystem, cfg: RunConfig) -> SuiteReport:
    tol = cfg.tolerance
    report = SuiteReport(command="oscillator", config=cfg.to_dict())
    ps = pseudosusy.PseudoSusySystem.from_composite(sys)

    report.add("pseudo-susy algebra", pseudosusy.verify_algebra(ps, tol))
    report.add("relative statistics", oscillator.relative_statistics_checks(sys, tol))
    form = pseudosusy.two_component(ps, tol)
    report.add("two-component form", form.checks)
    pairing = pseudosusy.pair_spectrum(ps)
    report.add("pairing and sign theorem", pseudosusy.sign_theorem_check(ps, pairing, tol))
    report.add("corollary", [pseudosusy.corollary_check(ps, pairing, tol)])
    if sys.kind == oscillator.BOSON_PHERMION:
        report.add("similarity to susy", oscillator.similarity_to_susy(sys, tol))

    doc = oscillator.system_to_dict(sys)
    doc.pop("checks")
    doc["sourceGrade"] = form.source_grade
    doc["pairing"] = pairing.to_dict()
    report.data["system"] = doc
    return report


def run_oscillator(cfg: RunConfig) -> SuiteReport:
    sys = oscillator.build_system(cfg.kind, cfg.energy, cfg.truncation, _eta_from(cfg), cfg.tolerance)
    return oscillator_report(sys, cfg)


# ----------------------------
# multi
# ----------------------------


def multi_report(ell: int, cfg: RunConfig) -> SuiteReport:
    tol = cfg.tolerance
    report = SuiteReport(command="multi", config=cfg.to_dict())
    sys = multiphermion.build_multi(ell)
    states = multiphermion.occupation_basis(sys)
    phys = multiphermion.physical_subspace(sys, states)
    ops = multiphermion.physical_ops(sys)
    sweep = multiphermion.verify_phys_commutators(sys, ops, tol)

    report.add("relative fermi statistics", multiphermion.rel_fermi_checks(sys, tol))
    report.add("inner product", multiphermion.inner_product_checks(sys, states, tol))
    report.add("physical subspace", [
        Verdict("physical dim = 2^(ell-1)", phys.dim == 2 ** (ell - 1),
                {"physicalDim": phys.dim, "expected": 2 ** (ell - 1)}),
        Verdict("physical states have eta-norm +1",
                all(abs(s.eta_norm - 1.0) <= tol for s in phys.states), {}),
        multiphermion.fermion_dimension_identity(sys, phys),
        multiphermion.physical_span_check(sys, ops, phys, tol),
    ])
    report.add("physical operators", multiphermion.physical_ops_checks(sys, ops, phys, tol))
    for name, checks in sweep.items():
        report.add(name, checks)

    report.data["system"] = {
        "ell": ell,
        "dim": sys.dim,
        "physicalDim": phys.dim,
        "metricInertia": sys.inertia.to_dict(),
        "singleSitePhysicalDim": multiphermion.single_site_physical_dimension(),
        "innerProductDiagonal": [int(np.sign(s.eta_norm)) for s in states],
        "states": [s.to_dict() for s in states],
        "commutatorChecks": [
            {"tuple": r.detail["tuple"], "residual": r.residual, "pass": r.passed,
             "termBreakdown": r.detail["termBreakdown"], "derivedResidual": r.detail["derivedResidual"]}
            for r in sweep["phys-2"]
        ],
    }
    return report


def run_multi(cfg: RunConfig) -> SuiteReport:
    return multi_report(cfg.ell, cfg)


# ----------------------------
# lie
# ----------------------------


def lie_report(epsilon: int, cfg: RunConfig) -> SuiteReport:
    tol = cfg.tolerance
    report = SuiteReport(command="lie", config=cfg.to_dict())
    t = liealg.build_j_triple(epsilon)
    brackets = liealg.verify_brackets(t, tol)
    report.add("brackets", brackets)
    report.add("hermiticity", liealg.hermiticity_checks(t, tol))
    report.add("unified commutator", [liealg.unified_commutator_check(t, tol)])
    report.add("casimir (supplementary)", liealg.casimir_checks(t, tol))
    report.data["triple"] = liealg.triple_to_dict(t, brackets)
    return report


def run_lie(cfg: RunConfig) -> SuiteReport:
    return lie_report(cfg.epsilon, cfg)


# ----------------------------
# randomized property suites
# ----------------------------


def _relative(lhs: np.ndarray, rhs: np.ndarray) -> float:
    scale = max(1.0, float(np.linalg.norm(lhs)), float(np.linalg.norm(rhs)))
    return float(np.linalg.norm(lhs - rhs)) / scale


def property_checks(seed: int, tol: float, truncation: int) -> Dict[str, List[Check]]:
    rng = matops.rng_for(seed)
    out: Dict[str, List[Check]] = {}

    invol, antimul = 0.0, 0.0
    for k in range(PROPERTY_PAIRS):
        A, B = matops.random_complex(rng, 4), matops.random_complex(rng, 4)
        eta = algebra.MetricOperator.from_matrix(
            matops.random_metric(rng, 4, n_minus=k % 3), tol)
        As = algebra.pseudo_adjoint(A, eta)
        invol = max(invol, _relative(algebra.pseudo_adjoint(As, eta), A))
        antimul = max(antimul, _relative(algebra.pseudo_adjoint(A @ B, eta),
                                         algebra.pseudo_adjoint(B, eta) @ As))
    out["pseudo-adjoint"] = [
        RelationResidual("(A#)# = A", invol, tol / 10, {"trials": PROPERTY_PAIRS}),
        RelationResidual("(AB)# = B# A#", antimul, tol / 10, {"trials": PROPERTY_PAIRS}),
    ]

    mismatches = []
    for k in range(PROPERTY_CONGRUENCES):
        H = matops.random_hermitian(rng, 4)
        S = matops.random_invertible(rng, 4)
        before, after = matops.inertia_of(H), matops.inertia_of(S.conj().T @ H @ S)
        if before != after:
            mismatches.append({"trial": k, "before": before.to_dict(), "after": after.to_dict()})
    out["sylvester"] = [Verdict("inertia invariant under congruence", not mismatches,
                                {"trials": PROPERTY_CONGRUENCES, "mismatches": mismatches})]

    worst = 0.0
    for _ in range(PROPERTY_OBSTRUCTIONS):
        u, v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        worst = max(worst, _relative(algebra.obstruction_demo(u, v),
                                     -(abs(u) - abs(v)) ** 2 * np.eye(2)))
    out["obstruction"] = [RelationResidual("{sigma, sigma#} = -(|u|-|v|)^2", worst, tol,
                                           {"trials": PROPERTY_OBSTRUCTIONS})]

    indefinite = []
    for k in range(PROPERTY_CONJUGATIONS):
        S = matops.random_invertible(rng, 2, min_sv=0.5)
        S_inv = matops.inverse(S)
        sols = algebra.classify_metrics(S @ algebra.ALPHA @ S_inv,
                                        S @ algebra.ALPHA.conj().T @ S_inv, tol)
        if len(sols) != 1 or not sols[0].inertia.is_definite:
            indefinite.append({"trial": k, "solutionDim": len(sols)})
    out["phermion metrics"] = [Verdict("conjugated fermion reps admit only definite metrics",
                                       not indefinite,
                                       {"trials": PROPERTY_CONJUGATIONS, "failures": indefinite})]

    systems = [
        oscillator.build_boson_fermion(1.0, truncation),
        oscillator.build_boson_phermion(1.0, truncation, np.diag([4.0, 1.0])),
        oscillator.build_boson_abnormal_phermion(-1.0, truncation),
    ]
    round_trip = []
    for sys in systems:
        ps = pseudosusy.PseudoSusySystem.from_composite(sys)
        Q, H, eta = pseudosusy.reassemble(pseudosusy.two_component(ps, tol))
        err = max(_relative(Q, ps.Q), _relative(H, ps.H), _relative(eta, ps.eta.matrix))
        round_trip.append(RelationResidual(f"two-component round trip ({sys.kind})", err, tol / 10))
    out["two-component round trip"] = round_trip

    doubled = _doubled(systems[2])
    base = pseudosusy.pair_spectrum(doubled)
    mixed = pseudosusy.pair_spectrum(doubled, rng=rng)
    out["pairing under remixing"] = [Verdict(
        "pair count and eta-norm signs invariant under degenerate remixing",
        _pair_signature(base) == _pair_signature(mixed),
        {"pairs": len(base.pairs), "remixedPairs": len(mixed.pairs)})]
    return out


def _doubled(sys: oscillator.CompositeSystem) -> pseudosusy.PseudoSusySystem:
    """Two uncoupled copies of a system, so every level is degenerate within its grade sector."""
    d = scipy.linalg.block_diag
    return pseudosusy.PseudoSusySystem(
        H=d(sys.H, sys.H), Q=d(sys.Q, sys.Q), tau=d(sys.tau, sys.tau),
        eta=algebra.MetricOperator.from_matrix(d(sys.eta.matrix, sys.eta.matrix)),
        protected_projector=d(sys.protected_projector, sys.protected_projector),
        label=f"{sys.kind} x2",
    )


def _pair_signature(report: pseudosusy.PairingReport):
    return sorted((round(p.value.real, 6), int(np.sign(p.eta_norm_source)), int(np.sign(p.eta_norm_target)))
                  for p in report.pairs)


# ----------------------------
# all
# ----------------------------


def run_all(cfg: RunConfig) -> SuiteReport:
    report = SuiteReport(command="all", config=cfg.to_dict())

    for species in ("boson", "fermion", "phermion", "abnormal-phermion"):
        eta_spec = ALL_PHERMION_ETA if species == "phermion" else None
        sub = run_verify_algebra(RunConfig(command="verify-algebra", species=species, eta_spec=eta_spec,
                                           truncation=cfg.truncation, tolerance=cfg.tolerance))
        _merge(report, sub, f"verify-algebra[{species}]")

    for kind, E, eta in (("boson-fermion", 1.0, None),
                         ("boson-phermion", 1.0, ALL_PHERMION_ETA),
                         ("boson-abnormal-phermion", -1.0, None)):
        sub_cfg = RunConfig(command="oscillator", kind=kind, E=E, eta_spec=eta,
                            truncation=cfg.truncation, tolerance=cfg.tolerance)
        _merge(report, run_oscillator(sub_cfg), f"oscillator[{kind}]")

    for ell in ALL_MULTI_ELLS:
        _merge(report, run_multi(RunConfig(command="multi", ell=ell, tolerance=cfg.tolerance)),
               f"multi[ell={ell}]")

    for eps in (1, -1):
        _merge(report, run_lie(RunConfig(command="lie", epsilon=eps, tolerance=cfg.tolerance)),
               f"lie[{eps:+d}]")

    for name, checks in property_checks(cfg.seed, cfg.tolerance, cfg.truncation).items():
        report.add(f"properties: {name}", checks)
    return report


def _merge(into: SuiteReport, sub: SuiteReport, label: str) -> None:
    for section, checks in sub.sections.items():
        into.add(f"{label}: {section}", checks)
    into.data[label] = {"pass": sub.passed, "summary": sub.counts()}


# ----------------------------
# dispatch
# ----------------------------


COMMANDS: Dict[str, Callable[[RunConfig], SuiteReport]] = {
    "verify-algebra": run_verify_algebra,
    "oscillator": run_oscillator,
    "multi": run_multi,
    "lie": run_lie,
    "all": run_all,
}


def run(cfg: RunConfig) -> SuiteReport:
    start = time.perf_counter()
    report = COMMANDS[cfg.command](cfg)
    report.wall_time_ms = (time.perf_counter() - start) * 1000.0
    return report
