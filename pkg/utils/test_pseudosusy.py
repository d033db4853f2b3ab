"""Tests for utils/pseudosusy.py: algebra checks, two-component form, pairing, sign theorem."""

from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg

from utils import matops, oscillator
from utils.algebra import MetricOperator
from utils.errors import DomainError, StructureError
from utils.oscillator import TWO_LEVEL
from utils.pseudosusy import (
    PseudoSusySystem,
    corollary_check,
    pair_spectrum,
    reassemble,
    sign_theorem_check,
    two_component,
    verify_algebra,
)
from utils.reports import all_passed

NON_DIAGONAL_METRIC = np.array([[2.0, 1.0], [1.0, 2.0]])


def failing(checks):
    return sorted(c.name for c in checks if not c.passed)


def make(kind, E=None, truncation=4, eta2=None):
    if E is None:
        E = -1.0 if kind == "boson-abnormal-phermion" else 1.0
    return PseudoSusySystem.from_composite(oscillator.build_system(kind, E, truncation, eta2))


@pytest.fixture(scope="module")
def bf():
    return make("boson-fermion")


@pytest.fixture(scope="module")
def bap():
    return make("boson-abnormal-phermion")


# ── Algebra ──────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("kind,eta2", [
    ("boson-fermion", None),
    ("boson-phermion", np.diag([4.0, 1.0])),
    ("boson-abnormal-phermion", None),
])
def test_verify_algebra_passes(kind, eta2):
    checks = verify_algebra(make(kind, truncation=6, eta2=eta2))
    assert len(checks) == 8
    assert all_passed(checks), failing(checks)


def test_adjoint_supercharge_flips_orientation(bf):
    flipped = bf.with_operators(Q=bf.Q.conj().T)
    assert all_passed(verify_algebra(flipped))
    assert two_component(bf).source_grade == -1
    assert two_component(flipped).source_grade == 1


def test_non_nilpotent_supercharge_fails(bf):
    broken = bf.with_operators(Q=bf.Q + bf.Q.conj().T)
    assert "Q^2 = 0" in failing(verify_algebra(broken))


def test_non_diagonal_metric_grading():
    sys = make("boson-phermion", eta2=NON_DIAGONAL_METRIC)
    assert failing(verify_algebra(sys)) == ["[tau, eta] = 0", "tau^dagger = tau"]


def test_untruncated_system():
    sys = PseudoSusySystem.untruncated(
        H=np.diag([0.0, 1.0, 1.0, 2.0]),
        Q=np.zeros((4, 4)),
        tau=np.diag([1.0, -1.0, 1.0, -1.0]),
        eta=np.eye(4),
    )
    np.testing.assert_allclose(sys.protected_projector, np.eye(4))
    # Q = 0 cannot reproduce a nonzero H
    assert failing(verify_algebra(sys)) == ["{Q, Q#} = 2H (protected subspace)"]


# ── Two-component form ───────────────────────────────────────────────────────

def test_two_component_boson_fermion():
    sys = make("boson-fermion", truncation=3)
    form = two_component(sys)
    assert form.source_grade == -1 and form.target_grade == 1
    a_dagger = np.diag(np.sqrt([1.0, 2.0, 3.0]), k=-1)
    np.testing.assert_allclose(form.D, np.sqrt(2.0) * a_dagger, atol=1e-12)
    assert all_passed(form.checks), failing(form.checks)


def test_two_component_abnormal_metric_blocks(bap):
    form = two_component(bap)
    np.testing.assert_allclose(form.eta_plus, np.eye(5), atol=1e-14)
    np.testing.assert_allclose(form.eta_minus, -np.eye(5), atol=1e-14)
    assert all_passed(form.checks), failing(form.checks)


@pytest.mark.parametrize("kind,eta2", [
    ("boson-abnormal-phermion", None),
    ("boson-phermion", NON_DIAGONAL_METRIC),
])
def test_two_component_reassembles(kind, eta2):
    sys = make(kind, eta2=eta2)
    Q, H, eta = reassemble(two_component(sys))
    np.testing.assert_allclose(Q, sys.Q, atol=1e-10)
    np.testing.assert_allclose(H, sys.H, atol=1e-10)
    np.testing.assert_allclose(eta, sys.eta.matrix, atol=1e-10)


def test_two_component_rejects_leaking_supercharge(bf):
    with pytest.raises(StructureError):
        two_component(bf.with_operators(Q=bf.Q + 0.1 * bf.tau))


def test_two_component_rejects_mixing_metric(bf):
    mixing = MetricOperator.from_matrix(np.eye(10) + 0.1 * (bf.Q + bf.Q.conj().T) / np.sqrt(2))
    with pytest.raises(StructureError):
        two_component(bf.with_operators(eta=mixing))


# ── Pairing ──────────────────────────────────────────────────────────────────

def test_pairing_boson_fermion(bf):
    report = pair_spectrum(bf)
    assert report.passed, report.failures
    assert report.source_grade == -1
    assert report.paired_values() == [1.0, 2.0, 3.0, 4.0]
    reasons = sorted((round(u.value.real, 9), u.reason) for u in report.unpaired)
    assert reasons == [(0.0, "zero-mode"), (5.0, "truncation-edge")]
    assert all(p.eta_norm_source > 0 and p.eta_norm_target > 0 for p in report.pairs)


def test_pairing_abnormal(bap):
    report = pair_spectrum(bap)
    assert report.passed, report.failures
    assert report.paired_values() == [-4.0, -3.0, -2.0, -1.0]
    for p in report.pairs:
        assert p.eta_norm_source == pytest.approx(-1.0)
        assert p.eta_norm_target == pytest.approx(1.0)
        assert p.to_dict()["signMinus"] == -1
        assert p.to_dict()["signPlus"] == 1


def test_pairing_detects_broken_commutation(bf):
    broken = bf.with_operators(H=bf.H + 0.3 * oscillator.build_boson_fermion(1.0, 4).op(TWO_LEVEL, "n"))
    assert "[Q, H] = 0" in failing(verify_algebra(broken))
    report = pair_spectrum(broken)
    assert not report.passed
    assert report.failures[0]["reason"] == "Q psi is not an eigenvector of the opposite grade"


def test_pairing_rejects_defective_hamiltonian(bf):
    H = np.zeros((10, 10), dtype=complex)
    H[0, 2] = 1.0
    with pytest.raises(DomainError):
        pair_spectrum(bf.with_operators(H=H))


def test_pairing_rejects_sector_mixing_hamiltonian(bf):
    with pytest.raises(StructureError):
        pair_spectrum(bf.with_operators(H=bf.H + 0.5 * (bf.Q + bf.Q.conj().T)))


def test_pairing_non_diagonal_metric():
    sys = make("boson-phermion", eta2=NON_DIAGONAL_METRIC)
    report = pair_spectrum(sys)
    assert report.passed, report.failures
    assert report.paired_values() == [1.0, 2.0, 3.0, 4.0]
    assert all_passed(sign_theorem_check(sys, report))


def test_pairing_invariant_under_remixing(bap):
    d = scipy.linalg.block_diag
    doubled = PseudoSusySystem(
        H=d(bap.H, bap.H), Q=d(bap.Q, bap.Q), tau=d(bap.tau, bap.tau),
        eta=MetricOperator.from_matrix(d(bap.eta.matrix, bap.eta.matrix)),
        protected_projector=d(bap.protected_projector, bap.protected_projector),
    )
    base = pair_spectrum(doubled)
    for seed in (1, 2, 3):
        mixed = pair_spectrum(doubled, rng=matops.rng_for(seed))
        assert mixed.passed, mixed.failures
        assert len(mixed.pairs) == len(base.pairs) == 8
        assert sorted(np.sign(p.eta_norm_target) for p in mixed.pairs) == [1.0] * 8


def test_gap_histogram_is_reported(bf):
    hist = pair_spectrum(bf).gap_histogram
    assert hist["smallestRelativeGap"] == pytest.approx(0.2)


# ── Sign theorem / corollary ─────────────────────────────────────────────────

@pytest.mark.parametrize("kind,eta2", [
    ("boson-fermion", None),
    ("boson-phermion", np.diag([4.0, 1.0])),
    ("boson-abnormal-phermion", None),
])
def test_sign_theorem(kind, eta2):
    sys = make(kind, eta2=eta2)
    checks = sign_theorem_check(sys)
    assert all_passed(checks), failing(checks)
    implication = checks[-1]
    assert implication.detail["negativeEigenvalue"] == (kind == "boson-abnormal-phermion")


def test_corollary(bf, bap):
    applied = corollary_check(bap)
    assert applied.passed and applied.detail["applicable"]
    assert applied.detail["nonzeroRealEigenvalues"] == 5

    skipped = corollary_check(bf)
    assert skipped.passed and not skipped.detail["applicable"]


@pytest.mark.parametrize("truncation", range(2, 13))
@pytest.mark.parametrize("kind", ["boson-fermion", "boson-phermion", "boson-abnormal-phermion"])
def test_pairing_on_evenly_spaced_spectra(kind, truncation):
    sys = make(kind, truncation=truncation)
    report = pair_spectrum(sys)
    assert len(report.pairs) == truncation
    hist = report.gap_histogram
    assert sum(hist["counts"]) == len(report.groups) - 1
    assert hist["smallestRelativeGap"] == pytest.approx(1.0 / (truncation + 1))
    assert all_passed(sign_theorem_check(sys))
