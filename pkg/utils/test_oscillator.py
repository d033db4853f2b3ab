"""Tests for utils/oscillator.py."""

from __future__ import annotations

import numpy as np
import pytest

from utils import algebra, oscillator
from utils.errors import AlgebraObstruction, ConfigError, DomainError, RangeError
from utils.oscillator import BOSON
from utils.reports import all_passed


@pytest.fixture(scope="module")
def bf():
    return oscillator.build_boson_fermion(E=1.0, truncation=4)


@pytest.fixture(scope="module")
def bap():
    return oscillator.build_boson_abnormal_phermion(E=-1.0, truncation=4)


def test_dimensions(bf):
    assert bf.dim == 10
    assert bf.op(BOSON, "c").shape == (10, 10)
    np.testing.assert_allclose(np.diag(bf.protected_projector).real, [1] * 8 + [0] * 2)


def test_boson_fermion_spectrum(bf):
    levels = oscillator.spectrum_table(bf)
    assert [round(lvl.value.real, 9) for lvl in levels] == [0, 1, 2, 3, 4, 5]
    assert [lvl.multiplicity for lvl in levels] == [1, 2, 2, 2, 2, 1]
    assert levels[0].grades == {"+": 1, "-": 0}
    assert all(lvl.grades == {"+": 1, "-": 1} for lvl in levels[1:5])
    assert levels[5].grades == {"+": 0, "-": 1}
    assert [lvl.edge for lvl in levels] == [False] * 5 + [True]
    assert levels[4].touches_truncation and not levels[3].touches_truncation


def test_ground_state(bf):
    ground = oscillator.basis_state(bf, 0, 1)
    np.testing.assert_allclose(bf.H @ ground.vector, 0, atol=1e-14)
    np.testing.assert_allclose(np.abs(ground.vector), np.eye(10)[0])


@pytest.mark.parametrize("n,grade", [(0, 1), (2, 1), (1, -1), (3, -1)])
def test_basis_state_energies(bap, n, grade):
    st = oscillator.basis_state(bap, n, grade)
    occupation = 0 if grade == 1 else 1
    np.testing.assert_allclose(bap.H @ st.vector, -(n + occupation) * st.vector, atol=1e-12)
    assert st.eta_norm == grade
    assert abs(bap.eta.norm(st.vector)) == pytest.approx(1.0)


def test_basis_state_range(bf):
    with pytest.raises(RangeError):
        oscillator.basis_state(bf, 5, 1)
    with pytest.raises(RangeError):
        oscillator.basis_state(bf, 0, 0)


def test_abnormal_grading_equals_metric(bap):
    np.testing.assert_allclose(bap.tau, bap.eta.matrix)
    assert bap.eta.inertia.is_indefinite


def test_boson_phermion_with_identity_metric_is_boson_fermion(bf):
    bp = oscillator.build_boson_phermion(E=1.0, truncation=4, eta2=np.eye(2))
    np.testing.assert_allclose(bp.H, bf.H)
    np.testing.assert_allclose(bp.Q, bf.Q)
    np.testing.assert_allclose(bp.tau, bf.tau)


def test_boson_phermion_rejects_indefinite_metric():
    with pytest.raises(AlgebraObstruction):
        oscillator.build_boson_phermion(E=1.0, truncation=4, eta2=algebra.SIGMA3)


@pytest.mark.parametrize("build,E", [
    (oscillator.build_boson_fermion, -1.0),
    (oscillator.build_boson_fermion, 0.0),
    (oscillator.build_boson_abnormal_phermion, 1.0),
])
def test_energy_sign_is_enforced(build, E):
    with pytest.raises(ConfigError):
        build(E, 4)


def test_build_system_dispatch():
    sys = oscillator.build_system("boson-phermion", 2.0, 3, np.diag([4.0, 1.0]))
    assert sys.kind == "boson-phermion"
    assert sys.E == 2.0
    with pytest.raises(ConfigError):
        oscillator.build_system("boson-boson", 1.0, 3)
    with pytest.raises(ConfigError):
        oscillator.build_system("boson-fermion", 1.0, 1)


@pytest.mark.parametrize("kind,E", [("boson-fermion", 1.0), ("boson-abnormal-phermion", -1.0)])
def test_build_system_rejects_a_metric_for_fixed_kinds(kind, E):
    with pytest.raises(DomainError):
        oscillator.build_system(kind, E, 3, algebra.SIGMA3)


@pytest.mark.parametrize("kind,E", [
    ("boson-fermion", 1.0),
    ("boson-phermion", 1.5),
    ("boson-abnormal-phermion", -1.0),
])
def test_supercharge_basics(kind, E):
    sys = oscillator.build_system(kind, E, 5, np.diag([4.0, 1.0]) if kind == "boson-phermion" else None)
    np.testing.assert_allclose(sys.Q @ sys.Q, 0, atol=1e-12)
    np.testing.assert_allclose(sys.Q @ sys.H - sys.H @ sys.Q, 0, atol=1e-10)
    assert all_passed(oscillator.relative_statistics_checks(sys))


def test_similarity_to_susy():
    bp = oscillator.build_boson_phermion(E=1.0, truncation=4, eta2=np.diag([4.0, 1.0]))
    assert all_passed(oscillator.similarity_to_susy(bp))


def test_similarity_to_susy_needs_phermion(bf):
    with pytest.raises(DomainError):
        oscillator.similarity_to_susy(bf)


def test_system_to_dict(bap):
    doc = oscillator.system_to_dict(bap)
    assert doc["kind"] == "boson-abnormal-phermion"
    assert doc["dim"] == 10
    assert doc["spectrum"][0]["value"] == pytest.approx([-5.0, 0.0])
    assert doc["spectrum"][0]["edge"] is True
    assert [f["species"] for f in doc["factors"]] == ["boson", "abnormal-phermion"]


def test_boson_fermion_default_truncation_spectrum():
    levels = oscillator.spectrum_table(oscillator.build_boson_fermion(1.0, 8))
    assert [lvl.multiplicity for lvl in levels] == [1] + [2] * 8 + [1]
    assert levels[-1].value.real == pytest.approx(9.0)
    assert levels[-1].edge
