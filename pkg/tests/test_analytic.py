"""Tests for the characteristic-determinant root finder."""

from __future__ import annotations

import logging

import numpy as np
import pytest

from structflo.opspec._errors import ShapeError
from structflo.opspec._results import Eigenvalue, SearchRegion
from structflo.opspec.analytic import (
    analytic_spectrum,
    characteristic_matrix,
    det_root_search,
    normalized_determinant,
)
from structflo.opspec.boundary import BoundaryUnitary, canonical_unitary
from structflo.opspec.hilbert import Block, CoefficientMatrix, Interval

PI2 = np.pi**2


def _block(a, interval=(0.0, 1.0), index=1) -> Block:
    return Block(index, Interval(*interval), CoefficientMatrix(np.asarray(a, dtype=complex)))


def _haar(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _expected(kind: str, block: Block, region: SearchRegion) -> list[Eigenvalue]:
    return [ev for ev in analytic_spectrum(kind, block, k_max=4) if region.contains(ev.value)]


def _assert_same_spectrum(got: list[Eigenvalue], want: list[Eigenvalue], tol: float) -> None:
    assert len(got) == len(want), (got, want)
    remaining = list(want)
    for ev in got:
        match = min(remaining, key=lambda w: abs(w.value - ev.value))
        assert abs(match.value - ev.value) <= tol, (ev, match)
        assert ev.multiplicity == match.multiplicity, (ev, match)
        remaining.remove(match)


# ---------------------------------------------------------------------------
# Characteristic function
# ---------------------------------------------------------------------------


class TestCharacteristicMatrix:
    def test_dirichlet_root(self):
        block = _block([[1.0]])
        w = canonical_unitary("dirichlet", 1)
        assert abs(normalized_determinant(block, w, PI2 + 1j)) <= 1e-10

    def test_dirichlet_non_root(self):
        block = _block([[1.0]])
        w = canonical_unitary("dirichlet", 1)
        assert abs(normalized_determinant(block, w, 1 + 1j)) > 1e-3

    def test_periodic_zero_mode(self):
        block = _block([[2.0]])
        w = canonical_unitary("periodic", 1)
        assert abs(normalized_determinant(block, w, 2j)) <= 1e-12

    def test_shape(self):
        block = _block(np.diag([1.0, 2.0]))
        m = characteristic_matrix(block, canonical_unitary("neumann", 2), 3 + 1j)
        assert m.shape == (4, 4)

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            characteristic_matrix(_block([[1.0]]), canonical_unitary("neumann", 2), 1.0)

    def test_continuous_across_small_argument_branch(self):
        block = _block([[1.0]])
        w = canonical_unitary("neumann", 1)
        inside = normalized_determinant(block, w, 1j + 1e-14)
        outside = normalized_determinant(block, w, 1j + 1e-8)
        assert abs(inside - outside) <= 1e-6


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


class TestAnalyticSpectrum:
    def test_periodic(self):
        out = analytic_spectrum("periodic", _block([[2.0]]), k_max=1)
        assert [ev.multiplicity for ev in out] == [1, 2]
        assert out[0].value == pytest.approx(2j)
        assert out[1].value == pytest.approx(4 * PI2 + 2j)

    def test_dirichlet_skips_zero_mode(self):
        out = analytic_spectrum("dirichlet", _block([[1.0]]), k_max=2)
        np.testing.assert_allclose([ev.value for ev in out], [PI2 + 1j, 4 * PI2 + 1j])

    def test_neumann_keeps_zero_mode(self):
        out = analytic_spectrum("neumann", _block(np.diag([1.0, 2.0])), k_max=1)
        np.testing.assert_allclose(
            [ev.value for ev in out], [1j, 2j, PI2 + 1j, PI2 + 2j], atol=1e-12
        )

    def test_repeated_coefficient_eigenvalues_merge(self):
        out = analytic_spectrum("periodic", _block(np.eye(2)), k_max=0)
        assert len(out) == 1
        assert out[0].multiplicity == 2

    def test_interval_length_scales(self):
        out = analytic_spectrum("dirichlet", _block([[1.0]], interval=(0.0, 2.0)), k_max=1)
        assert out[0].value == pytest.approx(PI2 / 4 + 1j)

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="Unknown boundary kind"):
            analytic_spectrum("robin", _block([[1.0]]), 2)


# ---------------------------------------------------------------------------
# Root search
# ---------------------------------------------------------------------------


class TestDetRootSearch:
    @pytest.mark.parametrize("kind", ["periodic", "dirichlet", "neumann"])
    @pytest.mark.parametrize(
        "a",
        [[[2.0]], [[1.0]], np.diag([1.0, 2.0])],
        ids=["alpha2", "alpha1", "diag12"],
    )
    def test_matches_closed_form(self, kind, a):
        block = _block(a)
        region = SearchRegion()
        got = det_root_search(block, canonical_unitary(kind, block.dim), region)
        _assert_same_spectrum(got, _expected(kind, block, region), tol=1e-7)
        assert all(ev.engine == "analytic" and ev.admissible for ev in got)

    def test_sorted_by_real_then_imaginary(self):
        block = _block(np.diag([1.0, 2.0]))
        got = det_root_search(block, canonical_unitary("neumann", 2))
        keys = [(ev.value.real, ev.value.imag) for ev in got]
        assert keys == sorted(keys)

    def test_invariant_under_coefficient_rotation(self):
        rng = np.random.default_rng(11)
        q = _haar(rng, 2)
        a = q @ np.diag([1.0, 2.5]) @ q.conj().T
        rotated = _block(a)
        diagonal = _block(np.diag([1.0, 2.5]))
        region = SearchRegion(re_max=45.0)
        for kind in ("dirichlet", "periodic"):
            got = det_root_search(rotated, canonical_unitary(kind, 2), region)
            want = det_root_search(diagonal, canonical_unitary(kind, 2), region)
            _assert_same_spectrum(got, want, tol=1e-7)

    def test_admissible_random_unitary_has_coefficient_imaginary_parts(self):
        rng = np.random.default_rng(5)
        alphas = np.array([1.0, 2.0])
        block = _block(np.diag(alphas))
        for _ in range(3):
            w = np.zeros((4, 4), dtype=complex)
            for j in range(2):
                idx = [j, j + 2]
                w[np.ix_(idx, idx)] = _haar(rng, 2)
            got = det_root_search(block, BoundaryUnitary(w))
            assert got
            for ev in got:
                assert np.min(np.abs(ev.value.imag - alphas)) <= 1e-7

    def test_longer_interval(self):
        block = _block([[1.0]], interval=(2.0, 4.0))
        region = SearchRegion(re_max=20.0)
        got = det_root_search(block, canonical_unitary("dirichlet", 1), region)
        _assert_same_spectrum(got, _expected("dirichlet", block, region), tol=1e-7)

    def test_empty_region(self):
        block = _block([[1.0]])
        region = SearchRegion(re_min=1.0, re_max=5.0, im_min=0.0, im_max=3.0)
        assert det_root_search(block, canonical_unitary("dirichlet", 1), region) == []

    def test_flags_non_admissible(self, caplog):
        r = np.array([[0.0, 1.0], [1.0, 0.0]])
        w = BoundaryUnitary(np.block([[r, np.zeros((2, 2))], [np.zeros((2, 2)), np.eye(2)]]))
        block = _block(np.diag([1.0, 4.0]))
        with caplog.at_level(logging.WARNING, logger="structflo.opspec.analytic"):
            got = det_root_search(block, w, SearchRegion(re_max=20.0, im_max=5.0))
        assert "does not give a normal extension" in caplog.text
        assert all(not ev.admissible for ev in got)
