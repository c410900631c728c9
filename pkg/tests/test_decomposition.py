"""Schmidt and Slater decompositions, scans and the closed-form ladders."""

from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from pairlab.config import NumericsConfig
from pairlab.decomposition import (
    TOP_EIGENVALUES,
    crossover_from_scan,
    crossover_lambda,
    decompose,
    entropy_scan,
    fermionized_coefficients,
    fermionized_decomposition,
    fermionized_degeneracy,
    fermionized_ladder,
    noninteracting_decomposition,
    noninteracting_ladder,
    rotated_product_coefficients,
    schmidt_decompose,
    slater_decompose,
)
from pairlab.errors import DomainError, NonConvergenceError
from pairlab.states import ground_state_coefficients


def test_product_state_has_no_schmidt_entanglement():
    gs, schmidt, slater = decompose(0.0)
    assert schmidt.eigenvalues[0] >= 1.0 - 1e-8
    assert schmidt.s_lin <= 1e-8
    assert schmidt.k_number == pytest.approx(1.0, abs=1e-8)
    assert schmidt.rank == 1
    assert slater.k_number > 1.0


def test_fermionized_state_is_a_single_slater_determinant():
    gs, schmidt, slater = decompose(1.0)
    assert schmidt is None
    assert slater.eigenvalues[0] == pytest.approx(0.5, abs=1e-12)
    assert slater.s_lin <= 1e-8
    assert slater.s_lin_strict == pytest.approx(0.5, abs=1e-12)
    assert slater.k_number == pytest.approx(1.0, abs=1e-12)
    assert slater.s_vn == pytest.approx(0.0, abs=1e-12)
    assert_allclose(slater.full_spectrum[:2], [0.5, 0.5], atol=1e-12)


@pytest.mark.parametrize("lambda_t", [-3.0, -0.5, 0.4, 0.9])
def test_spectra_sum_to_captured_norm(lambda_t):
    gs, schmidt, slater = decompose(lambda_t)
    assert np.sum(schmidt.eigenvalues) + gs.norm_defect_bosonic == pytest.approx(1.0, abs=1e-10)
    assert 2.0 * np.sum(slater.eigenvalues) + gs.norm_defect_fermionic == pytest.approx(1.0, abs=1e-10)
    assert slater.s_lin_strict >= slater.s_lin
    assert np.all(np.diff(schmidt.eigenvalues) <= 0.0)
    assert np.all(slater.eigenvalues <= 0.5)


def test_normalized_spectra():
    gs = ground_state_coefficients(-1.0, n_max=30, escalate=False)
    schmidt = schmidt_decompose(gs, normalize=True)
    slater = slater_decompose(gs, normalize=True)
    assert np.sum(schmidt.eigenvalues) == pytest.approx(1.0, abs=1e-12)
    assert np.sum(slater.full_spectrum) == pytest.approx(1.0, abs=1e-12)


def test_measures_are_consistent():
    _, schmidt, slater = decompose(-1.0)
    assert schmidt.k_number == pytest.approx(1.0 / schmidt.purity, rel=1e-12)
    assert slater.k_number == pytest.approx(0.5 / slater.purity, rel=1e-12)
    assert slater.s_lin == pytest.approx(1.0 - 2.0 * slater.purity, rel=1e-9)


def test_large_defect_refuses_decomposition():
    numerics = NumericsConfig(max_defect=1e-9)
    with pytest.raises(NonConvergenceError) as excinfo:
        decompose(-2.0, numerics)
    assert excinfo.value.module == "decomposition"
    with pytest.raises(DomainError):
        schmidt_decompose(ground_state_coefficients(1.0, n_max=5))


@pytest.fixture(scope="module")
def ground_branch_scan():
    grid = [round(v, 2) for v in np.arange(-3.0, 0.99, 0.02)]
    return entropy_scan(grid, workers=2, with_pair_size=False)


def test_crossover_between_representations():
    value = crossover_lambda(xtol=1e-3)
    assert abs(value - 0.58) <= 0.01


def test_schmidt_and_slater_numbers_cross_once(ground_branch_scan):
    rows = [row for row in ground_branch_scan if row["lambda_t"] >= 0.0]
    gaps = np.array([row["k_number"] - row["k_number_f"] for row in rows])
    assert np.all(np.isfinite(gaps))
    assert np.count_nonzero(np.diff(np.sign(gaps)) != 0) == 1
    assert abs(crossover_from_scan(rows) - 0.58) <= 0.01


def test_slater_modes_outnumber_schmidt_modes(ground_branch_scan):
    for row in ground_branch_scan:
        assert row["error"] == ""
        assert 2.0 * row["k_number_f"] > row["k_number"]


def test_schmidt_eigenvalues_change_smoothly(ground_branch_scan):
    assert ground_branch_scan[-1]["lambda_t"] == 0.98
    top = np.array([[row[f"schmidt_{j}"] for j in range(1, 6)] for row in ground_branch_scan])
    assert np.all(np.isfinite(top))
    assert np.max(np.abs(np.diff(top, axis=0))) < 0.05


def test_entropy_scan_preserves_order_and_marks_lambda_one():
    grid = [0.5, -1.0, 1.0]
    serial = entropy_scan(grid, workers=1, with_pair_size=False)
    pooled = entropy_scan(grid, workers=2, with_pair_size=False)
    assert [row["lambda_t"] for row in serial] == grid
    assert [row["lambda_t"] for row in pooled] == grid
    for a, b in zip(serial, pooled):
        assert a["s_lin_fermionic"] == pytest.approx(b["s_lin_fermionic"], rel=1e-12)
    last = serial[-1]
    assert math.isnan(last["k_number"])
    assert last["k_number_f"] == pytest.approx(1.0, abs=1e-12)
    assert all(row["error"] == "" for row in serial)
    assert f"schmidt_{TOP_EIGENVALUES}" in serial[0]
    assert math.isnan(serial[0]["pair_size"])


def test_entropy_scan_rejects_lambda_above_one():
    with pytest.raises(DomainError):
        entropy_scan([0.0, 1.5])


def test_entropy_scan_isolates_failed_points():
    rows = entropy_scan([-2.0], numerics=NumericsConfig(max_defect=1e-9), with_pair_size=False)
    assert rows[0]["lambda_t"] == -2.0
    assert rows[0]["error"].startswith("NonConvergenceError")


def test_crossover_from_scan_interpolates():
    rows = [
        {"lambda_t": 0.0, "k_number": 1.0, "k_number_f": 2.0, "error": ""},
        {"lambda_t": 0.2, "k_number": math.nan, "k_number_f": 1.0, "error": ""},
        {"lambda_t": 0.4, "error": "NonConvergenceError: boom"},
        {"lambda_t": 0.5, "k_number": 2.0, "k_number_f": 1.5, "error": ""},
    ]
    assert crossover_from_scan(rows) == pytest.approx(1.0 / 3.0)
    assert crossover_from_scan(rows[:1]) is None


def test_noninteracting_ladder_values():
    ladder = noninteracting_ladder(10)
    assert ladder[0].s_lin == 0.0
    assert ladder[1].s_lin == pytest.approx(0.5, abs=1e-15)
    assert ladder[1].bound == 0.5
    assert ladder[2].s_lin == pytest.approx(5.0 / 8.0, abs=1e-15)
    assert ladder[2].s_lin < ladder[2].bound == pytest.approx(2.0 / 3.0)
    values = [d.s_lin for d in ladder]
    assert all(b > a for a, b in zip(values, values[1:]))
    for d in ladder:
        assert np.sum(d.occupations) == pytest.approx(1.0, abs=1e-14)
        assert d.s_lin <= d.bound + 1e-15
        assert d.energy == d.n + 1


def test_noninteracting_natural_orbitals():
    d = noninteracting_decomposition(3)
    assert len(d.orbitals) == 4
    assert_allclose(d.occupations, [0.375, 0.375, 0.125, 0.125], atol=1e-15)
    assert "phi_1" in d.orbitals[0].label() and "phi_2" in d.orbitals[0].label()
    with pytest.raises(DomainError):
        noninteracting_decomposition(-1)


def test_noninteracting_spectrum_matches_rotated_product():
    # phi_n(u) phi_0(w) rewritten in single-particle states
    for n in (2, 5):
        r = rotated_product_coefficients(n, 0)
        sigma = np.linalg.svd(r, compute_uv=False) ** 2
        assert_allclose(np.sort(sigma)[::-1], noninteracting_decomposition(n).occupations, atol=1e-12)


def test_fermionized_lowest_states():
    assert fermionized_decomposition(1, 0).s_lin_f == pytest.approx(0.0, abs=1e-15)
    for l_t, cm_n in ((1, 3), (3, 1)):
        state = fermionized_decomposition(l_t, cm_n)
        assert state.energy == 5.0
        assert state.bound == 0.5
        assert state.s_lin_f == pytest.approx(0.5, abs=1e-12)


def test_fermionized_coefficients_for_excited_centre_of_mass():
    c = fermionized_coefficients(1, 2)
    assert_allclose(np.abs(c), [math.sqrt(3.0) / 2.0, 0.5], atol=1e-12)
    assert fermionized_decomposition(1, 2).s_lin_f == pytest.approx(3.0 / 8.0, abs=1e-12)


@pytest.mark.parametrize("l_t", [3, 5, 7])
def test_fermionized_closed_form_matches_rotation(l_t):
    r = rotated_product_coefficients(0, l_t)
    q = np.arange((l_t - 1) // 2 + 1)
    assert_allclose(fermionized_coefficients(l_t, 0), math.sqrt(2.0) * r[q, l_t - q], atol=1e-12)


def test_fermionized_ladder_respects_bound_and_norm():
    ladder = fermionized_ladder(12)
    for state in ladder:
        assert np.sum(state.coefficients ** 2) == pytest.approx(1.0, abs=1e-12)
        assert state.s_lin_f <= state.bound + 1e-12
    for energy in range(2, 13):
        count = sum(1 for state in ladder if state.energy == energy)
        assert count == fermionized_degeneracy(energy)[0]


def test_fermionized_degeneracy():
    assert fermionized_degeneracy(5) == (2, 4)
    assert fermionized_degeneracy(2) == (1, 2)
    for bad in (1, 2.5):
        with pytest.raises(DomainError):
            fermionized_degeneracy(bad)
    with pytest.raises(DomainError):
        fermionized_coefficients(2, 0)
    with pytest.raises(DomainError):
        fermionized_coefficients(1, -1)
    with pytest.raises(DomainError):
        rotated_product_coefficients(-1, 0)
