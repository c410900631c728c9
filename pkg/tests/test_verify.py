"""Finite-difference checks of the relative equation and the contact condition."""

from __future__ import annotations

import pytest

from pairlab.errors import DivergenceError, DomainError
from pairlab.models import GridSpec
from pairlab.verify import jump_condition, relative_ode_residual, residual_order


def test_residual_vanishes_for_the_gaussian():
    report = relative_ode_residual(0.0, GridSpec.with_spacing(5.0, 1e-3))
    assert report.max_residual < 1e-6
    assert report.excluded_band == pytest.approx(5.0 * report.spacing)
    assert report.region.endswith("<= 5")


@pytest.mark.parametrize("lambda_t", [-1.0, 0.5])
def test_residual_is_small_away_from_contact(lambda_t):
    report = relative_ode_residual(lambda_t, GridSpec.with_spacing(5.0, 5e-3))
    assert report.max_residual < 5e-5


@pytest.mark.parametrize("lambda_t", [-1.0, 0.5])
def test_residual_is_second_order(lambda_t):
    assert 3.5 <= residual_order(lambda_t) <= 4.5


def test_residual_rejects_empty_region():
    with pytest.raises(DomainError):
        relative_ode_residual(0.0, GridSpec(1.0, 11), excluded_band=2.0)
    with pytest.raises(DomainError):
        relative_ode_residual(0.0, GridSpec(1.0, 11), excluded_band=-1.0)


@pytest.mark.parametrize("lambda_t", [-2.0, -0.5, 0.5])
def test_jump_matches_coupling(lambda_t):
    report = jump_condition(lambda_t)
    assert report.deviation < 1e-4
    assert report.expected == pytest.approx(2.0 * report.gamma_t)


def test_no_jump_without_interaction():
    report = jump_condition(0.0)
    assert report.expected == 0.0
    assert abs(report.measured) < 1e-6


def test_jump_diverges_at_infinite_repulsion():
    with pytest.raises(DivergenceError):
        jump_condition(1.0)
