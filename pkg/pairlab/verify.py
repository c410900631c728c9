"""Finite-difference checks of the relative wavefunction against its differential equation."""

import logging
import math
from typing import Optional

import numpy as np

from .errors import DivergenceError, DomainError
from .models import GridSpec, JumpReport, ResidualReport
from .spectrum import gamma_of_energy
from .states import relative_profile

logger = logging.getLogger(__name__)

BAND_STEPS = 5
RESIDUAL_EXTENT = 5.0


def relative_ode_residual(
    lambda_t: float,
    grid: GridSpec,
    excluded_band: Optional[float] = None,
) -> ResidualReport:
    """
    Max |psi'' + (lambda_t + 1/2 - x^2/4) psi| over the grid, away from x = 0.

    psi is the relative state as a function of x = x1 - x2. The second
    derivative is a three-point central difference, so the residual is O(h^2).

    Args:
        lambda_t: Relative parameter of a spectral point.
        grid: Uniform grid in x; its extent sets the checked region.
        excluded_band: Half-width around x = 0 left out (default 5h).
    """
    h = grid.spacing
    band = BAND_STEPS * h if excluded_band is None else excluded_band
    if band <= 0:
        raise DomainError(f"excluded band must be positive, got {band}")
    x = grid.nodes
    psi = relative_profile(lambda_t, np.abs(x))
    second = (psi[2:] - 2.0 * psi[1:-1] + psi[:-2]) / (h * h)
    inner = x[1:-1]
    residual = second + (lambda_t + 0.5 - 0.25 * inner * inner) * psi[1:-1]
    # every stencil point must sit outside the band
    keep = np.abs(inner) - h >= band - 1e-12 * h
    if not np.any(keep):
        raise DomainError(f"excluded band {band} leaves no interior points on [-{grid.extent}, {grid.extent}]")
    max_residual = float(np.max(np.abs(residual[keep])))
    logger.debug(f"ODE residual at lambda_t={lambda_t}: {max_residual:.3e} (h={h:.3e}, band={band:.3e})")
    return ResidualReport(
        lambda_t=lambda_t,
        max_residual=max_residual,
        region=f"{band:g} <= |x| <= {grid.extent:g}",
        spacing=h,
        excluded_band=band,
    )


def residual_order(lambda_t: float, spacing: float = 0.05, extent: float = RESIDUAL_EXTENT) -> float:
    """Ratio of max residuals at spacing h and h/2 over the same region; about 4 for a second-order stencil."""
    coarse = GridSpec.with_spacing(extent, spacing)
    fine = GridSpec.with_spacing(extent, 0.5 * coarse.spacing)
    band = BAND_STEPS * coarse.spacing
    ratio = (relative_ode_residual(lambda_t, coarse, band).max_residual
             / relative_ode_residual(lambda_t, fine, band).max_residual)
    logger.info(f"Residual order at lambda_t={lambda_t}: ratio {ratio:.4f}")
    return ratio


def jump_condition(lambda_t: float, spacing: float = 1e-4) -> JumpReport:
    """
    Derivative jump of the relative state at the contact point.

    One-sided second-order differences on each side of x = 0 give
    psi'(0+) and psi'(0-); the jump divided by psi(0) should equal 2 gamma_t.

    Raises:
        DivergenceError: If psi(0) vanishes (infinite coupling).
    """
    h = spacing
    offsets = np.array([-2.0 * h, -h, 0.0, h, 2.0 * h])
    psi_m2, psi_m1, psi_0, psi_p1, psi_p2 = relative_profile(lambda_t, np.abs(offsets))
    if abs(psi_0) < 1e-12:
        raise DivergenceError(f"relative state vanishes at contact for lambda_t = {lambda_t}")
    right = (-3.0 * psi_0 + 4.0 * psi_p1 - psi_p2) / (2.0 * h)
    left = (3.0 * psi_0 - 4.0 * psi_m1 + psi_m2) / (2.0 * h)
    gamma_t = gamma_of_energy(lambda_t + 0.5)
    measured = (right - left) / psi_0
    report = JumpReport(lambda_t=lambda_t, gamma_t=gamma_t, measured=measured, expected=2.0 * gamma_t, spacing=h)
    if not math.isfinite(measured):
        raise DomainError(f"jump is not finite at lambda_t = {lambda_t}")
    logger.debug(f"Jump at lambda_t={lambda_t}: measured {measured:.10g}, expected {report.expected:.10g}")
    return report
