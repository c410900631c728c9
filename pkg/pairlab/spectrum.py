"""Energy-interaction relation of the relative motion and coupling conversions."""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Tuple

from .errors import BracketingError, DivergenceError, DomainError, NonConvergenceError
from .models import SpectralPoint
from .specfun import gamma_ratio

logger = logging.getLogger(__name__)

ZETA_HALF_ABS = 1.4603545088  # |zeta(1/2)|
CIR_TOLERANCE = 1e-5          # |1 - |zeta(1/2)| r| below this is treated as the resonance
POLE_OFFSET = 1e-9
LOG_SWITCH = -50.0            # below this energy the ground branch is solved in log(1/2 - eps)
ENERGY_TOLERANCE = 1e-13
MAX_ITERATIONS = 400


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def gamma_of_energy(eps_r: float) -> float:
    """
    Coupling gamma_t that produces relative energy eps_r.

    gamma_t = -sqrt(2) Gamma(3/4 - eps/2) / Gamma(1/4 - eps/2); exactly zero at
    eps = 1/2 + 2k.

    Raises:
        DivergenceError: At eps = 3/2 + 2k (infinite repulsion).
    """
    a = 0.75 - 0.5 * eps_r
    b = 0.25 - 0.5 * eps_r
    if _is_nonpositive_integer(a):
        raise DivergenceError(f"gamma_t diverges at eps_r = {eps_r}")
    if _is_nonpositive_integer(b):
        return 0.0
    return -math.sqrt(2.0) * gamma_ratio(a, b)


def branch_interval(branch: int) -> Tuple[float, float]:
    """Open energy interval of a branch; the ground branch is unbounded below."""
    if branch < 0:
        raise DomainError(f"branch must be non-negative, got {branch}")
    if branch == 0:
        return -math.inf, 1.5
    return 1.5 + 2.0 * (branch - 1), 1.5 + 2.0 * branch


def _bisect_secant(func: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Root of an increasing function on [lo, hi] with f(lo) < 0 < f(hi)."""
    f_lo, f_hi = func(lo), func(hi)
    if not (f_lo < 0.0 < f_hi):
        raise BracketingError((lo, hi), (f_lo, f_hi))
    use_secant = False
    for _ in range(MAX_ITERATIONS):
        if hi - lo <= tol * max(1.0, abs(lo), abs(hi)):
            return lo if abs(f_lo) <= abs(f_hi) else hi
        x = 0.5 * (lo + hi)
        # alternate secant and bisection steps so the bracket always shrinks
        if use_secant:
            s = lo - f_lo * (hi - lo) / (f_hi - f_lo)
            if lo < s < hi:
                x = s
        use_secant = not use_secant
        if not (lo < x < hi):
            return lo if abs(f_lo) <= abs(f_hi) else hi
        f_x = func(x)
        if f_x == 0.0:
            return x
        if f_x < 0.0:
            lo, f_lo = x, f_x
        else:
            hi, f_hi = x, f_x
    raise NonConvergenceError(
        f"root search did not converge on [{lo:.15g}, {hi:.15g}]",
        module="spectrum",
        residual=min(abs(f_lo), abs(f_hi)),
    )


def _solve_deep_attractive(gamma_t: float) -> float:
    """Ground branch below LOG_SWITCH, bisecting in u = log(1/2 - eps)."""
    def in_log(u: float) -> float:
        return gamma_of_energy(0.5 - math.exp(u)) - gamma_t

    # gamma_t ~ -sqrt(-eps) far on the attractive side, so the energy is ~ -gamma_t**2
    u_lo = math.log(0.5 - LOG_SWITCH)
    u_hi = math.log(0.5 + 4.0 * gamma_t * gamma_t + 100.0)
    # in_log decreases with u; flip sign to reuse the increasing-function solver
    u = _bisect_secant(lambda s: -in_log(s), u_lo, u_hi, 1e-15)
    return 0.5 - math.exp(u)


def energy_of_gamma(gamma_t: float, branch: int = 0) -> SpectralPoint:
    """
    Relative energy on a branch for a given coupling.

    Args:
        gamma_t: Finite dimensionless coupling.
        branch: 0 for the ground branch, n >= 1 for excited branches.

    Returns:
        SpectralPoint with lambda_t = eps_r - 1/2.

    Raises:
        DomainError: For non-finite gamma_t or a negative branch.
        BracketingError: If the root cannot be bracketed inside the branch.
    """
    if not math.isfinite(gamma_t):
        raise DomainError(f"gamma_t must be finite, got {gamma_t}")
    left, right = branch_interval(branch)
    if gamma_t == 0.0:
        eps = 0.5 + 2.0 * branch
        return SpectralPoint(branch, 0.0, eps, eps - 0.5)

    def residual(eps: float) -> float:
        return gamma_of_energy(eps) - gamma_t

    hi = right - POLE_OFFSET
    if branch == 0:
        lo = -1.0
        while residual(lo) > 0.0:
            if lo <= LOG_SWITCH:
                eps = _solve_deep_attractive(gamma_t)
                return SpectralPoint(branch, gamma_t, eps, eps - 0.5)
            lo = max(2.0 * lo, LOG_SWITCH)
            logger.debug(f"Expanded ground-branch bracket down to eps = {lo}")
    else:
        lo = left + POLE_OFFSET
    eps = _bisect_secant(residual, lo, hi, ENERGY_TOLERANCE)
    return SpectralPoint(branch, gamma_t, eps, eps - 0.5)


def gamma_from_a3d(a3d_ratio: float, length_ratio: float = 1.0) -> float:
    """
    Dimensionless coupling from the three-dimensional scattering length.

    gamma_t = 2 r s / (1 - |zeta(1/2)| r) with r = a3D / l_perp and
    s = a_ho / l_perp (oscillator length over transverse length).

    Raises:
        DivergenceError: At the confinement-induced resonance r = 1/|zeta(1/2)|.
    """
    denominator = 1.0 - ZETA_HALF_ABS * a3d_ratio
    if abs(denominator) < CIR_TOLERANCE:
        raise DivergenceError(f"confinement-induced resonance at a3D/l_perp = {a3d_ratio}")
    return 2.0 * a3d_ratio * length_ratio / denominator


@dataclass(frozen=True)
class InteractionParams:
    """Coupling expressed in every supported unit."""
    gamma_t: float                     # dimensionless coupling
    a_t: float                         # dimensionless 1D scattering length, gamma_t = -1/a_t
    a3d_ratio: Optional[float] = None  # a3D / l_perp when built from the 3D length

    @classmethod
    def from_gamma(cls, gamma_t: float) -> "InteractionParams":
        a_t = math.inf if gamma_t == 0.0 else -1.0 / gamma_t
        return cls(gamma_t, a_t)

    @classmethod
    def from_scattering_length(cls, a_t: float) -> "InteractionParams":
        if a_t == 0.0:
            raise DivergenceError("a zero 1D scattering length means infinite coupling")
        gamma_t = 0.0 if math.isinf(a_t) else -1.0 / a_t
        return cls(gamma_t, a_t)

    @classmethod
    def from_a3d(cls, a3d_ratio: float, length_ratio: float = 1.0) -> "InteractionParams":
        gamma_t = gamma_from_a3d(a3d_ratio, length_ratio)
        a_t = math.inf if gamma_t == 0.0 else -1.0 / gamma_t
        return cls(gamma_t, a_t, a3d_ratio)


def total_energy(point: SpectralPoint, cm_n: int = 0) -> float:
    """E / hbar omega = eps_r + cm_n + 1/2."""
    return point.eps_r + cm_n + 0.5


def spectrum_scan(gammas: Iterable[float], branches: int = 1) -> List[SpectralPoint]:
    """Energies for every coupling on branches 0..branches-1, ordered by branch then coupling."""
    gammas = list(gammas)
    return [energy_of_gamma(g, b) for b in range(branches) for g in gammas]
