"""Two-particle wavefunctions and the two ground-state expansions in oscillator orbitals."""

import logging
import math
from dataclasses import replace
from typing import Tuple

import numpy as np
from scipy import integrate

from .errors import DomainError
from .models import GroundStateCoefficients
from .specfun import digamma_fn, log_factorial, log_gamma, osc_eigenfunction, osc_table, parabolic_d, rgamma

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
_CM_PREFACTOR = 2.0 ** 0.25
_REL_PREFACTOR = (2.0 / math.pi) ** 0.25
ATTRACTIVE_LIMIT = -5.0
SLOW_FERMIONIC_WINDOW = 0.95


def _is_nonnegative_integer(x: float) -> bool:
    return x >= 0.0 and x == math.floor(x)


def relative_norm(lambda_t: float) -> float:
    """
    Normalization N of the relative state, N^2 = Gamma(-l) / (Psi((1-l)/2) - Psi(-l/2)).

    At non-negative integers the limit N^2 = 1 / (2 l!) is returned exactly.

    Raises:
        DomainError: If the ratio is not positive or overflows.
    """
    if _is_nonnegative_integer(lambda_t):
        return math.sqrt(0.5 * math.exp(-float(log_factorial(int(lambda_t)))))
    lg, sign = log_gamma(-lambda_t)
    dpsi = digamma_fn(0.5 * (1.0 - lambda_t)) - digamma_fn(-0.5 * lambda_t)
    if sign * dpsi <= 0.0:
        raise DomainError(f"relative normalization is not positive at lambda_t = {lambda_t}")
    value = math.exp(0.5 * (lg - math.log(abs(dpsi))))
    if not math.isfinite(value):
        raise DomainError(f"relative normalization overflows at lambda_t = {lambda_t}")
    return value


def psi_cm(x1, x2, cm_n: int = 0) -> np.ndarray:
    """Centre-of-mass factor 2^(1/4) phi_n((x1 + x2)/sqrt 2)."""
    u = (np.asarray(x1, dtype=float) + np.asarray(x2, dtype=float)) / SQRT2
    return _CM_PREFACTOR * np.asarray(osc_eigenfunction(cm_n, u))


def relative_profile(lambda_t: float, r) -> np.ndarray:
    """(2/pi)^(1/4) N D_lambda(r) for r >= 0; repeated distances are evaluated once."""
    r = np.asarray(r, dtype=float)
    unique, inverse = np.unique(np.round(r, 12).reshape(-1), return_inverse=True)
    values = np.atleast_1d(parabolic_d(lambda_t, unique))
    scale = _REL_PREFACTOR * relative_norm(lambda_t)
    return (scale * values)[inverse].reshape(r.shape)


def psi_relative(x1, x2, lambda_t: float) -> np.ndarray:
    """Relative factor, a function of |x1 - x2| only."""
    r = np.abs(np.asarray(x1, dtype=float) - np.asarray(x2, dtype=float))
    return relative_profile(lambda_t, r)


def eval_psi_exact(x1, x2, lambda_t: float, cm_n: int = 0):
    """
    Exact two-particle state psi_R^n * psi_r^lambda.

    Args:
        x1, x2: Positions (scalars or broadcastable arrays).
        lambda_t: eps_r - 1/2 from any spectral point.
        cm_n: Centre-of-mass quantum number.
    """
    x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    value = psi_cm(x1, x2, cm_n) * psi_relative(x1, x2, lambda_t)
    return float(value) if value.ndim == 0 else value


def eval_psi_repulsive(x1, x2, l_t: int, cm_n: int = 0):
    """Infinite-repulsion state phi_n((x1+x2)/sqrt 2) * phi_l(|x1-x2|/sqrt 2) for odd l."""
    if l_t < 1 or l_t % 2 == 0:
        raise DomainError(f"l_t must be an odd positive integer, got {l_t}")
    x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    u = (x1 + x2) / SQRT2
    w = np.abs(x1 - x2) / SQRT2
    value = np.asarray(osc_eigenfunction(cm_n, u)) * np.asarray(osc_eigenfunction(l_t, w))
    return float(value) if value.ndim == 0 else value


def eval_psi_attractive(x1, x2, lambda_t: float, cm_n: int = 0):
    """
    Strong-attraction approximation 2^(1/4) phi_n(u) (-l)^(1/4) exp(-sqrt(-l)|x1 - x2|).

    Raises:
        DomainError: If lambda_t > -5.
    """
    if lambda_t > ATTRACTIVE_LIMIT:
        raise DomainError(f"attractive closed form needs lambda_t <= {ATTRACTIVE_LIMIT}, got {lambda_t}")
    x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    kappa = math.sqrt(-lambda_t)
    value = psi_cm(x1, x2, cm_n) * math.sqrt(kappa) * np.exp(-kappa * np.abs(x1 - x2))
    return float(value) if value.ndim == 0 else value


def pair_grid(lambda_t: float, points: int = 801) -> np.ndarray:
    """Half-line grid in |x1 - x2| that resolves the relative state."""
    extent = max(12.0, 6.0 / math.sqrt(1.0 - min(lambda_t, 0.0)))
    if lambda_t <= ATTRACTIVE_LIMIT:
        spacing = 0.1 / math.sqrt(-lambda_t)
        points = max(points, int(math.ceil(extent / spacing)) + 1)
    return np.linspace(0.0, extent, points)


def pair_size(lambda_t: float, defn: str = "rms") -> float:
    """
    RMS separation sqrt(<(x1 - x2)^2>) of the ground-branch state.

    Raises:
        DomainError: For lambda_t > 1 or an unknown definition.
    """
    if defn != "rms":
        raise DomainError(f"unknown pair size definition '{defn}'")
    if lambda_t > 1.0:
        raise DomainError(f"pair size is defined on the ground branch (lambda_t <= 1), got {lambda_t}")
    r = pair_grid(lambda_t)
    density = relative_profile(lambda_t, r) ** 2
    norm = integrate.simpson(density, x=r)
    second = integrate.simpson(r * r * density, x=r)
    return math.sqrt(second / norm)


def _log_b(n: np.ndarray) -> np.ndarray:
    """log of C(2n, n) / 4^n = log((2n-1)!! / (2^n n!))."""
    return log_factorial(2 * n) - 2.0 * log_factorial(n) - n * math.log(4.0)


def _bosonic_prefactor(lambda_t: float) -> float:
    """2^((l+1)/2) N / Gamma(1 - l/2); c(n) = l * this * b_n / (l - 2n)."""
    return 2.0 ** (0.5 * (lambda_t + 1.0)) * relative_norm(lambda_t) * rgamma(1.0 - 0.5 * lambda_t)


def _fermionic_prefactor(lambda_t: float) -> float:
    return 2.0 ** (0.5 * lambda_t + 1.0) * relative_norm(lambda_t) * rgamma(0.5 * (1.0 - lambda_t))


def _check_bosonic(lambda_t: float) -> None:
    if lambda_t >= 1.0:
        raise DomainError(f"bosonic-like coefficients need lambda_t < 1, got {lambda_t}")


def _check_fermionic(lambda_t: float) -> None:
    if lambda_t > 1.0:
        raise DomainError(f"fermionic-like coefficients need lambda_t <= 1, got {lambda_t}")


def coeff_c(n: int, lambda_t: float) -> float:
    """Weight of phi_n(x1) phi_n(x2) in the bosonic-like expansion."""
    _check_bosonic(lambda_t)
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    pre = _bosonic_prefactor(lambda_t)
    if n == 0:
        return pre
    return lambda_t * pre * math.exp(float(_log_b(np.asarray(n)))) / (lambda_t - 2.0 * n)


def coeff_cP(n: int, k: int, lambda_t: float) -> float:
    """Weight of the permanent P_{k, 2n-k}, 1 <= n, 0 <= k < n."""
    if n < 1 or not 0 <= k < n:
        raise DomainError(f"permanent index out of range: n={n}, k={k}")
    c = coeff_c(n, lambda_t)
    log_ratio = float(log_factorial(n) - 0.5 * (log_factorial(2 * n - k) + log_factorial(k)))
    return SQRT2 * c * (-1.0) ** (n + k) * math.exp(log_ratio)


def coeff_cS(n: int, k: int, lambda_t: float) -> float:
    """Weight of the Slater-like term S_{k, 2n+1-k}, 0 <= k <= n."""
    _check_fermionic(lambda_t)
    if n < 0 or not 0 <= k <= n:
        raise DomainError(f"Slater index out of range: n={n}, k={k}")
    if lambda_t == 1.0:
        return 1.0 if n == 0 and k == 0 else 0.0
    return float(_fermionic_table(lambda_t, n)[n, k])


def _fermionic_table(lambda_t: float, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    k = np.arange(n_max + 1)
    nn, kk = np.meshgrid(n, k, indexing="ij")
    valid = kk <= nn
    kk_safe = np.where(valid, kk, 0)
    log_mag = (log_factorial(2 * nn + 1) - nn * math.log(4.0) - log_factorial(nn)
               - 0.5 * (log_factorial(2 * nn + 1 - kk_safe) + log_factorial(kk_safe)))
    sign = np.where((nn + 1 + kk_safe) % 2 == 0, 1.0, -1.0)
    pre = _fermionic_prefactor(lambda_t)
    table = pre / (lambda_t - 2.0 * nn - 1.0) * sign * np.exp(log_mag)
    return np.where(valid, table, 0.0)


def _bosonic_tables(lambda_t: float, n_max: int) -> Tuple[np.ndarray, np.ndarray]:
    n = np.arange(n_max + 1)
    pre = _bosonic_prefactor(lambda_t)
    c = np.empty(n_max + 1)
    c[0] = pre
    c[1:] = lambda_t * pre * np.exp(_log_b(n[1:])) / (lambda_t - 2.0 * n[1:])
    nn, kk = np.meshgrid(n, n, indexing="ij")
    valid = (nn >= 1) & (kk < nn)
    kk_safe = np.where(valid, kk, 0)
    log_ratio = log_factorial(nn) - 0.5 * (log_factorial(2 * nn - kk_safe) + log_factorial(kk_safe))
    sign = np.where((nn + kk_safe) % 2 == 0, 1.0, -1.0)
    c_p = np.where(valid, SQRT2 * c[:, None] * sign * np.exp(log_ratio), 0.0)
    return c, c_p


def _build(lambda_t: float, n_max: int) -> GroundStateCoefficients:
    if lambda_t == 1.0:
        c_s = np.zeros((n_max + 1, n_max + 1))
        c_s[0, 0] = 1.0
        return GroundStateCoefficients(lambda_t, n_max, None, None, c_s, math.nan, 0.0)
    c_s = _fermionic_table(lambda_t, n_max)
    defect_f = 1.0 - float(np.sum(c_s ** 2))
    if lambda_t < 1.0:
        c, c_p = _bosonic_tables(lambda_t, n_max)
        defect_b = 1.0 - float(np.sum(c ** 2) + np.sum(c_p ** 2))
    else:
        c, c_p, defect_b = None, None, math.nan
    return GroundStateCoefficients(lambda_t, n_max, c, c_p, c_s, defect_b, defect_f)


def ground_state_coefficients(
    lambda_t: float,
    n_max: int = 60,
    escalate: bool = True,
    n_max_cap: int = 200,
    tolerance: float = 1e-3,
) -> GroundStateCoefficients:
    """
    Truncated bosonic-like and fermionic-like coefficient tables.

    The bosonic tables are computed only for lambda_t < 1. When escalate is set,
    n_max is doubled (up to n_max_cap) while the bosonic defect exceeds the
    tolerance; lambda_t in (0.95, 1) goes straight to the cap because the
    fermionic tail is long there.

    Raises:
        DomainError: If lambda_t > 1 or n_max < 1.
    """
    _check_fermionic(lambda_t)
    if n_max < 1:
        raise DomainError(f"n_max must be positive, got {n_max}")
    gs = _build(lambda_t, n_max)
    if not escalate:
        return gs
    if SLOW_FERMIONIC_WINDOW < lambda_t < 1.0 and n_max < n_max_cap:
        gs = _build(lambda_t, n_max_cap)
    while gs.norm_defect_bosonic > tolerance and gs.n_max < n_max_cap:
        gs = _build(lambda_t, min(2 * gs.n_max, n_max_cap))
    if gs.n_max != n_max:
        logger.info(f"Escalated truncation at lambda_t={lambda_t:.6g}: n_max {n_max} -> {gs.n_max}")
        gs = replace(gs, escalated=True)
    return gs


def bosonic_matrix(gs: GroundStateCoefficients) -> np.ndarray:
    """Symmetric M with psi = sum_ab M[a, b] phi_a(x1) phi_b(x2)."""
    if gs.c is None:
        raise DomainError(f"no bosonic-like expansion at lambda_t = {gs.lambda_t}")
    size = 2 * gs.n_max + 1
    m = np.zeros((size, size))
    idx = np.arange(gs.n_max + 1)
    m[idx, idx] = gs.c
    n, k = np.nonzero(gs.c_p)
    values = gs.c_p[n, k] / SQRT2
    m[k, 2 * n - k] = values
    m[2 * n - k, k] = values
    return m


def fermionic_matrix(gs: GroundStateCoefficients) -> np.ndarray:
    """Antisymmetric W with psi = sum_ab W[a, b] phi_a(x_<) phi_b(x_>)."""
    size = 2 * gs.n_max + 2
    w = np.zeros((size, size))
    n, k = np.nonzero(gs.c_s)
    values = gs.c_s[n, k] / SQRT2
    w[k, 2 * n + 1 - k] = values
    w[2 * n + 1 - k, k] = -values
    return w


def _expand(matrix: np.ndarray, first, second) -> np.ndarray:
    first = np.asarray(first, dtype=float)
    second = np.asarray(second, dtype=float)
    shape = np.broadcast(first, second).shape
    first, second = (np.broadcast_to(a, shape).reshape(-1) for a in (first, second))
    size = matrix.shape[0] - 1
    t1 = osc_table(size, first)
    t2 = osc_table(size, second)
    return np.einsum("ap,ab,bp->p", t1, matrix, t2).reshape(shape)


def reconstruct_bosonic(gs: GroundStateCoefficients, x1, x2) -> np.ndarray:
    """Evaluate the truncated bosonic-like series."""
    return _expand(bosonic_matrix(gs), x1, x2)


def reconstruct_fermionic(gs: GroundStateCoefficients, x1, x2) -> np.ndarray:
    """Evaluate the truncated fermionic-like series in ordered coordinates."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return _expand(fermionic_matrix(gs), np.minimum(x1, x2), np.maximum(x1, x2))


def cm_energy(cm_n: int) -> float:
    """Centre-of-mass energy n + 1/2."""
    if cm_n < 0:
        raise DomainError(f"cm_n must be non-negative, got {cm_n}")
    return cm_n + 0.5


def state_energy(lambda_t: float, cm_n: int = 0) -> float:
    """Total energy eps_r + n + 1/2 with eps_r = lambda_t + 1/2."""
    return lambda_t + 0.5 + cm_energy(cm_n)
