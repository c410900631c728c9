"""Special functions: Gamma, digamma, Hermite polynomials, oscillator states, D_nu.

All functions use natural oscillator units (m = omega = hbar = 1).
"""

import logging
import math
from typing import Iterator, Tuple, Union

import numpy as np
from scipy import integrate, special

from .errors import DomainError, NonConvergenceError, PoleError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_X0 = 0.99999999999980993
_LANCZOS_COEF = (
    676.5203681218851, -1259.1392167224028, 771.32342877765313,
    -176.61502916214059, 12.507343278686905, -0.13857109526572012,
    9.9843695780195716e-6, 1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_PI_QUARTER = math.pi ** 0.25

_GAMMA_OVERFLOW = 171.6
_KUMMER_MAX_TERMS = 2000
_KUMMER_RTOL = 1e-16
_NU_CAP = 60.0
_OSC_RESCALE = 1e150
_LOG_OSC_RESCALE = math.log(_OSC_RESCALE)


def _is_pole(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def _sin_pi(x: float) -> float:
    """sin(pi x) with exact zeros at the integers."""
    n = round(x)
    s = math.sin(math.pi * (x - n))
    return -s if n % 2 else s


def _lanczos_sum(z: float) -> Tuple[float, float]:
    a = _LANCZOS_X0
    for i, p in enumerate(_LANCZOS_COEF):
        a += p / (z + i + 1)
    return a, z + _LANCZOS_G + 0.5


def gamma_fn(x: float) -> float:
    """
    Euler Gamma function for real x.

    Uses the Lanczos approximation for x >= 0.5 and the reflection
    formula below it. Exact factorials are returned at positive integers.

    Raises:
        PoleError: If x is a non-positive integer.
    """
    x = float(x)
    if _is_pole(x):
        raise PoleError(x, "gamma")
    if x < 0.5:
        return math.pi / (_sin_pi(x) * gamma_fn(1.0 - x))
    if x == math.floor(x) and x <= 170:
        return float(math.factorial(int(x) - 1))
    if x > _GAMMA_OVERFLOW:
        return math.inf
    z = x - 1.0
    a, t = _lanczos_sum(z)
    # split the power so t**(z+0.5) cannot overflow before exp(-t) is applied
    half = t ** (0.5 * (z + 0.5))
    return _SQRT_2PI * half * (half * math.exp(-t)) * a


def log_gamma(x: float) -> Tuple[float, float]:
    """Return (log|Gamma(x)|, sign of Gamma(x))."""
    x = float(x)
    if _is_pole(x):
        raise PoleError(x, "gamma")
    if x < 0.5:
        s = _sin_pi(x)
        lg, sg = log_gamma(1.0 - x)
        return math.log(math.pi) - math.log(abs(s)) - lg, math.copysign(1.0, s) * sg
    z = x - 1.0
    a, t = _lanczos_sum(z)
    return _LOG_SQRT_2PI + (z + 0.5) * math.log(t) - t + math.log(a), 1.0


def rgamma(x: float) -> float:
    """Reciprocal Gamma; exactly zero at the poles."""
    x = float(x)
    if _is_pole(x):
        return 0.0
    if -_GAMMA_OVERFLOW < x < _GAMMA_OVERFLOW:
        return 1.0 / gamma_fn(x)
    lg, sg = log_gamma(x)
    return sg * math.exp(-lg)


def gamma_ratio(a: float, b: float) -> float:
    """
    Gamma(a) / Gamma(b) without intermediate overflow.

    Returns 0 when b is a pole (and a is not).

    Raises:
        PoleError: If a is a pole.
    """
    if _is_pole(a):
        raise PoleError(a, "gamma")
    if _is_pole(b):
        return 0.0
    if abs(a) <= 100.0 and abs(b) <= 100.0:
        return gamma_fn(a) / gamma_fn(b)
    la, sa = log_gamma(a)
    lb, sb = log_gamma(b)
    return sa * sb * math.exp(la - lb)


def log_factorial(n: ArrayLike) -> ArrayLike:
    """log(n!) for non-negative integers (scalar or array)."""
    return special.gammaln(np.asarray(n, dtype=float) + 1.0)


def digamma_fn(x: float) -> float:
    """
    Digamma function Psi(x).

    Reflection for x < 0, upward recurrence to x > 6, then the
    asymptotic expansion through x**-14.

    Raises:
        PoleError: If x is a non-positive integer.
    """
    x = float(x)
    if _is_pole(x):
        raise PoleError(x, "digamma")
    if x < 0.0:
        r = x - round(x)
        return digamma_fn(1.0 - x) - math.pi / math.tan(math.pi * r)
    value = 0.0
    while x < 6.0:
        value -= 1.0 / x
        x += 1.0
    r = 1.0 / x
    r2 = r * r
    value += math.log(x) - 0.5 * r
    value -= r2 * (1.0 / 12.0 - r2 * (1.0 / 120.0 - r2 * (1.0 / 252.0 - r2 * (
        1.0 / 240.0 - r2 * (1.0 / 132.0 - r2 * (691.0 / 32760.0 - r2 / 12.0))))))
    return value


def _scalar_or_array(result: np.ndarray, scalar: bool) -> ArrayLike:
    return float(result.reshape(-1)[0]) if scalar else result


def hermite(n: int, x: ArrayLike) -> ArrayLike:
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence."""
    if n < 0:
        raise DomainError(f"Hermite order must be non-negative, got {n}")
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        return _scalar_or_array(h_prev, scalar)
    h = 2.0 * x
    for k in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return _scalar_or_array(h, scalar)


def _osc_rows(n_max: int, x: np.ndarray) -> Iterator[np.ndarray]:
    """Yield phi_0(x) ... phi_{n_max}(x) using a log-scaled normalized recurrence."""
    gauss = -0.5 * x * x
    v_prev = np.zeros_like(x)
    v = np.full_like(x, 1.0 / _PI_QUARTER)
    scale = np.zeros_like(x)
    for k in range(n_max + 1):
        with np.errstate(divide="ignore"):
            log_abs = np.log(np.abs(v))
        yield np.where(v == 0.0, 0.0, np.sign(v) * np.exp(log_abs + scale + gauss))
        if k == n_max:
            break
        v_next = x * math.sqrt(2.0 / (k + 1)) * v - math.sqrt(k / (k + 1)) * v_prev
        big = np.abs(v_next) > _OSC_RESCALE
        if np.any(big):
            v_next = np.where(big, v_next / _OSC_RESCALE, v_next)
            v = np.where(big, v / _OSC_RESCALE, v)
            scale = scale + np.where(big, _LOG_OSC_RESCALE, 0.0)
        v_prev, v = v, v_next


def osc_table(n_max: int, x: ArrayLike) -> np.ndarray:
    """Array of shape (n_max + 1, len(x)) holding phi_n(x) for n = 0..n_max."""
    if n_max < 0:
        raise DomainError(f"oscillator index must be non-negative, got {n_max}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    table = np.empty((n_max + 1, x.size))
    for k, row in enumerate(_osc_rows(n_max, x.reshape(-1))):
        table[k] = row
    return table


def osc_eigenfunction(n: int, x: ArrayLike) -> ArrayLike:
    """Normalized oscillator state phi_n(x) = pi^-1/4 (2^n n!)^-1/2 H_n(x) exp(-x^2/2)."""
    if n < 0:
        raise DomainError(f"oscillator index must be non-negative, got {n}")
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    row = None
    for row in _osc_rows(n, x.reshape(-1)):
        pass
    return _scalar_or_array(row.reshape(x.shape), scalar)


def _kummer_m(a: float, b: float, y: float) -> float:
    """Confluent hypergeometric M(a, b, y) by direct summation."""
    term = 1.0
    total = 1.0
    for k in range(_KUMMER_MAX_TERMS):
        term *= (a + k) / (b + k) * y / (k + 1)
        total += term
        past_peak = k + 1 > y and k + 1 > abs(a)
        if term == 0.0 or (past_peak and abs(term) <= _KUMMER_RTOL * abs(total)):
            return total
    raise NonConvergenceError(
        f"Kummer series M({a:.6g}, {b:.6g}, {y:.6g}) did not converge in {_KUMMER_MAX_TERMS} terms",
        module="specfun",
        residual=abs(term / total) if total else abs(term),
    )


def _d_kummer(nu: float, z: float) -> float:
    y = 0.5 * z * z
    even = math.sqrt(math.pi) * rgamma(0.5 * (1.0 - nu))
    odd = math.sqrt(2.0 * math.pi) * z * rgamma(-0.5 * nu)
    total = 0.0
    if even != 0.0:
        total += even * _kummer_m(-0.5 * nu, 0.5, y)
    if odd != 0.0:
        total -= odd * _kummer_m(0.5 * (1.0 - nu), 1.5, y)
    return 2.0 ** (0.5 * nu) * math.exp(-0.25 * z * z) * total


def _d_integral(nu: float, z: float) -> float:
    """D_nu(z) for nu < 0 from exp(-z^2/4)/Gamma(-nu) * int_0^inf t^(-nu-1) exp(-z t - t^2/2) dt."""
    alpha = -nu - 1.0
    lg, _ = log_gamma(-nu)
    if alpha < 0.0:
        upper = -z + math.sqrt(z * z + 100.0)
        value, _ = integrate.quad(
            lambda t: math.exp(-z * t - 0.5 * t * t), 0.0, upper,
            weight="alg", wvar=(alpha, 0.0), epsabs=0.0, epsrel=1e-12, limit=200,
        )
        return math.exp(-0.25 * z * z - lg) * value
    peak = 0.5 * (-z + math.sqrt(z * z + 4.0 * alpha))
    log_peak = (alpha * math.log(peak) if alpha > 0.0 else 0.0) - z * peak - 0.5 * peak * peak

    def integrand(t: float) -> float:
        if t <= 0.0:
            return 1.0 * math.exp(-log_peak) if alpha == 0.0 else 0.0
        return math.exp(alpha * math.log(t) - z * t - 0.5 * t * t - log_peak)

    lower = max(0.0, peak - 10.0)
    upper = peak + 10.0
    points = [peak] if lower < peak < upper else None
    value, _ = integrate.quad(integrand, lower, upper, points=points, epsabs=0.0, epsrel=1e-12, limit=200)
    return math.exp(-0.25 * z * z - lg + log_peak) * value


def _d_recurrence(nu: float, z: float) -> float:
    """Positive non-integer order: start two orders below zero and recur upward."""
    frac = nu - math.floor(nu)
    mu = frac - 1.0
    d_lower = _d_integral(frac - 2.0, z)
    d = _d_integral(mu, z)
    while mu < nu - 0.5:
        d_lower, d = d, z * d - mu * d_lower
        mu += 1.0
    return d


def _d_integer(n: int, z: np.ndarray) -> np.ndarray:
    return _PI_QUARTER * math.exp(0.5 * float(log_factorial(n))) * osc_eigenfunction(n, z / math.sqrt(2.0))


def _d_scalar(nu: float, z: float) -> float:
    if nu < 0.0:
        if nu >= -1.0 and z < 3.0:
            return _d_kummer(nu, z)
        return _d_integral(nu, z)
    if z < 4.0:
        return _d_kummer(nu, z)
    return _d_recurrence(nu, z)


def _smoothed_partial_sum(terms: np.ndarray, y: float) -> float:
    """Average the partial sums over one oscillation period of the series tail."""
    partial = np.cumsum(terms)
    n = terms.size
    window = int(2.0 * math.pi * math.sqrt(n) / y) + 1 if y > 0 else 1
    window = max(1, min(window, n // 2))
    return float(np.mean(partial[-window:]))


def _d_hermite_series(nu: float, z: np.ndarray, odd: bool, n_terms: int) -> np.ndarray:
    y = z / math.sqrt(2.0)
    k = np.arange(n_terms)
    log_b = log_factorial(2 * k) - 2.0 * log_factorial(k) - k * math.log(4.0)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    if odd:
        weights = sign * _PI_QUARTER * np.sqrt(2 * k + 1.0) * np.exp(0.5 * log_b) / (k + 0.5 * (1.0 - nu))
        prefactor = 2.0 ** (0.5 * (nu - 1.0)) * rgamma(0.5 * (1.0 - nu))
    else:
        weights = sign * _PI_QUARTER * np.exp(0.5 * log_b) / (k - 0.5 * nu)
        prefactor = 2.0 ** (0.5 * nu) * rgamma(-0.5 * nu)
    parity = 1 if odd else 0
    rows = np.empty((n_terms, y.size))
    for m, row in enumerate(_osc_rows(2 * n_terms - 1 + parity, y)):
        if m % 2 == parity:
            rows[m // 2] = row
    terms = weights[:, None] * rows
    return np.array([prefactor * _smoothed_partial_sum(terms[:, j], float(y[j])) for j in range(y.size)])


def parabolic_d(nu: float, x: ArrayLike, method: str = "kummer", n_terms: int = 20000) -> ArrayLike:
    """
    Parabolic cylinder function D_nu(x) for real order and x >= 0.

    Args:
        nu: Real order, at most 60.
        x: Non-negative argument (scalar or array).
        method: "kummer" (default: integer orders via Hermite polynomials, otherwise
            two Kummer series, an integral representation or upward recurrence),
            "hermite_even" or "hermite_odd" for the slowly convergent oscillator-series
            cross-checks, which require x > 0.
        n_terms: Number of terms for the oscillator-series methods.

    Returns:
        D_nu(x) with the shape of x.

    Raises:
        DomainError: If x < 0, nu exceeds the cap, or the method is unknown.
        NonConvergenceError: If a Kummer series does not converge.
    """
    scalar = np.ndim(x) == 0
    z = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(z < 0.0):
        raise DomainError("parabolic_d is defined here for x >= 0 only")
    if nu > _NU_CAP:
        raise DomainError(f"order {nu} exceeds the supported cap {_NU_CAP}")
    if method == "kummer":
        if nu >= 0.0 and nu == math.floor(nu):
            result = _d_integer(int(nu), z)
        else:
            result = np.array([_d_scalar(float(nu), float(v)) for v in z.reshape(-1)]).reshape(z.shape)
    elif method in ("hermite_even", "hermite_odd"):
        if np.any(z <= 0.0):
            raise DomainError("oscillator-series evaluation needs x > 0")
        result = _d_hermite_series(float(nu), z.reshape(-1), method == "hermite_odd", n_terms).reshape(z.shape)
    else:
        raise DomainError(f"unknown parabolic_d method '{method}'")
    return _scalar_or_array(result, scalar)
