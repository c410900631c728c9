"""Schmidt and Slater decompositions, entanglement measures and closed-form ladders."""

import logging
import math
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from .config import NumericsConfig
from .errors import DomainError, NonConvergenceError, PairingError
from .linalg import clamp_occupations, svd_coef_matrix
from .models import (
    DecompositionResult,
    FermionizedDecomposition,
    GroundStateCoefficients,
    NaturalOrbital,
    NonInteractingDecomposition,
)
from .states import bosonic_matrix, fermionic_matrix, ground_state_coefficients, pair_size
from .workers import parallel_map

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


def _entropy(values: np.ndarray) -> float:
    """-sum v ln v with 0 ln 0 = 0."""
    positive = values[values > 0.0]
    return float(-np.sum(positive * np.log(positive)))


def _check_defect(defect: float, max_defect: float, kind: str) -> None:
    if not math.isfinite(defect) or defect > max_defect:
        raise NonConvergenceError(
            f"{kind} truncation defect too large for a decomposition",
            module="decomposition",
            residual=defect,
        )


def _parity_blocks(size: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.arange(0, size, 2), np.arange(1, size, 2)


def schmidt_decompose(
    gs: GroundStateCoefficients,
    rank_threshold: float = 1e-10,
    max_defect: float = 0.5,
    normalize: bool = False,
) -> DecompositionResult:
    """
    Schmidt decomposition of the bosonic-like expansion.

    The coefficient matrix only couples orbitals of equal parity, so the even
    and odd blocks are decomposed separately. Eigenvalues are the squared
    singular values; with normalize=False they sum to 1 - norm_defect.

    Raises:
        DomainError: If the state has no bosonic-like expansion (lambda_t = 1).
        NonConvergenceError: If the truncation defect exceeds max_defect.
    """
    if gs.c is None:
        raise DomainError(f"no bosonic-like expansion at lambda_t = {gs.lambda_t}")
    _check_defect(gs.norm_defect_bosonic, max_defect, "bosonic")
    m = bosonic_matrix(gs)
    even, odd = _parity_blocks(m.shape[0])
    sigma = np.concatenate([
        svd_coef_matrix(m[np.ix_(even, even)]),
        svd_coef_matrix(m[np.ix_(odd, odd)]),
    ])
    values = np.sort(sigma ** 2)[::-1]
    if normalize:
        values = values / np.sum(values)
    values = clamp_occupations(values)
    purity = float(np.sum(values ** 2))
    return DecompositionResult(
        kind="schmidt",
        eigenvalues=values,
        rank=int(np.count_nonzero(values > rank_threshold)),
        k_number=1.0 / purity,
        s_vn=_entropy(values),
        s_lin=1.0 - purity,
        s_lin_strict=1.0 - purity,
        norm_defect=gs.norm_defect_bosonic,
        multiplicity=1,
    )


def slater_decompose(
    gs: GroundStateCoefficients,
    rank_threshold: float = 1e-10,
    max_defect: float = 0.5,
    pairing_tolerance: float = 1e-6,
    normalize: bool = False,
) -> DecompositionResult:
    """
    Slater decomposition of the fermionic-like expansion.

    W couples even orbitals to odd ones only. The one-particle density matrix
    W^T W then splits into X X^T and X^T X, whose spectra are computed
    independently and must coincide: that is the two-fold degeneracy.

    Raises:
        PairingError: If the two spectra differ by more than pairing_tolerance.
        NonConvergenceError: If the truncation defect exceeds max_defect.
    """
    _check_defect(gs.norm_defect_fermionic, max_defect, "fermionic")
    w = fermionic_matrix(gs)
    even, odd = _parity_blocks(w.shape[0])
    x = w[np.ix_(even, odd)]
    first = svd_coef_matrix(x) ** 2
    second = svd_coef_matrix(x.T) ** 2
    mismatch = float(np.max(np.abs(first - second)))
    if mismatch > pairing_tolerance:
        raise PairingError(
            f"Slater eigenvalues do not pair at lambda_t = {gs.lambda_t}",
            module="decomposition",
            residual=mismatch,
        )
    z = np.sort(0.5 * (first + second))[::-1]
    if normalize:
        z = z / (2.0 * np.sum(z))
    z = clamp_occupations(z, hi=0.5)
    half_purity = float(np.sum(z ** 2))  # Tr rho^2 = 2 * half_purity
    return DecompositionResult(
        kind="slater",
        eigenvalues=z,
        rank=int(np.count_nonzero(z > rank_threshold)),
        k_number=1.0 / (4.0 * half_purity),
        s_vn=2.0 * _entropy(z) - LN2,
        s_lin=1.0 - 4.0 * half_purity,
        s_lin_strict=1.0 - 2.0 * half_purity,
        norm_defect=gs.norm_defect_fermionic,
        multiplicity=2,
    )


def _coefficients_for(lambda_t: float, numerics: NumericsConfig) -> GroundStateCoefficients:
    return ground_state_coefficients(
        lambda_t,
        n_max=numerics.n_max,
        escalate=True,
        n_max_cap=numerics.n_max_cap,
        tolerance=numerics.norm_tolerance,
    )


def decompose(lambda_t: float, numerics: Optional[NumericsConfig] = None):
    """Both decompositions of the ground state at lambda_t; the Schmidt one is None at lambda_t = 1."""
    numerics = numerics or NumericsConfig()
    gs = _coefficients_for(lambda_t, numerics)
    schmidt = None
    if gs.c is not None:
        schmidt = schmidt_decompose(gs, numerics.rank_threshold, numerics.max_defect)
    slater = slater_decompose(gs, numerics.rank_threshold, numerics.max_defect, numerics.pairing_tolerance)
    return gs, schmidt, slater


TOP_EIGENVALUES = 10


class _ScanPoint:
    """Picklable per-point worker for entropy_scan."""

    def __init__(self, numerics: NumericsConfig, with_pair_size: bool):
        self.numerics = numerics
        self.with_pair_size = with_pair_size

    def __call__(self, lambda_t: float) -> Dict[str, object]:
        gs, schmidt, slater = decompose(lambda_t, self.numerics)
        nan = math.nan
        row = {
            "lambda_t": lambda_t,
            "s_lin_bosonic": schmidt.s_lin if schmidt else nan,
            "s_lin_fermionic": slater.s_lin,
            "s_lin_strict": slater.s_lin_strict,
            "k_number": schmidt.k_number if schmidt else nan,
            "k_number_f": slater.k_number,
            "s_vn_bosonic": schmidt.s_vn if schmidt else nan,
            "s_vn_fermionic": slater.s_vn,
            "pair_size": pair_size(lambda_t) if self.with_pair_size else nan,
            "n_max": gs.n_max,
            "defect_bosonic": gs.norm_defect_bosonic,
            "defect_fermionic": gs.norm_defect_fermionic,
        }
        for j in range(TOP_EIGENVALUES):
            row[f"schmidt_{j + 1}"] = float(schmidt.eigenvalues[j]) if schmidt and j < schmidt.eigenvalues.size else nan
        for j in range(TOP_EIGENVALUES):
            row[f"slater_{j + 1}"] = float(slater.eigenvalues[j]) if j < slater.eigenvalues.size else nan
        return row


def entropy_scan(
    lambda_grid: Sequence[float],
    numerics: Optional[NumericsConfig] = None,
    workers: int = 1,
    with_pair_size: bool = True,
) -> List[Dict[str, object]]:
    """
    Entanglement table over a lambda grid, in input order.

    Failed points keep their lambda_t, carry NaN measures and an "error" message.
    """
    numerics = numerics or NumericsConfig()
    grid = [float(v) for v in lambda_grid]
    for value in grid:
        if value > 1.0:
            raise DomainError(f"scan grid must lie in (-inf, 1], got {value}")
    results = parallel_map(_ScanPoint(numerics, with_pair_size), grid, workers)
    rows = []
    for value, (ok, payload) in zip(grid, results):
        if ok:
            payload["error"] = ""
            rows.append(payload)
        else:
            rows.append({"lambda_t": value, "error": payload})
    return rows


def crossover_lambda(
    numerics: Optional[NumericsConfig] = None,
    lo: float = 0.0,
    hi: float = 0.99,
    xtol: float = 1e-6,
) -> float:
    """lambda_t where the Schmidt and Slater numbers coincide (root of K - K^f)."""
    numerics = numerics or NumericsConfig()

    def gap(lambda_t: float) -> float:
        _, schmidt, slater = decompose(lambda_t, numerics)
        return schmidt.k_number - slater.k_number

    return float(optimize.brentq(gap, lo, hi, xtol=xtol))


@lru_cache(maxsize=256)
def _rotated_hermite_coefficients(n: int, l: int) -> Dict[Tuple[int, int], int]:
    """
    Integer coefficients h[a, b] with H_n((y1+y2)/sqrt2) H_l((y2-y1)/sqrt2)
    = 2^(-(n+l)/2) sum h[a, b] H_a(y1) H_b(y2).
    """
    def linearize(p: int, q: int) -> List[Tuple[int, int]]:
        # H_p H_q = sum_r 2^r r! C(p, r) C(q, r) H_{p+q-2r}
        return [(p + q - 2 * r, 2 ** r * math.factorial(r) * math.comb(p, r) * math.comb(q, r))
                for r in range(min(p, q) + 1)]

    h: Dict[Tuple[int, int], int] = {}
    for k in range(n + 1):
        for j in range(l + 1):
            weight = math.comb(n, k) * math.comb(l, j) * (-1) ** j
            for a, wa in linearize(k, j):
                for b, wb in linearize(n - k, l - j):
                    h[(a, b)] = h.get((a, b), 0) + weight * wa * wb
    return {key: value for key, value in h.items() if value != 0}


def rotated_product_coefficients(n: int, l: int) -> np.ndarray:
    """
    Matrix R with phi_n((y1+y2)/sqrt2) phi_l((y2-y1)/sqrt2) = sum R[a, b] phi_a(y1) phi_b(y2).

    Only a + b = n + l survives; the check is exact in integer arithmetic.
    """
    if n < 0 or l < 0:
        raise DomainError(f"indices must be non-negative, got n={n}, l={l}")
    total = n + l
    h = _rotated_hermite_coefficients(n, l)
    stray = [key for key in h if sum(key) != total]
    if stray:
        raise NonConvergenceError(f"rotated expansion left terms off the energy shell: {stray[:3]}",
                                  module="decomposition")
    r = np.zeros((total + 1, total + 1))
    log_norm = 0.5 * (math.lgamma(n + 1) + math.lgamma(l + 1)) + 0.5 * total * LN2
    for (a, b), value in h.items():
        log_mag = math.log(abs(value)) + 0.5 * (math.lgamma(a + 1) + math.lgamma(b + 1)) - log_norm
        r[a, b] = math.copysign(math.exp(log_mag), value)
    return r


def _binomial_occupation(n: int, k: int) -> float:
    return math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1) - n * LN2)


def noninteracting_decomposition(n: int) -> NonInteractingDecomposition:
    """
    Schmidt decomposition of phi_n((x1+x2)/sqrt2) phi_0((x1-x2)/sqrt2).

    Natural orbitals (phi_k +/- phi_{n-k})/sqrt2 carry binom(n, k)/2^n each for
    k < n/2; for even n, phi_{n/2} carries binom(n, n/2)/2^n.
    """
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    orbitals = []
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    for k in range((n + 1) // 2):
        occupation = _binomial_occupation(n, k)
        orbitals.append(NaturalOrbital(occupation, [(k, inv_sqrt2), (n - k, inv_sqrt2)]))
        orbitals.append(NaturalOrbital(occupation, [(k, inv_sqrt2), (n - k, -inv_sqrt2)]))
    if n % 2 == 0:
        orbitals.append(NaturalOrbital(_binomial_occupation(n, n // 2), [(n // 2, 1.0)]))
    orbitals.sort(key=lambda orbital: -orbital.occupation)
    occupations = np.array([orbital.occupation for orbital in orbitals])
    return NonInteractingDecomposition(
        n=n,
        orbitals=orbitals,
        occupations=occupations,
        s_lin=1.0 - float(np.sum(occupations ** 2)),
        bound=1.0 - 1.0 / (n + 1),
        energy=float(n + 1),
    )


def _fermionized_ground_coefficients(l_t: int) -> np.ndarray:
    """Closed form for cm_n = 0: sqrt(l!/2^(l-1)) (-1)^q / sqrt((l-q)! q!)."""
    q = np.arange((l_t - 1) // 2 + 1)
    log_mag = 0.5 * (math.lgamma(l_t + 1) - (l_t - 1) * LN2) - 0.5 * np.array(
        [math.lgamma(l_t - v + 1) + math.lgamma(v + 1) for v in q])
    return np.where(q % 2 == 0, 1.0, -1.0) * np.exp(log_mag)


def fermionized_coefficients(l_t: int, cm_n: int) -> np.ndarray:
    """Slater coefficients c_q of S_{q, cm_n + l_t - q}, q = 0..floor((cm_n + l_t - 1)/2)."""
    if l_t < 1 or l_t % 2 == 0:
        raise DomainError(f"l_t must be an odd positive integer, got {l_t}")
    if cm_n < 0:
        raise DomainError(f"cm_n must be non-negative, got {cm_n}")
    if cm_n == 0:
        return _fermionized_ground_coefficients(l_t)
    total = cm_n + l_t
    r = rotated_product_coefficients(cm_n, l_t)
    q = np.arange((total - 1) // 2 + 1)
    return math.sqrt(2.0) * r[q, total - q]


def fermionized_decomposition(l_t: int, cm_n: int = 0) -> FermionizedDecomposition:
    """Slater decomposition of the infinitely repulsive state (l_t odd, centre-of-mass quanta cm_n)."""
    coefficients = fermionized_coefficients(l_t, cm_n)
    energy = cm_n + l_t + 1
    return FermionizedDecomposition(
        l_t=l_t,
        cm_n=cm_n,
        coefficients=coefficients,
        s_lin_f=1.0 - float(np.sum(coefficients ** 4)),
        bound=1.0 - 1.0 / (energy // 2),
        energy=float(energy),
    )


def fermionized_degeneracy(eps: int) -> Tuple[int, int]:
    """(number of degenerate fermionized states, available single-particle states) at energy eps."""
    if eps < 2 or int(eps) != eps:
        raise DomainError(f"energy must be an integer >= 2, got {eps}")
    eps = int(eps)
    degeneracy = eps // 2
    return degeneracy, 2 * degeneracy


def noninteracting_ladder(n_max: int) -> List[NonInteractingDecomposition]:
    """Decompositions for n = 0..n_max."""
    return [noninteracting_decomposition(n) for n in range(n_max + 1)]


def fermionized_ladder(max_energy: int) -> List[FermionizedDecomposition]:
    """All fermionized states with 2 <= energy <= max_energy, ordered by energy then l_t."""
    states = []
    for energy in range(2, max_energy + 1):
        for l_t in range(1, energy, 2):
            states.append(fermionized_decomposition(l_t, energy - 1 - l_t))
    return states


def crossover_from_scan(rows: Sequence[Dict[str, object]]) -> Optional[float]:
    """First sign change of K - K^f along scan rows, by linear interpolation; None if there is none."""
    points = []
    for row in rows:
        k, k_f = row.get("k_number", math.nan), row.get("k_number_f", math.nan)
        if row.get("error") or not (math.isfinite(k) and math.isfinite(k_f)):
            continue
        points.append((float(row["lambda_t"]), float(k) - float(k_f)))
    for (x0, d0), (x1, d1) in zip(points, points[1:]):
        if d0 == 0.0:
            return x0
        if d0 * d1 < 0.0:
            return x0 - d0 * (x1 - x0) / (d1 - d0)
    return None
