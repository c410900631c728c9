"""Brute-force reduced density matrices on a quadrature grid."""

import logging
from abc import ABC, abstractmethod
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, DomainError, LeakageError
from .linalg import SymMatrix, clamp_occupations, sym_eigs
from .models import ComparisonReport, DecompositionResult, GridSpec, RdmKernel
from .specfun import osc_eigenfunction
from .states import eval_psi_attractive, eval_psi_exact, eval_psi_repulsive

logger = logging.getLogger(__name__)

MODES = ("standard", "strict_1d")
MIN_GRID_NORM = 0.999
SYMMETRY_TOLERANCE = 1e-12


class Wavefunction(ABC):
    """Abstract real two-particle wavefunction evaluator."""

    name = "wavefunction"

    @abstractmethod
    def __call__(self, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        """
        Evaluate psi on broadcastable coordinate arrays.

        Args:
            x1: Coordinates of the first particle.
            x2: Coordinates of the second particle.

        Returns:
            Real array of the broadcast shape.
        """
        pass


class ExactState(Wavefunction):
    """Exact eigenstate with relative parameter lambda_t and cm_n centre-of-mass quanta."""

    name = "exact"

    def __init__(self, lambda_t: float, cm_n: int = 0):
        self.lambda_t = lambda_t
        self.cm_n = cm_n

    def __call__(self, x1, x2):
        return np.asarray(eval_psi_exact(x1, x2, self.lambda_t, self.cm_n))


class RepulsiveState(Wavefunction):
    """Infinitely repulsive state with odd relative quantum number l_t."""

    name = "repulsive"

    def __init__(self, l_t: int, cm_n: int = 0):
        self.l_t = l_t
        self.cm_n = cm_n

    def __call__(self, x1, x2):
        return np.asarray(eval_psi_repulsive(x1, x2, self.l_t, self.cm_n))


class AttractiveState(Wavefunction):
    """Strong-attraction approximation, valid for lambda_t <= -5."""

    name = "attractive"

    def __init__(self, lambda_t: float, cm_n: int = 0):
        self.lambda_t = lambda_t
        self.cm_n = cm_n

    def __call__(self, x1, x2):
        return np.asarray(eval_psi_attractive(x1, x2, self.lambda_t, self.cm_n))


class ProductState(Wavefunction):
    """Uncorrelated phi_a(x1) phi_b(x2)."""

    name = "product"

    def __init__(self, a: int = 0, b: int = 0):
        self.a = a
        self.b = b

    def __call__(self, x1, x2):
        return np.asarray(osc_eigenfunction(self.a, x1)) * np.asarray(osc_eigenfunction(self.b, x2))


def make_wavefunction(kind: str, lambda_t: float = 0.0, cm_n: int = 0, l_t: Optional[int] = None) -> Wavefunction:
    """
    Create a wavefunction evaluator by kind.

    The product state uses cm_n and l_t as its two orbital indices.
    """
    if kind == "exact":
        return ExactState(lambda_t, cm_n)
    if kind == "repulsive":
        return RepulsiveState(l_t if l_t is not None else int(lambda_t), cm_n)
    if kind == "attractive":
        return AttractiveState(lambda_t, cm_n)
    if kind == "product":
        return ProductState(cm_n, l_t or 0)
    raise DomainError(f"unknown wavefunction kind '{kind}'")


def _parity_basis(points: int):
    """Orthonormal even and odd combinations of mirror grid nodes (odd point count)."""
    centre = points // 2
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    even = np.zeros((points, centre + 1))
    odd = np.zeros((points, centre))
    even[centre, 0] = 1.0
    for j in range(1, centre + 1):
        even[centre + j, j] = inv_sqrt2
        even[centre - j, j] = inv_sqrt2
        odd[centre + j, j - 1] = inv_sqrt2
        odd[centre - j, j - 1] = -inv_sqrt2
    return even, odd


def _kernel_spectrum(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues of the kernel, split by reflection parity when the kernel allows it."""
    scale = float(np.max(np.abs(matrix)))
    mirrored = matrix[::-1, ::-1]
    if float(np.max(np.abs(matrix - mirrored))) <= SYMMETRY_TOLERANCE * max(scale, 1.0):
        even, odd = _parity_basis(matrix.shape[0])
        blocks = [even.T @ matrix @ even, odd.T @ matrix @ odd]
        logger.debug(f"Kernel is reflection symmetric; diagonalizing blocks {even.shape[1]} and {odd.shape[1]}")
        values = np.concatenate([sym_eigs(SymMatrix.from_array(b, atol=1e-8))[0] for b in blocks])
    else:
        values = sym_eigs(SymMatrix.from_array(matrix, atol=1e-8))[0]
    lowest = float(np.min(values))
    if lowest < -1e-10:
        logger.warning(f"Kernel has a negative eigenvalue {lowest:.3e}")
    return clamp_occupations(np.sort(values)[::-1])


def build_rdm(psi: Wavefunction, grid: GridSpec, mode: str = "standard") -> RdmKernel:
    """
    One-particle reduced density matrix of psi by trapezoid quadrature.

    In strict_1d mode the first coordinate is read as the left particle and psi
    is continued antisymmetrically across the contact line before reducing.

    Raises:
        DomainError: For an unknown mode.
        LeakageError: If the grid captures less than 0.999 of the norm.
    """
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got '{mode}'")
    x = grid.nodes
    w = grid.weights
    x1, x2 = np.meshgrid(x, x, indexing="ij")
    values = np.asarray(psi(x1, x2), dtype=float)
    if mode == "strict_1d":
        values = values * np.sign(x2 - x1)
    norm = float(w @ (values * values) @ w)
    if norm < MIN_GRID_NORM:
        raise LeakageError(
            f"grid [-{grid.extent}, {grid.extent}] captures norm {norm:.6f}",
            module="oracle",
            residual=1.0 - norm,
        )
    root_w = np.sqrt(w)
    a = root_w[:, None] * values * root_w[None, :]
    matrix = (a @ a.T) / norm
    matrix = 0.5 * (matrix + matrix.T)
    kernel = RdmKernel(grid=grid, mode=mode, matrix=matrix, norm=norm)
    kernel.eigenvalues = _kernel_spectrum(matrix)
    logger.info(
        f"Built {mode} kernel for {psi.name} state on {grid.points} points "
        f"(norm {norm:.8f}, top eigenvalue {kernel.eigenvalues[0]:.8f})"
    )
    return kernel


def compare_decompositions(
    analytic: Union[DecompositionResult, Sequence[float]],
    grid_result: Sequence[float],
    top_k: int,
) -> ComparisonReport:
    """
    Compare the leading eigenvalues of two spectra.

    Slater results are expanded to their two-fold degenerate spectrum first.

    Raises:
        DimensionMismatch: If top_k exceeds either list or is not positive.
    """
    if isinstance(analytic, DecompositionResult):
        reference = analytic.full_spectrum
    else:
        reference = np.sort(np.asarray(analytic, dtype=float))[::-1]
    measured = np.sort(np.asarray(grid_result, dtype=float))[::-1]
    if top_k < 1 or top_k > reference.size or top_k > measured.size:
        raise DimensionMismatch(
            f"top_k={top_k} but the lists hold {reference.size} and {measured.size} eigenvalues"
        )
    rows = []
    for j in range(top_k):
        deviation = abs(float(reference[j]) - float(measured[j]))
        rows.append({"rank": j + 1, "analytic": float(reference[j]), "grid": float(measured[j]), "deviation": deviation})
    return ComparisonReport(top_k=top_k, max_deviation=max(row["deviation"] for row in rows), rows=rows)
