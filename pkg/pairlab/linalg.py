"""Dense symmetric eigensolver (parallel-ordered cyclic Jacobi) and singular values."""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple, Union

import numpy as np

from .errors import DomainError, NonConvergenceError

logger = logging.getLogger(__name__)

JACOBI_TOLERANCE = 1e-12
MAX_SWEEPS = 100


@dataclass(frozen=True)
class SymMatrix:
    """Real symmetric matrix; storage is symmetrized on construction."""
    data: np.ndarray

    @classmethod
    def from_array(cls, a, atol: float = 1e-9) -> "SymMatrix":
        a = np.array(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DomainError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DomainError("matrix has non-finite entries")
        scale = max(np.abs(a).max(), 1.0)
        asym = np.abs(a - a.T).max()
        if asym > atol * scale:
            raise DomainError(f"matrix is not symmetric (max |A - A^T| = {asym:.3e})")
        return cls(0.5 * (a + a.T))

    @property
    def dim(self) -> int:
        return self.data.shape[0]


@lru_cache(maxsize=32)
def _round_robin(m: int) -> Tuple[Tuple[np.ndarray, np.ndarray], ...]:
    """Circle-method schedule: m - 1 rounds of m/2 disjoint index pairs (m even)."""
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        p = np.array([players[i] for i in range(m // 2)])
        q = np.array([players[m - 1 - i] for i in range(m // 2)])
        lo, hi = np.minimum(p, q), np.maximum(p, q)
        rounds.append((lo, hi))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_norm(a: np.ndarray) -> float:
    # never as ||A||^2 - ||diag A||^2: that difference bottoms out near 1e-8 ||A||
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return float(np.linalg.norm(off))


def sym_eigs(matrix: Union[SymMatrix, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits every index pair once, grouped into rounds of disjoint
    pairs that are rotated together.

    Args:
        matrix: SymMatrix or square array.

    Returns:
        (eigenvalues sorted descending, eigenvectors as orthonormal columns).

    Raises:
        NonConvergenceError: If the off-diagonal norm is still above
            1e-12 * ||A||_F after the sweep cap.
    """
    if not isinstance(matrix, SymMatrix):
        matrix = SymMatrix.from_array(matrix)
    d = matrix.dim
    m = d + (d % 2)
    a = np.zeros((m, m))
    a[:d, :d] = matrix.data
    v = np.eye(m)
    norm = float(np.linalg.norm(matrix.data))
    if d == 1 or norm == 0.0:
        return np.diag(matrix.data).copy(), np.eye(d)

    target = JACOBI_TOLERANCE * norm
    skip = 1e-18 * norm
    off = _off_norm(a)
    sweeps = 0
    while off > target:
        if sweeps >= MAX_SWEEPS:
            raise NonConvergenceError(
                f"Jacobi did not converge in {MAX_SWEEPS} sweeps (d={d})",
                module="linalg",
                residual=off / norm,
            )
        for p, q in _round_robin(m):
            apq = a[p, q]
            active = np.abs(apq) > skip
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.where(theta >= 0.0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            col_p, col_q = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * col_p - s * col_q
            a[:, q] = s * col_p + c * col_q
            row_p, row_q = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * row_p - s[:, None] * row_q
            a[q, :] = s[:, None] * row_p + c[:, None] * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0

            vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
            v[:, p] = c * vec_p - s * vec_q
            v[:, q] = s * vec_p + c * vec_q
        sweeps += 1
        off = _off_norm(a)
    logger.debug(f"Jacobi converged in {sweeps} sweeps (d={d}, off={off / norm:.2e})")

    values = np.diag(a)[:d]
    vectors = v[:d, :d]
    order = np.argsort(-values, kind="stable")
    return values[order], vectors[:, order]


def clamp_occupations(values: np.ndarray, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Clip eigenvalues of a density matrix to [lo, hi], logging the clamp size."""
    values = np.asarray(values, dtype=float)
    clipped = np.clip(values, lo, hi)
    magnitude = float(np.max(np.abs(clipped - values))) if values.size else 0.0
    if magnitude > 1e-8:
        logger.warning(f"Clamped eigenvalues by up to {magnitude:.3e}")
    elif magnitude > 0.0:
        logger.debug(f"Clamped eigenvalue roundoff of {magnitude:.3e}")
    return clipped


def svd_coef_matrix(c, return_vectors: bool = False):
    """
    Singular values of a real matrix from the eigenvalues of C^T C.

    Args:
        c: Rectangular real matrix.
        return_vectors: Also return the right singular vectors as columns.

    Returns:
        Singular values in descending order, optionally with the vectors.
    """
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or not np.all(np.isfinite(c)):
        raise DomainError("svd_coef_matrix expects a finite 2-D array")
    gram = c.T @ c
    values, vectors = sym_eigs(SymMatrix.from_array(gram, atol=1e-6))
    values = clamp_occupations(values, lo=0.0, hi=np.inf)
    sigma = np.sqrt(values)
    if return_vectors:
        return sigma, vectors
    return sigma
