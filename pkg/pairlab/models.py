"""Data models shared across modules."""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class SpectralPoint:
    """A solution of the energy-interaction relation."""
    branch: int      # 0 is the ground branch
    gamma_t: float   # dimensionless coupling
    eps_r: float     # relative energy E_r / hbar omega
    lambda_t: float  # eps_r - 1/2


@dataclass(frozen=True)
class GroundStateCoefficients:
    """Truncated bosonic-like and fermionic-like expansions of the ground state at fixed lambda_t."""
    lambda_t: float
    n_max: int
    c: Optional[np.ndarray]        # c(n), n = 0..n_max; None when lambda_t >= 1
    c_p: Optional[np.ndarray]      # c_p[n, k] for 1 <= n <= n_max, 0 <= k < n; zero elsewhere
    c_s: np.ndarray                # c_s[n, k] for 0 <= n <= n_max, 0 <= k <= n; zero elsewhere
    norm_defect_bosonic: float     # nan when the bosonic form is unavailable
    norm_defect_fermionic: float
    escalated: bool = False        # n_max was raised to meet the tolerance


@dataclass
class DecompositionResult:
    """Spectrum of the one-particle reduced density matrix and derived measures."""
    kind: str                 # "schmidt" or "slater"
    eigenvalues: np.ndarray   # descending; slater: z_j once per degenerate pair
    rank: int                 # schmidt rank, or number of Slater terms
    k_number: float
    s_vn: float
    s_lin: float
    s_lin_strict: float
    norm_defect: float = 0.0
    multiplicity: int = 1     # 2 for slater

    @property
    def full_spectrum(self) -> np.ndarray:
        """Eigenvalues with multiplicity, descending."""
        return np.repeat(self.eigenvalues, self.multiplicity)

    @property
    def purity(self) -> float:
        return float(self.multiplicity * np.sum(self.eigenvalues ** 2))


@dataclass
class NaturalOrbital:
    """Orbital written as a combination of oscillator states."""
    occupation: float
    components: List[Tuple[int, float]]  # (oscillator index, amplitude)

    def label(self) -> str:
        return " ".join(f"{amp:+.6g}*phi_{idx}" for idx, amp in self.components)


@dataclass
class NonInteractingDecomposition:
    """Schmidt decomposition of a non-interacting centre-of-mass excitation."""
    n: int
    orbitals: List[NaturalOrbital]
    occupations: np.ndarray  # descending
    s_lin: float
    bound: float
    energy: float


@dataclass
class FermionizedDecomposition:
    """Slater decomposition of an infinitely repulsive state."""
    l_t: int
    cm_n: int
    coefficients: np.ndarray  # c_q for S_{q, n + l_t - q}, q = 0..floor((n + l_t - 1)/2)
    s_lin_f: float
    bound: float
    energy: float

    @property
    def slater_rank(self) -> int:
        return int(np.count_nonzero(np.abs(self.coefficients) > 1e-12))


@dataclass(frozen=True)
class GridSpec:
    """Uniform 1D quadrature grid on [-extent, extent]."""
    extent: float
    points: int

    def __post_init__(self):
        if self.extent <= 0:
            raise DomainError(f"grid extent must be positive, got {self.extent}")
        if self.points < 3 or self.points % 2 == 0:
            raise DomainError(f"grid points must be odd and at least 3, got {self.points}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / (self.points - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(-self.extent, self.extent, self.points)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights."""
        w = np.full(self.points, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        return w

    @classmethod
    def with_spacing(cls, extent: float, spacing: float) -> "GridSpec":
        """Smallest odd grid on [-extent, extent] whose spacing does not exceed the given one."""
        intervals = int(math.ceil(2.0 * extent / spacing))
        intervals += intervals % 2
        return cls(extent, intervals + 1)


@dataclass
class RdmKernel:
    """Discretized one-particle reduced density matrix."""
    grid: GridSpec
    mode: str                 # "standard" or "strict_1d"
    matrix: np.ndarray        # sqrt(w_i) rho(x_i, x_j) sqrt(w_j), trace 1
    norm: float               # grid norm of psi before trace normalization
    eigenvalues: Optional[np.ndarray] = None

    @property
    def purity(self) -> float:
        return float(np.sum(self.matrix * self.matrix))


@dataclass
class ComparisonReport:
    """Deviation between analytic and grid eigenvalues."""
    top_k: int
    max_deviation: float
    rows: List[dict] = field(default_factory=list)  # rank, analytic, grid, deviation


@dataclass
class ResidualReport:
    """Finite-difference residual of the relative equation away from the contact point."""
    lambda_t: float
    max_residual: float
    region: str
    spacing: float
    excluded_band: float


@dataclass
class JumpReport:
    """Derivative jump of the relative state across the contact point."""
    lambda_t: float
    gamma_t: float
    measured: float   # (psi'(0+) - psi'(0-)) / psi(0) from one-sided differences
    expected: float   # 2 gamma_t
    spacing: float

    @property
    def deviation(self) -> float:
        return abs(self.measured - self.expected)
