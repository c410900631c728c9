"""Error types raised by the library and their CLI exit codes."""

from typing import Optional, Tuple

EXIT_OK = 0
EXIT_BAD_ARGUMENTS = 1
EXIT_NON_CONVERGENCE = 2


class PairlabError(Exception):
    """Base class for all pairlab errors."""


class DomainError(PairlabError, ValueError):
    """Argument lies outside the domain of an operation."""


class PoleError(DomainError):
    """Gamma or digamma evaluated at a non-positive integer."""

    def __init__(self, x: float, function: str = "gamma"):
        super().__init__(f"{function} has a pole at x = {x}")
        self.x = x


class DivergenceError(DomainError):
    """The coupling diverges (infinite repulsion or the confinement-induced resonance)."""


class ConfigError(DomainError):
    """Invalid configuration value or file."""


class DimensionMismatch(DomainError):
    """Requested more entries than a list provides."""


class NonConvergenceError(PairlabError, RuntimeError):
    """A numerical procedure did not reach its tolerance."""

    def __init__(self, message: str, module: str = "", residual: Optional[float] = None):
        detail = message
        if module:
            detail = f"[{module}] {detail}"
        if residual is not None:
            detail = f"{detail} (residual={residual:.3e})"
        super().__init__(detail)
        self.module = module
        self.residual = residual


class BracketingError(NonConvergenceError):
    """A root could not be bracketed inside a branch interval."""

    def __init__(self, interval: Tuple[float, float], residuals: Tuple[float, float], module: str = "spectrum"):
        lo, hi = interval
        f_lo, f_hi = residuals
        super().__init__(
            f"no sign change on [{lo:.12g}, {hi:.12g}]: f(lo)={f_lo:.6g}, f(hi)={f_hi:.6g}",
            module=module,
            residual=min(abs(f_lo), abs(f_hi)),
        )
        self.interval = interval
        self.residuals = residuals


class LeakageError(NonConvergenceError):
    """The wavefunction norm captured by a quadrature grid is too small."""


class PairingError(NonConvergenceError):
    """Slater eigenvalues failed to pair into degenerate doublets."""


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the CLI exit code."""
    if isinstance(error, NonConvergenceError):
        return EXIT_NON_CONVERGENCE
    return EXIT_BAD_ARGUMENTS
