"""Command-line entry point."""

import argparse
import logging
import math
import os
import sys
from typing import Dict, List, Optional

import numpy as np

from .config import AppConfig, load_config
from .decomposition import (
    crossover_from_scan,
    decompose,
    entropy_scan,
    fermionized_decomposition,
    fermionized_degeneracy,
    fermionized_ladder,
    noninteracting_ladder,
)
from .errors import EXIT_BAD_ARGUMENTS, EXIT_OK, ConfigError, DivergenceError, DomainError, PairlabError, exit_code_for
from .models import GridSpec
from .oracle import build_rdm, compare_decompositions, make_wavefunction
from .output import read_json_rows, write_rows
from .spectrum import energy_of_gamma, spectrum_scan
from .verify import jump_condition, relative_ode_residual, residual_order
from .workers import parallel_map

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class _ArgumentParser(argparse.ArgumentParser):
    """Argument parser that exits with the bad-arguments code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_ARGUMENTS, f"{self.prog}: error: {message}\n")


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=[logging.StreamHandler(sys.stderr)],
    )
    logging.getLogger().setLevel(getattr(logging, level.upper(), logging.INFO))


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise DomainError(message)


def _lambda_from_args(args) -> float:
    """Relative parameter from --lambda, or from --gamma on the ground branch."""
    if args.gamma is not None:
        point = energy_of_gamma(args.gamma, 0)
        logger.info(f"gamma_t={args.gamma} gives lambda_t={point.lambda_t:.12g} on the ground branch")
        return point.lambda_t
    return args.lambda_t


def _cmd_spectrum(args, config: AppConfig) -> List[Dict[str, object]]:
    _require(args.steps >= 2, f"--steps must be at least 2, got {args.steps}")
    _require(args.branches >= 1, f"--branches must be at least 1, got {args.branches}")
    _require(args.gamma_min < args.gamma_max, "--gamma-min must be below --gamma-max")
    gammas = np.linspace(args.gamma_min, args.gamma_max, args.steps)
    points = spectrum_scan((float(g) for g in gammas), args.branches)
    return [{"branch": p.branch, "gamma": p.gamma_t, "eps_r": p.eps_r} for p in points]


def _decomposition_rows(result, top: int) -> List[Dict[str, object]]:
    rows = []
    for j, value in enumerate(result.eigenvalues[:top]):
        rows.append({
            "representation": result.kind,
            "index": j + 1,
            "eigenvalue": float(value),
            "k_number": result.k_number,
            "s_lin": result.s_lin,
            "s_lin_strict": result.s_lin_strict,
            "s_vn": result.s_vn,
            "norm_defect": result.norm_defect,
        })
    return rows


def _cmd_decompose(args, config: AppConfig) -> List[Dict[str, object]]:
    _require(args.top >= 1, f"--top must be at least 1, got {args.top}")
    lambda_t = _lambda_from_args(args)
    _require(lambda_t <= 1.0, f"decompositions need lambda_t <= 1, got {lambda_t}")
    gs, schmidt, slater = decompose(lambda_t, config.numerics)
    rows = []
    if schmidt is not None:
        rows.extend(_decomposition_rows(schmidt, args.top))
    rows.extend(_decomposition_rows(slater, args.top))
    return rows


def _cmd_scan(args, config: AppConfig) -> List[Dict[str, object]]:
    _require(args.steps >= 2, f"--steps must be at least 2, got {args.steps}")
    _require(args.lambda_min < args.lambda_max <= 1.0, "need --lambda-min < --lambda-max <= 1")
    grid = np.linspace(args.lambda_min, args.lambda_max, args.steps)
    rows = entropy_scan(grid, config.numerics, config.runtime.threads, with_pair_size=not args.no_pair_size)
    crossing = crossover_from_scan(rows)
    if crossing is not None:
        logger.info(f"K - K^f changes sign near lambda_t = {crossing:.6f}")
    failed = sum(1 for row in rows if row["error"])
    if failed:
        logger.warning(f"{failed} of {len(rows)} scan points failed")
    return rows


def _cmd_noninteracting(args, config: AppConfig) -> List[Dict[str, object]]:
    _require(args.levels >= 0, f"--levels must be non-negative, got {args.levels}")
    return [
        {"n": d.n, "energy": d.energy, "s_lin": d.s_lin, "bound": d.bound, "top_occupation": float(d.occupations[0])}
        for d in noninteracting_ladder(args.levels)
    ]


def _cmd_fermionized(args, config: AppConfig) -> List[Dict[str, object]]:
    _require(args.max_energy >= 2, f"--max-energy must be at least 2, got {args.max_energy}")
    states = fermionized_ladder(args.max_energy)
    for energy in range(2, args.max_energy + 1):
        count = sum(1 for s in states if s.energy == energy)
        expected, _ = fermionized_degeneracy(energy)
        if count != expected:
            logger.warning(f"Energy {energy}: {count} states listed, degeneracy is {expected}")
    return [
        {"energy": s.energy, "l_t": s.l_t, "cm_n": s.cm_n, "s_lin_f": s.s_lin_f, "bound": s.bound,
         "slater_rank": s.slater_rank}
        for s in states
    ]


def _analytic_from_file(path: str, mode: str) -> np.ndarray:
    """Reference eigenvalues from a decompose or oracle JSON document."""
    payload = read_json_rows(path)
    rows = payload.get("rows", [])
    if payload.get("command") == "oracle":
        return np.array([row["analytic"] for row in rows], dtype=float)
    if payload.get("command") == "decompose":
        wanted = "schmidt" if mode == "standard" else "slater"
        values = np.array([row["eigenvalue"] for row in rows if row["representation"] == wanted], dtype=float)
        if values.size == 0:
            raise ConfigError(f"{path} holds no {wanted} eigenvalues")
        return np.repeat(values, 2) if wanted == "slater" else values
    raise ConfigError(f"{path} holds '{payload.get('command')}' output, expected decompose or oracle")


def _analytic_reference(args, mode: str, lambda_t: float, config: AppConfig):
    if args.state == "product":
        _require(mode == "standard", "the product state has an analytic reference in standard mode only")
        return np.array([1.0])
    if args.state == "repulsive":
        _require(mode == "strict_1d", "the repulsive state has an analytic reference in strict_1d mode only")
        coefficients = fermionized_decomposition(args.l_t, args.cm_n).coefficients
        return np.repeat(coefficients ** 2 / 2.0, 2)
    _require(args.cm_n == 0, "analytic decompositions cover cm_n = 0; pass --analytic for excited states")
    _, schmidt, slater = decompose(lambda_t, config.numerics)
    if mode == "standard":
        _require(schmidt is not None, f"no Schmidt decomposition at lambda_t = {lambda_t}")
        return schmidt
    return slater


def _cmd_oracle(args, config: AppConfig) -> List[Dict[str, object]]:
    _require(args.top_k >= 1, f"--top-k must be at least 1, got {args.top_k}")
    lambda_t = 0.0
    if args.state == "repulsive" and args.l_t is None:
        args.l_t = 1
    if args.state in ("exact", "attractive"):
        _require(args.lambda_t is not None or args.gamma is not None, "--lambda or --gamma is required")
        lambda_t = _lambda_from_args(args)
    psi = make_wavefunction(args.state, lambda_t=lambda_t, cm_n=args.cm_n, l_t=args.l_t)
    grid = GridSpec(config.grid.extent, config.grid.points)
    kernel = build_rdm(psi, grid, args.mode)
    if args.analytic:
        analytic = _analytic_from_file(args.analytic, args.mode)
    else:
        analytic = _analytic_reference(args, args.mode, lambda_t, config)
    report = compare_decompositions(analytic, kernel.eigenvalues, args.top_k)
    logger.info(f"Max deviation over top {report.top_k}: {report.max_deviation:.3e} (purity {kernel.purity:.8f})")
    return report.rows


class _VerifyPoint:
    """Picklable per-lambda worker for the verify command."""

    def __init__(self, spacing: float, extent: float):
        self.spacing = spacing
        self.extent = extent

    def __call__(self, lambda_t: float) -> Dict[str, object]:
        report = relative_ode_residual(lambda_t, GridSpec.with_spacing(self.extent, self.spacing))
        row = {
            "lambda_t": lambda_t,
            "max_residual": report.max_residual,
            "spacing": report.spacing,
            "excluded_band": report.excluded_band,
            "order_ratio": residual_order(lambda_t, extent=self.extent),
            "gamma_t": math.nan,
            "jump_measured": math.nan,
            "jump_expected": math.nan,
        }
        try:
            jump = jump_condition(lambda_t)
        except DivergenceError as e:
            logger.info(f"No jump check at lambda_t={lambda_t}: {e}")
            return row
        row.update(gamma_t=jump.gamma_t, jump_measured=jump.measured, jump_expected=jump.expected)
        return row


def _cmd_verify(args, config: AppConfig) -> List[Dict[str, object]]:
    _require(args.spacing > 0, f"--spacing must be positive, got {args.spacing}")
    _require(args.extent > 0, f"--extent must be positive, got {args.extent}")
    for value in args.lambda_values:
        _require(value <= 1.0, f"lambda_t must be <= 1, got {value}")
    results = parallel_map(_VerifyPoint(args.spacing, args.extent), args.lambda_values, config.runtime.threads)
    rows = []
    for value, (ok, payload) in zip(args.lambda_values, results):
        if not ok:
            raise DomainError(f"verify failed at lambda_t={value}: {payload}")
        rows.append(payload)
    return rows


COMMANDS = {
    "spectrum": _cmd_spectrum,
    "decompose": _cmd_decompose,
    "scan": _cmd_scan,
    "noninteracting": _cmd_noninteracting,
    "fermionized": _cmd_fermionized,
    "oracle": _cmd_oracle,
    "verify": _cmd_verify,
}


def _add_coupling(parser: argparse.ArgumentParser, required: bool) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--lambda", dest="lambda_t", type=float, default=None,
                       help="Relative parameter lambda_t = eps_r - 1/2")
    group.add_argument("--gamma", type=float, default=None,
                       help="Dimensionless coupling; solved on the ground branch")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per output table."""
    common = _ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default=None,
                        help="Output format (default: PAIRLAB_FORMAT or csv)")
    common.add_argument("--output", default=None, help="Output file (default: stdout)")
    common.add_argument("--threads", type=int, default=None,
                        help="Worker processes for scans (default: PAIRLAB_THREADS or CPU count)")
    common.add_argument("--config", default=None, help="key=value configuration file")
    common.add_argument("--n-max", type=int, default=None, help="Shell truncation of the ground-state series")
    common.add_argument("--grid-extent", type=float, default=None, help="Oracle grid half-width")
    common.add_argument("--grid-points", type=int, default=None, help="Oracle grid point count (odd)")
    common.add_argument("--log-level", default=None, help="Logging level (default: LOG_LEVEL or INFO)")

    parser = _ArgumentParser(
        prog="pairlab",
        description="Entanglement of two harmonically trapped particles with contact interaction",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="Relative energy versus coupling")
    p.add_argument("--gamma-min", type=float, default=-8.0)
    p.add_argument("--gamma-max", type=float, default=8.0)
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--branches", type=int, default=3)

    p = sub.add_parser("decompose", parents=[common], help="Schmidt and Slater spectra of one ground state")
    _add_coupling(p, required=True)
    p.add_argument("--top", type=int, default=10, help="Eigenvalues per representation")

    p = sub.add_parser("scan", parents=[common], help="Entanglement measures over a lambda grid")
    p.add_argument("--lambda-min", type=float, default=-6.0)
    p.add_argument("--lambda-max", type=float, default=0.99)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--no-pair-size", action="store_true", help="Skip the pair size column")

    p = sub.add_parser("noninteracting", parents=[common], help="Non-interacting centre-of-mass ladder")
    p.add_argument("--levels", type=int, default=10, help="Highest centre-of-mass quantum number")

    p = sub.add_parser("fermionized", parents=[common], help="Infinitely repulsive ladder")
    p.add_argument("--max-energy", type=int, default=12)

    p = sub.add_parser("oracle", parents=[common], help="Grid reduced density matrix versus analytic spectra")
    _add_coupling(p, required=False)
    p.add_argument("--state", choices=["exact", "attractive", "repulsive", "product"], default="exact")
    p.add_argument("--mode", choices=["standard", "strict_1d"], default="standard")
    p.add_argument("--cm-n", type=int, default=0, help="Centre-of-mass quanta (first index for product)")
    p.add_argument("--l-t", type=int, default=None, help="Odd relative quantum number, default 1 (second index for product)")
    p.add_argument("--top-k", type=int, default=8)
    p.add_argument("--analytic", default=None, help="decompose/oracle JSON used as the reference spectrum")

    p = sub.add_parser("verify", parents=[common], help="Differential-equation residuals and the contact jump")
    p.add_argument("--lambda", dest="lambda_values", type=float, nargs="+", default=[-1.0, 0.0, 0.5])
    p.add_argument("--spacing", type=float, default=1e-3)
    p.add_argument("--extent", type=float, default=5.0)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (None, 0) else int(e.code)

    _configure_logging(args.log_level or os.getenv("LOG_LEVEL", "INFO"))
    try:
        config = load_config(
            args.config,
            {
                "n_max": args.n_max,
                "grid_extent": args.grid_extent,
                "grid_points": args.grid_points,
                "threads": args.threads,
                "format": args.format,
                "log_level": args.log_level,
            },
        )
        logging.getLogger().setLevel(getattr(logging, config.runtime.log_level, logging.INFO))
        logger.info(f"Running {args.command}...")
        rows = COMMANDS[args.command](args, config)
        write_rows(args.command, rows, config.runtime.output_format, args.output)
        logger.info(f"{args.command} finished with {len(rows)} rows")
        return EXIT_OK
    except PairlabError as e:
        logger.error(f"{args.command} failed: {e}")
        return exit_code_for(e)
    except OSError as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_BAD_ARGUMENTS


if __name__ == "__main__":
    sys.exit(main())
