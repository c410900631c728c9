"""CSV and JSON emission with frozen, versioned column schemas."""

import csv
import io
import json
import logging
import math
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

from .decomposition import TOP_EIGENVALUES
from .errors import ConfigError, DomainError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

SCAN_COLUMNS = (
    ["lambda_t", "s_lin_bosonic", "s_lin_fermionic", "s_lin_strict", "k_number", "k_number_f",
     "s_vn_bosonic", "s_vn_fermionic", "pair_size", "n_max", "defect_bosonic", "defect_fermionic"]
    + [f"schmidt_{j + 1}" for j in range(TOP_EIGENVALUES)]
    + [f"slater_{j + 1}" for j in range(TOP_EIGENVALUES)]
    + ["error"]
)

SCHEMAS: Dict[str, List[str]] = {
    "spectrum": ["branch", "gamma", "eps_r"],
    "decompose": ["representation", "index", "eigenvalue", "k_number", "s_lin", "s_lin_strict", "s_vn", "norm_defect"],
    "scan": SCAN_COLUMNS,
    "noninteracting": ["n", "energy", "s_lin", "bound", "top_occupation"],
    "fermionized": ["energy", "l_t", "cm_n", "s_lin_f", "bound", "slater_rank"],
    "oracle": ["rank", "analytic", "grid", "deviation"],
    "verify": ["lambda_t", "gamma_t", "max_residual", "spacing", "excluded_band", "order_ratio",
               "jump_measured", "jump_expected"],
}


def format_value(value) -> str:
    """Fixed textual form: 12 significant digits for floats, plain text otherwise."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return "%.12g" % value
    return str(value)


def _json_value(value):
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def render_csv(command: str, rows: Sequence[Dict[str, object]]) -> str:
    """CSV text with a schema comment line, a header and one line per row."""
    columns = _columns(command)
    buffer = io.StringIO()
    buffer.write(f"# schema_version={SCHEMA_VERSION},command={command}\n")
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({name: format_value(row.get(name, math.nan)) for name in columns})
    return buffer.getvalue()


def render_json(command: str, rows: Sequence[Dict[str, object]]) -> str:
    """JSON document mirroring the CSV rows as objects; non-finite numbers become null."""
    columns = _columns(command)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "columns": columns,
        "rows": [{name: _json_value(row.get(name, math.nan)) for name in columns} for row in rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def _columns(command: str) -> List[str]:
    if command not in SCHEMAS:
        raise DomainError(f"no output schema for command '{command}'")
    return SCHEMAS[command]


def write_rows(command: str, rows: Sequence[Dict[str, object]], output_format: str = "csv", path: Optional[str] = None) -> None:
    """Render rows and write them to path, or to stdout when path is None."""
    if output_format == "csv":
        text = render_csv(command, rows)
    elif output_format == "json":
        text = render_json(command, rows)
    else:
        raise ConfigError(f"output format must be csv or json, got {output_format}")
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info(f"Wrote {len(rows)} {command} rows to {path}")


def read_json_rows(path: str) -> Dict[str, object]:
    """
    Load a JSON document written by render_json.

    Raises:
        ConfigError: If the file is missing, unparsable or has another schema version.
    """
    try:
        with open(path, encoding="utf-8") as f:
            payload = json.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in {path}: {e}") from e
    if not isinstance(payload, dict) or payload.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"{path} is not a schema_version={SCHEMA_VERSION} pairlab document")
    return payload
