"""Reading and validating the sweep CSV contract.

The producer writes a fixed 14-column header with shortest round-trip
floats, empty cells for absent values, and lowercase true/false for the
convergence flag.  Everything here refuses files that deviate from that
contract instead of guessing, so schema drift in either package shows up
as a loud error rather than a silently wrong figure.
"""

import csv
import os
from dataclasses import dataclass

COLUMNS = [
    "n",
    "nbar",
    "omega_over_gamma",
    "delta_over_gamma",
    "theta_over_2pi",
    "flux_over_gamma",
    "t_fwd",
    "t_bwd",
    "r1",
    "r2",
    "r3",
    "r4",
    "solver_mode",
    "converged",
]

_INT_COLUMNS = {"n"}
_TEXT_COLUMNS = {"solver_mode", "converged"}


class SchemaError(Exception):
    """The input does not follow the sweep CSV contract."""


@dataclass(frozen=True)
class Row:
    n: int | None
    nbar: float | None
    omega_over_gamma: float | None
    delta_over_gamma: float | None
    theta_over_2pi: float | None
    flux_over_gamma: float | None
    t_fwd: float | None
    t_bwd: float | None
    r1: float | None
    r2: float | None
    r3: float | None
    r4: float | None
    solver_mode: str
    converged: bool


def _check_header(header, path):
    if header == COLUMNS:
        return
    missing = [c for c in COLUMNS if c not in header]
    extra = [c for c in header if c not in COLUMNS]
    parts = [f"{path}: header does not match the sweep schema"]
    if missing:
        parts.append(f"missing columns: {', '.join(missing)}")
    if extra:
        parts.append(f"unexpected columns: {', '.join(extra)}")
    if not missing and not extra:
        parts.append("columns are present but out of order")
    raise SchemaError("; ".join(parts))


def _parse_cell(name, text, line, path):
    if name in _TEXT_COLUMNS:
        return text
    if text == "":
        return None
    try:
        if name in _INT_COLUMNS:
            return int(text)
        return float(text)
    except ValueError:
        raise SchemaError(
            f"{path}, line {line}: column {name!r} holds {text!r}, "
            f"expected a number or an empty cell"
        ) from None


def read_rows(path: str | os.PathLike) -> list[Row]:
    """Parse a sweep CSV, enforcing the full contract.

    Raises SchemaError for a missing file, a header that is not exactly
    the producer's column list, ragged lines, unparseable cells, a bad
    convergence flag, or a file with no data rows.
    """
    if not os.path.exists(path):
        raise SchemaError(f"input CSV does not exist: {path}")
    rows = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: file is empty, no header")
        _check_header(header, path)
        for line, record in enumerate(reader, start=2):
            if len(record) != len(COLUMNS):
                raise SchemaError(
                    f"{path}, line {line}: {len(record)} cells, "
                    f"expected {len(COLUMNS)}"
                )
            cells = {
                name: _parse_cell(name, text, line, path)
                for name, text in zip(COLUMNS, record)
            }
            flag = cells.pop("converged")
            if flag not in ("true", "false"):
                raise SchemaError(
                    f"{path}, line {line}: converged must be true or false, "
                    f"got {flag!r}"
                )
            rows.append(Row(converged=flag == "true", **cells))
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows
