"""Shared helpers for the post-hoc figure scripts: CSV access and palette."""

from __future__ import annotations

import csv
from pathlib import Path

# Okabe-Ito colorblind-safe palette
PALETTE = {
    "blue": "#0072B2",
    "orange": "#E69F00",
    "green": "#009E73",
    "vermillion": "#D55E00",
    "sky": "#56B4E9",
    "purple": "#CC79A7",
    "grey": "#999999",
    "black": "#000000",
}

VERDICT_COLORS = {
    "healthy": PALETTE["green"],
    "warning": PALETTE["orange"],
    "blown_up": PALETTE["vermillion"],
}


class CsvFormatError(ValueError):
    """Input table unreadable or missing required columns."""


def read_table(path, required: list[str]) -> dict[str, list[str]]:
    """Read a CSV into column lists, insisting on the required columns."""
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise CsvFormatError(f"{path}: empty file")
            missing = [c for c in required if c not in reader.fieldnames]
            if missing:
                raise CsvFormatError(f"{path}: missing columns {missing}")
            cols: dict[str, list[str]] = {name: [] for name in reader.fieldnames}
            for row in reader:
                if any(row[c] is None for c in reader.fieldnames):
                    raise CsvFormatError(f"{path}: ragged row {row}")
                for name in reader.fieldnames:
                    cols[name].append(row[name])
    except OSError as exc:
        raise CsvFormatError(f"{path}: {exc}") from exc
    return cols


def floats(column: list[str], path, name: str) -> "list[float]":
    try:
        return [float(v) for v in column]
    except ValueError as exc:
        raise CsvFormatError(f"{path}: column {name} is not numeric: {exc}") from exc
