"""Deterministic CSV/JSON writers and the point-cloud CSV reader."""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .euclid_sets import PointCloudSet
from .rational import format_fraction, to_fraction


def _cell(v) -> str:
    if isinstance(v, Fraction):
        return format_fraction(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def read_points_csv(path, dim: int | None = None) -> PointCloudSet:
    """One point per row; decimal or ``p/q`` tokens; ``#`` lines skipped."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            rows.append(tuple(to_fraction(tok.strip()) for tok in row))
    if not rows:
        raise ValueError(f"{path}: no points")
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: rows of different length")
    frame = max(max(abs(v) for v in r) for r in rows)
    return PointCloudSet.from_points(rows, dim, frame=max(Fraction(1), frame))


def write_points_csv(P: PointCloudSet, path, exact: bool = False) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for p in P.points:
            w.writerow([format_fraction(v) if exact else repr(float(v)) for v in p])


def write_rows_csv(rows: Sequence[dict], path, columns: Sequence[str] | None = None) -> None:
    columns = list(columns or (rows[0].keys() if rows else []))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r.get(c, "")) for c in columns])


def _jsonable(v):
    if isinstance(v, Fraction):
        return format_fraction(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item"):  # numpy scalars
        return v.item()
    return v


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(obj, path) -> None:
    Path(path).write_text(dumps(obj))


def load_json(path) -> dict:
    return json.loads(Path(path).read_text())


def parse_range(text: str) -> list[int]:
    """``"4:9"`` -> ``[4, ..., 9]``; ``"1,3,5"`` -> ``[1, 3, 5]``."""
    if ":" in text:
        a, b = text.split(":")
        return list(range(int(a), int(b) + 1))
    return [int(t) for t in text.split(",") if t.strip()]


def parse_values(text: str) -> list[Fraction]:
    return [to_fraction(t.strip()) for t in text.split(",") if t.strip()]


def parse_point(text: str) -> tuple[Fraction, ...]:
    return tuple(parse_values(text))


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p

