"""Point-set, matrix, dendrogram, and report file formats.

JSON point sets:
    complex:  {"weights": [q0, ...], "points": [{"re": [...], "im": [...]}, ...]}
    rational: {"weights": [q0, ...], "points": [[int, ...], ...]}

CSV point sets: a header line ``# weights: q0 q1 ...`` followed by rows
``re0,im0,re1,im1,...`` (complex) or ``x0,x1,...`` (rational).

All floats are emitted with 17 significant digits so outputs are stable,
and every write goes through a temp-file-then-rename so interrupted runs
never leave partial files.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Sequence

import numpy as np

from .cluster import Dendrogram, DistanceMatrix
from .core import ProjPoint, RatProjPoint, Weights


class MalformedInputError(ValueError):
    """Input file contents do not match the expected format."""


def _fmt_float(x: float) -> str:
    return "%.17g" % float(x)


def dumps_stable(obj, indent: int = 0) -> str:
    """Deterministic JSON text: sorted keys, floats at 17 significant digits."""
    pad = " " * indent
    child = " " * (indent + 2)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            "%s%s: %s" % (child, json.dumps(str(k)), dumps_stable(obj[k], indent + 2))
            for k in sorted(obj, key=str)
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        flat = all(isinstance(v, (int, float, np.integer, np.floating)) for v in seq)
        if flat:
            return "[" + ", ".join(dumps_stable(v) for v in seq) + "]"
        items = [child + dumps_stable(v, indent + 2) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, obj) -> None:
    atomic_write_text(path, dumps_stable(obj) + "\n")


def point_kind(points: Sequence) -> str:
    if all(isinstance(p, RatProjPoint) for p in points):
        return "rational"
    if all(isinstance(p, ProjPoint) for p in points):
        return "complex"
    raise ValueError("mixed or unknown point kinds")


def points_to_json_dict(weights: Weights, points: Sequence) -> dict:
    kind = point_kind(points)
    if kind == "rational":
        rows = [list(p.coords) for p in points]
    else:
        rows = [
            {"re": [float(c.real) for c in p.coords], "im": [float(c.imag) for c in p.coords]}
            for p in points
        ]
    return {"weights": list(weights.q), "points": rows}


def save_points(path: str, weights: Weights, points: Sequence, extra: dict | None = None) -> None:
    if path.endswith(".csv"):
        atomic_write_text(path, _points_to_csv(weights, points))
        return
    obj = points_to_json_dict(weights, points)
    if extra:
        obj.update(extra)
    write_json(path, obj)


def _points_to_csv(weights: Weights, points: Sequence) -> str:
    kind = point_kind(points)
    lines = ["# weights: " + " ".join(str(q) for q in weights.q)]
    for p in points:
        if kind == "rational":
            lines.append(",".join(str(x) for x in p.coords))
        else:
            cells = []
            for c in p.coords:
                cells.append(_fmt_float(c.real))
                cells.append(_fmt_float(c.imag))
            lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def load_points(path: str) -> tuple[str, Weights, list]:
    """Read a point set; returns (kind, weights, points)."""
    if path.endswith(".csv"):
        return _load_points_csv(path)
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(obj, dict) or "weights" not in obj or "points" not in obj:
        raise MalformedInputError(f"{path}: expected keys 'weights' and 'points'")
    weights = Weights(obj["weights"])
    rows = obj["points"]
    if not rows:
        raise MalformedInputError(f"{path}: empty point list")
    points: list = []
    if isinstance(rows[0], dict):
        for i, row in enumerate(rows):
            try:
                coords = np.asarray(row["re"], dtype=float) + 1j * np.asarray(
                    row["im"], dtype=float
                )
                points.append(ProjPoint(weights, coords))
            except (KeyError, TypeError, ValueError) as exc:
                raise MalformedInputError(f"{path}: point {i}: {exc}") from exc
        return "complex", weights, points
    for i, row in enumerate(rows):
        try:
            points.append(RatProjPoint(weights, [int(x) for x in row]))
        except (TypeError, ValueError) as exc:
            raise MalformedInputError(f"{path}: point {i}: {exc}") from exc
    return "rational", weights, points


def _load_points_csv(path: str) -> tuple[str, Weights, list]:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise MalformedInputError(f"{path}: missing '# weights: ...' header line")
    header = lines[0].lstrip("#").strip()
    if not header.startswith("weights:"):
        raise MalformedInputError(f"{path}: header must be '# weights: q0 q1 ...'")
    weights = Weights(int(tok) for tok in header.split(":", 1)[1].split())
    d = len(weights)
    rows = lines[1:]
    if not rows:
        raise MalformedInputError(f"{path}: no data rows")

    first_cells = rows[0].split(",")
    if len(first_cells) == d and all(_is_int(c) for c in first_cells):
        points: list = []
        for ln_no, row in enumerate(rows, start=2):
            cells = row.split(",")
            if len(cells) != d:
                raise MalformedInputError(
                    f"{path}: line {ln_no}: expected {d} integer fields, got {len(cells)}"
                )
            try:
                points.append(RatProjPoint(weights, [int(c) for c in cells]))
            except ValueError as exc:
                raise MalformedInputError(f"{path}: line {ln_no}: {exc}") from exc
        return "rational", weights, points

    points = []
    for ln_no, row in enumerate(rows, start=2):
        cells = row.split(",")
        if len(cells) != 2 * d:
            raise MalformedInputError(
                f"{path}: line {ln_no}: expected {2 * d} fields (re,im pairs), got {len(cells)}"
            )
        try:
            vals = [float(c) for c in cells]
        except ValueError as exc:
            raise MalformedInputError(f"{path}: line {ln_no}: {exc}") from exc
        coords = np.asarray(vals[0::2]) + 1j * np.asarray(vals[1::2])
        points.append(ProjPoint(weights, coords))
    return "complex", weights, points


def _is_int(cell: str) -> bool:
    try:
        int(cell)
        return True
    except ValueError:
        return False


def save_labels(path: str, labels: Sequence[int]) -> None:
    lines = ["index,label"] + ["%d,%d" % (i, lab) for i, lab in enumerate(labels)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_labels(path: str) -> np.ndarray:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != "index,label":
        raise MalformedInputError(f"{path}: expected 'index,label' header")
    pairs = []
    for ln_no, ln in enumerate(lines[1:], start=2):
        cells = ln.split(",")
        if len(cells) != 2:
            raise MalformedInputError(f"{path}: line {ln_no}: expected 2 fields")
        pairs.append((int(cells[0]), int(cells[1])))
    pairs.sort()
    return np.asarray([lab for _, lab in pairs], dtype=int)


def save_matrix(path: str, matrix: DistanceMatrix, extra: dict | None = None) -> None:
    obj = {"n": matrix.n, "values": [list(row) for row in matrix.values]}
    if extra:
        obj.update(extra)
    write_json(path, obj)


def load_matrix(path: str) -> DistanceMatrix:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"{path}: invalid JSON ({exc})") from exc
    if "values" not in obj:
        raise MalformedInputError(f"{path}: expected key 'values'")
    try:
        return DistanceMatrix(np.asarray(obj["values"], dtype=float))
    except ValueError as exc:
        raise MalformedInputError(f"{path}: {exc}") from exc


def save_dendrogram(path: str, d: Dendrogram, extra: dict | None = None) -> None:
    obj = d.to_json_dict()
    if extra:
        obj.update(extra)
    write_json(path, obj)


def load_dendrogram(path: str) -> Dendrogram:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"{path}: invalid JSON ({exc})") from exc
    if "n_leaves" not in obj or "merges" not in obj:
        raise MalformedInputError(f"{path}: expected keys 'n_leaves' and 'merges'")
    return Dendrogram.from_json_dict(obj)
