"""Pearson correlation tables with a strong/weak/none classification.

Observations arrive as named columns keyed by mesh id; the analysis
produces a symmetric coefficient matrix whose entries carry a five-way
class tag used by the report views downstream.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .exceptions import ConstantColumn, InvalidSamples, MissingJoin

STRONG_THRESHOLD = 0.7
WEAK_THRESHOLD = 0.3
VARIANCE_FLOOR = 1e-300
CLASS_LABELS = ("strong+", "weak+", "none", "weak-", "strong-")


class ObservationTable(NamedTuple):
    """Rectangular named columns over a shared mesh-id row order."""

    mesh_ids: tuple[str, ...]
    columns: dict[str, np.ndarray]


class CorrelationMatrix(NamedTuple):
    labels: tuple[str, ...]
    rho: np.ndarray
    classes: tuple[tuple[str, ...], ...]
    dropped: int


def pearson(a: Sequence[float], b: Sequence[float]) -> float:
    """Centered product-moment coefficient, clamped to [-1, 1]."""
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidSamples("inputs must be equal-length vectors")
    if len(x) < 3:
        raise InvalidSamples("need at least three observations")
    if np.var(x) < VARIANCE_FLOOR or np.var(y) < VARIANCE_FLOOR:
        raise ConstantColumn("constant input has no correlation")
    dx = x - x.mean()
    dy = y - y.mean()
    value = (dx @ dy) / np.sqrt((dx @ dx) * (dy @ dy))
    return float(min(1.0, max(-1.0, value)))


def classify(rho: float) -> str:
    """Five-way tag; both magnitude ranges are half-open from below, so
    |rho| exactly 0.7 is still weak and exactly 0.3 is none."""
    magnitude = abs(rho)
    if magnitude > STRONG_THRESHOLD:
        return "strong+" if rho > 0 else "strong-"
    if magnitude > WEAK_THRESHOLD:
        return "weak+" if rho > 0 else "weak-"
    return "none"


def build_table(
    mesh_ids: Iterable[str], columns: Mapping[str, Iterable[float]]
) -> ObservationTable:
    ids = tuple(str(m) for m in mesh_ids)
    if len(set(ids)) != len(ids):
        raise InvalidSamples("duplicate mesh ids in observation table")
    data: dict[str, np.ndarray] = {}
    for name, values in columns.items():
        arr = np.asarray(list(values), dtype=float)
        if arr.shape != (len(ids),):
            raise InvalidSamples(f"column {name!r} is not rectangular")
        data[name] = arr
    return ObservationTable(ids, data)


def join_tables(left: ObservationTable, right: ObservationTable) -> ObservationTable:
    """Strict join on mesh id: every row must pair up, else the datasets
    are out of sync and the benchmark should fail loudly."""
    missing = set(left.mesh_ids) ^ set(right.mesh_ids)
    if missing:
        sample = ", ".join(sorted(missing)[:5])
        raise MissingJoin(f"{len(missing)} unmatched mesh ids (e.g. {sample})")
    overlap = set(left.columns) & set(right.columns)
    if overlap:
        raise MissingJoin(f"column name collision: {sorted(overlap)}")
    index = {m: i for i, m in enumerate(right.mesh_ids)}
    order = [index[m] for m in left.mesh_ids]
    merged = dict(left.columns)
    for name, values in right.columns.items():
        merged[name] = values[order]
    return ObservationTable(left.mesh_ids, merged)


def correlation_matrix(
    table: ObservationTable, columns: Sequence[str]
) -> CorrelationMatrix:
    """Pairwise coefficients over the named columns.

    Rows containing NaN in any analyzed column are dropped first and
    counted; a constant surviving column is reported by name.
    """
    for name in columns:
        if name not in table.columns:
            raise InvalidSamples(f"unknown column {name!r}")
    stacked = np.column_stack([table.columns[name] for name in columns])
    keep = ~np.isnan(stacked).any(axis=1)
    dropped = int(len(keep) - keep.sum())
    stacked = stacked[keep]
    if len(stacked) < 3:
        raise InvalidSamples("fewer than three complete rows")
    for name, col in zip(columns, stacked.T):
        if np.var(col) < VARIANCE_FLOOR:
            raise ConstantColumn(f"column {name!r} is constant")
    k = len(columns)
    rho = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            rho[i, j] = rho[j, i] = pearson(stacked[:, i], stacked[:, j])
    classes = tuple(
        tuple(classify(rho[i, j]) if i != j else "strong+" for j in range(k))
        for i in range(k)
    )
    return CorrelationMatrix(tuple(columns), rho, classes, dropped)


def matrix_to_csv(matrix: CorrelationMatrix) -> str:
    """Coefficient grid with a label header row and label-prefixed rows."""
    lines = ["label," + ",".join(matrix.labels)]
    for label, row in zip(matrix.labels, matrix.rho):
        lines.append(label + "," + ",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def matrix_to_json(matrix: CorrelationMatrix) -> str:
    payload = {
        "labels": list(matrix.labels),
        "rho": [[float(v) for v in row] for row in matrix.rho],
        "class": [list(row) for row in matrix.classes],
    }
    return json.dumps(payload, indent=2) + "\n"
