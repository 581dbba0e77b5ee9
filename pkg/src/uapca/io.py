"""Dataset files, label aggregation, standardization, and CSV output.

Two input formats are supported.  A dataset file is JSON:

    {
      "dims": ["M1", "M2"],
      "items": [
        {"label": "Tom", "weight": 1.0,
         "values": [{"number": 15}, {"interval": [10, 12]}]},
        {"label": "cluster", "mvn": {"mean": [0, 0], "cov": [[1, 0], [0, 1]]}}
      ]
    }

with cell forms {"number": x}, {"interval": [a, b]}, {"trapezoid":
[a, b, c, d]}, and {"normal": {"mean": m, "sd": s}}.  A points file is CSV
with one header row, D numeric columns, and an optional trailing ``label``
column.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .cov import CovOptions, global_cov
from .metrics import ExperimentRow
from .model import (
    Distribution,
    EmpiricalCluster,
    Gaussian,
    Interval,
    Normal1D,
    Number,
    Point,
    ProductOf1D,
    Trapezoid,
    UncertainDataset,
    _readonly,
)
from .sensitivity import EigenCurves, FactorTrace, SweepSchedule


class DatasetFormatError(ValueError):
    """A dataset or points file failed validation; the message says where."""


# ---------------------------------------------------------------------------
# JSON dataset files.

_CELL_KEYS = ("number", "interval", "trapezoid", "normal")


def _parse_cell(spec, where: str):
    if not isinstance(spec, dict) or len(spec) != 1:
        raise DatasetFormatError(
            f"{where}: each value must be an object with exactly one of {_CELL_KEYS}"
        )
    (kind, payload), = spec.items()
    try:
        if kind == "number":
            return Number(float(payload))
        if kind == "interval":
            lo, hi = payload
            return Interval(float(lo), float(hi))
        if kind == "trapezoid":
            a, b, c, d = payload
            return Trapezoid(float(a), float(b), float(c), float(d))
        if kind == "normal":
            return Normal1D(float(payload["mean"]), float(payload["sd"]))
    except DatasetFormatError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise DatasetFormatError(f"{where}: {exc}") from exc
    raise DatasetFormatError(f"{where}: unknown value kind {kind!r}")


def _parse_item(obj, index: int, dim: int) -> tuple[Distribution, float, str | None]:
    where = f"item {index}"
    if not isinstance(obj, dict):
        raise DatasetFormatError(f"{where}: expected an object, got {type(obj).__name__}")
    label = obj.get("label")
    if label is not None and not isinstance(label, str):
        raise DatasetFormatError(f"{where}: label must be a string")
    weight = obj.get("weight", 1.0)
    if not isinstance(weight, (int, float)) or isinstance(weight, bool):
        raise DatasetFormatError(f"{where}: weight must be a number")

    has_values = "values" in obj
    has_mvn = "mvn" in obj
    if has_values == has_mvn:
        raise DatasetFormatError(f"{where}: exactly one of 'values' or 'mvn' is required")
    try:
        if has_values:
            values = obj["values"]
            if not isinstance(values, list) or len(values) != dim:
                raise DatasetFormatError(
                    f"{where}: 'values' must list {dim} entries to match 'dims'"
                )
            cells = [
                _parse_cell(spec, f"{where}, value {j}") for j, spec in enumerate(values)
            ]
            dist: Distribution = ProductOf1D(cells)
        else:
            mvn = obj["mvn"]
            if not isinstance(mvn, dict) or "mean" not in mvn or "cov" not in mvn:
                raise DatasetFormatError(f"{where}: 'mvn' needs 'mean' and 'cov'")
            dist = Gaussian(mvn["mean"], mvn["cov"])
            if dist.dim != dim:
                raise DatasetFormatError(
                    f"{where}: mvn dimension {dist.dim} does not match 'dims' length {dim}"
                )
    except DatasetFormatError:
        raise
    except ValueError as exc:
        raise DatasetFormatError(f"{where}: {exc}") from exc
    return dist, float(weight), label


def load_dataset(path) -> UncertainDataset:
    """Read a JSON dataset file into an UncertainDataset."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DatasetFormatError(f"{path}: top level must be an object")
    dims = doc.get("dims")
    if not isinstance(dims, list) or not dims or not all(isinstance(d, str) for d in dims):
        raise DatasetFormatError(f"{path}: 'dims' must be a non-empty list of axis names")
    items_doc = doc.get("items")
    if not isinstance(items_doc, list):
        raise DatasetFormatError(f"{path}: 'items' must be a list")
    if not items_doc:
        raise DatasetFormatError(f"{path}: empty dataset")

    items: list[Distribution] = []
    weights: list[float] = []
    labels: list[str | None] = []
    for i, obj in enumerate(items_doc):
        try:
            dist, weight, label = _parse_item(obj, i, len(dims))
        except DatasetFormatError as exc:
            raise DatasetFormatError(f"{path}: {exc}") from exc
        items.append(dist)
        weights.append(weight)
        labels.append(label)

    use_labels = tuple(
        lab if lab is not None else f"item{i + 1}" for i, lab in enumerate(labels)
    ) if any(lab is not None for lab in labels) else None
    try:
        return UncertainDataset(
            tuple(items), weights=np.array(weights), dim_names=tuple(dims), labels=use_labels
        )
    except ValueError as exc:
        raise DatasetFormatError(f"{path}: {exc}") from exc


def _cell_to_json(cell):
    if isinstance(cell, Number):
        return {"number": cell.value}
    if isinstance(cell, Interval):
        return {"interval": [cell.lo, cell.hi]}
    if isinstance(cell, Trapezoid):
        return {"trapezoid": [cell.a, cell.b, cell.c, cell.d]}
    if isinstance(cell, Normal1D):
        return {"normal": {"mean": cell.loc, "sd": cell.sd}}
    raise ValueError(f"cannot serialize cell {cell!r}")


def dataset_to_json(ds: UncertainDataset) -> dict:
    """Serialize a dataset; cluster items come out as moment-equal Gaussians."""
    items = []
    for i, item in enumerate(ds.items):
        obj: dict = {}
        if ds.labels is not None:
            obj["label"] = ds.labels[i]
        obj["weight"] = float(ds.weights[i])
        if isinstance(item, ProductOf1D):
            obj["values"] = [_cell_to_json(c) for c in item.cells]
        elif isinstance(item, Point):
            obj["values"] = [{"number": float(v)} for v in item.mean()]
        else:
            obj["mvn"] = {
                "mean": item.mean().tolist(),
                "cov": item.cov().tolist(),
            }
        items.append(obj)
    return {"dims": list(ds.dim_names), "items": items}


def save_dataset(ds: UncertainDataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(dataset_to_json(ds), fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Points files.

LABEL_COLUMN = "label"


@dataclass(frozen=True)
class PointsData:
    """Rows of a points CSV: (n, D) values plus optional row labels."""

    points: np.ndarray
    dim_names: tuple[str, ...]
    labels: tuple[str, ...] | None = None


def load_points(path) -> PointsData:
    """Read a CSV of points: D numeric columns, optional trailing label."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row]
    if len(rows) < 2:
        raise DatasetFormatError(f"{path}: need a header row and at least one data row")
    header = [h.strip() for h in rows[0]]
    has_labels = bool(header) and header[-1] == LABEL_COLUMN
    dim = len(header) - 1 if has_labels else len(header)
    if dim < 1:
        raise DatasetFormatError(f"{path}: no numeric columns found")

    points = np.empty((len(rows) - 1, dim))
    labels: list[str] = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DatasetFormatError(
                f"{path}: row {r} has {len(row)} fields, expected {len(header)}"
            )
        for c in range(dim):
            try:
                value = float(row[c])
            except ValueError as exc:
                raise DatasetFormatError(
                    f"{path}: row {r}, column {header[c]!r}: "
                    f"could not parse {row[c]!r} as a number"
                ) from exc
            if not math.isfinite(value):
                raise DatasetFormatError(
                    f"{path}: row {r}, column {header[c]!r}: non-finite value"
                )
            points[r - 2, c] = value
        if has_labels:
            labels.append(row[-1].strip())
    return PointsData(
        points=_readonly(points),
        dim_names=tuple(header[:dim]),
        labels=tuple(labels) if has_labels else None,
    )


def points_dataset(pts: PointsData) -> UncertainDataset:
    """Each row as a point-mass item (ordinary PCA input)."""
    return UncertainDataset(
        tuple(Point(row) for row in pts.points),
        dim_names=pts.dim_names,
        labels=pts.labels,
    )


def aggregate_by_label(pts: PointsData, kind: str = "gaussian") -> UncertainDataset:
    """Fold labeled points into one distribution item per class.

    kind="gaussian" summarizes each class by its mean and population (1/n)
    covariance; kind="empirical" keeps the class points as a resampling
    cluster.  Item weights are the class counts, in order of first
    appearance.
    """
    if kind not in ("gaussian", "empirical"):
        raise ValueError(f"kind must be 'gaussian' or 'empirical', got {kind!r}")
    if pts.labels is None:
        raise DatasetFormatError("points file has no label column to aggregate by")
    order: list[str] = []
    groups: dict[str, list[int]] = {}
    for i, lab in enumerate(pts.labels):
        if lab not in groups:
            order.append(lab)
            groups[lab] = []
        groups[lab].append(i)

    items: list[Distribution] = []
    weights: list[float] = []
    for lab in order:
        rows = pts.points[groups[lab]]
        if kind == "gaussian":
            if rows.shape[0] < 2:
                raise DatasetFormatError(
                    f"class {lab!r} has fewer than 2 points; "
                    f"gaussian aggregation needs at least 2"
                )
            mean = rows.mean(axis=0)
            centered = rows - mean
            cov = centered.T @ centered / rows.shape[0]
            items.append(Gaussian(mean, (cov + cov.T) / 2.0))
        else:
            items.append(EmpiricalCluster(rows))
        weights.append(float(rows.shape[0]))
    return UncertainDataset(
        tuple(items),
        weights=np.array(weights),
        dim_names=pts.dim_names,
        labels=tuple(order),
    )


# ---------------------------------------------------------------------------
# Standardization.


def standardize_points(points: np.ndarray) -> np.ndarray:
    """Z-score columns with the population standard deviation."""
    p = np.asarray(points, dtype=float)
    mean = p.mean(axis=0)
    sigma = p.std(axis=0)
    bad = np.flatnonzero(sigma == 0.0)
    if bad.size:
        raise DatasetFormatError(
            f"column {int(bad[0])} has zero variance; cannot standardize"
        )
    return (p - mean) / sigma


def standardize_dataset(ds: UncertainDataset) -> UncertainDataset:
    """Z-score a dataset using its uncertainty-aware axis variances at s=1."""
    g = global_cov(ds, CovOptions(scale_s=1.0))
    var = np.diag(g.matrix).copy()
    bad = np.flatnonzero(var <= 0.0)
    if bad.size:
        raise DatasetFormatError(
            f"axis {ds.dim_names[int(bad[0])]!r} has zero variance; cannot standardize"
        )
    sigma = np.sqrt(var)
    return ds.rescale(1.0 / sigma, -g.mean / sigma)


# ---------------------------------------------------------------------------
# CSV output.  repr() keeps full float precision and round-trips exactly.


def _write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _num(x: float) -> str:
    # + 0.0 folds -0.0 into 0.0 without touching any other value.
    return repr(float(x) + 0.0)


def write_traces_csv(
    path, traces: list[FactorTrace], schedule: SweepSchedule, dim_names: tuple[str, ...]
) -> None:
    if traces and traces[0].points.shape[1] != 2:
        raise ValueError("trace CSV output is defined for q = 2")
    s_values = schedule.s_values()
    rows = []
    for trace in traces:
        name = dim_names[trace.axis_index]
        for k in range(trace.points.shape[0]):
            for orientation, sign in (("+", 1.0), ("-", -1.0)):
                x, y = sign * trace.points[k]
                rows.append(
                    [str(k), _num(s_values[k]), name, orientation, _num(x), _num(y)]
                )
    _write_csv(path, ["step", "s", "axis", "orientation", "x", "y"], rows)


def write_eigencurves_csv(path, curves: EigenCurves) -> None:
    rows = []
    for k in range(curves.values.shape[0]):
        for i in range(curves.values.shape[1]):
            rows.append(
                [str(k), _num(curves.s_values[k]), str(i), _num(curves.values[k, i])]
            )
    _write_csv(path, ["step", "s", "index", "lambda"], rows)


def write_projection_csv(path, labels: list[str], projected: list[Gaussian]) -> None:
    """One row per item: label, projected mean, projected covariance entries."""
    if not projected:
        raise ValueError("nothing to write")
    q = projected[0].dim
    header = (
        ["label"]
        + [f"mean_{i + 1}" for i in range(q)]
        + [f"cov_{i + 1}_{j + 1}" for i in range(q) for j in range(q)]
    )
    rows = []
    for label, g in zip(labels, projected):
        mean = g.mean()
        cov = g.cov()
        rows.append(
            [label]
            + [_num(v) for v in mean]
            + [_num(cov[i, j]) for i in range(q) for j in range(q)]
        )
    _write_csv(path, header, rows)


def write_experiment_csv(path, rows: list[ExperimentRow]) -> None:
    _write_csv(
        path,
        ["dim", "samples", "median_hellinger", "runs", "seed"],
        (
            [str(r.dim), str(r.samples), _num(r.median_hellinger), str(r.runs), str(r.seed)]
            for r in rows
        ),
    )
