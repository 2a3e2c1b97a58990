"""Exact nondominated sorting and within-front ordering.

Points are ranked into Pareto fronts by repeatedly peeling off the
coordinatewise minimal layer; a point's layer number is its depth. In two
dimensions the same depths come out of an O(n log n) staircase sweep, which
is the production path; the peeling oracle stays available in any dimension.

Within-front machinery (2-D only): points on one front are ranked by
ascending x1 (front_index, 1-based) and that rank normalized by the front
size (normalized_index, in (0, 1]).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels


@dataclass(frozen=True)
class PointSet:
    """n points in R^d, d >= 2, all coordinates finite."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError(f"points must be 2-dimensional (n, d), got shape {pts.shape}")
        if pts.shape[1] < 2:
            raise ValueError(f"dim must be >= 2, got {pts.shape[1]}")
        if pts.size and not np.isfinite(pts).all():
            raise ValueError("all coordinates must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass
class SortResult:
    """Per-point depth plus (2-D only) within-front indices.

    depth[i] = k iff point i lies on front k (1-based). front_sizes[k-1] is
    the cardinality of front k. front_index / normalized_index are filled by
    `within_front_indices` and are None until then.
    """

    depth: np.ndarray
    front_sizes: np.ndarray
    front_index: np.ndarray | None = None
    normalized_index: np.ndarray | None = None
    _front_order: np.ndarray = field(default=None, repr=False)
    _front_starts: np.ndarray = field(default=None, repr=False)

    @property
    def n_fronts(self) -> int:
        return len(self.front_sizes)


def _as_points(ps) -> np.ndarray:
    if isinstance(ps, PointSet):
        return ps.points
    return PointSet(np.asarray(ps)).points


def dominates(a, b) -> bool:
    """True iff a <= b coordinatewise and a != b (identical points do not dominate)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return bool((a <= b).all() and (a < b).any())


def _result_from_depth(depth: np.ndarray) -> SortResult:
    if depth.size:
        front_sizes = np.bincount(depth)[1:]
    else:
        front_sizes = np.zeros(0, dtype=np.int64)
    return SortResult(depth=depth, front_sizes=front_sizes.astype(np.int64))


def sort_bruteforce(ps) -> SortResult:
    """Reference oracle: peel minimal layers, O(d n^2)."""
    pts = _as_points(ps)
    if pts.shape[0] == 0:
        return _result_from_depth(np.zeros(0, dtype=np.int64))
    return _result_from_depth(_kernels.peel_depths(pts))


def sort_fast2d(ps) -> SortResult:
    """O(n log n) exact 2-D sorting; depths identical to sort_bruteforce."""
    pts = _as_points(ps)
    if pts.shape[1] != 2:
        raise ValueError(f"sort_fast2d requires dim == 2, got {pts.shape[1]}")
    n = pts.shape[0]
    if n == 0:
        return _result_from_depth(np.zeros(0, dtype=np.int64))
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    ds = _kernels.staircase_depths(pts[order, 0], pts[order, 1])
    depth = np.empty(n, dtype=np.int64)
    depth[order] = ds
    return _result_from_depth(depth)


def within_front_indices(ps, result: SortResult) -> SortResult:
    """Fill front_index (rank by ascending x1 within each front) and
    normalized_index = front_index / front size.

    Ties in x1 within a front are broken by ascending x2, then input index
    (only identical duplicate points can actually tie).
    """
    pts = _as_points(ps)
    if pts.shape[1] != 2:
        raise ValueError("within-front indices are defined for dim == 2 only")
    depth = result.depth
    n = pts.shape[0]
    order = np.lexsort((np.arange(n), pts[:, 1], pts[:, 0], depth))
    d_sorted = depth[order]
    starts = np.flatnonzero(np.r_[True, d_sorted[1:] != d_sorted[:-1]])
    run_id = np.cumsum(np.r_[False, d_sorted[1:] != d_sorted[:-1]])
    v_sorted = np.arange(n) - starts[run_id] + 1
    front_index = np.empty(n, dtype=np.int64)
    front_index[order] = v_sorted
    result.front_index = front_index
    result.normalized_index = front_index / result.front_sizes[depth - 1]
    result._front_order = order
    result._front_starts = starts
    return result


# ---------------------------------------------------------------------------
# file formats: points as CSV (one row per point) or JSON array-of-arrays;
# sort results as CSV aligned to input row order
# ---------------------------------------------------------------------------


def read_points_csv(path) -> PointSet:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            cells = line.split(",")
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                if rows:
                    raise
                continue  # header line
    return PointSet(np.asarray(rows, dtype=np.float64))


def write_points_csv(path, ps) -> None:
    pts = _as_points(ps)
    with open(path, "w", encoding="utf-8") as fh:
        for row in pts:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def read_points_json(path) -> PointSet:
    with open(path, "r", encoding="utf-8") as fh:
        return PointSet(np.asarray(json.load(fh), dtype=np.float64))


def write_points_json(path, ps) -> None:
    pts = _as_points(ps)
    Path(path).write_text(json.dumps(pts.tolist()), encoding="utf-8")


def write_sort_csv(path, result: SortResult) -> None:
    has_front = result.front_index is not None
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("depth,front_index,normalized_index\n")
        for i in range(len(result.depth)):
            if has_front:
                fh.write(
                    f"{result.depth[i]},{result.front_index[i]},"
                    f"{repr(float(result.normalized_index[i]))}\n"
                )
            else:
                fh.write(f"{result.depth[i]},,\n")
