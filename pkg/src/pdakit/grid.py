"""Uniform node-centered scalar fields on [0,1]^2.

A field of resolution K stores values on the (K+1)x(K+1) nodes
x_ij = (i*h, j*h) with h = 1/K; values[i, j] indexes x1 by row. This is the
shared substrate for the PDE solvers and for score lookups, so it carries
one-sided differences, bilinear interpolation with out-of-box clamping, and
bit-exact CSV/binary round-trips.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridField:
    values: np.ndarray

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise ValueError(f"values must be square (K+1, K+1), got {vals.shape}")
        if vals.shape[0] < 3:
            raise ValueError("resolution K must be >= 2")
        if not np.isfinite(vals).all():
            raise ValueError("all node values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def resolution(self) -> int:
        return self.values.shape[0] - 1

    @property
    def h(self) -> float:
        return 1.0 / self.resolution

    @classmethod
    def constant(cls, value: float, resolution: int) -> "GridField":
        return cls(np.full((resolution + 1, resolution + 1), float(value)))

    @classmethod
    def from_function(cls, fn, resolution: int) -> "GridField":
        """Sample fn(x1, x2) at the nodes; fn must broadcast over arrays."""
        ax = np.linspace(0.0, 1.0, resolution + 1)
        x1, x2 = np.meshgrid(ax, ax, indexing="ij")
        return cls(np.asarray(fn(x1, x2), dtype=np.float64))

    def node_coords(self, i: int, j: int) -> tuple[float, float]:
        return (i * self.h, j * self.h)

    def _check_node(self, i: int, j: int) -> None:
        K = self.resolution
        if not (0 <= i <= K and 0 <= j <= K):
            raise IndexError(f"node ({i},{j}) outside grid of resolution {K}")

    def backward_diff(self, node: tuple[int, int], axis: int) -> float:
        """D^-_axis at node; axis=1 differentiates along x1, axis=2 along x2."""
        i, j = node
        self._check_node(i, j)
        if axis == 1:
            if i == 0:
                raise IndexError(f"node ({i},{j}) has no backward neighbor along x1")
            return (self.values[i, j] - self.values[i - 1, j]) / self.h
        if axis == 2:
            if j == 0:
                raise IndexError(f"node ({i},{j}) has no backward neighbor along x2")
            return (self.values[i, j] - self.values[i, j - 1]) / self.h
        raise ValueError(f"axis must be 1 or 2, got {axis}")

    def forward_diff(self, node: tuple[int, int], axis: int) -> float:
        """D^+_axis at node; axis=1 differentiates along x1, axis=2 along x2."""
        i, j = node
        self._check_node(i, j)
        K = self.resolution
        if axis == 1:
            if i == K:
                raise IndexError(f"node ({i},{j}) has no forward neighbor along x1")
            return (self.values[i + 1, j] - self.values[i, j]) / self.h
        if axis == 2:
            if j == K:
                raise IndexError(f"node ({i},{j}) has no forward neighbor along x2")
            return (self.values[i, j + 1] - self.values[i, j]) / self.h
        raise ValueError(f"axis must be 1 or 2, got {axis}")

    def interpolate(self, x) -> float | np.ndarray:
        """Bilinear interpolation; points outside [0,1]^2 are clamped."""
        return self.interpolate_ex(x)[0]

    def interpolate_ex(self, x):
        """Like interpolate, also returns whether each point was clamped."""
        pts = np.asarray(x, dtype=np.float64)
        scalar = pts.ndim == 1
        pts = np.atleast_2d(pts)
        if pts.shape[1] != 2:
            raise ValueError(f"expected 2-vectors, got shape {pts.shape}")
        clamped = ((pts < 0.0) | (pts > 1.0)).any(axis=1)
        pts = np.clip(pts, 0.0, 1.0)
        K = self.resolution
        g = pts * K
        i0 = np.minimum(g[:, 0].astype(np.int64), K - 1)
        j0 = np.minimum(g[:, 1].astype(np.int64), K - 1)
        s = g[:, 0] - i0
        t = g[:, 1] - j0
        v = self.values
        out = (
            v[i0, j0] * (1 - s) * (1 - t)
            + v[i0 + 1, j0] * s * (1 - t)
            + v[i0, j0 + 1] * (1 - s) * t
            + v[i0 + 1, j0 + 1] * s * t
        )
        if scalar:
            return float(out[0]), bool(clamped[0])
        return out, clamped

    # -- serialization: CSV matrix (row i = x1 index) and binary (int64 K,
    #    then row-major float64 nodes); both round-trip bit-exactly --

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for row in self.values:
                fh.write(",".join(repr(float(x)) for x in row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "GridField":
        rows = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    rows.append([float(c) for c in line.split(",")])
        return cls(np.asarray(rows, dtype=np.float64))

    def to_binary(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(struct.pack("<q", self.resolution))
            fh.write(self.values.astype("<f8").tobytes(order="C"))

    @classmethod
    def from_binary(cls, path) -> "GridField":
        with open(path, "rb") as fh:
            (K,) = struct.unpack("<q", fh.read(8))
            vals = np.frombuffer(fh.read(), dtype="<f8").reshape(K + 1, K + 1)
        return cls(vals.copy())

    def save(self, path) -> None:
        """Dispatch on extension: .csv is text, anything else is binary."""
        if str(path).endswith(".csv"):
            self.to_csv(path)
        else:
            self.to_binary(path)

    @classmethod
    def load(cls, path) -> "GridField":
        if str(path).endswith(".csv"):
            return cls.from_csv(path)
        return cls.from_binary(path)
