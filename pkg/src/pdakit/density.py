"""Histogram density over the dyad square [0,1]^2 with O(T) sliding updates.

Bins are half-open, B_ij = [(i-1)h, ih) x [(j-1)h, jh) for 1 <= i,j <= K
(coordinate 1.0 falls in the last bin). The streaming update never rebins
the whole window: a slide decrements the evicted sample's dyads and
increments the new sample's dyads, and is exactly equal, count for count,
to rebuilding from scratch.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .grid import GridField


def bin_indices(dyads: np.ndarray, K: int) -> tuple[np.ndarray, np.ndarray]:
    """Half-open bin index per dyad; out-of-box dyads clamp into [0,1]^2."""
    d = np.clip(np.asarray(dyads, dtype=np.float64), 0.0, 1.0)
    ix = np.minimum((d[:, 0] * K).astype(np.int64), K - 1)
    iy = np.minimum((d[:, 1] * K).astype(np.int64), K - 1)
    return ix, iy


@dataclass(frozen=True)
class StreamingDensity:
    counts: np.ndarray
    total: int
    window_T: int

    @property
    def resolution(self) -> int:
        return self.counts.shape[0]

    @property
    def h(self) -> float:
        return 1.0 / self.resolution

    @classmethod
    def build(cls, dyads, K: int, window_T: int = 0) -> "StreamingDensity":
        dyads = np.atleast_2d(np.asarray(dyads, dtype=np.float64))
        if dyads.size == 0:
            raise ValueError("cannot build a density from zero dyads")
        if dyads.shape[1] != 2:
            raise ValueError(f"dyads must be 2-vectors, got shape {dyads.shape}")
        ix, iy = bin_indices(dyads, K)
        counts = np.bincount(ix * K + iy, minlength=K * K).reshape(K, K)
        return cls(counts=counts.astype(np.int64), total=int(dyads.shape[0]),
                   window_T=window_T)

    def slide(self, incoming, outgoing) -> "StreamingDensity":
        """Apply one window move; bit-identical to rebuilding on the new window."""
        K = self.resolution
        counts = self.counts.copy()
        outgoing = np.atleast_2d(np.asarray(outgoing, dtype=np.float64))
        incoming = np.atleast_2d(np.asarray(incoming, dtype=np.float64))
        if incoming.size:
            ix, iy = bin_indices(incoming, K)
            np.add.at(counts, (ix, iy), 1)
        if outgoing.size:
            ix, iy = bin_indices(outgoing, K)
            np.subtract.at(counts, (ix, iy), 1)
        if counts.min() < 0:
            raise ValueError("density slide drove a bin count below zero; "
                             "outgoing dyads do not match the window bookkeeping")
        total = self.total - (outgoing.shape[0] if outgoing.size else 0) \
            + (incoming.shape[0] if incoming.size else 0)
        return StreamingDensity(counts=counts, total=total, window_T=self.window_T)

    def density(self) -> np.ndarray:
        """Per-bin density values counts / (total * h^2); integrates to 1."""
        h = self.h
        return self.counts / (self.total * h * h)

    def preconditioned(self) -> GridField:
        """Node-sampled density plus an h^2 floor, strictly positive.

        Node x_ij takes the value of the bin whose upper-right corner it is;
        nodes on the i=0 / j=0 edges copy the adjacent bin. Not renormalized.
        """
        K = self.resolution
        dens = self.density()
        bi = np.maximum(np.arange(K + 1), 1) - 1
        vals = dens[np.ix_(bi, bi)] + self.h * self.h
        return GridField(vals)

    # -- dump/restore: counts matrix in the GridField container formats plus
    #    a JSON sidecar carrying (T, total, K) --

    def save(self, path, sidecar_path=None) -> None:
        GridField(_pad_counts(self.counts)).save(path)
        sidecar = sidecar_path or (str(path) + ".json")
        with open(sidecar, "w", encoding="utf-8") as fh:
            json.dump({"T": self.window_T, "total": self.total,
                       "K": self.resolution}, fh)

    @classmethod
    def load(cls, path, sidecar_path=None) -> "StreamingDensity":
        sidecar = sidecar_path or (str(path) + ".json")
        with open(sidecar, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
        field = GridField.load(path)
        K = meta["K"]
        counts = np.rint(field.values[:K, :K]).astype(np.int64)
        return cls(counts=counts, total=int(meta["total"]), window_T=int(meta["T"]))


def _pad_counts(counts: np.ndarray) -> np.ndarray:
    """Counts are K x K; the field containers want (K+1) x (K+1)."""
    K = counts.shape[0]
    out = np.zeros((K + 1, K + 1))
    out[:K, :K] = counts
    return out
