"""Similarity measures between stream samples.

A measure maps a pair of samples to a dissimilarity score in [0, 1] (lower
means more similar) and must be symmetric. Measures are registered by id so
stream configs can name them; custom measures only need an ``ident`` and a
vectorized ``pairwise``.
"""

from __future__ import annotations

import numpy as np

REGISTRY: dict[str, type] = {}


def register(cls):
    REGISTRY[cls.ident] = cls
    return cls


class SimilarityMeasure:
    """Base contract: scores in [0,1], symmetric, vectorized over a window."""

    ident = "base"

    def __call__(self, a, b) -> float:
        return float(self.pairwise(a, [b])[0])

    def pairwise(self, sample, window: list) -> np.ndarray:
        raise NotImplementedError


@register
class AbsDiffMeasure(SimilarityMeasure):
    """|a[coord] - b[coord]| / scale, clipped into [0, 1].

    ``scale`` is the largest coordinate difference the stream can produce;
    it may be reassigned between steps when the nominal range drifts.
    """

    ident = "absdiff"

    def __init__(self, coord: int, scale: float = 1.0):
        self.coord = coord
        self.scale = float(scale)

    def pairwise(self, sample, window: list) -> np.ndarray:
        col = np.asarray([s[self.coord] for s in window], dtype=np.float64)
        return np.clip(np.abs(col - float(sample[self.coord])) / self.scale, 0.0, 1.0)


@register
class IofMeasure(SimilarityMeasure):
    """Inverse Occurrence Frequency dissimilarity for one categorical group.

    Samples are tuples of per-group integer attribute vectors. Matching
    attributes contribute 0; a mismatch on attribute j contributes
    1 / (1 + ln f(a_j) ln f(b_j)), where f counts the value's occurrences in
    the current window (values unseen in the window count as 1, giving the
    maximal mismatch weight). The sum is divided by the attribute count, so
    scores live in [0, 1] with 0 for identical group vectors.
    """

    ident = "iof"

    def __init__(self, group: int, n_values: int = 16):
        self.group = group
        self.n_values = n_values

    def pairwise(self, sample, window: list) -> np.ndarray:
        block = np.asarray([s[self.group] for s in window], dtype=np.int64)
        target = np.asarray(sample[self.group], dtype=np.int64)
        n_win, n_attr = block.shape
        counts = np.zeros((n_attr, self.n_values), dtype=np.int64)
        np.add.at(counts, (np.arange(n_attr)[None, :], block), 1)
        logf = np.log(np.maximum(counts, 1))
        lt = logf[np.arange(n_attr), target]
        lw = logf[np.arange(n_attr)[None, :], block]
        weight = 1.0 / (1.0 + lt[None, :] * lw)
        mismatch = block != target[None, :]
        return (weight * mismatch).sum(axis=1) / n_attr


def make_measure(ident: str, **kwargs) -> SimilarityMeasure:
    try:
        cls = REGISTRY[ident]
    except KeyError:
        raise KeyError(f"unknown similarity measure {ident!r}; "
                       f"registered: {sorted(REGISTRY)}") from None
    return cls(**kwargs)
