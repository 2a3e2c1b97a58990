"""Labeled synthetic streams for the experiment harness.

Two generators, each with a mid-stream trend change and a 0.05 anomaly
rate by default:

* uniform: nominal samples uniform on [0, s]^2 with s = 1 before the change
  and s = 2 after; anomalies uniform on the shell [0, 1.1 s]^2 \\ [0, s]^2.
  Criteria are the per-coordinate differences |dx_i| divided by 1.1 s (the
  largest difference the current epoch can produce, so dyads stay in
  [0,1]^2); the divisor follows the epoch of each step. A shell sample
  escaping in x1 only is a c1 ground-truth anomaly, in x2 only a c2; the
  corner (both) is labeled but excluded from classification scoring.

* categorical: two groups of 20 categorical attributes with alphabet sizes
  drawn uniformly from {6..10}. Each nominal attribute keeps a categorical
  law drawn once per epoch from Dirichlet(alpha) with alpha_1 = 5 (alpha_2
  = 5 after the change) and 1 elsewhere; the anomalous law is drawn once
  from the flat Dirichlet. An anomaly redraws one group (picked with
  probability 1/2) from the anomalous law. Criteria are per-group IOF
  dissimilarities.

Streams are deterministic given the seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .similarity import AbsDiffMeasure, IofMeasure

SHELL = 0.1  # anomalous shell width as a fraction of the nominal scale


@dataclass
class StreamSample:
    value: object
    is_anomaly: bool
    criterion: str | None  # "c1" | "c2" | "corner" | None
    scale: float = 1.0


@dataclass
class LabeledStream:
    kind: str
    samples: list[StreamSample]
    params: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.samples)

    def make_measures(self) -> list:
        if self.kind == "uniform":
            return [AbsDiffMeasure(0), AbsDiffMeasure(1)]
        if self.kind == "categorical":
            return [IofMeasure(0), IofMeasure(1)]
        raise ValueError(f"unknown stream kind {self.kind!r}")

    def configure_measures(self, measures, t: int) -> None:
        """Point the measures at step t's context (the uniform divisor)."""
        if self.kind == "uniform":
            scale = (1.0 + SHELL) * self.samples[t].scale
            for m in measures:
                m.scale = scale


def gen_uniform_stream(
    steps: int = 1500,
    anomaly_prob: float = 0.05,
    change_step: int | None = None,
    seed: int = 0,
    base_scale: float = 1.0,
    post_scale: float = 2.0,
) -> LabeledStream:
    rng = np.random.default_rng(seed)
    change = steps // 2 if change_step is None else change_step
    p_right = (1.0 + SHELL) / (2.0 + SHELL)  # right strip's share of the shell
    samples = []
    for t in range(steps):
        s = base_scale if t < change else post_scale
        if rng.random() < anomaly_prob:
            if rng.random() < p_right:
                x1 = s * (1.0 + SHELL * rng.random())
                x2 = s * (1.0 + SHELL) * rng.random()
            else:
                x1 = s * rng.random()
                x2 = s * (1.0 + SHELL * rng.random())
            if x1 > s and x2 > s:
                crit = "corner"
            elif x1 > s:
                crit = "c1"
            else:
                crit = "c2"
            samples.append(StreamSample(np.array([x1, x2]), True, crit, s))
        else:
            samples.append(StreamSample(rng.random(2) * s, False, None, s))
    params = {
        "steps": steps,
        "anomaly_prob": anomaly_prob,
        "change_step": change,
        "seed": seed,
        "base_scale": base_scale,
        "post_scale": post_scale,
        "similarity": "per-coordinate |dx_i| divided by 1.1 * nominal scale "
                      "of the step's epoch",
    }
    return LabeledStream(kind="uniform", samples=samples, params=params)


def _dirichlet_params(rng, sizes, biased_value):
    """One categorical law per attribute; alpha = 1 + 4 at biased_value."""
    laws = []
    for g in range(sizes.shape[0]):
        group = []
        for j in range(sizes.shape[1]):
            alpha = np.ones(sizes[g, j])
            if biased_value is not None:
                alpha[biased_value] = 5.0
            group.append(rng.dirichlet(alpha))
        laws.append(group)
    return laws


def _draw(rng, laws, g, j) -> int:
    p = laws[g][j]
    return int(np.searchsorted(np.cumsum(p), rng.random(), side="right"))


def gen_categorical_stream(
    steps: int = 1500,
    anomaly_prob: float = 0.05,
    change_step: int | None = None,
    seed: int = 0,
    n_groups: int = 2,
    n_attrs: int = 20,
) -> LabeledStream:
    rng = np.random.default_rng(seed)
    change = steps // 2 if change_step is None else change_step
    sizes = rng.integers(6, 11, size=(n_groups, n_attrs))
    nominal_pre = _dirichlet_params(rng, sizes, 0)   # bias toward value one
    nominal_post = _dirichlet_params(rng, sizes, 1)  # bias toward value two
    anomalous = _dirichlet_params(rng, sizes, None)  # flat, drawn once

    def draw_group(laws, g):
        return np.array([_draw(rng, laws, g, j) for j in range(n_attrs)],
                        dtype=np.int64)

    samples = []
    for t in range(steps):
        nominal = nominal_pre if t < change else nominal_post
        if rng.random() < anomaly_prob:
            bad = int(rng.integers(0, n_groups))
            value = tuple(
                draw_group(anomalous if g == bad else nominal, g)
                for g in range(n_groups)
            )
            samples.append(StreamSample(value, True, f"c{bad + 1}", 1.0))
        else:
            value = tuple(draw_group(nominal, g) for g in range(n_groups))
            samples.append(StreamSample(value, False, None, 1.0))
    params = {
        "steps": steps,
        "anomaly_prob": anomaly_prob,
        "change_step": change,
        "seed": seed,
        "alphabet_sizes": sizes.tolist(),
        "similarity": "per-group IOF mismatch weights averaged over attributes, "
                      "window frequencies, unseen values count as 1",
    }
    return LabeledStream(kind="categorical", samples=samples, params=params)


GENERATORS = {
    "uniform": gen_uniform_stream,
    "categorical": gen_categorical_stream,
}


# -- JSON-lines stream files: one sample per line --


def write_stream_jsonl(path, stream: LabeledStream) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t, s in enumerate(stream.samples):
            if isinstance(s.value, tuple):
                value = [g.tolist() for g in s.value]
            else:
                value = np.asarray(s.value).tolist()
            fh.write(json.dumps({
                "t": t,
                "value": value,
                "is_anomaly": int(s.is_anomaly),
                "criterion": s.criterion,
                "scale": s.scale,
            }) + "\n")


def read_stream_jsonl(path, kind: str = "uniform") -> LabeledStream:
    samples = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            raw = rec["value"]
            if raw and isinstance(raw[0], list):
                value = tuple(np.asarray(g, dtype=np.int64) for g in raw)
            else:
                value = np.asarray(raw, dtype=np.float64)
            samples.append(StreamSample(
                value=value,
                is_anomaly=bool(rec.get("is_anomaly", 0)),
                criterion=rec.get("criterion"),
                scale=float(rec.get("scale", 1.0)),
            ))
    return LabeledStream(kind=kind, samples=samples, params={"source": str(path)})
