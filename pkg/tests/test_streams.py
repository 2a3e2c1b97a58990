import numpy as np
import pytest

from pdakit.similarity import IofMeasure
from pdakit.streams import (
    gen_categorical_stream,
    gen_uniform_stream,
    read_stream_jsonl,
    write_stream_jsonl,
)


def _values(stream):
    return [s.value for s in stream.samples]


def test_uniform_deterministic():
    a = gen_uniform_stream(steps=300, seed=11)
    b = gen_uniform_stream(steps=300, seed=11)
    for sa, sb in zip(a.samples, b.samples):
        assert np.array_equal(sa.value, sb.value)
        assert sa.is_anomaly == sb.is_anomaly and sa.criterion == sb.criterion
    c = gen_uniform_stream(steps=300, seed=12)
    assert any(not np.array_equal(x.value, y.value)
               for x, y in zip(a.samples, c.samples))


def test_uniform_anomaly_count_binomial():
    stream = gen_uniform_stream(steps=15_000, seed=5)
    count = sum(s.is_anomaly for s in stream.samples)
    sigma = np.sqrt(15_000 * 0.05 * 0.95)
    assert abs(count - 750) <= 3 * sigma


def test_uniform_regions_and_labels():
    stream = gen_uniform_stream(steps=4_000, seed=3, change_step=2_000)
    for t, s in enumerate(stream.samples):
        scale = 1.0 if t < 2_000 else 2.0
        assert s.scale == scale
        x = s.value
        if s.is_anomaly:
            assert (x <= 1.1 * scale).all() and (x > scale).any()
            if s.criterion == "c1":
                assert x[0] > scale and x[1] <= scale
            elif s.criterion == "c2":
                assert x[1] > scale and x[0] <= scale
            else:
                assert s.criterion == "corner" and (x > scale).all()
        else:
            assert (x <= scale).all() and s.criterion is None


def test_uniform_anomalous_dyads_larger():
    # against deep-interior nominal neighbors, anomalous samples produce
    # dyads with larger coordinates than nominal samples do
    rng = np.random.default_rng(0)
    stream = gen_uniform_stream(steps=20_000, seed=2, change_step=20_000)
    interior = rng.random((500, 2)) * 0.5 + 0.25
    anom = np.array([s.value for s in stream.samples if s.is_anomaly])
    nominal = np.array([s.value for s in stream.samples if not s.is_anomaly])
    d_anom = np.abs(anom[:, None, :] - interior[None, :, :]).mean()
    d_nom = np.abs(nominal[:200, None, :] - interior[None, :, :]).mean()
    assert d_anom > d_nom


def test_uniform_measure_configuration():
    stream = gen_uniform_stream(steps=100, seed=1, change_step=50)
    measures = stream.make_measures()
    stream.configure_measures(measures, 10)
    assert measures[0].scale == pytest.approx(1.1)
    stream.configure_measures(measures, 99)
    assert measures[1].scale == pytest.approx(2.2)
    a, b = np.array([0.1, 0.2]), np.array([2.2, 0.2])
    assert measures[0].pairwise(a, [b])[0] <= 1.0


def test_categorical_shapes_and_determinism():
    a = gen_categorical_stream(steps=200, seed=9)
    b = gen_categorical_stream(steps=200, seed=9)
    sizes = np.asarray(a.params["alphabet_sizes"])
    assert sizes.shape == (2, 20)
    assert sizes.min() >= 6 and sizes.max() <= 10
    for sa, sb in zip(a.samples, b.samples):
        assert all(np.array_equal(x, y) for x, y in zip(sa.value, sb.value))
        assert sa.criterion == sb.criterion
    for s in a.samples:
        assert len(s.value) == 2
        for g, vec in enumerate(s.value):
            assert vec.shape == (20,)
            assert (vec >= 0).all() and (vec < sizes[g]).all()
        if s.is_anomaly:
            assert s.criterion in ("c1", "c2")


def test_categorical_value_one_modal():
    # nominal Dirichlet bias alpha_1 = 5 makes value index 0 the modal value
    stream = gen_categorical_stream(steps=10_000, seed=4, change_step=10_000,
                                    anomaly_prob=0.0)
    block = np.asarray([np.concatenate(s.value) for s in stream.samples])
    freq = np.bincount(block.ravel(), minlength=10)
    assert freq[0] > freq[1:].max()


def test_iof_measure_properties():
    stream = gen_categorical_stream(steps=60, seed=7, anomaly_prob=0.0)
    window = _values(stream)[:40]
    m = IofMeasure(0)
    probe = window[5]
    d = m.pairwise(probe, window)
    assert d[5] == 0.0  # identical samples
    assert (d >= 0.0).all() and (d <= 1.0).all()
    # symmetry on a sampling of pairs
    for other in window[:6]:
        ab = m.pairwise(probe, [other])[0]
        ba = m.pairwise(other, [probe])[0]
        assert ab == pytest.approx(ba)


def test_iof_rarity_weighting():
    # a mismatch between two window-frequent values weighs less than a
    # mismatch involving values unseen in the window
    common = np.zeros(20, dtype=np.int64)
    ones = np.ones(20, dtype=np.int64)
    rare = np.full(20, 5, dtype=np.int64)
    window = [(common, common)] * 30 + [(ones, common)] * 30
    m = IofMeasure(0)
    d_common = m.pairwise((ones, common), window)[0]  # vs a zeros member
    d_rare = m.pairwise((rare, common), window)[0]
    assert d_rare > d_common
    assert d_rare == pytest.approx(1.0)  # unseen vs frequent: maximal weight


def test_jsonl_roundtrip(tmp_path):
    for kind, gen in (("uniform", gen_uniform_stream),
                      ("categorical", gen_categorical_stream)):
        stream = gen(steps=50, seed=13)
        p = tmp_path / f"{kind}.jsonl"
        write_stream_jsonl(p, stream)
        back = read_stream_jsonl(p, kind=kind)
        assert len(back) == 50
        for sa, sb in zip(stream.samples, back.samples):
            assert sa.is_anomaly == sb.is_anomaly
            assert sa.criterion == sb.criterion
            assert sa.scale == sb.scale
            if kind == "uniform":
                assert np.array_equal(sa.value, sb.value)
            else:
                assert all(np.array_equal(x, y)
                           for x, y in zip(sa.value, sb.value))
