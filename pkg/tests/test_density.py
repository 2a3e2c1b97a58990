import numpy as np
import pytest

from pdakit.density import StreamingDensity, bin_indices


def test_point_mass():
    dyads = np.tile([[0.321, 0.77]], (50, 1))
    d = StreamingDensity.build(dyads, 10)
    dens = d.density()
    ix, iy = bin_indices(dyads[:1], 10)
    assert dens[ix[0], iy[0]] == pytest.approx(100.0)  # 1 / h^2
    assert dens.sum() == pytest.approx(100.0)
    assert d.counts.sum() == d.total == 50


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        StreamingDensity.build(np.zeros((0, 2)), 10)


def test_upper_edge_binning():
    # value exactly on a bin's upper edge belongs to the higher bin;
    # coordinate 1.0 stays in the last bin
    ix, iy = bin_indices(np.array([[0.2, 1.0], [0.0, 0.999]]), 5)
    assert ix.tolist() == [1, 0]
    assert iy.tolist() == [4, 4]


def test_out_of_box_clamped():
    d = StreamingDensity.build(np.array([[1.4, -0.3]]), 4)
    assert d.counts[3, 0] == 1
    assert d.total == 1


def test_uniform_lln(rng):
    # binomial std of the density estimate is 1/sqrt(n h^2) ~ 0.032 here,
    # so 0.2 is a > 6 sigma envelope for every bin
    n, K = 100_000, 10
    d = StreamingDensity.build(rng.random((n, 2)), K)
    assert np.abs(d.density() - 1.0).max() < 0.2


def test_slide_equals_rebuild_randomized(rng):
    T, K = 60, 20
    window = [rng.random(2) for _ in range(T)]

    def all_dyads(win):
        out = []
        for i in range(len(win)):
            for j in range(i + 1, len(win)):
                out.append(np.abs(win[i] - win[j]))
        return np.asarray(out)

    dens = StreamingDensity.build(all_dyads(window), K, window_T=T)
    for step in range(80):
        new = rng.random(2)
        old = window.pop(0)
        outgoing = np.asarray([np.abs(old - s) for s in window])
        incoming = np.asarray([np.abs(new - s) for s in window])
        window.append(new)
        dens = dens.slide(incoming, outgoing)
        rebuilt = StreamingDensity.build(all_dyads(window), K, window_T=T)
        assert np.array_equal(dens.counts, rebuilt.counts)
        assert dens.total == rebuilt.total == T * (T - 1) // 2


def test_slide_noop_and_negative_guard(rng):
    dyads = rng.random((200, 2))
    d = StreamingDensity.build(dyads, 15)
    same = rng.random((5, 2))
    d2 = d.slide(same, same)
    assert np.array_equal(d.counts, d2.counts)
    with pytest.raises(ValueError):
        d.slide(np.zeros((0, 2)), np.tile([[0.01, 0.01]], (10_000, 1)))


def test_preconditioned_values(rng):
    K = 8
    h2 = (1 / K) ** 2
    # one occupied bin: all other nodes fall back to the h^2 floor
    d = StreamingDensity.build(np.array([[0.99, 0.99]]), K)
    f = d.preconditioned()
    assert f.values[1, 1] == pytest.approx(h2)
    assert f.values.min() == pytest.approx(h2)
    assert f.values[K, K] == pytest.approx(1 / h2 + h2)
    # uniform counts: density 1 + h^2 everywhere
    pts = (np.indices((K, K)).reshape(2, -1).T + 0.5) / K
    u = StreamingDensity.build(pts, K)
    assert np.allclose(u.preconditioned().values, 1.0 + h2)
    # integral over bins after preconditioning is 1 + h^2 (not renormalized)
    integral = (u.density() + h2).sum() * h2
    assert integral == pytest.approx(1.0 + h2)


def test_preconditioned_edge_nodes_copy_adjacent_bin(rng):
    d = StreamingDensity.build(rng.random((500, 2)), 6)
    f = d.preconditioned()
    assert np.array_equal(f.values[0, :], f.values[1, :])
    assert np.array_equal(f.values[:, 0], f.values[:, 1])


def test_save_load_roundtrip(tmp_path, rng):
    d = StreamingDensity.build(rng.random((777, 2)), 12, window_T=40)
    for name in ("d.bin", "d.csv"):
        p = tmp_path / name
        d.save(p)
        back = StreamingDensity.load(p)
        assert np.array_equal(back.counts, d.counts)
        assert back.total == d.total
        assert back.window_T == d.window_T


def test_slide_cost_linear_in_T(rng):
    # per-step slide touches only ~2T bins; doubling T must stay ~linear
    import time

    def run(T, reps=300):
        window = rng.random((T, 2))
        dens = StreamingDensity.build(
            np.abs(window[:, None, :] - window[None, :, :])[
                np.triu_indices(T, 1)
            ],
            25,
            window_T=T,
        )
        incoming = rng.random((T - 1, 2))
        t0 = time.perf_counter()
        for _ in range(reps):
            dens.slide(incoming, incoming)
        return (time.perf_counter() - t0) / reps

    run(100, reps=20)  # warm caches
    t100 = run(100)
    t200 = run(200)
    assert t200 <= 2.5 * t100
