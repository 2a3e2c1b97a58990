import numpy as np
import pytest

from pdakit.pareto import (
    PointSet,
    dominates,
    read_points_csv,
    read_points_json,
    sort_bruteforce,
    sort_fast2d,
    within_front_indices,
    write_points_csv,
    write_points_json,
    write_sort_csv,
)


def test_dominates_basic():
    assert dominates((0, 0), (1, 1))
    assert not dominates((0, 1), (1, 0))
    assert not dominates((0.5, 0.5), (0.5, 0.5))
    assert dominates((0, 1), (0, 2))  # equal in one coordinate still dominates


def test_dominates_dimension_mismatch():
    with pytest.raises(ValueError):
        dominates((0, 0), (1, 1, 1))


def test_pointset_validation():
    with pytest.raises(ValueError):
        PointSet(np.array([[0.0], [1.0]]))  # dim 1
    with pytest.raises(ValueError):
        PointSet(np.array([[0.0, np.nan]]))
    ps = PointSet(np.zeros((0, 2)))
    assert ps.n == 0 and ps.dim == 2


def test_bruteforce_hand_checked():
    pts = np.array([[0.1, 0.9], [0.2, 0.2], [0.9, 0.1], [0.5, 0.5]])
    res = sort_bruteforce(pts)
    # (0.5, 0.5) is dominated only by (0.2, 0.2); the rest form an antichain
    assert res.depth.tolist() == [1, 1, 1, 2]
    assert res.front_sizes.tolist() == [3, 1]


def test_bruteforce_chain_and_antichain():
    chain = np.arange(12, dtype=float).reshape(-1, 1) * np.ones((1, 2))
    assert sort_bruteforce(chain).depth.tolist() == list(range(1, 13))
    anti = np.column_stack([np.arange(9.0), -np.arange(9.0)])
    assert (sort_bruteforce(anti).depth == 1).all()


def test_bruteforce_three_dim(rng):
    pts = rng.random((80, 3))
    res = sort_bruteforce(pts)
    # every depth-k point (k > 1) must be dominated by some depth-(k-1) point
    for i in range(80):
        k = res.depth[i]
        if k == 1:
            continue
        doms = [j for j in range(80)
                if res.depth[j] == k - 1 and dominates(pts[j], pts[i])]
        assert doms


def test_fast2d_requires_2d(rng):
    with pytest.raises(ValueError):
        sort_fast2d(rng.random((10, 3)))


def test_fast2d_single_point_and_duplicates():
    assert sort_fast2d(np.array([[0.4, 0.7]])).depth.tolist() == [1]
    res = sort_fast2d(np.array([[0.3, 0.3], [0.3, 0.3]]))
    assert res.depth.tolist() == [1, 1]
    assert res.front_sizes.tolist() == [2]


def test_fast2d_equals_bruteforce_mixed(rng, backend):
    for trial in range(25):
        n = int(rng.integers(1, 500))
        pts = rng.random((n, 2))
        if trial % 3 == 1:
            pts = np.round(pts, 1)  # many ties in each coordinate
        elif trial % 3 == 2:
            pts = pts[rng.integers(0, n, n)]  # exact duplicates
        assert (sort_fast2d(pts).depth == sort_bruteforce(pts).depth).all()


def test_monotone_under_insertion(rng):
    for _ in range(20):
        pts = rng.random((int(rng.integers(2, 120)), 2))
        extra = rng.random((1, 2))
        before = sort_fast2d(pts).depth
        after = sort_fast2d(np.vstack([pts, extra])).depth[: len(pts)]
        assert (after >= before).all()


def test_scaling_invariance(rng):
    pts = rng.random((300, 2))
    res = within_front_indices(pts, sort_fast2d(pts))
    mapped = np.column_stack([pts[:, 0] ** 3, np.expm1(pts[:, 1])])
    res2 = within_front_indices(mapped, sort_fast2d(mapped))
    assert (res.depth == res2.depth).all()
    assert (res.front_index == res2.front_index).all()
    assert np.array_equal(res.normalized_index, res2.normalized_index)


def test_within_front_hand_checked():
    pts = np.array([[0.1, 0.9], [0.2, 0.2], [0.9, 0.1]])
    res = within_front_indices(pts, sort_fast2d(pts))
    assert res.front_index.tolist() == [1, 2, 3]
    assert np.allclose(res.normalized_index, [1 / 3, 2 / 3, 1.0])


def test_within_front_singleton():
    res = within_front_indices(np.array([[0.5, 0.5]]), sort_fast2d([[0.5, 0.5]]))
    assert res.front_index.tolist() == [1]
    assert res.normalized_index.tolist() == [1.0]


def test_within_front_structure(rng):
    pts = rng.random((400, 2))
    res = within_front_indices(pts, sort_fast2d(pts))
    assert res.normalized_index.min() > 0.0
    assert res.normalized_index.max() <= 1.0
    for k in range(1, res.n_fronts + 1):
        on_front = np.flatnonzero(res.depth == k)
        v = res.front_index[on_front]
        assert sorted(v.tolist()) == list(range(1, len(on_front) + 1))
        order = on_front[np.argsort(v)]
        x = pts[order]
        # fronts are antichains: ordered by ascending x1, x2 never increases
        assert (np.diff(x[:, 0]) >= 0).all()
        assert (np.diff(x[:, 1]) <= 0).all()
        # W strictly increasing in x1 when x1 values are distinct
        w = res.normalized_index[order]
        assert (np.diff(w) > 0).all()


def test_point_io_roundtrip(tmp_path, rng):
    pts = rng.random((40, 2))
    csv = tmp_path / "pts.csv"
    js = tmp_path / "pts.json"
    write_points_csv(csv, pts)
    write_points_json(js, pts)
    assert np.array_equal(read_points_csv(csv).points, pts)
    assert np.array_equal(read_points_json(js).points, pts)
    # header line tolerated
    with_header = tmp_path / "hdr.csv"
    with_header.write_text("x1,x2\n" + csv.read_text())
    assert np.array_equal(read_points_csv(with_header).points, pts)


def test_sort_csv_row_alignment(tmp_path, rng):
    pts = rng.random((25, 2))
    res = within_front_indices(pts, sort_fast2d(pts))
    out = tmp_path / "res.csv"
    write_sort_csv(out, res)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "depth,front_index,normalized_index"
    assert len(lines) == 26
    first = lines[1].split(",")
    assert int(first[0]) == res.depth[0]
    assert int(first[1]) == res.front_index[0]
    assert float(first[2]) == res.normalized_index[0]
