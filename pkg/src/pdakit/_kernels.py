"""Hot numeric kernels, each with a numba loop and a pure-numpy path.

The numba variants are plain nested loops compiled with ``@njit``; the
numpy variants vectorize the same recurrences (anti-diagonal wavefronts for
the grid sweeps, masked reductions for the dominance queries). Both paths
compute identical results; ``pdakit.bench`` times them against each other.
"""

from __future__ import annotations

import bisect

import numpy as np

from . import _accel

_compiled: dict[str, object] = {}


def _nb(name: str, pyfunc):
    fn = _compiled.get(name)
    if fn is None:
        fn = _accel.jit(pyfunc)
        _compiled[name] = fn
    return fn


# ---------------------------------------------------------------------------
# Hamilton-Jacobi sweep: backward-difference product D1u*D2u = f, solved at
# each node as the larger root of (u-a)(u-b) = h^2 f with a = west, b = south.
# One lexicographic sweep suffices: dependencies point strictly south/west.
# ---------------------------------------------------------------------------


def _hje_sweep_loop(f, h, u):
    n = f.shape[0]
    h2 = h * h
    for i in range(1, n):
        for j in range(1, n):
            a = u[i - 1, j]
            b = u[i, j - 1]
            d = 0.5 * (a - b)
            u[i, j] = 0.5 * (a + b) + np.sqrt(d * d + h2 * f[i, j])


def _hje_sweep_numpy(f, h):
    n = f.shape[0]
    K = n - 1
    u = np.zeros_like(f)
    h2 = h * h
    for s in range(2, 2 * K + 1):
        i = np.arange(max(1, s - K), min(K, s - 1) + 1)
        j = s - i
        a = u[i - 1, j]
        b = u[i, j - 1]
        d = 0.5 * (a - b)
        u[i, j] = 0.5 * (a + b) + np.sqrt(d * d + h2 * f[i, j])
    return u


def hje_sweep(f: np.ndarray, h: float) -> np.ndarray:
    """Solve the discrete HJE on (K+1)x(K+1) nodes; rows i=0, j=0 pinned to 0."""
    f = np.ascontiguousarray(f, dtype=np.float64)
    if _accel.get_backend() == "numba":
        u = np.zeros_like(f)
        _nb("hje", _hje_sweep_loop)(f, h, u)
        return u
    return _hje_sweep_numpy(f, h)


# ---------------------------------------------------------------------------
# Transport sweeps. Velocity components are backward differences of u
# (forward at the grid edge lacking a backward neighbor), clamped at 0.
# v: boundary v=0 on {x1=0} and {x2=1}, sweep direction (+1,-1).
# w: boundary w=1 on {x1=1} and {x2=0}, sweep direction (-1,+1).
# ---------------------------------------------------------------------------


def _v_sweep_loop(u, f, h, v):
    n = u.shape[0]
    K = n - 1
    for i in range(1, n):
        for j in range(K - 1, -1, -1):
            ux1 = (u[i, j] - u[i - 1, j]) / h
            if ux1 < 0.0:
                ux1 = 0.0
            if j >= 1:
                ux2 = (u[i, j] - u[i, j - 1]) / h
            else:
                ux2 = (u[i, j + 1] - u[i, j]) / h
            if ux2 < 0.0:
                ux2 = 0.0
            v[i, j] = (ux2 * v[i - 1, j] + ux1 * v[i, j + 1] + h * f[i, j]) / (
                ux1 + ux2
            )


def _v_sweep_numpy(u, f, h):
    n = u.shape[0]
    K = n - 1
    v = np.zeros_like(u)
    for s in range(2, 2 * K + 1):
        i = np.arange(max(1, s - K), min(K, s - 1) + 1)
        j = K - (s - i)
        ux1 = np.maximum((u[i, j] - u[i - 1, j]) / h, 0.0)
        jb = np.maximum(j, 1)
        ux2 = (u[i, jb] - u[i, jb - 1]) / h
        edge = j == 0
        if edge.any():
            ie = i[edge]
            ux2[edge] = (u[ie, 1] - u[ie, 0]) / h
        ux2 = np.maximum(ux2, 0.0)
        v[i, j] = (ux2 * v[i - 1, j] + ux1 * v[i, j + 1] + h * f[i, j]) / (ux1 + ux2)
    return v


def v_sweep(u: np.ndarray, f: np.ndarray, h: float) -> np.ndarray:
    u = np.ascontiguousarray(u, dtype=np.float64)
    f = np.ascontiguousarray(f, dtype=np.float64)
    if _accel.get_backend() == "numba":
        v = np.zeros_like(u)
        _nb("v", _v_sweep_loop)(u, f, h, v)
        return v
    return _v_sweep_numpy(u, f, h)


def _w_sweep_loop(u, v, f, h, w):
    n = u.shape[0]
    K = n - 1
    for i in range(K - 1, -1, -1):
        for j in range(1, n):
            if i >= 1:
                ux1 = (u[i, j] - u[i - 1, j]) / h
            else:
                ux1 = (u[i + 1, j] - u[i, j]) / h
            if ux1 < 0.0:
                ux1 = 0.0
            ux2 = (u[i, j] - u[i, j - 1]) / h
            if ux2 < 0.0:
                ux2 = 0.0
            vij = v[i, j]
            den = h * f[i, j] + vij * (ux1 + ux2)
            w[i, j] = vij * (ux2 * w[i + 1, j] + ux1 * w[i, j - 1]) / den


def _w_sweep_numpy(u, v, f, h):
    n = u.shape[0]
    K = n - 1
    w = np.zeros_like(u)
    w[K, :] = 1.0
    w[:, 0] = 1.0
    for s in range(2, 2 * K + 1):
        i = np.arange(max(0, K - s + 1), min(K - 1, 2 * K - s) + 1)
        j = s - K + i
        ib = np.maximum(i, 1)
        ux1 = (u[ib, j] - u[ib - 1, j]) / h
        edge = i == 0
        if edge.any():
            je = j[edge]
            ux1[edge] = (u[1, je] - u[0, je]) / h
        ux1 = np.maximum(ux1, 0.0)
        ux2 = np.maximum((u[i, j] - u[i, j - 1]) / h, 0.0)
        vij = v[i, j]
        den = h * f[i, j] + vij * (ux1 + ux2)
        w[i, j] = vij * (ux2 * w[i + 1, j] + ux1 * w[i, j - 1]) / den
    return w


def w_sweep(u: np.ndarray, v: np.ndarray, f: np.ndarray, h: float) -> np.ndarray:
    u = np.ascontiguousarray(u, dtype=np.float64)
    v = np.ascontiguousarray(v, dtype=np.float64)
    f = np.ascontiguousarray(f, dtype=np.float64)
    if _accel.get_backend() == "numba":
        w = np.zeros_like(u)
        K = u.shape[0] - 1
        w[K, :] = 1.0
        w[:, 0] = 1.0
        _nb("w", _w_sweep_loop)(u, v, f, h, w)
        return w
    return _w_sweep_numpy(u, v, f, h)


# ---------------------------------------------------------------------------
# Staircase nondominated sorting (2-D). Points must be lexsorted by
# (x1, x2); identical rows are adjacent and copy the depth of their twin.
# minx2[k] tracks the smallest x2 seen on front k+1; it stays nondecreasing,
# so the deepest dominating front is found by binary search.
# ---------------------------------------------------------------------------


def _staircase_loop(x1, x2, depth, minx2):
    n = x1.size
    m = 0
    for t in range(n):
        if t > 0 and x1[t] == x1[t - 1] and x2[t] == x2[t - 1]:
            depth[t] = depth[t - 1]
            continue
        val = x2[t]
        lo = 0
        hi = m
        while lo < hi:
            mid = (lo + hi) >> 1
            if minx2[mid] <= val:
                lo = mid + 1
            else:
                hi = mid
        depth[t] = lo + 1
        minx2[lo] = val
        if lo == m:
            m += 1
    return m


def _staircase_numpy(x1, x2):
    n = x1.size
    depth = np.zeros(n, dtype=np.int64)
    minx2: list[float] = []
    x1l = x1.tolist()
    x2l = x2.tolist()
    for t in range(n):
        if t > 0 and x1l[t] == x1l[t - 1] and x2l[t] == x2l[t - 1]:
            depth[t] = depth[t - 1]
            continue
        val = x2l[t]
        d = bisect.bisect_right(minx2, val)
        depth[t] = d + 1
        if d == len(minx2):
            minx2.append(val)
        else:
            minx2[d] = val
    return depth


def staircase_depths(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """Depths of lex-sorted 2-D points via the monotone front-tail staircase."""
    x1 = np.ascontiguousarray(x1, dtype=np.float64)
    x2 = np.ascontiguousarray(x2, dtype=np.float64)
    if _accel.get_backend() == "numba":
        depth = np.zeros(x1.size, dtype=np.int64)
        minx2 = np.empty(x1.size, dtype=np.float64)
        _nb("staircase", _staircase_loop)(x1, x2, depth, minx2)
        return depth
    return _staircase_numpy(x1, x2)


# ---------------------------------------------------------------------------
# Brute-force peeling in any dimension: domination counts + layer-by-layer
# removal (Kahn over the dominance DAG). Reference oracle, O(d n^2).
# ---------------------------------------------------------------------------


def _peel_loop(pts, depth):
    n, d = pts.shape
    ndom = np.zeros(n, dtype=np.int64)
    outdeg = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            le = True
            lt = False
            for k in range(d):
                if pts[i, k] > pts[j, k]:
                    le = False
                    break
                elif pts[i, k] < pts[j, k]:
                    lt = True
            if le and lt:
                outdeg[i] += 1
                ndom[j] += 1
    off = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        off[i + 1] = off[i] + outdeg[i]
    adj = np.empty(off[n], dtype=np.int64)
    fill = off[:n].copy()
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            le = True
            lt = False
            for k in range(d):
                if pts[i, k] > pts[j, k]:
                    le = False
                    break
                elif pts[i, k] < pts[j, k]:
                    lt = True
            if le and lt:
                adj[fill[i]] = j
                fill[i] += 1
    cur = np.empty(n, dtype=np.int64)
    nxt = np.empty(n, dtype=np.int64)
    cn = 0
    for i in range(n):
        if ndom[i] == 0:
            cur[cn] = i
            cn += 1
    level = 1
    while cn > 0:
        nn = 0
        for qi in range(cn):
            p = cur[qi]
            depth[p] = level
            for e in range(off[p], off[p + 1]):
                q = adj[e]
                ndom[q] -= 1
                if ndom[q] == 0:
                    nxt[nn] = q
                    nn += 1
        cur, nxt = nxt, cur
        cn = nn
        level += 1


def _peel_numpy(pts):
    n = pts.shape[0]
    dom = np.zeros((n, n), dtype=bool)
    chunk = max(1, int(4e6 // max(n, 1)))
    for start in range(0, n, chunk):
        blk = pts[start : start + chunk]
        le = (blk[:, None, :] <= pts[None, :, :]).all(axis=-1)
        lt = (blk[:, None, :] < pts[None, :, :]).any(axis=-1)
        dom[start : start + chunk] = le & lt
    ndom = dom.sum(axis=0).astype(np.int64)
    depth = np.zeros(n, dtype=np.int64)
    frontier = ndom == 0
    level = 1
    while frontier.any():
        depth[frontier] = level
        ndom -= dom[frontier].sum(axis=0)
        ndom[frontier] = -1
        frontier = ndom == 0
        level += 1
    return depth


def peel_depths(pts: np.ndarray) -> np.ndarray:
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    if _accel.get_backend() == "numba":
        depth = np.zeros(pts.shape[0], dtype=np.int64)
        _nb("peel", _peel_loop)(pts, depth)
        return depth
    return _peel_numpy(pts)


# ---------------------------------------------------------------------------
# Depth queries against a sorted reference set: depth of a fresh point is
# 1 + the deepest reference point strictly dominating it.
# ---------------------------------------------------------------------------


def _query_loop(wx1, wx2, wdepth, qx1, qx2, out):
    for qi in range(qx1.size):
        a = qx1[qi]
        b = qx2[qi]
        best = 0
        for t in range(wx1.size):
            if wx1[t] <= a and wx2[t] <= b and (wx1[t] < a or wx2[t] < b):
                dt = wdepth[t]
                if dt > best:
                    best = dt
        out[qi] = best + 1


def _query_numpy(wx1, wx2, wdepth, qx1, qx2):
    out = np.empty(qx1.size, dtype=np.int64)
    for qi in range(qx1.size):
        a = qx1[qi]
        b = qx2[qi]
        mask = (wx1 <= a) & (wx2 <= b) & ~((wx1 == a) & (wx2 == b))
        out[qi] = (wdepth[mask].max() if mask.any() else 0) + 1
    return out


def dominance_depth_query(
    wx1: np.ndarray,
    wx2: np.ndarray,
    wdepth: np.ndarray,
    qx1: np.ndarray,
    qx2: np.ndarray,
) -> np.ndarray:
    wx1 = np.ascontiguousarray(wx1, dtype=np.float64)
    wx2 = np.ascontiguousarray(wx2, dtype=np.float64)
    wdepth = np.ascontiguousarray(wdepth, dtype=np.int64)
    qx1 = np.ascontiguousarray(qx1, dtype=np.float64)
    qx2 = np.ascontiguousarray(qx2, dtype=np.float64)
    if _accel.get_backend() == "numba":
        out = np.empty(qx1.size, dtype=np.int64)
        _nb("query", _query_loop)(wx1, wx2, wdepth, qx1, qx2, out)
        return out
    return _query_numpy(wx1, wx2, wdepth, qx1, qx2)
