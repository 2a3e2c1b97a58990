"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run as ``python -m pdakit.bench``. Each hot kernel is timed on a
representative workload under both backends (numba pre-compiled outside the
timed region) and the speedup is reported. The same switch is available to
users via the PDAKIT_BACKEND environment variable.
"""

from __future__ import annotations

import time

import numpy as np

from . import _accel, _kernels


def _time(fn, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def build_cases(seed: int = 0, K: int = 200, n_points: int = 200_000,
                n_brute: int = 1_500):
    rng = np.random.default_rng(seed)
    f = np.ones((K + 1, K + 1))
    h = 1.0 / K
    u = _kernels.hje_sweep(f, h)
    v = _kernels.v_sweep(u, f, h)
    pts = rng.random((n_points, 2))
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    x1, x2 = pts[order, 0], pts[order, 1]
    brute = rng.random((n_brute, 2))
    wdepth = _kernels.staircase_depths(x1, x2)
    q = rng.random((64, 2))
    return [
        (f"hje sweep K={K}", lambda: _kernels.hje_sweep(f, h)),
        (f"transport v sweep K={K}", lambda: _kernels.v_sweep(u, f, h)),
        (f"transport w sweep K={K}", lambda: _kernels.w_sweep(u, v, f, h)),
        (f"staircase sort n={n_points}", lambda: _kernels.staircase_depths(x1, x2)),
        (f"peeling sort n={n_brute}", lambda: _kernels.peel_depths(brute)),
        (f"depth query {len(q)}x{n_points}",
         lambda: _kernels.dominance_depth_query(x1, x2, wdepth, q[:, 0], q[:, 1])),
    ]


def main() -> int:
    if not _accel._numba_importable():
        print("numba is not importable; nothing to compare")
        return 1
    _accel.set_backend("numba")
    cases = build_cases()
    for _, fn in cases:
        fn()  # compile

    print(f"{'kernel':<32} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for name, fn in cases:
        _accel.set_backend("numba")
        t_nb = _time(fn)
        _accel.set_backend("numpy")
        t_np = _time(fn, repeats=3)
        print(f"{name:<32} {t_nb * 1e3:>10.2f}ms {t_np * 1e3:>10.2f}ms "
              f"{t_np / t_nb:>8.1f}x")
    _accel.set_backend("numba")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
