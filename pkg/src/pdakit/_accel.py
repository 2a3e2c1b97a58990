"""Backend selection for the hot numeric kernels.

Every kernel in ``pdakit._kernels`` has two implementations: a numba
``@njit`` loop and a pure-numpy path. The active backend is chosen by the
``PDAKIT_BACKEND`` environment variable ("numba" or "numpy"; default is
numba when importable) and can be switched at runtime with `set_backend`,
which is what the benchmark harness does to compare the two.
"""

from __future__ import annotations

import os

_VALID = ("numba", "numpy")
_backend: str | None = None


def _numba_importable() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _resolve_default() -> str:
    env = os.environ.get("PDAKIT_BACKEND", "").strip().lower()
    if env in _VALID:
        if env == "numba" and not _numba_importable():
            raise RuntimeError("PDAKIT_BACKEND=numba but numba is not importable")
        return env
    if env:
        raise ValueError(f"PDAKIT_BACKEND must be one of {_VALID}, got {env!r}")
    return "numba" if _numba_importable() else "numpy"


def get_backend() -> str:
    global _backend
    if _backend is None:
        _backend = _resolve_default()
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in _VALID:
        raise ValueError(f"backend must be one of {_VALID}, got {name!r}")
    if name == "numba" and not _numba_importable():
        raise RuntimeError("numba backend requested but numba is not importable")
    _backend = name


def jit(pyfunc):
    """Compile ``pyfunc`` with numba (lazy import, on-disk cache)."""
    from numba import njit

    return njit(cache=True)(pyfunc)
