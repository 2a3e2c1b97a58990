"""Upwind solvers for the two within-front transport equations.

v solves grad(v) . perp(grad u) = f with v = 0 on {x2=1} (and on {x1=0} for
convenience): the continuum count of front points to the left of x. w
solves v grad(w) . perp(grad u) = w f with w = 1 on {x1=1} and {x2=0}: the
normalized position along the front, in [0, 1]. Both are swept once along
the characteristics (level curves of u): v in direction (+1,-1), w in
direction (-1,+1). The velocity components u_{x1}, u_{x2} are backward
differences of the solved u (forward at the i=0 / j=0 edges), clamped at 0,
which keeps the transport velocity consistent with the HJE stencil.

The boundary condition w = 0 on {x2=1} must not be imposed: the upwind
solver then reproduces v instead of w, as the equation admits both.

Closed forms for f = 1: v = -log(x2) sqrt(x1 x2) and
w = log(x2) / (log(x1) + log(x2)); w is discontinuous at (1,1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import GridField
from .hje import HjeSolution


@dataclass(frozen=True)
class TransportSolution:
    v: GridField
    w: GridField
    u_source: HjeSolution


def _check_positive(f: GridField) -> None:
    if f.values.min() <= 0.0:
        raise ValueError(
            f"transport solves require f > 0 at every node (min f = {f.values.min()})"
        )


def solve_v(u: HjeSolution, f: GridField) -> GridField:
    _check_positive(f)
    v = _kernels.v_sweep(u.u.values, f.values, f.h)
    if not np.isfinite(v).all():
        raise ArithmeticError("transport v sweep hit a zero velocity denominator")
    return GridField(v)


def solve_w(u: HjeSolution, v: GridField, f: GridField) -> GridField:
    _check_positive(f)
    w = _kernels.w_sweep(u.u.values, v.values, f.values, f.h)
    if not np.isfinite(w).all():
        raise ArithmeticError("transport w sweep produced non-finite values")
    return GridField(w)


def solve_transport(u: HjeSolution, f: GridField) -> TransportSolution:
    v = solve_v(u, f)
    w = solve_w(u, v, f)
    return TransportSolution(v=v, w=w, u_source=u)


def _velocity(u: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """The sweeps' discretization of (u_{x1}, u_{x2}) at every node."""
    n = u.shape[0]
    ux1 = np.empty_like(u)
    ux1[1:, :] = (u[1:, :] - u[:-1, :]) / h
    ux1[0, :] = (u[1, :] - u[0, :]) / h
    ux2 = np.empty_like(u)
    ux2[:, 1:] = (u[:, 1:] - u[:, :-1]) / h
    ux2[:, 0] = (u[:, 1] - u[:, 0]) / h
    return np.maximum(ux1, 0.0), np.maximum(ux2, 0.0)


def v_residual(u: HjeSolution, v: GridField, f: GridField) -> np.ndarray:
    """|u_{x2} D1^- v - u_{x1} D2^+ v - f| at the nodes the sweep updated."""
    uv = u.u.values
    vv = v.values
    h = v.h
    ux1, ux2 = _velocity(uv, h)
    d1 = (vv[1:, :-1] - vv[:-1, :-1]) / h
    d2 = (vv[1:, 1:] - vv[1:, :-1]) / h
    return np.abs(ux2[1:, :-1] * d1 - ux1[1:, :-1] * d2 - f.values[1:, :-1])


def w_residual(u: HjeSolution, v: GridField, w: GridField, f: GridField) -> np.ndarray:
    """|v u_{x2} D1^+ w - v u_{x1} D2^- w - w f| at the nodes the sweep updated."""
    uv = u.u.values
    wv = w.values
    h = w.h
    ux1, ux2 = _velocity(uv, h)
    d1 = (wv[1:, 1:] - wv[:-1, 1:]) / h
    d2 = (wv[:-1, 1:] - wv[:-1, :-1]) / h
    vv = v.values[:-1, 1:]
    return np.abs(
        vv * ux2[:-1, 1:] * d1 - vv * ux1[:-1, 1:] * d2 - wv[:-1, 1:] * f.values[:-1, 1:]
    )


def closed_form_v(x1, x2):
    """Exact v for f = 1: -log(x2) sqrt(x1 x2)."""
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    out = np.where(x2 > 0.0, -np.log(np.maximum(x2, 1e-300)) * np.sqrt(x1 * x2), 0.0)
    return out


def closed_form_w(x1, x2):
    """Exact w for f = 1: log(x2) / (log(x1) + log(x2)); 0/0 at (1,1)."""
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    l1 = np.log(np.maximum(x1, 1e-300))
    l2 = np.log(np.maximum(x2, 1e-300))
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(l1 + l2 < 0.0, l2 / (l1 + l2), 1.0)
