"""Space-time fields: reconstruction, PDE residuals and symmetry transforms.

A *sampler* is any callable ``u(x, t) -> float``.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from symkdv.errors import DomainError
from symkdv.lie import _check_generator
from symkdv.reductions import CollocationSolution, Kind
from symkdv.spectral import interpolate

Sampler = Callable[[float, float], float]

DEFAULT_X_MIN = 0.2
DEFAULT_H = 1e-3


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Samples ``values[a, b] = u(x_grid[a], t_values[b])``."""

    x_grid: np.ndarray
    t_values: np.ndarray
    values: np.ndarray
    provenance: str

    def __post_init__(self):
        x = np.asarray(self.x_grid, dtype=float).ravel()
        t = np.asarray(self.t_values, dtype=float).ravel()
        u = np.asarray(self.values, dtype=float).reshape(x.size, t.size)
        if x.size > 1 and not np.all(np.diff(x) > 0):
            raise DomainError("x_grid must be strictly increasing")
        if not np.all(t > 0):
            raise DomainError(f"all t values must be positive, got {t.tolist()}")
        for name, arr in (("x_grid", x), ("t_values", t), ("values", u)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def stack(cls, fields: Sequence["SpaceTimeField"]) -> "SpaceTimeField":
        """Join single-time fields sharing one x grid into a multi-time field."""
        if not fields:
            raise DomainError("cannot stack an empty list of fields")
        x = fields[0].x_grid
        for f in fields[1:]:
            if f.x_grid.shape != x.shape or not np.array_equal(f.x_grid, x):
                raise DomainError("fields to stack must share the same x grid")
        t = np.concatenate([f.t_values for f in fields])
        u = np.concatenate([f.values for f in fields], axis=1)
        order = np.argsort(t, kind="stable")
        return cls(x, t[order], u[:, order], fields[0].provenance)

    @classmethod
    def sample(cls, u: Sampler, x_grid, t_values, provenance: str = "exact-family") -> "SpaceTimeField":
        x = np.asarray(x_grid, dtype=float)
        t = np.asarray(t_values, dtype=float)
        vals = np.array([[u(xa, tb) for tb in t] for xa in x])
        return cls(x, t, vals, provenance)


def reconstruct_problem1(
    sol: CollocationSolution, x_grid, t: float, x_min: float = DEFAULT_X_MIN
) -> SpaceTimeField:
    """``u(x, t) = g(x^3 / t) / x^2`` from a problem 1 solution.

    Points with ``|x| < x_min`` (the 1/x^2 singularity) or with ``x^3/t``
    outside the solved interval are rejected rather than extrapolated.
    """
    if not t > 0:
        raise DomainError(f"t must be positive, got t = {t!r}")
    x = np.asarray(x_grid, dtype=float).ravel()
    vals = sol.node_values
    u = np.empty(x.size)
    for a, xa in enumerate(x.tolist()):
        if abs(xa) < x_min:
            raise DomainError(f"|x| must be >= x_min = {x_min} (u = g/x^2 is singular at 0), got x = {xa!r}")
        r = xa**3 / t
        if abs(r) > 1.0:
            raise DomainError(f"r = x^3/t = {r!r} lies outside [-1, 1] for x = {xa!r}, t = {t!r}")
        u[a] = interpolate(vals, r) / (xa * xa)
    return SpaceTimeField(x, [t], u[:, None], "Problem1")


def reconstruct_problem2(sol: CollocationSolution, t: float, x_grid=None) -> SpaceTimeField:
    """``u(x, t) = ln f(x) - ln(t)/4`` from a problem 2 solution.

    ``x_grid`` defaults to the collocation nodes in increasing order.
    """
    if not t > 0:
        raise DomainError(f"t must be positive, got t = {t!r}")
    if np.any(sol.values <= 0):
        raise DomainError("problem 2 node values must all be positive")
    x = sol.grid.nodes[::-1] if x_grid is None else np.asarray(x_grid, dtype=float).ravel()
    vals = sol.node_values
    shift = 0.25 * math.log(t)
    u = np.empty(x.size)
    for a, xa in enumerate(x.tolist()):
        f = interpolate(vals, xa)
        if not f > 0:
            raise DomainError(f"interpolated f({xa!r}) = {f!r} is not positive; ln f undefined")
        u[a] = math.log(f) - shift
    return SpaceTimeField(x, [t], u[:, None], "Problem2")


def reconstruct(sol: CollocationSolution, x_grid, t: float, x_min: float = DEFAULT_X_MIN) -> SpaceTimeField:
    if sol.problem.kind is Kind.PROBLEM1:
        return reconstruct_problem1(sol, x_grid, t, x_min=x_min)
    return reconstruct_problem2(sol, t, x_grid)


def pde_residual(u: Sampler, x: float, t: float, h_x: float = DEFAULT_H, h_t: float = DEFAULT_H) -> float:
    """Finite-difference value of ``u_t + 6 u u_x + u_xxx + u/(2t)`` at (x, t).

    Central differences for u_t and u_x and the five-point formula for
    u_xxx; all second order.
    """
    if not t > 0:
        raise DomainError(f"t must be positive, got t = {t!r}")
    if not t - h_t > 0:
        raise DomainError(f"stencil leaves t > 0: t - h_t = {t - h_t!r}")
    u0 = u(x, t)
    up1, um1 = u(x + h_x, t), u(x - h_x, t)
    up2, um2 = u(x + 2 * h_x, t), u(x - 2 * h_x, t)
    u_t = (u(x, t + h_t) - u(x, t - h_t)) / (2 * h_t)
    u_x = (up1 - um1) / (2 * h_x)
    u_xxx = (up2 - 2 * up1 + 2 * um1 - um2) / (2 * h_x**3)
    return u_t + 6 * u0 * u_x + u_xxx + u0 / (2 * t)


def exact_family(b: float = 0.0) -> Sampler:
    """The closed-form solutions ``u = x/(12 t) + b/t``."""
    return lambda x, t: x / (12 * t) + b / t


def _push_forward(u: Sampler, i: int, eps: float) -> Sampler:
    if i == 1:
        sx, st, su = math.exp(-eps / 3), math.exp(-eps), math.exp(-2 * eps / 3)
        return lambda x, t: su * u(sx * x, st * t)
    if i == 2:
        return lambda x, t: u(x - eps, t)

    def shifted(x, t):
        if t < 0:
            raise DomainError(f"the X3 transform needs t >= 0, got t = {t!r}")
        root = math.sqrt(t)
        return u(x - eps * t * root, t) + eps * root / 4

    return shifted


def transform_solution(u: Sampler, chain: Sequence[tuple]) -> Sampler:
    """Map the graph of ``u`` through the point flows in ``chain``, first step first."""
    out = u
    for i, eps in chain:
        out = _push_forward(out, _check_generator(i), float(eps))
    return out


def _fmt(v: float) -> str:
    s = f"{v:.15g}"
    return "0" if s == "-0" else s


def emit_plot_data(field: SpaceTimeField) -> str:
    """CSV with header ``x,t,u``, rows sorted by (t, x), 15 significant digits."""
    if field.values.size == 0:
        raise DomainError("cannot emit an empty field")
    buf = io.StringIO()
    buf.write("x,t,u\n")
    for b in np.argsort(field.t_values, kind="stable"):
        for a in np.argsort(field.x_grid, kind="stable"):
            buf.write(f"{_fmt(field.x_grid[a])},{_fmt(field.t_values[b])},{_fmt(field.values[a, b])}\n")
    return buf.getvalue()


def plot_data_json(field: SpaceTimeField) -> str:
    """JSON mirror of :func:`emit_plot_data`: parallel ``x``, ``t``, ``u`` arrays."""
    xs, ts, us = [], [], []
    for b in np.argsort(field.t_values, kind="stable"):
        for a in np.argsort(field.x_grid, kind="stable"):
            xs.append(float(field.x_grid[a]))
            ts.append(float(field.t_values[b]))
            us.append(float(field.values[a, b]))
    return json.dumps({"provenance": field.provenance, "x": xs, "t": ts, "u": us})
