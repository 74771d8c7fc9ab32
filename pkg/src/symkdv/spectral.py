"""Chebyshev-Gauss-Lobatto grids, Lagrange interpolation and differentiation matrices.

Nodes are ordered from +1 down to -1, ``nodes[j] = cos(j*pi/N)``. All objects
are immutable; the arrays they hold are flagged read-only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from symkdv.errors import (
    DomainError,
    GridMismatchError,
    InvalidOrderError,
    InvalidResolutionError,
)

#: Distance below which an evaluation point is treated as a node.
NODE_COINCIDENCE_TOL = 1e-14


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ChebyshevGrid:
    n: int
    nodes: np.ndarray

    @property
    def size(self) -> int:
        return self.n + 1

    def weights_c(self) -> np.ndarray:
        """The endpoint factors c_j (2 at both ends, 1 in the interior)."""
        c = np.ones(self.n + 1)
        c[0] = c[-1] = 2.0
        return c


@dataclass(frozen=True, eq=False)
class DiffMatrix:
    order: int
    n: int
    entries: np.ndarray

    def __matmul__(self, other):
        if isinstance(other, NodeValues):
            return self.entries @ other.values
        return self.entries @ np.asarray(other, dtype=float)


@dataclass(frozen=True, eq=False)
class NodeValues:
    grid: ChebyshevGrid
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != (self.grid.size,):
            raise GridMismatchError(
                f"node values must have length N+1 = {self.grid.size}, got shape {values.shape}"
            )
        object.__setattr__(self, "values", values)


def cgl_nodes(n: int) -> ChebyshevGrid:
    """Chebyshev-Gauss-Lobatto points ``cos(j*pi/n)``, ``j = 0..n``.

    The upper half is computed and mirrored so that ``nodes[j] == -nodes[n-j]``
    holds bit for bit; the endpoints are exactly 1 and -1.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidResolutionError(f"resolution n must be an integer >= 1, got {n!r}")
    n = int(n)
    nodes = np.empty(n + 1)
    half = n // 2
    j = np.arange(half + 1)
    nodes[: half + 1] = np.cos(j * np.pi / n)
    nodes[n - j] = -nodes[: half + 1]
    if n % 2 == 0:
        nodes[half] = 0.0
    nodes[0], nodes[n] = 1.0, -1.0
    return ChebyshevGrid(n=n, nodes=_frozen(nodes))


def diff_matrix(grid: ChebyshevGrid, negative_sum: bool = True) -> DiffMatrix:
    """First-order Chebyshev collocation differentiation matrix.

    Off-diagonal entries are ``(c_i/c_j) (-1)^(i+j) / (x_i - x_j)``. With
    ``negative_sum`` (the default) each diagonal entry is replaced by minus the
    sum of its row's off-diagonal entries, so constants are annihilated to
    rounding. Otherwise the closed-form diagonal is used: ``-x_i/(2(1-x_i^2))``
    in the interior and ``+-(2N^2+1)/6`` at the corners.
    """
    n = grid.n
    x = grid.nodes
    c = grid.weights_c()
    sign = (-1.0) ** np.arange(n + 1)

    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    d = (c[:, None] * sign[:, None] * sign[None, :]) / (c[None, :] * dx)
    np.fill_diagonal(d, 0.0)

    if negative_sum:
        np.fill_diagonal(d, -d.sum(axis=1))
    else:
        diag = np.empty(n + 1)
        interior = x[1:-1]
        diag[1:-1] = -interior / (2.0 * (1.0 - interior**2))
        diag[0] = (2.0 * n * n + 1.0) / 6.0
        diag[-1] = -diag[0]
        np.fill_diagonal(d, diag)
    return DiffMatrix(order=1, n=n, entries=_frozen(d))


def diff_matrix_power(d: DiffMatrix, k: int) -> DiffMatrix:
    """k-th matrix power of a first-order differentiation matrix."""
    if d.order != 1:
        raise InvalidOrderError(f"expected an order-1 matrix to exponentiate, got order {d.order}")
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise InvalidOrderError(f"derivative order k must be an integer >= 1, got {k!r}")
    k = int(k)
    if k == 1:
        return d
    return DiffMatrix(order=k, n=d.n, entries=_frozen(np.linalg.matrix_power(d.entries, k)))


def diff_matrices(grid: ChebyshevGrid, max_order: int = 3, negative_sum: bool = True):
    """Convenience: ``[D, D^2, ..., D^max_order]`` on ``grid``."""
    d1 = diff_matrix(grid, negative_sum=negative_sum)
    return [diff_matrix_power(d1, k) for k in range(1, max_order + 1)]


def chebyshev_t_derivative(n: int, x):
    """T_n'(x) = n U_{n-1}(x), with U evaluated by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    u_prev = np.ones_like(x)
    if n == 1:
        return u_prev * 1.0
    u = 2.0 * x
    for _ in range(2, n):
        u_prev, u = u, 2.0 * x * u - u_prev
    return n * u


def lagrange_basis(grid: ChebyshevGrid, x: float) -> np.ndarray:
    """Values of all cardinal functions L_{N,j} at a single point ``x``."""
    n = grid.n
    x = float(x)
    _check_domain(x)
    nodes = grid.nodes
    hit = np.flatnonzero(np.abs(x - nodes) <= NODE_COINCIDENCE_TOL)
    if hit.size:
        basis = np.zeros(n + 1)
        basis[hit[0]] = 1.0
        return basis
    c = grid.weights_c()
    j = np.arange(n + 1)
    numer = (-1.0) ** (j + 1) * (1.0 - x * x) * chebyshev_t_derivative(n, x)
    return numer / (c * n * n * (x - nodes))


def interpolate(vals: NodeValues, x: float) -> float:
    """Evaluate the degree-N interpolant of ``vals`` at ``x`` in [-1, 1].

    At (or within 1e-14 of) a node the stored value is returned unchanged.
    """
    x = float(x)
    _check_domain(x)
    hit = np.flatnonzero(np.abs(x - vals.grid.nodes) <= NODE_COINCIDENCE_TOL)
    if hit.size:
        return float(vals.values[hit[0]])
    return float(lagrange_basis(vals.grid, x) @ vals.values)


def interpolate_many(vals: NodeValues, xs) -> np.ndarray:
    return np.array([interpolate(vals, x) for x in np.ravel(xs)])


def _check_domain(x: float) -> None:
    if not np.isfinite(x) or abs(x) > 1.0:
        raise DomainError(f"interpolation point must lie in [-1, 1], got x = {x!r}")
