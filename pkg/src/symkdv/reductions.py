"""The two symmetry-reduced boundary-value problems on the CGL grid.

Problem 1 is the scaling (X1) reduction ``u = g(r) / x^2``, ``r = x^3 / t``;
problem 2 is the ansatz ``u = ln(f(x) / t^(1/4))`` with ``t`` a parameter.
Both are third order and are solved for the interior node values with the
boundary values pinned to 1 and the derivative condition imposed at x = -1.

Each problem comes in three sign variants:

``printed-discrete``
    Reference sign convention for the collocated systems. Problem 1
    carries ``+24 g^2``. This is the default.
``printed-continuous``
    Continuous-form sign convention. Problem 1 carries
    ``-24 g^2``; problem 2 is identical to printed-discrete.
``derived``
    Re-derived from the PDE by the chain rule (see ``docs/derivation.md``)::

        54 r^3 g''' + (36 r g + 48 r - 2 r^2) g' - 24 g^2 - (48 - r) g = 0
        4t f^2 f''' - 12t f f' f'' + 8t f'^3 + 24t L f^2 f' + 2 L f^3 - f^3 = 0

    with ``L = ln(f / t^(1/4))``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from symkdv.errors import DomainError, GridMismatchError
from symkdv.solver import NewtonConfig, NewtonReport, newton_solve
from symkdv.spectral import (
    ChebyshevGrid,
    DiffMatrix,
    NodeValues,
    cgl_nodes,
    diff_matrix,
    diff_matrix_power,
    interpolate,
)


class Kind(enum.Enum):
    PROBLEM1 = 1
    PROBLEM2 = 2


class Variant(enum.Enum):
    PRINTED_DISCRETE = "printed-discrete"
    PRINTED_CONTINUOUS = "printed-continuous"
    DERIVED = "derived"

    @classmethod
    def parse(cls, value) -> "Variant":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            choices = ", ".join(v.value for v in cls)
            raise DomainError(f"unknown variant {value!r}; expected one of {choices}") from None


@dataclass(frozen=True)
class ReducedProblem:
    kind: Kind
    n: int = 25
    variant: Variant = Variant.PRINTED_DISCRETE
    t_param: Optional[float] = None

    def __post_init__(self):
        kind = self.kind if isinstance(self.kind, Kind) else Kind(int(self.kind))
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 4:
            raise DomainError(f"resolution N must be an integer >= 4, got {self.n!r}")
        if kind is Kind.PROBLEM2:
            if self.t_param is None or not (float(self.t_param) > 0 and math.isfinite(self.t_param)):
                raise DomainError(f"problem 2 needs a finite t > 0, got t = {self.t_param!r}")


@dataclass(frozen=True, eq=False)
class CollocationSolution:
    grid: ChebyshevGrid
    values: np.ndarray
    residuals: np.ndarray
    newton: NewtonReport
    problem: ReducedProblem

    @property
    def node_values(self) -> NodeValues:
        return NodeValues(self.grid, self.values)

    @property
    def converged(self) -> bool:
        return self.newton.converged

    def value_at(self, x: float) -> float:
        return interpolate(self.node_values, x)


def _check_grid(values: NodeValues, *mats: DiffMatrix) -> np.ndarray:
    for d in mats:
        if d.n != values.grid.n:
            raise GridMismatchError(
                f"order-{d.order} matrix is built for N = {d.n} but the values live on N = {values.grid.n}"
            )
    return values.values


def _problem1_kernel(variant: Variant, r, g, g1, g3):
    if variant is Variant.PRINTED_DISCRETE:
        return 54 * r**3 * g3 + (84 * r * g - 2 * r**2) * g1 + 24 * g**2 - (48 + r) * g
    if variant is Variant.PRINTED_CONTINUOUS:
        return 54 * r**3 * g3 - 2 * r**2 * g1 + 84 * r * g * g1 - 24 * g**2 - (48 + r) * g
    return 54 * r**3 * g3 + (36 * r * g + 48 * r - 2 * r**2) * g1 - 24 * g**2 - (48 - r) * g


def _problem2_kernel(variant: Variant, t: float, f, f1, f2, f3):
    log_term = np.log(f) - 0.25 * math.log(t)
    # The only difference between variants is the sign of the 2 L f^3 term.
    log_sign = 1.0 if variant is Variant.DERIVED else -1.0
    return (
        4 * t * f**2 * f3
        - 12 * t * f * f1 * f2
        + 8 * t * f1**3
        + 24 * t * f**2 * log_term * f1
        + log_sign * 2 * f**3 * log_term
        - f**3
    )


def problem1_residual(
    values: NodeValues,
    d1: DiffMatrix,
    d3: DiffMatrix,
    variant: Variant | str = Variant.PRINTED_DISCRETE,
) -> np.ndarray:
    """Problem 1 operator at the interior nodes i = 1..N-1 (``r`` is the node)."""
    g = _check_grid(values, d1, d3)
    res = _problem1_kernel(Variant.parse(variant), values.grid.nodes, g, d1.entries @ g, d3.entries @ g)
    return res[1:-1]


def problem2_residual(
    values: NodeValues,
    t: float,
    d1: DiffMatrix,
    d2: DiffMatrix,
    d3: DiffMatrix,
    variant: Variant | str = Variant.PRINTED_DISCRETE,
) -> np.ndarray:
    """Problem 2 operator at the interior nodes i = 1..N-1."""
    f = _check_grid(values, d1, d2, d3)
    if not t > 0:
        raise DomainError(f"problem 2 needs t > 0, got t = {t!r}")
    bad = np.flatnonzero(~(f > 0))
    if bad.size:
        k = int(bad[0])
        raise DomainError(f"problem 2 needs f > 0 at every node (logarithm), got f[{k}] = {f[k]!r}")
    res = _problem2_kernel(
        Variant.parse(variant), float(t), f, d1.entries @ f, d2.entries @ f, d3.entries @ f
    )
    return res[1:-1]


@dataclass(frozen=True, eq=False)
class Discretization:
    """Grid and differentiation matrices shared by the residual operators."""

    grid: ChebyshevGrid
    d1: DiffMatrix
    d2: DiffMatrix
    d3: DiffMatrix

    @classmethod
    def build(cls, n: int, negative_sum: bool = True) -> "Discretization":
        grid = cgl_nodes(n)
        d1 = diff_matrix(grid, negative_sum=negative_sum)
        return cls(grid, d1, diff_matrix_power(d1, 2), diff_matrix_power(d1, 3))


def residual_operator(problem: ReducedProblem, disc: Discretization) -> Callable[[NodeValues], np.ndarray]:
    """The interior-row residual map for ``problem``; the only variant-aware piece."""
    if problem.kind is Kind.PROBLEM1:
        return lambda v: problem1_residual(v, disc.d1, disc.d3, problem.variant)
    t = float(problem.t_param)
    return lambda v: problem2_residual(v, t, disc.d1, disc.d2, disc.d3, problem.variant)


def _default_config(problem: ReducedProblem) -> NewtonConfig:
    if problem.kind is Kind.PROBLEM2:
        return NewtonConfig(positivity_guard=_all_positive)
    return NewtonConfig()


def _all_positive(v: np.ndarray) -> bool:
    return bool(np.all(v > 0))


def solve_reduced(
    problem: ReducedProblem,
    cfg: NewtonConfig | None = None,
    initial_guess=None,
    negative_sum: bool = True,
) -> CollocationSolution:
    """Collocate ``problem`` on N+1 CGL nodes and solve with Newton.

    Unknowns are the N-1 interior values; ``value[0] = value[N] = 1`` are
    pinned. The square system is the ODE at rows 1..N-2 plus
    ``(D value)[N] = 1``. Residuals are then reported at all interior rows
    1..N-1. The initial guess is 1 everywhere unless given.

    For problem 2 a positivity guard is always installed (a caller-supplied
    guard is combined with it) so the logarithm stays defined.
    """
    cfg = cfg or _default_config(problem)
    if problem.kind is Kind.PROBLEM2 and cfg.positivity_guard is not _all_positive:
        user_guard = cfg.positivity_guard
        guard = _all_positive if user_guard is None else (lambda v: _all_positive(v) and bool(user_guard(v)))
        cfg = NewtonConfig(
            max_iters=cfg.max_iters,
            abs_tol=cfg.abs_tol,
            step_tol=cfg.step_tol,
            fd_step=cfg.fd_step,
            backtracking=cfg.backtracking,
            max_halvings=cfg.max_halvings,
            positivity_guard=guard,
        )

    disc = Discretization.build(problem.n, negative_sum=negative_sum)
    n = problem.n
    operator = residual_operator(problem, disc)
    d_last = disc.d1.entries[n]

    def full(interior: np.ndarray) -> np.ndarray:
        v = np.empty(n + 1)
        v[0] = v[n] = 1.0
        v[1:n] = interior
        return v

    def system(interior: np.ndarray) -> np.ndarray:
        v = full(interior)
        ode = operator(NodeValues(disc.grid, v))
        return np.concatenate([ode[: n - 2], [d_last @ v - 1.0]])

    if initial_guess is None:
        x0 = np.ones(n - 1)
    else:
        x0 = np.asarray(initial_guess, dtype=float)
        if x0.shape == (n + 1,):
            x0 = x0[1:n]
        if x0.shape != (n - 1,):
            raise DomainError(
                f"initial guess must have N-1 = {n - 1} interior values or N+1 = {n + 1} node values, "
                f"got shape {x0.shape}"
            )
        if problem.kind is Kind.PROBLEM2 and not np.all(x0 > 0):
            raise DomainError("problem 2 initial guess must be positive at every node")

    report = newton_solve(system, x0, cfg)
    values = full(report.solution)
    values.setflags(write=False)
    residuals = np.abs(operator(NodeValues(disc.grid, values)))
    residuals.setflags(write=False)
    return CollocationSolution(
        grid=disc.grid, values=values, residuals=residuals, newton=report, problem=problem
    )


def residual_table(sol: CollocationSolution) -> list:
    """Rows ``(i, |L[value](zeta_i)|)`` for i = 1..N-1."""
    return [(i, float(r)) for i, r in enumerate(sol.residuals, start=1)]


def format_residual(value: float) -> str:
    """Scientific notation with 16 significant digits; exact zero prints as ``0``."""
    if value == 0:
        return "0"
    return f"{value:.15e}"


def residual_table_csv(sol: CollocationSolution) -> str:
    lines = ["i,residual"]
    lines += [f"{i},{format_residual(r)}" for i, r in residual_table(sol)]
    return "\n".join(lines) + "\n"


def derivative_values(sol: CollocationSolution, order: int) -> np.ndarray:
    """Node values of the ``order``-th derivative of the solution's interpolant."""
    d1 = diff_matrix(sol.grid)
    return diff_matrix_power(d1, order).entries @ sol.values if order else np.array(sol.values)


def reduced_residual_at(sol: CollocationSolution, points) -> np.ndarray:
    """Evaluate the solution's own reduced operator at arbitrary points in [-1, 1].

    Derivatives come from interpolating the differentiated node values, so at
    interior nodes this agrees with the collocated residual.
    """
    grid = sol.grid
    derivs = [NodeValues(grid, derivative_values(sol, k)) for k in range(4)]
    problem = sol.problem
    out = []
    for p in np.ravel(points):
        v0, v1, v2, v3 = (interpolate(d, p) for d in derivs)
        out.append(_pointwise(problem, float(p), v0, v1, v2, v3))
    return np.array(out)


def _pointwise(problem: ReducedProblem, r: float, v0: float, v1: float, v2: float, v3: float) -> float:
    if problem.kind is Kind.PROBLEM1:
        return float(_problem1_kernel(problem.variant, r, v0, v1, v3))
    if not v0 > 0:
        raise DomainError(f"interpolated f must be positive, got f({r}) = {v0!r}")
    return float(_problem2_kernel(problem.variant, float(problem.t_param), v0, v1, v2, v3))
