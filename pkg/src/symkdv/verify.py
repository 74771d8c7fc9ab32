"""Self-checks runnable from the command line (``symkdv verify``).

Each suite returns a list of :class:`Check` results; nothing here raises on
a failed property, so a run always reports every line.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from symkdv import field, lie, reductions, spectral


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def spectral_suite(seed: int = 0) -> list:
    out = []
    worst = 0.0
    for n in (8, 16, 20, 32):
        grid = spectral.cgl_nodes(n)
        d = spectral.diff_matrix(grid)
        x = grid.nodes
        for m in range(n + 1):
            deriv = m * x ** (m - 1) if m else np.zeros_like(x)
            worst = max(worst, float(np.max(np.abs(d @ x**m - deriv))))
    out.append(Check("polynomial exactness (N <= 32)", worst <= 1e-8, f"max error {worst:.2e} <= 1e-8"))

    rng = np.random.default_rng(seed)
    worst3 = 0.0
    for n in (8, 20, 32):
        grid = spectral.cgl_nodes(n)
        d3 = spectral.diff_matrix_power(spectral.diff_matrix(grid), 3)
        a = rng.normal(size=4)
        cubic = np.polynomial.polynomial.polyval(grid.nodes, a)
        worst3 = max(worst3, float(np.max(np.abs(d3 @ cubic - 6 * a[3]))))
    out.append(Check("D^3 on cubics", worst3 <= 1e-7, f"max error {worst3:.2e} <= 1e-7"))

    row = max(
        float(np.max(np.abs(spectral.diff_matrix(spectral.cgl_nodes(n)).entries.sum(axis=1))))
        for n in range(1, 65)
    )
    out.append(Check("row sums of D vanish", row <= 1e-12, f"max |row sum| {row:.2e}"))

    mirrored = all(
        np.array_equal(g.nodes, -g.nodes[::-1]) for g in (spectral.cgl_nodes(n) for n in range(1, 65))
    )
    out.append(Check("node antisymmetry", mirrored, "nodes[j] == -nodes[N-j] for N = 1..64"))

    grid = spectral.cgl_nodes(25)
    data = spectral.NodeValues(grid, rng.normal(size=26))
    delta = all(spectral.interpolate(data, z) == v for z, v in zip(grid.nodes, data.values))
    out.append(Check("interpolation delta property", delta, "exact reproduction at all 26 nodes"))
    return out


def lie_suite(seed: int = 0) -> list:
    out = []
    basis = [lie.AlgebraElement.basis(i, exact=True) for i in lie.GENERATORS]
    expected = {
        (1, 2): (0, Fraction(-1, 3), 0),
        (1, 3): (0, 0, Fraction(-7, 6)),
        (2, 3): (0, 0, 0),
    }
    table_ok = all(
        lie.commutator(basis[i - 1], basis[j - 1]).coeffs == v for (i, j), v in expected.items()
    )
    out.append(Check("commutator table", table_ok, "[X1,X2] = -X2/3, [X1,X3] = -7X3/6, [X2,X3] = 0"))

    jacobi = all(
        (
            lie.commutator(X, lie.commutator(Y, Z))
            + lie.commutator(Y, lie.commutator(Z, X))
            + lie.commutator(Z, lie.commutator(X, Y))
        ).is_zero()
        for X, Y, Z in itertools.product(basis, repeat=3)
    )
    out.append(Check("Jacobi identity (exact)", jacobi, "all 27 basis triples"))

    worst = 0.0
    for i, j in itertools.product(lie.GENERATORS, repeat=2):
        for s in np.linspace(-1, 1, 9):
            series = lie.adjoint_lie_series(i, j, s, terms=12).as_array()
            closed = lie.adjoint_closed_form(i, s).entries[:, j - 1]
            worst = max(worst, float(np.max(np.abs(series - closed))))
    out.append(Check("Lie series vs closed form", worst <= 1e-9, f"max deviation {worst:.2e} <= 1e-9"))

    rng = np.random.default_rng(seed)
    bad = 0
    for k in range(1000):
        a = rng.normal(size=3)
        if k % 4 == 0:
            a[0] = 0.0
        red = lie.reduce_to_optimal(lie.AlgebraElement(tuple(a)))
        err = float(np.max(np.abs(red.replay().as_array() - red.representative.as_array())))
        if err > 1e-10:
            bad += 1
    out.append(Check("optimal-system reduction", bad == 0, f"{bad} of 1000 random elements violate the invariant"))
    return out


def reductions_suite(seed: int = 0) -> list:
    out = []
    problems = [reductions.ReducedProblem(reductions.Kind.PROBLEM1, 25)] + [
        reductions.ReducedProblem(reductions.Kind.PROBLEM2, 25, t_param=t) for t in (1.0, 2.0, 3.0)
    ]
    for prob in problems:
        sol = reductions.solve_reduced(prob)
        label = "problem 1" if prob.kind is reductions.Kind.PROBLEM1 else f"problem 2, t = {prob.t_param:g}"
        worst = float(sol.residuals.max())
        out.append(
            Check(
                f"{label}: converged, max residual <= 1e-4",
                sol.converged and worst <= 1e-4,
                f"{sol.newton.summary()}; max residual {worst:.3e} at i = {int(np.argmax(sol.residuals)) + 1}",
            )
        )
        d1 = spectral.diff_matrix(sol.grid)
        bc = abs(float(d1.entries[-1] @ sol.values) - 1.0)
        pinned = sol.values[0] == 1.0 and sol.values[-1] == 1.0
        out.append(Check(f"{label}: boundary conditions", pinned and bc <= 1e-12, f"|g'(-1) - 1| = {bc:.2e}"))
    return out


def field_suite(seed: int = 0) -> list:
    out = []
    xs = np.linspace(-2, 2, 9)
    ts = np.linspace(1, 3, 5)
    for i in lie.GENERATORS:
        worst = 0.0
        for b in (0.0, 1.0, -3.0):
            for eps in (-1.0, -0.5, 0.5, 1.0):
                u = field.transform_solution(field.exact_family(b), [(i, eps)])
                worst = max(worst, max(abs(field.pde_residual(u, x, t)) for x in xs for t in ts))
        out.append(
            Check(
                f"exact family stays a solution under the X{i} flow",
                worst <= 1e-5,
                f"max |PDE residual| {worst:.2e} <= 1e-5",
            )
        )
    return out


SUITES = {
    "spectral": spectral_suite,
    "lie": lie_suite,
    "reductions": reductions_suite,
    "field": field_suite,
}
