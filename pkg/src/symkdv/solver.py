"""Damped Newton iteration with forward-difference Jacobians."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from symkdv.errors import DimensionError, DomainError

ResidualFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class NewtonConfig:
    """Settings for :func:`newton_solve`.

    Convergence is declared when the residual max-norm drops to ``abs_tol``,
    or when a full Newton correction is no larger than
    ``step_tol * (1 + max|x|)``. The second test is what stops the iteration
    once the residual sits on its rounding floor, which for collocated
    third-order operators is far above 1e-12.
    """

    max_iters: int = 50
    abs_tol: float = 1e-12
    step_tol: float = 1e-12
    fd_step: float = 1e-7
    backtracking: bool = True
    max_halvings: int = 20
    positivity_guard: Optional[Callable[[np.ndarray], bool]] = None

    def __post_init__(self):
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise DomainError(f"max_iters must be an integer >= 1, got {self.max_iters!r}")
        for name in ("abs_tol", "step_tol", "fd_step"):
            value = getattr(self, name)
            if not value > 0:
                raise DomainError(f"{name} must be positive, got {value!r}")
        if self.max_halvings < 0:
            raise DomainError(f"max_halvings must be >= 0, got {self.max_halvings!r}")


@dataclass
class NewtonReport:
    solution: np.ndarray
    iterations: int
    final_residual_norm: float
    converged: bool
    step_history: list = field(default_factory=list)
    singular_jacobian: bool = False
    reason: str = ""

    def summary(self) -> str:
        state = "converged" if self.converged else "NOT converged"
        return (
            f"{state} after {self.iterations} iterations, "
            f"|F|_max = {self.final_residual_norm:.3e} ({self.reason})"
        )


def fd_jacobian(residual_fn: ResidualFn, x: np.ndarray, fx: np.ndarray, fd_step: float) -> np.ndarray:
    """Forward-difference Jacobian; column j uses step ``fd_step * max(1, |x_j|)``."""
    m = x.size
    jac = np.empty((fx.size, m))
    for j in range(m):
        h = fd_step * max(1.0, abs(x[j]))
        xp = x.copy()
        xp[j] += h
        # Use the representable step actually taken.
        h = xp[j] - x[j]
        jac[:, j] = (np.asarray(residual_fn(xp), dtype=float) - fx) / h
    return jac


def _max_norm(v: np.ndarray) -> float:
    return float(np.max(np.abs(v))) if v.size else 0.0


def newton_solve(residual_fn: ResidualFn, x0, cfg: NewtonConfig | None = None) -> NewtonReport:
    """Solve the square system ``residual_fn(x) = 0`` starting from ``x0``.

    Non-convergence is reported, never raised: the returned report carries the
    last accepted iterate, the residual history and a short reason. A
    dimension mismatch between input and output is a hard error.
    """
    cfg = cfg or NewtonConfig()
    x = np.array(x0, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise DomainError(f"initial guess must be finite, got {x0!r}")
    fx = np.asarray(residual_fn(x), dtype=float).ravel()
    if fx.size != x.size:
        raise DimensionError(
            f"residual_fn must be square: input has dimension {x.size}, output {fx.size}"
        )
    norm = _max_norm(fx)
    history = [norm]
    guard = cfg.positivity_guard

    def report(it, converged, reason, singular=False):
        return NewtonReport(
            solution=x,
            iterations=it,
            final_residual_norm=norm,
            converged=converged,
            step_history=history,
            singular_jacobian=singular,
            reason=reason,
        )

    if not np.isfinite(norm):
        return report(0, False, "non-finite residual at the initial guess")

    for it in range(cfg.max_iters + 1):
        if norm <= cfg.abs_tol:
            return report(it, True, "residual below abs_tol")
        if it == cfg.max_iters:
            break

        jac = fd_jacobian(residual_fn, x, fx, cfg.fd_step)
        try:
            step = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError:
            return report(it, False, "singular Jacobian", singular=True)
        if not np.all(np.isfinite(step)):
            return report(it, False, "singular Jacobian", singular=True)

        if _max_norm(step) <= cfg.step_tol * (1.0 + _max_norm(x)):
            return report(it, True, "Newton correction below step_tol")

        lam = 1.0
        accepted = False
        for _ in range(cfg.max_halvings + 1):
            trial = x + lam * step
            if guard is None or guard(trial):
                f_trial = np.asarray(residual_fn(trial), dtype=float).ravel()
                n_trial = _max_norm(f_trial)
                if np.isfinite(n_trial) and (not cfg.backtracking or n_trial < norm):
                    accepted = True
                    break
            if not cfg.backtracking and guard is None:
                break
            lam *= 0.5
        if not accepted:
            return report(it, False, "line search failed to reduce the residual")
        x, fx, norm = trial, f_trial, n_trial
        history.append(norm)

    return report(cfg.max_iters, False, f"max_iters = {cfg.max_iters} reached")
