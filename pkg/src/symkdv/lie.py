"""The three-dimensional symmetry algebra of the cylindrical KdV equation.

Basis (generator index 1, 2, 3)::

    X1 = (x/3) d_x + t d_t - (2/3) u d_u
    X2 = d_x
    X3 = t^(3/2) d_x + (t^(1/2)/4) d_u

with brackets [X1, X2] = -X2/3, [X1, X3] = -(7/6) X3, [X2, X3] = 0. Elements
are coefficient triples over this basis. The adjoint action follows the Lie
series ``Ad(exp(s Xi)) Y = Y - s[Xi, Y] + s^2/2 [Xi, [Xi, Y]] - ...``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from symkdv.errors import DegenerateElementError, DomainError, InvalidGeneratorError

GENERATORS = (1, 2, 3)

# Nonzero brackets as (numerator, denominator): [X_i, X_j] = (p/q) X_k.
_BRACKETS = {
    (1, 2, 2): (-1, 3),
    (1, 3, 3): (-7, 6),
}


def _build_structure_constants():
    table = [[[Fraction(0)] * 3 for _ in range(3)] for _ in range(3)]
    for (i, j, k), (p, q) in _BRACKETS.items():
        table[i - 1][j - 1][k - 1] = Fraction(p, q)
        table[j - 1][i - 1][k - 1] = -Fraction(p, q)
    return tuple(tuple(tuple(row) for row in plane) for plane in table)


#: ``STRUCTURE_CONSTANTS[i][j][k]`` (zero based) is the X_k coefficient of [X_i, X_j].
STRUCTURE_CONSTANTS = _build_structure_constants()


def structure_constant(i: int, j: int, k: int) -> Fraction:
    """C[i][j][k] with one-based generator indices."""
    for idx in (i, j, k):
        _check_generator(idx)
    return STRUCTURE_CONSTANTS[i - 1][j - 1][k - 1]


def _check_generator(i) -> int:
    if isinstance(i, bool) or i not in GENERATORS:
        raise InvalidGeneratorError(f"generator index must be one of 1, 2, 3, got {i!r}")
    return int(i)


@dataclass(frozen=True)
class AlgebraElement:
    """``a1 X1 + a2 X2 + a3 X3``; coefficients may be floats or Fractions."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if len(coeffs) != 3:
            raise DomainError(f"an algebra element needs exactly 3 coefficients, got {len(coeffs)}")
        for a in coeffs:
            if not isinstance(a, Fraction) and not math.isfinite(float(a)):
                raise DomainError(f"coefficients must be finite reals, got {coeffs!r}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def basis(cls, i: int, exact: bool = False) -> "AlgebraElement":
        _check_generator(i)
        one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
        return cls(tuple(one if k == i else zero for k in GENERATORS))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, scalar) -> "AlgebraElement":
        return AlgebraElement(tuple(scalar * a for a in self.coeffs))

    __rmul__ = __mul__

    def __neg__(self) -> "AlgebraElement":
        return self * -1

    def as_array(self) -> np.ndarray:
        return np.array([float(a) for a in self.coeffs])

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coeffs)


def commutator(X: AlgebraElement, Y: AlgebraElement) -> AlgebraElement:
    """Lie bracket, by bilinear extension of the structure constants.

    Exact when both arguments hold Fractions.
    """
    out = [0, 0, 0]
    for i, a in enumerate(X.coeffs):
        if a == 0:
            continue
        for j, b in enumerate(Y.coeffs):
            if b == 0:
                continue
            for k in range(3):
                c = STRUCTURE_CONSTANTS[i][j][k]
                if c:
                    out[k] = out[k] + a * b * (c if _is_exact(a, b) else float(c))
    return AlgebraElement(tuple(out))


def _is_exact(*values) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


@dataclass(frozen=True, eq=False)
class AdjointMatrix:
    """Matrix of ``Ad(exp(eps X_i))`` acting on column coefficient vectors."""

    generator: int
    eps: float
    entries: np.ndarray

    def apply(self, X: AlgebraElement) -> AlgebraElement:
        return AlgebraElement(tuple(float(v) for v in self.entries @ X.as_array()))

    def __matmul__(self, other: "AdjointMatrix") -> np.ndarray:
        return self.entries @ other.entries


def adjoint_closed_form(i: int, eps: float) -> AdjointMatrix:
    """Closed-form sum of the adjoint Lie series for generator ``X_i``.

    X1 acts diagonally (it is ad-semisimple); X2 and X3 are ad-nilpotent so
    their series stop after the linear term:

    - ``i = 1``: a2 -> exp(eps/3) a2, a3 -> exp(7 eps/6) a3
    - ``i = 2``: a2 -> a2 - (eps/3) a1
    - ``i = 3``: a3 -> a3 - (7 eps/6) a1
    """
    i = _check_generator(i)
    eps = float(eps)
    m = np.eye(3)
    if i == 1:
        # Y = X_j is an eigenvector of ad X1 with eigenvalue C[1][j][j].
        for j in (2, 3):
            m[j - 1, j - 1] = math.exp(-eps * float(STRUCTURE_CONSTANTS[0][j - 1][j - 1]))
    else:
        # Ad(exp(eps X_i)) X1 = X1 - eps [X_i, X1]; every other basis vector commutes with X_i.
        m[i - 1, 0] = -eps * float(STRUCTURE_CONSTANTS[i - 1][0][i - 1])
    m.setflags(write=False)
    return AdjointMatrix(generator=i, eps=eps, entries=m)


def adjoint_lie_series(i: int, j: int, s: float, terms: int = 12) -> AlgebraElement:
    """Partial sum of ``sum_k (-s)^k / k! ad(X_i)^k X_j`` over ``terms`` terms."""
    _check_generator(i)
    _check_generator(j)
    if isinstance(terms, bool) or int(terms) != terms or terms < 1:
        raise DomainError(f"terms must be an integer >= 1, got {terms!r}")
    Xi = AlgebraElement.basis(i)
    term = AlgebraElement.basis(j)
    total = term
    for k in range(1, int(terms)):
        term = commutator(Xi, term) * (-float(s) / k)
        total = total + term
    return total


@dataclass(frozen=True)
class OptimalReduction:
    """Result of mapping an element onto the one-dimensional optimal system.

    Applying ``chain`` in order (first entry first) and then multiplying by
    ``scale`` sends ``input`` to ``representative``.
    """

    input: AlgebraElement
    representative: AlgebraElement
    chain: tuple = field(default_factory=tuple)
    scale: float = 1.0

    @property
    def case(self) -> int:
        """1 for the family <a X2 + b X3>, 2 for <X1>."""
        return 2 if self.representative.coeffs[0] != 0 else 1

    def replay(self) -> AlgebraElement:
        v = self.input.as_array()
        for gen, param in self.chain:
            v = adjoint_closed_form(gen, param).entries @ v
        return AlgebraElement(tuple(float(a) for a in self.scale * v))


def reduce_to_optimal(X: AlgebraElement, tol: float = 1e-12) -> OptimalReduction:
    """Find the optimal-system representative conjugate to ``<X>``.

    If ``|a1| > tol`` the X2 and X3 components are eliminated with
    ``Ad(exp(s X2))``, ``s = 3 a2 / a1`` and ``Ad(exp(s X3))``,
    ``s = 6 a3 / (7 a1)``, and the result is scaled to ``(1, 0, 0)``.
    Otherwise the element already lies in span{X2, X3} (a subspace fixed by
    the adjoint group up to scaling) and is normalised so that its
    largest-magnitude coefficient is 1 and its first nonzero one is positive.
    Zero-parameter steps are omitted from the chain.
    """
    a1, a2, a3 = (float(a) for a in X.coeffs)
    if max(abs(a1), abs(a2), abs(a3)) <= tol:
        raise DegenerateElementError(
            f"cannot reduce the zero element: all coefficients of {X.coeffs!r} are below tol = {tol}"
        )
    if abs(a1) > tol:
        chain = []
        if a2 != 0.0:
            chain.append((2, 3.0 * a2 / a1))
        if a3 != 0.0:
            chain.append((3, 6.0 * a3 / (7.0 * a1)))
        return OptimalReduction(
            input=X,
            representative=AlgebraElement((1.0, 0.0, 0.0)),
            chain=tuple(chain),
            scale=1.0 / a1,
        )

    # a1 is numerically zero: drop it, flush sub-tol noise and normalise the rest.
    a2, a3 = (a if abs(a) > tol else 0.0 for a in (a2, a3))
    biggest = a2 if abs(a2) >= abs(a3) else a3
    scale = 1.0 / abs(biggest)
    leading = a2 if a2 != 0.0 else a3
    if leading < 0:
        scale = -scale
    rep = [0.0, a2 * scale, a3 * scale]
    # Pin the dominant coefficient so it is exactly +-1 despite rounding.
    k = 1 if abs(a2) >= abs(a3) else 2
    rep[k] = math.copysign(1.0, rep[k])
    return OptimalReduction(
        input=X,
        representative=AlgebraElement(tuple(rep)),
        chain=(),
        scale=scale,
    )


# --- point transformations -------------------------------------------------


def generator_field(i: int, p: Sequence[float]) -> tuple:
    """Coefficients (xi, tau, phi) of ``X_i`` at the point ``p = (x, t, u)``."""
    i = _check_generator(i)
    x, t, u = (float(v) for v in p)
    if i == 1:
        return (x / 3.0, t, -2.0 * u / 3.0)
    if i == 2:
        return (1.0, 0.0, 0.0)
    if t < 0:
        raise DomainError(f"X3 needs t >= 0 (t^(3/2) must be real), got t = {t}")
    return (t * math.sqrt(t), 0.0, math.sqrt(t) / 4.0)


@dataclass(frozen=True)
class PointFlow:
    """One-parameter group ``exp(eps X_i)`` acting on (x, t, u)."""

    generator: int
    eps: float

    def __call__(self, p: Sequence[float]) -> tuple:
        return flow(self.generator, self.eps, p)

    def inverse(self) -> "PointFlow":
        return PointFlow(self.generator, -self.eps)


def flow(i: int, eps: float, p: Sequence[float]) -> tuple:
    """Closed-form image of ``p = (x, t, u)`` under ``exp(eps X_i)``."""
    i = _check_generator(i)
    eps = float(eps)
    x, t, u = (float(v) for v in p)
    if i == 1:
        return (math.exp(eps / 3.0) * x, math.exp(eps) * t, math.exp(-2.0 * eps / 3.0) * u)
    if i == 2:
        return (x + eps, t, u)
    if t < 0:
        raise DomainError(f"the X3 flow needs t >= 0, got t = {t}")
    root = math.sqrt(t)
    return (x + eps * t * root, t, u + eps * root / 4.0)
