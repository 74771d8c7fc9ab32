import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from symkdv.errors import DegenerateElementError, DomainError, InvalidGeneratorError
from symkdv.lie import (
    STRUCTURE_CONSTANTS,
    AlgebraElement,
    PointFlow,
    adjoint_closed_form,
    adjoint_lie_series,
    commutator,
    flow,
    generator_field,
    reduce_to_optimal,
    structure_constant,
)

E = [AlgebraElement.basis(i) for i in (1, 2, 3)]
EXACT = [AlgebraElement.basis(i, exact=True) for i in (1, 2, 3)]
reals = st.floats(min_value=-10, max_value=10, allow_nan=False)
triples = st.tuples(reals, reals, reals).map(AlgebraElement)


def ad_matrix(i):
    """ad(X_i) on column coefficient vectors, straight from the structure constants."""
    m = np.zeros((3, 3))
    for j in range(3):
        for k in range(3):
            m[k, j] = float(STRUCTURE_CONSTANTS[i - 1][j][k])
    return m


class TestStructureConstants:
    def test_nonzero_entries(self):
        assert structure_constant(1, 2, 2) == Fraction(-1, 3)
        assert structure_constant(1, 3, 3) == Fraction(-7, 6)
        assert structure_constant(2, 1, 2) == Fraction(1, 3)
        assert structure_constant(3, 1, 3) == Fraction(7, 6)
        nonzero = [
            (i, j, k)
            for i, j, k in itertools.product((1, 2, 3), repeat=3)
            if structure_constant(i, j, k) != 0
        ]
        assert sorted(nonzero) == [(1, 2, 2), (1, 3, 3), (2, 1, 2), (3, 1, 3)]

    def test_antisymmetry(self):
        for i, j, k in itertools.product(range(3), repeat=3):
            assert STRUCTURE_CONSTANTS[i][j][k] == -STRUCTURE_CONSTANTS[j][i][k]

    def test_bad_index(self):
        with pytest.raises(InvalidGeneratorError):
            structure_constant(0, 1, 2)


class TestCommutator:
    def test_table(self):
        assert commutator(EXACT[0], EXACT[1]).coeffs == (0, Fraction(-1, 3), 0)
        assert commutator(EXACT[0], EXACT[2]).coeffs == (0, 0, Fraction(-7, 6))
        assert commutator(EXACT[1], EXACT[2]).is_zero()

    def test_float_inputs(self):
        assert commutator(E[0], E[1]).coeffs == pytest.approx((0, -1 / 3, 0))
        assert commutator(E[0], E[2]).coeffs == pytest.approx((0, 0, -7 / 6))

    def test_jacobi_exact(self):
        for X, Y, Z in itertools.product(EXACT, repeat=3):
            total = commutator(X, commutator(Y, Z)) + commutator(Y, commutator(Z, X)) + commutator(Z, commutator(X, Y))
            assert total.is_zero()

    @given(triples)
    def test_alternating(self, X):
        assert commutator(X, X).as_array() == pytest.approx(np.zeros(3), abs=1e-9)

    @given(triples, triples)
    def test_antisymmetric(self, X, Y):
        assert commutator(X, Y).as_array() == pytest.approx(-commutator(Y, X).as_array(), abs=1e-9)

    def test_rejects_bad_element(self):
        with pytest.raises(DomainError):
            AlgebraElement((1.0, 2.0))
        with pytest.raises(DomainError):
            AlgebraElement((1.0, math.inf, 0.0))


class TestAdjoint:
    def test_identity_at_zero(self):
        for i in (1, 2, 3):
            assert np.array_equal(adjoint_closed_form(i, 0.0).entries, np.eye(3))

    def test_x1_scales_x2(self):
        for eps in (-1.3, 0.4, 2.0):
            img = adjoint_closed_form(1, eps).apply(E[1])
            assert img.coeffs == pytest.approx((0, math.exp(eps / 3), 0), rel=1e-15)

    def test_x2_on_x1(self):
        img = adjoint_closed_form(2, 0.9).apply(E[0])
        assert img.coeffs == pytest.approx((1, -0.3, 0), rel=1e-15)

    def test_x3_on_x1(self):
        # Ad(exp(eps X3)) X1 = X1 - eps [X3, X1] = X1 - (7 eps / 6) X3
        img = adjoint_closed_form(3, 0.6).apply(E[0])
        assert img.coeffs == pytest.approx((1, 0, -0.7), rel=1e-15)

    @pytest.mark.parametrize("i", [1, 2, 3])
    @pytest.mark.parametrize("eps", [-2.0, -0.5, 0.3, 1.7])
    def test_matches_matrix_exponential(self, i, eps):
        # Ad(exp(eps X)) = exp(-eps ad X) for the series with alternating signs.
        oracle = scipy.linalg.expm(-eps * ad_matrix(i))
        assert np.allclose(adjoint_closed_form(i, eps).entries, oracle, rtol=1e-13, atol=1e-14)

    @pytest.mark.parametrize("i", [1, 2, 3])
    def test_determinant_positive(self, i):
        for eps in np.linspace(-5, 5, 21):
            assert np.linalg.det(adjoint_closed_form(i, eps).entries) > 0

    @pytest.mark.parametrize("i", [1, 2, 3])
    def test_group_law(self, i):
        for a, b in [(0.3, -1.1), (2.0, 0.5), (-0.7, -0.7)]:
            lhs = adjoint_closed_form(i, a) @ adjoint_closed_form(i, b)
            rhs = adjoint_closed_form(i, a + b).entries
            assert np.max(np.abs(lhs - rhs)) <= 1e-12

    @pytest.mark.parametrize("i", [1, 2, 3])
    def test_preserves_bracket(self, i):
        for eps in np.linspace(-1, 1, 9):
            ad = adjoint_closed_form(i, eps)
            for Y, Z in itertools.product(E, repeat=2):
                lhs = ad.apply(commutator(Y, Z)).as_array()
                rhs = commutator(ad.apply(Y), ad.apply(Z)).as_array()
                assert np.max(np.abs(lhs - rhs)) <= 1e-10

    def test_invalid_generator(self):
        with pytest.raises(InvalidGeneratorError):
            adjoint_closed_form(4, 1.0)


class TestLieSeries:
    def test_commuting_pair_collapses(self):
        for s in (-3.0, 0.5, 10.0):
            assert adjoint_lie_series(2, 3, s).coeffs == (0.0, 0.0, 1.0)

    def test_exponential_partial_sum(self):
        got = adjoint_lie_series(1, 2, 1.0, terms=12).as_array()
        assert got == pytest.approx([0, math.exp(1 / 3), 0], abs=1e-9)

    def test_nilpotent_series_terminates(self):
        two = adjoint_lie_series(3, 1, 0.8, terms=2)
        for terms in (3, 5, 12):
            assert adjoint_lie_series(3, 1, 0.8, terms=terms) == two

    def test_terms_must_be_positive(self):
        with pytest.raises(DomainError):
            adjoint_lie_series(1, 2, 1.0, terms=0)

    @pytest.mark.parametrize("i,j", list(itertools.product((1, 2, 3), repeat=2)))
    def test_converges_to_closed_form(self, i, j):
        # 20 terms: the remainder of exp(7/6) is then below 1e-16.
        for s in np.linspace(-1, 1, 9):
            series = adjoint_lie_series(i, j, s, terms=20).as_array()
            assert np.max(np.abs(series - adjoint_closed_form(i, s).entries[:, j - 1])) <= 1e-14

    def test_twelve_term_remainder_for_x3_eigenvalue(self):
        # The (1, 3) pair is exp(7s/6); twelve terms leave the exponential-series tail.
        tail = math.exp(7 / 6) - sum((7 / 6) ** k / math.factorial(k) for k in range(12))
        series = adjoint_lie_series(1, 3, 1.0, terms=12).coeffs[2]
        assert math.exp(7 / 6) - series == pytest.approx(tail, rel=1e-6)


class TestOptimalSystem:
    def test_x1_is_its_own_representative(self):
        red = reduce_to_optimal(AlgebraElement((1.0, 0.0, 0.0)))
        assert red.representative.coeffs == (1.0, 0.0, 0.0)
        assert red.chain == ()
        assert red.case == 2

    def test_pure_x2(self):
        red = reduce_to_optimal(AlgebraElement((0.0, 2.0, 0.0)))
        assert red.representative.coeffs == (0.0, 1.0, 0.0)
        assert red.scale == 0.5
        assert red.case == 1

    def test_eliminate_x2(self):
        red = reduce_to_optimal(AlgebraElement((1.0, 1.0, 0.0)))
        assert red.representative.coeffs == (1.0, 0.0, 0.0)
        assert red.chain == ((2, 3.0),)

    def test_eliminate_both(self):
        X = AlgebraElement((2.0, -1.0, 3.5))
        red = reduce_to_optimal(X)
        assert [g for g, _ in red.chain] == [2, 3]
        assert red.replay().coeffs == pytest.approx((1.0, 0.0, 0.0), abs=1e-12)

    def test_negative_leading_sign_flipped(self):
        red = reduce_to_optimal(AlgebraElement((0.0, -0.5, 2.0)))
        assert red.representative.coeffs == pytest.approx((0.0, 0.25, -1.0))
        red = reduce_to_optimal(AlgebraElement((0.0, 0.0, -4.0)))
        assert red.representative.coeffs == (0.0, 0.0, 1.0)

    def test_zero_rejected(self):
        with pytest.raises(DegenerateElementError):
            reduce_to_optimal(AlgebraElement((0.0, 1e-14, 0.0)))

    @given(triples)
    def test_invariant_and_shape(self, X):
        if max(abs(a) for a in X.coeffs) <= 1e-6:
            return
        red = reduce_to_optimal(X)
        rep = red.representative.coeffs
        assert np.max(np.abs(red.replay().as_array() - np.array(rep))) <= 1e-8
        if abs(X.coeffs[0]) > 1e-12:
            assert rep == (1.0, 0.0, 0.0)
        else:
            assert rep[0] == 0.0
            assert max(abs(rep[1]), abs(rep[2])) == 1.0
            leading = rep[1] if rep[1] != 0 else rep[2]
            assert leading > 0


POINTS = [(x, t, u) for x in (-1.0, 0.5, 2.0) for t in (0.5, 1.5, 4.0) for u in (-1.0, 0.0, 2.0)]


class TestFlows:
    def test_translation(self):
        assert flow(2, 5.0, (0, 1, 7)) == (5.0, 1.0, 7.0)

    def test_scaling(self):
        assert flow(1, 3.0, (1, 1, 1)) == pytest.approx((math.e, math.e**3, math.exp(-2)), rel=1e-15)

    def test_x3(self):
        assert flow(3, 2.0, (0, 4, 0)) == (16.0, 4.0, 1.0)

    def test_x3_negative_time(self):
        with pytest.raises(DomainError):
            flow(3, 1.0, (0.0, -1.0, 0.0))

    @pytest.mark.parametrize("i", [1, 2, 3])
    def test_tangent_is_generator(self, i):
        h = 1e-5
        for p in POINTS:
            fd = (np.array(flow(i, h, p)) - np.array(flow(i, -h, p))) / (2 * h)
            assert np.max(np.abs(fd - np.array(generator_field(i, p)))) <= 1e-8

    @pytest.mark.parametrize("i", [1, 2, 3])
    def test_group_law(self, i):
        for a, b in [(0.4, -1.0), (1.0, 1.0), (-0.3, 0.25)]:
            for p in POINTS:
                composed = flow(i, b, flow(i, a, p))
                assert np.max(np.abs(np.subtract(composed, flow(i, a + b, p)))) <= 1e-12

    def test_inverse(self):
        f = PointFlow(1, 0.7)
        p = (0.3, 2.0, -1.5)
        assert f.inverse()(f(p)) == pytest.approx(p, rel=1e-15)
