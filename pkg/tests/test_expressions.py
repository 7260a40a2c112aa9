from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose

from meanforge.expressions import MAX, MIN, A, G, H, LeafCache, M, N1, Nested, S, evaluate
from meanforge.means import MeanKind


def at(expr, a, b):
    v, s = evaluate(expr, LeafCache(np.array([a]), np.array([b])))
    return float(v[0]), float(s[0])


class TestRendering:
    def test_infix(self):
        assert ((2 * H + S) / 3).infix() == "(2H + S)/3"
        assert (S + H - G).infix() == "S + H - G"
        assert (Fraction(1, 3) * M("SH")).infix() == "1/3 M_SH"
        assert M("SA").infix() == "M_SA"
        assert Nested(MeanKind.H, A, H).infix() == "H(A, H)"
        assert MIN.infix() == "min(a,b)"

    def test_prefix(self):
        assert ((2 * H + S) / 3).prefix() == "(+ (* 2/3 H) (* 1/3 S))"
        assert M("SA").prefix() == "(- S A)"
        assert Nested(MeanKind.S, A, H).prefix() == "(mean S A H)"
        assert MAX.prefix() == "(max a b)"

    def test_rational_coefficients_only(self):
        with pytest.raises(TypeError):
            0.5 * H


class TestEvaluation:
    def test_affine(self):
        v, s = at((S + 2 * H) / 2, 1.0, 1.0)
        assert v == 1.5 and s == 1.5

    def test_difference_scale(self):
        v, s = at(M("AG"), 1.0, 4.0)
        assert_allclose(v, 0.5, rtol=1e-15)
        assert s == 2.5 + 2.0

    def test_nested(self):
        v, _ = at(Nested(MeanKind.G, A, H), 1.0, 4.0)
        assert_allclose(v, 2.0, rtol=1e-15)  # G(A, H) = G

    def test_extremes(self):
        assert at(MIN, 3.0, 2.0)[0] == 2.0
        assert at(MAX, 3.0, 2.0)[0] == 3.0

    def test_cache_reuse(self):
        cache = LeafCache(np.array([1.0]), np.array([2.0]))
        first = cache[MeanKind.N1]
        assert cache[MeanKind.N1] is first
        assert_allclose(evaluate(N1, cache)[0], first)
