from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose

from meanforge.convexity import GridSpec
from meanforge.means import DomainError, PreconditionError
from meanforge.ratios import (
    PUBLISHED_PAIRS,
    DerivedInequality,
    Pattern,
    RatioPair,
    derive_inequality,
    golden_section,
    profile,
    ratio_value,
    render_constant,
    verify_derived,
)
from meanforge.sampling import SamplingSpec

# g at x = 0.5 and x = 3 from the mpmath oracle (ratio of numerical second derivatives)
ORACLE_G = {
    ("SA", "SH"): (0.299183716444795121, 0.26349871146785132),
    ("SH", "AH"): (1.42690748412273121, 1.35777087639996635),
    ("SG", "AH"): (1.02352883074888068, 1.12757123531946737),
    ("SG", "AG"): (1.7155417527999327, 1.46475800154489003),
    ("AH", "N2N1"): (6.99810137503965212, 5.7437332342385536),
    ("N2N1", "N2G"): (0.323875275655700599, 0.311452356745722424),
    ("N2G", "AG"): (0.739508528526147576, 0.726166162789917833),
    ("AG", "AN2"): (3.83889727499342664, 3.65184964060088569),
    ("SA", "SN2"): (0.733112085741066451, 0.629248763875217244),
    ("SN2", "AN2"): (3.74689128496768176, 2.69722634090809252),
    ("SH", "SN1"): (1.96755620290579475, 1.82822646134796412),
    ("SN1", "SG"): (0.708546877868783507, 0.658646684658730884),
    ("SA", "SN3"): (0.682199207760588107, 0.582336859497171527),
    ("SN3", "SN1"): (0.862886925699788357, 0.827245105612206011),
}
ORACLE_G1 = {k: v for k, v in zip(ORACLE_G, (1 / 3, 1.5, 1, 2, 8, 1 / 3, 0.75, 4, 0.8, 5, 2, 0.75, 0.75, 8 / 9))}


class TestRatioValue:
    @pytest.mark.parametrize("key", list(ORACLE_G))
    def test_against_oracle(self, key):
        pair = RatioPair(*key)
        assert_allclose(ratio_value(pair, np.array([0.5, 3.0])), ORACLE_G[key], rtol=1e-12)
        assert_allclose(ratio_value(pair, 1.0), ORACLE_G1[key], rtol=1e-14)

    def test_chain_only_rejected(self):
        with pytest.raises(PreconditionError):
            RatioPair("N2H", "AG")


class TestGoldenSection:
    def test_parabola(self):
        x, fx = golden_section(lambda t: (t - 0.3) ** 2, -1, 2, width=1e-12)
        assert abs(x - 0.3) < 1e-7 and fx < 1e-14

    def test_maximize(self):
        x, fx = golden_section(lambda t: -abs(t - 1.25), 0, 3, maximize=True)
        assert abs(x - 1.25) < 1e-11 and abs(fx) < 1e-11


class TestProfile:
    def test_peak(self):
        prof = profile(RatioPair("SA", "SH"))
        assert prof.pattern is Pattern.PEAK
        assert abs(prof.sup_location - 1.0) < 1e-12
        assert_allclose(prof.sup, 1 / 3, atol=1e-12)

    def test_valley(self):
        prof = profile(RatioPair("SG", "AH"))
        assert prof.pattern is Pattern.VALLEY
        assert_allclose(prof.inf, 1.0, atol=1e-12)

    def test_grid_must_straddle_one(self):
        with pytest.raises(DomainError):
            profile(RatioPair("SA", "SH"), GridSpec(2, 10, 50))

    def test_other_pattern_on_reversed_pair(self):
        # inverting a peak gives a valley
        assert profile(RatioPair("SH", "SA")).pattern is Pattern.VALLEY


class TestRenderConstant:
    @pytest.mark.parametrize("c,text", [(1 / 3, "1/3"), (1.5, "3/2"), (8.0, "8"), (0.646447139, "0.646447139"),
                                        (62500187.67696472, "62500187.7")])
    def test_render(self, c, text):
        assert render_constant(c) == text


class TestDerived:
    def test_statement_peak(self):
        assert derive_inequality(RatioPair("SA", "SH")).statement() == "M_SA ≤ (1/3) M_SH"

    def test_statement_valley(self):
        assert derive_inequality(RatioPair("SG", "AH")).statement() == "M_AH ≤ M_SG"

    def test_invalid_constants(self):
        with pytest.raises(DomainError):
            DerivedInequality(RatioPair("SA", "SH"), 2.0, 1.0, "upper")

    def test_verified_by_sampling(self):
        spec = SamplingSpec(count=20_000, seed=3)
        for pc in PUBLISHED_PAIRS:
            rep = verify_derived(derive_inequality(pc.pair), spec)
            assert rep.holds, pc.pair.label

    def test_diagonal_margins_vanish(self):
        spec = SamplingSpec(count=500, ratio_min=1.0, ratio_max=1.0 + 1e-12, include_edge_cases=False)
        for pc in PUBLISHED_PAIRS:
            rep = verify_derived(derive_inequality(pc.pair), spec)
            assert rep.holds
            assert abs(rep.worst_margin) < 1e-12

    def test_zero_homogeneous(self):
        from meanforge.generating import difference_values

        # second differences of M(1, x) and M(s, s x) share the same ratio
        pair = RatioPair("SA", "SH")
        x, h = 2.5, 1e-3
        for s in (1e-3, 1.0, 1e3):
            def second(kind):
                f = lambda t: difference_values(kind, s, s * t)  # noqa: E731
                return (f(x + h) - 2 * f(x) + f(x - h)) / h**2
            assert_allclose(second(pair.numerator) / second(pair.denominator), ratio_value(pair, x), rtol=1e-5)

    def test_tightened_constant_is_refuted(self):
        ineq = derive_inequality(RatioPair("SA", "SH"))
        tighter = DerivedInequality(ineq.pair, ineq.alpha, ineq.beta * (1 - 1e-3), "upper")
        assert not verify_derived(tighter, SamplingSpec(count=5_000, seed=1)).holds


class TestPublishedTable:
    def test_fourteen(self):
        assert len(PUBLISHED_PAIRS) == 14
        assert PUBLISHED_PAIRS[-1].constant == Fraction(8, 9)

    def test_flagged_entries_have_notes(self):
        notes = {pc.pair.label: pc.note for pc in PUBLISHED_PAIRS if pc.note}
        assert "SN2/AN2" in notes and "SN3/SN1" in notes
