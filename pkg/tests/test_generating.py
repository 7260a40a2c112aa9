import numpy as np
import pytest
from numpy.testing import assert_allclose

from meanforge.generating import (
    CONVEX_KINDS,
    IDENTITY_LABELS,
    DifferenceKind,
    difference,
    difference_values,
    generating_function,
    identity_residuals,
    phi,
)
from meanforge.means import DomainError, MeanKind, PositivePair, mean

# (f, f', f'') at x = 0.3 and x = 4, by mpmath differentiation of X(1,x) - Y(1,x)
ORACLE = {
    "SA": ((0.088241153011670028777, -0.296814361556421093, 0.62136280869595996025),
           (0.41547594742265023544, 0.18599434057003534951, 0.010088152067206402199)),
    "SN3": ((0.12233363384328132429, -0.43443800461484671158, 1.1285133249044471023),
            (0.5821426140893169021, 0.26932767390336868285, 0.020504818733873068865)),
    "SN2": ((0.11433424393854637479, -0.40476859345076996348, 1.0439041984486549714),
            (0.54376770229636573644, 0.25118116229688319136, 0.01898205798642996907)),
    "SN1": ((0.13937987425908697205, -0.50324982614405952088, 1.3820885830086906734),
            (0.66547594742265023544, 0.31099434057003534951, 0.025713152067206402199)),
    "SG": ((0.19051859550650391532, -0.70968529073169794876, 2.1428143573214213865),
           (0.91547594742265023544, 0.43599434057003534951, 0.041338152067206402199)),
    "SH": ((0.27670269147320849032, -0.98024631421914298649, 2.4420273512539936425),
           (1.3154759474226502354, 0.60599434057003534951, 0.042088152067206402199)),
    "AN2": ((0.026093090926876346013, -0.10795423189434887048, 0.42254138975269501118),
            (0.128291754873715501, 0.06518682172684784185, 0.0088939059192235668712)),
    "AG": ((0.10227744249483388654, -0.41287092917527685576, 1.5214515486254614263),
           (0.5, 0.25, 0.03125)),
    "AH": ((0.18846153846153846154, -0.68343195266272189349, 1.8206645425580336823),
           (0.9, 0.42, 0.032)),
    "N2N1": ((0.025045630320540597259, -0.098481232693289557399, 0.33818438456003570195),
             (0.121708245126284499, 0.05981317827315215815, 0.0067310940807764331288)),
    "N2G": ((0.07618435156795754053, -0.30491669728092798528, 1.0989101588727664151),
            (0.371708245126284499, 0.18481317827315215815, 0.022356094080776433129)),
}


class TestClosedForms:
    def test_eleven_convex_kinds(self):
        assert {k.value for k in CONVEX_KINDS} == set(ORACLE)
        assert all(k.has_closed_forms for k in CONVEX_KINDS)
        assert sum(k.has_closed_forms for k in DifferenceKind) == 11

    @pytest.mark.parametrize("tag", sorted(ORACLE))
    def test_against_oracle(self, tag):
        gf = generating_function(tag)
        for x, expected in zip((0.3, 4.0), ORACLE[tag]):
            got = (gf.f(x), gf.f1(x), gf.f2(x))
            assert_allclose(got, expected, rtol=1e-13, err_msg=f"{tag} at {x}")

    @pytest.mark.parametrize("kind", CONVEX_KINDS)
    def test_vanish_at_one(self, kind):
        gf = generating_function(kind)
        assert abs(gf.f(1.0)) <= 1e-15
        assert abs(gf.f1(1.0)) <= 1e-15
        assert gf.f2(1.0) > 0

    @pytest.mark.parametrize("kind", CONVEX_KINDS)
    def test_closed_form_matches_mean_difference(self, kind):
        # errors are measured against the size of the means, max(1, x)
        x = np.logspace(-8, 8, 4001)
        gf = generating_function(kind)
        route = difference_values(kind, np.ones_like(x), x)
        assert np.all(np.abs(gf.f(x) - route) <= 1e-12 * np.maximum(1, x))

    def test_repaired_n2g_profile(self):
        # the defining difference has -4 sqrt(x); a linear -4x term would not vanish to second order
        gf = generating_function("N2G")
        assert_allclose(gf.f(4.0), 0.371708245126284499, rtol=1e-14)

    def test_repaired_an2_slope(self):
        gf = generating_function("AN2")
        assert_allclose(gf.f1(4.0), 0.06518682172684784185, rtol=1e-14)


class TestChainOnlyKinds:
    def test_profile_only(self):
        gf = generating_function("N2H")
        assert gf.f1 is None and gf.f2 is None and not gf.has_closed_forms
        assert_allclose(gf.f(4.0), difference(DifferenceKind.N2H, PositivePair(1, 4)), rtol=1e-15)

    def test_parse(self):
        assert DifferenceKind.parse("n2g") is DifferenceKind.N2G
        with pytest.raises(DomainError):
            DifferenceKind.parse("XY")

    def test_upper_lower(self):
        assert DifferenceKind.N3N1.upper is MeanKind.N3
        assert DifferenceKind.N3N1.lower is MeanKind.N1


class TestPhi:
    @pytest.mark.parametrize("kind", list(DifferenceKind))
    def test_homogeneous_representation(self, kind):
        p = PositivePair(2.5, 7.0)
        gf = generating_function(kind)
        assert_allclose(phi(gf, p), difference(kind, p), rtol=1e-12, atol=1e-15)

    def test_difference_is_upper_minus_lower(self):
        p = PositivePair(1, 2)
        assert difference(DifferenceKind.SA, p) == mean(MeanKind.S, p) - mean(MeanKind.A, p)


class TestSymmetry:
    @pytest.mark.parametrize("kind", list(DifferenceKind))
    def test_swap(self, kind):
        a, b = np.array([1e-3, 2.0, 7.0]), np.array([5.0, 2.0, 1e4])
        assert np.array_equal(difference_values(kind, a, b), difference_values(kind, b, a))


class TestIdentities:
    def test_labels(self):
        assert len(IDENTITY_LABELS) == 5

    @pytest.mark.parametrize("a,b", [(1, 2), (1e-3, 1e5), (7, 7), (1, 1e6)])
    def test_residuals_small(self, a, b):
        p = PositivePair(a, b)
        res = identity_residuals(p)
        assert len(res) == 5
        assert max(res) <= 1e-12 * max(a, b)
