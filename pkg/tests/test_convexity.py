import time

import numpy as np
import pytest
from numpy.testing import assert_allclose

from meanforge.convexity import (
    DEFAULT_GRID,
    GridSpec,
    certify_all,
    certify_convexity,
    check_phi_bound,
    fd_second_derivative,
    joint_convexity_probe,
    phi_bound_values,
)
from meanforge.generating import CONVEX_KINDS, generating_function
from meanforge.means import DomainError, PositivePair, PreconditionError


class TestGrid:
    def test_default(self):
        x = DEFAULT_GRID.abscissae()
        assert len(x) == 10001
        assert x[0] == 1e-6 and x[-1] == 1e6
        assert np.all(np.diff(x) > 0)

    @pytest.mark.parametrize("args", [(0, 1, 10), (2, 1, 10), (1e-3, 1e3, 1), (1e-3, np.inf, 10)])
    def test_rejects(self, args):
        with pytest.raises(DomainError):
            GridSpec(*args)

    def test_straddles_one(self):
        assert DEFAULT_GRID.straddles_one
        assert not GridSpec(2, 3, 5).straddles_one


class TestFiniteDifference:
    def test_polynomial_exact(self):
        x = np.array([1e-6, 1.0, 1e6])
        fd = fd_second_derivative(lambda t: t * t * t, x)
        assert_allclose(fd, 6 * x, rtol=1e-9)

    def test_deep_left_tail(self):
        # float64 would return noise here; double-double keeps ~1e-10
        gf = generating_function("SA")
        x = np.array([1e-6])
        assert_allclose(fd_second_derivative(gf.f, x), gf.f2(x), rtol=1e-8)


class TestCertificates:
    def test_all_pass(self):
        t0 = time.perf_counter()
        certs = certify_all()
        assert time.perf_counter() - t0 < 5.0
        assert [c.kind for c in certs] == list(CONVEX_KINDS)
        for c in certs:
            assert c.passed, c.summary()
            assert c.min_f2 > 0
            assert c.max_fd_mismatch <= 1e-6
            assert "numerical evidence" in c.summary()

    def test_chain_only_rejected(self):
        with pytest.raises(PreconditionError):
            certify_convexity("N2H")

    def test_tight_tolerance_can_fail(self):
        assert not certify_convexity("SA", fd_tolerance=0.0).passed


class TestPhiBound:
    @pytest.mark.parametrize("kind", CONVEX_KINDS)
    def test_holds(self, kind):
        for a, b in [(1, 2), (3, 0.01), (5, 5), (1e-4, 1e4)]:
            res = check_phi_bound(kind, PositivePair(a, b))
            assert res.holds, (kind, a, b, res)

    def test_vectorized(self):
        phi, bound, scale = phi_bound_values("AG", np.array([1.0, 4.0]), np.array([4.0, 1.0]))
        assert_allclose(phi, [0.5, 0.5], rtol=1e-15)
        assert_allclose(scale, [4.0, 4.0])
        assert np.all(bound >= phi)


class TestJointProbe:
    def test_holds_both_orders(self):
        p1, p2 = PositivePair(1, 9), PositivePair(4, 0.5)
        for kind in CONVEX_KINDS:
            for swapped in (False, True):
                assert joint_convexity_probe(kind, p1, p2, 0.3, swapped=swapped).holds

    @pytest.mark.parametrize("lam", [0.0, 1.0, -0.1, 1.5])
    def test_lambda_domain(self, lam):
        with pytest.raises(DomainError):
            joint_convexity_probe("SA", PositivePair(1, 2), PositivePair(2, 1), lam)

    def test_equal_points(self):
        p = PositivePair(2, 3)
        res = joint_convexity_probe("SG", p, p, 0.5)
        assert res.holds
        assert_allclose(res.lhs, res.rhs, rtol=1e-15)
