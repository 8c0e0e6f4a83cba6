import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phibvp.apriori import bound_certificate, certify, r0_bound, r1_bound
from phibvp.grid import C1GridFunction
from phibvp.phi import BUILTIN_MODELS, PhiModel
from phibvp.problem import Dirichlet, ProblemInstance, RhsFunction, SturmLiouville
from phibvp.solver import solve

LAPLACE = PhiModel.power_sum([2.0], [0.5])


def inst(bc, R=1.0, S0=0.0, T0=1.0):
    return ProblemInstance(LAPLACE, bc, RhsFunction("x", R, S0, T0), 32)


class TestR0:
    def test_dirichlet(self):
        assert r0_bound(inst(Dirichlet(0.0, 1.0))) == 1.0
        assert r0_bound(inst(Dirichlet(-3.0, 1.0))) == 3.0

    def test_sturm_liouville(self):
        bc = SturmLiouville(alpha=4.0, beta=1.0, A=2.0, a=2.0, b=1.0, B=1.0)
        assert r0_bound(inst(bc, R=0.1)) == 0.5


def r1_oracle(r0, S0, T0):
    # the chain for Phi = x^2/2 at 30 digits: (k - 1) Phi(r1) = E with k = 2
    mpmath.mp.dps = 30
    r0, S0, T0 = mpmath.mpf(r0), mpmath.mpf(S0), mpmath.mpf(T0)
    C = 2 * r0
    C0 = S0 * (C * C - C * C / 2) + T0
    E = ((T0 + C0) * mpmath.e ** (2 * S0 * r0) - T0) / S0
    return mpmath.sqrt(2 * E)


class TestR1:
    def test_gronwall_chain(self):
        cert = r1_bound(LAPLACE, 1.0, 1.0, 1.0)
        assert cert.C == 2.0
        assert cert.C0 == 3.0
        assert cert.E == pytest.approx(4 * math.e**2 - 1, rel=1e-14)
        assert cert.r1 == pytest.approx(7.557, abs=5e-4)
        assert cert.r1 == pytest.approx(float(r1_oracle(1, 1, 1)), rel=1e-11)
        assert cert.branch == "gronwall" and not cert.degenerate

    def test_direct_branch(self):
        cert = r1_bound(LAPLACE, 1.0, 0.0, 1.0)
        assert cert.r1 == 3.0
        assert cert.branch == "direct"

    def test_degenerate(self):
        cert = r1_bound(LAPLACE, 0.0, 1.0, 0.0)
        assert (cert.C, cert.C0, cert.E, cert.r1) == (0.0, 0.0, 0.0, 0.0)
        assert cert.degenerate

    def test_k_phi_guard(self):
        class Flat:
            k_phi = 1.0

        with pytest.raises(ValueError):
            r1_bound(Flat(), 1.0, 1.0, 1.0)

    @pytest.mark.parametrize("name", list(BUILTIN_MODELS))
    def test_tiny_s0_weaker_than_direct(self, name):
        m = PhiModel(BUILTIN_MODELS[name])
        for r0, T0 in [(1.0, 1.0), (0.5, 3.0), (2.0, 0.1)]:
            assert r1_bound(m, r0, 1e-8, T0).r1 > r1_bound(m, r0, 0.0, T0).r1

    @settings(max_examples=60, deadline=None)
    @given(
        r0=st.floats(0.01, 3.0), S0=st.floats(0.01, 2.0), T0=st.floats(0.0, 5.0),
        bump=st.floats(1e-3, 1.0), which=st.sampled_from([0, 2]),
    )
    def test_monotone_in_r0_and_t0(self, r0, S0, T0, bump, which):
        m = PhiModel(BUILTIN_MODELS["mixed_2_1.5"])
        base = r1_bound(m, r0, S0, T0).r1
        args = [r0, S0, T0]
        args[which] += bump
        assert r1_bound(m, *args).r1 >= base * (1 - 1e-10)

    @settings(max_examples=40, deadline=None)
    @given(r0=st.floats(0.01, 3.0), S0=st.floats(0.01, 2.0), bump=st.floats(1e-3, 1.0))
    def test_monotone_in_s0_without_t0(self, r0, S0, bump):
        m = PhiModel(BUILTIN_MODELS["mixed_2_1.5"])
        assert r1_bound(m, r0, S0 + bump, 0.0).r1 >= r1_bound(m, r0, S0, 0.0).r1 * (1 - 1e-10)

    def test_not_monotone_in_s0_with_t0(self):
        # E carries a T0 / S0 term, so r1 first falls as S0 grows from 0
        r1s = [r1_bound(LAPLACE, 1.0, s, 1.0).r1 for s in (0.01, 0.1, 0.5, 1.0)]
        assert r1s[0] > r1s[1] > r1s[2] < r1s[3]

    def test_certificate_fields(self):
        cert = bound_certificate(inst(Dirichlet(0.0, 1.0), S0=1.0, T0=1.0))
        d = cert.to_dict()
        assert set(d) >= {"r0", "r1", "C", "C0", "E", "s0_used", "t0_used"}
        assert d["s0_used"] == 1.0 and d["t0_used"] == 1.0


class TestCertify:
    def test_sinh_equality_at_boundary(self):
        p = ProblemInstance(LAPLACE, Dirichlet(0.0, 1.0), RhsFunction("x", 1.0, 0.0, 2.0), 200)
        sol = solve(p)
        rep = certify(sol.u, bound_certificate(p))
        assert rep.passed
        assert rep.u_sup == pytest.approx(1.0, abs=1e-12)

    def test_zero_always_passes(self):
        zero = C1GridFunction.sample(lambda t: 0 * t, lambda t: 0 * t, 10)
        assert certify(zero, r1_bound(LAPLACE, 0.0, 1.0, 0.0)).passed

    def test_failure_witness(self):
        u = C1GridFunction.sample(lambda t: 10 * t, lambda t: 10 + 0 * t, 10)
        rep = certify(u, r1_bound(LAPLACE, 1.0, 1.0, 1.0))
        assert not rep.passed and not rep.u_ok
        assert rep.u_witness_t == 1.0

    def test_slack(self):
        u = C1GridFunction.sample(lambda t: 0 * t + 1 + 5e-10, lambda t: 0 * t, 4)
        cert = r1_bound(LAPLACE, 1.0, 0.0, 1.0)
        assert certify(u, cert).passed
        assert not certify(u, cert, slack=1e-10).passed
