from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tadic.arith import (
    CycContext,
    FieldContext,
    binomial_guard,
    frob_power,
    is_prime,
    one_plus_T_pow,
    prime_factors,
    specialize_tseries,
    teichmuller_lift,
)
from tadic.errors import DomainError, IntegralityError, PrecisionError
from tadic.series import TSeries


class TestFieldContext:
    def test_prime_field_is_trivial(self):
        ctx = FieldContext(2, 1)
        assert ctx.poly_low == (0,)  # defining polynomial y
        assert ctx.generator == (1,)

    def test_smallest_primitive_root_mod_5(self):
        ctx = FieldContext(5, 1)
        assert ctx.generator == (2,)

    def test_f4_defining_poly(self):
        ctx = FieldContext(2, 2)
        assert ctx.poly_low == (1, 1)  # y^2 + y + 1, the only choice

    def test_f9_defining_poly(self):
        ctx = FieldContext(3, 2)
        assert ctx.poly_low == (1, 0)  # y^2 + 1: -1 is no square mod 3

    def test_rejects_composite(self):
        with pytest.raises(DomainError):
            FieldContext(6, 1)

    @pytest.mark.parametrize("p,a", [(2, 2), (3, 2), (5, 1), (2, 4)])
    def test_generator_order(self, p, a):
        ctx = FieldContext(p, a)
        q = p**a
        seen = set()
        g = ctx.one()
        for _ in range(q - 1):
            seen.add(g)
            g = ctx.mul(g, ctx.generator)
        assert len(seen) == q - 1
        assert g == ctx.one()

    @given(st.sampled_from([(2, 2), (3, 2), (5, 1), (7, 1)]), st.data())
    def test_field_axioms(self, pa, data):
        ctx = FieldContext(*pa)
        enc = st.integers(0, ctx.q - 1)
        x = ctx.decode(data.draw(enc))
        y = ctx.decode(data.draw(enc))
        z = ctx.decode(data.draw(enc))
        assert ctx.mul(x, y) == ctx.mul(y, x)
        assert ctx.mul(ctx.mul(x, y), z) == ctx.mul(x, ctx.mul(y, z))
        assert ctx.mul(x, ctx.add(y, z)) == ctx.add(ctx.mul(x, y), ctx.mul(x, z))
        if x != ctx.zero():
            assert ctx.mul(x, ctx.inv(x)) == ctx.one()

    def test_embedding_is_a_homomorphism(self):
        sub = FieldContext(2, 2)
        big = sub.ext(2)  # F_16
        phi = sub.embed_into(big)
        for xe in range(sub.q):
            for ye in range(sub.q):
                x, y = sub.decode(xe), sub.decode(ye)
                assert phi(sub.mul(x, y)) == big.mul(phi(x), phi(y))
                assert phi(sub.add(x, y)) == big.add(phi(x), phi(y))
        assert phi(sub.one()) == big.one()

    def test_ext_is_cached_and_deterministic(self):
        ctx = FieldContext(3, 1)
        assert ctx.ext(2) is ctx.ext(2)
        assert ctx.ext(2).poly_low == FieldContext(3, 2).poly_low


class TestZq:
    def test_trace_of_scalar(self):
        ctx = FieldContext(3, 2)
        x = (5, 0)  # the scalar 5 in Z_9 mod 3^4
        assert ctx.zq_trace(x, 4) == 10  # degree * scalar

    def test_trace_example_f4(self):
        # basis 1, y with y^2 = -y - 1 lifted from y^2+y+1:
        # mult-by-y matrix [[0,-1],[1,-1]], trace -1, reducing to 1 mod 2
        ctx = FieldContext(2, 2)
        y = (0, 1)
        tr = ctx.zq_trace(y, 5)
        assert tr % 2 == 1
        assert tr == 2**5 - 1  # i.e. -1

    def test_trace_linearity(self):
        ctx = FieldContext(2, 3)
        prec = 6
        pm = 2**prec
        for xe in range(0, ctx.q, 3):
            for ye in range(0, ctx.q, 2):
                x, y = ctx.decode(xe), ctx.decode(ye)
                s = ctx.zq_add(x, y, prec)
                assert ctx.zq_trace(s, prec) == (
                    ctx.zq_trace(x, prec) + ctx.zq_trace(y, prec)
                ) % pm


class TestTeichmuller:
    def test_spec_values(self):
        ctx5 = FieldContext(5, 1)
        assert teichmuller_lift(ctx5, (2,), 2) == (7,)
        ctx3 = FieldContext(3, 1)
        assert teichmuller_lift(ctx3, (2,), 3) == (26,)

    def test_zero_and_one(self):
        ctx = FieldContext(3, 2)
        assert teichmuller_lift(ctx, ctx.zero(), 4) == ctx.zero()
        assert teichmuller_lift(ctx, ctx.one(), 4) == (1, 0)

    @pytest.mark.parametrize("p,a,prec", [(2, 2, 6), (3, 1, 5), (2, 4, 4), (7, 1, 4)])
    def test_idempotence_and_multiplicativity(self, p, a, prec):
        # covers every element of F_q^x for q <= 64
        ctx = FieldContext(p, a)
        lifts = {}
        for x in ctx.elements():
            t = teichmuller_lift(ctx, x, prec)
            assert ctx.zq_pow(t, ctx.q, prec) == t
            assert tuple(c % p for c in t) == x
            lifts[x] = t
        for xe in range(1, ctx.q):
            for ye in range(1, ctx.q, 3):
                x, y = ctx.decode(xe), ctx.decode(ye)
                assert lifts[ctx.mul(x, y)] == ctx.zq_mul(lifts[x], lifts[y], prec)

    def test_generator_powers_enumerate_units(self):
        ctx = FieldContext(3, 2)
        prec = 4
        tg = teichmuller_lift(ctx, ctx.generator, prec)
        cur = (1,) + (0,) * (ctx.a - 1)
        seen = set()
        for _ in range(ctx.q - 1):
            seen.add(cur)
            cur = ctx.zq_mul(cur, tg, prec)
        assert len(seen) == ctx.q - 1
        assert cur == (1, 0)


class TestFrobenius:
    def test_identity_and_order(self):
        ctx = FieldContext(2, 2)
        g = ctx.generator
        assert frob_power(ctx, g, 0) == g
        assert frob_power(ctx, g, ctx.a) == g
        assert frob_power(ctx, g, 1) == ctx.mul(g, g)


class TestOnePlusTPow:
    def test_exponent_one(self):
        s = one_plus_T_pow(1, 3, 4, 5, t_prec=4 + binomial_guard(5, 3))
        assert s.sorted_items() == [(0, 1), (1, 1)]

    def test_exponent_zero(self):
        s = one_plus_T_pow(0, 3, 4, 5, t_prec=4 + binomial_guard(5, 3))
        assert s.is_one()

    def test_exponent_minus_one_is_geometric(self):
        # (1+T)^(-1) = 1 - T + T^2 - T^3: the geometric series oracle
        p, M, N = 3, 4, 4
        tp = M + binomial_guard(N, p)
        s = one_plus_T_pow(p**tp - 1, p, M, N, t_prec=tp)
        pm = p**M
        assert s.sorted_items() == [(j, (-1) ** j % pm) for j in range(N)]

    def test_integer_exponent_matches_ring_power(self):
        p, M, N = 2, 5, 8
        tp = M + binomial_guard(N, p)
        s = one_plus_T_pow(11, p, M, N, t_prec=tp)
        base = TSeries(p, M, N, {0: 1, 1: 1})
        assert s == base.pow_int(11)

    def test_rejects_thin_exponent(self):
        with pytest.raises(PrecisionError):
            one_plus_T_pow(1, 2, 10, 32, t_prec=10)

    @given(st.integers(0, 3**9 - 1), st.integers(0, 3**9 - 1))
    @settings(deadline=None)
    def test_homomorphism(self, t1, t2):
        p, M, N = 3, 5, 10
        tp = M + binomial_guard(N, p)
        a = one_plus_T_pow(t1, p, M, N, t_prec=tp)
        b = one_plus_T_pow(t2, p, M, N, t_prec=tp)
        ab = one_plus_T_pow((t1 + t2) % p**tp, p, M, N, t_prec=tp)
        assert a.mul(b) == ab


class TestCyclotomic:
    def test_modulus_is_eisenstein(self):
        for p, m in [(2, 1), (3, 1), (3, 2), (5, 1), (2, 3)]:
            cyc = CycContext(p, m)
            assert cyc.mod_low[0] == p
            assert all(c % p == 0 for c in cyc.mod_low)

    def test_pi_has_valuation_one(self):
        cyc = CycContext(3, 2)
        x = cyc.pi(4)
        assert x.val_data()[0] == 1

    def test_p_has_valuation_e(self):
        for p, m in [(3, 1), (5, 1), (3, 2)]:
            cyc = CycContext(p, m)
            assert cyc.from_int(p, 3).val_data()[0] == cyc.e

    def test_sum_of_cube_roots(self):
        # zeta + zeta^2 = -1 for p=3, m=1: a unit
        cyc = CycContext(3, 1)
        z = cyc.zeta(4)
        s = z.add(z.mul(z))
        assert s == cyc.from_int(-1, 4)
        assert s.val_data()[0] == 0

    def test_zeta_has_exact_order(self):
        for p, m in [(2, 1), (3, 1), (2, 2), (3, 2), (5, 1)]:
            cyc = CycContext(p, m)
            z = cyc.zeta(4)
            assert z.pow_int(p**m).is_one()
            if p**m > 2:
                assert not z.pow_int(p ** (m - 1)).is_one()

    def test_vanished_element_reports_cap(self):
        cyc = CycContext(3, 1)
        v, cap = cyc.zero(5).val_data()
        assert v is None and cap == cyc.e * 5

    @given(st.integers(0, 3**3 - 1), st.integers(0, 3**3 - 1), st.integers(0, 3**3 - 1), st.integers(0, 3**3 - 1))
    def test_ord_is_additive(self, a0, a1, b0, b1):
        cyc = CycContext(3, 1)
        x = CycElementFactory(cyc, 3, (a0, a1))
        y = CycElementFactory(cyc, 3, (b0, b1))
        vx, capx = x.val_data()
        vy, capy = y.val_data()
        if vx is None or vy is None:
            return
        vxy, cap = x.mul(y).val_data()
        if vx + vy < cap:
            assert vxy == vx + vy

    def test_divexact_spends_precision(self):
        cyc = CycContext(3, 1)
        x = cyc.from_int(9, 4)
        y = x.divexact_int(3)
        assert y.prec == 3 and y.coeffs[0] == 3


def CycElementFactory(cyc, prec, coeffs):
    from tadic.arith import CycElement

    return CycElement(cyc, prec, coeffs)


class TestSpecialize:
    def test_one_plus_t_becomes_zeta(self):
        cyc = CycContext(3, 1)
        ts = TSeries(3, 4, 8, {0: 1, 1: 1})
        got = specialize_tseries(ts, cyc, 4)
        assert got == cyc.zeta(4)

    def test_truncation_rule_enforced(self):
        cyc = CycContext(3, 2)  # e = 6
        ts = TSeries(3, 4, 8, {0: 1})
        with pytest.raises(PrecisionError):
            specialize_tseries(ts, cyc, 4)  # needs cap >= 24

    def test_geometric_series_specializes_to_inverse(self):
        # (1+T)^(-1) at T=pi equals zeta^(-1) = zeta^(p^m - 1)
        p, m = 3, 1
        cyc = CycContext(p, m)
        M = 3
        N = cyc.e * M + 2
        tp = M + binomial_guard(N, p)
        inv = one_plus_T_pow(p**tp - 1, p, M, N, t_prec=tp)
        got = specialize_tseries(inv, cyc, M)
        want = cyc.zeta(M).pow_int(p**m - 1)
        assert got == want


def test_primality_helpers():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert prime_factors(360) == [2, 3, 5]
