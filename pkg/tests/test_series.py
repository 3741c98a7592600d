import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tadic.errors import DomainError, IntegralityError, PrecisionError
from tadic.series import (
    NewtonPolygon,
    SlopeSeries,
    SSeries,
    TSeries,
    certified_polygon,
    exp_generating,
    geometric_slopes,
    log_generating,
    lower_hull,
    polygon_dominates,
    polygon_from_sseries,
    polygon_rescale,
    polygons_equal_on,
    slope_series_mul,
    vp,
    vp_factorial,
)


def ts(p, prec, cap, coeffs, den=1):
    return TSeries(p, prec, cap, coeffs, den)


class TestTSeries:
    def test_inverse_of_one_plus_t_is_alternating(self):
        # geometric series oracle: 1/(1+T) = 1 - T + T^2 - T^3 + ...
        s = ts(5, 4, 6, {0: 1, 1: 1})
        inv = s.inverse()
        pm = 5**4
        assert inv.sorted_items() == [(j, (-1) ** j % pm) for j in range(6)]
        assert s.mul(inv).is_one()

    def test_mul_truncates_at_common_cap(self):
        a = ts(3, 5, 4, {0: 1, 3: 2})
        b = ts(3, 5, 7, {1: 1})
        c = a.mul(b)
        assert c.cap == 4
        assert c.sorted_items() == [(1, 1)]  # exponent 4 term dropped

    def test_divexact_spends_precision(self):
        a = ts(3, 4, 3, {0: 9, 1: 18})
        b = a.divexact_int(9)
        assert b.prec == 2
        assert b.sorted_items() == [(0, 1), (1, 2)]

    def test_divexact_rejects_non_divisible(self):
        a = ts(3, 4, 3, {0: 1})
        with pytest.raises(IntegralityError):
            a.divexact_int(3)

    def test_divexact_by_unit_keeps_precision(self):
        a = ts(3, 4, 3, {0: 2})
        b = a.divexact_int(2)
        assert b.prec == 4 and b.is_one()

    def test_precision_exhaustion(self):
        a = ts(3, 1, 3, {0: 3})
        with pytest.raises(PrecisionError):
            a.divexact_int(3)

    def test_compose_polynomial_oracle(self):
        # (1 + X + X^2) at X = T + T^2, expanded by hand:
        # 1 + T + 2T^2 + 2T^3 + T^4
        outer = ts(7, 3, 5, {0: 1, 1: 1, 2: 1})
        inner = ts(7, 3, 5, {1: 1, 2: 1})
        got = outer.compose(inner)
        assert got.sorted_items() == [(0, 1), (1, 1), (2, 2), (3, 2), (4, 1)]

    def test_compose_requires_positive_order(self):
        outer = ts(7, 3, 5, {0: 1, 1: 1})
        inner = ts(7, 3, 5, {0: 1})
        with pytest.raises(DomainError):
            outer.compose(inner)

    def test_val_data_distinguishes_zero_from_unknown(self):
        a = ts(5, 2, 8, {}, den=2)
        assert a.val_data() == (None, Fraction(8, 2))
        b = ts(5, 2, 8, {3: 5}, den=2)
        assert b.val_data() == (Fraction(3, 2), Fraction(4))

    def test_fractional_exponents_multiply(self):
        # X^(1/2) * X^(3/2) = X^2
        a = ts(5, 3, 9, {1: 2}, den=2)
        b = ts(5, 3, 9, {3: 3}, den=2)
        assert a.mul(b).sorted_items() == [(4, 6)]

    @given(
        st.integers(min_value=0, max_value=3).flatmap(
            lambda seed: st.tuples(
                st.dictionaries(st.integers(0, 7), st.integers(0, 342), max_size=5),
                st.dictionaries(st.integers(0, 7), st.integers(0, 342), max_size=5),
                st.dictionaries(st.integers(0, 7), st.integers(0, 342), max_size=5),
            )
        )
    )
    def test_ring_axioms(self, dicts):
        da, db, dc = dicts
        a, b, c = (ts(7, 3, 8, d) for d in (da, db, dc))
        assert a.mul(b) == b.mul(a)
        assert a.mul(b.add(c)) == a.mul(b).add(a.mul(c))
        assert a.mul(b).mul(c) == a.mul(b.mul(c))
        assert a.add(a.neg()).is_zero()

    @given(st.dictionaries(st.integers(1, 6), st.integers(1, 48), min_size=0, max_size=4))
    def test_inverse_round_trip(self, tail):
        a = ts(7, 2, 7, {**tail, 0: 1})
        assert a.mul(a.inverse()).is_one()


class TestExpLog:
    def test_exp_of_s_gives_inverse_factorials(self):
        p, prec = 101, 3
        one = TSeries.const(p, prec, 1, 1)
        w = [one] + [one.zero_like()] * 4  # w_k = k*g_k for g = s
        F = exp_generating(w, one)
        pm = p**prec
        for m in range(6):
            assert F.coeffs[m].coeff(0) == pow(math.factorial(m), -1, pm)

    def test_exp_matches_direct_expansion(self):
        # exp(2s + 3s^2) expanded via sum P^k/k! with exact fractions
        p, prec, deg = 101, 4, 5
        g = {1: 2, 2: 3}
        poly = [Fraction(0)] * (deg + 1)
        powk = [Fraction(1)] + [Fraction(0)] * deg  # P^0
        expd = [Fraction(0)] * (deg + 1)
        for k in range(deg + 1):
            fk = Fraction(1, math.factorial(k))
            for i, c in enumerate(powk):
                expd[i] += c * fk
            nxt = [Fraction(0)] * (deg + 1)
            for i, c in enumerate(powk):
                if c:
                    for j, gj in g.items():
                        if i + j <= deg:
                            nxt[i + j] += c * gj
            powk = nxt
        one = TSeries.const(p, prec, 1, 1)
        w = [one.mul_int(1 * g.get(1, 0)), one.mul_int(2 * g.get(2, 0))] + [
            one.zero_like()
        ] * (deg - 2)
        F = exp_generating(w, one)
        pm = p**prec
        for m in range(deg + 1):
            frac = expd[m]
            want = frac.numerator * pow(frac.denominator, -1, pm) % pm
            assert F.coeffs[m].coeff(0) == want

    @given(st.lists(st.integers(-20, 20), min_size=1, max_size=5))
    @settings(deadline=None)
    def test_log_undoes_exp(self, ws):
        one = TSeries.const(103, 3, 1, 1)
        weighted = [one.mul_int(c) for c in ws]
        F = exp_generating(weighted, one)
        back = log_generating(F)
        for orig, rec in zip(weighted, back):
            assert orig == rec


class TestSSeries:
    def test_inverse_geometric(self):
        one = TSeries.const(5, 3, 1, 1)
        # 1 - s  ->  inverse is all-ones
        F = SSeries([one, one.neg(), one.zero_like(), one.zero_like()])
        G = F.inverse()
        assert all(c.is_one() for c in G.coeffs)
        assert F.mul(G).coeffs[0].is_one()
        assert all(c.is_zero() for c in F.mul(G).coeffs[1:])

    def test_scale_s(self):
        one = TSeries.const(5, 3, 1, 1)
        F = SSeries([one, one, one])
        G = F.scale_s(lambda k: 2**k)
        assert [c.coeff(0) for c in G.coeffs] == [1, 2, 4]

    def test_pow_negative(self):
        one = TSeries.const(5, 4, 1, 1)
        F = SSeries([one, one.mul_int(3), one.zero_like()])
        assert F.pow_int(-2).mul(F.pow_int(2)).coeffs[0].is_one()


class TestHull:
    def test_frozen_example(self):
        pts = [(0, 0), (1, 2), (2, 1), (3, 3), (4, 9)]
        hull = lower_hull(pts)
        assert hull == [
            (Fraction(0), Fraction(0)),
            (Fraction(2), Fraction(1)),
            (Fraction(3), Fraction(3)),
            (Fraction(4), Fraction(9)),
        ]

    @given(
        st.lists(
            st.tuples(st.integers(0, 12), st.integers(-30, 30)),
            min_size=1,
            max_size=12,
        )
    )
    def test_hull_properties(self, raw):
        pts = [(Fraction(x), Fraction(y)) for x, y in raw]
        hull = lower_hull(pts)
        # vertices are input points
        assert set(hull) <= {(x, min(y for a, y in pts if a == x)) for x, _ in pts}
        # slopes strictly increase
        slopes = [
            (y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in zip(hull, hull[1:])
        ]
        assert all(s0 < s1 for s0, s1 in zip(slopes, slopes[1:]))
        # every point lies on or above the hull
        P = NewtonPolygon(vertices=tuple(hull), certified_upto=hull[-1][0])
        for x, y in pts:
            if hull[0][0] <= x <= hull[-1][0]:
                assert y >= P.value_at(x)


class TestCertifiedPolygon:
    def test_all_exact_is_fully_certified(self):
        P = certified_polygon([(0, 0, 10), (1, 1, 10), (2, 3, 10)])
        assert P.certified_upto == 2
        assert P.vertices == ((0, 0), (1, 1), (2, 3))

    def test_unknown_coefficient_caps_certification(self):
        # x=2 only known to have valuation >= 2; the floor hull bends there
        P = certified_polygon([(0, 0, 10), (1, 1, 10), (2, None, 2), (3, 6, 10)])
        assert P.certified_upto == 1

    def test_high_cap_unknown_does_not_block(self):
        # unknown at cap 100 sits far above the exact hull; prefix unaffected
        P = certified_polygon([(0, 0, 10), (1, 1, 10), (2, None, 100), (3, 3, 10)])
        assert P.certified_upto == 3
        assert P.value_at(2) == 2

    def test_ray_cuts_certification(self):
        # exact data climbs at slope 3 but the tail bound only promises
        # slope 1 from x=3, so later terms could cut in below x=2
        pts = [(0, 0, 50), (1, 3, 50), (2, 6, 50)]
        P = certified_polygon(pts, ray=(3, 7, 1))
        assert P.certified_upto < 2

    def test_steep_ray_is_harmless(self):
        pts = [(0, 0, 50), (1, 1, 50), (2, 2, 50)]
        P = certified_polygon(pts, ray=(3, 3, 1))
        assert P.certified_upto == 2

    def test_polygon_from_sseries_reads_val_data(self):
        one = TSeries.const(3, 4, 8, 1)
        c1 = TSeries(3, 4, 8, {2: 2})  # valuation 2
        c2 = TSeries(3, 4, 8, {})  # unknown, cap 8 (above the hull, harmless)
        c3 = TSeries(3, 4, 8, {6: 1})
        P = polygon_from_sseries(SSeries([one, c1, c2, c3]))
        assert P.value_at(1) == 2
        assert P.certified_upto == 3


class TestPolygonOps:
    def test_rescale(self):
        P = NewtonPolygon(((Fraction(0), Fraction(0)), (Fraction(2), Fraction(3))), Fraction(2))
        Q = polygon_rescale(P, Fraction(1, 3))
        assert Q.value_at(2) == 1

    def test_dominates_and_equal(self):
        lo = NewtonPolygon(((Fraction(0), Fraction(0)), (Fraction(3), Fraction(3))), Fraction(3))
        hi = NewtonPolygon(
            ((Fraction(0), Fraction(0)), (Fraction(1), Fraction(2)), (Fraction(3), Fraction(4))),
            Fraction(3),
        )
        assert polygon_dominates(hi, lo)
        assert not polygon_dominates(lo, hi)
        assert polygons_equal_on(lo, lo, upto=3)

    def test_no_common_range_is_an_error(self):
        P = NewtonPolygon(((Fraction(0), Fraction(0)),), Fraction(0))
        with pytest.raises(DomainError):
            polygon_dominates(P, P)


class TestSlopeSeries:
    def test_from_polygon_and_back(self):
        P = NewtonPolygon(
            ((Fraction(0), Fraction(0)), (Fraction(2), Fraction(1)), (Fraction(3), Fraction(2))),
            Fraction(3),
        )
        S = SlopeSeries.from_polygon(P, upto=3)
        assert S.items == ((Fraction(1, 2), 2), (Fraction(1), 1))
        assert S.to_polygon().vertices == P.vertices

    def test_mul_small_example(self):
        A = SlopeSeries(items=((Fraction(0), 1), (Fraction(1), 1)), cap=None)
        B = SlopeSeries(items=((Fraction(0), 1), (Fraction(1), 2), (Fraction(2), 3)), cap=None)
        C = slope_series_mul(A, B, slope_cap=2)
        assert C.items == ((Fraction(0), 1), (Fraction(1), 3))

    def test_geometric_multiplicities(self):
        S = geometric_slopes(2, 5)
        assert [m for _, m in S.items] == [1, 2, 3, 4, 5]
        T = geometric_slopes(1, 4)
        assert all(m == 1 for _, m in T.items)

    def test_mul_rejects_short_factor(self):
        A = geometric_slopes(1, 2)
        with pytest.raises(DomainError):
            slope_series_mul(A, A, slope_cap=5)


def test_vp_helpers():
    assert vp(12, 2) == 2
    assert vp(12, 3) == 1
    assert vp_factorial(10, 2) == 8  # 5 + 2 + 1
    assert vp_factorial(10, 3) == 4
