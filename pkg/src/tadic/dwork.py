"""The operator route to the generating functions: splitting kernel, the
semilinear transfer matrix on weighted monomials, its characteristic series,
and the determinant criteria for sharpness of the combinatorial bound.

Module sums reaches C by summing over torus points.  Here the same series
is det(1 - Mx*s) for a finite matrix Mx assembled from the coefficients of
a kernel product, truncated to monomials of bounded polytope degree.  The
two routes share no arithmetic beyond the ground field, which is what makes
their agreement a meaningful end-to-end check.

Conventions.  The inner uniformizer is written pi; series in pi^(1/D) carry
Z_q coefficients at precision p^M and live in ZqPi.  All lattice work happens
in the reduced coordinates of DegreeData (exponents of f are mapped through
dd.to_reduced), where degrees, cones and defects are exactly the same as in
the ambient coordinates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import FieldContext, teichmuller_lift
from .errors import DomainError, IntegralityError, PrecisionError, TheoremViolation
from .polytope import LaurentPoly, newton_data, restrict_to_face
from .series import SSeries, TSeries


# ---------------------------------------------------------------------------
# exact scalar series: the splitting kernel and the change of uniformizer
# ---------------------------------------------------------------------------


def _exp_fractions(g, N: int):
    """exp of sum_j g[j] X^j (g[0] = 0) to order N, exact rationals.

    Uses the derivative recurrence k*e_k = sum_j j*g_j*e_{k-j}; the only
    divisions are by k, which Fraction absorbs exactly.
    """
    e = [Fraction(1)] + [Fraction(0)] * (N - 1)
    for k in range(1, N):
        acc = Fraction(0)
        for j in range(1, k + 1):
            if g[j]:
                acc += j * g[j] * e[k - j]
        e[k] = acc / k
    return e


@dataclass(frozen=True)
class ArtinHasse:
    """E(pi) = exp(sum_i pi^(p^i)/p^i) mod pi^cap, exact rational coefficients.

    Every coefficient is p-integral; the constructor-side assertion makes a
    denominator divisible by p a loud bug instead of a silent wrong answer.
    """

    p: int
    cap: int
    coeffs: tuple  # coeffs[j] multiplies pi^j


def artin_hasse(p: int, N: int) -> ArtinHasse:
    if N < 1:
        raise DomainError("need at least one kernel coefficient")
    g = [Fraction(0)] * N
    q = 1
    while q < N:
        g[q] = Fraction(1, q)
        q *= p
    e = _exp_fractions(g, N)
    for j, c in enumerate(e):
        if c.denominator % p == 0:
            raise IntegralityError(f"kernel coefficient {j} has denominator {c.denominator}")
    return ArtinHasse(p=p, cap=N, coeffs=tuple(e))


@dataclass(frozen=True)
class PiOfT:
    """The inverse uniformizer change: pi as a series in T with pi(0) = 0,
    leading coefficient 1, defined by E(pi(T)) = 1 + T."""

    p: int
    cap: int
    coeffs: tuple  # exact rationals, coeffs[j] multiplies T^j


def _compose_fractions(outer, inner, N: int):
    """outer(inner(X)) mod X^N for rational coefficient lists, inner[0] = 0."""
    res = [Fraction(0)] * N
    for c in reversed(outer[:N]):
        # res = res*inner + c
        new = [Fraction(0)] * N
        for i, ri in enumerate(res):
            if ri:
                for j, bj in enumerate(inner[: N - i]):
                    if bj:
                        new[i + j] += ri * bj
        new[0] += c
        res = new
    return res


def pi_of_t(p: int, M: int, N: int) -> PiOfT:
    """Revert E(pi) - 1 = T coefficient by coefficient.

    b_k is determined linearly once b_1..b_{k-1} are known, because the
    kernel has leading coefficient 1.  The full round trip is re-checked at
    the end; a failure means the reversion or the kernel is wrong, so it
    raises rather than returns.
    """
    if N < 2:
        raise DomainError("reversion needs at least the linear term")
    E = artin_hasse(p, N).coeffs
    b = [Fraction(0)] * N
    b[1] = Fraction(1)
    # pw[m][t] = coefficient of T^t in (pi(T))^m, filled in step order
    pw = [[Fraction(0)] * N for _ in range(N)]
    pw[0][0] = Fraction(1)
    pw[1][1] = Fraction(1)
    for t in range(2, N):
        for m in range(2, t + 1):
            acc = Fraction(0)
            for j in range(1, t - m + 2):
                if b[j] and pw[m - 1][t - j]:
                    acc += b[j] * pw[m - 1][t - j]
            pw[m][t] = acc
        b[t] = -sum(E[m] * pw[m][t] for m in range(2, t + 1))
        pw[1][t] = b[t]
    for j, c in enumerate(b):
        if c.denominator % p == 0:
            raise IntegralityError(f"reversion coefficient {j} has denominator {c.denominator}")
    check = _compose_fractions(list(E), b, N)
    want = [Fraction(1), Fraction(1)] + [Fraction(0)] * (N - 2)
    if check != want:
        raise TheoremViolation("uniformizer round trip failed")
    return PiOfT(p=p, cap=N, coeffs=tuple(b))


def _frac_mod(fr: Fraction, p: int, prec: int) -> int:
    pm = p**prec
    if fr.denominator % p == 0:
        raise IntegralityError(f"{fr} is not p-integral")
    return fr.numerator * pow(fr.denominator, -1, pm) % pm


# ---------------------------------------------------------------------------
# pi-series with Z_q coefficients
# ---------------------------------------------------------------------------


class ZqPi:
    """sum_j c_j pi^(j/den) with c_j in Z_q mod p^prec, truncated below
    pi^(cap/den).

    Coefficients are the tuple representation of FieldContext's Z_q layer;
    exponent keys are nonnegative integers in units of 1/den.  Operations
    reduce precision and cap to what both operands certify, mirroring the
    TSeries conventions.  Implements the coefficient protocol of SSeries.
    """

    __slots__ = ("ctx", "prec", "cap", "den", "coeffs", "pm")

    def __init__(self, ctx: FieldContext, prec: int, cap: int, coeffs=None, den: int = 1):
        if prec <= 0:
            raise PrecisionError(f"no certified p-digits left (prec={prec})")
        if cap <= 0:
            raise PrecisionError(f"no certified pi-digits left (cap={cap})")
        self.ctx = ctx
        self.prec = prec
        self.cap = cap
        self.den = den
        self.pm = ctx.p**prec
        store = {}
        for j, t in (coeffs or {}).items():
            if j < 0:
                raise DomainError(f"negative pi-exponent {j}")
            if j >= cap:
                continue
            red = tuple(c % self.pm for c in t)
            if any(red):
                store[j] = red
        self.coeffs = store

    # -- constructors ---------------------------------------------------------

    def _like(self, coeffs, prec=None, cap=None) -> "ZqPi":
        return ZqPi(self.ctx, prec or self.prec, cap or self.cap, coeffs, self.den)

    def zero_like(self) -> "ZqPi":
        return self._like({})

    def one_like(self) -> "ZqPi":
        return self._like({0: self._one_tuple()})

    def _one_tuple(self):
        return (1,) + (0,) * (self.ctx.a - 1)

    # -- predicates -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return set(self.coeffs) == {0} and self.coeffs[0] == self._one_tuple()

    def _align(self, other: "ZqPi"):
        if self.ctx is not other.ctx or self.den != other.den:
            raise DomainError("pi-series live over different rings")
        return min(self.prec, other.prec), min(self.cap, other.cap)

    # -- ring operations --------------------------------------------------------

    def add(self, other: "ZqPi") -> "ZqPi":
        prec, cap = self._align(other)
        out = dict(self.coeffs)
        for j, t in other.coeffs.items():
            if j in out:
                out[j] = self.ctx.zq_add(out[j], t, prec)
            else:
                out[j] = t
        return ZqPi(self.ctx, prec, cap, out, self.den)

    def neg(self) -> "ZqPi":
        return self._like({j: tuple(-c % self.pm for c in t) for j, t in self.coeffs.items()})

    def sub(self, other: "ZqPi") -> "ZqPi":
        return self.add(other.neg())

    def ord_key(self):
        """Smallest stored exponent key, or None for (visible) zero."""
        return min(self.coeffs) if self.coeffs else None

    def mul(self, other: "ZqPi") -> "ZqPi":
        prec, _ = self._align(other)
        so = self.ord_key()
        oo = other.ord_key()
        cap = min(
            self.cap + (oo if oo is not None else other.cap),
            other.cap + (so if so is not None else self.cap),
        )
        out = {}
        for i, s in self.coeffs.items():
            for j, t in other.coeffs.items():
                k = i + j
                if k >= cap:
                    continue
                v = self.ctx.zq_mul(s, t, prec)
                if k in out:
                    out[k] = self.ctx.zq_add(out[k], v, prec)
                else:
                    out[k] = v
        return ZqPi(self.ctx, prec, cap, out, self.den)

    def mul_int(self, c: int) -> "ZqPi":
        return self._like({j: tuple(c * x % self.pm for x in t) for j, t in self.coeffs.items()})

    def mul_zq(self, t) -> "ZqPi":
        return self._like(
            {j: self.ctx.zq_mul(s, t, self.prec) for j, s in self.coeffs.items()}
        )

    def shift(self, k: int) -> "ZqPi":
        """Multiply by pi^(k/den); k < 0 is exact division and must not
        truncate away knowledge of a nonzero coefficient."""
        if k < 0 and any(j + k < 0 for j in self.coeffs):
            raise IntegralityError(f"pi-division by {-k} is not exact")
        return ZqPi(
            self.ctx,
            self.prec,
            self.cap + k,
            {j + k: t for j, t in self.coeffs.items()},
            self.den,
        )

    def with_cap(self, cap: int) -> "ZqPi":
        if cap > self.cap:
            raise PrecisionError("cannot certify beyond the computed cap")
        return ZqPi(self.ctx, self.prec, cap, self.coeffs, self.den)

    def with_prec(self, prec: int) -> "ZqPi":
        if prec > self.prec:
            raise PrecisionError("cannot certify beyond the computed precision")
        return ZqPi(self.ctx, prec, self.cap, self.coeffs, self.den)

    def rescale_den(self, den: int) -> "ZqPi":
        """Re-grid from units 1/self.den to the finer 1/den."""
        if den % self.den:
            raise DomainError("new grid must refine the old one")
        f = den // self.den
        return ZqPi(
            self.ctx,
            self.prec,
            self.cap * f,
            {j * f: t for j, t in self.coeffs.items()},
            den,
        )

    # -- inspection ---------------------------------------------------------------

    def coeff(self, j: int):
        if j >= self.cap:
            raise PrecisionError(f"pi-exponent {j}/{self.den} beyond cap")
        return self.coeffs.get(j, (0,) * self.ctx.a)

    def ord(self):
        k = self.ord_key()
        return None if k is None else Fraction(k, self.den)

    def val_data(self):
        return self.ord(), Fraction(self.cap, self.den)

    def agrees_with(self, other: "ZqPi") -> bool:
        """Equality on the intersection of the certified windows."""
        prec, cap = self._align(other)
        pm = self.ctx.p**prec
        for j in set(self.coeffs) | set(other.coeffs):
            if j >= cap:
                continue
            s = self.coeffs.get(j, (0,) * self.ctx.a)
            t = other.coeffs.get(j, (0,) * self.ctx.a)
            if any((x - y) % pm for x, y in zip(s, t)):
                return False
        return True

    def __repr__(self):
        terms = ", ".join(f"{j}/{self.den}:{t}" for j, t in sorted(self.coeffs.items())[:4])
        return f"ZqPi<{terms}{'...' if len(self.coeffs) > 4 else ''} mod (p^{self.prec}, pi^{self.cap}/{self.den})>"


def embed_int(ctx: FieldContext, c: int, prec: int):
    """Z_p scalar as a Z_q tuple."""
    return (c % ctx.p**prec,) + (0,) * (ctx.a - 1)


def e_factor(ah: ArtinHasse, ctx: FieldContext, c, prec: int, cap: int) -> ZqPi:
    """E(pi*c) for a Z_q scalar c, as a pi-series on the integer grid."""
    if ah.cap < cap:
        raise PrecisionError("kernel expansion shorter than the requested cap")
    out = {}
    cm = embed_int(ctx, 1, prec)
    for m in range(cap):
        lam = _frac_mod(ah.coeffs[m], ctx.p, prec)
        out[m] = tuple(lam * x % ctx.p**prec for x in cm)
        if m + 1 < cap:
            cm = ctx.zq_mul(cm, c, prec)
    return ZqPi(ctx, prec, cap, out, den=1)


def t_to_pi(ts: TSeries, ah: ArtinHasse, ctx: FieldContext, den: int = 1) -> ZqPi:
    """Substitute T = E(pi) - 1 into a T-series over Z_p.

    The substitution sends O(T^N) to O(pi^N), so the T-cap carries over as
    the pi-cap unchanged.
    """
    if ts.den != 1:
        raise DomainError("substitution expects a plain T-series")
    cap = min(ts.cap, ah.cap)
    prec = ts.prec
    e_minus_1 = ZqPi(
        ctx,
        prec,
        cap,
        {j: embed_int(ctx, _frac_mod(ah.coeffs[j], ctx.p, prec), prec) for j in range(1, cap)},
        den=1,
    )
    res = ZqPi(ctx, prec, cap, {}, den=1)
    for j in range(min(ts.cap, cap) - 1, -1, -1):
        res = res.mul(e_minus_1)
        c = ts.coeff(j)
        if c:
            res = res.add(ZqPi(ctx, prec, cap, {0: embed_int(ctx, c, prec)}, den=1))
    return res.rescale_den(den) if den != 1 else res


# ---------------------------------------------------------------------------
# kernel product and monomial coefficients
# ---------------------------------------------------------------------------


def _kernel_product(dd, ctx: FieldContext, factors, prec: int, cap: int):
    """Expand prod E(pi * c * x^u) over the given (c, u_reduced) factors.

    Returns {reduced exponent v: ZqPi on the integer pi-grid} holding the
    coefficient of x^v.  Every term of every factor carries at least as many
    powers of pi as its x-degree adds, so exponents reachable below the cap
    have polytope degree < cap and the state space stays finite.
    """
    ah = artin_hasse(ctx.p, cap)
    origin = (0,) * dd.rank
    acc = {origin: ZqPi(ctx, prec, cap, {0: embed_int(ctx, 1, prec)}, den=1)}
    for c, u in factors:
        fac = e_factor(ah, ctx, c, prec, cap)
        new = {}
        for v, ser in acc.items():
            lead = ser.ord_key()
            if lead is None:
                continue
            for m, t in fac.coeffs.items():
                if lead + m >= cap:
                    continue
                v2 = tuple(x + m * y for x, y in zip(v, u))
                piece = ser.shift(m).mul_zq(t)
                if piece.is_zero():
                    continue
                if v2 in new:
                    new[v2] = new[v2].add(piece)
                else:
                    new[v2] = piece
        acc = {v: s for v, s in new.items() if not s.is_zero()}
    return acc


def _grid(x: Fraction, D: int) -> int:
    k = x * D
    assert k.denominator == 1
    return int(k)


def _lifted_factors(f: LaurentPoly, dd, prec: int, power_of_p: int = 0):
    """(teichmuller(a_u)^(p^i), reduced exponent * p^i) per term, sorted."""
    ctx = f.ctx
    out = []
    for u, c in sorted(f.coeff_map().items()):
        t = teichmuller_lift(ctx, c, prec)
        if power_of_p:
            t = ctx.zq_pow(t, ctx.p**power_of_p, prec)
        ur = dd.to_reduced(u)
        assert ur is not None
        scale = ctx.p**power_of_p
        out.append((t, tuple(scale * x for x in ur)))
    return out


def _alpha_map(f: LaurentPoly, dd, B_grid: int, M: int, N_pi: int):
    """alpha coefficients on the cone prefix deg(u) <= B_grid/D, reduced keys.

    alpha_u is the coefficient of x^u in the kernel product divided by
    pi^deg(u) exactly; inexact division means the degree function and the
    expansion disagree, which is a bug worth crashing on.
    """
    D = dd.D
    cap_raw = N_pi + math.ceil(Fraction(B_grid, D)) + 1
    raw = _kernel_product(dd, f.ctx, _lifted_factors(f, dd, M), M, cap_raw)
    out = {}
    for ur, deg in dd.cone_points_upto(B_grid):
        e = _grid(deg, D)
        ser = raw.get(ur)
        if ser is None:
            out[ur] = ZqPi(f.ctx, M, N_pi * D, {}, den=D)
            continue
        alpha = ser.rescale_den(D).shift(-e)
        cap = min(alpha.cap, N_pi * D)
        out[ur] = alpha.with_cap(cap)
    return out


def e_f_expansion(f: LaurentPoly, B_needed: int, M: int, N_pi: int):
    """Public alpha map keyed by ambient exponent tuples, deg(u) <= B_needed."""
    dd = newton_data(f)
    amap = _alpha_map(f, dd, B_needed * dd.D, M, N_pi)
    return {dd.from_reduced(ur): al for ur, al in amap.items()}


# ---------------------------------------------------------------------------
# the transfer matrix
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DworkMatrix:
    """Transfer operator on the weighted monomial basis pi^deg(u) x^u,
    deg(u) <= B, rows and columns sorted by (degree, lex).

    entries[w][u] multiplies the u-th basis vector's contribution to the
    w-th; every entry satisfies ord_pi >= (p-1)*deg(row), which is asserted
    at assembly time and is what makes the finite truncation certifiable.
    """

    p: int
    a: int
    q: int
    B: int
    N_pi: int
    D: int
    ctx: FieldContext
    basis: tuple  # reduced exponent tuples
    exponents: tuple  # the same points in ambient coordinates
    degrees: tuple  # Fractions
    entries: tuple  # tuple of tuples of ZqPi, den = D

    @property
    def dim(self) -> int:
        return len(self.basis)

    def cert_cap(self) -> int:
        """Certified pi-modulus (in 1/D units) for spectral data: basis
        points beyond degree B only touch terms above (p-1)(B + 1/D)."""
        return min(self.N_pi * self.D, (self.p - 1) * (self.B * self.D + 1))


def psi_a_matrix(f: LaurentPoly, B: int, M: int, N_pi: int) -> DworkMatrix:
    """Assemble the degree-B truncation of the transfer operator.

    The kernel product g = prod_{i<a} E_{f^(sigma^i)}(x^(p^i)) is expanded
    once; the entry at (row w, column u) is the coefficient of x^(q*w - u)
    in g times pi^(deg(u) - deg(w)).
    """
    ctx = f.ctx
    p, a, q = ctx.p, ctx.a, ctx.q
    if a not in (1, 2):
        raise DomainError("operator path supports a in {1, 2}; use the sums path instead")
    if B < Fraction(N_pi, p - 1):
        raise PrecisionError(
            f"basis degree bound {B} below N_pi/(p-1) = {N_pi}/{p - 1}: matrix too small "
            "to certify the requested pi-precision"
        )
    dd = newton_data(f)
    D = dd.D
    pts = sorted(dd.cone_points_upto(B * D), key=lambda t: (t[1], t[0]))
    basis = tuple(ur for ur, _ in pts)
    degrees = tuple(d for _, d in pts)
    factors = []
    for i in range(a):
        factors.extend(_lifted_factors(f, dd, M, power_of_p=i))
    cap_raw = N_pi + B + 1
    raw = _kernel_product(dd, ctx, factors, M, cap_raw)
    zero_row = ZqPi(ctx, M, N_pi * D, {}, den=D)
    rows = []
    for w, dw in zip(basis, degrees):
        ew = _grid(dw, D)
        bound = (p - 1) * ew
        row = []
        for u, du in zip(basis, degrees):
            eu = _grid(du, D)
            v = tuple(q * x - y for x, y in zip(w, u))
            ser = raw.get(v)
            if ser is None:
                row.append(zero_row)
                continue
            lead_raw = ser.ord_key()
            if lead_raw is not None and lead_raw * D + eu - ew < bound:
                raise TheoremViolation(
                    f"entry at row {w}, column {u} has ord "
                    f"{Fraction(lead_raw * D + eu - ew, D)} below the valuation "
                    f"pattern bound {Fraction(bound, D)}"
                )
            ent = ser.rescale_den(D).shift(eu - ew)
            row.append(ent.with_cap(min(ent.cap, N_pi * D)))
        rows.append(tuple(row))
    return DworkMatrix(
        p=p,
        a=a,
        q=q,
        B=B,
        N_pi=N_pi,
        D=D,
        ctx=ctx,
        basis=basis,
        exponents=tuple(dd.from_reduced(ur) for ur in basis),
        degrees=degrees,
        entries=tuple(rows),
    )


# ---------------------------------------------------------------------------
# characteristic series and traces
# ---------------------------------------------------------------------------


def _berkowitz_vector(entries, zero: ZqPi, one: ZqPi, keep: int):
    """First keep+1 coefficients of det(1 - A*s) without any division.

    Row by row, the characteristic vector of the leading r x r block is the
    previous vector convolved with (1, -a_rr, -s_0, -s_1, ...), where s_j is
    row*block^j*column; truncating every vector at keep+1 terms is exact
    because the convolution is lower triangular.
    """
    cv = [one]
    n = len(entries)
    for r in range(1, n + 1):
        a_rr = entries[r - 1][r - 1]
        col = [entries[i][r - 1] for i in range(r - 1)]
        toep = [one, a_rr.neg()]
        for j in range(keep - 1):
            if len(toep) > keep or not col:
                break
            s_j = None
            for i in range(r - 1):
                t = entries[r - 1][i].mul(col[i])
                s_j = t if s_j is None else s_j.add(t)
            toep.append(s_j.neg())
            if j + 2 <= keep - 1:
                col = [
                    _dot_row(entries[i][: r - 1], col, zero) for i in range(r - 1)
                ]
        new_len = min(r, keep) + 1
        new = []
        for m in range(new_len):
            acc = None
            for i in range(max(0, m - len(toep) + 1), min(m, len(cv) - 1) + 1):
                t = cv[i].mul(toep[m - i]) if m - i > 0 else cv[i]
                acc = t if acc is None else acc.add(t)
            new.append(acc if acc is not None else zero)
        cv = new
    while len(cv) < keep + 1:
        cv.append(zero)
    return cv


def _dot_row(row, col, zero: ZqPi):
    acc = None
    for x, y in zip(row, col):
        t = x.mul(y)
        acc = t if acc is None else acc.add(t)
    return acc if acc is not None else zero


def char_series(Mx: DworkMatrix, deg_s: int) -> SSeries:
    """det(1 - Mx*s) up to s^deg_s, coefficients certified to the matrix's
    spectral cap."""
    if deg_s > Mx.dim:
        raise DomainError(f"deg_s={deg_s} exceeds the matrix dimension {Mx.dim}")
    zero = ZqPi(Mx.ctx, Mx.entries[0][0].prec, Mx.N_pi * Mx.D, {}, den=Mx.D)
    one = zero.one_like()
    cv = _berkowitz_vector(Mx.entries, zero, one, deg_s)
    cap = Mx.cert_cap()
    return SSeries([c.with_cap(min(c.cap, cap)) for c in cv])


def _mat_mul(A, B, zero: ZqPi):
    n = len(A)
    return [
        [_dot_row(A[i], [B[k][j] for k in range(n)], zero) for j in range(n)]
        for i in range(n)
    ]


def operator_trace(Mx: DworkMatrix, k: int) -> ZqPi:
    """Trace of the k-th power, certified to the spectral cap."""
    if k < 1:
        raise DomainError("trace wants k >= 1")
    zero = ZqPi(Mx.ctx, Mx.entries[0][0].prec, Mx.N_pi * Mx.D, {}, den=Mx.D)
    power = [list(r) for r in Mx.entries]
    for _ in range(k - 1):
        power = _mat_mul(power, [list(r) for r in Mx.entries], zero)
    acc = zero
    for i in range(Mx.dim):
        acc = acc.add(power[i][i])
    return acc.with_cap(min(acc.cap, Mx.cert_cap()))


# ---------------------------------------------------------------------------
# cross-checks against the sums route
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceCheck:
    k: int
    ok: bool
    pi_modulus: Fraction  # comparison certified below pi^pi_modulus
    p_modulus: int


def verify_trace_formula(f: LaurentPoly, k: int, B: int, M: int, N_pi: int) -> TraceCheck:
    """Compare Tr(Mx^k) with the normalized torus sum of order k.

    The two sides come from unrelated computations: one is a matrix trace
    over Z_q, the other a sum of binomial characters over torus points,
    pushed through the uniformizer change T = E(pi) - 1.
    """
    from .sums import s_f_T

    Mx = psi_a_matrix(f, B, M, N_pi)
    lhs = operator_trace(Mx, k)
    cap_pi = Fraction(lhs.cap, Mx.D)
    n_t = math.ceil(cap_pi)
    S = s_f_T(f, k, M, n_t)
    pm = f.ctx.p**M
    inv = pow((f.ctx.q**k - 1) % pm, -1, pm)
    rhs_t = S.mul_int(pow(inv, f.n, pm))
    rhs = t_to_pi(rhs_t, artin_hasse(f.ctx.p, n_t + 1), f.ctx, den=Mx.D)
    ok = lhs.agrees_with(rhs)
    prec = min(lhs.prec, rhs.prec)
    return TraceCheck(
        k=k, ok=ok, pi_modulus=min(cap_pi, Fraction(rhs.cap, Mx.D)), p_modulus=prec
    )


@dataclass(frozen=True)
class CharCrossCheck:
    ok: bool
    deg_s: int
    pi_modulus: Fraction
    p_modulus: int
    mismatches: tuple  # s-exponents where the routes disagree


def char_c_crosscheck(f: LaurentPoly, deg_s: int, B: int, M: int, N_pi: int) -> CharCrossCheck:
    """The central two-path check: det(1 - Mx*s) against the torus-sum C,
    coefficient by coefficient after the uniformizer change."""
    from .sums import c_function

    Mx = psi_a_matrix(f, B, M, N_pi)
    det_side = char_series(Mx, deg_s)
    cap = Fraction(det_side.coeffs[0].cap, Mx.D)
    n_t = math.ceil(cap)
    C = c_function(f, deg_s, M, n_t)
    ah = artin_hasse(f.ctx.p, n_t + 1)
    bad = []
    prec = M
    mod = cap
    for j, (lhs, c_t) in enumerate(zip(det_side.coeffs, C.coeffs)):
        rhs = t_to_pi(c_t, ah, f.ctx, den=Mx.D)
        if not lhs.agrees_with(rhs):
            bad.append(j)
        prec = min(prec, lhs.prec, rhs.prec)
        mod = min(mod, Fraction(min(lhs.cap, rhs.cap), Mx.D))
    return CharCrossCheck(
        ok=not bad, deg_s=deg_s, pi_modulus=mod, p_modulus=prec, mismatches=tuple(bad)
    )


# ---------------------------------------------------------------------------
# sharpness criteria: determinants mod pi^(1/D)
# ---------------------------------------------------------------------------


def _zq_unit(ctx: FieldContext, prec: int, t) -> ZqPi:
    return ZqPi(ctx, prec, 1, {0: t}, den=1)


def _det_zq(ctx: FieldContext, prec: int, grid):
    """Determinant of a matrix of Z_q tuples mod p^prec, division-free.

    Reuses the characteristic vector: det(A) = (-1)^r [s^r] det(1 - A*s).
    """
    r = len(grid)
    if r == 0:
        return embed_int(ctx, 1, prec)
    zero = ZqPi(ctx, prec, 1, {}, den=1)
    entries = [[_zq_unit(ctx, prec, t) for t in row] for row in grid]
    cv = _berkowitz_vector(entries, zero, zero.one_like(), r)
    det = cv[r].coeff(0)
    if r % 2:
        det = tuple(-c % ctx.p**prec for c in det)
    return det


def _carrier(dd, ur, deg: Fraction):
    """Indices of the height facets attaining deg(u); empty only at 0."""
    out = []
    for i, fc in enumerate(dd.facets_height):
        if Fraction(sum(a * b for a, b in zip(fc.normal, ur)), fc.offset) == deg:
            out.append(i)
    return frozenset(out)


def _alpha0(amap, dd, v):
    """alpha_v mod pi^(1/D) as a Z_q tuple, zero when v escapes the map."""
    al = amap.get(v)
    if al is None:
        return None
    return al.coeff(0) if 0 < al.cap else None


@dataclass(frozen=True)
class OrdinarinessReport:
    """Per-cutoff nonvanishing of the criterion determinants.

    verdicts[k] speaks about the minor on basis points of degree <= k/D;
    True means the determinant is a certified nonzero mod p^M, False that
    it vanishes at working precision (the criterion fails there unless
    more p-digits reveal a unit).
    """

    K: int
    D: int
    M: int
    block_sizes: tuple
    verdicts: tuple


def _criterion_data(f: LaurentPoly, dd, K: int, M: int):
    """Points, degrees, and the reduced criterion matrix entries."""
    ctx = f.ctx
    pts = sorted(dd.cone_points_upto(K), key=lambda t: (t[1], t[0]))
    p = ctx.p
    max_deg = 0
    for (w, dw), (u, du) in itertools.product(pts, pts):
        v = tuple(p * x - y for x, y in zip(w, u))
        if dd.in_cone_reduced(v):
            max_deg = max(max_deg, math.ceil(dd.degree_reduced(v)))
    amap = _alpha_map(f, dd, max_deg * dd.D, M, 1)
    zero = (0,) * ctx.a
    mat = []
    for w, dw in pts:
        row = []
        for u, du in pts:
            v = tuple(p * x - y for x, y in zip(w, u))
            if not dd.in_cone_reduced(v):
                row.append(zero)
                continue
            defect = dd.degree_reduced(v) + du - p * dw
            assert defect >= 0
            if defect > 0:
                row.append(zero)
                continue
            a0 = _alpha0(amap, dd, v)
            row.append(a0 if a0 is not None else zero)
        mat.append(row)
    return pts, mat


def ordinariness_determinants(f: LaurentPoly, K: int, M: int) -> OrdinarinessReport:
    """Nonvanishing mod pi^(1/D) of the degree-block minors.

    The k-th minor lives on cone points of degree <= k/D; its entry at
    (w, u) is alpha_{pw-u} when pw-u is cofacial with u and zero otherwise.
    All minors being nonzero is the sharpness criterion for the T-adic
    polygon against the combinatorial bound; we can only test a prefix, so
    the verdicts are per-cutoff.
    """
    if K < 0:
        raise DomainError("cutoff must be >= 0")
    dd = newton_data(f)
    ctx = f.ctx
    pts, mat = _criterion_data(f, dd, K, M)
    sizes = []
    verdicts = []
    cache = {}
    for k in range(K + 1):
        r = sum(1 for _, d in pts if d * dd.D <= k)
        sizes.append(r)
        if r not in cache:
            sub = [row[:r] for row in mat[:r]]
            cache[r] = any(_det_zq(ctx, M, sub))
        verdicts.append(cache[r])
    return OrdinarinessReport(
        K=K, D=dd.D, M=M, block_sizes=tuple(sizes), verdicts=tuple(verdicts)
    )


@dataclass(frozen=True)
class FaceVerdict:
    label: str  # the facet equality in ambient-free reduced coordinates
    vertices: tuple  # ambient exponents of f on the face
    report: OrdinarinessReport


@dataclass(frozen=True)
class FacialReport:
    whole: OrdinarinessReport
    faces: tuple  # FaceVerdict per closed codimension-1 face missing 0
    conjunction: tuple  # bool per cutoff k on the whole polytope's grid


def facial_criterion(f: LaurentPoly, K: int, M: int) -> FacialReport:
    """Face-by-face sharpness with the decomposition identities asserted.

    Splits the criterion matrix by the relatively open facial cones, checks
    the non-cofaciality valuation fact that makes the split block-triangular,
    asserts det(whole) = prod(det(blocks)) for every cutoff, and checks each
    closed face's own criterion determinant against the matching product of
    open-cone blocks.  Any mismatch is a theorem violation, i.e. a bug.
    """
    dd = newton_data(f)
    ctx = f.ctx
    pts, mat = _criterion_data(f, dd, K, M)
    whole = ordinariness_determinants(f, K, M)

    # open facial cone of each basis point: carrier facets + face dimension
    carriers = [_carrier(dd, ur, d) if d > 0 else None for ur, d in pts]
    dims = {}
    for c in set(c for c in carriers if c is not None):
        face_pts = [
            q
            for q in dd.red_points
            if all(
                sum(a * b for a, b in zip(dd.facets_height[i].normal, q))
                == dd.facets_height[i].offset
                for i in c
            )
        ]
        dims[c] = _affine_rank(face_pts)

    p = ctx.p
    for (i, (w, dw)), (j, (u, du)) in itertools.product(enumerate(pts), repeat=2):
        cw, cu = carriers[i], carriers[j]
        if cw is None or cu is None or cw == cu:
            continue
        if dims[cw] > dims[cu]:
            continue
        v = tuple(p * x - y for x, y in zip(w, u))
        if not dd.in_cone_reduced(v):
            continue
        if dd.degree_reduced(v) + du - p * dw == 0:
            raise TheoremViolation(
                f"points {w} and {u} in distinct facial cones of dimensions "
                f"{dims[cw]} <= {dims[cu]} are co-facial across the operator step"
            )

    pm = ctx.p**M

    def det_at(rows_cols):
        sub = [[mat[i][j] for j in rows_cols] for i in rows_cols]
        return _det_zq(ctx, M, sub)

    def block_product(idx):
        prod = embed_int(ctx, 1, M)
        all_nonzero = True
        for c in sorted({carriers[i] for i in idx}, key=sorted):
            block = [i for i in idx if carriers[i] == c]
            dblk = det_at(block)
            all_nonzero = all_nonzero and any(dblk)
            prod = ctx.zq_mul(prod, dblk, M)
        return prod, all_nonzero

    conjunction = []
    for k in range(K + 1):
        idx = [i for i, (_, d) in enumerate(pts) if d * dd.D <= k]
        whole_det = det_at(idx)
        prod, blocks_ok = block_product([i for i in idx if carriers[i] is not None])
        if any((x - y) % pm for x, y in zip(whole_det, prod)):
            raise TheoremViolation(
                f"cutoff {k}: whole determinant differs from the product of "
                "its facial blocks"
            )
        conjunction.append(blocks_ok)
        # a vanishing block forces the whole determinant to vanish; the
        # converse can fail mod p^M when nonzero blocks share p-divisibility
        if not blocks_ok and whole.verdicts[k]:
            raise TheoremViolation(
                f"cutoff {k}: a facial block vanishes but the whole "
                "determinant does not"
            )

    faces = []
    for face in dd.codim1_faces_no_origin():
        f_face = restrict_to_face(f, dd, face)
        dd_face = newton_data(f_face)
        K_face = int(Fraction(K, dd.D) * dd_face.D)
        rep = ordinariness_determinants(f_face, K_face, M)
        facet_index = next(
            i
            for i, fc in enumerate(dd.facets_height)
            if (fc.normal, fc.offset) == face.cuts[0]
        )
        pts_f, mat_f = _criterion_data(f_face, dd_face, K_face, M)
        for k_face in range(K_face + 1):
            t_deg = Fraction(k_face, dd_face.D)
            if (t_deg * dd.D).denominator != 1 or t_deg * dd.D > K:
                continue
            rf = sum(1 for _, d in pts_f if d <= t_deg)
            det_f = _det_zq(ctx, M, [row[:rf] for row in mat_f[:rf]])
            idx = [
                i
                for i, (_, d) in enumerate(pts)
                if d <= t_deg and carriers[i] is not None and facet_index in carriers[i]
            ]
            prod, _ = block_product(idx)
            if any((x - y) % pm for x, y in zip(det_f, prod)):
                raise TheoremViolation(
                    f"face {face.cuts[0]}: criterion determinant at cutoff "
                    f"{k_face} (its grid) differs from the matching blocks "
                    "of the whole matrix"
                )
        faces.append(
            FaceVerdict(
                label=f"<{face.cuts[0][0]}, u> = {face.cuts[0][1]}",
                vertices=tuple(sorted(f_face.exponents())),
                report=rep,
            )
        )
    return FacialReport(whole=whole, faces=tuple(faces), conjunction=tuple(conjunction))


def _affine_rank(points) -> int:
    if not points:
        return -1
    base = points[0]
    vecs = [tuple(a - b for a, b in zip(q, base)) for q in points[1:]]
    rank = 0
    rows = [list(map(Fraction, v)) for v in vecs]
    cols = len(base)
    lead = 0
    for c in range(cols):
        piv = next((r for r in range(lead, len(rows)) if rows[r][c]), None)
        if piv is None:
            continue
        rows[lead], rows[piv] = rows[piv], rows[lead]
        for r in range(len(rows)):
            if r != lead and rows[r][c]:
                fmul = rows[r][c] / rows[lead][c]
                rows[r] = [x - fmul * y for x, y in zip(rows[r], rows[lead])]
        lead += 1
        rank += 1
        if lead == len(rows):
            break
    return rank


