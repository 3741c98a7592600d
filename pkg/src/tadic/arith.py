"""Finite fields with a deterministic presentation, their unramified p-adic
lifts, Teichmuller points, traces, the (1+T)^t binomial series, and the
cyclotomic rings Z_p[zeta_{p^m}] presented pi-adically.

Field elements are plain tuples of ints mod p in the power basis of a fixed
defining polynomial; the same integer polynomial lifted to Z/p^M presents the
unramified extension, so reduction mod p is literally coefficientwise.  All
constructions are deterministic functions of (p, a): the defining polynomial
is the lexicographically smallest monic irreducible (ordered by the integer
encoding sum c_i p^i of its non-leading coefficients) and the generator is
the smallest element of full multiplicative order.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import DomainError, IntegralityError, PrecisionError, TheoremViolation
from .series import TSeries, vp, vp_factorial


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_factors(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomial helpers over F_p (dense int lists, low degree first) --------


def _poly_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_mulmod(A, B, f, p):
    out = [0] * (len(A) + len(B) - 1)
    for i, a in enumerate(A):
        if a:
            for j, b in enumerate(B):
                out[i + j] = (out[i + j] + a * b) % p
    d = len(f) - 1
    for i in range(len(out) - 1, d - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for j in range(d):
                out[i - d + j] = (out[i - d + j] - c * f[j]) % p
    return _poly_trim(out[:d])


def _poly_powmod_x(e: int, f, p):
    """x^e mod f over F_p."""
    result = [1]
    base = [0, 1]
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, f, p)
        base = _poly_mulmod(base, base, f, p)
        e >>= 1
    return result


def _poly_gcd(A, B, p):
    A = _poly_trim(list(A))
    B = _poly_trim(list(B))
    while B:
        inv = pow(B[-1], -1, p)
        while A and len(A) >= len(B):
            c = A[-1] * inv % p
            shift = len(A) - len(B)
            for j in range(len(B)):
                A[shift + j] = (A[shift + j] - c * B[j]) % p
            A = _poly_trim(A)
        A, B = B, A
    return A or [0]


def _is_irreducible(low, p):
    """Monic f = x^a + sum low[i] x^i irreducible over F_p."""
    a = len(low)
    f = list(low) + [1]
    if a == 1:
        return True
    # x^(p^a) = x mod f, and x^(p^(a/l)) - x coprime to f for prime l | a
    if _poly_trim(list(_poly_powmod_x(p**a, f, p))) != [0, 1]:
        return False
    for l in prime_factors(a):
        g = list(_poly_powmod_x(p ** (a // l), f, p))
        while len(g) < 2:
            g.append(0)
        g[1] = (g[1] - 1) % p
        if len(_poly_gcd(g, f, p)) > 1:
            return False
    return True


class FieldContext:
    """Deterministic presentation of F_q, q = p^a, with its Z_q lift.

    Elements are tuples of length a (ints mod p).  The integer encoding
    sum c_i p^i orders elements and drives every deterministic search.
    """

    def __init__(self, p: int, a: int):
        if not is_prime(p):
            raise DomainError(f"p={p} is not prime")
        if a < 1 or p**a > 2**20:
            raise DomainError(f"unsupported field size p^a = {p}^{a}")
        self.p = p
        self.a = a
        self.q = p**a
        self.poly_low = self._find_poly()
        self._rows_fp = self._reduction_rows(p)
        self.generator = self._find_generator()
        self._zq_rows_cache = {}
        self._ext_cache = {}
        self._embed_cache = {}

    def _find_poly(self):
        p, a = self.p, self.a
        for enc in range(p**a):
            low = tuple(enc // p**i % p for i in range(a))
            if _is_irreducible(low, p):
                return low
        raise TheoremViolation("no irreducible polynomial found")

    def _reduction_rows(self, modulus):
        """Row i = x^(a+i) mod f, coefficients mod ``modulus``."""
        a = self.a
        rows = []
        cur = [(-c) % modulus for c in self.poly_low]  # x^a
        for _ in range(a - 1):
            rows.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                for j in range(a):
                    cur[j] = (cur[j] - top * self.poly_low[j]) % modulus
        rows.append(tuple(cur))
        return rows  # rows[i] for i in 0..a-1 covers x^a .. x^(2a-2) (and one spare)

    def _find_generator(self):
        facs = prime_factors(self.q - 1) if self.q > 2 else []
        for enc in range(1, self.q):
            g = self.decode(enc)
            if self.pow(g, self.q - 1) != self.one():
                continue
            if all(self.pow(g, (self.q - 1) // l) != self.one() for l in facs):
                return g
        raise TheoremViolation("no multiplicative generator found")

    # -- element plumbing --------------------------------------------------

    def zero(self):
        return (0,) * self.a

    def one(self):
        return (1,) + (0,) * (self.a - 1)

    def from_int(self, c: int):
        return (c % self.p,) + (0,) * (self.a - 1)

    def encode(self, x) -> int:
        return sum(c * self.p**i for i, c in enumerate(x))

    def decode(self, enc: int):
        return tuple(enc // self.p**i % self.p for i in range(self.a))

    def elements(self):
        for enc in range(self.q):
            yield self.decode(enc)

    # -- F_q arithmetic ----------------------------------------------------

    def add(self, x, y):
        return tuple((u + v) % self.p for u, v in zip(x, y))

    def sub(self, x, y):
        return tuple((u - v) % self.p for u, v in zip(x, y))

    def neg(self, x):
        return tuple(-u % self.p for u in x)

    def mul(self, x, y):
        a, p = self.a, self.p
        conv = [0] * (2 * a - 1)
        for i, u in enumerate(x):
            if u:
                for j, v in enumerate(y):
                    conv[i + j] += u * v
        out = conv[:a]
        for i in range(a, 2 * a - 1):
            c = conv[i]
            if c:
                row = self._rows_fp[i - a]
                for j in range(a):
                    out[j] += c * row[j]
        return tuple(c % p for c in out)

    def pow(self, x, e: int):
        if e < 0:
            if x == self.zero():
                raise ZeroDivisionError
            e %= self.q - 1
        acc = self.one()
        base = x
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc

    def inv(self, x):
        return self.pow(x, self.q - 2)

    def eval_int_poly(self, int_coeffs, x):
        """Evaluate a Z[y] polynomial (low-first int list) at a field element."""
        acc = self.zero()
        for c in reversed(int_coeffs):
            acc = self.add(self.mul(acc, x), self.from_int(c))
        return acc

    # -- towers and embeddings ----------------------------------------------

    def ext(self, k: int) -> "FieldContext":
        """The deterministic context for F_{q^k} = F_{p^(ak)}."""
        if k == 1:
            return self
        if k not in self._ext_cache:
            self._ext_cache[k] = FieldContext(self.p, self.a * k)
        return self._ext_cache[k]

    def embed_into(self, big: "FieldContext"):
        """Field embedding F_q -> F_{p^(big.a)} as a function on tuples.

        Sends the power-basis root to the smallest-encoded root of our
        defining polynomial in the big field; any root works, the choice
        only pins determinism.
        """
        key = big.a
        if key in self._embed_cache:
            return self._embed_cache[key]
        if big.a % self.a:
            raise DomainError("no embedding: degree does not divide")
        defining = list(self.poly_low) + [1]
        root = None
        for y in big.elements():
            if big.eval_int_poly(defining, y) == big.zero():
                root = y
                break
        if root is None:
            raise TheoremViolation("embedding root not found")
        powers = [big.one()]
        for _ in range(self.a - 1):
            powers.append(big.mul(powers[-1], root))

        def phi(x):
            acc = big.zero()
            for c, pw in zip(x, powers):
                if c:
                    acc = big.add(acc, tuple(c * t % big.p for t in pw))
            return acc

        self._embed_cache[key] = phi
        return phi

    # -- Z_q arithmetic at precision M ---------------------------------------

    def _zq_rows(self, prec: int):
        if prec not in self._zq_rows_cache:
            self._zq_rows_cache[prec] = self._reduction_rows(self.p**prec)
        return self._zq_rows_cache[prec]

    def zq_from_field(self, x):
        return tuple(x)

    def zq_add(self, x, y, prec):
        pm = self.p**prec
        return tuple((u + v) % pm for u, v in zip(x, y))

    def zq_mul(self, x, y, prec):
        a = self.a
        pm = self.p**prec
        conv = [0] * (2 * a - 1)
        for i, u in enumerate(x):
            if u:
                for j, v in enumerate(y):
                    conv[i + j] += u * v
        out = conv[:a]
        rows = self._zq_rows(prec)
        for i in range(a, 2 * a - 1):
            c = conv[i] % pm
            if c:
                row = rows[i - a]
                for j in range(a):
                    out[j] += c * row[j]
        return tuple(c % pm for c in out)

    def zq_pow(self, x, e: int, prec):
        acc = (1,) + (0,) * (self.a - 1)
        base = x
        while e:
            if e & 1:
                acc = self.zq_mul(acc, base, prec)
            base = self.zq_mul(base, base, prec)
            e >>= 1
        return acc

    def zq_trace(self, x, prec) -> int:
        """Trace of multiplication-by-x in the power basis (= field trace)."""
        pm = self.p**prec
        rows = self._zq_rows(prec)
        cur = x  # x * y^0
        tr = 0
        for j in range(self.a):
            tr += cur[j]
            if j + 1 < self.a:
                top = cur[-1]
                nxt = [0] + list(cur[:-1])
                if top:
                    row = rows[0]
                    for i in range(self.a):
                        nxt[i] = nxt[i] + top * row[i]
                cur = tuple(c % pm for c in nxt)
        return tr % pm


def teichmuller_lift(ctx: FieldContext, x, prec: int):
    """The root-of-unity (or zero) lift of x to Z_q mod p^prec.

    Fixed point of t -> t^q starting from the coefficientwise lift; each
    iteration at least doubles the p-adic agreement, and convergence within
    prec+2 rounds is a hard invariant.
    """
    t = tuple(x)
    for _ in range(prec + 2):
        t2 = ctx.zq_pow(t, ctx.q, prec)
        if t2 == t:
            return t
        t = t2
    raise TheoremViolation("Teichmuller iteration did not converge")


def frob_power(ctx: FieldContext, c, i: int):
    """c^(p^i); on Teichmuller coefficients this realizes the i-th Frobenius."""
    return ctx.pow(c, ctx.p**i)


def binomial_guard(N: int, p: int) -> int:
    """Extra p-digits the binomial series needs on its exponent: ord_p((N-1)!)."""
    return vp_factorial(max(N - 1, 0), p)


def one_plus_T_pow(t: int, p: int, M_out: int, N: int, t_prec: int) -> TSeries:
    """(1+T)^t as sum binom(t,j) T^j for j < N, coefficients mod p^M_out.

    t is a residue mod p^t_prec; binom(t,j) = t(t-1)...(t-j+1)/j! loses
    ord_p(j!) digits, so t_prec must cover M_out plus the worst-case loss.
    """
    need = M_out + binomial_guard(N, p)
    if t_prec < need:
        raise PrecisionError(
            f"exponent known mod p^{t_prec} but binomials to T^{N} need p^{need}"
        )
    big = p**t_prec
    out_mod = p**M_out
    coeffs = {0: 1}
    falling = 1
    fact_v, fact_unit = 0, 1
    for j in range(1, N):
        falling = falling * (t - (j - 1)) % big
        fact_v += vp(j, p) if j % p == 0 else 0
        fact_unit = fact_unit * (j // p ** (vp(j, p) if j % p == 0 else 0)) % big
        pv = p**fact_v
        if falling % pv:
            raise IntegralityError(f"binom(t,{j}) not p-integral at working precision")
        coeffs[j] = (falling // pv) * pow(fact_unit, -1, out_mod) % out_mod
    return TSeries(p, M_out, N, coeffs)


# ---------------------------------------------------------------------------
# Cyclotomic rings Z_p[zeta_{p^m}] = Z_p[pi]/(Phi_{p^m}(1+pi))
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _cyc_modulus(p: int, m: int):
    """Non-leading coefficients of Phi_{p^m}(1+x), a monic Eisenstein
    polynomial of degree e = p^(m-1)(p-1) with constant term p."""
    e = p ** (m - 1) * (p - 1)
    # Phi_{p^m}(y) = sum_{i<p} y^(i p^(m-1)); substitute y = 1+x
    coeffs = [0] * (e + 1)
    pot = [1]  # (1+x)^0
    k = 0
    for i in range(p):
        target = i * p ** (m - 1)
        while k < target:
            nxt = [0] * (len(pot) + 1)
            for d, c in enumerate(pot):
                nxt[d] += c
                nxt[d + 1] += c
            pot = nxt
            k += 1
        for d, c in enumerate(pot):
            coeffs[d] += c
    assert coeffs[e] == 1 and coeffs[0] == p
    return tuple(coeffs[:e])


class CycContext:
    """The ring Z_p[pi] with pi = zeta_{p^m} - 1, elements mod p^prec."""

    def __init__(self, p: int, m: int):
        if m < 1:
            raise DomainError("character level m must be >= 1")
        self.p = p
        self.m = m
        self.e = p ** (m - 1) * (p - 1)
        self.mod_low = _cyc_modulus(p, m)
        self._rows_cache = {}

    def _rows(self, prec: int):
        if prec not in self._rows_cache:
            pm = self.p**prec
            e = self.e
            rows = []
            cur = [(-c) % pm for c in self.mod_low]  # pi^e
            for _ in range(e):
                rows.append(tuple(cur))
                top = cur[-1]
                cur = [0] + cur[:-1]
                if top:
                    for j in range(e):
                        cur[j] = (cur[j] - top * self.mod_low[j]) % pm
            self._rows_cache[prec] = rows
        return self._rows_cache[prec]

    def zero(self, prec):
        return CycElement(self, prec, (0,) * self.e)

    def one(self, prec):
        return CycElement(self, prec, (1,) + (0,) * (self.e - 1))

    def from_int(self, c, prec):
        return CycElement(self, prec, (c % self.p**prec,) + (0,) * (self.e - 1))

    def pi(self, prec):
        if self.e == 1:
            # p=2, m=1: pi = -2 since zeta_2 = -1
            return CycElement(self, prec, (-2 % 2**prec,))
        return CycElement(self, prec, (0, 1) + (0,) * (self.e - 2))

    def zeta(self, prec):
        return self.one(prec).add(self.pi(prec))


class CycElement:
    """Element of Z_p[pi]/(Phi_{p^m}(1+pi)) with coefficients mod p^prec.

    pi is a uniformizer with e * ord_p(pi) = 1, so valuations of the basis
    monomials c_i pi^i are pairwise distinct mod e and the valuation of a
    sum is exactly the minimum: truncated coefficients still give exact
    valuations below the cap e*prec.
    """

    __slots__ = ("ctx", "prec", "coeffs")

    def __init__(self, ctx: CycContext, prec: int, coeffs):
        if prec <= 0:
            raise PrecisionError(f"no certified p-digits left (prec={prec})")
        self.ctx = ctx
        self.prec = prec
        pm = ctx.p**prec
        self.coeffs = tuple(c % pm for c in coeffs)

    def zero_like(self):
        return self.ctx.zero(self.prec)

    def one_like(self):
        return self.ctx.one(self.prec)

    def is_zero(self):
        return not any(self.coeffs)

    def is_one(self):
        return self.coeffs[0] == 1 and not any(self.coeffs[1:])

    def _common_prec(self, other):
        if self.ctx.p != other.ctx.p or self.ctx.m != other.ctx.m:
            raise DomainError("cyclotomic elements from different rings")
        return min(self.prec, other.prec)

    def add(self, other):
        prec = self._common_prec(other)
        return CycElement(self.ctx, prec, tuple(u + v for u, v in zip(self.coeffs, other.coeffs)))

    def sub(self, other):
        prec = self._common_prec(other)
        return CycElement(self.ctx, prec, tuple(u - v for u, v in zip(self.coeffs, other.coeffs)))

    def neg(self):
        return CycElement(self.ctx, self.prec, tuple(-c for c in self.coeffs))

    def mul(self, other):
        prec = self._common_prec(other)
        e = self.ctx.e
        pm = self.ctx.p**prec
        conv = [0] * (2 * e - 1)
        for i, u in enumerate(self.coeffs):
            if u:
                for j, v in enumerate(other.coeffs):
                    conv[i + j] += u * v
        out = conv[:e]
        rows = self.ctx._rows(prec)
        for i in range(e, 2 * e - 1):
            c = conv[i] % pm
            if c:
                row = rows[i - e]
                for j in range(e):
                    out[j] += c * row[j]
        return CycElement(self.ctx, prec, tuple(c % pm for c in out))

    def mul_int(self, c: int):
        return CycElement(self.ctx, self.prec, tuple(v * c for v in self.coeffs))

    def divexact_int(self, k: int):
        if k == 0:
            raise ZeroDivisionError
        sign = -1 if k < 0 else 1
        k = abs(k)
        p = self.ctx.p
        v = vp(k, p) if k % p == 0 else 0
        unit = k // p**v
        new_prec = self.prec - v
        if new_prec <= 0:
            raise PrecisionError(f"division by {sign * k} exhausts p-precision {self.prec}")
        pv = p**v
        pm = p**new_prec
        inv = pow(unit, -1, pm)
        out = []
        for c in self.coeffs:
            if c % pv:
                raise IntegralityError(f"cyclotomic coefficient not divisible by {p}^{v}")
            out.append((c // pv) * inv * sign)
        return CycElement(self.ctx, new_prec, tuple(out))

    def pow_int(self, e: int):
        if e < 0:
            raise DomainError("negative powers not supported in the pi-ring")
        acc = self.one_like()
        base = self
        while e:
            if e & 1:
                acc = acc.mul(base)
            base = base.mul(base) if e > 1 else base
            e >>= 1
        return acc

    def ord(self):
        """Exact pi-adic valuation (ord(pi) = 1), or None if >= cap e*prec."""
        e, p = self.ctx.e, self.ctx.p
        best = None
        for i, c in enumerate(self.coeffs):
            if c:
                val = e * vp(c, p) + i
                if best is None or val < best:
                    best = val
        return best

    def val_data(self):
        cap = Fraction(self.ctx.e * self.prec)
        o = self.ord()
        return (Fraction(o) if o is not None else None), cap

    def __eq__(self, other):
        if not isinstance(other, CycElement):
            return NotImplemented
        return (
            self.ctx.p == other.ctx.p
            and self.ctx.m == other.ctx.m
            and self.prec == other.prec
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.m, self.prec, self.coeffs))

    def __repr__(self):
        return f"CycElement(p={self.ctx.p}, m={self.ctx.m}, prec={self.prec}, {self.coeffs})"


def specialize_tseries(ts: TSeries, cyc: CycContext, prec_out: int) -> CycElement:
    """Substitute T = pi into a T-series: certified when the truncation tail
    T^cap lands below p^prec_out, i.e. cap >= e * prec_out."""
    if ts.den != 1:
        raise DomainError("can only specialize integer-exponent T-series")
    if ts.cap < cyc.e * prec_out:
        raise PrecisionError(
            f"T-truncation {ts.cap} too short: T=pi needs >= {cyc.e * prec_out}"
        )
    prec = min(ts.prec, prec_out)
    acc = cyc.zero(prec)
    piv = cyc.pi(prec)
    for j in range(ts.cap - 1, 0, -1):
        acc = acc.add(cyc.from_int(ts.coeff(j), prec))
        acc = acc.mul(piv)
    return acc.add(cyc.from_int(ts.coeff(0), prec))
