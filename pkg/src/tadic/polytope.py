"""Newton polytopes of Laurent polynomials and their combinatorics.

Everything here is exact: integer lattice work uses unimodular column
reduction, hyperplanes use primitive integer normals, and degrees are
Fractions.  The polytope Delta of f is the convex hull of the origin and
the exponent vectors; when that hull is lower-dimensional the lattice
points of its span are mapped to a saturated coordinate system first, so
all downstream code can assume a full-dimensional polytope.

Facet search is exhaustive over point subsets (dimensions <= 4), which
avoids any convex-hull dependency at the scales this package targets.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Optional

from .errors import DomainError, NotInConeError
from .series import NewtonPolygon


# ---------------------------------------------------------------------------
# exact integer / rational linear algebra
# ---------------------------------------------------------------------------


def integer_kernel(rows, n):
    """Basis of the lattice {x in Z^n : M x = 0} for an integer matrix M.

    Column elimination with unimodular operations tracked in U; the columns
    of U over the eliminated range form a basis of the full kernel lattice
    (saturated by construction).
    """
    M = [list(r) for r in rows]
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    col_start = 0
    for row_i in range(len(M)):
        while True:
            nz = [j for j in range(col_start, n) if M[row_i][j] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda j: abs(M[row_i][j]))
            j0, j1 = nz[0], nz[1]
            quo = M[row_i][j1] // M[row_i][j0]
            for r in range(len(M)):
                M[r][j1] -= quo * M[r][j0]
            for r in range(n):
                U[r][j1] -= quo * U[r][j0]
        nz = [j for j in range(col_start, n) if M[row_i][j] != 0]
        if nz:
            j = nz[0]
            if j != col_start:
                for r in range(len(M)):
                    M[r][col_start], M[r][j] = M[r][j], M[r][col_start]
                for r in range(n):
                    U[r][col_start], U[r][j] = U[r][j], U[r][col_start]
            col_start += 1
    return [tuple(U[r][j] for r in range(n)) for j in range(col_start, n)]


def primitive(vec):
    g = 0
    for c in vec:
        g = gcd(g, c)
    if g == 0:
        return None
    out = tuple(c // g for c in vec)
    for c in out:
        if c:
            return out if c > 0 else tuple(-x for x in out)
    return None


def solve_rational(columns, target):
    """Solve sum_j c_j * columns[j] = target exactly; None if inconsistent."""
    if not columns:
        return [] if not any(target) else None
    n = len(columns[0])
    r = len(columns)
    A = [[Fraction(columns[j][i]) for j in range(r)] + [Fraction(target[i])] for i in range(n)]
    piv_rows = []
    col = 0
    for col in range(r):
        prow = None
        for i in range(n):
            if i not in [pi for pi, _ in piv_rows] and A[i][col] != 0:
                prow = i
                break
        if prow is None:
            continue
        piv_rows.append((prow, col))
        inv = 1 / A[prow][col]
        A[prow] = [a * inv for a in A[prow]]
        for i in range(n):
            if i != prow and A[i][col] != 0:
                f = A[i][col]
                A[i] = [a - f * b for a, b in zip(A[i], A[prow])]
    sol = [Fraction(0)] * r
    for prow, col in piv_rows:
        sol[col] = A[prow][r]
    for i in range(n):
        if i not in [pi for pi, _ in piv_rows] and A[i][r] != 0:
            return None
    # rows with pivots already consistent; verify in full (cheap, exact)
    for i in range(n):
        s = sum(sol[j] * columns[j][i] for j in range(r))
        if s != target[i]:
            return None
    return sol


def saturated_span_basis(vectors, n):
    """Integer basis of span_Q(vectors) ∩ Z^n (empty list for zero span)."""
    normals = integer_kernel(vectors, n) if vectors else [tuple(int(i == j) for j in range(n)) for i in range(n)]
    if not normals:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    return integer_kernel(normals, n)


# ---------------------------------------------------------------------------
# Laurent polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LaurentPoly:
    """Laurent polynomial over F_q: exponent vectors -> nonzero coefficients.

    Coefficients are field-element tuples of ``ctx``; a polynomial supported
    only on the origin carries no geometry and is rejected.
    """

    n: int
    terms: tuple  # ((exps, coeff), ...) sorted by exps
    ctx: object = field(compare=False)

    @classmethod
    def make(cls, n, term_map, ctx):
        clean = {}
        for exps, coeff in term_map.items():
            if len(exps) != n:
                raise DomainError("exponent arity mismatch")
            if coeff == ctx.zero():
                raise DomainError("zero coefficient in Laurent polynomial")
            if exps in clean:
                raise DomainError("duplicate exponent")
            clean[tuple(int(e) for e in exps)] = coeff
        if not clean:
            raise DomainError("empty polynomial")
        if all(not any(e) for e in clean):
            raise DomainError("polynomial supported only at the origin")
        return cls(n=n, terms=tuple(sorted(clean.items())), ctx=ctx)

    def exponents(self):
        return [e for e, _ in self.terms]

    def coeff_map(self):
        return dict(self.terms)

    def partial(self, i: int) -> dict:
        """Formal partial derivative as exponent -> coefficient (may be empty).

        Distinct source exponents shift to distinct targets, so no merging
        can occur; terms with p | exponent simply drop out.
        """
        out = {}
        for exps, coeff in self.terms:
            ui = exps[i] % self.ctx.p
            if ui:
                e2 = tuple(e - (1 if j == i else 0) for j, e in enumerate(exps))
                out[e2] = tuple(c * ui % self.ctx.p for c in coeff)
        return out


# ---------------------------------------------------------------------------
# degree data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Facet:
    normal: tuple  # primitive integer normal in reduced coordinates
    offset: int  # <normal, x> <= offset on Delta; offset >= 0, 0 = through origin
    points: tuple  # reduced points of the defining set lying on the facet


@dataclass(frozen=True)
class Face:
    """Closed face of Delta: the points of the defining set it contains and
    the facet equalities cutting it out (reduced coordinates)."""

    cuts: tuple  # ((normal, offset), ...)
    points: tuple  # reduced coordinates
    contains_origin: bool


class DegreeData:
    """Polytope Delta = conv(0, exponents) with its weight function.

    deg(u) = min{c >= 0 : u in c*Delta} for lattice u in the cone over
    Delta; D is the common denominator lcm of the facet offsets; W(k)
    counts cone lattice points of degree k/D.
    """

    def __init__(self, exponents, n):
        pts = {tuple(int(c) for c in e) for e in exponents}
        pts.add((0,) * n)
        self.n = n
        self.points = tuple(sorted(pts))
        basis = saturated_span_basis([p for p in self.points if any(p)], n)
        self.rank = len(basis)
        self.basis = tuple(basis)
        if self.rank == 0:
            raise DomainError("polytope is a single point")
        self._red_cache = {}
        red = [self.to_reduced(p) for p in self.points]
        assert all(r is not None for r in red)
        self.red_points = tuple(sorted(set(red)))
        self.facets = self._find_facets()
        self.facets_origin = tuple(f for f in self.facets if f.offset == 0)
        self.facets_height = tuple(f for f in self.facets if f.offset > 0)
        if not self.facets_height:
            raise DomainError("polytope has no facet away from the origin")
        self.D = lcm(*[f.offset for f in self.facets_height])

    # -- coordinates --------------------------------------------------------

    def to_reduced(self, u) -> Optional[tuple]:
        """Integer coordinates of u in the saturated span basis, or None."""
        u = tuple(int(c) for c in u)
        if u in self._red_cache:
            return self._red_cache[u]
        sol = solve_rational(self.basis, u)
        out = None
        if sol is not None and all(s.denominator == 1 for s in sol):
            out = tuple(int(s) for s in sol)
        self._red_cache[u] = out
        return out

    def from_reduced(self, r) -> tuple:
        return tuple(sum(b[i] * c for b, c in zip(self.basis, r)) for i in range(self.n))

    # -- facets -------------------------------------------------------------

    def _find_facets(self):
        facets = _facets_of(self.red_points, self.rank)
        # origin evaluates to 0 <= offset, so offsets are never negative here
        assert all(f.offset >= 0 for f in facets)
        return tuple(sorted(facets, key=lambda f: (f.offset, f.normal)))

    # -- cone and degree ------------------------------------------------------

    def in_cone_reduced(self, ur) -> bool:
        return all(
            sum(a * b for a, b in zip(f.normal, ur)) <= 0 for f in self.facets_origin
        )

    def degree_reduced(self, ur) -> Fraction:
        if not self.in_cone_reduced(ur):
            raise NotInConeError(f"{ur} violates a through-origin facet")
        best = Fraction(0)
        for f in self.facets_height:
            val = Fraction(sum(a * b for a, b in zip(f.normal, ur)), f.offset)
            if val > best:
                best = val
        return best

    def degree_of(self, u) -> Fraction:
        ur = self.to_reduced(u)
        if ur is None:
            raise NotInConeError(f"{tuple(u)} is outside the span of the polytope")
        return self.degree_reduced(ur)

    def cofacial_defect(self, u, v) -> Fraction:
        return self.degree_of(u) + self.degree_of(v) - self.degree_of(tuple(a + b for a, b in zip(u, v)))

    # -- lattice point enumeration --------------------------------------------

    def cone_points_upto(self, K: int):
        """All reduced lattice points with degree <= K/D, with their degrees."""
        scale = Fraction(K, self.D)
        los = [0] * self.rank
        his = [0] * self.rank
        for p in self.red_points:
            for i, c in enumerate(p):
                v = c * scale
                los[i] = min(los[i], v)
                his[i] = max(his[i], v)
        ranges = [
            range(math.floor(lo), math.ceil(hi) + 1) for lo, hi in zip(los, his)
        ]
        out = []
        for ur in itertools.product(*ranges):
            if not self.in_cone_reduced(ur):
                continue
            d = self.degree_reduced(ur)
            if d <= scale:
                out.append((ur, d))
        return out

    def weight_counts(self, K: int):
        """W(k) for k = 0..K: cone lattice points of degree exactly k/D."""
        W = [0] * (K + 1)
        for _, d in self.cone_points_upto(K):
            k = d * self.D
            assert k.denominator == 1
            if k <= K:
                W[int(k)] += 1
        return W

    # -- faces ------------------------------------------------------------------

    def closed_faces(self):
        """All nonempty proper closed faces, including the facets themselves."""
        seen = {}
        for size in range(1, len(self.facets) + 1):
            for combo in itertools.combinations(self.facets, size):
                pts = tuple(
                    p
                    for p in self.red_points
                    if all(
                        sum(a * b for a, b in zip(f.normal, p)) == f.offset
                        for f in combo
                    )
                )
                if not pts or pts in seen:
                    continue
                seen[pts] = Face(
                    cuts=tuple((f.normal, f.offset) for f in combo),
                    points=pts,
                    contains_origin=all(f.offset == 0 for f in combo),
                )
        return tuple(seen.values())

    def codim1_faces_no_origin(self):
        out = []
        for f in self.facets_height:
            out.append(
                Face(cuts=((f.normal, f.offset),), points=f.points, contains_origin=False)
            )
        return tuple(out)

    def face_contains(self, face: Face, u) -> bool:
        ur = self.to_reduced(u)
        if ur is None:
            return False
        return all(
            sum(a * b for a, b in zip(nl, ur)) == off for nl, off in face.cuts
        )

    # -- volume -------------------------------------------------------------------

    def normalized_volume(self) -> int:
        if self.n > 4:
            raise DomainError("volume supported for dimension <= 4")
        return _nvol(self.red_points, self.rank)


def _nvol(points, rank) -> int:
    """rank! times the volume of conv(points) in its own lattice."""
    points = sorted(set(points))
    if rank == 0:
        return 1
    if rank == 1:
        vals = [p[0] for p in points]
        return max(vals) - min(vals)
    base = points[0]
    total = 0
    for f in _facets_of(points, rank):
        height = sum(a * b for a, b in zip(f.normal, base)) - f.offset
        if height == 0:
            continue
        shifted = [tuple(a - b for a, b in zip(p, f.points[0])) for p in f.points]
        sub = saturated_span_basis([s for s in shifted if any(s)], rank)
        red = []
        for s in shifted:
            sol = solve_rational(sub, s)
            assert sol is not None and all(x.denominator == 1 for x in sol)
            red.append(tuple(int(x) for x in sol))
        total += abs(height) * _nvol(red, len(sub))
    return total


def _facets_of(points, rank):
    out = {}
    for subset in itertools.combinations(points, rank):
        diffs = [tuple(a - b for a, b in zip(s, subset[0])) for s in subset[1:]]
        normals = integer_kernel(diffs, rank)
        if len(normals) != 1:
            continue
        l = primitive(normals[0])
        if l is None:
            continue
        c = sum(a * b for a, b in zip(l, subset[0]))
        vals = [sum(a * b for a, b in zip(l, p)) for p in points]
        if all(v <= c for v in vals):
            key = (l, c)
        elif all(v >= c for v in vals):
            key = (tuple(-x for x in l), -c)
        else:
            continue
        if key not in out:
            ln, cn = key
            out[key] = Facet(
                normal=ln,
                offset=cn,
                points=tuple(p for p in points if sum(a * b for a, b in zip(ln, p)) == cn),
            )
    return tuple(out.values())


def newton_data(f: LaurentPoly) -> DegreeData:
    return DegreeData(f.exponents(), f.n)


# ---------------------------------------------------------------------------
# Hodge polygons
# ---------------------------------------------------------------------------


def hodge_polygon(dd: DegreeData, p: int, a: int, K: int) -> NewtonPolygon:
    """q-normalized combinatorial polygon: width W(k), slope a(p-1)k/D."""
    W = dd.weight_counts(K)
    verts = [(Fraction(0), Fraction(0))]
    x = y = Fraction(0)
    scale = Fraction(a * (p - 1), dd.D)
    for k, w in enumerate(W):
        if w:
            x += w
            y += w * scale * k
            verts.append((x, y))
    return NewtonPolygon(vertices=tuple(verts), certified_upto=x)


def hodge_polygon_absolute(dd: DegreeData, K: int) -> NewtonPolygon:
    """Absolute variant with slope k/D of width W(k); q-variant = a(p-1) times this."""
    W = dd.weight_counts(K)
    verts = [(Fraction(0), Fraction(0))]
    x = y = Fraction(0)
    for k, w in enumerate(W):
        if w:
            x += w
            y += w * Fraction(k, dd.D)
            verts.append((x, y))
    return NewtonPolygon(vertices=tuple(verts), certified_upto=x)


def hodge_polygon_to_width(dd: DegreeData, p: int, a: int, width: int):
    """Smallest-depth q-Hodge polygon whose horizontal extent is >= width."""
    K = dd.D
    while True:
        P = hodge_polygon(dd, p, a, K)
        if P.last_x >= width:
            return P
        K += dd.D


def hodge_ray(P: NewtonPolygon, start_x: int):
    """A proven linear lower bound (start, value, slope) for the polygon's
    extension beyond start_x: convexity makes the last incident slope a safe
    underestimate of every later slope."""
    x = Fraction(start_x)
    if x > P.last_x:
        raise DomainError("ray start beyond computed polygon")
    v0 = P.value_at(x)
    slope = None
    for (x0, y0), (x1, y1) in zip(P.vertices, P.vertices[1:]):
        if x0 <= x < x1 or (x == P.last_x and x1 == x):
            slope = Fraction(y1 - y0, x1 - x0)
    assert slope is not None
    return (x, v0, slope)


# ---------------------------------------------------------------------------
# non-degeneracy
# ---------------------------------------------------------------------------


def restrict_to_face(f: LaurentPoly, dd: DegreeData, face: Face) -> LaurentPoly:
    kept = {e: c for e, c in f.terms if dd.face_contains(face, e)}
    if not kept or all(not any(e) for e in kept):
        raise DomainError("empty face restriction")
    return LaurentPoly.make(f.n, kept, f.ctx)


def _face_poly_verdict(f: LaurentPoly, dd: DegreeData, face: Face, r_max: int):
    """(status, witness) for one face: 'pass' (definitive), 'degenerate',
    or 'open' (bounded search found nothing)."""
    ctx = f.ctx
    kept = [(e, c) for e, c in f.terms if dd.face_contains(face, e)]
    partials = []
    for i in range(f.n):
        d = {}
        for exps, coeff in kept:
            ui = exps[i] % ctx.p
            if ui:
                e2 = tuple(e - (1 if j == i else 0) for j, e in enumerate(exps))
                c2 = tuple(c * ui % ctx.p for c in coeff)
                if e2 in d:
                    s = ctx.add(d[e2], c2)
                    if s == ctx.zero():
                        del d[e2]
                    else:
                        d[e2] = s
                else:
                    d[e2] = c2
        partials.append(d)
    if all(not d for d in partials):
        # every gradient component vanishes identically: all of the torus
        return "degenerate", ("all-ones", 1)
    if any(len(d) == 1 for d in partials):
        # a single-monomial partial never vanishes on the torus
        return "pass", None
    # brute search over (F_{q^r}^x)^n
    for r in range(1, r_max + 1):
        big = ctx.ext(r)
        phi = ctx.embed_into(big)
        lifted = [
            {e: phi(c) for e, c in d.items()} for d in partials if d
        ]
        units = []
        g = big.generator
        cur = big.one()
        for _ in range(big.q - 1):
            units.append(cur)
            cur = big.mul(cur, g)
        for point in itertools.product(units, repeat=f.n):
            ok = True
            for d in lifted:
                acc = big.zero()
                for e, c in d.items():
                    mono = c
                    for xi, ei in zip(point, e):
                        mono = big.mul(mono, big.pow(xi, ei))
                    acc = big.add(acc, mono)
                if acc != big.zero():
                    ok = False
                    break
            if ok:
                return "degenerate", (tuple(big.encode(x) for x in point), r)
    return "open", None


def is_nondegenerate(f: LaurentPoly, r_max: int = 2):
    """'nondegenerate' | ('degenerate', witness) | 'unknown'.

    Definitive passes come from monomial certificates (a face whose gradient
    has a single-monomial component cannot vanish on the torus); otherwise a
    bounded torus search either finds a witness or leaves the face open.
    """
    dd = newton_data(f)
    all_pass = True
    for face in dd.closed_faces():
        if face.contains_origin:
            continue
        status, witness = _face_poly_verdict(f, dd, face, r_max)
        if status == "degenerate":
            return ("degenerate", witness)
        if status == "open":
            all_pass = False
    return "nondegenerate" if all_pass else "unknown"


# ---------------------------------------------------------------------------
# the exponent of the degree monoid
# ---------------------------------------------------------------------------


def exponent_I(dd: DegreeData, search_bound: int):
    """Smallest d <= search_bound with d*M(Delta) inside the monoid generated
    by degree-1 lattice points, checked on the finite generating region of
    degree <= rank (monoid generators all live there); '>= bound' as a string
    when no d works."""
    gens = [ur for ur, d in dd.cone_points_upto(dd.D) if d == 1]
    if not gens:
        return f">= {search_bound}"
    region = [ur for ur, d in dd.cone_points_upto(dd.rank * dd.D) if d > 0]
    for d in range(1, search_bound + 1):
        cap = Fraction(d * dd.rank + 2)
        members = {(0,) * dd.rank}
        frontier = [(0,) * dd.rank]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = tuple(a + b for a, b in zip(x, g))
                    if y in members:
                        continue
                    if dd.degree_reduced(y) <= cap:
                        members.add(y)
                        nxt.append(y)
            frontier = nxt
        if all(tuple(d * c for c in ur) in members for ur in region):
            return d
    return f">= {search_bound}"
