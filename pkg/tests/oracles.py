"""Brute-force reference implementations used only by the test suite.

Everything here is deliberately independent of the package internals:
convex-hull membership goes through Caratheodory subsets with a local
Gaussian elimination, so polytope degrees and weights can be cross-checked
against a second code path.
"""

from fractions import Fraction
from itertools import combinations


def _solve_unique(columns, target):
    """Solve the linear system with the given columns if the solution is
    unique; None when inconsistent or underdetermined."""
    rows = len(target)
    cols = len(columns)
    A = [[Fraction(columns[j][i]) for j in range(cols)] + [Fraction(target[i])] for i in range(rows)]
    pivots = []
    used = set()
    for c in range(cols):
        pr = next((i for i in range(rows) if i not in used and A[i][c] != 0), None)
        if pr is None:
            return None  # free column: not unique
        used.add(pr)
        pivots.append((pr, c))
        inv = 1 / A[pr][c]
        A[pr] = [v * inv for v in A[pr]]
        for i in range(rows):
            if i != pr and A[i][c] != 0:
                f = A[i][c]
                A[i] = [v - f * w for v, w in zip(A[i], A[pr])]
    for i in range(rows):
        if i not in used and A[i][cols] != 0:
            return None
    sol = [Fraction(0)] * cols
    for pr, c in pivots:
        sol[c] = A[pr][cols]
    return sol


def in_convex_hull(points, x):
    """Exact membership of x in conv(points) via Caratheodory subsets."""
    x = tuple(Fraction(c) for c in x)
    pts = [tuple(Fraction(c) for c in p) for p in points]
    dim = len(x)
    for size in range(1, dim + 2):
        for subset in combinations(pts, size):
            cols = [p + (Fraction(1),) for p in subset]
            lam = _solve_unique(cols, x + (Fraction(1),))
            if lam is not None and all(l >= 0 for l in lam):
                return True
    return False


def oracle_degree(delta_points, u, D, kmax):
    """min{k/D : u in (k/D)*Delta} by direct scaled-hull membership, or None."""
    u = tuple(Fraction(c) for c in u)
    for k in range(kmax + 1):
        c = Fraction(k, D)
        if c == 0:
            if all(v == 0 for v in u):
                return Fraction(0)
            continue
        scaled = [tuple(c * Fraction(v) for v in p) for p in delta_points]
        if in_convex_hull(scaled, u):
            return c
    return None


def oracle_cone_count(delta_points, D, K, box):
    """Number of integer points in the box with oracle degree <= K/D."""
    from itertools import product

    count = 0
    for u in product(*[range(-box, box + 1) for _ in delta_points[0]]):
        d = oracle_degree(delta_points, u, D, K)
        if d is not None:
            count += 1
    return count
