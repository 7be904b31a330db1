"""Independent brute-force references the library is checked against."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product


def fold_degrees(values, cod):
    """Every k for which some choice of turning indices witnesses a fold."""
    n, top = len(values), cod - 1
    ks = set()
    interior = range(1, n - 1)
    for r in range(0, n - 1):
        for mids in combinations(interior, r):
            idx = (0,) + mids + (n - 1,)
            ok = True
            for j, (a, b) in enumerate(zip(idx, idx[1:])):
                seg = values[a : b + 1]
                up = j % 2 == 0
                want_end = top if up else 0
                if values[a] != (0 if up else top) or values[b] != want_end:
                    ok = False
                    break
                steps = [y - x for x, y in zip(seg, seg[1:])]
                if any((s < 0) if up else (s > 0) for s in steps):
                    ok = False
                    break
            if ok:
                ks.add(len(idx) - 1)
    return ks


def is_epi(values, cod):
    if not values or values[0] != 0:
        return False
    if any(abs(b - a) > 1 for a, b in zip(values, values[1:])):
        return False
    if set(values) != set(range(cod)):
        return False
    edges = {frozenset((a, b)) for a, b in zip(values, values[1:]) if a != b}
    if len(edges) != cod - 1:
        return False
    return bool(fold_degrees(values, cod))


def epi_filter(n, m, degree=None):
    """All value strings [n] -> [m] that pass the brute-force check, in lexicographic order."""
    out = []
    for vals in product(range(m), repeat=n):
        if is_epi(vals, m) and (degree is None or degree in fold_degrees(vals, m)):
            out.append(vals)
    return out


def brute_degree(values, cod):
    ks = fold_degrees(values, cod)
    assert len(ks) == 1, ks
    return ks.pop()


def good_coloring_exists(n, k, m, d):
    """Any d-coloring of k-subsets of range(n) without a monochromatic m-subset, by trying them all."""
    subsets = list(combinations(range(n), k))
    msets = [[subsets.index(t) for t in combinations(M, k)] for M in combinations(range(n), m)]
    for colors in product(range(d), repeat=len(subsets)):
        if not any(len({colors[i] for i in M}) == 1 for M in msets):
            return True
    return False


def _q(x):
    return Fraction(int(x.numerator), int(x.denominator))


def pl_eval(points, x):
    """Evaluate a breakpoint list at x by linear interpolation, in plain Fractions."""
    x = _q(x)
    pts = [(_q(a), _q(b)) for a, b in points]
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if x0 <= x <= x1:
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    raise ValueError(x)


def two_adic(k):
    r = 0
    while k % 2 == 0:
        k //= 2
        r += 1
    return r
