"""Exact piecewise-linear open maps of [0, 1] and fine chain covers.

All arithmetic is exact rational (``gmpy2.mpq``, which compares and hashes equal
to :class:`fractions.Fraction`); chain conditions are strict inequalities and
are certified exactly, never approximated.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from gmpy2 import mpq as Q

from .errors import InvalidPLMap, NoContainingLink, OverlapTooLarge
from .lingraph import Morphism, change_positions

__all__ = [
    "PLOpenMap",
    "tent",
    "pl_identity",
    "pl_degree",
    "pl_compose",
    "commute_check",
    "sup_distance",
    "lift",
    "Chain",
    "fine_chain",
    "chain_report",
    "ChainTower",
    "refine_chain",
    "chain_tower",
    "tower_report",
    "discretize",
]

Point = tuple[Q, Q]


def _frac(x) -> Q:
    if isinstance(x, (list, tuple)):
        return Q(int(x[0]), int(x[1]))
    if isinstance(x, str):
        return Q(x)
    if hasattr(x, "numerator"):
        return Q(x.numerator, x.denominator)
    return Q(x)


def _pair(x) -> list[int]:
    return [int(x.numerator), int(x.denominator)]


def _sign(x: Q) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class PLOpenMap:
    """A continuous open surjection ``[0,1] -> [0,1]`` fixing 0, linear between breakpoints.

    Breakpoints are stored without collinear interior points, so two maps are
    equal exactly when they agree as functions.  Every lap (maximal monotone
    stretch) runs all the way from 0 to 1 or back; the number of laps is the degree.
    """

    breakpoints: tuple[Point, ...]
    laps: tuple[Q, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = [(_frac(x), _frac(y)) for x, y in self.breakpoints]
        if len(pts) < 2:
            raise InvalidPLMap("need at least two breakpoints")
        if pts[0][0] != 0 or pts[-1][0] != 1:
            raise InvalidPLMap("breakpoints must start at x=0 and end at x=1")
        if pts[0][1] != 0:
            raise InvalidPLMap("the map must send 0 to 0")
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if not x0 < x1:
                raise InvalidPLMap("breakpoint abscissae must increase strictly")
            if y0 == y1:
                raise InvalidPLMap("a constant piece is not open")
        if any(not 0 <= y <= 1 for _, y in pts):
            raise InvalidPLMap("values must lie in [0, 1]")
        # drop collinear interior points
        out = [pts[0]]
        for p, q in zip(pts[1:], pts[2:]):
            a = out[-1]
            if (p[1] - a[1]) * (q[0] - p[0]) != (q[1] - p[1]) * (p[0] - a[0]):
                out.append(p)
        out.append(pts[-1])
        # turning points must sit on 0 or 1, alternating
        turning = [out[0]]
        for a, p, q in zip(out, out[1:], out[2:]):
            if _sign(p[1] - a[1]) != _sign(q[1] - p[1]):
                turning.append(p)
        turning.append(out[-1])
        for i, (_, y) in enumerate(turning):
            if y != i % 2:
                raise InvalidPLMap("turning values must alternate 0, 1, 0, ...")
        object.__setattr__(self, "breakpoints", tuple(out))
        object.__setattr__(self, "laps", tuple(x for x, _ in turning))

    @property
    def degree(self) -> int:
        return len(self.laps) - 1

    @cached_property
    def _xs(self) -> list:
        return [p[0] for p in self.breakpoints]

    def normal_form(self) -> list[Point]:
        """Turning points ``(x_i, i mod 2)``."""
        return [(x, Q(i % 2)) for i, x in enumerate(self.laps)]

    def __call__(self, x) -> Q:
        x = _frac(x)
        if not 0 <= x <= 1:
            raise ValueError(f"{x} is outside [0, 1]")
        xs = self._xs
        k = bisect.bisect_right(xs, x) - 1
        if k >= len(xs) - 1:
            return self.breakpoints[-1][1]
        (x0, y0), (x1, y1) = self.breakpoints[k], self.breakpoints[k + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def image(self, lo, hi) -> tuple[Q, Q]:
        """``(min, max)`` of the map over ``[lo, hi]``."""
        lo, hi = _frac(lo), _frac(hi)
        vals = [self(lo), self(hi)]
        xs = self._xs
        a = bisect.bisect_right(xs, lo)
        b = bisect.bisect_left(xs, hi)
        vals.extend(p[1] for p in self.breakpoints[a:b])
        return min(vals), max(vals)

    def lipschitz(self) -> Q:
        return max(
            abs((y1 - y0) / (x1 - x0))
            for (x0, y0), (x1, y1) in zip(self.breakpoints, self.breakpoints[1:])
        )

    def to_dict(self) -> dict:
        return {
            "breakpoints": [
                [_pair(x), _pair(y)] for x, y in self.breakpoints
            ],
            "degree": self.degree,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PLOpenMap":
        return cls(tuple((_frac(x), _frac(y)) for x, y in d["breakpoints"]))


def tent(d: int) -> PLOpenMap:
    """Standard degree-``d`` tent map: breakpoints ``(m/d, m mod 2)``."""
    if d < 1:
        raise InvalidPLMap(f"tent degree must be positive, got {d}")
    return PLOpenMap(tuple((Q(m, d), Q(m % 2)) for m in range(d + 1)))


def pl_identity() -> PLOpenMap:
    return tent(1)


def pl_degree(f: PLOpenMap) -> int:
    return f.degree


def pl_compose(f: PLOpenMap, g: PLOpenMap) -> PLOpenMap:
    """Exact ``f o g``."""
    pts: list[Point] = []
    for (x0, y0), (x1, y1) in zip(g.breakpoints, g.breakpoints[1:]):
        lo, hi = min(y0, y1), max(y0, y1)
        # f's breakpoints strictly inside g's range on this piece, pulled back
        inner = [p for p in f.breakpoints if lo < p[0] < hi]
        if y1 < y0:
            inner.reverse()
        pts.append((x0, f(y0)))
        for u, fu in inner:
            pts.append((x0 + (u - y0) * (x1 - x0) / (y1 - y0), fu))
    pts.append((g.breakpoints[-1][0], f(g.breakpoints[-1][1])))
    return PLOpenMap(tuple(pts))


def commute_check(c: int, d: int) -> bool:
    return pl_compose(tent(c), tent(d)) == pl_compose(tent(d), tent(c))


def sup_distance(f: PLOpenMap, g: PLOpenMap) -> Q:
    """Sup-norm distance; the difference is linear between merged breakpoints."""
    grid = sorted({p[0] for p in f.breakpoints} | {p[0] for p in g.breakpoints})
    return max(abs(f(x) - g(x)) for x in grid)


def lift(f: Morphism) -> PLOpenMap:
    """PL map through the points ``(u/(dom-1), f(u)/(cod-1))`` at the value changes of ``f``.

    A trailing plateau of ``f`` is absorbed into its last lap: the final
    breakpoint is placed at ``x = 1``.
    """
    big, small = f.dom - 1, f.cod - 1
    us = (0,) + change_positions(f.values)
    pts = [(Q(u, big), Q(f.values[u], small)) for u in us]
    pts[-1] = (Q(1), pts[-1][1])
    return PLOpenMap(tuple(pts))


# --- chains -----------------------------------------------------------------


@dataclass(frozen=True)
class Chain:
    """Open intervals ``U_0, ..., U_{p-1}`` covering [0, 1] in order, with fineness ``epsilon``."""

    links: tuple[tuple[Q, Q], ...]
    epsilon: Q

    @property
    def size(self) -> int:
        return len(self.links)

    def closure_in_unit(self, i: int) -> tuple[Q, Q]:
        a, b = self.links[i]
        return max(a, Q(0)), min(b, Q(1))

    def mesh(self) -> Q:
        return max(hi - lo for lo, hi in (self.closure_in_unit(i) for i in range(self.size)))

    def max_length(self) -> Q:
        return max(b - a for a, b in self.links)

    @cached_property
    def _starts(self) -> list[Q]:
        return [a for a, _ in self.links]

    @cached_property
    def _ends(self) -> list[Q]:
        return [b for _, b in self.links]

    def containing(self, lo: Q, hi: Q) -> range:
        """Indices ``j`` with ``[lo, hi]`` inside the open link ``U_j`` (endpoints must increase)."""
        first = bisect.bisect_right(self._ends, hi)
        last = bisect.bisect_left(self._starts, lo) - 1
        return range(first, last + 1)

    def to_dict(self) -> dict:
        return {
            "links": [[_pair(a), _pair(b)] for a, b in self.links],
            "epsilon": _pair(self.epsilon),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Chain":
        return cls(tuple((_frac(a), _frac(b)) for a, b in d["links"]), _frac(d["epsilon"]))


def fine_chain(p: int, overlap, margin=1) -> Chain:
    """Uniform ``p``-link chain; adjacent links share the fraction ``overlap`` of their length.

    With step ``s = 1/p`` and shared length ``delta``, the gap between
    non-adjacent links is ``s - delta`` and each link keeps a core at distance
    ``(s - delta)/2`` from its neighbours.  For ``overlap < 1/4`` we have
    ``delta < s/3`` and ``epsilon = delta`` satisfies all three fineness
    conditions; ``margin`` scales it down further if asked.
    """
    overlap = _frac(overlap)
    if p < 2:
        raise ValueError("a chain needs at least 2 links")
    if not 0 < overlap:
        raise ValueError("overlap must be positive")
    if overlap >= Q(1, 4):
        raise OverlapTooLarge(f"overlap {overlap} must be below 1/4")
    s = Q(1, p)
    length = s / (1 - overlap)
    delta = length - s
    links = tuple((i * s - delta / 2, i * s - delta / 2 + length) for i in range(p))
    return Chain(links, delta * _frac(margin))


def chain_report(chain: Chain) -> dict[str, bool]:
    """Exact check of conditions (1), (2), (6), (7), (8) for a single chain."""
    links = chain.links
    p = len(links)
    eps = chain.epsilon
    a = [u for u, _ in links]
    b = [v for _, v in links]
    zero, one = Q(0), Q(1)
    ordered = all(a[i] < a[i + 1] and b[i] < b[i + 1] for i in range(p - 1)) and all(
        a[i] < b[i] for i in range(p)
    )
    report = {"ordered": ordered, "eps_positive": eps > 0}
    report["(1) 0 in U_0"] = a[0] < 0 < b[0]
    report["covers [0,1]"] = ordered and a[0] < zero and b[-1] > one and all(b[i] > a[i + 1] for i in range(p - 1))
    # with ordered endpoints, U_i meets U_j iff b_i > a_j for i < j
    report["(2) intersections"] = ordered and all(b[i] > a[i + 1] for i in range(p - 1)) and all(
        b[i] <= a[i + 2] for i in range(p - 2)
    )
    report["(6) gaps > eps"] = ordered and all(a[i + 2] - b[i] > eps for i in range(p - 2))
    core_ok = True
    for i in range(p):
        lo = max([a[i]] + ([b[i - 1] + eps] if i > 0 else []))
        hi = min([b[i]] + ([a[i + 1] - eps] if i + 1 < p else []))
        if not max(lo, zero) < min(hi, one):
            core_ok = False
            break
    report["(7) eps-core"] = ordered and core_ok
    # (8): for u in (a_i, a_{i+1}] the best link is U_i, which must reach past u + eps
    lebesgue = True
    for i in range(p):
        right = min(a[i + 1] if i + 1 < p else one, one)
        if right < zero:
            continue
        if b[i] > one:
            continue
        if right + eps > b[i]:
            lebesgue = False
            break
    report["(8) Lebesgue eps"] = ordered and lebesgue
    return report


@dataclass(frozen=True)
class ChainTower:
    chains: tuple[Chain, ...]
    maps: tuple[PLOpenMap, ...]

    @property
    def sizes(self) -> list[int]:
        return [c.size for c in self.chains]

    def summary(self) -> dict:
        return {
            "levels": len(self.chains),
            "sizes": self.sizes,
            "epsilons": [_pair(c.epsilon) for c in self.chains],
            "map_degrees": [t.degree for t in self.maps],
        }


def _diameter_bound(coarse: Chain, T: PLOpenMap, level: int) -> Q:
    # level is the index of the coarse chain; the fine chain sits at level + 1
    bound = coarse.epsilon / (6 * T.lipschitz())
    if level >= 1:
        bound = min(bound, Q(1, level + 1))
    return min(bound, Q(1))


def refine_chain(coarse: Chain, T: PLOpenMap, level: int, overlap=Q(1, 5), margin=1) -> Chain:
    """Smallest uniform chain whose links are shorter than the refinement bound for ``T``."""
    overlap = _frac(overlap)
    bound = _diameter_bound(coarse, T, level)
    # link length is 1 / (p (1 - overlap)); need it strictly below bound
    p = int(1 / (bound * (1 - overlap))) + 1
    p = max(p, 2)
    return fine_chain(p, overlap, margin)


def chain_tower(degrees: Sequence[int], levels: int, p0: int = 2, overlap=Q(1, 5), margin=1) -> ChainTower:
    """Chains ``U^0, ..., U^{levels-1}`` refined through tent maps of the given degrees."""
    if levels < 1:
        raise ValueError("need at least one level")
    if len(degrees) < levels - 1:
        raise ValueError(f"{levels} levels need {levels - 1} map degrees")
    maps = tuple(tent(d) for d in degrees[: levels - 1])
    chains = [fine_chain(p0, overlap, margin)]
    for n, T in enumerate(maps):
        chains.append(refine_chain(chains[-1], T, n, overlap, margin))
    return ChainTower(tuple(chains), maps)


def _link_targets(T: PLOpenMap, fine: Chain, coarse: Chain) -> list[range]:
    out = []
    for k in range(fine.size):
        lo, hi = fine.closure_in_unit(k)
        ilo, ihi = T.image(lo, hi)
        out.append(coarse.containing(ilo, ihi))
    return out


def tower_report(tower: ChainTower) -> dict[str, bool]:
    """Exact validation of every tower condition; keys name the level and condition."""
    report: dict[str, bool] = {}
    for n, chain in enumerate(tower.chains):
        for key, ok in chain_report(chain).items():
            report[f"U^{n} {key}"] = ok
        if n >= 1:
            report[f"U^{n} (5) mesh < 1/{n}"] = chain.mesh() < Q(1, n)
    for n, T in enumerate(tower.maps):
        coarse, fine = tower.chains[n], tower.chains[n + 1]
        bound = _diameter_bound(coarse, T, n)
        report[f"U^{n + 1} diam < min(1/(n+1), eps_{n}/(6 deg T_{n}))"] = fine.max_length() < bound
        targets = _link_targets(T, fine, coarse)
        report[f"T_{n} every fine link lands in a coarse link"] = all(len(t) > 0 for t in targets)
        hit = set()
        for t in targets:
            hit.update(t)
        report[f"T_{n} (4) every coarse link is hit"] = hit == set(range(coarse.size))
        # (3): links at most 2 apart upstairs never land in non-adjacent links
        sep = True
        for k in range(fine.size):
            for l in (k, k + 1, k + 2):
                if l >= fine.size:
                    continue
                for i in targets[k]:
                    for j in targets[l]:
                        if abs(i - j) > 1:
                            sep = False
        report[f"T_{n} (3) separation"] = sep
    return report


def discretize(T: PLOpenMap, fine: Chain, coarse: Chain) -> Morphism:
    """``g(i) = min{ j : T(closure U_i) inside V_j }`` for fine links ``U_i`` and coarse links ``V_j``."""
    values = []
    for k, t in enumerate(_link_targets(T, fine, coarse)):
        if len(t) == 0:
            raise NoContainingLink(f"image of fine link {k} fits in no coarse link")
        values.append(t.start)
    return Morphism(tuple(values), coarse.size)
