"""Finite Ramsey machinery for the weighted category.

Morphisms of degree ``r`` onto ``[[k]]`` are determined by their change
positions, an ``r(k-1)``-element subset of the domain.  That turns colorings of
``Epi(C, A)`` into colorings of increasing injections, where the classical
finite Ramsey theorem applies.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Hashable, Iterable, Sequence

from .errors import Infeasible, InvalidParams, NoWitness
from .fraisse import AnnotatedObject
from .lingraph import (
    GraphLike,
    Morphism,
    _size,
    change_positions,
    compose,
    enumerate_epi,
    find_epi,
    iter_epi,
    sample_epi,
)

__all__ = [
    "IncreasingInjection",
    "Coloring",
    "Unknown",
    "Vacuous",
    "to_injection",
    "monotone_from_injection",
    "ramsey_number",
    "witness",
    "epi_star",
    "find_monochromatic",
    "rho",
    "degree_coloring",
    "infinite_degree_check",
]

DEFAULT_CAP = 10


@dataclass(frozen=True)
class IncreasingInjection:
    k: int
    n: int
    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) != self.k:
            raise InvalidParams(f"expected {self.k} values, got {len(vals)}")
        if any(a >= b for a, b in zip(vals, vals[1:])):
            raise InvalidParams(f"{vals} is not strictly increasing")
        if vals and not (0 <= vals[0] and vals[-1] < self.n):
            raise InvalidParams(f"{vals} leaves [{self.n}]")

    def __call__(self, i: int) -> int:
        return self.values[i]

    def compose(self, other: "IncreasingInjection") -> "IncreasingInjection":
        """``self o other``."""
        if other.n != self.k:
            raise InvalidParams("injections do not compose")
        return IncreasingInjection(other.k, self.n, tuple(self.values[i] for i in other.values))


@dataclass(frozen=True)
class Unknown:
    """The search hit its cap without deciding."""

    cap: int

    def to_dict(self) -> dict:
        return {"unknown": True, "cap": self.cap}


@dataclass(frozen=True)
class Vacuous:
    """No morphisms ``B -> A`` exist, so every ``C`` is a witness."""

    reason: str = "Epi(B, A) is empty"

    def to_dict(self) -> dict:
        return {"vacuous": True, "reason": self.reason}


class Coloring:
    """A ``d``-coloring of a finite set of keys (value tuples of morphisms or injections)."""

    def __init__(self, d: int, assignment: dict):
        if d < 1:
            raise InvalidParams("need at least one color")
        self.d = d
        self.assignment = {self._key(k): int(c) for k, c in assignment.items()}
        bad = [c for c in self.assignment.values() if not 0 <= c < d]
        if bad:
            raise InvalidParams(f"colors {sorted(set(bad))} outside [{d}]")

    @staticmethod
    def _key(x) -> Hashable:
        if isinstance(x, (Morphism, IncreasingInjection)):
            return x.values
        return tuple(x)

    def __call__(self, x) -> int:
        return self.assignment[self._key(x)]

    def __len__(self):
        return len(self.assignment)

    @classmethod
    def constant(cls, domain: Iterable, d: int = 1, color: int = 0) -> "Coloring":
        return cls(d, {x: color for x in domain})

    @classmethod
    def random(cls, domain: Iterable, d: int, rng: random.Random) -> "Coloring":
        return cls(d, {x: rng.randrange(d) for x in domain})

    def digest(self) -> str:
        """sha256 of the canonical JSON form, for certificates."""
        items = sorted((list(k), c) for k, c in self.assignment.items())
        blob = json.dumps({"d": self.d, "assignment": items}, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_dict(self) -> dict:
        return {"d": self.d, "assignment": sorted([list(k), c] for k, c in self.assignment.items())}

    @classmethod
    def from_dict(cls, d: dict) -> "Coloring":
        return cls(int(d["d"]), {tuple(k): c for k, c in d["assignment"]})


def to_injection(f: Morphism) -> IncreasingInjection:
    """The change positions of ``f`` as an injection into ``[dom f]``."""
    ch = change_positions(f.values)
    return IncreasingInjection(len(ch), f.dom, ch)


def monotone_from_injection(p: IncreasingInjection | Sequence[int], m: int, n: int) -> Morphism:
    """The non-decreasing ``g: [[n]] -> [[m]]`` whose fiber over ``j`` starts at ``p(j)`` for ``j >= 1``.

    ``p(0)`` plays no part.
    """
    vals = p.values if isinstance(p, IncreasingInjection) else tuple(p)
    p = IncreasingInjection(m, n, vals)
    if m >= 2 and p(1) == 0:
        raise Infeasible("p(1) = 0 would move the zero-vertex")
    starts = p.values[1:]
    out, j = [], 0
    for i in range(n):
        while j < len(starts) and starts[j] <= i:
            j += 1
        out.append(j)
    return Morphism(tuple(out), m)


# --- Ramsey numbers -----------------------------------------------------------


def _colex(n: int, k: int) -> list[tuple[int, ...]]:
    return sorted(combinations(range(n), k), key=lambda s: s[::-1])


def _good_coloring_exists(n: int, k: int, m: int, d: int) -> bool:
    """Is there a d-coloring of k-subsets of [n] with no monochromatic m-subset?"""
    subsets = _colex(n, k)
    index = {s: i for i, s in enumerate(subsets)}
    # an m-set is checked once its colex-largest k-subset (its top k elements) is colored
    triggers: list[list[tuple[int, ...]]] = []
    for s in subsets:
        below = range(s[0]) if k else range(n)
        trig = []
        for rest in combinations(below, m - k):
            M = rest + s
            trig.append(tuple(index[t] for t in combinations(M, k)))
        triggers.append(trig)
    colors = [0] * len(subsets)

    def dfs(t: int, used: int) -> bool:
        if t == len(subsets):
            return True
        for c in range(min(d, used + 1)):
            colors[t] = c
            if any(all(colors[u] == c for u in M) for M in triggers[t]):
                continue
            if dfs(t + 1, max(used, c + 1)):
                return True
        return False

    return dfs(0, 0)


def ramsey_number(k: int, m: int, d: int, cap: int = DEFAULT_CAP) -> int | Unknown:
    """Least ``n <= cap`` such that every ``d``-coloring of ``II([k],[n])`` has a monochromatic copy of ``II([k],[m])``.

    Searches ``n = m, m+1, ...`` exhaustively, fixing colors up to permutation.
    """
    if k > m:
        raise InvalidParams(f"k = {k} exceeds m = {m}")
    if k < 0 or m < 1 or d < 1:
        raise InvalidParams("need k >= 0, m >= 1, d >= 1")
    for n in range(m, cap + 1):
        if not _good_coloring_exists(n, k, m, d):
            return n
    return Unknown(cap)


# --- the weighted Ramsey property ----------------------------------------------


def _as_annotated(x) -> AnnotatedObject:
    if isinstance(x, AnnotatedObject):
        return x
    return AnnotatedObject(_size(x), Fraction(1))


def _forced_degree(src: AnnotatedObject, dst: AnnotatedObject) -> int | None:
    r = src.weight / dst.weight
    return int(r) if r.denominator == 1 else None


def epi_star(C, A) -> list[Morphism]:
    """Morphisms ``(C, w) -> (A, v)``: those of degree ``w/v``, none when that is not a natural number."""
    C, A = _as_annotated(C), _as_annotated(A)
    r = _forced_degree(C, A)
    if r is None or C.n < A.n:
        return []
    return enumerate_epi(C.n, A.n, degree=r)


def witness(A, B, d: int, cap: int = DEFAULT_CAP) -> AnnotatedObject | Vacuous | Unknown:
    """``C = ([[R(r(k-1), m; d)]], q)`` for ``A = ([[k]], p)``, ``B = ([[m]], q)`` and ``r = q/p``."""
    A, B = _as_annotated(A), _as_annotated(B)
    r = _forced_degree(B, A)
    if r is None:
        return Vacuous(f"weight ratio {B.weight / A.weight} is not a natural number")
    kk = r * (A.n - 1)
    if kk > B.n - 1:
        return Vacuous(f"no degree-{r} morphism [[{B.n}]] -> [[{A.n}]]")
    n = ramsey_number(kk, B.n, d, cap)
    if isinstance(n, Unknown):
        return n
    return AnnotatedObject(n, B.weight)


def _mono_subset(n: int, kk: int, m: int, color_of) -> tuple[int, ...] | None:
    """Lexicographically least m-subset of [n] all of whose kk-subsets get one color."""
    chosen: list[int] = []

    def dfs(start: int, col) -> tuple[int, ...] | None:
        if len(chosen) == m:
            return tuple(chosen)
        for x in range(start, n - (m - len(chosen)) + 1):
            c = col
            ok = True
            for rest in combinations(chosen, kk - 1):
                cx = color_of(rest + (x,))
                if c is None:
                    c = cx
                elif cx != c:
                    ok = False
                    break
            if not ok:
                continue
            chosen.append(x)
            found = dfs(x + 1, c)
            chosen.pop()
            if found is not None:
                return found
        return None

    return dfs(0, None)


def _is_monochromatic(g: Morphism, hs: Sequence[Morphism], c: Coloring) -> int | None:
    colors = {c(compose(h, g)) for h in hs}
    return colors.pop() if len(colors) == 1 else None


def find_monochromatic(C, B, A, c: Coloring, structured: bool = True, fallback: bool = True) -> Morphism:
    """Some ``g in Epi(C, B)`` with ``c`` constant on ``Epi(B, A) o g``.

    Follows the Ramsey argument: transfer ``c`` to change-position sets (sets
    not arising from a morphism get color 0), find a monochromatic ``m``-set
    ``p`` and return the degree-one map built from ``p``.  The result is
    checked; if that route fails and ``fallback`` is set, all of ``Epi(C, B)``
    is searched.
    """
    C, B, A = _as_annotated(C), _as_annotated(B), _as_annotated(A)
    hs = epi_star(B, A)
    if not hs:
        gs = epi_star(C, B)
        if gs:
            return gs[0]
        _no_witness(C, B)
    if structured and C.weight == B.weight:
        r = _forced_degree(B, A)
        kk = r * (A.n - 1)
        lookup = {}
        for f in epi_star(C, A):
            lookup[change_positions(f.values)] = c(f)
        p = _mono_subset(C.n, kk, B.n, lambda s: lookup.get(s, 0))
        if p is not None:
            g = monotone_from_injection(p, B.n, C.n)
            if _is_monochromatic(g, hs, c) is not None:
                return g
    deg = _forced_degree(C, B)
    if fallback and deg is not None:
        for g in iter_epi(C.n, B.n, degree=deg):
            if _is_monochromatic(g, hs, c) is not None:
                return g
    _no_witness(C, B)


def _no_witness(C, B):
    raise NoWitness(f"no g: {C} -> {B} is monochromatic")


# --- the degree coloring ---------------------------------------------------------


def rho(k: int) -> int:
    """2-adic valuation."""
    if k < 1:
        raise InvalidParams("rho needs a positive integer")
    return (k & -k).bit_length() - 1


def degree_coloring(f: Morphism, n: int) -> int:
    if n < 1:
        raise InvalidParams("need at least one color")
    return rho(f.degree) % n


def infinite_degree_check(n: int, C: GraphLike, sample: int = 50, seed: int = 0) -> dict:
    """Check that ``Epi(B, A) o f`` meets all ``n`` colors for sampled ``f: C -> B``.

    ``A = [[2]]`` and ``B = [[2^(n+1)]]``.  The color of ``h o f`` depends only
    on ``deg h``, so one ``h`` per degree suffices; the scan stops once every
    color has appeared.
    """
    if n < 1:
        raise InvalidParams("need at least one color")
    b = 2 ** (n + 1)
    c_size = _size(C)
    rng = random.Random(seed)
    reps = [find_epi(b, 2, lambda i, v: True, degree=dd) for dd in range(1, b)]
    rows = []
    for _ in range(sample):
        f = sample_epi(c_size, b, rng)
        hit: set[int] = set()
        for h in reps:
            hit.add(degree_coloring(compose(h, f), n))
            if len(hit) == n:
                break
        rows.append({"f": list(f.values), "degree": f.degree, "colors": sorted(hit), "full": len(hit) == n})
    return {
        "n": n,
        "A": 2,
        "B": b,
        "C": c_size,
        "samples": rows,
        "all_full": all(r["full"] for r in rows),
    }
