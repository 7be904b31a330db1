"""Projective amalgamation of fold morphisms, slope by slope.

The construction runs in four stages:

1. duplicate every interior turning value so each sweep becomes its own
   monotone surjective block (:func:`normalize_condition_star`);
2. cut both morphisms into those blocks (:func:`slope_split`);
3. interleave the blocks of ``f`` and ``g`` so that paired blocks slope the
   same way (:func:`build_blocks`) and merge each pair by taking maximal
   multiplicities (:func:`amalgamate_parallel`);
4. glue the merged pieces back together into ``f'`` and ``g'``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import (
    CodomainMismatch,
    MixedSlopes,
    StarViolation,
    VertexOutOfRange,
    ZeroMultiplicity,
)
from .lingraph import GraphLike, Morphism, _size, compose, identity

__all__ = [
    "SlopeClass",
    "Piece",
    "SlopeSplit",
    "AmalgamationPlan",
    "pad",
    "stretch",
    "amalgamate_parallel",
    "normalize_condition_star",
    "slope_split",
    "build_blocks",
    "amalgamate",
    "joint_project",
]


class SlopeClass(enum.Enum):
    INC = "Inc"
    DEC = "Dec"

    def flipped(self) -> "SlopeClass":
        return SlopeClass.DEC if self is SlopeClass.INC else SlopeClass.INC


@dataclass(frozen=True)
class Piece:
    """A monotone map from a path onto ``[[cod]]``, surjective on vertices and edges.

    Non-increasing pieces do not fix the zero-vertex, so they are not morphisms;
    non-decreasing ones are.
    """

    values: tuple[int, ...]
    cod: int

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) < 2 or self.cod < 2:
            raise StarViolation("pieces need at least two vertices on each side")
        steps = {b - a for a, b in zip(vals, vals[1:])}
        if not steps <= {0, 1} and not steps <= {0, -1}:
            raise StarViolation(f"piece {vals} is not monotone with unit steps")
        if {vals[0], vals[-1]} != {0, self.cod - 1}:
            raise StarViolation(f"piece {vals} is not onto [[{self.cod}]]")

    @property
    def slope(self) -> SlopeClass:
        return SlopeClass.INC if self.values[0] == 0 else SlopeClass.DEC

    @property
    def dom(self) -> int:
        return len(self.values)

    def multiplicities(self) -> list[int]:
        """Run lengths in order of appearance."""
        runs = [1]
        for a, b in zip(self.values, self.values[1:]):
            if a == b:
                runs[-1] += 1
            else:
                runs.append(1)
        return runs

    def reversed(self) -> "Piece":
        return Piece(self.values[::-1], self.cod)

    def as_morphism(self) -> Morphism:
        return Morphism(self.values, self.cod)


PieceLike = Union[Piece, Morphism]


def _as_piece(f: PieceLike) -> Piece:
    if isinstance(f, Piece):
        return f
    return Piece(f.values, f.cod)


@dataclass(frozen=True)
class SlopeSplit:
    """Consecutive intervals ``I_1 < ... < I_l`` on which a map is a monotone surjection.

    ``pieces[j]`` is the restriction to ``I_j`` read forwards and
    ``pieces[-j]`` the same restriction read backwards (``j`` is 1-based).
    """

    intervals: tuple[tuple[int, int], ...]
    pieces: dict

    @property
    def length(self) -> int:
        return len(self.intervals)

    def interval(self, j: int) -> tuple[int, int]:
        return self.intervals[abs(j) - 1]


@dataclass(frozen=True)
class AmalgamationPlan:
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    piece_sizes: tuple[int, ...]
    segments: tuple[tuple[int, int], ...]
    total: int
    f_star: Morphism
    g_star: Morphism

    def to_dict(self) -> dict:
        return {
            "alpha": list(self.alpha),
            "beta": list(self.beta),
            "piece_sizes": list(self.piece_sizes),
            "segments": [list(s) for s in self.segments],
            "total": self.total,
            "f_star": self.f_star.to_dict(),
            "g_star": self.g_star.to_dict(),
        }


def pad(f: GraphLike | Morphism, i: int, j: int) -> Morphism:
    """Non-decreasing ``phi: [n+j] -> [n]`` whose fiber over ``i`` has ``j+1`` points.

    Composing with ``phi`` repeats the entry ``f(i)`` of ``str(f)`` ``j+1`` times.
    """
    n = f.dom if isinstance(f, Morphism) else _size(f)
    if not 0 <= i < n:
        raise VertexOutOfRange(f"vertex {i} not in [[{n}]]")
    if j < 0:
        raise ValueError("j must be non-negative")
    values = list(range(i)) + [i] * (j + 1) + list(range(i + 1, n))
    return Morphism(tuple(values), n)


def _stretch_map(mults: Sequence[int]) -> Morphism:
    if any(m < 1 for m in mults):
        raise ZeroMultiplicity(f"multiplicities must be positive: {list(mults)}")
    values = [t for t, m in enumerate(mults) for _ in range(m)]
    return Morphism(tuple(values), len(mults))


def stretch(f: PieceLike, mults: Sequence[int]):
    """Return ``(phi, f o phi)`` where ``f o phi`` repeats ``f(t)`` ``mults[t]`` times.

    Works for pieces too; the second item then is a :class:`Piece`.
    """
    if len(mults) != f.dom:
        raise ValueError(f"need {f.dom} multiplicities, got {len(mults)}")
    phi = _stretch_map(mults)
    if isinstance(f, Morphism):
        return phi, compose(f, phi)
    return phi, Piece(tuple(f.values[t] for t in phi.values), f.cod)


def _spread(piece: Piece, targets: Sequence[int]) -> Morphism:
    """Stretch map realising run lengths ``targets`` over ``piece``; extra copies go to each run's first vertex."""
    mults = []
    for run, want in zip(piece.multiplicities(), targets):
        mults.append(want - run + 1)
        mults.extend([1] * (run - 1))
    return _stretch_map(mults)


def amalgamate_parallel(f: PieceLike, g: PieceLike) -> tuple[Morphism, Morphism]:
    """Merge two same-slope pieces over a common codomain.

    Returns non-decreasing degree-one ``(f~, g~)`` with ``f o f~ = g o g~``; the
    common string has, for every codomain vertex, the larger of the two run lengths.
    """
    pf, pg = _as_piece(f), _as_piece(g)
    if pf.cod != pg.cod:
        raise CodomainMismatch(f"pieces land in [[{pf.cod}]] and [[{pg.cod}]]")
    if pf.slope is not pg.slope:
        raise MixedSlopes(f"cannot merge a {pf.slope.value} piece with a {pg.slope.value} piece")
    target = [max(a, b) for a, b in zip(pf.multiplicities(), pg.multiplicities())]
    return _spread(pf, target), _spread(pg, target)


def normalize_condition_star(f: Morphism) -> tuple[Morphism, Morphism]:
    """Duplicate each interior turning value, returning ``(phi, f o phi)``.

    The result splits into consecutive blocks, each a monotone surjection.
    """
    turning = f.fold.turning_indices
    mults = [1] * f.dom
    for t in turning[1:-1]:
        mults[t] = 2
    return stretch(f, mults)


def slope_split(fstar: Morphism | Piece) -> SlopeSplit:
    """Cut a map into alternating Inc/Dec monotone surjective blocks, first block Inc."""
    vals = fstar.values
    n = len(vals)
    top = fstar.cod - 1
    intervals = []
    start = 0
    up = True
    while start < n:
        lo, hi = (0, top) if up else (top, 0)
        if vals[start] != lo:
            raise StarViolation(f"block starting at {start} does not start at vertex {lo}")
        end = None
        for i in range(start + 1, n):
            step = vals[i] - vals[i - 1]
            if (up and step < 0) or (not up and step > 0):
                raise StarViolation(f"block starting at {start} is not monotone")
            if vals[i] == hi:
                end = i
                break
        if end is None:
            raise StarViolation(f"block starting at {start} never reaches vertex {hi}")
        if all(v == hi for v in vals[end:]):
            end = n - 1
        intervals.append((start, end))
        start = end + 1
        up = not up
    pieces = {}
    for j, (a, b) in enumerate(intervals, start=1):
        piece = Piece(vals[a : b + 1], fstar.cod)
        pieces[j] = piece
        pieces[-j] = piece.reversed()
    return SlopeSplit(tuple(intervals), pieces)


def _blocks(l_len: int, count: int) -> list[int]:
    up = list(range(1, l_len + 1))
    down = list(range(-l_len, 0))
    out = []
    for b in range(count):
        out.extend(up if b % 2 == 0 else down)
    return out


def build_blocks(l1: int, l2: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Index strings ``alpha`` (``l2`` blocks over ``+-1..l1``) and ``beta`` (``l1`` blocks over ``+-1..l2``)."""
    if l1 < 1 or l2 < 1:
        raise ValueError("block lengths must be positive")
    return tuple(_blocks(l1, l2)), tuple(_blocks(l2, l1))


def _glue(split: SlopeSplit, order: Sequence[int], parts: Sequence[Morphism]) -> list[int]:
    # Piece +j runs forwards over I_j, piece -j backwards.  Within a block the
    # next interval starts one vertex further on; at a block boundary the walk
    # turns around and the next piece starts on the same vertex.
    values: list[int] = []
    for idx, part in zip(order, parts):
        a, b = split.interval(idx)
        if idx > 0:
            values.extend(a + x for x in part.values)
        else:
            values.extend(b - x for x in part.values)
    return values


def amalgamate(f: Morphism, g: Morphism) -> tuple[Morphism, Morphism, AmalgamationPlan]:
    """Return ``(f', g', plan)`` with a common domain and ``f o f' = g o g'``."""
    if f.cod != g.cod:
        raise CodomainMismatch(f"cod(f) = {f.cod} but cod(g) = {g.cod}")
    phi, fstar = normalize_condition_star(f)
    psi, gstar = normalize_condition_star(g)
    fs, gs = slope_split(fstar), slope_split(gstar)
    alpha, beta = build_blocks(fs.length, gs.length)

    f_parts, g_parts, sizes = [], [], []
    for a, b in zip(alpha, beta):
        ft, gt = amalgamate_parallel(fs.pieces[a], gs.pieces[b])
        f_parts.append(ft)
        g_parts.append(gt)
        sizes.append(ft.dom)

    segments = []
    left = 0
    for p in sizes:
        segments.append((left, left + p - 1))
        left += p

    f_big = Morphism(tuple(_glue(fs, alpha, f_parts)), fstar.dom)
    g_big = Morphism(tuple(_glue(gs, beta, g_parts)), gstar.dom)
    f_prime = compose(phi, f_big)
    g_prime = compose(psi, g_big)
    plan = AmalgamationPlan(
        alpha=alpha,
        beta=beta,
        piece_sizes=tuple(sizes),
        segments=tuple(segments),
        total=left,
        f_star=fstar,
        g_star=gstar,
    )
    return f_prime, g_prime, plan


def _collapse_onto(c: int, a: int) -> Morphism:
    # Identity on 0..a-1, then a plateau at the far end.
    return Morphism(tuple(min(i, a - 1) for i in range(c)), a)


def joint_project(A: GraphLike, B: GraphLike) -> tuple[int, Morphism, Morphism]:
    """A common object ``C`` (the larger graph) with morphisms onto ``A`` and ``B``."""
    a, b = _size(A), _size(B)
    c = max(a, b)
    pa = identity(c) if a == c else _collapse_onto(c, a)
    pb = identity(c) if b == c else _collapse_onto(c, b)
    return c, pa, pb
