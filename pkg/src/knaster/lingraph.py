"""Pointed finite linear graphs and their fold morphisms.

A graph with ``n`` vertices is the path ``0 - 1 - ... - n-1`` with a loop at
every vertex and ``0`` as its zero-vertex, so it is stored by its size alone.
A morphism ``f: [n] -> [m]`` is stored by its value string
``f(0), ..., f(n-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Sequence, Union

from .errors import (
    DomainMismatch,
    InvalidGraph,
    NoFold,
    NotHomomorphism,
    NotSurjective,
    VertexOutOfRange,
    ZeroVertexViolation,
)

__all__ = [
    "PointedLinearGraph",
    "FoldDecomposition",
    "Morphism",
    "validate",
    "find_fold",
    "degree",
    "compose",
    "identity",
    "enumerate_epi",
    "iter_epi",
    "count_epi",
    "sample_epi",
    "find_epi",
    "graph_distance",
    "reverse",
    "restrict",
    "change_positions",
]


@dataclass(frozen=True, order=True)
class PointedLinearGraph:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise InvalidGraph(f"a pointed linear graph needs at least 2 vertices, got {self.n!r}")

    @property
    def ends(self) -> tuple[int, int]:
        return (0, self.n - 1)

    def adjacent(self, x: int, y: int) -> bool:
        return abs(x - y) <= 1

    def __str__(self):
        return f"[[{self.n}]]"


GraphLike = Union[int, PointedLinearGraph]


def _size(g: GraphLike) -> int:
    if isinstance(g, PointedLinearGraph):
        return g.n
    PointedLinearGraph(g)
    return g


@dataclass(frozen=True)
class FoldDecomposition:
    """Turning indices ``0 = i_0 < ... < i_k = n-1`` witnessing a morphism.

    Between consecutive turning indices the map is monotone; it sits at the
    zero-vertex on even turning indices and at the far end on odd ones.
    """

    turning_indices: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.turning_indices) - 1


@dataclass(frozen=True)
class Morphism:
    """A morphism ``[dom] -> [cod]`` given by its value string.

    Construction validates; invalid strings raise the matching error.
    """

    values: tuple[int, ...]
    cod: int
    fold: FoldDecomposition = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "fold", find_fold(values, self.cod))

    @property
    def dom(self) -> int:
        return len(self.values)

    @property
    def degree(self) -> int:
        return self.fold.degree

    @property
    def source(self) -> PointedLinearGraph:
        return PointedLinearGraph(self.dom)

    @property
    def target(self) -> PointedLinearGraph:
        return PointedLinearGraph(self.cod)

    def __call__(self, i: int) -> int:
        return self.values[i]

    def __len__(self):
        return len(self.values)

    def is_monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.values, self.values[1:]))

    def fiber(self, v: int) -> list[int]:
        return [i for i, x in enumerate(self.values) if x == v]

    def to_dict(self) -> dict:
        return {"dom": self.dom, "cod": self.cod, "values": list(self.values)}

    @classmethod
    def from_dict(cls, d: dict) -> "Morphism":
        return validate(d["dom"], d["cod"], d["values"])

    def __str__(self):
        return f"{','.join(map(str, self.values))} : [[{self.dom}]] -> [[{self.cod}]]"


def find_fold(values: Sequence[int], cod: int) -> FoldDecomposition:
    """Check the morphism conditions and return the leftmost fold decomposition."""
    n = len(values)
    if n < 2:
        raise InvalidGraph(f"domain needs at least 2 vertices, got {n}")
    if cod < 2:
        raise InvalidGraph(f"codomain needs at least 2 vertices, got {cod}")
    if any(v < 0 or v >= cod for v in values):
        raise VertexOutOfRange(f"values must lie in 0..{cod - 1}")
    if values[0] != 0:
        raise ZeroVertexViolation(f"f(0) = {values[0]}, expected 0")
    for i in range(n - 1):
        if abs(values[i + 1] - values[i]) > 1:
            raise NotHomomorphism(f"step {values[i]} -> {values[i + 1]} at index {i} is not an edge")
    # A walk from 0 with unit steps that reaches cod-1 crosses every edge.
    if max(values) != cod - 1:
        raise NotSurjective(f"vertex {max(values) + 1} is not hit")

    top = cod - 1
    turning = [0]
    pos = 0
    up = True
    while True:
        target = top if up else 0
        nxt = None
        for i in range(pos + 1, n):
            step = values[i] - values[i - 1]
            if (up and step < 0) or (not up and step > 0):
                raise NoFold(f"sweep starting at index {pos} is not monotone at index {i}")
            if values[i] == target:
                nxt = i
                break
        if nxt is None:
            # Nothing left but a plateau at the last extreme: stretch the final index.
            if pos == n - 1:
                break
            if all(v == values[pos] for v in values[pos:]) and len(turning) > 1:
                turning[-1] = n - 1
                break
            raise NoFold(f"string does not end at an extreme after index {pos}")
        turning.append(nxt)
        pos = nxt
        up = not up
        if pos == n - 1:
            break
    return FoldDecomposition(tuple(turning))


def validate(dom_size: int, cod_size: int, values: Sequence[int]) -> Morphism:
    """Build a :class:`Morphism` from raw data, raising on any violated condition."""
    _size(dom_size)
    _size(cod_size)
    if len(values) != dom_size:
        raise InvalidGraph(f"expected {dom_size} values, got {len(values)}")
    return Morphism(tuple(values), cod_size)


def degree(f: Morphism) -> int:
    return f.degree


def identity(n: GraphLike) -> Morphism:
    n = _size(n)
    return Morphism(tuple(range(n)), n)


def compose(f: Morphism, g: Morphism) -> Morphism:
    """Return ``f o g`` (apply ``g`` first)."""
    if g.cod != f.dom:
        raise DomainMismatch(f"cannot compose: cod(g) = {g.cod} but dom(f) = {f.dom}")
    fv = f.values
    return Morphism(tuple(fv[v] for v in g.values), f.cod)


def graph_distance(G: GraphLike, x: int, y: int) -> int:
    n = _size(G)
    for v in (x, y):
        if not 0 <= v < n:
            raise VertexOutOfRange(f"vertex {v} not in [[{n}]]")
    return abs(x - y)


def reverse(s: Sequence[int]) -> list[int]:
    return list(s)[::-1]


def restrict(s: Sequence[int], i: int, j: int) -> list[int]:
    """The substring ``s_i ... s_j`` (both ends inclusive)."""
    if not 0 <= i <= j < len(s):
        raise VertexOutOfRange(f"bad range [{i}, {j}] for a string of length {len(s)}")
    return list(s[i : j + 1])


def change_positions(values: Sequence[int]) -> tuple[int, ...]:
    """Indices ``j >= 1`` with ``values[j] != values[j-1]``, ascending."""
    return tuple(j for j in range(1, len(values)) if values[j] != values[j - 1])


# --- the sweep automaton -------------------------------------------------------
#
# A state is (vertex, heading_up, sweeps).  While heading up the walk may not
# decrease and flips direction on reaching the top; symmetric when heading down.
# A walk is a morphism iff it ends on the extreme it last turned at with at
# least one completed sweep.  With a degree target ``sweeps`` is exact and
# capped at the target; otherwise it is capped at 1.


@lru_cache(maxsize=None)
def _automaton(m: int, deg: int | None):
    cap = deg if deg is not None else 1
    top = m - 1

    def step(state, v2):
        v, up, k = state
        if v2 < 0 or v2 > top or abs(v2 - v) > 1:
            return None
        if up and v2 < v or (not up) and v2 > v:
            return None
        if (up and v2 == top) or (not up and v2 == 0):
            k += 1
            if k > cap:
                if deg is not None:
                    return None
                k = cap
            return (v2, not up, k)
        return (v2, up, k)

    def accept(state):
        v, up, k = state
        if deg is None:
            done = k >= 1
        else:
            done = k == deg
        return done and ((not up and v == top) or (up and v == 0))

    states = [(v, up, k) for v in range(m) for up in (True, False) for k in range(cap + 1)]
    return step, accept, states


class _CompletionCounter:
    """``count(r, state)``: accepted walks of exactly ``r`` more steps from ``state``.

    The table is grown bottom-up on demand, so long domains do not recurse.
    """

    def __init__(self, m: int, deg: int | None):
        self.step, accept, self.states = _automaton(m, deg)
        self.table = [{s: (1 if accept(s) else 0) for s in self.states}]

    def __call__(self, r: int, state) -> int:
        table = self.table
        step = self.step
        while len(table) <= r:
            prev = table[-1]
            row = {}
            for s in self.states:
                v = s[0]
                total = 0
                for v2 in (v - 1, v, v + 1):
                    s2 = step(s, v2)
                    if s2 is not None:
                        total += prev[s2]
                row[s] = total
            table.append(row)
        return table[r][state]


@lru_cache(maxsize=64)
def _completion_counter(m: int, deg: int | None) -> _CompletionCounter:
    return _CompletionCounter(m, deg)


def _start():
    return (0, True, 0)


def count_epi(B: GraphLike, A: GraphLike, degree: int | None = None) -> int:
    """Number of morphisms ``B -> A`` (optionally of a fixed degree)."""
    n, m = _size(B), _size(A)
    if degree is not None and degree < 1:
        return 0
    return _completion_counter(m, degree)(n - 1, _start())


def iter_epi(B: GraphLike, A: GraphLike, degree: int | None = None) -> Iterator[Morphism]:
    """Lazily yield all morphisms ``B -> A`` in lexicographic order of value strings."""
    n, m = _size(B), _size(A)
    if degree is not None and degree < 1:
        return
    step, _, _ = _automaton(m, degree)
    count = _completion_counter(m, degree)
    if count(n - 1, _start()) == 0:
        return
    values = [0] * n
    stack = [(1, _start())]
    # Iterative DFS; children pushed in reverse so the smallest value is expanded first.
    while stack:
        i, state = stack.pop()
        values[i - 1] = state[0]
        if i == n:
            yield Morphism(tuple(values), m)
            continue
        v = state[0]
        children = []
        for v2 in (v - 1, v, v + 1):
            s2 = step(state, v2)
            if s2 is not None and count(n - 1 - i, s2) > 0:
                children.append((i + 1, s2))
        stack.extend(reversed(children))


def enumerate_epi(B: GraphLike, A: GraphLike, degree: int | None = None) -> list[Morphism]:
    return list(iter_epi(B, A, degree))


def sample_epi(B: GraphLike, A: GraphLike, rng, degree: int | None = None) -> Morphism:
    """Draw a morphism ``B -> A`` uniformly at random using ``rng`` (a ``random.Random``)."""
    n, m = _size(B), _size(A)
    step, _, _ = _automaton(m, degree)
    count = _completion_counter(m, degree)
    state = _start()
    total = count(n - 1, state)
    if total == 0:
        from .errors import NoMorphism

        raise NoMorphism(f"no morphism [[{n}]] -> [[{m}]]" + ("" if degree is None else f" of degree {degree}"))
    values = [0]
    for i in range(1, n):
        r = rng.randrange(count(n - i, state))
        v = state[0]
        for v2 in (v - 1, v, v + 1):
            s2 = step(state, v2)
            if s2 is None:
                continue
            c = count(n - 1 - i, s2)
            if r < c:
                state = s2
                values.append(v2)
                break
            r -= c
    return Morphism(tuple(values), m)


def find_epi(
    B: GraphLike,
    A: GraphLike,
    allowed: Callable[[int, int], bool],
    degree: int | None = None,
) -> Morphism | None:
    """Lexicographically least morphism ``f: B -> A`` with ``allowed(i, f(i))`` for all ``i``.

    Returns ``None`` if no such morphism exists.  Runs a backward feasibility
    pass over the sweep automaton, so the cost is linear in ``|B|``.
    """
    n, m = _size(B), _size(A)
    step, accept, states = _automaton(m, degree)
    feasible: list[set] = [set() for _ in range(n)]
    feasible[n - 1] = {s for s in states if accept(s) and allowed(n - 1, s[0])}
    for i in range(n - 2, -1, -1):
        nxt = feasible[i + 1]
        if not nxt:
            return None
        cur = set()
        for s in states:
            if not allowed(i, s[0]):
                continue
            v = s[0]
            for v2 in (v - 1, v, v + 1):
                s2 = step(s, v2)
                if s2 is not None and s2 in nxt:
                    cur.add(s)
                    break
        feasible[i] = cur
    state = _start()
    if state not in feasible[0]:
        return None
    values = [0]
    for i in range(1, n):
        v = state[0]
        for v2 in (v - 1, v, v + 1):
            s2 = step(state, v2)
            if s2 is not None and s2 in feasible[i]:
                state = s2
                values.append(v2)
                break
    return Morphism(tuple(values), m)
