"""Generic sequences for the category of pointed linear graphs and its weighted variant.

A generic sequence is grown one bond at a time.  Each saturation request
``(n, e: A_n -> A, g: B -> A)`` is answered by a level ``N > n`` and a morphism
``h: A_N -> B`` with ``g o h = e o f_n^N``; the answer is stored as a
:class:`SaturationCertificate` that can be replayed exactly.

In the weighted category ``Kstar`` an object is a graph with a positive
rational weight and a morphism ``(B, m) -> (A, n)`` must have degree ``m/n``.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .amalgam import amalgamate, pad
from .errors import (
    BudgetExhausted,
    CertificateError,
    CodomainMismatch,
    DegreeMismatch,
    InvalidParams,
    NonIntegerRatio,
    NotSeparated,
    VertexOutOfRange,
)
from .lingraph import (
    Morphism,
    PointedLinearGraph,
    compose,
    count_epi,
    find_epi,
    graph_distance,
    identity,
    sample_epi,
)

__all__ = [
    "AnnotatedObject",
    "AnnotatedMorphism",
    "SaturationCertificate",
    "GenericSequence",
    "AutomorphismApprox",
    "validate_star",
    "star_amalgamate",
    "build_generic",
    "forget",
    "separation_extension",
    "fiber_distance",
    "realize_degree",
    "approx_degree",
]

CATEGORIES = ("K", "Kstar")


def _rational(x) -> Fraction:
    if isinstance(x, (list, tuple)):
        return Fraction(int(x[0]), int(x[1]))
    return Fraction(x)


def _pair(x: Fraction) -> list[int]:
    return [x.numerator, x.denominator]


@dataclass(frozen=True)
class AnnotatedObject:
    """A graph ``[[n]]`` together with a positive rational weight."""

    n: int
    weight: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "weight", _rational(self.weight))
        PointedLinearGraph(self.n)
        if self.weight <= 0:
            raise InvalidParams(f"weight must be positive, got {self.weight}")

    @property
    def graph(self) -> PointedLinearGraph:
        return PointedLinearGraph(self.n)

    def to_dict(self) -> dict:
        return {"n": self.n, "weight": _pair(self.weight)}

    @classmethod
    def from_dict(cls, d: dict) -> "AnnotatedObject":
        return cls(int(d["n"]), _rational(d["weight"]))

    def __str__(self):
        return f"([[{self.n}]], {self.weight})"


@dataclass(frozen=True)
class AnnotatedMorphism:
    """A morphism ``(B, dom_w) -> (A, cod_w)`` whose degree equals ``dom_w / cod_w``."""

    base: Morphism
    dom_w: Fraction
    cod_w: Fraction

    def __post_init__(self):
        dw, cw = _rational(self.dom_w), _rational(self.cod_w)
        object.__setattr__(self, "dom_w", dw)
        object.__setattr__(self, "cod_w", cw)
        if dw <= 0 or cw <= 0:
            raise InvalidParams("weights must be positive")
        ratio = dw / cw
        if ratio.denominator != 1:
            raise NonIntegerRatio(f"weight ratio {ratio} is not a natural number")
        if self.base.degree != ratio:
            raise DegreeMismatch(f"degree {self.base.degree} but weight ratio {ratio}")

    @property
    def source(self) -> AnnotatedObject:
        return AnnotatedObject(self.base.dom, self.dom_w)

    @property
    def target(self) -> AnnotatedObject:
        return AnnotatedObject(self.base.cod, self.cod_w)

    def to_dict(self) -> dict:
        return {**self.base.to_dict(), "dom_w": _pair(self.dom_w), "cod_w": _pair(self.cod_w)}


def validate_star(f: Morphism, dom_w, cod_w) -> AnnotatedMorphism:
    return AnnotatedMorphism(f, _rational(dom_w), _rational(cod_w))


def star_amalgamate(
    f: AnnotatedMorphism, g: AnnotatedMorphism
) -> tuple[AnnotatedObject, AnnotatedMorphism, AnnotatedMorphism]:
    """Amalgamate over a shared weighted codomain ``(A, k)``; the amalgam gets weight ``mn/k``."""
    if f.base.cod != g.base.cod or f.cod_w != g.cod_w:
        raise CodomainMismatch(f"codomains {f.target} and {g.target} differ")
    fp, gp, _ = amalgamate(f.base, g.base)
    w = f.dom_w * g.dom_w / f.cod_w
    return AnnotatedObject(fp.dom, w), validate_star(fp, w, f.dom_w), validate_star(gp, w, g.dom_w)


@dataclass(frozen=True)
class SaturationCertificate:
    """Request ``(level, e, g)`` answered by ``(answer_level, h)`` with ``g o h = e o f_level^answer_level``.

    In the weighted category ``weights`` holds the weights of ``A`` and ``B``.
    """

    level: int
    e: Morphism
    g: Morphism
    answer_level: int
    h: Morphism
    weights: tuple[Fraction, Fraction] | None = None

    def to_dict(self) -> dict:
        d = {
            "level": self.level,
            "e": self.e.to_dict(),
            "g": self.g.to_dict(),
            "answer_level": self.answer_level,
            "h": self.h.to_dict(),
        }
        if self.weights is not None:
            d["weights"] = [_pair(w) for w in self.weights]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SaturationCertificate":
        w = d.get("weights")
        return cls(
            int(d["level"]),
            Morphism.from_dict(d["e"]),
            Morphism.from_dict(d["g"]),
            int(d["answer_level"]),
            Morphism.from_dict(d["h"]),
            None if w is None else (_rational(w[0]), _rational(w[1])),
        )


@dataclass(frozen=True)
class Request:
    level: int
    e: Morphism
    g: Morphism

    def to_dict(self) -> dict:
        return {"level": self.level, "e": self.e.to_dict(), "g": self.g.to_dict()}


class GenericSequence:
    """A finite tower ``A_1 <- A_2 <- ... <- A_N`` with certified saturation answers.

    Levels are 1-based.  ``bond(n)`` is ``f_n^{n+1}: A_{n+1} -> A_n`` and
    ``composite(n, N)`` is ``f_n^N``, cached.  Sequences grow in place.
    """

    def __init__(self, category: str = "K", first: AnnotatedObject | None = None):
        if category not in CATEGORIES:
            raise InvalidParams(f"unknown category {category!r}")
        self.category = category
        self.objects: list[AnnotatedObject] = [first or AnnotatedObject(2, Fraction(1))]
        self.bonds: list[Morphism] = []
        self.certificates: list[SaturationCertificate] = []
        self.pending: list[Request] = []
        self._composites: dict[tuple[int, int], Morphism] = {}

    @property
    def weighted(self) -> bool:
        return self.category == "Kstar"

    def __len__(self) -> int:
        return len(self.objects)

    def size(self, n: int) -> int:
        return self.obj(n).n

    def obj(self, n: int) -> AnnotatedObject:
        if not 1 <= n <= len(self.objects):
            raise VertexOutOfRange(f"level {n} not in 1..{len(self.objects)}")
        return self.objects[n - 1]

    def bond(self, n: int) -> Morphism:
        if not 1 <= n < len(self.objects):
            raise VertexOutOfRange(f"no bond below level {n}")
        return self.bonds[n - 1]

    def composite(self, n: int, N: int) -> Morphism:
        if n == N:
            return identity(self.size(n))
        if n > N:
            raise InvalidParams(f"f_{n}^{N} needs n <= N")
        key = (n, N)
        f = self._composites.get(key)
        if f is None:
            f = compose(self.composite(n, N - 1), self.bond(N - 1))
            self._composites[key] = f
        return f

    def append(self, bond: Morphism, weight=None) -> None:
        """Add a level ``A_{N+1}`` with bond ``bond: A_{N+1} -> A_N``."""
        top = self.objects[-1]
        if bond.cod != top.n:
            raise CodomainMismatch(f"bond lands in [[{bond.cod}]], top is [[{top.n}]]")
        if self.weighted:
            if weight is None:
                weight = top.weight * bond.degree
            validate_star(bond, weight, top.weight)
        else:
            weight = Fraction(1)
        self.objects.append(AnnotatedObject(bond.dom, weight))
        self.bonds.append(bond)

    def copy(self) -> "GenericSequence":
        out = GenericSequence(self.category, self.objects[0])
        out.objects = list(self.objects)
        out.bonds = list(self.bonds)
        out.certificates = list(self.certificates)
        out.pending = list(self.pending)
        out._composites = dict(self._composites)
        return out

    # saturation

    def _request_weights(self, n: int, e: Morphism, g: Morphism) -> tuple[Fraction, Fraction] | None:
        if not self.weighted:
            return None
        wa = self.obj(n).weight / e.degree
        return wa, wa * g.degree

    def find_answer(self, n: int, e: Morphism, g: Morphism, start: int | None = None) -> tuple[int, Morphism] | None:
        """Least existing level ``N > n`` with some ``h: A_N -> B`` such that ``g o h = e o f_n^N``."""
        weights = self._request_weights(n, e, g)
        for N in range(max(n + 1, start or 0), len(self) + 1):
            target = compose(e, self.composite(n, N)).values
            deg = None
            if weights is not None:
                ratio = self.obj(N).weight / weights[1]
                if ratio.denominator != 1:
                    continue
                deg = int(ratio)
            gv = g.values
            h = find_epi(self.size(N), g.dom, lambda i, v: gv[v] == target[i], degree=deg)
            if h is not None:
                return N, h
        return None

    def extend_for(self, n: int, e: Morphism, g: Morphism) -> tuple[int, Morphism]:
        """Append one level by amalgamating ``e o f_n^N`` with ``g``; return ``(N+1, g')``."""
        N = len(self)
        F = compose(e, self.composite(n, N))
        fp, gp, _ = amalgamate(F, g)
        self.append(fp)
        return N + 1, gp

    def saturate(self, n: int, e: Morphism, g: Morphism, extend: bool = True) -> SaturationCertificate | None:
        """Answer the request, extending the tower only when no existing level works."""
        self._check_request(n, e, g)
        found = self.find_answer(n, e, g)
        if found is None:
            if not extend:
                return None
            found = self.extend_for(n, e, g)
        cert = SaturationCertificate(n, e, g, found[0], found[1], self._request_weights(n, e, g))
        self.certificates.append(cert)
        return cert

    def _check_request(self, n: int, e: Morphism, g: Morphism) -> None:
        if e.dom != self.size(n):
            raise CodomainMismatch(f"e starts at [[{e.dom}]] but A_{n} is [[{self.size(n)}]]")
        if e.cod != g.cod:
            raise CodomainMismatch(f"e lands in [[{e.cod}]], g in [[{g.cod}]]")

    def verify_certificate(self, cert: SaturationCertificate) -> bool:
        if cert.answer_level <= cert.level or cert.answer_level > len(self):
            return False
        if cert.h.dom != self.size(cert.answer_level) or cert.h.cod != cert.g.dom:
            return False
        if compose(cert.g, cert.h) != compose(cert.e, self.composite(cert.level, cert.answer_level)):
            return False
        if self.weighted and cert.weights is not None:
            wa, wb = cert.weights
            try:
                validate_star(cert.e, self.obj(cert.level).weight, wa)
                validate_star(cert.g, wb, wa)
                validate_star(cert.h, self.obj(cert.answer_level).weight, wb)
            except (DegreeMismatch, NonIntegerRatio):
                return False
        return True

    def verify(self) -> dict[str, bool]:
        """Re-check every bond and certificate."""
        report = {}
        for n, bond in enumerate(self.bonds, start=1):
            ok = bond.cod == self.size(n) and bond.dom == self.size(n + 1)
            if ok and self.weighted:
                try:
                    validate_star(bond, self.obj(n + 1).weight, self.obj(n).weight)
                except (DegreeMismatch, NonIntegerRatio):
                    ok = False
            report[f"bond {n}"] = ok
        for i, cert in enumerate(self.certificates):
            report[f"certificate {i}"] = self.verify_certificate(cert)
        return report

    # serialization

    def to_dict(self) -> dict:
        return {
            "category": self.category,
            "objects": [o.to_dict() for o in self.objects],
            "bonds": [b.values for b in self.bonds],
            "certificates": [c.to_dict() for c in self.certificates],
            "pending": [r.to_dict() for r in self.pending],
        }

    @classmethod
    def from_dict(cls, d: dict, check: bool = True) -> "GenericSequence":
        objects = [AnnotatedObject.from_dict(o) for o in d["objects"]]
        seq = cls(d.get("category", "K"), objects[0])
        for obj, values in zip(objects[1:], d["bonds"]):
            seq.append(Morphism(tuple(values), seq.objects[-1].n), obj.weight if seq.weighted else None)
        seq.certificates = [SaturationCertificate.from_dict(c) for c in d.get("certificates", [])]
        seq.pending = [
            Request(int(r["level"]), Morphism.from_dict(r["e"]), Morphism.from_dict(r["g"]))
            for r in d.get("pending", [])
        ]
        if check:
            bad = [k for k, ok in seq.verify().items() if not ok]
            if bad:
                raise CertificateError(f"failed on load: {', '.join(bad)}")
        return seq


def _requests_for(seq: GenericSequence, n: int, max_size: int, rng: random.Random) -> Iterator[Request]:
    # b = a forces g = id, which every higher level answers, so it is skipped
    an = seq.size(n)
    for a in range(2, min(max_size, an) + 1):
        for b in range(a + 1, max_size + 1):
            if count_epi(an, a) == 0 or count_epi(b, a) == 0:
                continue
            yield Request(n, sample_epi(an, a, rng), sample_epi(b, a, rng))


def build_generic(
    category: str = "K",
    budget: int = 4,
    seed: int = 0,
    max_size: int | None = None,
    strict: bool = False,
) -> GenericSequence:
    """Grow a tower of at most ``budget`` objects by answering saturation requests first in, first out.

    Requests for level ``n`` are queued when that level appears: for each pair
    of sizes ``2 <= a < b <= max_size`` (default ``budget + 2``) one random
    ``e: A_n -> [[a]]`` and ``g: [[b]] -> [[a]]``.  In ``Kstar`` the weights of
    ``[[a]]`` and ``[[b]]`` are the ones forced by the degrees of ``e`` and ``g``.
    A request no existing level answers and that would need a level beyond the
    budget goes to ``seq.pending``; with ``strict`` that raises
    :class:`BudgetExhausted` carrying the partial sequence.
    """
    if budget < 1:
        raise InvalidParams("budget must be at least 1")
    if category not in CATEGORIES:
        raise InvalidParams(f"unknown category {category!r}")
    max_size = budget + 2 if max_size is None else max_size
    rng = random.Random(seed)
    seq = GenericSequence(category)
    queue: deque[Request] = deque(_requests_for(seq, 1, max_size, rng))
    while queue:
        req = queue.popleft()
        grow = len(seq) < budget
        before = len(seq)
        cert = seq.saturate(req.level, req.e, req.g, extend=grow)
        if cert is None:
            seq.pending.append(req)
            continue
        for n in range(before + 1, len(seq) + 1):
            queue.extend(_requests_for(seq, n, max_size, rng))
    if strict and seq.pending:
        raise BudgetExhausted(
            f"{len(seq.pending)} requests left unanswered at budget {budget}",
            partial=seq,
            pending=tuple(seq.pending),
        )
    return seq


def forget(seq: GenericSequence) -> GenericSequence:
    """The same tower with weights dropped; certificates carry over verbatim."""
    out = GenericSequence("K", AnnotatedObject(seq.objects[0].n))
    for bond in seq.bonds:
        out.append(bond)
    out.certificates = [
        SaturationCertificate(c.level, c.e, c.g, c.answer_level, c.h) for c in seq.certificates
    ]
    out.pending = list(seq.pending)
    return out


def fiber_distance(seq: GenericSequence, level: int, x: int, y: int, top: int | None = None) -> int:
    """Least graph distance in ``A_top`` between the fibers of ``x`` and ``y`` under ``f_level^top``."""
    top = len(seq) if top is None else top
    f = seq.composite(level, top)
    zs, ws = f.fiber(x), f.fiber(y)
    # fibers are unions of intervals; a two-pointer sweep finds the closest pair
    best, i, j = None, 0, 0
    while i < len(zs) and j < len(ws):
        d = abs(zs[i] - ws[j])
        best = d if best is None else min(best, d)
        if zs[i] < ws[j]:
            i += 1
        else:
            j += 1
    return best


def separation_extension(seq: GenericSequence, level: int, x: int, y: int) -> GenericSequence:
    """Push the fibers of ``x`` and ``y`` more than 2 apart at the top of the tower.

    Uses the non-decreasing ``g`` that doubles the vertex just above
    ``min(x, y)`` and answers the request ``(level, id, g)``.  The tower is
    extended in place and returned.
    """
    n = seq.size(level)
    for v in (x, y):
        if not 0 <= v < n:
            raise VertexOutOfRange(f"vertex {v} not in [[{n}]]")
    if graph_distance(n, x, y) <= 1:
        raise NotSeparated(f"vertices {x} and {y} are adjacent in [[{n}]]")
    g = pad(n, min(x, y) + 1, 1)
    seq.saturate(level, identity(n), g)
    return seq


@dataclass(frozen=True)
class AutomorphismApprox:
    """Level-one data ``g_1: A_{i_1} -> A_1`` of an automorphism of the limit."""

    i_1: int
    g_1: Morphism

    def to_dict(self) -> dict:
        return {"i_1": self.i_1, "g_1": self.g_1.to_dict()}


def approx_degree(a: AutomorphismApprox, seq: GenericSequence) -> Fraction:
    f = seq.composite(1, a.i_1)
    if f.dom != a.g_1.dom or a.g_1.cod != seq.size(1):
        raise CodomainMismatch("stage map does not match the tower")
    return Fraction(a.g_1.degree, f.degree)


def realize_degree(seq: GenericSequence, p: int, q: int, max_levels: int | None = None) -> AutomorphismApprox:
    """Stage data of an automorphism of degree ``p/q``.

    Take ``C`` large enough to carry morphisms of degree ``p`` and ``q`` onto
    ``A_1``, fix ``h: C -> A_1`` of degree ``q`` and find ``t: A_N -> C`` with
    ``h o t = f_1^N``, extending the tower if no level answers and
    ``max_levels`` allows it.  The stage map is ``g o t`` for ``g`` of degree ``p``.
    """
    if p < 1 or q < 1:
        raise InvalidParams("p and q must be positive")
    s1 = seq.size(1)
    c = max(p, q) * (s1 - 1) + 1
    anything = lambda i, v: True  # noqa: E731
    h = find_epi(c, s1, anything, degree=q)
    g = find_epi(c, s1, anything, degree=p)
    e = identity(s1)
    cert = seq.saturate(1, e, h, extend=False)
    if cert is None:
        if max_levels is not None and len(seq) >= max_levels:
            raise BudgetExhausted(
                f"no level of a {len(seq)}-level tower answers, and the limit is {max_levels}",
                partial=seq,
                pending=(Request(1, e, h),),
            )
        cert = seq.saturate(1, e, h)
    return AutomorphismApprox(cert.answer_level, compose(g, cert.h))
