import random

import pytest
from hypothesis import given, strategies as st

from knaster.amalgam import (
    Piece,
    SlopeClass,
    amalgamate,
    amalgamate_parallel,
    build_blocks,
    joint_project,
    normalize_condition_star,
    pad,
    slope_split,
    stretch,
)
from knaster.errors import (
    CodomainMismatch,
    MixedSlopes,
    StarViolation,
    VertexOutOfRange,
    ZeroMultiplicity,
)
from knaster.lingraph import Morphism, compose, enumerate_epi, identity

from .strategies import morphisms


def M(*vals, cod=None):
    return Morphism(tuple(vals), cod if cod is not None else max(vals) + 1)


def test_pad_examples():
    phi = pad(identity(2), 1, 2)
    assert phi.values == (0, 1, 1, 1)
    assert compose(identity(2), phi).values == (0, 1, 1, 1)
    assert pad(identity(4), 2, 0) == identity(4)
    f = M(0, 1, 0)
    phi = pad(f, 1, 1)
    assert phi.values == (0, 1, 1, 2)
    assert compose(f, phi).values == (0, 1, 1, 0)
    with pytest.raises(VertexOutOfRange):
        pad(f, 3, 1)


def test_stretch_examples():
    phi, s = stretch(identity(2), (2, 3))
    assert s.values == (0, 0, 1, 1, 1)
    assert compose(identity(2), phi) == s
    f = M(0, 1, 0)
    assert stretch(f, (1, 1, 1))[0] == identity(3)
    with pytest.raises(ZeroMultiplicity):
        stretch(f, (1, 0, 1))


def test_parallel_examples():
    ft, gt = amalgamate_parallel(M(0, 0, 1), M(0, 1, 1))
    assert ft.values == (0, 1, 2, 2)
    assert gt.values == (0, 0, 1, 2)
    f = M(0, 1, 1, 2)
    assert amalgamate_parallel(f, f) == (identity(4), identity(4))
    with pytest.raises(MixedSlopes):
        amalgamate_parallel(Piece((0, 1), 2), Piece((1, 0), 2))
    with pytest.raises(CodomainMismatch):
        amalgamate_parallel(M(0, 1), M(0, 1, 2))


def test_normalize_examples():
    phi, fs = normalize_condition_star(M(0, 1, 0))
    assert fs.values == (0, 1, 1, 0)
    assert slope_split(fs).intervals == ((0, 1), (2, 3))
    g = M(0, 1, 1, 2)
    assert normalize_condition_star(g) == (identity(4), g)
    _, fs = normalize_condition_star(M(0, 1, 0, 1))
    assert fs.values == (0, 1, 1, 0, 0, 1)
    assert slope_split(fs).length == 3


def test_slope_split_examples():
    sp = slope_split(M(0, 1, 1, 0))
    assert sp.length == 2
    assert sp.pieces[1].values == (0, 1) and sp.pieces[1].slope is SlopeClass.INC
    assert sp.pieces[2].values == (1, 0) and sp.pieces[2].slope is SlopeClass.DEC
    assert sp.pieces[-2].values == (0, 1)
    assert slope_split(identity(3)).intervals == ((0, 2),)
    with pytest.raises(StarViolation):
        slope_split(M(0, 1, 0))


def test_build_blocks_examples():
    assert build_blocks(2, 1) == ((1, 2), (1, -1))
    assert build_blocks(1, 1) == ((1,), (1,))
    assert build_blocks(2, 2) == ((1, 2, -2, -1), (1, 2, -2, -1))


def test_amalgamate_examples():
    f = M(0, 1, 0)
    fp, gp, plan = amalgamate(f, identity(2))
    assert compose(f, fp) == compose(identity(2), gp)
    assert plan.total == fp.dom == gp.dom
    fp, gp, _ = amalgamate(f, f)
    assert compose(f, fp) == compose(f, gp)
    with pytest.raises(CodomainMismatch):
        amalgamate(f, identity(3))


def test_joint_project_examples():
    c, pa, pb = joint_project(2, 3)
    assert c == 3 and pb == identity(3) and pa.cod == 2
    c, pa, pb = joint_project(4, 4)
    assert c == 4 and pa == pb == identity(4)
    c, pa, pb = joint_project(4, 3)
    assert c == 4 and pa == identity(4) and pb.values == (0, 1, 2, 2)


def test_amalgamate_exhaustive_small():
    for k in range(2, 4):
        maps = [f for n in range(k, 6) for f in enumerate_epi(n, k)]
        for f in maps:
            for g in maps:
                fp, gp, plan = amalgamate(f, g)
                assert compose(f, fp) == compose(g, gp)
                # the weighted category needs deg f' = deg g and deg g' = deg f
                assert fp.degree == g.degree and gp.degree == f.degree
                sf, sg = slope_split(plan.f_star), slope_split(plan.g_star)
                for a, b in zip(plan.alpha, plan.beta):
                    assert sf.pieces[a].slope is sg.pieces[b].slope


@given(morphisms(max_dom=9), st.data())
def test_pad_fibers(f, data):
    i = data.draw(st.integers(0, f.dom - 1))
    j = data.draw(st.integers(0, 4))
    phi = pad(f, i, j)
    assert phi.dom == f.dom + j and phi.degree == 1 and phi.is_monotone()
    assert len(phi.fiber(i)) == j + 1
    assert all(len(phi.fiber(v)) == 1 for v in range(f.dom) if v != i)
    s = list(f.values)
    assert list(compose(f, phi).values) == s[:i] + [s[i]] * (j + 1) + s[i + 1 :]


@given(morphisms(max_dom=9), st.data())
def test_stretch_string(f, data):
    mults = data.draw(st.lists(st.integers(1, 3), min_size=f.dom, max_size=f.dom))
    phi, s = stretch(f, mults)
    assert phi.is_monotone() and phi.degree == 1
    assert list(s.values) == [v for v, r in zip(f.values, mults) for _ in range(r)]


@given(morphisms(max_dom=10))
def test_normalized_always_splits(f):
    phi, fs = normalize_condition_star(f)
    assert compose(f, phi) == fs
    sp = slope_split(fs)
    assert sp.length == f.degree
    covered = [i for a, b in sp.intervals for i in range(a, b + 1)]
    assert covered == list(range(fs.dom))
    for j in range(1, sp.length + 1):
        a, b = sp.interval(j)
        assert sp.pieces[-j].values == tuple(fs.values[b - i] for i in range(b - a + 1))


@given(st.integers(2, 5), st.integers(0, 2**32))
def test_parallel_merge(m, seed):
    rng = random.Random(seed)
    runs_f = [rng.randint(1, 3) for _ in range(m)]
    runs_g = [rng.randint(1, 3) for _ in range(m)]
    f = Piece(tuple(v for v, r in enumerate(runs_f) for _ in range(r)), m)
    g = Piece(tuple(v for v, r in enumerate(runs_g) for _ in range(r)), m)
    for a, b in ((f, g), (f.reversed(), g.reversed())):
        ft, gt = amalgamate_parallel(a, b)
        left = [a.values[i] for i in ft.values]
        right = [b.values[i] for i in gt.values]
        assert left == right
        assert len(left) == sum(max(x, y) for x, y in zip(runs_f, runs_g))
        assert ft.is_monotone() and gt.is_monotone() and ft.degree == gt.degree == 1


@given(morphisms(max_dom=9, max_cod=4), st.data())
def test_amalgamate_property(f, data):
    g = data.draw(morphisms(cod=f.cod, max_dom=9))
    fp, gp, plan = amalgamate(f, g)
    assert compose(f, fp) == compose(g, gp)
    assert plan.segments[0][0] == 0 and plan.segments[-1][1] == plan.total - 1
    assert all(b + 1 == c for (_, b), (c, _) in zip(plan.segments, plan.segments[1:]))
    assert len(plan.alpha) == len(plan.beta) == f.degree * g.degree
    assert plan.to_dict()["total"] == plan.total
