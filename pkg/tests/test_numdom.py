import itertools
import math
import operator
import random

import pytest
from hypothesis import given, settings

from famalyze.errors import CapExceeded, NotRepresentable, UniverseMismatch
from famalyze.frontend import ast as A
from famalyze.frontend import parse_feature_expr
from famalyze.numdom import DOMAINS, Box, LinConstraint, Oct, Poly, domain
from famalyze.numdom import intervals as I
from famalyze.numdom.dd import chernikova
from famalyze.numdom.octagon import close
from progen import random_cond, random_element, random_expr, seeds

INF = math.inf
DOMAIN_CLASSES = [Box, Oct, Poly]
CASES = 1000


def cond(text, names=("x", "y")):
    return parse_feature_expr(text, set(names))


def expr(text, names=("x", "y")):
    return cond(f"{text} == 0", names).left


def box(**itvs):
    return Box(tuple(itvs), tuple(itvs.values()))


# -- worked examples ---------------------------------------------------------------

def test_top_and_bottom():
    for cls in DOMAIN_CLASSES:
        assert cls.top(("x",)).bounds() == [(-INF, INF)]
        assert cls.bottom(("x",)).is_bottom
        assert cls.top(("x",)).to_constraints() == []
        assert cls.bottom(("x",)).to_constraints() == [LinConstraint.bottom(1)]


def test_identity_laws():
    a = Poly.top(("x", "y")).filter(cond("x + y <= 3 && x >= 0"))
    assert Poly.top(a.universe).meet(a) == a
    assert Poly.bottom(a.universe).join(a) == a


def test_box_join_is_hull():
    assert box(x=(0, 1)).join(box(x=(3, 5))).bounds() == [(0, 5)]


def test_poly_hull_of_two_points():
    u = ("x", "y")
    p = Poly.top(u).filter(cond("x == 10 && y == 0")).join(Poly.top(u).filter(cond("x == 9 && y == 1")))
    assert p.equivalent(Poly.top(u).filter(cond("x + y == 10 && x >= 9 && x <= 10")))
    # the segment's facets can be stated over either variable once x+y=10 holds
    rendered = p.render()
    assert rendered[0] == "x+y-10=0" and len(rendered) == 3


def test_oct_antisymmetry():
    u = ("x", "y")
    o = Oct.top(u).filter(cond("x - y <= 0")).meet(Oct.top(u).filter(cond("y - x <= 0")))
    assert o.equivalent(Oct.top(u).filter(cond("x == y")))
    assert (1, 1) in o.concrete_points([(0, 2), (0, 2)]) and not o.contains((0, 1))


def test_widening_examples():
    assert box(x=(0, 1)).widen(box(x=(0, 2))).bounds() == [(0, INF)]
    assert box(x=(0, INF)).narrow(box(x=(0, 10))).bounds() == [(0, 10)]
    p0 = Poly.top(("x",)).filter(cond("x >= 0 && x <= 1", ("x",)))
    p1 = Poly.top(("x",)).filter(cond("x >= 0 && x <= 2", ("x",)))
    assert p0.widen(p1).bounds() == [(0, INF)]


def test_assign_examples():
    assert box(x=(10, 10)).assign("x", expr("x - 1", ("x",))).bounds() == [(9, 9)]
    u = ("x", "y")
    p = Poly.top(u).filter(cond("x == 10 && y == 0")).assign("y", expr("y + 1"))
    assert p.bounds() == [(10, 10), (1, 1)]
    assert Box.top(("x",)).assign("x", A.Rand(1, 4)).bounds() == [(1, 4)]


def test_filter_examples():
    assert box(x=(0, 10)).filter(cond("x != 0", ("x",))).bounds() == [(1, 10)]
    assert box(A=(1, 4)).filter(A.Not(cond("A * A < 9", ("A",)))).bounds() == [(3, 4)]
    u = ("x", "y")
    seg = Poly.top(u).filter(cond("x + y == 10 && x >= 0 && x <= 10"))
    assert seg.filter(cond("x == 0")).bounds() == [(0, 0), (10, 10)]


def test_feature_box_constraints():
    c = box(A=(3, 4)).to_constraints()
    assert sorted(x.render(("A",)) for x in c) == ["-A+4>=0", "A-3>=0"]


def test_from_constraints():
    size = ("SIZE",)
    cs = [LinConstraint((1,), -1), LinConstraint((-1,), 4)]
    assert Box.from_constraints(size, cs).bounds() == [(1, 4)]
    assert Box.from_constraints(size, []).is_top
    assert Box.from_constraints(size, [LinConstraint.bottom(1)]).is_bottom
    with pytest.raises(NotRepresentable):
        Box.from_constraints(("x", "y"), [LinConstraint((1, 1), 0)], strict=True)
    with pytest.raises(NotRepresentable):
        Oct.from_constraints(("x", "y"), [LinConstraint((2, 1), 0)], strict=True)


def test_concrete_points_examples():
    assert box(x=(1, 2)).concrete_points([(0, 5)]) == {(1,), (2,)}
    assert Box.bottom(("x",)).concrete_points([(0, 5)]) == set()
    diag = Poly.top(("x", "y")).filter(cond("x == y"))
    assert diag.concrete_points([(0, 2), (0, 2)]) == {(0, 0), (1, 1), (2, 2)}
    with pytest.raises(CapExceeded):
        Box.top(("x", "y", "z")).concrete_points([(0, 200)] * 3)


def test_constraint_normalization():
    assert LinConstraint.make((2, 4), 6) == LinConstraint((1, 2), 3)
    assert LinConstraint.make((0, 0), -5) == LinConstraint.bottom(2)
    assert LinConstraint((1, -1), -10).render(("x", "y")) == "x-y-10>=0"
    assert LinConstraint((1, 0), -3).negate() == LinConstraint((-1, 0), 2)


def test_universe_mismatch():
    with pytest.raises(UniverseMismatch):
        Box.top(("x",)).join(Box.top(("y",)))
    with pytest.raises(UniverseMismatch):
        Box.top(("x",)).join(Poly.top(("x",)))


def test_domain_lookup():
    assert domain("octagon") is Oct
    with pytest.raises(ValueError):
        domain("zones")


def test_interval_arithmetic():
    assert I.mul((-2, 3), (4, 5)) == (-10, 15)
    assert I.join((0, 1), None) == (0, 1)
    assert I.meet((0, 1), (2, 3)) is None
    square = expr("A * A", ("A",))
    # each factor is narrowed against the other's range, not as a square
    assert I.hc4_revise(">=", square, A.Num(9), {"A": (1, 4)}) == {"A": (3, 4)}
    assert I.hc4_revise("<", square, A.Num(9), {"A": (1, 4)}) == {"A": (1, 4)}
    assert I.hc4_revise(">", square, A.Num(16), {"A": (1, 4)}) is None


# -- oracles ---------------------------------------------------------------------------

def _has_rand(e) -> bool:
    if isinstance(e, A.Rand):
        return True
    return any(_has_rand(getattr(e, f)) for f in ("left", "right", "operand") if hasattr(e, f))


def _values(e, env) -> set[int]:
    """Every value ``e`` can take in ``env``."""
    if isinstance(e, A.Num):
        return {e.value}
    if isinstance(e, A.Rand):
        return set(range(e.lo, e.hi + 1))
    if isinstance(e, A.Var):
        return {env[e.name]}
    if isinstance(e, A.Neg):
        return {-v for v in _values(e.operand, env)}
    op = {"+": operator.add, "-": operator.sub, "*": operator.mul}[e.op]
    return {op(a, b) for a in _values(e.left, env) for b in _values(e.right, env)}


RELATIONS = {"<": operator.lt, "<=": operator.le, "==": operator.eq, "!=": operator.ne,
             ">": operator.gt, ">=": operator.ge}


def _holds(b, env) -> bool:
    if isinstance(b, A.BoolConst):
        return b.value
    if isinstance(b, A.Not):
        return not _holds(b.operand, env)
    if isinstance(b, A.And):
        return _holds(b.left, env) and _holds(b.right, env)
    if isinstance(b, A.Or):
        return _holds(b.left, env) or _holds(b.right, env)
    (l,), (r,) = _values(b.left, env), _values(b.right, env)
    return RELATIONS[b.op](l, r)


def _universe(rng):
    return ("x", "y", "z")[:rng.randint(1, 3)]


def _pair(rng, cls):
    u = _universe(rng)
    return u, random_element(rng, cls, u), random_element(rng, cls, u)


BOUNDS = (-5, 5)


def _points(e):
    return e.concrete_points([BOUNDS] * len(e.universe))


def _grid(u):
    return itertools.product(range(BOUNDS[0], BOUNDS[1] + 1), repeat=len(u))


# -- properties (1000 cases per domain) ----------------------------------------------------

@pytest.mark.parametrize("cls", DOMAIN_CLASSES, ids=lambda c: c.kind)
@settings(max_examples=CASES)
@given(seed=seeds)
def test_lattice_laws_as_inclusion(cls, seed):
    rng = random.Random(seed)
    u, a, b = _pair(rng, cls)
    c = random_element(rng, cls, u)
    assert a.leq(a)
    j, m = a.join(b), a.meet(b)
    assert a.leq(j) and b.leq(j)
    assert m.leq(a) and m.leq(b)
    assert a.leq(a.widen(b)) and b.leq(a.widen(b))
    if a.leq(b) and b.leq(c):
        assert a.leq(c)
    assert m.leq(j)
    assert cls.bottom(u).leq(a) and a.leq(cls.top(u))


@pytest.mark.parametrize("cls", DOMAIN_CLASSES, ids=lambda c: c.kind)
@settings(max_examples=CASES)
@given(seed=seeds)
def test_concrete_soundness(cls, seed):
    rng = random.Random(seed)
    u, a, b = _pair(rng, cls)
    pa, pb = _points(a), _points(b)
    assert {p for p in _grid(u) if a.contains(p)} == pa
    assert _points(a.join(b)) >= pa | pb
    assert _points(a.meet(b)) >= pa & pb
    narrowed = _points(a.narrow(b))
    assert narrowed >= pa & pb

    test = random_cond(rng, list(u))
    if not _has_rand(test):
        filtered = a.filter(test)
        for p in pa:
            if _holds(test, dict(zip(u, p))):
                assert filtered.contains(p), (a, test, p)

    var = rng.choice(u)
    e = random_expr(rng, list(u))
    image = a.assign(var, e)
    i = u.index(var)
    for p in pa:
        for v in _values(e, dict(zip(u, p))):
            q = p[:i] + (v,) + p[i + 1:]
            assert image.contains(q), (a, var, e, p, q)


@pytest.mark.parametrize("cls", DOMAIN_CLASSES, ids=lambda c: c.kind)
@settings(max_examples=CASES)
@given(seed=seeds)
def test_constraint_round_trip(cls, seed):
    rng = random.Random(seed)
    u = _universe(rng)
    a = random_element(rng, cls, u)
    back = cls.from_constraints(u, a.to_constraints())
    assert back.equivalent(a)
    for c in a.to_constraints():
        assert a.entails(c)


@settings(max_examples=CASES)
@given(seed=seeds)
def test_poly_double_description_round_trip(seed):
    rng = random.Random(seed)
    u = _universe(rng)
    a = random_element(rng, Poly, u)
    if a.is_bottom:
        return
    from_gens = Poly._from_gens(u, a.lines, a.rays)
    assert from_gens.equivalent(a) and from_gens == a
    d = len(u) + 1
    # constraints -> generators -> constraints
    lines, rays = chernikova(d, list(a.eqs), [(1,) + (0,) * (d - 1)] + list(a.ineqs))
    eqs, ineqs = chernikova(d, lines, rays)
    again = Poly._from_cons(u, eqs, ineqs)
    assert again.equivalent(a)


@settings(max_examples=CASES)
@given(seed=seeds)
def test_oct_closure_is_idempotent(seed):
    rng = random.Random(seed)
    a = random_element(rng, Oct, _universe(rng))
    if a.is_bottom:
        return
    assert close(a.closed) == a.closed
    assert close(a.raw) == a.closed


def _stabilization_steps(rng, cls, u, length=40):
    """Strict increases of ``x_{n+1} = x_n widen (x_n join a_n)`` along a random chain."""
    x = random_element(rng, cls, u)
    while x.is_bottom:
        x = random_element(rng, cls, u)
    start = x
    grow = start
    increases = 0
    for _ in range(length):
        grow = grow.join(random_element(rng, cls, u)) if rng.random() < 0.7 else grow
        nxt = x.widen(x.join(grow))
        assert x.leq(nxt)
        if not nxt.leq(x):
            increases += 1
        x = nxt
    return start, increases


@pytest.mark.parametrize("cls", [Box, Oct], ids=lambda c: c.kind)
@settings(max_examples=CASES)
@given(seed=seeds)
def test_widening_stabilizes_box_oct(cls, seed):
    rng = random.Random(seed)
    u = _universe(rng)
    _, increases = _stabilization_steps(rng, cls, u)
    assert increases <= 3 * len(u) + 3


@settings(max_examples=CASES)
@given(seed=seeds)
def test_widening_stabilizes_poly(seed):
    rng = random.Random(seed)
    u = _universe(rng)
    start, increases = _stabilization_steps(rng, Poly, u)
    assert increases <= len(start.to_constraints()) + 2


def test_widening_bound_on_unbounded_counter():
    for cls in DOMAIN_CLASSES:
        x = cls.top(("i",)).filter(cond("i == 0", ("i",)))
        steps = 0
        while True:
            nxt = x.widen(x.join(x.assign("i", expr("i + 1", ("i",)))))
            if nxt.leq(x):
                break
            x, steps = nxt, steps + 1
        assert steps <= 1 and x.bounds() == [(0, INF)]


def test_every_domain_registered():
    assert set(DOMAINS.values()) == set(DOMAIN_CLASSES)
