"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that the terminal summary prints after the run.
Run alone with ``pytest tests/test_acceptance.py -v``.
"""
import random
import time
from contextlib import contextmanager

import pytest

import test_numdom
from conftest import ACCEPTANCE_LINES, load
from famalyze.driver import bench_cell, gen_test
from famalyze.engine import EQUAL, OVER, UNSOUND, AnalysisOptions, analyze, analyze_brute, classify, with_backend
from famalyze.featspace import FeatureSpace
from famalyze.frontend import parse, parse_feature_expr
from famalyze.liftedtree import (Leaf, Node, TreeDomain, audit, compress, gamma_t, is_redundant, leaf_count, negate,
                                 unify)
from famalyze.numdom import Box, LinConstraint, Poly
from progen import random_program, random_space, random_tree

TREE = AnalysisOptions()
TUPLE = with_backend(TREE, "tuple")


class Criterion:
    def __init__(self, number, title):
        self.number, self.title = number, title
        self.notes = []

    def note(self, text):
        self.notes.append(text)


@contextmanager
def criterion(number, title):
    c = Criterion(number, title)
    try:
        yield c
    except BaseException as exc:
        detail = str(exc).splitlines()[0][:160] if str(exc) else type(exc).__name__
        _record("FAIL", c, detail)
        raise
    _record("PASS", c, "; ".join(c.notes))


def _record(status, c, detail):
    line = f"{status}  criterion {c.number}: {c.title}" + (f"  [{detail}]" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def timed(fn, *args):
    start = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - start


def poly(text, names):
    return Poly.top(names).filter(parse_feature_expr(text, set(names)))


def xy(text):
    return poly(text, ("x", "y"))


def simple_expected(k):
    if not k["B"]:
        return xy("y == 0 && x == 0")
    return xy("y == 10 && x == 0") if k["SIZE"] <= 3 else xy("y == -10 && x == 0")


# -- 1, 2: SIMPLE ------------------------------------------------------------------------------

def test_simple_decision_tree(simple):
    with criterion(1, "SIMPLE decision tree at the exit location") as c:
        result, secs = timed(analyze, simple, TREE)
        state = result.state(7)
        got = gamma_t(state.tree, state.domain.space)
        assert len(got) == 8
        for k, e in got.items():
            assert e == simple_expected(k), k
        b, size_ge4 = LinConstraint((0, 1), -1), LinConstraint((1, 0), -4)
        expected = Node(b, Node(size_ge4, Leaf(xy("y == -10 && x == 0")), Leaf(xy("y == 10 && x == 0"))),
                        Leaf(xy("y == 0 && x == 0")))
        assert state.tree == expected
        leaves = [sorted(map(str, e.render())) for _, e in state.partitions()]
        assert leaves == [["x=0", "y+10=0"], ["x=0", "y-10=0"], ["x=0", "y=0"]], leaves
        assert dict(result.asserts[7]) == {"B && SIZE>=4": "violated", "B && SIZE<=3": "valid", "!B": "violated"}
        assert secs < 1.0, f"{secs:.3f}s"
        c.note(f"{secs:.3f}s")


def test_simple_tuple_baseline(simple):
    with criterion(2, "SIMPLE tuple baseline and verdicts") as c:
        result, secs = timed(analyze, simple, TUPLE)
        got = result.mapping(7)
        assert len(got) == 8
        for k, e in got.items():
            assert e == simple_expected(k), k
        verdicts = dict(result.asserts[7])
        valid = {f"SIZE={s} && B" for s in (1, 2, 3)}
        assert {cfg for cfg, v in verdicts.items() if v == "valid"} == valid
        assert all(v == "violated" for cfg, v in verdicts.items() if cfg not in valid)
        assert len(verdicts) == 8
        assert secs < 1.0, f"{secs:.3f}s"
        c.note(f"{secs:.3f}s")


# -- 3: worked examples ----------------------------------------------------------------------

def test_worked_examples():
    with criterion(3, "unify, leaf-wise order and join, negation, SIZE<3 tree"):
        space = FeatureSpace.from_ranges({"SIZE": (1, 4)})
        dom = TreeDomain(space, Poly, ("y",))
        y = lambda text: Leaf(poly(text, ("y",)))
        ge = lambda v: LinConstraint((1,), -v)
        t1 = Node(ge(4), y("y >= 2"), y("y == 0"))
        t2 = Node(ge(2), y("y >= 0"), y("y <= 0"))
        u1, u2 = unify(t1, t2, dom.root)
        assert u1 == Node(ge(4), y("y >= 2"), Node(ge(2), y("y == 0"), y("y == 0")))
        assert u2 == Node(ge(4), y("y >= 0"), Node(ge(2), y("y >= 0"), y("y <= 0")))

        assert dom.leq(t1, t2) and not dom.leq(t2, t1)
        assert dom.leafwise("join", t1, t2, compressed=False) == u2
        assert gamma_t(dom.join(t1, t2), space) == gamma_t(u2, space)

        assert negate(LinConstraint((1,), -3)) == LinConstraint((-1,), 2)

        r = analyze(load("fig3.fam"), TREE)
        tree = r.state(r.program.exit_label).tree
        assert tree == Node(ge(3), Leaf(poly("x == -1", ("x",))), Leaf(poly("x == 1", ("x",))))


# -- 4: nonlinear presence condition ----------------------------------------------------------

@pytest.mark.parametrize("node_domain", ["interval", "octagon", "polyhedra"])
def test_nonlinear_window(node_domain):
    with criterion(4, f"A*A<9 result within the soundness window ({node_domain} nodes)") as c:
        p = load("square.fam")
        opts = AnalysisOptions(node_domain=node_domain)
        got = analyze(p, opts).mapping(3)
        oracle = analyze_brute(p, opts)
        x = lambda text: poly(text, ("x",))
        loose = 0
        for k, e in got.items():
            assert oracle.per_config[k][3].leq(e), k
            precise = x("x == 1") if k["A"] <= 2 else x("x == -1")
            coarse = x("x == 1") if k["A"] <= 2 else x("x >= -1 && x <= 1")
            assert precise.leq(e) and e.leq(coarse), (k, e)
            loose += classify(e, oracle.per_config[k][3]) == OVER
        c.note(f"{loose} of {len(got)} configurations over-approximated")


# -- 5: tree and tuple agree ------------------------------------------------------------------

def _agreement(program, opts):
    tree, tup = analyze(program, opts), analyze(program, with_backend(opts, "tuple"))
    kinds = []
    for label in tree.labels:
        t_map, u_map = tree.mapping(label), tup.mapping(label)
        assert t_map.keys() == u_map.keys()
        kinds += [classify(t_map[k], u_map[k]) for k in t_map]
    return kinds


def test_tree_equals_tuple_on_random_programs():
    with criterion(5, "tree equals tuple on affine programs, sound on nonlinear ones") as c:
        start = time.perf_counter()
        affine = 0
        for seed in range(150):
            kinds = _agreement(random_program(seed), AnalysisOptions(node_domain="interval"))
            assert all(k == EQUAL for k in kinds), ("single-feature", seed)
            affine += 1
        for seed in range(150):
            kinds = _agreement(random_program(10_000 + seed, multi_feature=True),
                               AnalysisOptions(node_domain="polyhedra"))
            assert all(k == EQUAL for k in kinds), ("multi-feature", seed)
            affine += 1
        unsound = over = 0
        for seed in range(150):
            kinds = _agreement(random_program(20_000 + seed, nonlinear=True, multi_feature=True), TREE)
            unsound += kinds.count(UNSOUND)
            over += kinds.count(OVER)
        assert unsound == 0, f"{unsound} UNSOUND"
        secs = time.perf_counter() - start
        assert secs < 300, f"{secs:.1f}s"
        c.note(f"{affine} affine programs equal; 150 nonlinear with {over} over-approximations; {secs:.1f}s")


# -- 6: test_n^k structure -------------------------------------------------------------------

def test_generated_family_structure():
    with criterion(6, "generated families: n+1 leaves, values n..0, tuple width k^n") as c:
        p = parse(gen_test(2, 3))
        i = lambda v: Leaf(poly(f"i == {v}", ("i",)))
        a1, a2 = LinConstraint((1, 0), -1), LinConstraint((0, 1), -1)
        assert analyze(p).state(p.exit_label).tree == Node(a2, i(0), Node(a1, i(1), i(2)))
        widths = 0
        for k in (3, 5, 7):
            for n in range(1, 9):
                p = parse(gen_test(n, k))
                state = analyze(p).state(p.exit_label)
                assert leaf_count(state.tree) == n + 1, (n, k)
                values = [e.bounds()[0] for _, e in state.partitions()]
                assert values[::-1] == [(m, m) for m in range(n, -1, -1)], (n, k, values)
                if k ** n <= 10 ** 5:
                    tup = analyze(p, TUPLE).state(p.exit_label)
                    assert len(tup) == k ** n, (n, k)
                    widths += 1
        c.note(f"{widths} tuple widths checked")


# -- 7: scaling --------------------------------------------------------------------------------

def _best(n, k, backend, repeat=5, timeout=None):
    r = bench_cell(n, k, backend, AnalysisOptions(), repeat=repeat, timeout=timeout)
    return r, (min(r.runs) if r.runs else None)


def test_scaling_direction():
    with criterion(7, "tree scales with n only; tuple grows with k^n") as c:
        _, tree65 = _best(6, 5, "tree")
        tuple65, tuple65_t = _best(6, 5, "tuple", repeat=1)
        assert tuple65.outcome == "ok"
        assert tuple65_t >= 5 * tree65, f"(6,5) speedup {tuple65_t / tree65:.1f}x"
        c.note(f"(6,5) speedup {tuple65_t / tree65:.0f}x")

        times = [_best(6, k, "tree")[1] for k in (3, 5, 7)]
        assert max(times) < 2 * min(times), times
        c.note("n=6 tree times " + "/".join(f"{t * 1000:.1f}ms" for t in times))

        tree10, tree10_t = _best(10, 3, "tree", repeat=3)
        assert tree10.outcome == "ok" and tree10_t < 60
        tuple10, tuple10_t = _best(10, 3, "tuple", repeat=1, timeout=60)
        if tuple10.outcome == "timeout":
            c.note("(10,3) tuple timed out at 60s")
        else:
            assert tuple10_t >= 20 * tree10_t, f"(10,3) speedup {tuple10_t / tree10_t:.1f}x"
            c.note(f"(10,3) speedup {tuple10_t / tree10_t:.0f}x")


# -- 8: numerical domains --------------------------------------------------------------------

NUMDOM_SUITES = [
    (test_numdom.test_lattice_laws_as_inclusion, test_numdom.DOMAIN_CLASSES),
    (test_numdom.test_concrete_soundness, test_numdom.DOMAIN_CLASSES),
    (test_numdom.test_constraint_round_trip, test_numdom.DOMAIN_CLASSES),
    (test_numdom.test_poly_double_description_round_trip, [None]),
    (test_numdom.test_oct_closure_is_idempotent, [None]),
    (test_numdom.test_widening_stabilizes_box_oct, [Box, test_numdom.Oct]),
    (test_numdom.test_widening_stabilizes_poly, [None]),
]


def test_numerical_domain_properties():
    with criterion(8, f"numerical-domain properties, {test_numdom.CASES} cases per domain") as c:
        assert test_numdom.CASES >= 1000
        start = time.perf_counter()
        for suite, classes in NUMDOM_SUITES:
            for cls in classes:
                suite() if cls is None else suite(cls)
        secs = time.perf_counter() - start
        assert secs < 120, f"{secs:.1f}s"
        c.note(f"{secs:.1f}s")


# -- 9: compression --------------------------------------------------------------------------

def test_compression_on_random_trees():
    with criterion(9, "compress preserves meaning, is idempotent, leaves no redundant node") as c:
        removed = 0
        for seed in range(500):
            rng = random.Random(seed)
            multi = seed % 2 == 1
            space = random_space(rng)
            dom = TreeDomain(space, Box, ("x", "y"), Poly if multi else Box)
            t = random_tree(rng, dom, depth=4, single=not multi)
            out = compress(t, dom.root)
            assert gamma_t(out, space) == gamma_t(t, space), seed
            assert compress(out, dom.root) == out, seed
            assert audit(out, dom.root) == [], seed
            assert not _redundant_on_some_path(out, dom.root), seed
            removed += leaf_count(t) - leaf_count(out)
        c.note(f"500 trees, {removed} leaves removed")


def _redundant_on_some_path(t, ctx):
    if t.is_leaf:
        return False
    if is_redundant(t.c, ctx) or is_redundant(negate(t.c), ctx):
        return True
    return _redundant_on_some_path(t.left, ctx.add(t.c)) or _redundant_on_some_path(t.right, ctx.add(negate(t.c)))
