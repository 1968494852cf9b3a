import pytest
from hypothesis import given, settings

from famalyze.concrete import collect
from famalyze.engine import (EQUAL, OVER, UNSOUND, AnalysisOptions, Interpreter, analyze, analyze_brute, classify,
                             compare, post_fixpoint_holds, verdict, with_backend)
from famalyze.errors import AnalysisTimeout, CapExceeded, NonTermination
from famalyze.featspace import Configuration
from famalyze.frontend import ast as A
from famalyze.frontend import parse, parse_feature_expr
from famalyze.liftedtree import leaf_count
from famalyze.numdom import Box, Poly
from progen import random_program, seeds

from conftest import load

INF = float("inf")
TREE = AnalysisOptions()
TUPLE = with_backend(TREE, "tuple")
BRUTE = with_backend(TREE, "brute")


def xy(text):
    return Poly.top(("x", "y")).filter(parse_feature_expr(text, {"x", "y"}))


def cfg(size, b):
    return Configuration(("SIZE", "B"), (size, b))


def simple_expected(k):
    if not k["B"]:
        return xy("y == 0 && x == 0")
    return xy("y == 10 && x == 0") if k["SIZE"] <= 3 else xy("y == -10 && x == 0")


# -- SIMPLE ---------------------------------------------------------------------------

@pytest.mark.parametrize("opts", [TREE, TUPLE, BRUTE], ids=lambda o: o.backend)
def test_simple_final_states(simple, opts):
    result = analyze(simple, opts)
    got = result.mapping(7)
    assert len(got) == 8
    for k, e in got.items():
        assert e == simple_expected(k), k


def test_simple_tree_shape(simple):
    state = analyze(simple, TREE).state(7)
    assert leaf_count(state.tree) == 3
    assert [p for p, _ in state.partitions()] == ["B && SIZE>=4", "B && SIZE<=3", "!B"]


def test_simple_verdicts(simple):
    tree = analyze(simple, TREE).asserts[7]
    assert dict(tree) == {"B && SIZE>=4": "violated", "B && SIZE<=3": "valid", "!B": "violated"}
    tup = analyze(simple, TUPLE).asserts[7]
    valid = {c for c, v in tup if v == "valid"}
    assert valid == {f"SIZE={s} && B" for s in (1, 2, 3)}
    assert all(v == "violated" for c, v in tup if c not in valid)


def test_simple_loop_entry_and_head(simple):
    result = analyze(simple, TUPLE)
    for e in result.mapping(2).values():
        assert e == xy("y == 0 && x == 10")
    head = result.heads[2]
    for k, inv in head.mapping().items():
        # the relation between x and y at the loop head fixes the exit values
        if k["B"]:
            sign = 1 if k["SIZE"] <= 3 else -1
            rel = parse_feature_expr("x + y == 10" if sign > 0 else "x - y == 10", {"x", "y"})
            assert inv.filter(A.Not(rel)).is_bottom, (k, inv)


def test_simple_brute_component(simple):
    oracle = analyze_brute(simple, TREE)
    assert oracle.per_config[cfg(1, 0)][7] == xy("y == 0 && x == 0")


def test_trivial_program_every_backend():
    p = parse("int x := 0;")
    for opts in (TREE, TUPLE, BRUTE):
        r = analyze(p, opts)
        for e in r.mapping(p.exit_label).values():
            assert e.bounds() == [(0, 0)]


def test_fig3_tree():
    r = analyze(load("fig3.fam"), TREE)
    t = r.state(r.program.exit_label).tree
    assert not t.is_leaf and leaf_count(t) == 2
    assert [(p, e.bounds()) for p, e in r.state(r.program.exit_label).partitions()] == [
        ("SIZE>=3", [(-1, -1)]), ("SIZE<=2", [(1, 1)])]


# -- comparison -----------------------------------------------------------------------

def test_compare_classifications():
    a, b = Box(("x",), ((0, 1),)), Box(("x",), ((0, 2),))
    assert classify(a, a) == EQUAL
    assert classify(b, a) == OVER
    assert classify(a, b) == UNSOUND


def test_compare_simple_all_equal(simple):
    oracle = analyze_brute(simple, TREE)
    assert compare(analyze(simple, TREE), oracle).exact
    assert compare(analyze(simple, BRUTE), oracle).exact


def test_compare_square_is_sound():
    p = load("square.fam")
    report = compare(analyze(p, TREE), analyze_brute(p, TREE))
    assert report.sound
    assert all(c == EQUAL for label, _, c in report.rows if label != 3)


# -- verdicts ---------------------------------------------------------------------------

def test_verdict_rules():
    x = parse_feature_expr("x > 0", {"x"})
    assert verdict(Box(("x",), ((1, 5),)), x) == "valid"
    assert verdict(Box(("x",), ((-5, 0),)), x) == "violated"
    assert verdict(Box(("x",), ((-5, 5),)), x) == "unknown"
    assert verdict(Box.bottom(("x",)), x) == "valid"


def test_unreached_assert_is_vacuous():
    p = parse("#feature A in [0,1]\nint x := 0;\n#if (A > 5) assert (x == 1); #endif")
    for opts in (TREE, TUPLE, BRUTE):
        r = analyze(p, opts)
        assert r.all_valid()


# -- fixpoints ----------------------------------------------------------------------------

def _counter(start="0"):
    return Box.top(("i",)).filter(parse_feature_expr(f"i == {start}", {"i"}))


def test_identity_body_is_stable_at_once():
    interp = Interpreter(AnalysisOptions(backend="tuple"))
    entry = _counter()
    head = interp.fixpoint(entry, lambda s: s, A.TRUE, 1)
    assert head == entry and interp.trace.iterations[1] == 0


def test_immediate_widening():
    interp = Interpreter(AnalysisOptions(backend="tuple", widen_delay=0, narrow_iters=0))
    inc = parse_feature_expr("i + 1 == 0", {"i"}).left
    head = interp.fixpoint(_counter(), lambda s: s.assign("i", inc), A.TRUE, 1)
    assert head.bounds() == [(0, INF)]


def test_narrowing_recovers_loop_bound():
    p = parse("int i := 0; while (i < 10) { i := i + 1; }")
    loop = p.body.stmts[1]
    for delay in (0, 2):
        r = analyze(p, AnalysisOptions(backend="tuple", leaf_domain="interval", widen_delay=delay))
        assert r.heads[loop.label].elems[0].bounds() == [(0, 10)]
        wide = analyze(p, AnalysisOptions(backend="tuple", leaf_domain="interval", widen_delay=delay,
                                          narrow_iters=0))
        assert wide.heads[loop.label].elems[0].bounds() == [(0, INF)]


class Runaway:
    """A lattice element that never stabilizes."""

    def __init__(self, n=0):
        self.n = n

    def join(self, other):
        return Runaway(max(self.n, other.n) + 1)

    widen = join

    def leq(self, other):
        return False

    def filter(self, cond):
        return self


def test_iteration_guard():
    with pytest.raises(NonTermination):
        Interpreter(TREE).fixpoint(Runaway(), lambda s: s, A.TRUE, 1)


def test_timeout_and_cap():
    from famalyze.driver import gen_test

    p = parse(gen_test(9, 3))
    with pytest.raises(AnalysisTimeout):
        analyze(p, AnalysisOptions(backend="tuple", timeout=0.05))
    with pytest.raises(CapExceeded):
        analyze(p, AnalysisOptions(backend="tuple", enum_cap=100))


def test_option_validation():
    with pytest.raises(ValueError):
        AnalysisOptions(widen_delay=-1)
    with pytest.raises(ValueError):
        AnalysisOptions(leaf_domain="zones")
    with pytest.raises(ValueError):
        AnalysisOptions(backend="bdd")


# -- properties --------------------------------------------------------------------------

def _loops(program):
    return [s for s in A.iter_stmts(program.body) if isinstance(s, A.While)]


def _check_post_fixpoints(program, opts):
    result = analyze(program, opts)
    interp = Interpreter(opts)
    for loop in _loops(program):
        if loop.label not in result.heads:
            continue
        head = result.heads[loop.label]
        entry = result.state(loop.label)
        body = lambda x, loop=loop: interp.run_block(loop.body, x, False)
        assert post_fixpoint_holds(entry, body, loop.cond, head), loop.label
    return result


def _check_concrete(program, result):
    for k, _ in result.mapping(result.labels[0]).items():
        seen = collect(program, k, max_states=2000, max_rounds=200)
        for label, states in seen.states.items():
            elem = result.mapping(label)[k]
            for s in states:
                assert elem.contains(s), (label, k, s, elem)


@pytest.mark.parametrize("opts", [TREE, TUPLE], ids=lambda o: o.backend)
def test_fixtures_post_fixpoint_and_concrete_soundness(fixture_program, opts):
    result = _check_post_fixpoints(fixture_program, opts)
    _check_concrete(fixture_program, result)


def test_fixture_backends_agree(fixture_program):
    oracle = analyze_brute(fixture_program, TREE)
    assert compare(analyze(fixture_program, TUPLE), oracle).exact
    report = compare(analyze(fixture_program, AnalysisOptions(node_domain="polyhedra")), oracle)
    assert report.sound
    if all(A.is_affine(f) for f in _feature_tests(fixture_program)):
        assert report.exact, report.failures()[:3]
    # interval nodes drop relational feature tests, so only containment is required
    assert compare(analyze(fixture_program, TREE), oracle).sound


def _feature_tests(program):
    out = list(program.constraints)
    out += [s.cond for s in A.iter_stmts(program.body) if isinstance(s, A.IfDef)]
    return out


@settings(max_examples=60)
@given(seeds)
def test_random_programs_sound_and_post_fixpoint(seed):
    program = random_program(seed, nonlinear=seed % 3 == 0, multi_feature=True)
    for opts in (TREE, TUPLE):
        result = _check_post_fixpoints(program, opts)
        _check_concrete(program, result)


@settings(max_examples=60)
@given(seeds)
def test_narrowing_only_refines(seed):
    program = random_program(seed)
    opts = AnalysisOptions(backend="tuple", leaf_domain="interval")
    narrowed = analyze(program, opts)
    plain = analyze(program, AnalysisOptions(backend="tuple", leaf_domain="interval", narrow_iters=0))
    for label in narrowed.heads:
        assert narrowed.heads[label].leq(plain.heads[label])
    _check_concrete(program, narrowed)


@settings(max_examples=60)
@given(seeds)
def test_tuple_matches_brute(seed):
    program = random_program(seed, nonlinear=True, multi_feature=True)
    assert compare(analyze(program, TUPLE), analyze_brute(program, TREE)).exact
