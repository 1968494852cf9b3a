"""Forward abstract interpreter over labelled programs.

The interpreter is generic in the state it pushes through the program: a
lifted tree, a lifted tuple, or a plain numerical element when a single
variant is analysed.  Every state type offers ``assign``, ``filter``,
``join``, ``widen``, ``narrow``, ``leq`` and ``is_bottom``; lifted states
also offer ``ifdef``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Any, Callable

from .errors import AnalysisTimeout, NonTermination
from .featspace import Configuration, FeatureSpace, describe, project
from .frontend import ast as A
from .frontend.labels import locations
from .liftedtree import TreeDomain, TreeState
from .liftedtuple import TupleDomain, TupleState
from .numdom import NumElement, domain

BACKENDS = ("tree", "tuple", "brute")
ITERATION_GUARD = 1000


@dataclass(frozen=True)
class AnalysisOptions:
    backend: str = "tree"
    leaf_domain: str = "polyhedra"
    node_domain: str = "interval"
    widen_delay: int = 2
    narrow_iters: int = 2
    enum_cap: int = 1_000_000
    timeout: float | None = None

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}; pick one of {list(BACKENDS)}")
        domain(self.leaf_domain)
        domain(self.node_domain)
        if self.widen_delay < 0 or self.narrow_iters < 0:
            raise ValueError("widen_delay and narrow_iters must be non-negative")

    def as_dict(self) -> dict[str, Any]:
        return {"backend": self.backend, "leaf_domain": self.leaf_domain, "node_domain": self.node_domain,
                "widen_delay": self.widen_delay, "narrow_iters": self.narrow_iters, "enum_cap": self.enum_cap}


# -- verdicts ----------------------------------------------------------------------

def verdict(elem: NumElement, cond: A.BExpr) -> str:
    """valid / violated / unknown for one partition; an unreachable one is valid."""
    if elem.is_bottom or elem.filter(A.Not(cond)).is_bottom:
        return "valid"
    if elem.filter(cond).is_bottom:
        return "violated"
    return "unknown"


def verdicts(state, cond: A.BExpr) -> list[tuple[str, str]]:
    return [(desc, verdict(e, cond)) for desc, e in partitions(state)]


def partitions(state) -> list[tuple[str, NumElement]]:
    if isinstance(state, NumElement):
        return [("true", state)]
    return state.partitions()


# -- the interpreter ---------------------------------------------------------------

@dataclass
class Trace:
    """What one run records: states at labels, loop-head invariants, assert verdicts."""

    states: dict[int, Any] = field(default_factory=dict)
    heads: dict[int, Any] = field(default_factory=dict)
    asserts: dict[int, list[tuple[str, str]]] = field(default_factory=dict)
    assert_conds: dict[int, A.BExpr] = field(default_factory=dict)
    iterations: dict[int, int] = field(default_factory=dict)
    narrowing_reverts: int = 0


class Interpreter:
    def __init__(self, opts: AnalysisOptions, deadline: float | None = None):
        self.opts = opts
        self.deadline = deadline
        self.trace = Trace()

    def _tick(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise AnalysisTimeout(f"analysis exceeded its {self.opts.timeout} s budget")

    def run_block(self, block: A.Block, s, record: bool):
        if record and block.label is not None:
            self.trace.states[block.label] = s
        for stmt in block.stmts:
            s = self.run_stmt(stmt, s, record)
        return s

    def run_stmt(self, stmt: A.Stmt, s, record: bool):
        self._tick()
        if record and stmt.label is not None and not isinstance(stmt, A.Block):
            self.trace.states[stmt.label] = s
        if isinstance(stmt, A.Skip):
            return s
        if isinstance(stmt, A.Assign):
            return s.assign(stmt.var, stmt.expr)
        if isinstance(stmt, A.Decl):
            for name, init in stmt.items:
                if init is not None:
                    s = s.assign(name, init)
            return s
        if isinstance(stmt, A.Block):
            return self.run_block(stmt, s, record)
        if isinstance(stmt, A.If):
            then = self.run_block(stmt.then, s.filter(stmt.cond), record)
            orelse = self.run_block(stmt.orelse, s.filter(A.Not(stmt.cond)), record)
            return then.join(orelse)
        if isinstance(stmt, A.IfDef):
            return s.ifdef(stmt.cond, lambda t: self.run_block(stmt.then, t, record),
                           lambda t: self.run_block(stmt.orelse, t, record))
        if isinstance(stmt, A.Assert):
            if record:
                self.trace.asserts[stmt.label] = verdicts(s, stmt.cond)
                self.trace.assert_conds[stmt.label] = stmt.cond
            return s
        if isinstance(stmt, A.While):
            head = self.fixpoint(s, lambda x: self.run_block(stmt.body, x, False), stmt.cond, stmt.label)
            body_out = self.run_block(stmt.body, head.filter(stmt.cond), record)
            if record:
                if stmt.label is not None:
                    self.trace.heads[stmt.label] = head
                if stmt.end_label is not None:
                    self.trace.states[stmt.end_label] = body_out
            return head.filter(A.Not(stmt.cond))
        raise TypeError(f"unknown statement {stmt!r}")

    def fixpoint(self, entry, body: Callable, cond: A.BExpr, label: int | None = None):
        """Loop-head invariant by delayed widening followed by narrowing."""

        def step(x):
            return entry.join(body(x.filter(cond)))

        x = entry
        n = 0
        while True:
            self._tick()
            new = step(x)
            if new.leq(x):
                break
            x = x.join(new) if n < self.opts.widen_delay else x.widen(new)
            n += 1
            if n > ITERATION_GUARD:
                raise NonTermination(f"loop at label {label} did not stabilize in {ITERATION_GUARD} iterations")
        fx = new
        for _ in range(self.opts.narrow_iters):
            y = x.narrow(fx)
            fy = step(y)
            if not fy.leq(y):
                # not a post-fixpoint: keep the last checked invariant
                self.trace.narrowing_reverts += 1
                break
            if y.leq(x) and x.leq(y):
                break
            x, fx = y, fy
        if label is not None:
            self.trace.iterations[label] = n
        return x


def post_fixpoint_holds(entry, body: Callable, cond: A.BExpr, inv) -> bool:
    return entry.join(body(inv.filter(cond))).leq(inv)


# -- results -------------------------------------------------------------------------

class PerConfigState:
    """Per-configuration elements for one label (the brute-force backend)."""

    def __init__(self, space: FeatureSpace, elems: dict[Configuration, NumElement]):
        self.space = space
        self.elems = elems

    def mapping(self) -> dict[Configuration, NumElement]:
        return dict(self.elems)

    def partitions(self) -> list[tuple[str, NumElement]]:
        return [(describe(k, self.space), e) for k, e in self.elems.items()]

    def to_json(self) -> list[dict]:
        out = []
        for cond, e in self.partitions():
            r = e.render()
            out.append({"config": cond, "state": r if isinstance(r, str) else list(r)})
        return out


@dataclass
class InvariantMap:
    program: A.Program
    options: AnalysisOptions
    space: FeatureSpace
    states: dict[int, Any]
    asserts: dict[int, list[tuple[str, str]]]
    heads: dict[int, Any] = field(default_factory=dict)
    seconds: float = 0.0
    narrowing_reverts: int = 0

    @property
    def labels(self) -> list[int]:
        return [loc.label for loc in locations(self.program)]

    def state(self, label: int):
        return self.states[label]

    def mapping(self, label: int) -> dict[Configuration, NumElement]:
        """Element per valid configuration at ``label``."""
        s = self.states[label]
        if isinstance(s, NumElement):
            return {k: s for k in self.space.enumerate(self.options.enum_cap)}
        return s.mapping()

    def all_valid(self) -> bool:
        return all(v == "valid" for parts in self.asserts.values() for _, v in parts)


@dataclass
class OracleResult:
    space: FeatureSpace
    per_config: dict[Configuration, dict[int, NumElement]]
    asserts: dict[Configuration, dict[int, list[tuple[str, str]]]]

    def element(self, k: Configuration, label: int, bottom: NumElement) -> NumElement:
        return self.per_config[k].get(label, bottom)


def _leaf_universe(program: A.Program) -> tuple[str, ...]:
    return tuple(program.variables)


def _deadline(opts: AnalysisOptions) -> float | None:
    return None if opts.timeout is None else time.monotonic() + opts.timeout


def _fill_unreached(program: A.Program, states: dict, bottom) -> dict:
    for loc in locations(program):
        states.setdefault(loc.label, bottom)
    return states


def analyze(program: A.Program, opts: AnalysisOptions = AnalysisOptions()) -> InvariantMap:
    start = time.monotonic()
    space = FeatureSpace.of_program(program)
    leaf_cls = domain(opts.leaf_domain)
    universe = _leaf_universe(program)
    if opts.backend == "brute":
        oracle = analyze_brute(program, opts)
        states = {}
        bottom = leaf_cls.bottom(universe)
        for label in (loc.label for loc in locations(program)):
            states[label] = PerConfigState(space, {k: oracle.element(k, label, bottom) for k in oracle.per_config})
        asserts: dict[int, list[tuple[str, str]]] = {}
        for k, per_label in oracle.asserts.items():
            for label, parts in per_label.items():
                asserts.setdefault(label, []).extend((describe(k, space), v) for _, v in parts)
        _fill_assert_labels(program, asserts, [(describe(k, space), "valid") for k in oracle.per_config])
        return InvariantMap(program, opts, space, states, asserts, {}, time.monotonic() - start)

    if opts.backend == "tree":
        dom = TreeDomain(space, leaf_cls, universe, domain(opts.node_domain))
        initial = dom.initial()
    else:
        configs = space.enumerate(opts.enum_cap)
        dom = TupleDomain(space, configs, leaf_cls, universe)
        initial = dom.top()
    interp = Interpreter(opts, _deadline(opts))
    final = interp.run_block(program.body, initial, True)
    if program.exit_label is not None:
        interp.trace.states[program.exit_label] = final
    states = _fill_unreached(program, interp.trace.states, dom.bottom())
    asserts = interp.trace.asserts
    _fill_assert_labels(program, asserts, verdicts(dom.bottom(), A.TRUE))
    return InvariantMap(program, opts, space, states, asserts, interp.trace.heads,
                        time.monotonic() - start, interp.trace.narrowing_reverts)


def _fill_assert_labels(program: A.Program, asserts: dict, vacuous: list) -> None:
    # asserts in code no run reached are valid on every partition
    for stmt in A.iter_stmts(program.body):
        if isinstance(stmt, A.Assert) and stmt.label not in asserts:
            asserts[stmt.label] = list(vacuous)


def analyze_single(program: A.Program, opts: AnalysisOptions, deadline: float | None = None):
    """Analyse a feature-free program; returns (states per label, verdicts per label)."""
    leaf_cls = domain(opts.leaf_domain)
    interp = Interpreter(opts, deadline)
    final = interp.run_block(program.body, leaf_cls.top(_leaf_universe(program)), True)
    if program.exit_label is not None:
        interp.trace.states[program.exit_label] = final
    return interp.trace.states, interp.trace.asserts


def analyze_brute(program: A.Program, opts: AnalysisOptions = AnalysisOptions()) -> OracleResult:
    """Project every valid configuration and analyse each variant on its own."""
    space = FeatureSpace.of_program(program)
    deadline = _deadline(opts)
    per_config, asserts = {}, {}
    for k in space.enumerate(opts.enum_cap):
        states, verdict_map = analyze_single(project(program, k), opts, deadline)
        per_config[k] = states
        asserts[k] = verdict_map
    return OracleResult(space, per_config, asserts)


# -- comparison ------------------------------------------------------------------------

EQUAL, OVER, UNSOUND = "equal", "sound-over-approx", "UNSOUND"


@dataclass
class Report:
    rows: list[tuple[int, Configuration, str]]

    def counts(self) -> dict[str, int]:
        out = {EQUAL: 0, OVER: 0, UNSOUND: 0}
        for _, _, c in self.rows:
            out[c] += 1
        return out

    @property
    def sound(self) -> bool:
        return all(c != UNSOUND for _, _, c in self.rows)

    @property
    def exact(self) -> bool:
        return all(c == EQUAL for _, _, c in self.rows)

    def failures(self) -> list[tuple[int, Configuration, str]]:
        return [r for r in self.rows if r[2] != EQUAL]


def classify(mine: NumElement, reference: NumElement) -> str:
    if mine.leq(reference) and reference.leq(mine):
        return EQUAL
    if reference.leq(mine):
        return OVER
    return UNSOUND


def compare(result: InvariantMap, oracle: OracleResult, space: FeatureSpace | None = None) -> Report:
    """Classify every (label, configuration) of ``result`` against the oracle."""
    space = space or result.space
    bottom = domain(result.options.leaf_domain).bottom(_leaf_universe(result.program))
    rows = []
    for label in result.labels:
        mapping = result.mapping(label)
        for k in oracle.per_config:
            rows.append((label, k, classify(mapping[k], oracle.element(k, label, bottom))))
    return Report(rows)


def with_backend(opts: AnalysisOptions, backend: str) -> AnalysisOptions:
    return replace(opts, backend=backend)
