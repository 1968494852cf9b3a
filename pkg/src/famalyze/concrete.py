"""Concrete collecting semantics of one variant, used as a soundness oracle.

Every reachable state is enumerated explicitly: interval literals branch
over all their values and loops are iterated until no new state appears.
Uninitialized variables start at 0; the abstract analysis treats them as
unknown, so that choice is one of the behaviours it must cover.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import CapExceeded
from .featspace import Configuration, eval_bexpr, project
from .frontend import ast as A

State = tuple[int, ...]


@dataclass
class Collected:
    universe: tuple[str, ...]
    states: dict[int, set[State]] = field(default_factory=dict)
    truncated: bool = False

    def at(self, label: int) -> set[State]:
        return self.states.get(label, set())


def _values(e: A.Expr, env: dict[str, int]) -> list[int]:
    if isinstance(e, A.Num):
        return [e.value]
    if isinstance(e, A.Rand):
        return list(range(e.lo, e.hi + 1))
    if isinstance(e, A.Var):
        return [env[e.name]]
    if isinstance(e, A.Neg):
        return [-v for v in _values(e.operand, env)]
    ls, rs = _values(e.left, env), _values(e.right, env)
    op = {"+": lambda a, b: a + b, "-": lambda a, b: a - b, "*": lambda a, b: a * b}[e.op]
    return sorted({op(a, b) for a, b in itertools.product(ls, rs)})


class Collector:
    def __init__(self, universe: tuple[str, ...], max_states: int, max_rounds: int):
        self.out = Collected(universe)
        self.max_states = max_states
        self.max_rounds = max_rounds

    def _env(self, s: State) -> dict[str, int]:
        return dict(zip(self.out.universe, s))

    def _record(self, label: int | None, states: set[State]) -> None:
        if label is not None:
            self.out.states.setdefault(label, set()).update(states)

    def _test(self, states: set[State], cond: A.BExpr) -> set[State]:
        return {s for s in states if eval_bexpr(cond, self._env(s))}

    def _assign(self, states: set[State], var: str, e: A.Expr) -> set[State]:
        i = self.out.universe.index(var)
        out = set()
        for s in states:
            for v in _values(e, self._env(s)):
                out.add(s[:i] + (v,) + s[i + 1:])
        if len(out) > self.max_states:
            raise CapExceeded(len(out), self.max_states, "concrete states")
        return out

    def block(self, block: A.Block, states: set[State]) -> set[State]:
        self._record(block.label, states)
        for stmt in block.stmts:
            states = self.stmt(stmt, states)
        return states

    def stmt(self, stmt: A.Stmt, states: set[State]) -> set[State]:
        if not isinstance(stmt, A.Block):
            self._record(stmt.label, states)
        if isinstance(stmt, (A.Skip, A.Assert)):
            return states
        if isinstance(stmt, A.Assign):
            return self._assign(states, stmt.var, stmt.expr)
        if isinstance(stmt, A.Decl):
            for name, init in stmt.items:
                if init is not None:
                    states = self._assign(states, name, init)
            return states
        if isinstance(stmt, A.Block):
            return self.block(stmt, states)
        if isinstance(stmt, A.If):
            neg = A.Not(stmt.cond)
            return self.block(stmt.then, self._test(states, stmt.cond)) | self.block(stmt.orelse, self._test(states, neg))
        if isinstance(stmt, A.While):
            head = set(states)
            frontier = set(states)
            for _ in range(self.max_rounds):
                after = self.block(stmt.body, self._test(frontier, stmt.cond))
                self._record(stmt.end_label, after)
                frontier = after - head
                if not frontier:
                    break
                head |= frontier
                if len(head) > self.max_states:
                    self.out.truncated = True
                    break
            else:
                self.out.truncated = True
            return self._test(head, A.Not(stmt.cond))
        raise TypeError(f"cannot execute {stmt!r}")


def collect(program: A.Program, k: Configuration | None = None,
            max_states: int = 10_000, max_rounds: int = 500) -> Collected:
    """Reachable states per label of the variant of ``program`` selected by ``k``."""
    variant = project(program, k) if k is not None else program
    universe = tuple(program.variables)
    c = Collector(universe, max_states, max_rounds)
    final = c.block(variant.body, {(0,) * len(universe)})
    c._record(variant.exit_label, final)
    return c.out
