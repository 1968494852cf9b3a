"""Features, configurations, satisfaction of feature expressions, projection."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Mapping

from .errors import CapExceeded
from .frontend import ast as A

DEFAULT_CAP = 1_000_000
# beyond this many raw valuations a constrained space is not counted exactly
_COUNT_LIMIT = 50_000_000


@dataclass(frozen=True)
class Configuration:
    """A total valuation of the features, stored in declaration order."""

    names: tuple[str, ...]
    values: tuple[int, ...]

    def __getitem__(self, name: str) -> int:
        return self.values[self.names.index(name)]

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.names, self.values))

    @classmethod
    def of(cls, space: "FeatureSpace", valuation: Mapping[str, int]) -> "Configuration":
        return cls(space.names, tuple(valuation[n] for n in space.names))


def eval_expr(e: A.Expr, env: Mapping[str, int]) -> int:
    if isinstance(e, A.Num):
        return e.value
    if isinstance(e, A.Var):
        return env[e.name]
    if isinstance(e, A.Neg):
        return -eval_expr(e.operand, env)
    if isinstance(e, A.BinOp):
        l, r = eval_expr(e.left, env), eval_expr(e.right, env)
        if e.op == "+":
            return l + r
        if e.op == "-":
            return l - r
        return l * r
    raise TypeError(f"cannot evaluate {e!r} deterministically")


_CMP = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def eval_bexpr(b: A.BExpr, env: Mapping[str, int]) -> bool:
    if isinstance(b, A.BoolConst):
        return b.value
    if isinstance(b, A.Cmp):
        return _CMP[b.op](eval_expr(b.left, env), eval_expr(b.right, env))
    if isinstance(b, A.Not):
        return not eval_bexpr(b.operand, env)
    if isinstance(b, A.And):
        return eval_bexpr(b.left, env) and eval_bexpr(b.right, env)
    if isinstance(b, A.Or):
        return eval_bexpr(b.left, env) or eval_bexpr(b.right, env)
    raise TypeError(f"not a boolean expression: {b!r}")


def sat(k: Configuration, theta: A.BExpr) -> bool:
    """k |= theta, evaluated exactly over the integers."""
    return eval_bexpr(theta, k.as_dict())


@dataclass(frozen=True)
class FeatureSpace:
    features: tuple[A.FeatureDecl, ...]
    constraints: tuple[A.BExpr, ...] = ()

    @classmethod
    def of_program(cls, program: A.Program) -> "FeatureSpace":
        return cls(program.features, program.constraints)

    @classmethod
    def from_ranges(cls, ranges: Mapping[str, tuple[int, int]], constraints=()) -> "FeatureSpace":
        feats = tuple(A.FeatureDecl(n, lo, hi) for n, (lo, hi) in ranges.items())
        return cls(feats, tuple(constraints))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)

    @property
    def bounds(self) -> tuple[tuple[int, int], ...]:
        return tuple((f.lo, f.hi) for f in self.features)

    def product_size(self) -> int:
        return math.prod(f.hi - f.lo + 1 for f in self.features)

    def is_valid(self, k: Configuration) -> bool:
        in_range = all(f.lo <= v <= f.hi for f, v in zip(self.features, k.values))
        return in_range and all(sat(k, c) for c in self.constraints)

    def _valuations(self) -> Iterator[Configuration]:
        names = self.names
        ranges = [range(f.lo, f.hi + 1) for f in self.features]
        for values in itertools.product(*ranges):
            k = Configuration(names, values)
            if all(sat(k, c) for c in self.constraints):
                yield k

    def enumerate(self, cap: int = DEFAULT_CAP) -> list[Configuration]:
        """Valid configurations in lexicographic order of the declaration order."""
        total = self.product_size()
        if total <= cap:
            return list(self._valuations())
        if not self.constraints or total > _COUNT_LIMIT:
            raise CapExceeded(total, cap)
        found: list[Configuration] = []
        count = 0
        for k in self._valuations():
            count += 1
            if count <= cap:
                found.append(k)
        if count > cap:
            raise CapExceeded(count, cap)
        return found

    def models(self, theta: A.BExpr, cap: int = DEFAULT_CAP) -> list[Configuration]:
        return [k for k in self.enumerate(cap) if sat(k, theta)]

    def describe(self, k: Configuration) -> str:
        return describe(k, self)


def describe(k: Configuration, space: FeatureSpace | None = None) -> str:
    """Conjunction such as ``B && SIZE=2``; [0,1] features use ``B`` / ``!B``."""
    if not k.names:
        return "true"
    boolean = set(k.names) if space is None else {f.name for f in space.features if (f.lo, f.hi) == (0, 1)}
    parts = []
    for name, value in zip(k.names, k.values):
        if name in boolean and value in (0, 1):
            parts.append(name if value else f"!{name}")
        else:
            parts.append(f"{name}={value}")
    return " && ".join(parts)


def _project_block(block: A.Block, k: Configuration) -> A.Block:
    return A.Block(tuple(_project_stmt(s, k) for s in block.stmts), block.label)


def _project_stmt(stmt: A.Stmt, k: Configuration) -> A.Stmt:
    if isinstance(stmt, A.Block):
        return _project_block(stmt, k)
    if isinstance(stmt, A.If):
        return A.If(stmt.cond, _project_block(stmt.then, k), _project_block(stmt.orelse, k), stmt.label)
    if isinstance(stmt, A.While):
        return A.While(stmt.cond, _project_block(stmt.body, k), stmt.label, stmt.end_label)
    if isinstance(stmt, A.IfDef):
        chosen = stmt.then if sat(k, stmt.cond) else stmt.orelse
        # the arm keeps the directive's label so that location still exists
        return A.Block(_project_block(chosen, k).stmts, stmt.label)
    return stmt


def project(program: A.Program, k: Configuration) -> A.Program:
    """The variant selected by ``k``: every `#if` resolved, no features left."""
    return A.Program((), (), _project_block(program.body, k), program.variables,
                     program.exit_label, name=program.name)
