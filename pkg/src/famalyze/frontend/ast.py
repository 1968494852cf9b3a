"""Abstract syntax of the `#if`-enriched mini language.

Arithmetic expressions, Boolean tests and feature expressions share the same
node types; which names they may mention is enforced by the parser.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union


# -- arithmetic expressions -------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Rand:
    """Interval literal ``[lo, hi]``: a nondeterministic choice of an integer."""

    lo: int
    hi: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - *
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


Expr = Union[Num, Rand, Var, BinOp, Neg]


# -- boolean / feature expressions ------------------------------------------

@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Cmp:
    op: str  # one of == != < <= > >=
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Not:
    operand: "BExpr"


@dataclass(frozen=True)
class And:
    left: "BExpr"
    right: "BExpr"


@dataclass(frozen=True)
class Or:
    left: "BExpr"
    right: "BExpr"


BExpr = Union[BoolConst, Cmp, Not, And, Or]

TRUE = BoolConst(True)
FALSE = BoolConst(False)

NEGATED_CMP = {"==": "!=", "!=": "==", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}


def nnf(b: BExpr, negate: bool = False) -> BExpr:
    """Push negations down to the comparison atoms (De Morgan)."""
    if isinstance(b, BoolConst):
        return BoolConst(b.value != negate)
    if isinstance(b, Cmp):
        return Cmp(NEGATED_CMP[b.op], b.left, b.right) if negate else b
    if isinstance(b, Not):
        return nnf(b.operand, not negate)
    if isinstance(b, And):
        l, r = nnf(b.left, negate), nnf(b.right, negate)
        return Or(l, r) if negate else And(l, r)
    if isinstance(b, Or):
        l, r = nnf(b.left, negate), nnf(b.right, negate)
        return And(l, r) if negate else Or(l, r)
    raise TypeError(f"not a boolean expression: {b!r}")


def expr_names(e: Expr | BExpr) -> Iterator[str]:
    """Yield every variable name mentioned in an expression (with repeats)."""
    if isinstance(e, Var):
        yield e.name
    elif isinstance(e, (BinOp, Cmp, And, Or)):
        yield from expr_names(e.left)
        yield from expr_names(e.right)
    elif isinstance(e, (Neg, Not)):
        yield from expr_names(e.operand)


def is_affine(e: Expr | BExpr) -> bool:
    """True when no product multiplies two non-constant subexpressions."""
    if isinstance(e, (Num, Rand, Var, BoolConst)):
        return True
    if isinstance(e, BinOp):
        if not (is_affine(e.left) and is_affine(e.right)):
            return False
        if e.op == "*":
            return not any(expr_names(e.left)) or not any(expr_names(e.right))
        return True
    if isinstance(e, (Cmp, And, Or)):
        return is_affine(e.left) and is_affine(e.right)
    return is_affine(e.operand)


# -- statements ---------------------------------------------------------------

@dataclass(frozen=True)
class Skip:
    label: int | None = None


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr
    label: int | None = None


@dataclass(frozen=True)
class Decl:
    items: tuple[tuple[str, Expr | None], ...]
    label: int | None = None


@dataclass(frozen=True)
class Block:
    """A statement sequence. Only projected `#if` arms carry a label."""

    stmts: tuple["Stmt", ...] = ()
    label: int | None = None


@dataclass(frozen=True)
class If:
    cond: BExpr
    then: Block
    orelse: Block
    label: int | None = None


@dataclass(frozen=True)
class While:
    cond: BExpr
    body: Block
    label: int | None = None
    end_label: int | None = None


@dataclass(frozen=True)
class IfDef:
    cond: BExpr
    then: Block
    orelse: Block
    label: int | None = None


@dataclass(frozen=True)
class Assert:
    cond: BExpr
    label: int | None = None


Stmt = Union[Skip, Assign, Decl, Block, If, While, IfDef, Assert]


@dataclass(frozen=True)
class FeatureDecl:
    name: str
    lo: int
    hi: int
    boolean: bool = False


@dataclass(frozen=True)
class Location:
    label: int
    kind: str  # "stmt", "loop-end" or "exit"
    text: str


@dataclass(frozen=True)
class Program:
    features: tuple[FeatureDecl, ...]
    constraints: tuple[BExpr, ...]
    body: Block
    variables: tuple[str, ...] = ()
    exit_label: int | None = None
    name: str = field(default="", compare=False)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)


def iter_stmts(stmt: Stmt) -> Iterator[Stmt]:
    """Pre-order traversal over a statement and everything nested in it."""
    yield stmt
    if isinstance(stmt, Block):
        for s in stmt.stmts:
            yield from iter_stmts(s)
    elif isinstance(stmt, (If, IfDef)):
        yield from iter_stmts(stmt.then)
        yield from iter_stmts(stmt.orelse)
    elif isinstance(stmt, While):
        yield from iter_stmts(stmt.body)


def has_ifdef(stmt: Stmt) -> bool:
    return any(isinstance(s, IfDef) for s in iter_stmts(stmt))
