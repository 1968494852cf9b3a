"""Integer interval arithmetic with infinite bounds, and HC4-revise.

An interval is a pair ``(lo, hi)`` of ints or ``±math.inf``; ``None`` is the
empty interval.  Everything here is over the integers, so results of
division are rounded inward.
"""

from __future__ import annotations

import math
from typing import Mapping, Optional

from ..frontend import ast as A

INF = math.inf
Interval = Optional[tuple]
TOP = (-INF, INF)


def _mul_bound(a, b):
    if a == 0 or b == 0:
        return 0
    return a * b


def make(lo, hi) -> Interval:
    return None if lo > hi else (lo, hi)


def add(a: Interval, b: Interval) -> Interval:
    if a is None or b is None:
        return None
    return (a[0] + b[0], a[1] + b[1])


def neg(a: Interval) -> Interval:
    return None if a is None else (-a[1], -a[0])


def sub(a: Interval, b: Interval) -> Interval:
    return add(a, neg(b))


def mul(a: Interval, b: Interval) -> Interval:
    if a is None or b is None:
        return None
    products = [_mul_bound(x, y) for x in a for y in b]
    return (min(products), max(products))


def meet(a: Interval, b: Interval) -> Interval:
    if a is None or b is None:
        return None
    return make(max(a[0], b[0]), min(a[1], b[1]))


def join(a: Interval, b: Interval) -> Interval:
    if a is None:
        return b
    if b is None:
        return a
    return (min(a[0], b[0]), max(a[1], b[1]))


def contains(a: Interval, v) -> bool:
    return a is not None and a[0] <= v <= a[1]


def ceil_bound(x):
    return x if x in (INF, -INF) else math.ceil(x)


def floor_bound(x):
    return x if x in (INF, -INF) else math.floor(x)


def _quot(t, b):
    """Real quotient of two bounds, b != 0, with the conventions of extended reals."""
    if t in (INF, -INF):
        if b in (INF, -INF):
            return 0
        return t if b > 0 else -t
    if b in (INF, -INF):
        return 0
    from fractions import Fraction

    return Fraction(t) / Fraction(b)


def _div_nonzero(t: Interval, b: Interval) -> Interval:
    """Hull of {x : x*y in t for some y in b}, b not containing 0."""
    qs = [_quot(x, y) for x in t for y in b]
    lo, hi = min(qs), max(qs)
    # t unbounded on a side that b can scale arbitrarily keeps the hull open
    if b[0] in (INF, -INF) or b[1] in (INF, -INF):
        if 0 >= t[0] and 0 <= t[1]:
            lo, hi = min(lo, 0), max(hi, 0)
    return make(ceil_bound(lo), floor_bound(hi))


def div(t: Interval, b: Interval) -> Interval:
    """Integer solutions x of x*y in t with y ranging over b (hull, rounded inward)."""
    if t is None or b is None:
        return None
    if contains(b, 0):
        if contains(t, 0):
            return TOP
        parts = [p for p in (make(b[0], -1), make(1, b[1])) if p is not None]
        out = None
        for p in parts:
            out = join(out, _div_nonzero(t, p))
        return out
    return _div_nonzero(t, b)


# -- expression evaluation --------------------------------------------------

def eval_expr(e: A.Expr, env: Mapping[str, Interval]) -> Interval:
    if isinstance(e, A.Num):
        return (e.value, e.value)
    if isinstance(e, A.Rand):
        return (e.lo, e.hi)
    if isinstance(e, A.Var):
        return env[e.name]
    if isinstance(e, A.Neg):
        return neg(eval_expr(e.operand, env))
    l, r = eval_expr(e.left, env), eval_expr(e.right, env)
    if e.op == "+":
        return add(l, r)
    if e.op == "-":
        return sub(l, r)
    return mul(l, r)


# target range of (right - left) for each comparison "left op right"
CMP_TARGET = {
    "<=": (0, INF),
    "<": (1, INF),
    ">=": (-INF, 0),
    ">": (-INF, -1),
    "==": (0, 0),
}


def hc4_revise(op: str, left: A.Expr, right: A.Expr, env: Mapping[str, Interval]) -> dict | None:
    """One forward and one backward pass over ``left op right``.

    Returns the refined variable ranges (only for mentioned variables), or
    None when the test is unsatisfiable within ``env``.
    """
    diff = A.BinOp("-", right, left)
    values: dict[int, Interval] = {}

    def forward(e: A.Expr) -> Interval:
        if isinstance(e, A.BinOp):
            forward(e.left)
            forward(e.right)
        elif isinstance(e, A.Neg):
            forward(e.operand)
        v = eval_expr(e, env) if not isinstance(e, (A.BinOp, A.Neg)) else _combine(e, values)
        values[id(e)] = v
        return v

    forward(diff)
    refined: dict[str, Interval] = {}

    def backward(e: A.Expr, target: Interval) -> bool:
        cur = meet(values[id(e)], target)
        if cur is None:
            return False
        if isinstance(e, A.Var):
            prev = refined.get(e.name, env[e.name])
            refined[e.name] = meet(prev, cur)
            return refined[e.name] is not None
        if isinstance(e, (A.Num, A.Rand)):
            return True
        if isinstance(e, A.Neg):
            return backward(e.operand, neg(cur))
        lv, rv = values[id(e.left)], values[id(e.right)]
        if e.op == "+":
            return backward(e.left, sub(cur, rv)) and backward(e.right, sub(cur, lv))
        if e.op == "-":
            return backward(e.left, add(cur, rv)) and backward(e.right, sub(lv, cur))
        return backward(e.left, div(cur, rv)) and backward(e.right, div(cur, lv))

    if not backward(diff, CMP_TARGET[op]):
        return None
    return refined


def _combine(e: A.Expr, values: dict) -> Interval:
    if isinstance(e, A.Neg):
        return neg(values[id(e.operand)])
    l, r = values[id(e.left)], values[id(e.right)]
    if e.op == "+":
        return add(l, r)
    if e.op == "-":
        return sub(l, r)
    return mul(l, r)
