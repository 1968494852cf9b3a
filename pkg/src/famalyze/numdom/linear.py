"""Integer linear constraints ``a.x + b >= 0`` and interval linearization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Iterable, Sequence

from ..frontend import ast as A
from . import intervals as I


def gcd_all(values: Iterable[int]) -> int:
    return reduce(math.gcd, values, 0)


@dataclass(frozen=True, order=True)
class LinConstraint:
    """``sum(coeffs[i] * v_i) + const >= 0`` over an ordered universe.

    Instances built through :meth:`make` are gcd-normalized. Ordering is
    lexicographic on (coeffs, const).
    """

    coeffs: tuple[int, ...]
    const: int

    @classmethod
    def make(cls, coeffs: Sequence[int], const: int) -> "LinConstraint":
        coeffs = tuple(int(c) for c in coeffs)
        if not any(coeffs):
            return cls(coeffs, 0 if const >= 0 else -1)
        g = gcd_all(coeffs + (const,))
        return cls(tuple(c // g for c in coeffs), const // g)

    @classmethod
    def tight(cls, coeffs: Sequence[int], const: int) -> "LinConstraint":
        """Integer tightening: divide by the gcd of the coefficients, floor the constant."""
        coeffs = tuple(int(c) for c in coeffs)
        if not any(coeffs):
            return cls(coeffs, 0 if const >= 0 else -1)
        g = gcd_all(coeffs)
        return cls(tuple(c // g for c in coeffs), int(const) // g)

    @classmethod
    def bottom(cls, n: int) -> "LinConstraint":
        return cls((0,) * n, -1)

    @property
    def is_bottom(self) -> bool:
        return not any(self.coeffs) and self.const < 0

    @property
    def is_trivial(self) -> bool:
        return not any(self.coeffs) and self.const >= 0

    def negate(self) -> "LinConstraint":
        """Integer complement: not(e >= 0) is -e - 1 >= 0."""
        return LinConstraint(tuple(-c for c in self.coeffs), -self.const - 1)

    def opposite(self) -> "LinConstraint":
        """The reversed inequality -e >= 0 (together with self: e = 0)."""
        return LinConstraint(tuple(-c for c in self.coeffs), -self.const)

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.coeffs) if c)

    def evaluate(self, point: Sequence[int]) -> int:
        return sum(c * v for c, v in zip(self.coeffs, point)) + self.const

    def holds(self, point: Sequence[int]) -> bool:
        return self.evaluate(point) >= 0

    def render(self, names: Sequence[str], rel: str = ">=") -> str:
        return render_form(self.coeffs, self.const, names) + rel + "0"


def render_form(coeffs: Sequence[int], const: int, names: Sequence[str]) -> str:
    parts = []
    for c, name in zip(coeffs, names):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        parts.append(f"{sign}{name}" if mag == 1 else f"{sign}{mag}*{name}")
    if const or not parts:
        parts.append(f"-{-const}" if const < 0 else f"+{const}")
    text = "".join(parts)
    return text[1:] if text.startswith("+") else text


def render_constraints(cs: Sequence[LinConstraint], names: Sequence[str]) -> list[str]:
    """Render a conjunction, folding opposite pairs into equalities."""
    if any(c.is_bottom for c in cs):
        return ["bottom"]
    remaining = list(cs)
    out = []
    while remaining:
        c = remaining.pop(0)
        opp = c.opposite()
        if opp in remaining:
            remaining.remove(opp)
            # print the equality with a positive leading coefficient
            lead = next((x for x in c.coeffs if x), 1)
            eq = c if lead > 0 else opp
            out.append(eq.render(names, "="))
        else:
            out.append(c.render(names))
    return out


# -- linearization ---------------------------------------------------------

@dataclass(frozen=True)
class LinForm:
    """``coeffs . x + c`` where ``c`` ranges over an interval."""

    coeffs: tuple[int, ...]
    lo: float | int
    hi: float | int

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def is_constant(self) -> bool:
        return not any(self.coeffs)

    def scale(self, k: int) -> "LinForm":
        lo, hi = I.mul((self.lo, self.hi), (k, k))
        return LinForm(tuple(k * c for c in self.coeffs), lo, hi)

    def plus(self, other: "LinForm") -> "LinForm":
        return LinForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
                       self.lo + other.lo, self.hi + other.hi)


def linearize(e: A.Expr, universe: Sequence[str],
              bounds: Callable[[], Sequence[I.Interval]]) -> LinForm:
    """Affine form of ``e``; products of two non-constant terms become intervals.

    ``bounds`` is only called when such a product is met.
    """
    index = {name: i for i, name in enumerate(universe)}
    n = len(universe)
    cache: list = []

    def env():
        if not cache:
            cache.append(dict(zip(universe, bounds())))
        return cache[0]

    def go(e: A.Expr) -> LinForm:
        if isinstance(e, A.Num):
            return LinForm((0,) * n, e.value, e.value)
        if isinstance(e, A.Rand):
            return LinForm((0,) * n, e.lo, e.hi)
        if isinstance(e, A.Var):
            coeffs = [0] * n
            coeffs[index[e.name]] = 1
            return LinForm(tuple(coeffs), 0, 0)
        if isinstance(e, A.Neg):
            return go(e.operand).scale(-1)
        l, r = go(e.left), go(e.right)
        if e.op == "+":
            return l.plus(r)
        if e.op == "-":
            return l.plus(r.scale(-1))
        if l.is_constant and l.exact:
            return r.scale(l.lo)
        if r.is_constant and r.exact:
            return l.scale(r.lo)
        rng = I.eval_expr(e, env())
        if rng is None:
            rng = (0, 0)
        return LinForm((0,) * n, rng[0], rng[1])

    return go(e)


def form_range(form: LinForm, bounds: Sequence[I.Interval]) -> I.Interval:
    acc: I.Interval = (form.lo, form.hi)
    for c, b in zip(form.coeffs, bounds):
        if c:
            acc = I.add(acc, I.mul((c, c), b))
    return acc


def constraint_range(c: LinConstraint, bounds: Sequence[I.Interval]) -> I.Interval:
    return form_range(LinForm(c.coeffs, c.const, c.const), bounds)


def atom_constraints(op: str, left: LinForm, right: LinForm) -> list[LinConstraint]:
    """Linear relaxation of ``left op right`` (empty when it says nothing).

    Returns ``[bottom]`` when the relaxation is already unsatisfiable.
    """
    diff = right.plus(left.scale(-1))  # test becomes a condition on right - left
    n = len(diff.coeffs)
    neg = LinForm(tuple(-c for c in diff.coeffs), -diff.hi, -diff.lo)
    if op == "<=":
        forms = [(diff, 0)]
    elif op == "<":
        forms = [(diff, -1)]
    elif op == ">=":
        forms = [(neg, 0)]
    elif op == ">":
        forms = [(neg, -1)]
    elif op == "==":
        forms = [(diff, 0), (neg, 0)]
    else:
        raise ValueError(op)
    out = []
    for form, shift in forms:
        if form.hi == I.INF:
            continue
        c = LinConstraint.tight(form.coeffs, form.hi + shift)
        if c.is_bottom:
            return [LinConstraint.bottom(n)]
        if not c.is_trivial:
            out.append(c)
    return out
