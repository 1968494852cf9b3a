"""Interval (box) domain: one integer range per variable."""

from __future__ import annotations

from typing import Sequence

from ..errors import NotRepresentable
from ..frontend import ast as A
from . import intervals as I
from .base import NumElement, bound_constraints
from .linear import LinConstraint, LinForm, form_range

INF = I.INF


class Box(NumElement):
    kind = "interval"
    __slots__ = ("universe", "itvs")

    def __init__(self, universe: Sequence[str], itvs: tuple | None):
        self.universe = tuple(universe)
        if itvs is not None and any(iv is None for iv in itvs):
            itvs = None
        self.itvs = None if itvs is None else tuple(itvs)

    @classmethod
    def top(cls, universe):
        return cls(universe, tuple((-INF, INF) for _ in universe))

    @classmethod
    def bottom(cls, universe):
        return cls(universe, None)

    @property
    def is_bottom(self) -> bool:
        return self.itvs is None

    def bounds(self):
        return list(self.itvs)

    def key(self):
        return self.itvs

    def to_constraints(self):
        if self.is_bottom:
            return [LinConstraint.bottom(len(self.universe))]
        out = []
        for i, rng in enumerate(self.itvs):
            out += bound_constraints(self.universe, i, rng)
        return out

    def contains(self, point):
        return not self.is_bottom and all(lo <= v <= hi for v, (lo, hi) in zip(point, self.itvs))

    # -- lattice ------------------------------------------------------------------

    def leq(self, other):
        self.check_universe(other)
        if self.is_bottom:
            return True
        if other.is_bottom:
            return False
        return all(b[0] <= a[0] and a[1] <= b[1] for a, b in zip(self.itvs, other.itvs))

    def join(self, other):
        self.check_universe(other)
        if self.is_bottom:
            return other
        if other.is_bottom:
            return self
        return Box(self.universe, tuple(I.join(a, b) for a, b in zip(self.itvs, other.itvs)))

    def meet(self, other):
        self.check_universe(other)
        if self.is_bottom or other.is_bottom:
            return Box.bottom(self.universe)
        return Box(self.universe, tuple(I.meet(a, b) for a, b in zip(self.itvs, other.itvs)))

    def widen(self, other):
        self.check_universe(other)
        if self.is_bottom:
            return other
        if other.is_bottom:
            return self
        out = []
        for (alo, ahi), (blo, bhi) in zip(self.itvs, other.itvs):
            out.append((alo if blo >= alo else -INF, ahi if bhi <= ahi else INF))
        return Box(self.universe, tuple(out))

    def narrow(self, other):
        self.check_universe(other)
        if self.is_bottom or other.is_bottom:
            return Box.bottom(self.universe)
        out = []
        for (alo, ahi), (blo, bhi) in zip(self.itvs, other.itvs):
            out.append(I.make(blo if alo == -INF else alo, bhi if ahi == INF else ahi))
        return Box(self.universe, tuple(out))

    # -- transfer functions -----------------------------------------------------------

    def forget(self, var):
        if self.is_bottom:
            return self
        itvs = list(self.itvs)
        itvs[self.index(var)] = (-INF, INF)
        return Box(self.universe, tuple(itvs))

    def _set(self, i: int, rng) -> "Box":
        itvs = list(self.itvs)
        itvs[i] = rng
        return Box(self.universe, tuple(itvs))

    def assign(self, var, expr: A.Expr):
        if self.is_bottom:
            return self
        return self._set(self.index(var), I.eval_expr(expr, dict(zip(self.universe, self.itvs))))

    def assign_form(self, index: int, form: LinForm):
        return self._set(index, form_range(form, self.itvs))

    def filter_atom(self, op, left, right):
        refined = I.hc4_revise(op, left, right, dict(zip(self.universe, self.itvs)))
        if refined is None:
            return Box.bottom(self.universe)
        itvs = list(self.itvs)
        for name, rng in refined.items():
            itvs[self.universe.index(name)] = rng
        return Box(self.universe, tuple(itvs))

    def add_constraints(self, cs, strict=False):
        itvs = None if self.is_bottom else list(self.itvs)
        for c in cs:
            if itvs is None:
                break
            support = c.support()
            if strict and len(support) > 1:
                raise NotRepresentable(f"{c.render(self.universe)} is not an interval constraint")
            if not support:
                if c.const < 0:
                    itvs = None
                continue
            itvs = _propagate(c, itvs)
        return Box(self.universe, None if itvs is None else tuple(itvs))

    def entails(self, c):
        if self.is_bottom:
            return True
        rng = form_range(LinForm(c.coeffs, c.const, c.const), self.itvs)
        return rng[0] >= 0


def _propagate(c: LinConstraint, itvs: list) -> list | None:
    """Bound each variable of ``c`` using the ranges of the others."""
    terms = {i: I.mul((c.coeffs[i], c.coeffs[i]), itvs[i]) for i in c.support()}
    if c.const + sum(t[1] for t in terms.values()) < 0:
        return None
    out = list(itvs)
    for i, a in ((i, c.coeffs[i]) for i in c.support()):
        # a*x_i >= -(const + the other terms), and the others are at most rest_hi
        rest_hi = c.const + sum(t[1] for j, t in terms.items() if j != i)
        if rest_hi == INF:
            continue
        if a > 0:
            out[i] = I.meet(out[i], (I.ceil_bound(_frac(-rest_hi, a)), INF))
        else:
            out[i] = I.meet(out[i], (-INF, I.floor_bound(_frac(rest_hi, -a))))
        if out[i] is None:
            return None
    return out


def _frac(p, q):
    from fractions import Fraction

    return Fraction(p) / Fraction(q)
