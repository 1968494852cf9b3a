"""Interface shared by the interval, octagon and polyhedra domains.

Elements are immutable.  Subclasses implement the lattice operations, the
affine core of assignment (:meth:`NumElement.assign_form`) and the meet
with linear constraints (:meth:`NumElement.add_constraints`); test and
assignment statements are reduced to those here.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Sequence

from ..errors import CapExceeded, UniverseMismatch
from ..frontend import ast as A
from . import intervals as I
from .linear import LinConstraint, LinForm, atom_constraints, constraint_range, linearize, render_constraints

POINT_CAP = 1_000_000


class NumElement:
    kind = "abstract"
    universe: tuple[str, ...]

    # -- construction (overridden) ---------------------------------------------

    @classmethod
    def top(cls, universe: Sequence[str]) -> "NumElement":
        raise NotImplementedError

    @classmethod
    def bottom(cls, universe: Sequence[str]) -> "NumElement":
        raise NotImplementedError

    @classmethod
    def from_constraints(cls, universe: Sequence[str], cs: Iterable[LinConstraint],
                         strict: bool = False) -> "NumElement":
        return cls.top(universe).add_constraints(list(cs), strict=strict)

    @classmethod
    def from_box(cls, universe: Sequence[str], box: Sequence[I.Interval]) -> "NumElement":
        return cls.from_constraints(universe, box_constraints(box))

    # -- queries (overridden) ----------------------------------------------------

    @property
    def is_bottom(self) -> bool:
        raise NotImplementedError

    def bounds(self) -> list[I.Interval]:
        """Per-variable integer range; only meaningful when not bottom."""
        raise NotImplementedError

    def key(self):
        """Hashable canonical form; equal keys mean identical behaviour."""
        raise NotImplementedError

    def to_constraints(self) -> list[LinConstraint]:
        raise NotImplementedError

    def entails(self, c: LinConstraint) -> bool:
        """Sound check that every point of the element satisfies ``c``."""
        if self.is_bottom:
            return True
        rng = constraint_range(c, self.bounds())
        return rng is None or rng[0] >= 0

    # -- lattice (overridden) ------------------------------------------------------

    def leq(self, other: "NumElement") -> bool:
        raise NotImplementedError

    def join(self, other: "NumElement") -> "NumElement":
        raise NotImplementedError

    def meet(self, other: "NumElement") -> "NumElement":
        raise NotImplementedError

    def widen(self, other: "NumElement") -> "NumElement":
        raise NotImplementedError

    def narrow(self, other: "NumElement") -> "NumElement":
        raise NotImplementedError

    def forget(self, var: str) -> "NumElement":
        raise NotImplementedError

    def assign_form(self, index: int, form: LinForm) -> "NumElement":
        raise NotImplementedError

    def add_constraints(self, cs: list[LinConstraint], strict: bool = False) -> "NumElement":
        raise NotImplementedError

    # -- shared behaviour ----------------------------------------------------------

    @property
    def is_top(self) -> bool:
        return not self.is_bottom and not self.to_constraints()

    def check_universe(self, other: "NumElement") -> None:
        if type(self) is not type(other) or self.universe != other.universe:
            raise UniverseMismatch(f"{self.kind}{list(self.universe)} vs {other.kind}{list(other.universe)}")

    def equivalent(self, other: "NumElement") -> bool:
        return self.leq(other) and other.leq(self)

    def __eq__(self, other) -> bool:
        return isinstance(other, NumElement) and type(self) is type(other) \
            and self.universe == other.universe and self.key() == other.key()

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.universe, self.key()))

    def index(self, var: str) -> int:
        try:
            return self.universe.index(var)
        except ValueError:
            raise UniverseMismatch(f"{var} is not in {list(self.universe)}") from None

    def assign(self, var: str, expr: A.Expr) -> "NumElement":
        if self.is_bottom:
            return self
        form = linearize(expr, self.universe, self.bounds)
        if form.lo == -I.INF and form.hi == I.INF and form.is_constant:
            return self.forget(var)
        return self.assign_form(self.index(var), form)

    def filter(self, cond: A.BExpr) -> "NumElement":
        """Restrict to the states satisfying ``cond`` (sound over-approximation)."""
        return self._filter(A.nnf(cond))

    def _filter(self, b: A.BExpr) -> "NumElement":
        if self.is_bottom:
            return self
        if isinstance(b, A.BoolConst):
            return self if b.value else self.bottom(self.universe)
        if isinstance(b, A.And):
            return self._filter(b.left)._filter(b.right)
        if isinstance(b, A.Or):
            return self._filter(b.left).join(self._filter(b.right))
        if b.op == "!=":
            return self.filter_atom("<", b.left, b.right).join(self.filter_atom(">", b.left, b.right))
        return self.filter_atom(b.op, b.left, b.right)

    def filter_atom(self, op: str, left: A.Expr, right: A.Expr) -> "NumElement":
        lf = linearize(left, self.universe, self.bounds)
        rf = linearize(right, self.universe, self.bounds)
        out = self.add_constraints(atom_constraints(op, lf, rf))
        if out.is_bottom or (lf.exact and rf.exact):
            return out
        # non-affine test: refine the variable ranges by constraint propagation
        env = dict(zip(self.universe, out.bounds()))
        refined = I.hc4_revise(op, left, right, env)
        if refined is None:
            return self.bottom(self.universe)
        cs = []
        for name, rng in refined.items():
            if rng != env[name]:
                cs += bound_constraints(self.universe, self.index(name), rng)
        return out.add_constraints(cs) if cs else out

    def concrete_points(self, bounds: Sequence[tuple[int, int]]) -> set[tuple[int, ...]]:
        """Integer points of ``bounds`` that lie in the concretization."""
        if self.is_bottom:
            return set()
        total = math.prod(hi - lo + 1 for lo, hi in bounds)
        if total > POINT_CAP:
            raise CapExceeded(total, POINT_CAP, "points")
        return {p for p in itertools.product(*(range(lo, hi + 1) for lo, hi in bounds)) if self.contains(p)}

    def contains(self, point: Sequence[int]) -> bool:
        return not self.is_bottom and all(c.holds(point) for c in self.to_constraints())

    def render(self) -> list[str] | str:
        if self.is_bottom:
            return "bottom"
        cs = self.to_constraints()
        if not cs:
            return "top"
        return render_constraints(cs, self.universe)

    def __repr__(self) -> str:
        r = self.render()
        body = r if isinstance(r, str) else " && ".join(r)
        return f"{type(self).__name__}({body})"


def bound_constraints(universe: Sequence[str], i: int, rng: I.Interval) -> list[LinConstraint]:
    n = len(universe)
    if rng is None:
        return [LinConstraint.bottom(n)]
    out = []
    lo, hi = rng
    if lo != -I.INF:
        coeffs = [0] * n
        coeffs[i] = 1
        out.append(LinConstraint(tuple(coeffs), -int(lo)))
    if hi != I.INF:
        coeffs = [0] * n
        coeffs[i] = -1
        out.append(LinConstraint(tuple(coeffs), int(hi)))
    return out


def box_constraints(box: Sequence[I.Interval]) -> list[LinConstraint]:
    names = [str(i) for i in range(len(box))]
    out: list[LinConstraint] = []
    for i, rng in enumerate(box):
        out += bound_constraints(names, i, rng)
    return out
