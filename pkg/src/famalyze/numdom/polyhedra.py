"""Convex polyhedra in double description (constraints and generators).

Vectors are homogeneous: a constraint ``(b, a_1..a_n)`` reads
``b + a.x >= 0`` (or ``= 0``); a generator ``(l, v_1..v_n)`` is the vertex
``v / l`` when ``l > 0`` and a ray otherwise.  Both representations are kept
minimal, and the constraint side is brought to a canonical form so that
equal polyhedra compare equal.
"""

from __future__ import annotations

import warnings
from typing import Sequence

from . import intervals as I
from .base import NumElement
from .dd import Vector, chernikova, dot, normalize, normalize_line, rref
from .linear import LinConstraint, LinForm

INF = I.INF
SOFT_DIMENSION_CAP = 16


def _canonical(dim: int, eqs: Sequence[Vector], ineqs: Sequence[Vector]) -> tuple[tuple, tuple]:
    eq_rows, pivots = rref(list(eqs), skip=1) if eqs else ([], [])
    reduced = set()
    for c in ineqs:
        v = list(c)
        for row, col in zip(eq_rows, pivots):
            if v[col]:
                f, pv = v[col], row[col]
                v = [pv * x - f * y for x, y in zip(v, row)]
        v = normalize(v)
        if not any(v[1:]):
            continue  # constant inequality, trivially true on a non-empty polyhedron
        reduced.add(v)
    return tuple(sorted(eq_rows)), tuple(sorted(reduced))


class Poly(NumElement):
    kind = "polyhedra"
    __slots__ = ("universe", "eqs", "ineqs", "lines", "rays")

    def __init__(self, universe, eqs=None, ineqs=None, lines=None, rays=None):
        # eqs is None marks the empty polyhedron
        self.universe = tuple(universe)
        self.eqs, self.ineqs, self.lines, self.rays = eqs, ineqs, lines, rays

    @property
    def dim(self) -> int:
        return len(self.universe) + 1

    @classmethod
    def top(cls, universe):
        d = len(universe) + 1
        lines = tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(1, d))
        origin = (1,) + (0,) * (d - 1)
        return cls(universe, (), (), lines, (origin,))

    @classmethod
    def bottom(cls, universe):
        return cls(universe)

    @classmethod
    def _from_cons(cls, universe, eqs, ineqs) -> "Poly":
        d = len(universe) + 1
        if d - 1 > SOFT_DIMENSION_CAP:
            warnings.warn(f"polyhedra over {d - 1} variables may be slow", RuntimeWarning, stacklevel=3)
        positivity = (1,) + (0,) * (d - 1)
        lines, rays = chernikova(d, list(eqs), [positivity] + list(ineqs))
        if not any(r[0] > 0 for r in rays):
            return cls.bottom(universe)
        ceqs, cineqs = chernikova(d, lines, rays)
        eqs2, ineqs2 = _canonical(d, ceqs, cineqs)
        return cls(universe, eqs2, ineqs2, tuple(normalize_line(l) for l in lines), tuple(sorted(set(rays))))

    @classmethod
    def _from_gens(cls, universe, lines, rays) -> "Poly":
        d = len(universe) + 1
        lines = [l for l in lines if any(l)]
        rays = [r for r in rays if any(r)]
        if not any(r[0] > 0 for r in rays):
            return cls.bottom(universe)
        ceqs, cineqs = chernikova(d, list(lines), list(rays))
        eqs, ineqs = _canonical(d, ceqs, cineqs)
        positivity = (1,) + (0,) * (d - 1)
        glines, grays = chernikova(d, list(eqs), [positivity] + list(ineqs))
        return cls(universe, eqs, ineqs, tuple(normalize_line(l) for l in glines), tuple(sorted(set(grays))))

    @property
    def is_bottom(self):
        return self.eqs is None

    def key(self):
        return None if self.eqs is None else (self.eqs, self.ineqs)

    # -- queries --------------------------------------------------------------------

    def _sat(self, c: Vector, equality: bool) -> bool:
        """Does every generator satisfy the homogeneous constraint ``c``?"""
        if any(dot(c, l) != 0 for l in self.lines):
            return False
        if equality:
            return all(dot(c, r) == 0 for r in self.rays)
        return all(dot(c, r) >= 0 for r in self.rays)

    def bounds(self):
        out = []
        for k in range(1, self.dim):
            if any(l[k] for l in self.lines):
                out.append((-INF, INF))
                continue
            lo, hi = INF, -INF
            for r in self.rays:
                if r[0] == 0:
                    if r[k] > 0:
                        hi = INF
                    elif r[k] < 0:
                        lo = -INF
                else:
                    lo = min(lo, I.ceil_bound(_ratio(r[k], r[0])))
                    hi = max(hi, I.floor_bound(_ratio(r[k], r[0])))
            out.append((lo, hi))
        return out

    def vertices(self) -> list[tuple]:
        from fractions import Fraction

        return [tuple(Fraction(x, r[0]) for x in r[1:]) for r in self.rays if r[0] > 0]

    def to_constraints(self):
        if self.is_bottom:
            return [LinConstraint.bottom(len(self.universe))]
        out = []
        for e in self.eqs:
            c = LinConstraint(tuple(e[1:]), e[0])
            out += [c, c.opposite()]
        out += [LinConstraint(tuple(c[1:]), c[0]) for c in self.ineqs]
        return out

    def entails(self, c):
        if self.is_bottom:
            return True
        return self._sat((c.const,) + tuple(c.coeffs), False)

    def contains(self, point):
        if self.is_bottom:
            return False
        v = (1,) + tuple(point)
        return all(dot(e, v) == 0 for e in self.eqs) and all(dot(c, v) >= 0 for c in self.ineqs)

    # -- lattice ------------------------------------------------------------------------

    def leq(self, other):
        self.check_universe(other)
        if self.is_bottom:
            return True
        if other.is_bottom:
            return False
        return all(self._sat(e, True) for e in other.eqs) and all(self._sat(c, False) for c in other.ineqs)

    def join(self, other):
        self.check_universe(other)
        if self.is_bottom:
            return other
        if other.is_bottom:
            return self
        return Poly._from_gens(self.universe, self.lines + other.lines, self.rays + other.rays)

    def meet(self, other):
        self.check_universe(other)
        if self.is_bottom or other.is_bottom:
            return Poly.bottom(self.universe)
        return Poly._from_cons(self.universe, self.eqs + other.eqs, self.ineqs + other.ineqs)

    def widen(self, other):
        """Keep the constraints of ``self`` that ``other`` satisfies."""
        self.check_universe(other)
        if self.is_bottom:
            return other
        if other.is_bottom:
            return self
        split = list(self.ineqs)
        for e in self.eqs:
            split += [e, tuple(-x for x in e)]
        kept = [c for c in split if other._sat(c, False)]
        return Poly._from_cons(self.universe, [], kept)

    def narrow(self, other):
        return self.meet(other)

    # -- transfer functions -------------------------------------------------------------

    def forget(self, var):
        if self.is_bottom:
            return self
        k = self.index(var) + 1
        axis = tuple(1 if i == k else 0 for i in range(self.dim))
        return Poly._from_gens(self.universe, self.lines + (axis,), self.rays)

    def assign_form(self, index: int, form: LinForm):
        if self.is_bottom:
            return self
        k = index + 1
        coeffs = (0,) + tuple(form.coeffs)
        axis = tuple(1 if i == k else 0 for i in range(self.dim))
        lo, hi = form.lo, form.hi

        def image(g: Vector, const) -> Vector:
            out = list(g)
            out[k] = dot(coeffs, g) + g[0] * const
            return tuple(out)

        lines = [image(l, 0) for l in self.lines]
        rays = []
        for r in self.rays:
            if r[0] == 0:
                rays.append(image(r, 0))
                continue
            for const in {lo, hi}:
                if const not in (INF, -INF):
                    rays.append(image(r, const))
        if lo == -INF and hi == INF:
            lines.append(axis)
            rays = [image(r, 0) for r in self.rays]
        elif lo == -INF:
            rays.append(tuple(-x for x in axis))
        elif hi == INF:
            rays.append(axis)
        return Poly._from_gens(self.universe, lines, rays)

    def add_constraints(self, cs, strict=False):
        if self.is_bottom:
            return self
        extra = []
        for c in cs:
            if c.is_bottom:
                return Poly.bottom(self.universe)
            if not c.is_trivial:
                extra.append((c.const,) + tuple(c.coeffs))
        if not extra:
            return self
        return Poly._from_cons(self.universe, self.eqs, self.ineqs + tuple(extra))


def _ratio(p: int, q: int):
    from fractions import Fraction

    return Fraction(p, q)
