"""Octagon domain on a difference-bound matrix (DBM).

Variable ``x_k`` gets two matrix indices, ``2k`` for ``+x_k`` and ``2k+1``
for ``-x_k``.  Entry ``m[i][j]`` bounds ``V_j - V_i``.  Every element keeps
the matrix it was built from (``raw``) next to its tight closure; widening
reads the raw matrix of its left operand so that closure cannot undo
the extrapolation.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence

from ..errors import NotRepresentable
from . import intervals as I
from .base import NumElement
from .box import _propagate
from .linear import LinConstraint, LinForm, form_range

INF = I.INF
Matrix = tuple  # tuple of tuples


def _empty_matrix(n: int) -> list[list]:
    size = 2 * n
    return [[0 if i == j else INF for j in range(size)] for i in range(size)]


def _floor_half(v):
    return v if v == INF else v // 2


def close(m: Sequence[Sequence]) -> Matrix | None:
    """Integer tight closure; None when the constraints are inconsistent."""
    size = len(m)
    m = [list(row) for row in m]
    for k in range(size):
        mk = m[k]
        for i in range(size):
            mik = m[i][k]
            if mik == INF:
                continue
            mi = m[i]
            for j in range(size):
                v = mik + mk[j]
                if v < mi[j]:
                    mi[j] = v
    for i in range(size):
        if m[i][i] < 0:
            return None
        m[i][i] = 0
    for i in range(size):
        bar = i ^ 1
        if m[i][bar] != INF:
            m[i][bar] = 2 * (m[i][bar] // 2)
    for i in range(size):
        if m[i][i ^ 1] + m[i ^ 1][i] < 0:
            return None
    half = [_floor_half(m[i][i ^ 1]) for i in range(size)]
    for i in range(size):
        hi = half[i]
        if hi == INF:
            continue
        mi = m[i]
        for j in range(size):
            hj = half[j ^ 1]
            if hj != INF and hi + hj < mi[j]:
                mi[j] = hi + hj
    return tuple(tuple(row) for row in m)


def _add_diff(m: list[list], p: int, q: int, c) -> None:
    """Record ``V_p - V_q <= c`` (and its coherent twin)."""
    if c < m[q][p]:
        m[q][p] = c
    if c < m[p ^ 1][q ^ 1]:
        m[p ^ 1][q ^ 1] = c


def _octagonal(c: LinConstraint) -> bool:
    support = c.support()
    if len(support) == 1:
        return True
    return len(support) == 2 and abs(c.coeffs[support[0]]) == abs(c.coeffs[support[1]])


def _add_octagonal(m: list[list], c: LinConstraint) -> None:
    support = c.support()
    if len(support) == 1:
        (i,) = support
        a = c.coeffs[i]
        if a > 0:  # x_i >= ceil(-b/a)
            lo = -((c.const) // a)
            _add_diff(m, 2 * i + 1, 2 * i, -2 * lo)
        else:  # x_i <= floor(b/-a)
            hi = c.const // (-a)
            _add_diff(m, 2 * i, 2 * i + 1, 2 * hi)
        return
    i, j = support
    a = abs(c.coeffs[i])
    si, sj = c.coeffs[i] // a, c.coeffs[j] // a
    bound = c.const // a  # -si*x_i - sj*x_j <= bound
    p = 2 * i if si < 0 else 2 * i + 1  # V_p = -si * x_i
    r = 2 * j if sj < 0 else 2 * j + 1  # V_r = -sj * x_j
    _add_diff(m, p, r ^ 1, bound)


class Oct(NumElement):
    kind = "octagon"
    __slots__ = ("universe", "raw", "closed")

    def __init__(self, universe: Sequence[str], raw: Matrix | None, closed: Matrix | None = None,
                 is_closed: bool = False):
        self.universe = tuple(universe)
        if raw is None:
            self.raw = self.closed = None
            return
        raw = tuple(tuple(row) for row in raw)
        closed = raw if is_closed else (closed if closed is not None else close(raw))
        if closed is None:
            self.raw = self.closed = None
        else:
            self.raw, self.closed = (closed if is_closed else raw), closed

    @classmethod
    def top(cls, universe):
        m = _empty_matrix(len(universe))
        return cls(universe, m, is_closed=True)

    @classmethod
    def bottom(cls, universe):
        return cls(universe, None)

    @classmethod
    def _closed(cls, universe, m) -> "Oct":
        closed = close(m)
        return cls(universe, closed, is_closed=True) if closed is not None else cls(universe, None)

    @property
    def is_bottom(self):
        return self.closed is None

    def key(self):
        return None if self.closed is None else (self.closed, self.raw)

    def bounds(self):
        m = self.closed
        out = []
        for k in range(len(self.universe)):
            lo = m[2 * k][2 * k + 1]
            hi = m[2 * k + 1][2 * k]
            out.append((-INF if lo == INF else -(lo // 2), INF if hi == INF else hi // 2))
        return out

    def contains(self, point):
        if self.is_bottom:
            return False
        vals = []
        for v in point:
            vals += [v, -v]
        m = self.closed
        return all(vals[j] - vals[i] <= m[i][j] for i in range(len(vals)) for j in range(len(vals)))

    # -- constraints --------------------------------------------------------------

    def _all_constraints(self) -> list[LinConstraint]:
        m, n = self.closed, len(self.universe)
        out = []
        for k in range(n):
            unit = [0] * n
            unit[k] = 1
            if m[2 * k][2 * k + 1] != INF:
                out.append(LinConstraint(tuple(unit), m[2 * k][2 * k + 1] // 2))
            if m[2 * k + 1][2 * k] != INF:
                out.append(LinConstraint(tuple(-u for u in unit), m[2 * k + 1][2 * k] // 2))
        for i, j in itertools.combinations(range(n), 2):
            # (V_p - V_q <= bound) for the four sign patterns of x_i, x_j
            for p, q in ((2 * i, 2 * j), (2 * j, 2 * i), (2 * i, 2 * j + 1), (2 * i + 1, 2 * j)):
                bound = m[q][p]
                if bound == INF:
                    continue
                coeffs = [0] * n
                coeffs[p // 2] -= 1 if p % 2 == 0 else -1
                coeffs[q // 2] += 1 if q % 2 == 0 else -1
                out.append(LinConstraint.make(coeffs, bound))
        return out

    def to_constraints(self):
        if self.is_bottom:
            return [LinConstraint.bottom(len(self.universe))]
        cs = self._all_constraints()
        box = self.bounds()
        # quick filter: pair constraints implied by the variable bounds
        unary = [c for c in cs if len(c.support()) == 1]
        pairs = [c for c in cs if len(c.support()) == 2 and form_range(LinForm(c.coeffs, c.const, c.const), box)[0] < 0]
        if len(self.universe) <= 6 and pairs:
            kept = list(pairs)
            for c in pairs:
                rest = [d for d in kept if d != c]
                if Oct.top(self.universe).add_constraints(unary + rest).entails(c):
                    kept = rest
            pairs = kept
        return unary + pairs

    def entails(self, c):
        if self.is_bottom:
            return True
        if not c.support():
            return c.const >= 0
        if _octagonal(c):
            probe = _empty_matrix(len(self.universe))
            _add_octagonal(probe, c)
            # the constraint is entailed iff our bound on its expression is at least as tight
            return all(self.closed[i][j] <= probe[i][j] for i in range(len(probe)) for j in range(len(probe))
                       if probe[i][j] != INF and i != j)
        return super().entails(c)

    def add_constraints(self, cs, strict=False):
        if self.is_bottom:
            return self
        m = [list(row) for row in self.closed]
        others = []
        for c in cs:
            if not c.support():
                if c.const < 0:
                    return Oct.bottom(self.universe)
                continue
            if _octagonal(c):
                _add_octagonal(m, c)
            elif strict:
                raise NotRepresentable(f"{c.render(self.universe)} is not an octagonal constraint")
            else:
                others.append(c)
        out = Oct._closed(self.universe, m)
        if others and not out.is_bottom:
            out = out._add_derived(others)
        return out

    def _add_derived(self, cs: list[LinConstraint]) -> "Oct":
        """Octagonal consequences of general linear constraints."""
        box = self.bounds()
        m = [list(row) for row in self.closed]
        for c in cs:
            box2 = _propagate(c, box)
            if box2 is None:
                return Oct.bottom(self.universe)
            for k, (lo, hi) in enumerate(box2):
                if lo != -INF:
                    _add_diff(m, 2 * k + 1, 2 * k, -2 * lo)
                if hi != INF:
                    _add_diff(m, 2 * k, 2 * k + 1, 2 * hi)
            units = [k for k in c.support() if abs(c.coeffs[k]) == 1]
            for i, j in itertools.combinations(units, 2):
                rest = LinForm(tuple(0 if k in (i, j) else a for k, a in enumerate(c.coeffs)), c.const, c.const)
                rest_hi = form_range(rest, box)[1]
                if rest_hi == INF:
                    continue
                coeffs = [0] * len(c.coeffs)
                coeffs[i], coeffs[j] = c.coeffs[i], c.coeffs[j]
                _add_octagonal(m, LinConstraint.tight(coeffs, rest_hi))
        return Oct._closed(self.universe, m)

    # -- lattice ----------------------------------------------------------------

    def leq(self, other):
        self.check_universe(other)
        if self.is_bottom:
            return True
        if other.is_bottom:
            return False
        a, b = self.closed, other.closed
        return all(x <= y for ra, rb in zip(a, b) for x, y in zip(ra, rb))

    def join(self, other):
        self.check_universe(other)
        if self.is_bottom:
            return other
        if other.is_bottom:
            return self
        m = tuple(tuple(max(x, y) for x, y in zip(ra, rb)) for ra, rb in zip(self.closed, other.closed))
        return Oct(self.universe, m, is_closed=True)

    def meet(self, other):
        self.check_universe(other)
        if self.is_bottom or other.is_bottom:
            return Oct.bottom(self.universe)
        m = [[min(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(self.closed, other.closed)]
        return Oct._closed(self.universe, m)

    def widen(self, other):
        self.check_universe(other)
        if self.is_bottom:
            return other
        if other.is_bottom:
            return self
        m = tuple(tuple(x if y <= x else INF for x, y in zip(ra, rb)) for ra, rb in zip(self.raw, other.closed))
        return Oct(self.universe, m)

    def narrow(self, other):
        self.check_universe(other)
        if self.is_bottom or other.is_bottom:
            return Oct.bottom(self.universe)
        m = [[y if x == INF else x for x, y in zip(ra, rb)] for ra, rb in zip(self.closed, other.closed)]
        return Oct._closed(self.universe, m)

    # -- transfer functions --------------------------------------------------------

    def _forgotten(self, k: int) -> list[list]:
        m = [list(row) for row in self.closed]
        for idx in (2 * k, 2 * k + 1):
            for j in range(len(m)):
                if j != idx:
                    m[idx][j] = INF
                    m[j][idx] = INF
        return m

    def forget(self, var):
        if self.is_bottom:
            return self
        return Oct(self.universe, self._forgotten(self.index(var)), is_closed=True)

    def assign_form(self, k: int, form: LinForm):
        coeffs = form.coeffs
        support = [j for j, a in enumerate(coeffs) if a]
        lo, hi = form.lo, form.hi
        if support == [k] and coeffs[k] == 1:
            return self._shift(k, lo, hi)
        m = self._forgotten(k)
        if not support:
            if lo != -INF:
                _add_diff(m, 2 * k + 1, 2 * k, -2 * lo)
            if hi != INF:
                _add_diff(m, 2 * k, 2 * k + 1, 2 * hi)
            return Oct._closed(self.universe, m)
        if len(support) == 1 and abs(coeffs[support[0]]) == 1 and support[0] != k:
            j, s = support[0], coeffs[support[0]]
            # x_k - s*x_j lies in [lo, hi]
            pj = 2 * j if s > 0 else 2 * j + 1
            if hi != INF:
                _add_diff(m, 2 * k, pj, hi)
            if lo != -INF:
                _add_diff(m, pj, 2 * k, -lo)
            return Oct._closed(self.universe, m)
        box = self.bounds()
        rng = form_range(form, box)
        if rng[0] != -INF:
            _add_diff(m, 2 * k + 1, 2 * k, -2 * rng[0])
        if rng[1] != INF:
            _add_diff(m, 2 * k, 2 * k + 1, 2 * rng[1])
        for j in range(len(self.universe)):
            if j == k:
                continue
            for s in (1, -1):
                shifted = list(coeffs)
                shifted[j] -= s
                r = form_range(LinForm(tuple(shifted), lo, hi), box)  # range of e - s*x_j
                pj = 2 * j if s > 0 else 2 * j + 1
                if r[1] != INF:
                    _add_diff(m, 2 * k, pj, r[1])
                if r[0] != -INF:
                    _add_diff(m, pj, 2 * k, -r[0])
        return Oct._closed(self.universe, m)

    def _shift(self, k: int, lo, hi) -> "Oct":
        """x_k := x_k + d with d in [lo, hi]."""
        up = {2 * k: hi, 2 * k + 1: -lo}
        down = {2 * k: lo, 2 * k + 1: -hi}
        m = [list(row) for row in self.closed]
        size = len(m)
        for i in range(size):
            for j in range(size):
                if i == j or m[i][j] == INF:
                    continue
                delta = up.get(j, 0) - down.get(i, 0)
                m[i][j] = m[i][j] + delta
        return Oct._closed(self.universe, m)


def _frac(p, q):
    return Fraction(p) / Fraction(q)
