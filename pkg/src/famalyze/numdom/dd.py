"""Double description conversion (Chernikova's algorithm) on integer vectors.

Given a cone ``{y : e.y = 0 for e in eqs, c.y >= 0 for c in ineqs}`` the
conversion returns a minimal set of lines and extreme rays generating it.
By duality the same routine turns generators back into a minimal
constraint system: lines play the role of equalities, rays that of
inequalities.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .linear import gcd_all

Vector = tuple[int, ...]


def dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def normalize(v: Sequence[int]) -> Vector:
    g = gcd_all(abs(x) for x in v)
    if g <= 1:
        return tuple(v)
    return tuple(x // g for x in v)


def normalize_line(v: Sequence[int]) -> Vector:
    """Lines have no orientation: make the first nonzero entry positive."""
    v = normalize(v)
    for x in v:
        if x:
            return v if x > 0 else tuple(-y for y in v)
    return v


def chernikova(dim: int, eqs: Sequence[Vector], ineqs: Sequence[Vector]) -> tuple[list[Vector], list[Vector]]:
    lines, rays = _chernikova(dim, tuple(map(tuple, eqs)), tuple(map(tuple, ineqs)))
    return list(lines), list(rays)


# conversions repeat heavily during fixpoint iteration
@lru_cache(maxsize=65536)
def _chernikova(dim: int, eqs: tuple[Vector, ...], ineqs: tuple[Vector, ...]) -> tuple[tuple, tuple]:
    lines: list[Vector] = [tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)]
    rays: list[Vector] = []
    sats: list[int] = []  # bitmask of processed inequalities each ray saturates
    processed = 0  # bitmask of all processed inequalities

    constraints = [(tuple(e), True) for e in eqs] + [(tuple(c), False) for c in ineqs]
    for idx, (c, is_eq) in enumerate(constraints):
        bit = 0 if is_eq else 1 << idx
        pivot = next((k for k, l in enumerate(lines) if dot(c, l) != 0), None)
        if pivot is not None:
            l = lines.pop(pivot)
            cl = dot(c, l)
            if cl < 0:
                l, cl = tuple(-x for x in l), -cl
            lines = [normalize_line(tuple(cl * x - dot(c, m) * y for x, y in zip(m, l))) for m in lines]
            new_rays, new_sats = [], []
            for r, s in zip(rays, sats):
                cr = dot(c, r)
                new_rays.append(normalize(tuple(cl * x - cr * y for x, y in zip(r, l))))
                new_sats.append(s | bit)
            if not is_eq:
                new_rays.append(normalize(l))
                new_sats.append(processed)
            rays, sats = new_rays, new_sats
            processed |= bit
            continue

        values = [dot(c, r) for r in rays]
        pos = [k for k, v in enumerate(values) if v > 0]
        neg = [k for k, v in enumerate(values) if v < 0]
        zero = [k for k, v in enumerate(values) if v == 0]
        new_rays = [rays[k] for k in zero]
        new_sats = [sats[k] | bit for k in zero]
        if not is_eq:
            new_rays += [rays[k] for k in pos]
            new_sats += [sats[k] for k in pos]
        for p in pos:
            for q in neg:
                common = sats[p] & sats[q]
                if not _adjacent(common, p, q, sats):
                    continue
                vp, vq = values[p], -values[q]
                combo = tuple(vp * y + vq * x for x, y in zip(rays[p], rays[q]))
                new_rays.append(normalize(combo))
                new_sats.append(common | bit)
        rays, sats = new_rays, new_sats
        processed |= bit
    return tuple(lines), tuple(rays)


def _adjacent(common: int, p: int, q: int, sats: Sequence[int]) -> bool:
    for k, s in enumerate(sats):
        if k != p and k != q and common & ~s == 0:
            return False
    return True


def rref(rows: Sequence[Vector], skip: int = 0) -> tuple[list[Vector], list[int]]:
    """Integer reduced row echelon form, pivoting on columns >= ``skip``.

    Rows are scaled to coprime integers with a positive pivot.
    """
    mat = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    row = 0
    width = len(rows[0]) if rows else 0
    for col in range(skip, width):
        sel = next((i for i in range(row, len(mat)) if mat[i][col] != 0), None)
        if sel is None:
            continue
        mat[row], mat[sel] = mat[sel], mat[row]
        pv = mat[row][col]
        mat[row] = [x / pv for x in mat[row]]
        for i in range(len(mat)):
            if i != row and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[row])]
        pivots.append(col)
        row += 1
    out = []
    for r in mat[:row]:
        denom = 1
        for x in r:
            denom = denom * x.denominator // gcd_all([denom, x.denominator])
        out.append(normalize(tuple(int(x * denom) for x in r)))
    # rows that vanish on the pivot columns (only possible with skip > 0)
    for r in mat[row:]:
        if any(r):
            denom = 1
            for x in r:
                denom = denom * x.denominator // gcd_all([denom, x.denominator])
            out.append(normalize(tuple(int(x * denom) for x in r)))
    return out, pivots
