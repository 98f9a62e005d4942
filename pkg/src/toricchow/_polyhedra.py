"""Exact polyhedral primitives shared by the fan and polytope modules.

Cones are given by generator lists; polyhedra by equality/inequality
rows over Q.  Fourier-Motzkin elimination is the only feasibility
engine: dimensions here never exceed ~7, so its blow-up is tolerable.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .lattice import clear_denominators, dot, rank, rational_nullspace, solve

Row = tuple[tuple[Fraction, ...], Fraction, bool]  # coeffs . y >= rhs  (strict if flag)


def cone_facets(gens: Sequence[Sequence[int]], n: int) -> list[tuple[tuple[int, ...], frozenset[int]]]:
    """Facets of cone(gens) inside its linear span.

    Returns ``(normal, on_facet)`` pairs: ``normal`` is a primitive integer
    functional that is >= 0 on every generator, and ``on_facet`` holds the
    indices of the generators where it vanishes.  The normal is only
    meaningful on the span of the cone.  Works for non-pointed cones too;
    a cone equal to its own span has no facets.
    """
    gens = [tuple(g) for g in gens]
    d = rank(gens) if gens else 0
    if d == 0:
        return []
    found: list[tuple[tuple[int, ...], frozenset[int]]] = []
    idx = range(len(gens))
    for subset in combinations(idx, d - 1):
        sset = set(subset)
        if any(sset <= f for _, f in found):
            continue
        sub = [gens[i] for i in subset]
        if rank(sub) != d - 1:
            continue
        u = _functional_nonzero_on(gens, sub, n)
        vals = [dot(u, g) for g in gens]
        if all(v >= 0 for v in vals):
            pass
        elif all(v <= 0 for v in vals):
            u = tuple(-x for x in u)
            vals = [-v for v in vals]
        else:
            continue
        on = frozenset(i for i in idx if vals[i] == 0)
        if on not in (f for _, f in found):
            found.append((u, on))
    return found


def _functional_nonzero_on(gens, sub, n) -> tuple[int, ...]:
    """Integer functional vanishing on ``sub`` but not on span(gens)."""
    for w in rational_nullspace(sub, n) if sub else [
            [Fraction(int(i == j)) for j in range(n)] for i in range(n)]:
        if any(dot(w, g) != 0 for g in gens):
            return clear_denominators(w)
    raise ValueError("generators span nothing")  # pragma: no cover


def in_cone(x: Sequence, gens: Sequence[Sequence[int]], n: int, strict: bool = False,
            facets=None) -> bool:
    """Membership of x in cone(gens) (relative interior if ``strict``)."""
    gens = [tuple(g) for g in gens if any(g)]
    if not gens:
        return not any(x)
    if rank(gens + [tuple(x)]) != rank(gens):
        return False
    if facets is None:
        facets = cone_facets(gens, n)
    if strict:
        return all(dot(u, x) > 0 for u, _ in facets)
    return all(dot(u, x) >= 0 for u, _ in facets)


# -- Fourier-Motzkin ----------------------------------------------------------

def _normalize(row: Row) -> Row:
    a, b, s = row
    lead = next((abs(x) for x in a if x != 0), None)
    if lead is None or lead == 1:
        return row
    return tuple(x / lead for x in a), b / lead, s


def _prune(rows: list[Row]) -> list[Row]:
    best: dict[tuple, tuple[Fraction, bool]] = {}
    for a, b, s in rows:
        cur = best.get(a)
        if cur is None or b > cur[0] or (b == cur[0] and s and not cur[1]):
            best[a] = (b, s)
    return [(a, b, s) for a, (b, s) in best.items()]


def fm_feasible(rows: Sequence[Row], nvars: int) -> bool:
    """Is {y : a.y >= b (or > b when strict) for every row} nonempty?"""
    cur = _prune([_normalize((tuple(Fraction(x) for x in a), Fraction(b), s)) for a, b, s in rows])
    for j in range(nvars):
        pos, neg, keep = [], [], []
        for r in cur:
            c = r[0][j]
            (pos if c > 0 else neg if c < 0 else keep).append(r)
        for ap, bp, sp in pos:
            cp = ap[j]
            for an, bn, sn in neg:
                cn = -an[j]
                a = tuple(x / cp + y / cn for x, y in zip(ap, an))
                b = bp / cp + bn / cn
                if not any(a):
                    if b > 0 or (b == 0 and (sp or sn)):
                        return False
                    continue
                keep.append(_normalize((a, b, sp or sn)))
        cur = _prune(keep)
        for a, b, s in cur:
            if not any(a) and (b > 0 or (b == 0 and s)):
                return False
        cur = [r for r in cur if any(r[0])]
    return True


def classify_polyhedron(eqs: Sequence[tuple[Sequence, object]],
                        ineqs: Sequence[tuple[Sequence, object]],
                        nvars: int) -> tuple[str, list[Fraction] | None]:
    """Classify {y : e.y == f, a.y >= b} as 'empty', 'point' or 'higher'.

    For 'point' the unique element is returned.
    """
    if eqs:
        y0 = solve([list(e) for e, _ in eqs], [f for _, f in eqs])
        if y0 is None:
            return "empty", None
        K = rational_nullspace([list(e) for e, _ in eqs], nvars)
    else:
        y0 = [Fraction(0)] * nvars
        K = rational_nullspace([], nvars)
    k = len(K)
    rows: list[Row] = []
    for a, b in ineqs:
        coeffs = tuple(dot(a, kv) for kv in K)
        rows.append((coeffs, Fraction(b) - dot(a, y0), False))
    if k == 0:
        if all(b <= 0 for _, b, _ in rows):
            return "point", list(y0)
        return "empty", None
    if not fm_feasible(rows, k):
        return "empty", None
    implicit = []
    for i, (a, b, _) in enumerate(rows):
        trial = list(rows)
        trial[i] = (a, b, True)
        if not fm_feasible(trial, k):
            implicit.append((a, b))
    eq_rows = [list(a) for a, _ in implicit if any(a)]
    if rank(eq_rows) < k if eq_rows else True:
        return "higher", None
    z = solve(eq_rows, [b for a, b in implicit if any(a)])
    point = [y0[i] + sum(z[j] * K[j][i] for j in range(k)) for i in range(nvars)]
    return "point", point
