"""Lattice polytopes, their normal fans, face volumes and lattice points."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from ._polyhedra import cone_facets
from .chow import MinkowskiWeight
from .fan import Cone, Fan, build_fan
from .lattice import (
    clear_denominators,
    dot,
    orthogonal_lattice,
    primitive,
    rank,
    rational_nullspace,
    solve,
)

Point = tuple[Fraction, ...]
Row = tuple[tuple, Fraction]  # (u, u0) meaning <u, x> + u0 >= 0 (or == 0)


def _frac_point(p) -> Point:
    return tuple(Fraction(x) for x in p)


def _homogenize(points: Sequence[Point]) -> list[tuple[int, ...]]:
    out = []
    for p in points:
        den = math.lcm(*(x.denominator for x in p)) if p else 1
        out.append(tuple(int(x * den) for x in p) + (den,))
    return out


def _normalize_row(u, u0) -> Row:
    """Scale so that u is a primitive integer vector (u0 may stay rational)."""
    u = [Fraction(x) for x in u]
    if not any(u):
        return tuple(0 for _ in u), Fraction(u0)
    p = clear_denominators(u)
    j = next(i for i, x in enumerate(u) if x)
    s = Fraction(p[j]) / u[j]
    return tuple(p), Fraction(u0) * s


def hull_description(points: Sequence[Sequence], n: int) -> tuple[list[Row], list[Row]]:
    """(equalities, facet inequalities) of conv(points), as rows <u,x> + u0 (== or >=) 0."""
    pts = [_frac_point(p) for p in points]
    if not pts:
        raise ValueError("empty point set")
    H = _homogenize(pts)
    eqs = []
    for w in rational_nullspace(H, n + 1):
        w = clear_denominators(w)
        eqs.append(_normalize_row(w[:n], w[n]))
    ineqs = []
    for w, _ in cone_facets(H, n + 1):
        u, u0 = _normalize_row(w[:n], w[n])
        ineqs.append((u, u0))
    return eqs, ineqs


class LatticePolytope:
    """A rational polytope {x : <x, v_i> >= -a_i} with its vertex list.

    ``inequalities`` holds rows (v, a) meaning <x, v> >= -a, ``equalities``
    rows (u, b) meaning <x, u> == -b.  Vertices are exact rationals; the
    empty polytope has no vertices.
    """

    def __init__(self, n: int, vertices: Sequence[Sequence], inequalities: Sequence[Row],
                 equalities: Sequence[Row] = ()):
        self.n = n
        self.vertices: list[Point] = sorted({_frac_point(v) for v in vertices})
        self.inequalities = [(tuple(u), Fraction(a)) for u, a in inequalities]
        self.equalities = [(tuple(u), Fraction(a)) for u, a in equalities]

    # -- construction ------------------------------------------------------

    @classmethod
    def from_points(cls, points: Sequence[Sequence], n: int | None = None) -> "LatticePolytope":
        pts = [_frac_point(p) for p in points]
        if not pts:
            if n is None:
                raise ValueError("ambient rank needed for an empty polytope")
            return cls(n, [], [])
        n = len(pts[0]) if n is None else n
        eqs, ineqs = hull_description(pts, n)
        verts = _extreme_points(pts, eqs, ineqs, n)
        return cls(n, verts, ineqs, eqs)

    @classmethod
    def from_inequalities(cls, n: int, rows: Sequence[tuple[Sequence[int], object]]) -> "LatticePolytope":
        """Rows (v, a) for <x, v> >= -a; vertices found from n-subsets."""
        rows = [(tuple(int(x) for x in v), Fraction(a)) for v, a in rows]
        verts = set()
        for sub in combinations(range(len(rows)), n):
            A = [list(rows[i][0]) for i in sub]
            if rank(A) < n:
                continue
            x = solve(A, [-rows[i][1] for i in sub])
            if all(dot(v, x) >= -a for v, a in rows):
                verts.add(tuple(x))
        if n == 0:
            verts = {()} if all(a >= 0 for _, a in rows) else set()
        return cls(n, sorted(verts), rows)

    # -- queries -------------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def dim(self) -> int:
        if not self.vertices:
            return -1
        p0 = self.vertices[0]
        return rank([tuple(a - b for a, b in zip(p, p0)) for p in self.vertices[1:]]) if len(self.vertices) > 1 else 0

    @property
    def is_lattice(self) -> bool:
        return all(x.denominator == 1 for v in self.vertices for x in v)

    def contains(self, x: Sequence) -> bool:
        if any(dot(u, x) != -a for u, a in self.equalities):
            return False
        return all(dot(u, x) >= -a for u, a in self.inequalities)

    def facets(self) -> list[Row]:
        """Irredundant facet rows (v, a), v primitive; needs a full-dimensional polytope."""
        if self.dim != self.n:
            raise ValueError("not full-dimensional")
        _, ineqs = hull_description(self.vertices, self.n)
        return ineqs

    def face(self, w: Sequence) -> list[Point]:
        """Vertices minimizing <x, w>."""
        if not self.vertices:
            return []
        vals = [dot(w, v) for v in self.vertices]
        lo = min(vals)
        return [v for v, x in zip(self.vertices, vals) if x == lo]

    def lattice_points(self) -> list[tuple[int, ...]]:
        if not self.vertices:
            return []
        lo = [math.floor(min(v[i] for v in self.vertices)) for i in range(self.n)]
        hi = [math.ceil(max(v[i] for v in self.vertices)) for i in range(self.n)]
        out = []
        for x in product(*(range(a, b + 1) for a, b in zip(lo, hi))):
            if self.contains(x):
                out.append(x)
        return out

    def __repr__(self) -> str:
        return f"LatticePolytope(n={self.n}, vertices={[[str(c) for c in v] for v in self.vertices]})"


def _extreme_points(pts, eqs, ineqs, n) -> list[Point]:
    out = []
    for p in set(pts):
        tight = [list(u) for u, u0 in ineqs if dot(u, p) + u0 == 0] + [list(u) for u, _ in eqs]
        if rank(tight) == n if tight else n == 0:
            out.append(p)
    return sorted(out)


def count_lattice_points(P: LatticePolytope) -> int:
    """Brute-force count over the bounding box."""
    return len(P.lattice_points())


def minkowski_sum(P: LatticePolytope, Q: LatticePolytope) -> LatticePolytope:
    if P.n != Q.n:
        raise ValueError("ambient rank mismatch")
    if P.is_empty or Q.is_empty:
        return LatticePolytope(P.n, [], [])
    pts = {tuple(a + b for a, b in zip(p, q)) for p in P.vertices for q in Q.vertices}
    return LatticePolytope.from_points(sorted(pts), P.n)


# -- normal fans -----------------------------------------------------------------

def normal_fan(P: LatticePolytope) -> Fan:
    """Inner normal fan; ``fan.polytope_faces`` maps each cone to its face's vertices."""
    if P.is_empty or P.dim != P.n:
        raise ValueError("not full-dimensional")
    facets = P.facets()
    rays = [u for u, _ in facets]
    max_cones = []
    for v in P.vertices:
        max_cones.append([i for i, (u, a) in enumerate(facets) if dot(u, v) + a == 0])
    fan = build_fan(P.n, rays, max_cones, check=False)
    fan.facet_offsets = [a for _, a in facets]
    fan.polytope_faces = {}
    for k, c in fan.cones.items():
        fan.polytope_faces[k] = frozenset(
            j for j, v in enumerate(P.vertices)
            if all(dot(rays[i], v) + facets[i][1] == 0 for i in k))
    return fan


@dataclass
class DivisorPolytope:
    polytope: LatticePolytope
    a: tuple[int, ...]
    in_K: bool
    vertex_of_cone: dict  # maximal cone key -> m_rho (None when undefined)


def polytope_from_divisor(fan: Fan, a: Sequence) -> DivisorPolytope:
    """P = {x : <x, v_i> >= -a_i}; flag whether the fan refines its normal fan.

    The flag uses the local description: on each maximal cone rho the
    equations <m, v_i> = -a_i (i in rho) must have a solution m_rho, and
    every m_rho must lie in P.
    """
    fan.require_complete()
    if len(a) != len(fan.rays):
        raise ValueError(f"need {len(fan.rays)} coefficients, got {len(a)}")
    a = tuple(Fraction(x) for x in a)
    P = LatticePolytope.from_inequalities(fan.n, list(zip(fan.rays, a)))
    in_K = True
    verts = {}
    for k in fan.maximal:
        c = fan.cones[k]
        m = solve([list(g) for g in c.generators], [-a[i] for i in c.key])
        verts[k] = tuple(m) if m is not None else None
        if m is None or not P.contains(m):
            in_K = False
    return DivisorPolytope(P, tuple(_int_if(x) for x in a), in_K, verts)


def _int_if(x):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else x


# -- volumes ---------------------------------------------------------------------

def normalized_volume(points: Sequence[Sequence], lattice: Sequence[Sequence[int]] | None = None) -> Fraction:
    """Volume of conv(points) in units of primitive simplices of ``lattice``.

    ``lattice`` is a basis of the lattice of the affine span directions
    (default: the saturation of the span).  If the points span less than
    the lattice, the volume is 0.
    """
    pts = [_frac_point(p) for p in points]
    if not pts:
        return Fraction(0)
    n = len(pts[0])
    p0 = pts[0]
    diffs = [tuple(a - b for a, b in zip(p, p0)) for p in pts[1:]]
    d = rank(diffs) if diffs else 0
    if lattice is None:
        if d == 0:
            return Fraction(1)
        lattice = _saturated_span(diffs, n)
    k = len(lattice)
    if d < k:
        return Fraction(0)
    if k == 0:
        return Fraction(1)
    B = [[b[i] for b in lattice] for i in range(n)]
    coords = []
    for p in pts:
        y = solve(B, [a - b for a, b in zip(p, p0)])
        if y is None:
            raise ValueError("points leave the affine lattice span")
        coords.append(tuple(y))
    return _nvol(sorted(set(coords)), k)


def _saturated_span(diffs, n) -> list[tuple[int, ...]]:
    ortho = orthogonal_lattice([clear_denominators(d) for d in diffs], n)
    return orthogonal_lattice(ortho, n) if ortho else [
        tuple(int(i == j) for j in range(n)) for i in range(n)]


def _nvol(pts: list[Point], k: int) -> Fraction:
    """Normalized volume of a full-dimensional polytope in Q^k w.r.t. Z^k."""
    if k == 0:
        return Fraction(1)
    if k == 1:
        xs = [p[0] for p in pts]
        return max(xs) - min(xs)
    p0 = pts[0]
    _, ineqs = hull_description(pts, k)
    total = Fraction(0)
    for u, u0 in ineqs:
        h = dot(u, p0) + u0
        if h == 0:
            continue
        face = [p for p in pts if dot(u, p) + u0 == 0]
        basis = orthogonal_lattice([u], k)
        total += h * normalized_volume(face, basis)
    return total


def volume_weight(fan: Fan, P: LatticePolytope | DivisorPolytope, k: int) -> MinkowskiWeight:
    """sigma -> Vol(P^sigma) / k!, the normalized volume of the polar face over k!.

    The face P^sigma is the set of points of P minimizing a relative
    interior point of sigma; its volume is taken in the lattice M(sigma)
    and is 0 when the face has dimension below codim sigma = k.
    """
    if isinstance(P, DivisorPolytope):
        if not P.in_K:
            raise ValueError("polytope is not in K(fan): fan does not refine its normal fan")
        P = P.polytope
    fact = math.factorial(k)
    out = {}
    for sigma in fan.cones_of_codim(k):
        face = P.face(sigma.interior_point) if sigma.dim else P.vertices
        if not face:
            out[sigma.rays] = 0
            continue
        out[sigma.rays] = normalized_volume(face, sigma.orthogonal_basis) / fact
    return MinkowskiWeight(k, out)


def lattice_simplex(n: int, t: int = 1) -> LatticePolytope:
    pts = [tuple([0] * n)] + [tuple(t * int(i == j) for j in range(n)) for i in range(n)]
    return LatticePolytope.from_points(pts, n)


def cube(n: int, lo: int = 0, hi: int = 1) -> LatticePolytope:
    return LatticePolytope.from_points(list(product((lo, hi), repeat=n)), n)
