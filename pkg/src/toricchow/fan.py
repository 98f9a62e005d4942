"""Rational polyhedral cones and fans in Z^n."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from ._polyhedra import classify_polyhedron, cone_facets, fm_feasible, in_cone
from .lattice import (
    Vector,
    complement_basis,
    dot,
    invariant_factors,
    matvec,
    orthogonal_lattice,
    primitive,
    rank,
    saturate,
    solve,
    xgcd,
)

log = logging.getLogger(__name__)


class FanError(ValueError):
    """Input does not describe a fan."""


class NotCompleteError(ValueError):
    """Operation needs a complete fan."""


class NotSmoothError(ValueError):
    """Operation needs a smooth fan."""


class Cone:
    """A rational cone, identified inside its fan by its set of ray indices."""

    def __init__(self, rays: Iterable[int], generators: Sequence[Sequence[int]], n: int):
        self.rays = frozenset(rays)
        self.generators: tuple[Vector, ...] = tuple(tuple(int(x) for x in g) for g in generators)
        self.n = n
        self.dim = rank(self.generators) if self.generators else 0

    @property
    def codim(self) -> int:
        return self.n - self.dim

    @property
    def key(self) -> tuple[int, ...]:
        return tuple(sorted(self.rays))

    def __repr__(self) -> str:
        return f"Cone({list(self.key)}, dim={self.dim})"

    @cached_property
    def _ordered_rays(self) -> tuple[int, ...]:
        return self.key

    @cached_property
    def facets(self) -> list[tuple[Vector, frozenset[int]]]:
        """(inner normal, ray indices on the facet) for each facet."""
        out = []
        for u, on in cone_facets(self.generators, self.n):
            out.append((u, frozenset(self._ordered_rays[i] for i in on)))
        return out

    @property
    def facet_normals(self) -> list[Vector]:
        return [u for u, _ in self.facets]

    @cached_property
    def sublattice_basis(self) -> list[Vector]:
        """Basis of N_sigma, the saturated lattice spanned by the cone."""
        return saturate(self.generators, self.n)

    @cached_property
    def orthogonal_basis(self) -> list[Vector]:
        """Basis of M(sigma) = sigma^perp in the dual lattice."""
        return orthogonal_lattice(self.generators, self.n)

    @cached_property
    def interior_point(self) -> Vector:
        return tuple(sum(g[i] for g in self.generators) for i in range(self.n))

    def contains(self, x: Sequence, relative_interior: bool = False) -> bool:
        return in_cone(x, self.generators, self.n, strict=relative_interior,
                       facets=self.facets)

    def is_strongly_convex(self) -> bool:
        if self.dim == 0:
            return True
        evals = [[dot(u, g) for g in self.generators] for u in self.facet_normals]
        return bool(evals) and rank(evals) == self.dim

    def is_simplicial(self) -> bool:
        return len(self.rays) == self.dim

    def is_smooth(self) -> bool:
        if not self.is_simplicial():
            return False
        if self.dim == 0:
            return True
        f = invariant_factors([list(col) for col in zip(*self.generators)])
        return len(f) == self.dim and all(d == 1 for d in f)


def _key(rays: Iterable[int]) -> frozenset[int]:
    return frozenset(rays)


class Fan:
    """A fan in Z^n with its full face poset.

    Cones are addressed by frozensets of ray indices; ``cone([])`` is the
    zero cone.  Build instances with :func:`build_fan`.
    """

    def __init__(self, n: int, rays: Sequence[Vector], cones: dict[frozenset[int], Cone],
                 maximal: Sequence[frozenset[int]]):
        self.n = n
        self.rays = [tuple(r) for r in rays]
        self.cones = cones
        self.maximal = sorted(maximal, key=lambda k: sorted(k))
        self._facets_of: dict[frozenset[int], list[frozenset[int]]] = {}
        self._cofaces_of: dict[frozenset[int], list[frozenset[int]]] = {k: [] for k in cones}
        for k, c in cones.items():
            facets = [f for _, f in c.facets] if c.dim > 0 else []
            self._facets_of[k] = facets
            for f in facets:
                self._cofaces_of[f].append(k)
        self._n_cache: dict[tuple[frozenset, frozenset], Vector] = {}

    # -- lookup -----------------------------------------------------------

    def cone(self, rays: Iterable[int]) -> Cone:
        return self.cones[_key(rays)]

    @property
    def zero_cone(self) -> Cone:
        return self.cones[frozenset()]

    def cones_of_dim(self, d: int) -> list[Cone]:
        out = [c for c in self.cones.values() if c.dim == d]
        return sorted(out, key=lambda c: c.key)

    def cones_of_codim(self, k: int) -> list[Cone]:
        return self.cones_of_dim(self.n - k)

    def facets_of(self, sigma: Cone) -> list[Cone]:
        return [self.cones[f] for f in self._facets_of[sigma.rays]]

    def cofaces_of(self, tau: Cone) -> list[Cone]:
        """Cones having ``tau`` as a facet."""
        return sorted((self.cones[k] for k in self._cofaces_of[tau.rays]), key=lambda c: c.key)

    def star(self, gamma: Cone) -> list[Cone]:
        return sorted((c for c in self.cones.values() if gamma.rays <= c.rays and self.is_face(gamma, c)),
                      key=lambda c: (c.dim, c.key))

    def is_face(self, tau: Cone, sigma: Cone) -> bool:
        if not tau.rays <= sigma.rays:
            return False
        if tau.rays == sigma.rays:
            return True
        return any(self.is_face(tau, self.cones[f]) for f in self._facets_of[sigma.rays]
                   if tau.rays <= f)

    def carrier(self, x: Sequence) -> Cone | None:
        """The cone whose relative interior contains x (None outside the support)."""
        for c in sorted(self.cones.values(), key=lambda c: (c.dim, c.key)):
            if c.contains(x, relative_interior=True):
                return c
        return None

    def __len__(self) -> int:
        return len(self.cones)

    def __repr__(self) -> str:
        return f"Fan(n={self.n}, rays={len(self.rays)}, cones={len(self.cones)})"

    # -- flags ------------------------------------------------------------

    @cached_property
    def is_complete(self) -> bool:
        if self.n == 0:
            return True
        full = [self.cones[k] for k in self.maximal]
        if not full or any(c.dim != self.n for c in full):
            return False
        adjacency: dict[frozenset, list[frozenset]] = {c.rays: [] for c in full}
        for tau in self.cones_of_codim(1):
            owners = [k for k in self._cofaces_of[tau.rays]]
            if len(owners) != 2:
                return False
            a, b = owners
            adjacency[a].append(b)
            adjacency[b].append(a)
        seen = {full[0].rays}
        stack = [full[0].rays]
        while stack:
            for nb in adjacency[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == len(full)

    @cached_property
    def is_simplicial(self) -> bool:
        return all(c.is_simplicial() for c in self.cones.values())

    @cached_property
    def is_smooth(self) -> bool:
        return all(self.cones[k].is_smooth() for k in self.maximal)

    def require_complete(self) -> None:
        if not self.is_complete:
            raise NotCompleteError("fan is not complete")

    def require_smooth(self) -> None:
        if not self.is_smooth:
            raise NotSmoothError("fan is not smooth")

    # -- lattice data -------------------------------------------------------

    def n_sigma_tau(self, sigma: Cone, tau: Cone) -> Vector:
        """Lattice point of sigma generating N_sigma / N_tau."""
        if not (tau.rays < sigma.rays and sigma.dim == tau.dim + 1 and self.is_face(tau, sigma)):
            raise ValueError(f"not a facet pair: {tau} in {sigma}")
        cached = self._n_cache.get((sigma.rays, tau.rays))
        if cached is not None:
            return cached
        w = n_sigma_tau(sigma, tau)
        self._n_cache[(sigma.rays, tau.rays)] = w
        return w

    def star_quotient(self, gamma: Cone) -> "StarQuotient":
        return star_quotient(self, gamma)


def n_sigma_tau(sigma: Cone, tau: Cone) -> Vector:
    """Generator of N_sigma/N_tau represented by a lattice point of sigma."""
    n = sigma.n
    extra = [g for r, g in zip(sigma.key, sigma.generators) if r not in tau.rays]
    # functional vanishing on tau but not on sigma
    u = next(b for b in tau.orthogonal_basis if any(dot(b, g) for g in extra))
    vals = [dot(u, b) for b in sigma.sublattice_basis]
    g, coeffs = 0, [0] * len(vals)
    for i, a in enumerate(vals):
        g2, s, t = xgcd(g, a)
        coeffs = [c * s for c in coeffs]
        coeffs[i] = t
        g = g2
    w = [sum(c * b[i] for c, b in zip(coeffs, sigma.sublattice_basis)) for i in range(n)]
    if dot(u, extra[0]) < 0:
        w = [-x for x in w]
    # push w into sigma by adding multiples of a relative-interior point of tau
    p = tau.interior_point
    t = 0
    step = 1
    while not sigma.contains(w):
        w = [x + step * y for x, y in zip(w, p)]
        t += step
        step *= 2
        if t > 1 << 40:  # pragma: no cover
            raise RuntimeError("could not move n_sigma_tau into sigma")
    return tuple(w)


def _normalize_rays(rays: Sequence[Sequence[int]]) -> list[Vector]:
    out = []
    for i, r in enumerate(rays):
        r = tuple(int(x) for x in r)
        if not any(r):
            raise FanError(f"ray {i} is zero")
        p = primitive(r)
        if p != r:
            warnings.warn(f"ray {i} = {list(r)} is not primitive; using {list(p)}", stacklevel=3)
        out.append(p)
    if len(set(out)) != len(out):
        raise FanError("duplicate rays after normalization")
    return out


def _close_faces(n: int, rays: list[Vector], maximal: list[frozenset[int]]) -> dict[frozenset[int], Cone]:
    cones: dict[frozenset[int], Cone] = {}
    stack = list(maximal)
    while stack:
        k = stack.pop()
        if k in cones:
            continue
        c = Cone(k, [rays[i] for i in sorted(k)], n)
        cones[k] = c
        if c.dim > 0:
            for _, f in c.facets:
                if f not in cones:
                    stack.append(f)
    cones.setdefault(frozenset(), Cone((), [], n))
    return cones


def build_fan(n: int, rays: Sequence[Sequence[int]], max_cones: Sequence[Iterable[int]],
              check: bool = True) -> Fan:
    """Build and validate a fan from rays and maximal cones (ray-index sets).

    With ``check`` the fan axioms are verified: each cone is strongly
    convex, every listed ray is an extreme ray, and any two maximal cones
    meet in a common face.
    """
    rays = _normalize_rays(rays) if rays else []
    if any(len(r) != n for r in rays):
        raise FanError("ray of wrong length")
    maximal = [_key(m) for m in max_cones]
    for m in maximal:
        if any(i < 0 or i >= len(rays) for i in m):
            raise FanError(f"cone {sorted(m)} references an unknown ray")
    maximal = [m for m in maximal if not any(m < o for o in maximal)]
    maximal = list(dict.fromkeys(maximal))
    if check:
        for m in maximal:
            c = Cone(m, [rays[i] for i in sorted(m)], n)
            if not c.is_strongly_convex():
                raise FanError(f"degenerate cone {sorted(m)}: contains a line")
    cones = _close_faces(n, rays, maximal)
    if check:
        for m in maximal:
            for i in m:
                if frozenset([i]) not in cones:
                    raise FanError(f"ray {i} is not an extreme ray of cone {sorted(m)}")
        _check_intersections(n, cones, maximal)
    used = set().union(*maximal) if maximal else set()
    if check and used != set(range(len(rays))):
        log.warning("rays %s belong to no cone", sorted(set(range(len(rays))) - used))
    return Fan(n, rays, cones, maximal)


def _faces_of(cones, k) -> set[frozenset[int]]:
    out = {k}
    stack = [k]
    while stack:
        c = cones[stack.pop()]
        if c.dim == 0:
            continue
        for _, f in c.facets:
            if f not in out:
                out.add(f)
                stack.append(f)
    return out | {frozenset()}


def _check_intersections(n: int, cones, maximal) -> None:
    faces = {m: _faces_of(cones, m) for m in maximal}
    for a, b in combinations(maximal, 2):
        common = a & b
        if common not in faces[a] or common not in faces[b]:
            raise FanError(f"not a fan: cones {sorted(a)} and {sorted(b)} meet badly")
        sa, sb = cones[a], cones[b]
        # the face `common` of sa is cut out by the sum of the facet normals containing it
        u = [0] * n
        for normal, on in sa.facets:
            if common <= on:
                u = [x + y for x, y in zip(u, normal)]
        if not any(dot(u, g) for g in sa.generators):
            continue
        rows = []
        for cone in (sa, sb):
            for w in cone.orthogonal_basis:
                rows.append((tuple(w), 0, False))
                rows.append((tuple(-x for x in w), 0, False))
            for normal, _ in cone.facets:
                rows.append((tuple(normal), 0, False))
        rows.append((tuple(u), 1, False))
        if fm_feasible(rows, n):
            raise FanError(f"not a fan: cones {sorted(a)} and {sorted(b)} overlap")


def rebase(rays: Sequence[Sequence[int]], basis: Sequence[Sequence[int]]) -> list[Vector]:
    """Rewrite rays in coordinates of a basis (given as vectors) of a sublattice."""
    n = len(basis)
    B = [[b[i] for b in basis] for i in range(n)]
    out = []
    for r in rays:
        c = solve(B, list(r))
        if c is None or any(Fraction(x).denominator != 1 for x in c):
            raise FanError(f"ray {list(r)} is not in the sublattice")
        out.append(tuple(int(x) for x in c))
    return out


# -- star quotients -------------------------------------------------------

@dataclass
class StarQuotient:
    """Fan of the cones containing gamma, pushed to N / N_gamma."""

    gamma: Cone
    fan: Fan
    projection: list[list[int]]        # rows: Z^n -> Z^(n - dim gamma)
    section: list[list[int]]           # columns: Z^(n - dim gamma) -> Z^n
    to_original: dict[frozenset[int], frozenset[int]] = field(default_factory=dict)
    from_original: dict[frozenset[int], frozenset[int]] = field(default_factory=dict)

    def project(self, x: Sequence) -> list:
        return matvec(self.projection, x)

    def original(self, cone: Cone) -> frozenset[int]:
        return self.to_original[cone.rays]

    def quotient_cone(self, original_rays: frozenset[int]) -> Cone:
        return self.fan.cones[self.from_original[original_rays]]


def star_quotient(fan: Fan, gamma: Cone) -> StarQuotient:
    n = fan.n
    if gamma.dim == 0:
        P = [[int(i == j) for j in range(n)] for i in range(n)]
        ident = {k: k for k in fan.cones}
        return StarQuotient(gamma, fan, P, P, ident, ident)
    P, Q = complement_basis(gamma.sublattice_basis, n)
    m = n - gamma.dim
    star = fan.star(gamma)
    rho_list = [c for c in star if c.dim == gamma.dim + 1]
    qrays = []
    rho_index = {}
    for i, rho in enumerate(rho_list):
        g = next(g for r, g in zip(rho.key, rho.generators) if r not in gamma.rays)
        qrays.append(primitive(matvec(P, g)))
        rho_index[rho.rays] = i
    cones: dict[frozenset[int], Cone] = {}
    to_orig, from_orig = {}, {}
    for sigma in star:
        k = frozenset(i for r, i in rho_index.items() if r <= sigma.rays and fan.is_face(fan.cones[r], sigma))
        cones[k] = Cone(k, [qrays[i] for i in sorted(k)], m)
        to_orig[k] = sigma.rays
        from_orig[sigma.rays] = k
    maximal = [k for k in cones if not any(k < o for o in cones)]
    qfan = Fan(m, qrays, cones, maximal)
    return StarQuotient(gamma, qfan, P, Q, to_orig, from_orig)


# -- intersections and genericity ------------------------------------------

@dataclass(frozen=True)
class Intersection:
    kind: str                     # "empty" | "point" | "higher"
    point: tuple[Fraction, ...] | None = None
    relative_interior: bool = False


def intersect_translated(sigma: Cone, tau: Cone, v: Sequence[int]) -> Intersection:
    """Classify sigma intersected with tau + v exactly."""
    n = sigma.n
    eqs, ineqs = [], []
    for w in sigma.orthogonal_basis:
        eqs.append((w, 0))
    for w in tau.orthogonal_basis:
        eqs.append((w, dot(w, v)))
    for u in sigma.facet_normals:
        ineqs.append((u, 0))
    for u in tau.facet_normals:
        ineqs.append((u, dot(u, v)))
    kind, pt = classify_polyhedron(eqs, ineqs, n)
    if kind != "point":
        return Intersection(kind)
    inside = (all(dot(u, pt) > 0 for u in sigma.facet_normals)
              and all(dot(u, pt) - dot(u, v) > 0 for u in tau.facet_normals))
    return Intersection("point", tuple(pt), inside)


def meets_translate(gens_a: Sequence[Sequence], gens_b: Sequence[Sequence[int]],
                    v: Sequence, n: int) -> bool:
    """Does cone(gens_a) meet cone(gens_b) + v?  (v in cone(a) - cone(b))."""
    gens = [tuple(g) for g in gens_a] + [tuple(-x for x in g) for g in gens_b]
    gens = [g for g in gens if any(g)]
    if not gens:
        return not any(v)
    return in_cone(v, gens, n)


@dataclass
class GenericityReport:
    generic: bool
    meeting: list[tuple[Cone, tuple[Fraction, ...]]]   # Delta(v) with intersection points
    offending: list[Cone]


def is_generic(fan: Fan, L: Sequence[Sequence[int]], v: Sequence[int]) -> GenericityReport:
    """Decide whether v is generic for the affine space L_R + v.

    Generic means every cone meeting L_R + v in exactly one point has
    dimension n - rank(L).  Equivalently no cone of smaller dimension meets
    L_R + v at all; the cones of dimension n - rank(L) whose span is
    complementary to L and which meet it form Delta(v).
    """
    n = fan.n
    L = [tuple(x) for x in L if any(x)]
    d = rank(L) if L else 0
    target = n - d
    offending, meeting = [], []
    for c in sorted(fan.cones.values(), key=lambda c: (c.dim, c.key)):
        if c.dim < target:
            if _cone_meets_affine(c, L, v, n):
                offending.append(c)
        elif c.dim == target:
            basis = c.sublattice_basis + list(L)
            if rank(basis) < n:
                continue
            sol = solve([[b[i] for b in basis] for i in range(n)], list(v))
            pt = tuple(sum(sol[j] * basis[j][i] for j in range(target)) for i in range(n))
            if c.contains(pt, relative_interior=True):
                meeting.append((c, pt))
            elif c.contains(pt):
                offending.append(c)
    return GenericityReport(not offending, meeting, offending)


def _cone_meets_affine(c: Cone, L, v, n) -> bool:
    gens = list(c.generators) + list(L) + [tuple(-x for x in l) for l in L]
    return in_cone(v, gens, n)


def delta_v_bruteforce(fan: Fan, L: Sequence[Sequence[int]], v: Sequence[int]) -> list[Cone]:
    """Cones meeting L_R + v in exactly one point, by direct polyhedral classification."""
    n = fan.n
    L = [tuple(x) for x in L if any(x)]
    perp = orthogonal_lattice(L, n) if L else [tuple(int(i == j) for j in range(n)) for i in range(n)]
    out = []
    for c in sorted(fan.cones.values(), key=lambda c: (c.dim, c.key)):
        eqs = [(w, 0) for w in c.orthogonal_basis] + [(w, dot(w, v)) for w in perp]
        ineqs = [(u, 0) for u in c.facet_normals]
        kind, _ = classify_polyhedron(eqs, ineqs, n)
        if kind == "point":
            out.append(c)
    return out


def sample_vector(rng, dim: int, bound: int) -> tuple[int, ...]:
    while True:
        v = tuple(rng.randint(-bound, bound) for _ in range(dim))
        if any(v) or dim == 0:
            return v


def gcd_vector(v: Sequence[int]) -> int:
    return math.gcd(*v) if v else 0


# -- morphisms -------------------------------------------------------------

class ToricMorphism:
    """A lattice map psi: N' -> N compatible with fans source -> target.

    ``psi`` is an n x n' integer matrix (columns are images of the basis of
    N').  ``cone_image`` maps each source cone key to the key of the
    smallest target cone containing its image.
    """

    def __init__(self, psi: Sequence[Sequence[int]], source: Fan, target: Fan):
        psi = [[int(x) for x in row] for row in psi]
        if len(psi) != target.n or any(len(row) != source.n for row in psi):
            raise ValueError(f"lattice map must be {target.n} x {source.n}")
        self.psi = psi
        self.source = source
        self.target = target
        self.cone_image: dict[frozenset[int], frozenset[int]] = {}
        for c in sorted(source.cones.values(), key=lambda c: (-c.dim, c.key)):
            img = target.carrier(self.apply(c.interior_point))
            if img is None or not all(img.contains(self.apply(g)) for g in c.generators):
                raise FanError(f"image of source cone {list(c.key)} lies in no target cone")
            self.cone_image[c.rays] = img.rays

    def apply(self, x: Sequence) -> list:
        return matvec(self.psi, x)

    def image_cone(self, c: Cone) -> Cone:
        return self.target.cones[self.cone_image[c.rays]]

    @property
    def is_dominant(self) -> bool:
        return rank(self.psi) == self.target.n if self.target.n else True

    @classmethod
    def identity(cls, fan: Fan) -> "ToricMorphism":
        return cls([[int(i == j) for j in range(fan.n)] for i in range(fan.n)], fan, fan)
