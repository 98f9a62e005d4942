"""Chow groups and Minkowski weights of toric varieties."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence, Union

from .fan import Cone, Fan, FanError, NotCompleteError, build_fan
from .lattice import (
    GroupStructure,
    cokernel_structure,
    dot,
    kernel_basis,
    orthogonal_lattice,
    solve,
    transpose,
)

Number = Union[int, Fraction]


def _clean(x) -> Number:
    x = Fraction(x)
    return int(x) if x.denominator == 1 else x


def _cone_key(c) -> frozenset[int]:
    return c.rays if isinstance(c, Cone) else frozenset(c)


class _Graded:
    """Shared behaviour of weights and cycles: a codimension plus a value map."""

    codim: int
    values: dict[frozenset[int], Number]

    def __getitem__(self, cone) -> Number:
        return self.values.get(_cone_key(cone), 0)

    def items(self):
        return sorted(self.values.items(), key=lambda kv: sorted(kv[0]))

    @property
    def is_integral(self) -> bool:
        return all(Fraction(x).denominator == 1 for x in self.values.values())

    def _combine(self, other, sign):
        if type(other) is not type(self) or other.codim != self.codim:
            raise ValueError("codimension mismatch")
        keys = set(self.values) | set(other.values)
        return type(self)(self.codim, {k: self[k] + sign * other[k] for k in keys})

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return type(self)(self.codim, {k: -x for k, x in self.values.items()})

    def __mul__(self, scalar):
        return type(self)(self.codim, {k: scalar * x for k, x in self.values.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if type(other) is not type(self) or other.codim != self.codim:
            return NotImplemented
        keys = set(self.values) | set(other.values)
        return all(self[k] == other[k] for k in keys)

    def __hash__(self):
        return hash((self.codim, frozenset((k, v) for k, v in self.values.items() if v)))

    def __repr__(self) -> str:
        body = ", ".join(f"{sorted(k)}: {v}" for k, v in self.items() if v)
        return f"{type(self).__name__}(codim={self.codim}, {{{body}}})"


class MinkowskiWeight(_Graded):
    """A function on the codimension-k cones of a fan.

    Missing cones read as 0.  Values are ints, or Fractions for
    rational-valued weights.
    """

    def __init__(self, codim: int, values: Mapping = ()):
        self.codim = codim
        self.values = {_cone_key(k): _clean(v) for k, v in dict(values).items()}


class CycleClass(_Graded):
    """Finite integer combination of the orbit closures V(sigma), codim sigma = k."""

    def __init__(self, codim: int, coefficients: Mapping = ()):
        self.codim = codim
        self.values = {_cone_key(k): _clean(v) for k, v in dict(coefficients).items() if v}

    @property
    def coefficients(self):
        return self.values


def constant_weight(fan: Fan, codim: int, value: Number = 1) -> MinkowskiWeight:
    return MinkowskiWeight(codim, {c.rays: value for c in fan.cones_of_codim(codim)})


def weight_from_vector(fan: Fan, codim: int, vec: Sequence) -> MinkowskiWeight:
    cones = fan.cones_of_codim(codim)
    if len(vec) != len(cones):
        raise ValueError("vector length does not match the number of cones")
    return MinkowskiWeight(codim, {c.rays: x for c, x in zip(cones, vec)})


def weight_vector(fan: Fan, w: MinkowskiWeight) -> list[Number]:
    return [w[c] for c in fan.cones_of_codim(w.codim)]


def check_support(fan: Fan, w: _Graded) -> None:
    for k in w.values:
        c = fan.cones.get(k)
        if c is None or c.codim != w.codim:
            raise ValueError(f"cone {sorted(k)} is not a codimension-{w.codim} cone of the fan")


# -- relations -------------------------------------------------------------

@dataclass
class RelationMatrix:
    """Rows are (tau, u) with u in a basis of M(tau); columns are codim-k cones."""

    codim: int
    matrix: list[list[int]]
    rows: list[tuple[Cone, tuple[int, ...]]]
    columns: list[Cone]


def relation_matrix(fan: Fan, k: int) -> RelationMatrix:
    if not 0 <= k <= fan.n:
        raise ValueError(f"codimension {k} out of range 0..{fan.n}")
    cols = fan.cones_of_codim(k)
    col_index = {c.rays: i for i, c in enumerate(cols)}
    rows, labels = [], []
    for tau in fan.cones_of_codim(k + 1) if k < fan.n else []:
        cofaces = fan.cofaces_of(tau)
        ns = [(col_index[s.rays], fan.n_sigma_tau(s, tau)) for s in cofaces]
        for u in tau.orthogonal_basis:
            row = [0] * len(cols)
            for j, w in ns:
                row[j] = dot(u, w)
            rows.append(row)
            labels.append((tau, u))
    return RelationMatrix(k, rows, labels, cols)


def chow_group(fan: Fan, k: int) -> GroupStructure:
    """A_k of X(fan): free abelian on codim-k cones modulo the relations."""
    R = relation_matrix(fan, k)
    return cokernel_structure(transpose(R.matrix, len(R.columns)), len(R.columns))


def betti_numbers(fan: Fan) -> list[int]:
    return [len(weight_basis(fan, k)) for k in range(fan.n + 1)]


def weight_basis(fan: Fan, k: int) -> list[MinkowskiWeight]:
    """Z-basis of the codim-k Minkowski weights."""
    fan.require_complete()
    R = relation_matrix(fan, k)
    if not R.matrix:
        basis = [[int(i == j) for j in range(len(R.columns))] for i in range(len(R.columns))]
    else:
        basis = kernel_basis(R.matrix, len(R.columns))
    return [MinkowskiWeight(k, {c.rays: x for c, x in zip(R.columns, b)}) for b in basis]


@dataclass
class WeightCheck:
    ok: bool
    violations: list[tuple[Cone, tuple[int, ...], Number]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def is_weight(fan: Fan, w: MinkowskiWeight) -> WeightCheck:
    """Check the balancing condition at every (tau, u)."""
    fan.require_complete()
    check_support(fan, w)
    R = relation_matrix(fan, w.codim)
    vec = [w[c] for c in R.columns]
    bad = []
    for row, (tau, u) in zip(R.matrix, R.rows):
        s = dot(row, vec)
        if s != 0:
            bad.append((tau, u, s))
    return WeightCheck(not bad, bad)


def is_cycle_balanced(fan: Fan, w: MinkowskiWeight) -> WeightCheck:
    """Codim-1 test via cycles of facets around each codim-2 cone.

    Walks sigma_1 < rho_1 > sigma_2 < rho_2 ... around tau and checks that
    sum c(sigma_i) * m(rho_i, sigma_i) vanishes, m(rho, sigma) being the
    generator of M(sigma) that is nonnegative on rho.
    """
    fan.require_complete()
    if w.codim != 1:
        raise ValueError("cycle test applies to codimension-1 weights")
    bad = []
    for tau in fan.cones_of_codim(2):
        total = [0] * fan.n
        for sigma, rho in _cycle_around(fan, tau):
            m = _m_rho_sigma(rho, sigma)
            total = [t + w[sigma] * x for t, x in zip(total, m)]
        if any(total):
            bad.append((tau, tuple(total), 1))
    return WeightCheck(not bad, bad)


def _cycle_around(fan: Fan, tau: Cone) -> list[tuple[Cone, Cone]]:
    facets = [s for s in fan.cofaces_of(tau)]
    start = facets[0]
    out = []
    sigma, rho = start, fan.cofaces_of(start)[0]
    while True:
        out.append((sigma, rho))
        nxt = [s for s in fan.facets_of(rho) if s.rays != sigma.rays and tau.rays <= s.rays
               and fan.is_face(tau, s)]
        sigma = nxt[0]
        if sigma.rays == start.rays:
            return out
        rho = next(r for r in fan.cofaces_of(sigma) if r.rays != rho.rays)


def _m_rho_sigma(rho: Cone, sigma: Cone) -> tuple[int, ...]:
    (m,) = sigma.orthogonal_basis
    if any(dot(m, g) < 0 for g in rho.generators):
        m = tuple(-x for x in m)
    return m


def degree_pairing(w: MinkowskiWeight, z: CycleClass) -> Number:
    if w.codim != z.codim:
        raise ValueError(f"codimension mismatch: weight {w.codim}, cycle {z.codim}")
    return _clean(sum(Fraction(c) * w[k] for k, c in z.values.items()))


# -- Cartier data ------------------------------------------------------------

CartierData = dict  # maximal-cone key -> element u(rho) of M (ints or Fractions)


def _adjacencies(fan: Fan):
    for sigma in fan.cones_of_codim(1):
        rho, rho2 = fan.cofaces_of(sigma)
        yield sigma, rho, rho2


def divisor_to_weight(fan: Fan, cd: Mapping) -> MinkowskiWeight:
    """Degrees c(sigma) with u(rho) - u(rho') = c(sigma) m(rho, sigma)."""
    fan.require_complete()
    out = {}
    for sigma, rho, rho2 in _adjacencies(fan):
        diff = [Fraction(a) - Fraction(b) for a, b in zip(cd[rho.rays], cd[rho2.rays])]
        m = _m_rho_sigma(rho, sigma)
        j = next(i for i, x in enumerate(m) if x)
        c = diff[j] / m[j]
        if any(d != c * x for d, x in zip(diff, m)):
            raise ValueError(f"inconsistent Cartier data across {sigma}")
        out[sigma.rays] = c
    return MinkowskiWeight(1, out)


def weight_to_cartier(fan: Fan, w: MinkowskiWeight) -> CartierData:
    """Inverse of :func:`divisor_to_weight`, normalized by u = 0 on the first maximal cone."""
    fan.require_complete()
    if w.codim != 1:
        raise ValueError("Cartier data correspond to codimension-1 weights")
    neighbours: dict[frozenset, list[tuple[Cone, Cone]]] = {k: [] for k in fan.maximal}
    for sigma, rho, rho2 in _adjacencies(fan):
        neighbours[rho.rays].append((sigma, rho2))
        neighbours[rho2.rays].append((sigma, rho))
    base = fan.maximal[0]
    u: CartierData = {base: tuple([0] * fan.n)}
    queue = deque([base])
    while queue:
        k = queue.popleft()
        rho = fan.cones[k]
        for sigma, rho2 in neighbours[k]:
            m = _m_rho_sigma(rho, sigma)
            cand = tuple(_clean(a - w[sigma] * x) for a, x in zip(u[k], m))
            if rho2.rays not in u:
                u[rho2.rays] = cand
                queue.append(rho2.rays)
            elif u[rho2.rays] != cand:
                raise ValueError(f"path inconsistency around {sigma}: weight is not balanced")
    return u


def cartier_from_values(fan: Fan, values: Sequence[Number]) -> CartierData:
    """Cartier data with <u(rho), v_j> = values[j] for the rays v_j of each maximal cone."""
    out = {}
    for k in fan.maximal:
        c = fan.cones[k]
        u = solve([list(g) for g in c.generators], [values[j] for j in c.key])
        if u is None:
            raise ValueError(f"values are not linear on cone {sorted(k)}")
        out[k] = tuple(_clean(x) for x in u)
    return out


# -- hypersimplices -----------------------------------------------------------

def hypersimplex_fan(k: int, n: int) -> Fan:
    """Normal fan of the hypersimplex Delta(k, n) in Z^n / Z(1,...,1).

    Coordinates: the images of e_1..e_{n-1} form a basis, e_n maps to
    -(e_1 + ... + e_{n-1}).  The fan carries ``ray_labels``: ('+', i) for
    the ray of e_i (facet x_i >= 0) and ('-', i) for -e_i (facet x_i <= 1),
    with 0-based i.
    """
    if not (1 <= k <= n - 1) or n < 2:
        raise ValueError(f"need 1 <= k <= n-1, got k={k}, n={n}")
    verts = [frozenset(S) for S in combinations(range(n), k)]

    def proj(sign, i):
        if i < n - 1:
            return tuple(sign * int(j == i) for j in range(n - 1))
        return tuple([-sign] * (n - 1))

    candidates = []
    for i in range(n):
        candidates.append((("+", i), frozenset(v for v in verts if i not in v)))
        candidates.append((("-", i), frozenset(v for v in verts if i in v)))
    facets, seen = [], set()
    for label, vs in candidates:
        if vs in seen or any(vs < other for _, other in candidates):
            continue
        seen.add(vs)
        facets.append((label, vs))
    rays = [proj(1 if s == "+" else -1, i) for (s, i), _ in facets]
    max_cones = [[j for j, (_, vs) in enumerate(facets) if S in vs] for S in verts]
    fan = build_fan(n - 1, rays, max_cones, check=False)
    fan.ray_labels = [label for label, _ in facets]
    return fan


def hypersimplex_face_count(d: int, k: int, n: int) -> int:
    """Number of codimension-d faces of Delta(k, n), 0 < d < n-1."""
    from math import factorial
    total = 0
    for i in range(max(0, k + d + 1 - n), min(k - 1, d) + 1):
        total += factorial(n) // (factorial(i) * factorial(d - i) * factorial(n - d))
    return total


def hypersimplex_cone(fan: Fan, I: Sequence[int], J: Sequence[int]) -> Cone:
    """Cone of the face F_{I,J} (coordinates in I equal 1, in J equal 0)."""
    index = {lab: j for j, lab in enumerate(fan.ray_labels)}
    rays = [index[("-", i)] for i in I] + [index[("+", j)] for j in J]
    return fan.cone(rays)


@dataclass
class FaceRelationReport:
    relations_ok: bool
    balanced: bool
    violations: list[tuple] = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return self.relations_ok == self.balanced


def verify_prop26(k: int, n: int, w: MinkowskiWeight, fan: Fan | None = None) -> FaceRelationReport:
    """Check the (I, J) face-label relations on a hypersimplex weight.

    The weight has codimension n - d - 1 and lives on cones of faces of
    codimension d.  The verdict is compared with the balancing test.
    """
    if not 2 <= k <= n - 2:
        raise ValueError("face labels (I, J) need 2 <= k <= n-2")
    fan = fan or hypersimplex_fan(k, n)
    d = n - 1 - w.codim

    def c(I, J):
        return w[hypersimplex_cone(fan, I, J)]

    bad = []
    if d >= 1:
        for a in range(0, d):
            b = d - 1 - a
            if a >= k or b >= n - k:
                continue
            for I in combinations(range(n), a):
                rest = [x for x in range(n) if x not in I]
                for J in combinations(rest, b):
                    free = [x for x in rest if x not in J]
                    for r, s in combinations(free, 2):
                        if a < k - 1 and b < n - k - 1:
                            lhs = c(I + (r,), J) + c(I, J + (s,))
                            rhs = c(I + (s,), J) + c(I, J + (r,))
                            kind = "a"
                        elif a == k - 1 and b < n - k - 1:
                            lhs, rhs, kind = c(I, J + (s,)), c(I, J + (r,)), "b"
                        elif a < k - 1 and b == n - k - 1:
                            lhs, rhs, kind = c(I + (r,), J), c(I + (s,), J), "c"
                        else:
                            continue
                        if lhs != rhs:
                            bad.append((kind, I, J, r, s))
    balanced = bool(is_weight(fan, w))
    return FaceRelationReport(not bad, balanced, bad)


__all__ = [
    "CycleClass", "MinkowskiWeight", "RelationMatrix", "WeightCheck", "FaceRelationReport",
    "relation_matrix", "chow_group", "betti_numbers", "weight_basis", "is_weight",
    "is_cycle_balanced", "degree_pairing", "divisor_to_weight", "weight_to_cartier",
    "cartier_from_values", "constant_weight", "weight_from_vector", "weight_vector",
    "hypersimplex_fan", "hypersimplex_face_count", "hypersimplex_cone", "verify_prop26",
    "FanError", "NotCompleteError", "orthogonal_lattice",
]
