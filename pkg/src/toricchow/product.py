"""Cup, cap and pullback products by displacing cones.

Every product is assembled from pairs (sigma, tau) of cones such that the
image of sigma meets tau + v for a generic lattice vector v, weighted by
the lattice index [N : N_sigma + N_tau].  The computation for a cone
gamma runs in the quotient lattice N / N_gamma on the star of gamma.
"""

from __future__ import annotations

import logging
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence, Union

from ._polyhedra import in_cone
from .chow import CycleClass, MinkowskiWeight, check_support
from .fan import (
    Cone,
    Fan,
    StarQuotient,
    ToricMorphism,
    is_generic,
    sample_vector,
    star_quotient,
)
from .lattice import lattice_index, matmul, matvec, rank, saturate, solve

log = logging.getLogger(__name__)

MAX_ATTEMPTS = 64
INITIAL_BOUND = 3

Displacement = Union[str, Sequence[int], None]


class NotGenericError(ValueError):
    """The displacement vector is not generic."""


class GenericityExhausted(RuntimeError):
    """No generic displacement vector was found within the retry budget."""


@dataclass(frozen=True)
class DisplacementPair:
    sigma: Cone
    tau: Cone
    point: tuple[Fraction, ...]
    multiplicity: int


@dataclass
class DisplacementCertificate:
    """The pairs contributing at gamma, with the vector v used (quotient coordinates)."""

    gamma: Cone
    v: tuple[int, ...]
    pairs: list[DisplacementPair] = field(default_factory=list)
    attempts: int = 1

    def as_dict(self) -> dict:
        return {
            "gamma": list(self.gamma.key),
            "v": list(self.v),
            "attempts": self.attempts,
            "pairs": [
                {"sigma": list(p.sigma.key), "tau": list(p.tau.key),
                 "point": [str(x) for x in p.point], "multiplicity": p.multiplicity}
                for p in self.pairs
            ],
        }


# -- the displacement engine --------------------------------------------------

class _Scanner:
    """Pairs (s, t) of a source fan and a target fan with psi(s) meeting t + v."""

    def __init__(self, source: Fan, target: Fan, psi: Sequence[Sequence[int]]):
        self.source, self.target, self.m = source, target, target.n
        self.src = []
        for s in sorted(source.cones.values(), key=lambda c: (c.dim, c.key)):
            gens = [tuple(matvec(psi, g)) for g in s.generators] if self.m else []
            basis = [tuple(matvec(psi, b)) for b in s.sublattice_basis] if self.m else []
            self.src.append((s, gens, basis))
        self.tgt = sorted(target.cones.values(), key=lambda c: (c.dim, c.key))

    def generic(self, v: Sequence[int]) -> bool:
        """v avoids psi(s) - t whenever dim s + dim t < m."""
        m = self.m
        for s, gens, _ in self.src:
            for t in self.tgt:
                if s.dim + t.dim >= m:
                    continue
                img = [g for g in gens if any(g)]
                span = img + list(t.generators)
                if not span:
                    if not any(v):
                        return False
                    continue
                if rank(span + [tuple(v)]) != rank(span):
                    continue
                if in_cone(v, img + [tuple(-x for x in g) for g in t.generators], m):
                    return False
        return True

    def pairs(self, v: Sequence[int], want: Callable[[Cone, Cone], bool]) -> list[DisplacementPair]:
        m = self.m
        out = []
        for s, gens, basis in self.src:
            for t in self.tgt:
                if s.dim + t.dim != m or not want(s, t):
                    continue
                lat = list(basis) + list(t.sublattice_basis)
                if m == 0:
                    out.append(DisplacementPair(s, t, (), 1))
                    continue
                if rank(lat) < m:
                    continue
                coeffs = solve([[b[i] for b in lat] for i in range(m)], list(v))
                x = [sum(coeffs[j] * basis[j][i] for j in range(len(basis))) for i in range(m)]
                if not in_cone(x, gens, m):
                    continue
                y = [a - b for a, b in zip(x, v)]
                if not t.contains(y):
                    continue
                idx = lattice_index(m, lat)
                if not isinstance(idx, int):  # pragma: no cover - excluded by genericity
                    raise NotGenericError("non-transverse pair in certificate")
                out.append(DisplacementPair(s, t, tuple(x), idx))
        return out


def _rng(seed: int, tag) -> random.Random:
    return random.Random(f"{seed}:{tag}")


def _choose_v(scanner: _Scanner, v: Displacement, project, seed: int, tag) -> tuple[tuple[int, ...], int]:
    """Return (v in the scanner's coordinates, number of attempts)."""
    if v is not None and v != "auto":
        w = tuple(int(x) for x in project(v))
        if not scanner.generic(w):
            raise NotGenericError(f"displacement {list(v)} is not generic here (projected: {list(w)})")
        return w, 1
    rng = _rng(seed, tag)
    bound = INITIAL_BOUND
    for attempt in range(1, MAX_ATTEMPTS + 1):
        w = sample_vector(rng, scanner.m, bound)
        if scanner.generic(w):
            return w, attempt
        log.debug("displacement %s not generic, retrying", w)
        bound *= 2
    raise GenericityExhausted(f"no generic displacement vector after {MAX_ATTEMPTS} attempts")


# -- diagonal --------------------------------------------------------------

def diagonal_multiplicities(fan: Fan, gamma: Cone, v: Displacement = "auto", seed: int = 0,
                            codims: tuple[int, int] | None = None,
                            quotient: StarQuotient | None = None) -> DisplacementCertificate:
    """Pairs (sigma, tau) containing gamma with sigma meeting tau + v.

    ``codims`` restricts to codim sigma = p, codim tau = q.  A user-given
    v is in N coordinates and is projected to N / N_gamma.
    """
    fan.require_complete()
    Q = quotient or star_quotient(fan, gamma)
    qf = Q.fan
    scanner = _Scanner(qf, qf, [[int(i == j) for j in range(qf.n)] for i in range(qf.n)])
    w, attempts = _choose_v(scanner, v, Q.project, seed, sorted(gamma.rays))
    if codims is None:
        want = lambda s, t: True
    else:
        p, q = codims
        want = lambda s, t: s.codim == p and t.codim == q
    pairs = [DisplacementPair(fan.cones[Q.original(p.sigma)], fan.cones[Q.original(p.tau)],
                              p.point, p.multiplicity) for p in scanner.pairs(w, want)]
    return DisplacementCertificate(gamma, w, pairs, attempts)


def cup(fan: Fan, c: MinkowskiWeight, ct: MinkowskiWeight, v: Displacement = "auto",
        seed: int = 0, certificates: list | None = None) -> MinkowskiWeight:
    """(c cup ct)(gamma) = sum of m * c(sigma) * ct(tau) over the displaced pairs."""
    fan.require_complete()
    check_support(fan, c)
    check_support(fan, ct)
    p, q = c.codim, ct.codim
    if p + q > fan.n:
        raise ValueError(f"codimensions {p} + {q} exceed dimension {fan.n}")
    out = {}
    for gamma in fan.cones_of_codim(p + q):
        cert = diagonal_multiplicities(fan, gamma, v, seed, codims=(p, q))
        if certificates is not None:
            certificates.append(cert)
        out[gamma.rays] = sum(pr.multiplicity * c[pr.sigma] * ct[pr.tau] for pr in cert.pairs)
    return MinkowskiWeight(p + q, out)


def cap(fan: Fan, c: MinkowskiWeight, z: CycleClass, v: Displacement = "auto",
        seed: int = 0, certificates: list | None = None) -> CycleClass:
    """c cap [V(gamma)] = sum of m * c(sigma) [V(tau)], extended linearly in z."""
    fan.require_complete()
    check_support(fan, c)
    check_support(fan, z)
    p, k = c.codim, z.codim
    if p > k:
        raise ValueError(f"cannot cap a codim-{p} weight with a {k}-dimensional cycle")
    out: dict = {}
    for key, coeff in z.items():
        gamma = fan.cones[key]
        cert = diagonal_multiplicities(fan, gamma, v, seed, codims=(p, k - p))
        if certificates is not None:
            certificates.append(cert)
        for pr in cert.pairs:
            out[pr.tau.rays] = out.get(pr.tau.rays, 0) + coeff * pr.multiplicity * c[pr.sigma]
    return CycleClass(k - p, out)


def degree(z: CycleClass) -> int | Fraction:
    """Degree of a zero-dimensional cycle."""
    if z.codim != 0:
        raise ValueError("degree is defined on zero-dimensional cycles (codim-0 cones)")
    return sum(z.values.values())


# -- torus closures ------------------------------------------------------------

def torus_closure_class(fan: Fan, L: Sequence[Sequence[int]], v: Displacement = "auto",
                        seed: int = 0) -> tuple[CycleClass, DisplacementCertificate]:
    """Class of the closure of the subtorus of L, as a combination of V(sigma).

    The cones sigma that L_R + v meets in one point all have dimension
    n - rank L, so the result lives on codim-(rank L) cones.
    """
    n = fan.n
    L = [tuple(int(x) for x in g) for g in L if any(g)]
    d = rank(L) if L else 0
    sat = saturate(L, n) if L else []
    if L and _index_in(L, sat) != 1:
        warnings.warn("sublattice L is not saturated; using its saturation", stacklevel=2)
    L = sat
    if v is not None and v != "auto":
        w = tuple(int(x) for x in v)
        rep = is_generic(fan, L, w)
        if not rep.generic:
            raise NotGenericError(f"displacement {list(w)} is not generic for L")
        attempts = 1
    else:
        rng = _rng(seed, ("closure", tuple(L)))
        bound = INITIAL_BOUND
        for attempts in range(1, MAX_ATTEMPTS + 1):
            w = sample_vector(rng, n, bound)
            rep = is_generic(fan, L, w)
            if rep.generic:
                break
            bound *= 2
        else:
            raise GenericityExhausted(f"no generic displacement vector after {MAX_ATTEMPTS} attempts")
    coeffs, pairs = {}, []
    for sigma, pt in rep.meeting:
        m = lattice_index(n, list(L) + list(sigma.sublattice_basis))
        coeffs[sigma.rays] = m
        pairs.append(DisplacementPair(sigma, fan.zero_cone, pt, m))
    return CycleClass(d, coeffs), DisplacementCertificate(fan.zero_cone, w, pairs, attempts)


def _index_in(L, sat) -> int:
    """[sat : L] for L inside its saturation."""
    if not L:
        return 1
    coords = []
    B = [[b[i] for b in sat] for i in range(len(sat[0]))]
    for g in L:
        coords.append([int(x) for x in solve(B, list(g))])
    return lattice_index(len(sat), coords)


# -- graphs and pullbacks --------------------------------------------------------

def _induced_map(f: ToricMorphism, Qs: StarQuotient, Qt: StarQuotient) -> list[list[int]]:
    """psi on N'/N'_gamma' -> N/N_gamma in quotient coordinates."""
    return matmul(matmul(Qt.projection, f.psi), Qs.section)


def graph_multiplicities(f: ToricMorphism, gamma_src: Cone, v: Displacement = "auto",
                         seed: int = 0, codims: tuple[int, int] | None = None
                         ) -> DisplacementCertificate:
    """Pairs (sigma', tau) with psi(sigma') meeting tau + v, index [N : psi(N_sigma') + N_tau].

    sigma' runs over cones of the source containing gamma', tau over cones
    of the target containing the smallest cone gamma containing psi(gamma').
    A user-given v is in target N coordinates.
    """
    f.source.require_complete()
    f.target.require_complete()
    gamma = f.image_cone(gamma_src)
    Qs = star_quotient(f.source, gamma_src)
    Qt = star_quotient(f.target, gamma)
    psi_bar = _induced_map(f, Qs, Qt)
    scanner = _Scanner(Qs.fan, Qt.fan, psi_bar)
    w, attempts = _choose_v(scanner, v, Qt.project, seed, ("graph", sorted(gamma_src.rays)))
    if codims is None:
        want = lambda s, t: True
    else:
        p, q = codims
        want = lambda s, t: s.codim == p and t.codim == q
    pairs = [DisplacementPair(f.source.cones[Qs.original(p.sigma)], f.target.cones[Qt.original(p.tau)],
                              p.point, p.multiplicity) for p in scanner.pairs(w, want)]
    return DisplacementCertificate(gamma_src, w, pairs, attempts)


def pullback(f: ToricMorphism, c: MinkowskiWeight, v: Displacement = "auto", seed: int = 0,
             certificates: list | None = None) -> MinkowskiWeight:
    """(f^* c)(gamma') = sum of m * c(tau) over pairs with sigma' maximal, codim tau = k."""
    check_support(f.target, c)
    k = c.codim
    out = {}
    for g in f.source.cones_of_codim(k):
        cert = graph_multiplicities(f, g, v, seed, codims=(0, k))
        if certificates is not None:
            certificates.append(cert)
        out[g.rays] = sum(pr.multiplicity * c[pr.tau] for pr in cert.pairs)
    return MinkowskiWeight(k, out)


def pullback_dominant(f: ToricMorphism, c: MinkowskiWeight) -> MinkowskiWeight:
    """Closed form for dominant maps: c(tau) [N : psi(N') + N_tau] when codim tau = k."""
    if not f.is_dominant:
        raise ValueError("closed form needs a dominant morphism")
    n = f.target.n
    image = [tuple(row[j] for row in f.psi) for j in range(f.source.n)]
    out = {}
    for g in f.source.cones_of_codim(c.codim):
        tau = f.image_cone(g)
        if tau.codim == c.codim:
            out[g.rays] = c[tau] * lattice_index(n, image + list(tau.sublattice_basis))
        else:
            out[g.rays] = 0
    return MinkowskiWeight(c.codim, out)
