"""Standard fans, polytopes and morphisms used as fixtures."""

from __future__ import annotations

from itertools import product

from .chow import hypersimplex_fan
from .fan import Fan, ToricMorphism, build_fan, rebase
from .polytope import LatticePolytope, normal_fan


def projective_line() -> Fan:
    return build_fan(1, [(1,), (-1,)], [[0], [1]])


def projective_plane() -> Fan:
    return build_fan(2, [(1, 0), (0, 1), (-1, -1)], [[0, 1], [1, 2], [2, 0]])


def projective_space(n: int) -> Fan:
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)] + [tuple([-1] * n)]
    cones = [[j for j in range(n + 1) if j != i] for i in range(n + 1)]
    return build_fan(n, rays, cones)


def product_of_lines(n: int) -> Fan:
    """(P^1)^n with rays e_1, -e_1, e_2, -e_2, ..."""
    rays = []
    for i in range(n):
        for s in (1, -1):
            rays.append(tuple(s * int(i == j) for j in range(n)))
    cones = [[2 * i + b for i, b in enumerate(bits)] for bits in product((0, 1), repeat=n)]
    return build_fan(n, rays, cones)


def hirzebruch(m: int) -> Fan:
    """Rays v1 = (1,0), v2 = (0,1), v3 = (-1,m), v4 = (0,-1)."""
    return build_fan(2, [(1, 0), (0, 1), (-1, m), (0, -1)], [[0, 1], [1, 2], [2, 3], [3, 0]])


def hypersimplex(k: int, n: int) -> Fan:
    return hypersimplex_fan(k, n)


CUBE_BASIS = [(2, 0, 0), (0, 2, 0), (1, 1, 1)]


def cube_fan(k: int | None = None) -> Fan:
    """Fan over the faces of the cube with vertices (+-1, +-1, +-1).

    It lives in the lattice {x = y = z mod 2}, rewritten in the basis
    (2,0,0), (0,2,0), (1,1,1).  With k, the generator (1,1,1) becomes
    (1,1,2k+1).
    """
    rays = [v for v in product((1, -1), repeat=3)]
    if k:
        rays[0] = (1, 1, 2 * k + 1)
    cones = [[i for i, v in enumerate(product((1, -1), repeat=3)) if v[a] == s]
             for a in range(3) for s in (1, -1)]
    return build_fan(3, rebase(rays, CUBE_BASIS), cones)


PYRAMID_VERTICES = [(0, 0, 1), (2, 1, -1), (1, -1, -1), (-3, -2, -1), (-1, 1, -1)]


def pyramid() -> LatticePolytope:
    return LatticePolytope.from_points(PYRAMID_VERTICES, 3)


def pyramid_fan() -> Fan:
    return normal_fan(pyramid())


def blown_up_plane() -> Fan:
    """P^2 with the cone (v1, v2) subdivided by (1, 1)."""
    return build_fan(2, [(1, 0), (0, 1), (-1, -1), (1, 1)], [[0, 3], [3, 1], [1, 2], [2, 0]])


def blowdown() -> ToricMorphism:
    return ToricMorphism([[1, 0], [0, 1]], blown_up_plane(), projective_plane())


def hirzebruch_projection(m: int) -> ToricMorphism:
    """F_m -> P^1, (x, y) -> x."""
    return ToricMorphism([[1, 0]], hirzebruch(m), projective_line())


def line_in_plane() -> ToricMorphism:
    """P^1 -> P^2 along the first coordinate axis (not dominant)."""
    return ToricMorphism([[1], [0]], projective_line(), projective_plane())


GENERATORS = {
    "p1": projective_line,
    "p2": projective_plane,
    "p1xp1": lambda: product_of_lines(2),
    "p1xp1xp1": lambda: product_of_lines(3),
    "hirzebruch": hirzebruch,
    "hypersimplex": hypersimplex,
    "example13": lambda k=0: cube_fan(k or None),
    "example56": pyramid_fan,
    "blowup": blown_up_plane,
}
