import warnings
from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from toricchow import generators as gen
from toricchow.fan import (
    FanError, NotCompleteError, NotSmoothError, ToricMorphism, build_fan, delta_v_bruteforce,
    intersect_translated, is_generic,
)
from toricchow.lattice import invariant_factors, rank
from toricchow.polytope import LatticePolytope, normal_fan


def test_builder_rejects_bad_input():
    with pytest.raises(FanError, match="zero"):
        build_fan(2, [(0, 0), (1, 0)], [[0, 1]])
    with pytest.raises(FanError, match="line"):
        build_fan(2, [(1, 0), (-1, 0)], [[0, 1]])
    with pytest.raises(FanError, match="extreme"):
        build_fan(2, [(1, 0), (1, 1), (0, 1)], [[0, 1, 2]])
    with pytest.raises(FanError, match="not a fan"):
        build_fan(2, [(1, 0), (0, 1), (1, 1)], [[0, 1], [0, 2]])
    with pytest.raises(FanError, match="unknown"):
        build_fan(2, [(1, 0)], [[0, 3]])


def test_nonprimitive_ray_warns():
    with pytest.warns(UserWarning, match="not primitive"):
        f = build_fan(1, [(2,), (-1,)], [[0], [1]])
    assert f.rays[0] == (1,)


def test_properties_of_standard_fans(complete_fans):
    for name, f in complete_fans.items():
        assert f.is_complete, name
    assert complete_fans["p2"].is_smooth
    assert complete_fans["blowup"].is_smooth
    assert not complete_fans["x24"].is_simplicial
    assert not complete_fans["cube"].is_simplicial
    half = build_fan(2, [(1, 0), (0, 1)], [[0, 1]])
    assert not half.is_complete
    with pytest.raises(NotCompleteError):
        half.require_complete()
    with pytest.raises(NotSmoothError):
        complete_fans["x24"].require_smooth()


def test_face_counts(p2, x24):
    assert [len(p2.cones_of_dim(d)) for d in range(3)] == [1, 3, 3]
    assert [len(x24.cones_of_dim(d)) for d in range(4)] == [1, 8, 12, 6]
    assert [len(gen.cube_fan().cones_of_dim(d)) for d in range(4)] == [1, 8, 12, 6]


def test_n_sigma_tau_generates_quotient(complete_fans):
    for f in complete_fans.values():
        for sigma in f.cones.values():
            for tau in f.facets_of(sigma):
                w = f.n_sigma_tau(sigma, tau)
                assert sigma.contains(w)
                assert not tau.contains(w)
                gens = list(tau.sublattice_basis) + [w]
                cols = [[g[i] for g in gens] for i in range(f.n)]
                assert rank(cols) == sigma.dim
                assert invariant_factors(cols) == [1] * sigma.dim


def test_star_quotient_is_complete(complete_fans):
    for f in complete_fans.values():
        for gamma in f.cones.values():
            Q = f.star_quotient(gamma)
            assert Q.fan.n == gamma.codim
            assert Q.fan.is_complete
            assert len(Q.fan.cones) == len(f.star(gamma))
            for c in Q.fan.cones.values():
                assert gamma.rays <= Q.original(c)


def test_carrier_of_interior_points(complete_fans):
    for f in complete_fans.values():
        for c in f.cones.values():
            assert f.carrier(c.interior_point).rays == c.rays


small = st.tuples(st.integers(-4, 4), st.integers(-4, 4))


@given(small)
@settings(max_examples=80, deadline=None)
def test_intersection_is_symmetric(v):
    f = gen.hirzebruch(2)
    for s, t in product(f.cones.values(), repeat=2):
        a = intersect_translated(s, t, v)
        b = intersect_translated(t, s, tuple(-x for x in v))
        assert a.kind == b.kind
        if a.kind == "point":
            assert tuple(x - y for x, y in zip(a.point, v)) == b.point


@given(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)),
       st.tuples(st.integers(-7, 7), st.integers(-7, 7), st.integers(-7, 7)))
@settings(max_examples=60, deadline=None)
def test_delta_v_matches_bruteforce(ell, v):
    if not any(ell):
        return
    f = gen.projective_space(3)
    rep = is_generic(f, [ell], v)
    brute = {c.rays for c in delta_v_bruteforce(f, [ell], v)}
    if rep.generic:
        assert {c.rays for c, _ in rep.meeting} == brute
        assert all(c.dim == 2 for c, _ in rep.meeting)


def test_nongeneric_displacement_detected(p2):
    # the line through 0 along (1, 1) passes through the vertex
    assert not is_generic(p2, [(1, 1)], (0, 0)).generic
    assert not is_generic(p2, [(1, 0)], (0, 0)).generic
    assert is_generic(p2, [(1, 1)], (0, 1)).generic


def test_morphisms(p2):
    assert gen.blowdown().is_dominant
    assert not gen.line_in_plane().is_dominant
    with pytest.raises(FanError):
        ToricMorphism([[1, 0], [0, -1]], gen.hirzebruch(0), p2)
    ident = ToricMorphism.identity(p2)
    assert all(ident.image_cone(c).rays == c.rays for c in p2.cones.values())


def test_hypersimplex_fan_is_normal_fan():
    for k, n in [(2, 4), (2, 5)]:
        verts = [tuple(int(i in S) for i in range(n - 1)) for S in combinations(range(n), k)]
        nf = normal_fan(LatticePolytope.from_points(verts, n - 1))
        direct = gen.hypersimplex(k, n)
        as_sets = lambda f: {frozenset(f.rays[i] for i in m) for m in f.maximal}
        assert set(nf.rays) == set(direct.rays)
        assert as_sets(nf) == as_sets(direct)


def test_cube_fan_variants_rebased():
    f = gen.cube_fan()
    assert f.rays[0] == (0, 0, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for k in range(1, 4):
            assert gen.cube_fan(k).is_complete
