"""Exact intersection theory on toric varieties given by rational fans.

Modules: ``lattice`` (integer normal forms), ``fan`` (cones, fans,
morphisms), ``chow`` (Chow groups, Minkowski weights), ``product``
(cup, cap, pullback by cone displacement), ``polytope`` (lattice
polytopes, volume weights) and ``todd`` (Todd weights and lattice-point
polynomials).
"""

__version__ = "0.1.0"

from .chow import (  # noqa: E402
    CycleClass,
    MinkowskiWeight,
    betti_numbers,
    chow_group,
    degree_pairing,
    divisor_to_weight,
    hypersimplex_fan,
    is_weight,
    relation_matrix,
    verify_prop26,
    weight_basis,
    weight_to_cartier,
)
from .fan import Cone, Fan, ToricMorphism, build_fan, is_generic, star_quotient  # noqa: E402
from .product import cap, cup, diagonal_multiplicities, pullback, torus_closure_class  # noqa: E402
from .todd import ehrhart_polynomial, todd_class, todd_obstruction, todd_weight  # noqa: E402
