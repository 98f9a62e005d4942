"""Todd classes and lattice-point polynomials on smooth complete fans.

Cohomology classes are polynomials in one variable x_i per ray, reduced
by dropping every monomial whose support is not a cone.  Top-degree
monomials are integrated in two independent ways: by iterated cup
products of divisor weights, and by rewriting with linear relations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .chow import (
    MinkowskiWeight,
    cartier_from_values,
    constant_weight,
    divisor_to_weight,
)
from .fan import Cone, Fan, NotSmoothError
from .lattice import det, dot, rank, solve
from .polytope import count_lattice_points, polytope_from_divisor
from .product import cup

Exponent = tuple[int, ...]


def bernoulli_plus(k: int) -> list[Fraction]:
    """B_0..B_k with the B_1 = +1/2 convention."""
    B = [Fraction(1)]
    for m in range(1, k + 1):
        B.append(1 - sum(math.comb(m, j) * B[j] / (m - j + 1) for j in range(m)))
    return B


def todd_series(k: int) -> list[Fraction]:
    """Coefficients of x / (1 - e^{-x}) up to x^k."""
    return [b / math.factorial(j) for j, b in enumerate(bernoulli_plus(k))]


# -- polynomials ------------------------------------------------------------------

class QuotientPolynomial:
    """Polynomial in x_1..x_d modulo monomials whose support spans no cone.

    Terms above total degree n are truncated.
    """

    def __init__(self, fan: Fan, terms: Mapping[Exponent, object] = ()):
        self.fan = fan
        self.d = len(fan.rays)
        self.terms: dict[Exponent, Fraction] = {}
        for e, c in dict(terms).items():
            c = Fraction(c)
            if c and sum(e) <= fan.n and self._supported(e):
                self.terms[tuple(e)] = self.terms.get(tuple(e), 0) + c
        self.terms = {e: c for e, c in self.terms.items() if c}

    def _supported(self, e: Exponent) -> bool:
        return frozenset(i for i, x in enumerate(e) if x) in self.fan.cones

    @classmethod
    def one(cls, fan: Fan) -> "QuotientPolynomial":
        return cls(fan, {tuple([0] * len(fan.rays)): 1})

    @classmethod
    def variable(cls, fan: Fan, i: int) -> "QuotientPolynomial":
        return cls(fan, {tuple(int(j == i) for j in range(len(fan.rays))): 1})

    def __add__(self, other: "QuotientPolynomial") -> "QuotientPolynomial":
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return QuotientPolynomial(self.fan, terms)

    def __mul__(self, other) -> "QuotientPolynomial":
        if not isinstance(other, QuotientPolynomial):
            return QuotientPolynomial(self.fan, {e: c * Fraction(other) for e, c in self.terms.items()})
        terms: dict[Exponent, Fraction] = {}
        n = self.fan.n
        for e1, c1 in self.terms.items():
            s1 = sum(e1)
            for e2, c2 in other.terms.items():
                if s1 + sum(e2) > n:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return QuotientPolynomial(self.fan, terms)

    __rmul__ = __mul__

    def homogeneous(self, i: int) -> "QuotientPolynomial":
        return QuotientPolynomial(self.fan, {e: c for e, c in self.terms.items() if sum(e) == i})

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def __eq__(self, other) -> bool:
        return isinstance(other, QuotientPolynomial) and self.terms == other.terms

    def __repr__(self) -> str:
        return f"QuotientPolynomial({format_polynomial(self.terms, 'x')})"


class MultivariatePolynomial:
    """Polynomial with exact rational coefficients in a_1..a_d."""

    def __init__(self, d: int, terms: Mapping[Exponent, object] = ()):
        self.d = d
        self.terms = {tuple(e): Fraction(c) for e, c in dict(terms).items() if c}

    def __call__(self, a: Sequence) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            total += c * math.prod(Fraction(x) ** k for x, k in zip(a, e))
        return total

    evaluate = __call__

    def coefficient(self, e: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(e), Fraction(0))

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def __eq__(self, other) -> bool:
        return isinstance(other, MultivariatePolynomial) and self.terms == other.terms

    def __str__(self) -> str:
        return format_polynomial(self.terms, "a")

    def __repr__(self) -> str:
        return f"MultivariatePolynomial({self})"


def monomial_order(e: Exponent):
    """Canonical order: by total degree descending, then lexicographic descending."""
    return (-sum(e), tuple(-x for x in e))


def format_polynomial(terms: Mapping[Exponent, Fraction], var: str) -> str:
    if not terms:
        return "0"
    parts = []
    for e in sorted(terms, key=monomial_order):
        c = terms[e]
        mono = "*".join(f"{var}{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append("-" + mono)
        else:
            parts.append(f"{c}*{mono}")
    return " + ".join(parts).replace("+ -", "- ")


# -- integration --------------------------------------------------------------------

def _require_smooth_complete(fan: Fan) -> None:
    fan.require_complete()
    if not fan.is_smooth:
        raise NotSmoothError("Todd machinery needs a smooth complete fan")


def divisor_weight(fan: Fan, i: int) -> MinkowskiWeight:
    """Weight of D_i: Cartier data <u(rho), v_j> = delta_ij on each maximal cone."""
    _require_smooth_complete(fan)
    values = [int(j == i) for j in range(len(fan.rays))]
    return divisor_to_weight(fan, cartier_from_values(fan, values))


class Integrator:
    """Top-degree integrals of monomials on a smooth complete fan."""

    def __init__(self, fan: Fan, seed: int = 0):
        _require_smooth_complete(fan)
        self.fan = fan
        self.seed = seed
        self.d = len(fan.rays)
        self._div = [divisor_weight(fan, i) for i in range(self.d)]
        self._cup_cache: dict[tuple[int, ...], MinkowskiWeight] = {}
        self._sub_cache: dict[Exponent, Fraction] = {}

    # route A: iterated cup products of divisor weights
    def _product_weight(self, idx: tuple[int, ...]) -> MinkowskiWeight:
        if not idx:
            return constant_weight(self.fan, 0)
        w = self._cup_cache.get(idx)
        if w is None:
            w = cup(self.fan, self._product_weight(idx[:-1]), self._div[idx[-1]], seed=self.seed)
            self._cup_cache[idx] = w
        return w

    def by_cup(self, e: Exponent) -> Fraction:
        if sum(e) != self.fan.n:
            raise ValueError(f"monomial degree {sum(e)} != dimension {self.fan.n}")
        idx = tuple(i for i, k in enumerate(e) for _ in range(k))
        return Fraction(self._product_weight(idx)[self.fan.zero_cone])

    # route B: substitution with linear relations
    def by_relations(self, e: Exponent) -> Fraction:
        if sum(e) != self.fan.n:
            raise ValueError(f"monomial degree {sum(e)} != dimension {self.fan.n}")
        return self._reduce(tuple(e))

    def _reduce(self, e: Exponent) -> Fraction:
        hit = self._sub_cache.get(e)
        if hit is not None:
            return hit
        supp = frozenset(i for i, k in enumerate(e) if k)
        if supp not in self.fan.cones:
            val = Fraction(0)
        elif all(k <= 1 for k in e):
            val = Fraction(1)  # square-free, support is a maximal smooth cone
        else:
            i = next(j for j, k in enumerate(e) if k >= 2)
            others = sorted(supp - {i})
            A = [list(self.fan.rays[i])] + [list(self.fan.rays[j]) for j in others]
            u = solve(A, [1] + [0] * len(others))
            val = Fraction(0)
            base = list(e)
            base[i] -= 1
            for j in range(self.d):
                if j in supp:
                    continue
                c = dot(u, self.fan.rays[j])
                if c:
                    nxt = list(base)
                    nxt[j] += 1
                    val -= c * self._reduce(tuple(nxt))
        self._sub_cache[e] = val
        return val

    def integral(self, e: Exponent, route: str = "cup") -> Fraction:
        return self.by_cup(e) if route == "cup" else self.by_relations(e)

    def integrate(self, p: QuotientPolynomial, route: str = "cup") -> Fraction:
        return sum((c * self.integral(e, route) for e, c in p.terms.items() if sum(e) == self.fan.n),
                   Fraction(0))


def monomial_integral(fan: Fan, e: Sequence[int], route: str = "cup",
                      integrator: Integrator | None = None) -> Fraction:
    integ = integrator or Integrator(fan)
    return integ.integral(tuple(e), route)


def _cone_monomial(fan: Fan, sigma: Cone) -> QuotientPolynomial:
    return QuotientPolynomial(fan, {tuple(int(j in sigma.rays) for j in range(len(fan.rays))): 1})


def lemma52_weight(fan: Fan, p: QuotientPolynomial, codim: int | None = None, route: str = "cup",
                   integrator: Integrator | None = None) -> MinkowskiWeight:
    """sigma -> integral of p * prod_{v_j in sigma} x_j, for p homogeneous of degree i."""
    integ = integrator or Integrator(fan)
    degs = {sum(e) for e in p.terms}
    i = codim if codim is not None else (degs.pop() if len(degs) == 1 else 0)
    if any(sum(e) != i for e in p.terms):
        raise ValueError(f"polynomial is not homogeneous of degree {i}")
    out = {}
    for sigma in fan.cones_of_codim(i):
        out[sigma.rays] = integ.integrate(p * _cone_monomial(fan, sigma), route)
    return MinkowskiWeight(i, out)


def todd_class(fan: Fan) -> QuotientPolynomial:
    """prod_i x_i / (1 - e^{-x_i}), truncated above degree n."""
    _require_smooth_complete(fan)
    series = todd_series(fan.n)
    d = len(fan.rays)
    td = QuotientPolynomial.one(fan)
    for i in range(d):
        factor = QuotientPolynomial(fan, {tuple(k if j == i else 0 for j in range(d)): c
                                          for k, c in enumerate(series)})
        td = td * factor
    return td


def todd_weight(fan: Fan, route: str = "cup", integrator: Integrator | None = None) -> list[MinkowskiWeight]:
    """Codim-i components of the Todd weight, i = 0..n."""
    integ = integrator or Integrator(fan)
    td = todd_class(fan)
    return [lemma52_weight(fan, td.homogeneous(i), codim=i, route=route, integrator=integ)
            for i in range(fan.n + 1)]


def _exponents(d: int, total: int, allowed: Iterable[frozenset[int]]) -> list[Exponent]:
    """Exponent vectors of given total degree whose support lies in the allowed sets."""
    out = set()
    for supp in allowed:
        s = sorted(supp)
        if len(s) > total or (not s and total):
            continue
        for extra in _compositions(total - len(s), len(s)):
            e = [0] * d
            for j, x in zip(s, extra):
                e[j] = 1 + x
            out.add(tuple(e))
    return sorted(out)


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def ehrhart_polynomial(fan: Fan, route: str = "cup", integrator: Integrator | None = None
                       ) -> MultivariatePolynomial:
    """Phi(a) = sum_i (1/i!) integral of (sum a_j x_j)^i Td^{n-i}.

    The coefficient of a^alpha is (1/alpha!) * integral of x^alpha Td^{n-|alpha|}.
    """
    integ = integrator or Integrator(fan)
    td = todd_class(fan)
    d, n = len(fan.rays), fan.n
    parts = [td.homogeneous(i) for i in range(n + 1)]
    terms = {}
    supports = list(fan.cones)
    for k in range(n + 1):
        for alpha in _exponents(d, k, supports):
            mono = QuotientPolynomial(fan, {alpha: 1})
            val = integ.integrate(mono * parts[n - k], route)
            if val:
                terms[alpha] = val / math.prod(math.factorial(x) for x in alpha)
    return MultivariatePolynomial(d, terms)


@dataclass
class CoefficientReport:
    rows: list[tuple[Cone, Fraction, Fraction]] = field(default_factory=list)

    @property
    def all_equal(self) -> bool:
        return all(t == c for _, t, c in self.rows)

    @property
    def discrepancies(self):
        return [r for r in self.rows if r[1] != r[2]]


def coefficient_extraction_check(fan: Fan, integrator: Integrator | None = None,
                                 phi: MultivariatePolynomial | None = None,
                                 td: list[MinkowskiWeight] | None = None) -> CoefficientReport:
    """Compare Td(sigma) with the coefficient of prod_{v_j in sigma} a_j in Phi."""
    integ = integrator or Integrator(fan)
    phi = phi or ehrhart_polynomial(fan, integrator=integ)
    td = td or todd_weight(fan, integrator=integ)
    rep = CoefficientReport()
    for sigma in sorted(fan.cones.values(), key=lambda c: (c.dim, c.key)):
        e = tuple(int(j in sigma.rays) for j in range(len(fan.rays)))
        rep.rows.append((sigma, Fraction(td[sigma.codim][sigma]), phi.coefficient(e)))
    return rep


class CountMismatch(AssertionError):
    pass


def count_via_todd(fan: Fan, a: Sequence[int], phi: MultivariatePolynomial | None = None) -> int:
    """Phi(a), checked against a brute-force count of P_a."""
    D = polytope_from_divisor(fan, a)
    if not D.in_K:
        raise ValueError(f"a = {list(a)} is not in K(fan)")
    phi = phi or ehrhart_polynomial(fan)
    val = phi(a)
    brute = count_lattice_points(D.polytope)
    if val != brute:
        raise CountMismatch(f"Phi({list(a)}) = {val} but brute force gives {brute}")
    return brute


# -- obstruction ----------------------------------------------------------------------

@dataclass
class ToddObstruction:
    obstructed: bool
    cone: Cone | None = None
    witness_rays: tuple[int, ...] = ()
    determinant: int = 0
    cartier: dict | None = None

    def __bool__(self):
        return not self.obstructed


def todd_obstruction(fan: Fan) -> ToddObstruction:
    """Is sum D_i Q-Cartier?  Look for u(rho) with <u(rho), v_i> = 1 on each maximal cone.

    On failure the witness is n+1 rays of the cone whose rows [v_i | 1]
    have nonzero determinant (reported in absolute value; its sign depends
    on the row order).
    """
    fan.require_complete()
    sol = {}
    for k in fan.maximal:
        c = fan.cones[k]
        u = solve([list(g) for g in c.generators], [1] * len(c.generators))
        if u is None:
            rows = list(zip(c.key, c.generators))
            for sub in combinations(rows, fan.n + 1):
                M = [list(g) + [1] for _, g in sub]
                dt = det(M)
                if dt:
                    return ToddObstruction(True, c, tuple(i for i, _ in sub), abs(int(dt)))
            raise AssertionError("inconsistent system without a nonzero witness minor")  # pragma: no cover
        sol[k] = tuple(u)
    return ToddObstruction(False, cartier=sol)
