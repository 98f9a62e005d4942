"""JSON formats for fans, weights, cycles and polytopes.

Integers may be JSON numbers or decimal strings; rationals are strings
"p/q".  Cone identifiers are sorted lists of 0-based ray indices, written
as JSON-encoded strings when used as object keys (e.g. "[0, 2]").
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .chow import CycleClass, MinkowskiWeight
from .fan import Fan, FanError, build_fan, rebase
from .polytope import LatticePolytope


class FormatError(ValueError):
    """Malformed input document."""


def parse_int(x) -> int:
    if isinstance(x, bool):
        raise FormatError(f"expected an integer, got {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return int(x.strip())
        except ValueError:
            pass
    raise FormatError(f"expected an integer, got {x!r}")


def parse_number(x, rational: bool = True) -> int | Fraction:
    if isinstance(x, bool):
        raise FormatError(f"expected a number, got {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            f = Fraction(x.strip())
        except ValueError:
            raise FormatError(f"expected an integer or p/q, got {x!r}") from None
        if f.denominator == 1:
            return int(f)
        if not rational:
            raise FormatError(f"rational value {x!r} needs --rational")
        return f
    raise FormatError(f"expected a number, got {x!r}")


def format_number(x) -> str:
    return str(Fraction(x))


def parse_cone_key(s) -> frozenset[int]:
    if isinstance(s, list):
        return frozenset(parse_int(i) for i in s)
    s = s.strip()
    if s.startswith("["):
        try:
            return frozenset(parse_int(i) for i in json.loads(s))
        except json.JSONDecodeError:
            raise FormatError(f"bad cone identifier {s!r}") from None
    if not s:
        return frozenset()
    return frozenset(parse_int(i) for i in s.split(","))


def format_cone_key(k) -> str:
    return json.dumps(sorted(k))


# -- fans -------------------------------------------------------------------

def fan_from_dict(doc: dict[str, Any], check: bool = True) -> Fan:
    try:
        n = parse_int(doc["rank"])
        rays = [[parse_int(x) for x in r] for r in doc["rays"]]
        cones = [[parse_int(i) for i in c] for c in doc["max_cones"]]
    except (KeyError, TypeError) as e:
        raise FormatError(f"fan document needs rank, rays, max_cones ({e})") from None
    if "rebase" in doc and doc["rebase"] is not None:
        basis = [[parse_int(x) for x in b] for b in doc["rebase"]]
        if len(basis) != n:
            raise FormatError("rebase basis must have `rank` vectors")
        rays = rebase(rays, basis)
    for r in rays:
        if len(r) != n:
            raise FormatError(f"ray {r} does not have length {n}")
    return build_fan(n, rays, cones, check=check)


def fan_to_dict(fan: Fan) -> dict[str, Any]:
    return {
        "rank": fan.n,
        "rays": [list(r) for r in fan.rays],
        "max_cones": [sorted(k) for k in fan.maximal],
    }


# -- weights and cycles ----------------------------------------------------------

def _values_from(doc) -> tuple[int | None, dict]:
    if not isinstance(doc, dict):
        raise FormatError("weight document must be a JSON object")
    if "values" in doc:
        codim = doc.get("codim")
        return (parse_int(codim) if codim is not None else None), doc["values"]
    codim = doc.get("codim")
    vals = {k: v for k, v in doc.items() if k != "codim"}
    return (parse_int(codim) if codim is not None else None), vals


def _infer_codim(fan: Fan, keys) -> int:
    for k in keys:
        if k not in fan.cones:
            raise FormatError(f"{sorted(k)} is not a cone of the fan")
    codims = {fan.cones[k].codim for k in keys if k in fan.cones}
    if len(codims) != 1:
        raise FormatError("cannot infer codimension; add a `codim` field")
    return codims.pop()


def _check_keys(fan: Fan, keys, codim: int) -> None:
    for k in keys:
        c = fan.cones.get(k)
        if c is None:
            raise FormatError(f"{sorted(k)} is not a cone of the fan")
        if c.codim != codim:
            raise FormatError(f"cone {sorted(k)} has codimension {c.codim}, expected {codim}")


def weight_from_dict(fan: Fan, doc, rational: bool = False) -> MinkowskiWeight:
    codim, vals = _values_from(doc)
    values = {parse_cone_key(k): parse_number(v, rational) for k, v in vals.items()}
    if codim is None:
        codim = _infer_codim(fan, values)
    _check_keys(fan, values, codim)
    return MinkowskiWeight(codim, values)


def cycle_from_dict(fan: Fan, doc) -> CycleClass:
    codim, vals = _values_from(doc)
    coeffs = {parse_cone_key(k): parse_number(v, rational=False) for k, v in vals.items()}
    if codim is None:
        codim = _infer_codim(fan, coeffs)
    _check_keys(fan, coeffs, codim)
    return CycleClass(codim, coeffs)


def graded_to_dict(w, fan: Fan | None = None) -> dict[str, Any]:
    """Serialize a weight or cycle; with ``fan`` every cone of the codimension is listed."""
    if fan is not None and isinstance(w, MinkowskiWeight):
        keys = [c.rays for c in fan.cones_of_codim(w.codim)]
    else:
        keys = [k for k, _ in w.items()]
    return {"codim": w.codim,
            "values": {format_cone_key(k): format_number(w[k]) for k in keys}}


# -- polytopes --------------------------------------------------------------------

def polytope_from_dict(doc) -> LatticePolytope:
    if "vertices" in doc:
        pts = [[parse_number(x) for x in v] for v in doc["vertices"]]
        n = parse_int(doc["rank"]) if "rank" in doc else (len(pts[0]) if pts else None)
        if n is None:
            raise FormatError("empty vertex list needs a `rank` field")
        return LatticePolytope.from_points(pts, n)
    if "facets" in doc:
        rows = []
        for f in doc["facets"]:
            rows.append(([parse_int(x) for x in f["normal"]], parse_number(f["offset"])))
        if not rows:
            raise FormatError("empty facet list")
        n = len(rows[0][0])
        return LatticePolytope.from_inequalities(n, rows)
    raise FormatError("polytope document needs `vertices` or `facets`")


def polytope_to_dict(P: LatticePolytope) -> dict[str, Any]:
    return {"rank": P.n, "vertices": [[format_number(x) for x in v] for v in P.vertices]}


def load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON ({e})") from None


__all__ = [
    "FormatError", "FanError", "fan_from_dict", "fan_to_dict", "weight_from_dict",
    "cycle_from_dict", "graded_to_dict", "polytope_from_dict", "polytope_to_dict",
    "load_json", "parse_cone_key", "format_cone_key", "parse_number", "format_number",
]
