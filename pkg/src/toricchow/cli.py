"""Command-line interface.

Every command except ``gen`` prints one JSON document: a run manifest
holding the command, input digests, seed, displacement vectors used and
the result.  ``gen`` prints a bare fan document.  Manifests are accepted
wherever a weight, cycle, fan or polytope file is expected.
Exit codes: 0 ok, 2 invalid input, 3 mathematical precondition violated,
4 no generic displacement vector found.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from typing import Any, Sequence

from . import __version__
from . import generators as gen
from .chow import (
    chow_group,
    is_weight,
    weight_basis,
)
from .fan import FanError, NotCompleteError, NotSmoothError, ToricMorphism
from .io import (
    FormatError,
    fan_from_dict,
    fan_to_dict,
    format_cone_key,
    format_number,
    graded_to_dict,
    load_json,
    polytope_from_dict,
    polytope_to_dict,
    weight_from_dict,
    cycle_from_dict,
)
from .polytope import count_lattice_points, normal_fan, polytope_from_divisor
from .product import GenericityExhausted, NotGenericError, cap, cup, pullback, torus_closure_class
from .todd import (
    CountMismatch,
    Integrator,
    count_via_todd,
    ehrhart_polynomial,
    todd_obstruction,
    todd_weight,
)

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_GENERICITY = 0, 2, 3, 4


class Run:
    """Collects manifest data while a command executes."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.inputs: dict[str, str] = {}
        self.displacements: list = []

    def load(self, path: str):
        with open(path, "rb") as fh:
            self.inputs[path] = hashlib.sha256(fh.read()).hexdigest()
        return _unwrap(load_json(path))

    def fan(self, path: str):
        return fan_from_dict(self.load(path))

    def manifest(self, result: Any) -> dict:
        a = self.args
        return {
            "command": a.argv,
            "inputs": self.inputs,
            "seed": a.seed,
            "displacement": a.displacement,
            "displacements_used": self.displacements,
            "version": __version__,
            "result": result,
        }


def _unwrap(doc):
    """Accept the output manifest of another command as input."""
    if isinstance(doc, dict) and "result" in doc and "version" in doc:
        doc = doc["result"]
        for key in ("weight", "cycle", "polytope"):
            if isinstance(doc, dict) and key in doc:
                return doc[key]
    return doc


def _ints(s: str) -> list[int]:
    try:
        return [int(x) for x in s.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise FormatError(f"expected comma-separated integers, got {s!r}") from None


def _matrix(s: str) -> list[list[int]]:
    """Rows separated by ';', entries by ','."""
    return [_ints(row) for row in s.split(";") if row.strip()]


def _v(args):
    return _ints(args.displacement) if args.displacement else "auto"


def _certs(run: Run, certs) -> list:
    out = [c.as_dict() for c in certs]
    run.displacements.extend(c["v"] for c in out)
    return out


# -- commands ----------------------------------------------------------------------

def cmd_validate(run: Run, a):
    fan = run.fan(a.fan)
    return {"valid": True, "rank": fan.n, "rays": len(fan.rays), "cones": len(fan.cones),
            "complete": fan.is_complete, "simplicial": fan.is_simplicial, "smooth": fan.is_smooth,
            "f_vector": [len(fan.cones_of_dim(d)) for d in range(fan.n + 1)]}


def cmd_betti(run: Run, a):
    fan = run.fan(a.fan)
    rows = []
    for k in range(fan.n + 1):
        g = chow_group(fan, k)
        row = {"k": k, "rank_A_k": g.rank, "torsion_A_k": list(g.torsion)}
        if fan.is_complete:
            row["rank_A^k"] = len(weight_basis(fan, k))
        rows.append(row)
    return {"complete": fan.is_complete, "table": rows}


def cmd_weights(run: Run, a):
    fan = run.fan(a.fan)
    if a.action == "basis":
        ks = [a.codim] if a.codim is not None else range(fan.n + 1)
        return {str(k): [graded_to_dict(w, fan) for w in weight_basis(fan, k)] for k in ks}
    w = weight_from_dict(fan, run.load(a.weight), rational=a.rational)
    chk = is_weight(fan, w)
    return {"balanced": chk.ok,
            "violations": [{"tau": sorted(t.rays), "u": list(u), "sum": format_number(s)}
                           for t, u, s in chk.violations]}


def cmd_cup(run: Run, a):
    fan = run.fan(a.fan)
    c = weight_from_dict(fan, run.load(a.weight1), rational=a.rational)
    ct = weight_from_dict(fan, run.load(a.weight2), rational=a.rational)
    certs = []
    w = cup(fan, c, ct, v=_v(a), seed=a.seed, certificates=certs)
    return {"weight": graded_to_dict(w, fan), "certificates": _certs(run, certs)}


def cmd_cap(run: Run, a):
    fan = run.fan(a.fan)
    c = weight_from_dict(fan, run.load(a.weight), rational=a.rational)
    z = cycle_from_dict(fan, run.load(a.cycle))
    certs = []
    out = cap(fan, c, z, v=_v(a), seed=a.seed, certificates=certs)
    return {"cycle": graded_to_dict(out), "certificates": _certs(run, certs)}


def cmd_pullback(run: Run, a):
    src, tgt = run.fan(a.source), run.fan(a.target)
    f = ToricMorphism(_matrix(a.map), src, tgt)
    c = weight_from_dict(tgt, run.load(a.weight), rational=a.rational)
    certs = []
    w = pullback(f, c, v=_v(a), seed=a.seed, certificates=certs)
    return {"weight": graded_to_dict(w, src), "certificates": _certs(run, certs)}


def cmd_closure(run: Run, a):
    fan = run.fan(a.fan)
    z, cert = torus_closure_class(fan, _matrix(a.lattice), v=_v(a), seed=a.seed)
    return {"cycle": graded_to_dict(z), "certificates": _certs(run, [cert])}


def cmd_todd(run: Run, a):
    fan = run.fan(a.fan)
    if a.action == "obstruction":
        o = todd_obstruction(fan)
        if o.obstructed:
            return {"status": "Obstructed", "cone": sorted(o.cone.rays),
                    "witness_rays": list(o.witness_rays), "determinant": o.determinant}
        return {"status": "ToddWeightExists"}
    integ = Integrator(fan, seed=a.seed)
    if a.action == "weight":
        return {str(i): graded_to_dict(w, fan) for i, w in enumerate(todd_weight(fan, integrator=integ))}
    phi = ehrhart_polynomial(fan, integrator=integ)
    if a.action == "ehrhart":
        return {"polynomial": str(phi),
                "terms": [{"exponent": list(e), "coefficient": format_number(c)}
                          for e, c in sorted(phi.terms.items())]}
    if a.a is None:
        raise FormatError("todd count needs --a")
    return {"a": _ints(a.a), "count": count_via_todd(fan, _ints(a.a), phi)}


def cmd_points(run: Run, a):
    P = polytope_from_dict(run.load(a.polytope))
    pts = P.lattice_points()
    out = {"count": len(pts)}
    if a.action == "list":
        out["points"] = [list(p) for p in pts]
    return out


def cmd_polytope(run: Run, a):
    if a.action == "normalfan":
        P = polytope_from_dict(run.load(a.input))
        return fan_to_dict(normal_fan(P))
    fan = run.fan(a.input)
    if a.a is None:
        raise FormatError("polytope divisor needs --a")
    D = polytope_from_divisor(fan, _ints(a.a))
    return {"polytope": polytope_to_dict(D.polytope), "in_K": D.in_K,
            "lattice_points": count_lattice_points(D.polytope)}


def cmd_gen(run: Run, a):
    name, params = a.name, a.params
    try:
        if name in ("hirzebruch", "example13"):
            fan = gen.GENERATORS[name](*(int(x) for x in params[:1]))
        elif name == "hypersimplex":
            if len(params) != 2:
                raise FormatError("gen hypersimplex needs K N")
            fan = gen.hypersimplex(int(params[0]), int(params[1]))
        elif name in gen.GENERATORS:
            fan = gen.GENERATORS[name]()
        else:
            raise FormatError(f"unknown generator {name!r}; choose from {sorted(gen.GENERATORS)}")
    except ValueError as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(str(e)) from None
    return fan_to_dict(fan)


COMMANDS = {
    "validate": cmd_validate, "betti": cmd_betti, "weights": cmd_weights, "cup": cmd_cup,
    "cap": cmd_cap, "pullback": cmd_pullback, "closure": cmd_closure, "todd": cmd_todd,
    "points": cmd_points, "polytope": cmd_polytope, "gen": cmd_gen,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for displacement sampling")
    common.add_argument("--displacement", help="comma-separated displacement vector in N")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="pretty", action="store_false", help="JSON output (default)")
    fmt.add_argument("--pretty", dest="pretty", action="store_true", help="human-readable output")
    common.add_argument("--rational", action="store_true", help="accept rational weight values")
    common.set_defaults(pretty=False)

    p = argparse.ArgumentParser(prog="toricchow", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check a fan file")
    s.add_argument("fan")
    s = sub.add_parser("betti", parents=[common], help="Chow groups and weight ranks")
    s.add_argument("fan")
    s = sub.add_parser("weights", parents=[common], help="weight bases and balancing checks")
    s.add_argument("action", choices=["basis", "check"])
    s.add_argument("fan")
    s.add_argument("weight", nargs="?")
    s.add_argument("--codim", type=int)
    s = sub.add_parser("cup", parents=[common], help="cup product of two weights")
    s.add_argument("fan")
    s.add_argument("weight1")
    s.add_argument("weight2")
    s = sub.add_parser("cap", parents=[common], help="cap a weight with a cycle")
    s.add_argument("fan")
    s.add_argument("weight")
    s.add_argument("cycle")
    s = sub.add_parser("pullback", parents=[common], help="pull a weight back along a lattice map")
    s.add_argument("--source", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--map", required=True, help="matrix rows separated by ';' (target x source)")
    s.add_argument("weight")
    s = sub.add_parser("closure", parents=[common], help="class of a subtorus closure")
    s.add_argument("fan")
    s.add_argument("--lattice", required=True, help="generators of L separated by ';'")
    s = sub.add_parser("todd", parents=[common], help="Todd weight, lattice-point polynomial")
    s.add_argument("action", choices=["weight", "ehrhart", "count", "obstruction"])
    s.add_argument("fan")
    s.add_argument("--a", help="divisor coefficients for `count`")
    s = sub.add_parser("points", parents=[common], help="lattice points of a polytope")
    s.add_argument("action", choices=["count", "list"])
    s.add_argument("polytope")
    s = sub.add_parser("polytope", parents=[common], help="normal fans and divisor polytopes")
    s.add_argument("action", choices=["normalfan", "divisor"])
    s.add_argument("input", help="polytope file (normalfan) or fan file (divisor)")
    s.add_argument("--a", help="divisor coefficients for `divisor`")
    s = sub.add_parser("gen", parents=[common], help="print a built-in fan")
    s.add_argument("name")
    s.add_argument("params", nargs="*")
    return p


def _pretty(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(_pretty(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_flat_str(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(f"{pad}- {_flat_str(v)}" if _flat(v) else f"{pad}-\n" + _pretty(v, indent + 1)
                         for v in obj)
    return f"{pad}{obj}"


def _flat(v) -> bool:
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) or (isinstance(x, list) and _flat(x)) for x in v)
    return not isinstance(v, dict)


def _flat_str(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_flat_str(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{}"
    return str(v)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    run = Run(args)
    try:
        result = COMMANDS[args.command](run, args)
    except (FormatError, FanError, OSError, KeyError) as e:
        return _fail(EXIT_INPUT, e)
    except (NotCompleteError, NotSmoothError, NotGenericError, CountMismatch) as e:
        return _fail(EXIT_PRECONDITION, e)
    except GenericityExhausted as e:
        return _fail(EXIT_GENERICITY, e)
    except ValueError as e:
        return _fail(EXIT_PRECONDITION, e)
    doc = result if args.command == "gen" else run.manifest(result)
    if args.pretty:
        print(_pretty(doc))
    else:
        print(json.dumps(doc, sort_keys=True, indent=2, default=_default))
    return EXIT_OK


def _default(x):
    if isinstance(x, Fraction):
        return format_number(x)
    if isinstance(x, frozenset):
        return format_cone_key(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _fail(code: int, err: Exception) -> int:
    print(f"error: {err}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
