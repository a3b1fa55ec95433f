"""Command-line front end: every computation as a verb with JSON I/O.

Exit codes: 0 ok, 1 error, 2 inconclusive.  Output is a JSON envelope
{verb, status, payload, provenance}; with --json only the payload is
printed, which makes verbs composable through pipes.  The environment
variable MAX_ORDER_GUARD (default 3^10) caps exhaustive enumerations.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from typing import Any, Optional, Sequence

from . import __version__, serialize
from . import extensions as ext
from . import heisenberg as heis
from . import standardness as std
from . import symplectic as sym
from . import smith
from .errors import InvariantViolation, SympdualError
from .groups import FinAbGroup
from .prng import GENERATOR_NAME

VERBS = ("smith", "cokernel", "ext-group", "ext-dual", "ext-antidual",
         "ext-transform", "bipartite", "reduce-homogeneous", "decide-triple",
         "counterexample", "verify-counterexample", "standard-pair",
         "grow-isotropic", "subquotient", "peel", "standardize",
         "heis-commutator", "heis-split", "weyl-check")


@dataclass
class CommandResult:
    verb: str
    status: str  # ok | error | inconclusive
    payload: dict
    provenance: dict

    def to_json(self) -> dict:
        return {"verb": self.verb, "status": self.status,
                "payload": self.payload, "provenance": self.provenance}

    @property
    def exit_code(self) -> int:
        return {"ok": 0, "error": 1, "inconclusive": 2}[self.status]


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sympdual",
        description="exact calculus of symplectic self-dualities on finite "
                    "abelian p-groups")
    parser.add_argument("verb", choices=VERBS)
    parser.add_argument("--input", default=None,
                        help="JSON input file, or - for stdin")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=10_000)
    parser.add_argument("--budget", type=int, default=10_000)
    parser.add_argument("--json", action="store_true",
                        help="print only the payload (pipe-friendly)")
    parser.add_argument("--p", type=int, default=None)
    parser.add_argument("--s", type=int, default=None)
    parser.add_argument("--N", type=int, default=None)
    return parser


def _read_input(args) -> Any:
    if args.input is None:
        raise SympdualError("this verb needs --input FILE (or - for stdin)")
    raw = sys.stdin.read() if args.input == "-" else open(args.input).read()
    try:
        return json.loads(raw)
    except json.JSONDecodeError as err:
        raise SympdualError(f"malformed JSON input: {err}") from err


def _counterexample_args(args):
    if args.p is None or args.s is None or args.N is None:
        raise SympdualError("counterexample needs --p, --s and --N")
    return args.p, args.s, args.N


def _dispatch(args) -> dict:
    verb = args.verb
    if verb == "smith":
        data = _read_input(args)
        dec = smith.smith(serialize.decode_matrix(data["entries"]))
        return {"U": serialize.encode_matrix(dec.U),
                "D": serialize.encode_matrix(dec.D),
                "V": serialize.encode_matrix(dec.V),
                "diagonal": [serialize.encode_int(d) for d in dec.diagonal]}
    if verb == "cokernel":
        data = _read_input(args)
        factors = smith.cokernel_structure(serialize.decode_matrix(data["entries"]))
        return {"invariant_factors": [serialize.encode_int(d) for d in factors]}
    if verb == "ext-group":
        xi = serialize.extension_from_json(_read_input(args))
        group = ext.extension_group(xi)
        return {"p": group.p, "mu": list(group.profile.lambdas),
                "rank_formula": ext.rank_check(xi)}
    if verb == "ext-dual":
        xi = serialize.extension_from_json(_read_input(args))
        return serialize.extension_to_json(ext.dual_extension(xi))
    if verb == "ext-antidual":
        xi = serialize.extension_from_json(_read_input(args))
        return {"antidual": ext.is_antidual(xi), "autodual": ext.is_autodual(xi)}
    if verb == "ext-transform":
        data = _read_input(args)
        xi = serialize.extension_from_json(data["xi"])
        sigma = serialize.endo_from_json(data["sigma"], FinAbGroup(xi.profile))
        return serialize.extension_to_json(ext.transform(xi, sigma))
    if verb == "bipartite":
        xi = serialize.extension_from_json(_read_input(args))
        witness = std.is_bipartite(xi)
        payload = {"bipartite": witness is not None,
                   "partitions_checked": std.partition_count(xi.rank)}
        if xi.rank < 2:
            payload["reason"] = "rank < 2: no nonempty bipartition exists"
        if witness is not None:
            payload["S"] = list(witness.s_part)
            payload["T"] = list(witness.t_part)
        return payload
    if verb == "reduce-homogeneous":
        xi = serialize.extension_from_json(_read_input(args))
        red = std.reduce_homogeneous(xi)
        return {"sigma": serialize.hom_to_json(red.sigma),
                "reduced": serialize.extension_to_json(red.reduced),
                "S": list(red.witness.s_part), "T": list(red.witness.t_part)}
    if verb == "decide-triple":
        xi = serialize.extension_from_json(_read_input(args))
        outcome = std.decide_triple_standard_exhaustive(xi, args.budget)
        payload = {"verdict": outcome.verdict,
                   "candidates_checked": outcome.candidates_checked}
        if outcome.sigma is not None:
            payload["sigma"] = serialize.hom_to_json(outcome.sigma)
        if outcome.witness is not None:
            payload["S"] = list(outcome.witness.s_part)
            payload["T"] = list(outcome.witness.t_part)
        return payload
    if verb == "counterexample":
        p, s, big_n = _counterexample_args(args)
        return serialize.extension_to_json(std.counterexample_matrix(p, s, big_n))
    if verb == "verify-counterexample":
        if args.input is not None:
            xi = serialize.extension_from_json(_read_input(args))
        else:
            p, s, big_n = _counterexample_args(args)
            xi = std.counterexample_matrix(p, s, big_n)
        cert = std.verify_counterexample(xi, args.trials, args.seed)
        return cert.to_json()
    if verb == "standard-pair":
        data = _read_input(args)
        a = serialize.group_from_json(data)
        b = serialize.subgroup_from_json(data["B"], a) if "B" in data else None
        pair, m0 = sym.standard_pair(a, b)
        return {"pair": serialize.pair_to_json(pair),
                "M0": serialize.subgroup_to_json(m0)}
    if verb == "grow-isotropic":
        data = _read_input(args)
        pair = serialize.pair_from_json(data["pair"])
        seed_sub = serialize.subgroup_from_json(data.get("seed", []), pair.group)
        grown = sym.grow_maximal_isotropic(pair, seed_sub)
        return {"subgroup": serialize.subgroup_to_json(grown),
                "order": serialize.encode_int(grown.order)}
    if verb == "subquotient":
        data = _read_input(args)
        pair = serialize.pair_from_json(data["pair"])
        sub = serialize.subgroup_from_json(data["subgroup"], pair.group)
        return {"pair": serialize.pair_to_json(sym.subquotient(pair, sub))}
    if verb == "peel":
        data = _read_input(args)
        pair = serialize.pair_from_json(data["pair"])
        a_sub = serialize.subgroup_from_json(data["A"], pair.group)
        comp = serialize.subgroup_from_json(data["complement"], pair.group)
        dec = sym.peel(pair, a_sub, comp)
        return {"hyperbolic": serialize.pair_to_json(dec.hyperbolic),
                "residual": serialize.pair_to_json(dec.residual),
                "recombine": serialize.encode_matrix(dec.recombine.entries)}
    if verb == "standardize":
        data = _read_input(args)
        if "alpha" in data:
            xi = serialize.extension_from_json(data)
            pair = ext.symplectic_from_antidual(xi).pair
        else:
            pair = serialize.pair_from_json(data["pair"] if "pair" in data else data)
        result = sym.standardize_pair(pair)
        return {"A": serialize.group_to_json(result.base),
                "iso": serialize.encode_matrix(result.iso.entries),
                "certificate": [[u, v, serialize.encode_fraction(val)]
                                for (u, v, val) in result.evaluations]}
    if verb == "heis-commutator":
        psi = serialize.cocycle_from_json(_read_input(args))
        com = heis.commutator_form(psi)
        return {"numerators": serialize.encode_matrix(com.numerators),
                "nondegenerate": com.nondegenerate}
    if verb == "heis-split":
        data = _read_input(args)
        psi = serialize.cocycle_from_json(data["psi"])
        psi2 = serialize.cocycle_from_json(data["psi2"])
        a = heis.equivalence_splitting(psi, psi2)
        return {"a": [{"x": list(x), "value": serialize.encode_fraction(v)}
                      for x, v in sorted(a.items())]}
    if verb == "weyl-check":
        a = serialize.group_from_json(_read_input(args))
        checked = 0
        for u in a.elements():
            for chi in a.elements():
                for y in a.elements():
                    for lam in a.elements():
                        heis.weyl_compose(a, (u, chi), (y, lam), budget=args.budget)
                        checked += 1
        return {"pairs_checked": checked, "ok": True}
    raise SympdualError(f"unknown verb {args.verb!r}")


def run(argv: Sequence[str]) -> CommandResult:
    started = time.monotonic()
    try:
        args = _parser().parse_args(list(argv))
    except SystemExit as err:
        return CommandResult("(argparse)", "error",
                             {"error": f"bad arguments (exit {err.code})"},
                             {"version": __version__})
    provenance = {"seed": args.seed, "version": __version__,
                  "generator": GENERATOR_NAME,
                  "timing_ms": 0}
    try:
        payload = _dispatch(args)
        status = "ok"
        if args.verb == "decide-triple" and payload.get("verdict") == "inconclusive":
            status = "inconclusive"
    except InvariantViolation as err:
        payload = {"error": str(err), "invariant": err.invariant}
        status = "error"
    except (SympdualError, OSError, KeyError, ValueError) as err:
        payload = {"error": f"{type(err).__name__}: {err}"}
        status = "error"
    provenance["timing_ms"] = int((time.monotonic() - started) * 1000)
    return CommandResult(args.verb, status, payload, provenance)


def main(argv: Optional[Sequence[str]] = None) -> int:
    result = run(sys.argv[1:] if argv is None else argv)
    bare = "--json" in (sys.argv[1:] if argv is None else argv)
    doc = result.payload if bare else result.to_json()
    print(json.dumps(doc, sort_keys=True, separators=(",", ":")))
    return result.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
