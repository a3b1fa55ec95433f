"""JSON wire formats.

Integers whose magnitude exceeds 2^53 are serialized as decimal strings so
payloads survive JSON implementations with double-precision numbers; exact
rationals are serialized as "num/den" strings reduced into [0, 1).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Sequence

from .errors import SympdualError
from .extensions import ExtensionMatrix, canonicalize
from .groups import ExponentProfile, FinAbGroup, HomMatrix
from .heisenberg import Cocycle
from .symplectic import Subgroup, SymplecticForm, SymplecticPair

INT_STRING_BOUND = 2 ** 53


def encode_int(n: int) -> Any:
    return n if -INT_STRING_BOUND < n < INT_STRING_BOUND else str(n)


def decode_int(v: Any) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise SympdualError(f"expected an integer, got {v!r}")
    return int(v)


def encode_matrix(rows: Sequence[Sequence[int]]) -> list:
    return [[encode_int(v) for v in row] for row in rows]


def decode_matrix(rows: Any) -> list[list[int]]:
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise SympdualError("expected a list of rows")
    return [[decode_int(v) for v in row] for row in rows]


def encode_fraction(fr: Fraction) -> str:
    return f"{fr.numerator}/{fr.denominator}"


def decode_fraction(v: Any) -> Fraction:
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, int):
        return Fraction(v)
    raise SympdualError(f"expected a fraction string, got {v!r}")


def profile_to_json(profile: ExponentProfile) -> dict:
    return {"p": profile.p, "lambda": list(profile.lambdas)}


def profile_from_json(data: Any) -> ExponentProfile:
    _need_keys(data, ("p", "lambda"))
    return ExponentProfile(decode_int(data["p"]),
                           tuple(decode_int(v) for v in data["lambda"]))


def group_to_json(group: FinAbGroup) -> dict:
    return profile_to_json(group.profile)


def group_from_json(data: Any) -> FinAbGroup:
    return FinAbGroup(profile_from_json(data))


def extension_to_json(xi: ExtensionMatrix) -> dict:
    out = profile_to_json(xi.profile)
    out["alpha"] = encode_matrix(xi.alpha)
    return out


def extension_from_json(data: Any) -> ExtensionMatrix:
    _need_keys(data, ("p", "lambda", "alpha"))
    return canonicalize(decode_matrix(data["alpha"]), profile_from_json(data))


def hom_to_json(h: HomMatrix) -> dict:
    out = profile_to_json(h.source.profile)
    out["entries"] = encode_matrix(h.entries)
    return out


def endo_from_json(data: Any, group: FinAbGroup) -> HomMatrix:
    return HomMatrix.make(group, group, decode_matrix(data))


def form_to_json(form: SymplecticForm) -> dict:
    return {"group": group_to_json(form.group),
            "numerators": encode_matrix(form.numerators)}


def pair_to_json(pair: SymplecticPair) -> dict:
    return form_to_json(pair.form)


def pair_from_json(data: Any) -> SymplecticPair:
    _need_keys(data, ("group", "numerators"))
    group = group_from_json(data["group"])
    form = SymplecticForm(group, tuple(tuple(r) for r in
                                       decode_matrix(data["numerators"])))
    return SymplecticPair(group, form)


def subgroup_to_json(sub: Subgroup) -> dict:
    return {"generators": encode_matrix(sub.generators)}


def subgroup_from_json(data: Any, ambient: FinAbGroup) -> Subgroup:
    if isinstance(data, dict):
        _need_keys(data, ("generators",))
        data = data["generators"]
    return Subgroup.from_generators(ambient, decode_matrix(data))


def cocycle_to_json(psi: Cocycle) -> dict:
    out = {"group": group_to_json(psi.group)}
    if psi.is_bilinear:
        out["numerators"] = encode_matrix(psi.numerators)
    else:
        out["table"] = [{"x": list(x), "y": list(y),
                         "value": encode_fraction(v)}
                        for (x, y), v in sorted(psi.table.items())]
    return out


def cocycle_from_json(data: Any) -> Cocycle:
    _need_keys(data, ("group",))
    group = group_from_json(data["group"])
    if "numerators" in data:
        return Cocycle.bilinear(group, decode_matrix(data["numerators"]))
    if "table" in data:
        table = {(tuple(decode_int(v) for v in entry["x"]),
                  tuple(decode_int(v) for v in entry["y"])):
                 decode_fraction(entry["value"])
                 for entry in data["table"]}
        return Cocycle.from_table(group, table)
    raise SympdualError("cocycle JSON needs 'numerators' or 'table'")


def _need_keys(data: Any, keys: Sequence[str]) -> None:
    if not isinstance(data, dict):
        raise SympdualError(f"expected a JSON object with keys {list(keys)}")
    missing = [k for k in keys if k not in data]
    if missing:
        raise SympdualError(f"missing JSON keys: {missing}")
