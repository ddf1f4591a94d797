"""JSON in and out: fields, codes, subspaces and exact values."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .code import MatrixCode, VectorCode, expand
from .errors import FieldError, InputError
from .gf import GF, ExtBasis, FieldCtx
from .subspace import Subspace


@dataclass
class LoadedCode:
    """A matrix code, plus the vector code it expands when one was given."""

    matrix: MatrixCode
    vector: VectorCode | None = None
    name: str = ""
    source: str = ""


def field_to_json(F: FieldCtx) -> dict:
    return {"p": F.p, "e": F.e, "modulus": list(F.modulus)}


def field_from_json(d) -> FieldCtx:
    try:
        return GF(int(d["p"]), int(d.get("e", 1)), d.get("modulus"))
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad field description {d!r}") from exc


def _ext_from_json(d) -> ExtBasis:
    base = field_from_json(d.get("base", {"p": 2}))
    m = int(d["m"])
    big = GF(base.p, base.e * m, d.get("modulus"))
    return ExtBasis(big, base, d.get("basis"))


def code_from_json(d, name: str = "") -> LoadedCode:
    kind = d.get("kind", "matrix")
    try:
        if kind == "matrix":
            F = field_from_json(d["field"])
            C = MatrixCode.from_matrices(F, int(d["n"]), int(d["m"]), d["generators"])
            return LoadedCode(C, None, d.get("name", name))
        if kind == "vector":
            ext = _ext_from_json(d)
            V = VectorCode(ext, d["generators"])
            if "n" in d and V.n != int(d["n"]):
                raise InputError(f"generators have length {V.n}, declared n = {d['n']}")
            return LoadedCode(expand(V), V, d.get("name", name))
    except KeyError as exc:
        raise InputError(f"code description is missing {exc}") from exc
    except FieldError as exc:
        raise InputError(str(exc)) from exc
    raise InputError(f"unknown code kind {kind!r}")


def code_to_json(C: MatrixCode | VectorCode) -> dict:
    if isinstance(C, VectorCode):
        big = C.ext.big
        return {
            "kind": "vector",
            "base": {"p": C.ext.base.p, "e": C.ext.base.e},
            "m": C.m,
            "modulus": list(big.modulus),
            "basis": list(C.ext.basis),
            "n": C.n,
            "generators": [list(r) for r in C.generator],
        }
    return {
        "kind": "matrix",
        "field": field_to_json(C.field),
        "n": C.n,
        "m": C.m,
        "generators": [[list(r) for r in X] for X in C.matrices()],
    }


def read_json(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def fixture_path(name: str):
    base = resources.files("qleak") / "fixtures"
    for cand in (name, name + ".json"):
        p = base / cand
        if p.is_file():
            return p
    return None


def load_code(path_or_name) -> LoadedCode:
    """Load a code file; bare names fall back to the bundled fixtures."""
    p = Path(path_or_name)
    if not p.is_file():
        fx = fixture_path(str(path_or_name))
        if fx is None:
            raise InputError(f"no such code file or fixture: {path_or_name}")
        p = fx
    d = read_json(p)
    out = code_from_json(d, p.stem)
    out.source = str(path_or_name)
    return out


def subspace_to_json(V: Subspace) -> dict:
    return {"n": V.n, "dim": V.dim, "basis": [list(r) for r in V.basis], "label": repr(V)}


def rational_json(x, unit: str = "logq") -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator, "unit": unit}


def to_jsonable(obj):
    """Recursively convert library values into plain JSON types."""
    from .leakage import Entropy

    if isinstance(obj, Subspace):
        return subspace_to_json(obj)
    if isinstance(obj, Entropy):
        return obj.to_json()
    if isinstance(obj, Fraction):
        return rational_json(obj, "rank")
    if isinstance(obj, (MatrixCode, VectorCode)):
        return code_to_json(obj)
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        items = list(obj)
        if all(isinstance(i, Subspace) for i in items):
            items.sort(key=Subspace.sort_key)
            return [to_jsonable(i) for i in items]
        return sorted((to_jsonable(i) for i in items), key=lambda v: json.dumps(v, sort_keys=True))
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(i) for i in obj]
    return obj


def subspace_from_json(d, F: FieldCtx) -> Subspace:
    from .subspace import span

    return span(d["basis"], int(d["n"]), F)
