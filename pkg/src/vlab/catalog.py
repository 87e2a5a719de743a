"""Catalog files: JSON lists of Lie algebras, given explicitly or by builder.

Schema 1::

    {"schema": 1,
     "algebras": [
        {"name": "heisenberg", "dim": 3, "basis": ["x", "y", "z"],
         "brackets": [{"i": 0, "j": 1, "terms": [{"k": 2, "coeff": "1"}]}],
         "matrix_rep": [[["0", "1", "0"], ...], ...]},
        {"name": "sl2", "builder": {"kind": "sl", "params": {"n": 2}}},
        ...]}

Coefficients are exact rationals written ``"num/den"``. ``pmap_override``
maps a prime (as a string key) to a ``dim x dim`` table of images.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import lie
from .lie import LieAlgebra, LieError
from .scalar import format_rational, parse_rational

SCHEMA = 1
BUILDERS = ("takiff", "semidirect", "sl", "heisenberg", "abelian", "remark_solvable")


class ParseError(ValueError):
    def __init__(self, where: str, reason: str):
        super().__init__(f"{where}: {reason}")
        self.where = where
        self.reason = reason


class ValidationError(ValueError):
    def __init__(self, entry: str, reason: str):
        super().__init__(f"entry {entry!r}: {reason}")
        self.entry = entry
        self.reason = reason


@dataclass
class CatalogEntry:
    name: str
    algebra: LieAlgebra
    brackets: list | None = None
    basis: list | None = None
    matrix_rep: list | None = None
    builder: dict | None = None
    pmap_override: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def override_for(self, p: int):
        return self.pmap_override.get(p)


def bundled_catalog_path() -> Path:
    return Path(str(resources.files("vlab") / "data" / "catalog.json"))


def _rational(value, where):
    try:
        return parse_rational(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ParseError(where, str(exc)) from None


def _int(value, where):
    if not isinstance(value, int) or isinstance(value, bool):
        raise ParseError(where, f"expected an integer, got {value!r}")
    return value


def _build(spec: dict, where: str) -> LieAlgebra:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ParseError(where, "builder needs a 'kind'")
    kind = spec["kind"]
    params = spec.get("params", {})
    if kind not in BUILDERS:
        raise ParseError(f"{where}.kind", f"unknown builder {kind!r}")
    if not isinstance(params, dict):
        raise ParseError(f"{where}.params", "expected an object")
    if kind == "sl":
        return lie.sl(_int(params.get("n"), f"{where}.params.n"))
    if kind == "heisenberg":
        return lie.heisenberg()
    if kind == "abelian":
        return lie.abelian(_int(params.get("n"), f"{where}.params.n"))
    if kind == "remark_solvable":
        return lie.remark_solvable(_int(params.get("n"), f"{where}.params.n"),
                                   _int(params.get("m"), f"{where}.params.m"))
    base = _build(params.get("base"), f"{where}.params.base")
    if kind == "takiff":
        ms = params.get("ms")
        if not isinstance(ms, list):
            raise ParseError(f"{where}.params.ms", "expected a list of truncation orders")
        return lie.takiff(base, [_int(m, f"{where}.params.ms") for m in ms])
    rep = params.get("rep", "std")
    if rep != "std":
        rep = [[[_rational(v, f"{where}.params.rep") for v in row] for row in m] for m in rep]
    return lie.semidirect(base, rep)


def parse_entry(raw: dict, pos: int = 0) -> CatalogEntry:
    where = f"algebras[{pos}]"
    if not isinstance(raw, dict):
        raise ParseError(where, "expected an object")
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise ParseError(f"{where}.name", "missing or empty")
    has_b, has_builder = "brackets" in raw, "builder" in raw
    if has_b == has_builder:
        raise ValidationError(name, "exactly one of 'brackets' or 'builder' must be present")
    try:
        if has_builder:
            L = _build(raw["builder"], f"{where}.builder")
            L = LieAlgebra(name, L.basis, L.brackets, L.matrix_rep)
            entry = CatalogEntry(name, L, builder=raw["builder"])
        else:
            basis = raw.get("basis")
            if not isinstance(basis, list) or not all(isinstance(b, str) for b in basis):
                raise ParseError(f"{where}.basis", "expected a list of labels")
            dim = raw.get("dim", len(basis))
            if dim != len(basis):
                raise ValidationError(name, f"dim {dim} does not match {len(basis)} basis labels")
            brackets = {}
            for t, br in enumerate(raw["brackets"]):
                bw = f"{where}.brackets[{t}]"
                i, j = _int(br.get("i"), f"{bw}.i"), _int(br.get("j"), f"{bw}.j")
                if not (0 <= i < dim and 0 <= j < dim):
                    raise ValidationError(name, f"bracket index out of range in {bw}")
                terms = {}
                for s, term in enumerate(br.get("terms", [])):
                    k = _int(term.get("k"), f"{bw}.terms[{s}].k")
                    if not 0 <= k < dim:
                        raise ValidationError(name, f"target index {k} out of range in {bw}")
                    terms[k] = terms.get(k, 0) + _rational(term.get("coeff"), f"{bw}.terms[{s}].coeff")
                if (i, j) in brackets or (j, i) in brackets:
                    raise ValidationError(name, f"bracket ({i}, {j}) given twice")
                brackets[(i, j)] = terms
            rep = raw.get("matrix_rep")
            if rep is not None:
                rep = [[[_rational(v, f"{where}.matrix_rep") for v in row] for row in m] for m in rep]
            L = lie.make_algebra(name, basis, brackets, rep)
            entry = CatalogEntry(name, L, brackets=raw["brackets"], basis=basis, matrix_rep=raw.get("matrix_rep"))
    except LieError as exc:
        raise ValidationError(name, str(exc)) from None
    for key, table in (raw.get("pmap_override") or {}).items():
        try:
            p = int(key)
        except ValueError:
            raise ParseError(f"{where}.pmap_override", f"prime key {key!r} is not an integer") from None
        rows = [[_rational(v, f"{where}.pmap_override.{key}") for v in row] for row in table]
        if len(rows) != entry.dim or any(len(r) != entry.dim for r in rows):
            raise ValidationError(name, f"p-map override for {p} must be {entry.dim} x {entry.dim}")
        entry.pmap_override[p] = rows
    return entry


def parse_catalog(text: str, source: str = "<catalog>") -> list[CatalogEntry]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}", exc.msg) from None
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise ParseError(f"{source}.schema", f"expected schema {SCHEMA}")
    algebras = doc.get("algebras")
    if not isinstance(algebras, list):
        raise ParseError(f"{source}.algebras", "expected a list")
    entries = [parse_entry(raw, pos) for pos, raw in enumerate(algebras)]
    names = [e.name for e in entries]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise ValidationError(dupes[0], "duplicate name")
    return entries


def load_catalog(path=None) -> list[CatalogEntry]:
    path = Path(path) if path is not None else bundled_catalog_path()
    return parse_catalog(path.read_text(encoding="utf-8"), str(path))


def find(entries, name: str) -> CatalogEntry:
    for e in entries:
        if e.name == name:
            return e
    raise KeyError(f"no algebra named {name!r}; known: {', '.join(e.name for e in entries)}")


# ---------------------------------------------------------------- serialization

def _fmt(x) -> str:
    return format_rational(parse_rational(x) if not isinstance(x, Fraction) else x)


def serialize(entry: CatalogEntry) -> dict:
    """Canonical JSON form of a parsed entry."""
    out: dict = {"name": entry.name}
    if entry.builder is not None:
        out["builder"] = _normalize_builder(entry.builder)
    else:
        L = entry.algebra
        out["dim"] = L.dim
        out["basis"] = list(L.basis)
        out["brackets"] = [
            {"i": i, "j": j, "terms": [{"k": k, "coeff": format_rational(c)} for k, c in terms]}
            for (i, j), terms in sorted(L.brackets.items())
        ]
        if L.matrix_rep is not None:
            out["matrix_rep"] = [[[format_rational(v) for v in row] for row in m] for m in L.matrix_rep]
    if entry.pmap_override:
        out["pmap_override"] = {str(p): [[_fmt(v) for v in row] for row in t]
                                for p, t in sorted(entry.pmap_override.items())}
    return out


def _normalize_builder(spec: dict) -> dict:
    out = {"kind": spec["kind"]}
    params = dict(spec.get("params", {}))
    if "base" in params:
        params["base"] = _normalize_builder(params["base"])
    if isinstance(params.get("rep"), list):
        params["rep"] = [[[_fmt(v) for v in row] for row in m] for m in params["rep"]]
    out["params"] = params
    return out


def normalize(raw: dict) -> dict:
    """Canonical form of a raw entry: brackets oriented ``i < j``, merged, sorted, zero terms dropped,
    rationals in lowest terms."""
    out: dict = {"name": raw["name"]}
    if "builder" in raw:
        out["builder"] = _normalize_builder(raw["builder"])
    else:
        basis = list(raw["basis"])
        acc: dict = {}
        for br in raw["brackets"]:
            i, j, sign = br["i"], br["j"], 1
            if i == j:
                continue
            if i > j:
                i, j, sign = j, i, -1
            t = acc.setdefault((i, j), {})
            for term in br.get("terms", []):
                t[term["k"]] = t.get(term["k"], 0) + sign * parse_rational(term["coeff"])
        out["dim"] = len(basis)
        out["basis"] = basis
        out["brackets"] = [
            {"i": i, "j": j, "terms": [{"k": k, "coeff": format_rational(c)} for k, c in sorted(t.items()) if c]}
            for (i, j), t in sorted(acc.items()) if any(t.values())
        ]
        if raw.get("matrix_rep") is not None:
            out["matrix_rep"] = [[[_fmt(v) for v in row] for row in m] for m in raw["matrix_rep"]]
    if raw.get("pmap_override"):
        out["pmap_override"] = {str(int(p)): [[_fmt(v) for v in row] for row in t]
                                for p, t in sorted(raw["pmap_override"].items(), key=lambda kv: int(kv[0]))}
    return out


def dump_catalog(entries) -> str:
    doc = {"schema": SCHEMA, "algebras": [serialize(e) for e in entries]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
