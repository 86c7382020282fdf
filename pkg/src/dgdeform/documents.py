"""Model documents: one YAML grammar with a ``kind`` discriminator.

Numbers are exact.  Integers may be written bare, every other scalar as a
string such as ``"1/2"`` or ``"1+2i"``; floating point literals are
rejected.  ``serialize`` writes the canonical form, which parses back to the
same object and serializes to the same bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

import yaml

from .artin import GradedArtinAlgebra
from .dgla import Dgla
from .errors import ParseError, SemanticError, StructuralError
from .frobenius import FrobeniusData
from .linalg import GradedVectorSpace
from .mc import HodgeTable
from .polyvector import PolyvectorSpace
from .scalars import ExactScalar, parse_scalar
from .tqft import Surface

__all__ = ["KINDS", "ModelDocument", "parse_model", "load_model", "serialize"]

KINDS = ("algebra", "dgla", "polyvector", "hodge-table", "frobenius", "surface")


@dataclass
class ModelDocument:
    kind: str
    payload: dict      # canonical plain data
    obj: object        # the constructed library object


# -- small validators ------------------------------------------------------------

def _expect(value, typ, path):
    if not isinstance(value, typ) or (typ is int and isinstance(value, bool)):
        names = typ.__name__ if isinstance(typ, type) else "/".join(t.__name__ for t in typ)
        raise SemanticError(f"expected {names}, got {type(value).__name__}", path)
    return value


def _scalar(value, path) -> ExactScalar:
    if isinstance(value, bool) or isinstance(value, float):
        raise SemanticError("floating point and boolean values are not exact scalars", path)
    if isinstance(value, int):
        return ExactScalar(value)
    if isinstance(value, str):
        try:
            return parse_scalar(value)
        except ValueError as exc:
            raise SemanticError(str(exc), path) from None
    raise SemanticError(f"expected a scalar, got {type(value).__name__}", path)


def _scalar_out(c: ExactScalar):
    s = str(c)
    try:
        return int(s)
    except ValueError:
        return s


def _mapping(value, path, required=(), optional=()):
    _expect(value, dict, path)
    for key in required:
        if key not in value:
            raise SemanticError(f"missing field {key!r}", path)
    allowed = set(required) | set(optional)
    for key in value:
        if key not in allowed:
            raise SemanticError(f"unknown field {key!r}", path)
    return value


def _list(value, path):
    return _expect(value, list, path)


def _basis(raw, path):
    names = []
    out = []
    for n, entry in enumerate(_list(raw, path)):
        p = f"{path}[{n}]"
        _mapping(entry, p, ("name", "degree"))
        name = str(_expect(entry["name"], (str, int), f"{p}.name"))
        deg = _expect(entry["degree"], int, f"{p}.degree")
        if name in names:
            raise SemanticError(f"duplicate basis name {name!r}", p)
        names.append(name)
        out.append((name, deg))
    return out


# -- per-kind builders -------------------------------------------------------------

def _algebra(doc, path=""):
    _mapping(doc, path or "document", ("kind", "variables", "truncation"), ("relations",))
    variables = _basis(doc["variables"], f"{path}variables")
    trunc = _expect(doc["truncation"], int, f"{path}truncation")
    rels = [str(_expect(r, str, f"{path}relations[{n}]"))
            for n, r in enumerate(_list(doc.get("relations", []), f"{path}relations"))]
    try:
        A = GradedArtinAlgebra(variables, trunc, rels)
    except (StructuralError, ParseError) as exc:
        raise SemanticError(str(exc), f"{path}relations") from None
    payload = {
        "kind": "algebra",
        "variables": [{"name": n, "degree": d} for n, d in variables],
        "truncation": trunc,
        "relations": [A.monomial_str(r) for r in A.relations],
    }
    return payload, A


def _dgla(doc):
    _mapping(doc, "document", ("kind", "basis"), ("d", "bracket"))
    basis = _basis(doc["basis"], "basis")
    names = [n for n, _ in basis]
    deg = dict(basis)

    def name_of(v, p):
        v = str(_expect(v, (str, int), p))
        if v not in deg:
            raise SemanticError(f"unknown basis element {v!r}", p)
        return v

    d = {}
    d_out = []
    for n, entry in enumerate(_list(doc.get("d", []), "d")):
        p = f"d[{n}]"
        _mapping(entry, p, ("from", "to", "coeff"))
        a = name_of(entry["from"], f"{p}.from")
        b = name_of(entry["to"], f"{p}.to")
        c = _scalar(entry["coeff"], f"{p}.coeff")
        if deg[b] != deg[a] + 1:
            raise SemanticError(f"d({a}) -> {b} changes degree by {deg[b] - deg[a]}, expected 1", p)
        if (a, b) in {(x["from"], x["to"]) for x in d_out}:
            raise SemanticError(f"entry d({a}) -> {b} given twice", p)
        d.setdefault(a, {})[b] = c
        d_out.append({"from": a, "to": b, "coeff": _scalar_out(c)})
    br = {}
    br_out = []
    for n, entry in enumerate(_list(doc.get("bracket", []), "bracket")):
        p = f"bracket[{n}]"
        _mapping(entry, p, ("a", "b", "out"))
        a = name_of(entry["a"], f"{p}.a")
        b = name_of(entry["b"], f"{p}.b")
        ia, ib = names.index(a), names.index(b)
        sign = 1
        if ia > ib:
            # store the upper pair; [b, a] = -(-1)^{|a||b|} [a, b]
            a, b, ia, ib = b, a, ib, ia
            sign = 1 if (deg[a] * deg[b]) % 2 else -1
        if (a, b) in br:
            raise SemanticError(f"bracket [{a}, {b}] given twice", p)
        outs = {}
        for m, o in enumerate(_list(entry["out"], f"{p}.out")):
            q = f"{p}.out[{m}]"
            _mapping(o, q, ("basis", "coeff"))
            k = name_of(o["basis"], f"{q}.basis")
            if deg[k] != deg[a] + deg[b]:
                raise SemanticError(
                    f"[{a}, {b}] has a component {k} of degree {deg[k]}, expected {deg[a] + deg[b]}", q)
            outs[k] = outs.get(k, ExactScalar(0)) + _scalar(o["coeff"], f"{q}.coeff") * sign
        br[(a, b)] = outs
    for (a, b), outs in sorted(br.items(), key=lambda kv: (names.index(kv[0][0]), names.index(kv[0][1]))):
        clean = [{"basis": k, "coeff": _scalar_out(c)}
                 for k, c in sorted(outs.items(), key=lambda kv: names.index(kv[0])) if c]
        if clean:
            br_out.append({"a": a, "b": b, "out": clean})
    d_out = [e for e in d_out if e["coeff"] != 0]
    d_out.sort(key=lambda e: (names.index(e["from"]), names.index(e["to"])))
    try:
        L = Dgla(GradedVectorSpace(basis), d, {k: v for k, v in br.items()})
    except StructuralError as exc:
        raise SemanticError(str(exc), "document") from None
    payload = {
        "kind": "dgla",
        "basis": [{"name": n, "degree": k} for n, k in basis],
        "d": d_out,
        "bracket": br_out,
    }
    return payload, L


def _indices(raw, n, path):
    out = []
    for m, v in enumerate(_list(raw, path)):
        v = _expect(v, int, f"{path}[{m}]")
        if not 1 <= v <= n:
            raise SemanticError(f"index {v} outside 1..{n}", f"{path}[{m}]")
        out.append(v)
    return out


def _polyvector(doc):
    _mapping(doc, "document", ("kind", "n", "terms"), ("t", "t_order"))
    n = _expect(doc["n"], int, "n")
    if n < 1:
        raise SemanticError("n must be positive", "n")
    t_names = [str(_expect(t, str, f"t[{k}]")) for k, t in enumerate(_list(doc.get("t", []), "t"))]
    t_order = _expect(doc.get("t_order", 0), int, "t_order")
    S = PolyvectorSpace(n, t_names=tuple(t_names), t_order=t_order)
    x = S.zero()
    for k, entry in enumerate(_list(doc["terms"], "terms")):
        p = f"terms[{k}]"
        _mapping(entry, p, ("coeff",), ("dzbar", "ddz", "monomial"))
        I = _indices(entry.get("dzbar", []), n, f"{p}.dzbar")
        J = _indices(entry.get("ddz", []), n, f"{p}.ddz")
        c = _scalar(entry["coeff"], f"{p}.coeff")
        mono = str(entry.get("monomial", "1"))
        try:
            f = S.ring.parse(mono) * c
        except (StructuralError, ParseError) as exc:
            raise SemanticError(str(exc), f"{p}.monomial") from None
        x = x + S.term([i - 1 for i in I], [j - 1 for j in J], f)
    terms = []
    for (I, J), f in sorted(x.terms.items(), key=lambda kv: (len(kv[0][1]), len(kv[0][0]), kv[0])):
        for m, c in f.sorted_terms():
            terms.append({"dzbar": [i + 1 for i in I], "ddz": [j + 1 for j in J],
                          "monomial": S.ring.mono_str(m) or "1", "coeff": _scalar_out(c)})
    payload = {"kind": "polyvector", "n": n, "t": t_names, "t_order": t_order, "terms": terms}
    return payload, x


def _hodge(doc):
    _mapping(doc, "document", ("kind", "n", "h"))
    n = _expect(doc["n"], int, "n")
    values = {}
    for k, entry in enumerate(_list(doc["h"], "h")):
        p = f"h[{k}]"
        _mapping(entry, p, ("p", "q", "value"))
        key = (_expect(entry["p"], int, f"{p}.p"), _expect(entry["q"], int, f"{p}.q"))
        if key in values:
            raise SemanticError(f"h^{{{key[0]},{key[1]}}} given twice", p)
        values[key] = _expect(entry["value"], int, f"{p}.value")
    try:
        table = HodgeTable(n, values)
    except StructuralError as exc:
        raise SemanticError(str(exc), "h") from None
    payload = {"kind": "hodge-table", "n": n,
               "h": [{"p": p, "q": q, "value": v} for (p, q), v in sorted(table.values.items())]}
    return payload, table


def _frobenius(doc):
    _mapping(doc, "document", ("kind", "basis", "g"),
             ("unit", "coordinates", "truncation", "potential", "tensor"))
    basis = _basis(doc["basis"], "basis")
    names = [n for n, _ in basis]
    dim = len(basis)
    g_raw = _list(doc["g"], "g")
    if len(g_raw) != dim:
        raise SemanticError(f"metric must have {dim} rows", "g")
    g = []
    for i, row in enumerate(g_raw):
        row = _list(row, f"g[{i}]")
        if len(row) != dim:
            raise SemanticError(f"metric row must have {dim} entries", f"g[{i}]")
        g.append([_scalar(v, f"g[{i}][{j}]") for j, v in enumerate(row)])
    coords = doc.get("coordinates", [f"t{k + 1}" for k in range(dim)])
    coords = [str(_expect(c, str, f"coordinates[{k}]")) for k, c in enumerate(_list(coords, "coordinates"))]
    if len(coords) != dim:
        raise SemanticError(f"need {dim} coordinates", "coordinates")
    has_pot = "potential" in doc
    trunc = _expect(doc.get("truncation", 3 if has_pot else 0), int, "truncation")
    try:
        alg = GradedArtinAlgebra(list(zip(coords, [d for _, d in basis])), trunc)
    except StructuralError as exc:
        raise SemanticError(str(exc), "coordinates") from None
    unit = doc.get("unit")
    if unit is not None:
        unit = str(unit)
        if unit not in names:
            raise SemanticError(f"unknown basis element {unit!r}", "unit")
    potential = None
    tensor = None
    if has_pot:
        try:
            potential = alg.parse(str(_expect(doc["potential"], str, "potential")))
        except (StructuralError, ParseError) as exc:
            raise SemanticError(str(exc), "potential") from None
    if "tensor" in doc:
        tensor = {}
        for k, entry in enumerate(_list(doc["tensor"], "tensor")):
            p = f"tensor[{k}]"
            _mapping(entry, p, ("i", "j", "k", "coeff"))
            ijk = []
            for key in ("i", "j", "k"):
                v = str(_expect(entry[key], (str, int), f"{p}.{key}"))
                if v not in names:
                    raise SemanticError(f"unknown basis element {v!r}", f"{p}.{key}")
                ijk.append(names.index(v))
            coeff = entry["coeff"]
            try:
                series = alg.parse(coeff) if isinstance(coeff, str) else alg.constant(_scalar(coeff, f"{p}.coeff"))
            except (StructuralError, ParseError) as exc:
                raise SemanticError(str(exc), f"{p}.coeff") from None
            row = tensor.setdefault((ijk[0], ijk[1]), {})
            row[ijk[2]] = row[ijk[2]] + series if ijk[2] in row else series
    try:
        F = FrobeniusData(names, [d for _, d in basis], g, tensor, alg, unit, potential)
    except StructuralError as exc:
        raise SemanticError(str(exc), "document") from None
    payload = {
        "kind": "frobenius",
        "basis": [{"name": n, "degree": d} for n, d in basis],
        "g": [[_scalar_out(v) for v in row] for row in g],
    }
    if unit is not None:
        payload["unit"] = unit
    payload["coordinates"] = coords
    payload["truncation"] = trunc
    if potential is not None:
        payload["potential"] = str(potential)
    if tensor is not None:
        entries = []
        for (i, j), row in sorted(F.tensor.items()):
            for k, c in sorted(row.items()):
                entries.append({"i": names[i], "j": names[j], "k": names[k], "coeff": str(c)})
        payload["tensor"] = entries
    return payload, F


def _surface(doc):
    _mapping(doc, "document", ("kind", "genus", "inputs", "outputs"), ("pipeline", "components"))
    genus = _expect(doc["genus"], int, "genus")
    inputs = _expect(doc["inputs"], int, "inputs")
    outputs = _expect(doc["outputs"], int, "outputs")
    comps = _expect(doc.get("components", 1), int, "components")
    pipeline = doc.get("pipeline")
    if pipeline is not None:
        pipeline = [str(_expect(s, str, f"pipeline[{k}]")) for k, s in enumerate(_list(pipeline, "pipeline"))]
    try:
        S = Surface(genus, inputs, outputs, pipeline, comps)
    except StructuralError as exc:
        raise SemanticError(str(exc), "pipeline") from None
    payload = {"kind": "surface", "genus": genus, "inputs": inputs, "outputs": outputs,
               "components": comps, "pipeline": list(S.pipeline)}
    return payload, S


_BUILDERS = {
    "algebra": _algebra,
    "dgla": _dgla,
    "polyvector": _polyvector,
    "hodge-table": _hodge,
    "frobenius": _frobenius,
    "surface": _surface,
}


def parse_model(text: str, kind: str | None = None) -> ModelDocument:
    """Parse and validate a document.

    Syntax errors raise ParseError with a 1-based line and column; documents
    that parse but do not describe a valid object raise SemanticError with
    the path of the offending entry.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        problem = getattr(exc, "problem", None) or str(exc)
        if mark is not None:
            raise ParseError(problem, mark.line + 1, mark.column + 1) from None
        raise ParseError(problem) from None
    if not isinstance(doc, dict):
        raise SemanticError("a document must be a mapping", "document")
    found = doc.get("kind")
    if found is None:
        raise SemanticError("missing field 'kind'", "document")
    if found not in _BUILDERS:
        raise SemanticError(f"unknown kind {found!r}, expected one of {', '.join(KINDS)}", "kind")
    if kind is not None and found != kind:
        raise SemanticError(f"expected a {kind} document, got {found}", "kind")
    payload, obj = _BUILDERS[found](doc)
    return ModelDocument(found, payload, obj)


def load_model(path, kind: str | None = None) -> ModelDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), kind)


def serialize(doc: ModelDocument) -> str:
    return yaml.safe_dump(doc.payload, sort_keys=False, default_flow_style=None,
                          allow_unicode=True, width=100)
