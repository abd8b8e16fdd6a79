"""JSON jet documents (schema version "1").

A document carries a signature and any of a map jet, a model and a graph
germ.  Each series is a list of terms::

    {"exponents": [2, 0], "coeff": {"num_re": 1, "den_re": 1, "num_im": 0, "den_im": 1}}

in graded-lex order.  Exponents run over the ``variables`` listed in the
enclosing block; the ``space`` tag says which coordinates those are:
``source`` (z, w), ``target`` (z', ~z', w', ~w', primes dropped) or
``graph`` (x, y, u).  On input a component may also be an expression
string, parsed by :mod:`crjets.parser`.

:func:`dumps` is canonical: loading and dumping a canonical document
reproduces it byte for byte.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from gmpy2 import mpq

from . import errors
from .jets import AlgebraicModel, CrSignature, GraphGerm, MapJet
from .parser import parse_series
from .series import EXACT, SeriesVector, TruncatedSeries, VariableSpace

__all__ = [
    "SCHEMA_VERSION",
    "JetDocument",
    "series_to_terms",
    "series_from_terms",
    "to_dict",
    "from_dict",
    "dumps",
    "loads",
    "load",
    "dump",
    "fixture_path",
    "fixture_names",
]

SCHEMA_VERSION = "1"
_DATA = Path(__file__).parent / "data"


class DocumentError(errors.ValidationError):
    pass


class DocumentIOError(errors.CRJetError, OSError):
    pass


@dataclass(frozen=True)
class JetDocument:
    signature: CrSignature
    map: MapJet | None = None
    model: AlgebraicModel | None = None
    germ: GraphGerm | None = None

    def require_map_and_model(self) -> tuple[MapJet, AlgebraicModel]:
        if self.map is None or self.model is None:
            raise DocumentError("document needs both a 'map' and a 'model' block")
        return self.map, self.model

    def require_germ(self) -> GraphGerm:
        if self.germ is None:
            raise DocumentError("document has no 'germ' block")
        return self.germ


# ---------------------------------------------------------------------------
# terms


def _coeff_dict(c) -> dict:
    return {
        "num_re": int(c.re.numerator),
        "den_re": int(c.re.denominator),
        "num_im": int(c.im.numerator),
        "den_im": int(c.im.denominator),
    }


def series_to_terms(s: TruncatedSeries) -> list[dict]:
    if s.mode != EXACT:
        raise DocumentError("only exact series can be serialised")
    return [{"exponents": list(exps), "coeff": _coeff_dict(c)} for exps, c in s.terms.items()]


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError(f"{where} must be an integer, got {value!r}")
    return value


def _rational(coeff: dict, part: str, where: str):
    num = _int(coeff.get(f"num_{part}", 0), f"{where}.num_{part}")
    den = _int(coeff.get(f"den_{part}", 1), f"{where}.den_{part}")
    if den <= 0:
        raise DocumentError(f"{where}.den_{part} must be positive")
    return mpq(num, den)


def series_from_terms(data, space: VariableSpace, order: int, where: str = "series") -> TruncatedSeries:
    """Build a series from a term list or an expression string."""
    if isinstance(data, str):
        try:
            return parse_series(data, space, order)
        except errors.ValidationError as exc:
            raise DocumentError(f"{where}: {exc}") from exc
    if not isinstance(data, list):
        raise DocumentError(f"{where} must be a term list or an expression string")
    terms = {}
    for n, term in enumerate(data):
        here = f"{where}[{n}]"
        if not isinstance(term, dict) or set(term) != {"exponents", "coeff"}:
            raise DocumentError(f"{here} must have exactly the keys 'exponents' and 'coeff'")
        exps = term["exponents"]
        if not isinstance(exps, list) or len(exps) != len(space):
            raise DocumentError(f"{here}.exponents must list {len(space)} integers")
        exps = tuple(_int(e, f"{here}.exponents") for e in exps)
        if any(e < 0 for e in exps):
            raise DocumentError(f"{here}.exponents must be non-negative")
        if sum(exps) > order:
            raise errors.DegreeExceeded(f"{here} has degree {sum(exps)} > order {order}")
        if exps in terms:
            raise DocumentError(f"{here} repeats exponents {list(exps)}")
        coeff = term["coeff"]
        if not isinstance(coeff, dict) or not set(coeff) <= {"num_re", "den_re", "num_im", "den_im"}:
            raise DocumentError(f"{here}.coeff must hold num_re, den_re, num_im, den_im")
        terms[exps] = (_rational(coeff, "re", here), _rational(coeff, "im", here))
    return TruncatedSeries(space, order, terms)


# ---------------------------------------------------------------------------
# documents


def _block(tag: str, space: VariableSpace, **components) -> dict:
    out = {"space": tag, "variables": list(space.names)}
    for key, vector in components.items():
        out[key] = [series_to_terms(c) for c in vector]
    return out


def to_dict(doc: JetDocument) -> dict:
    sig = doc.signature
    out = {
        "schema_version": SCHEMA_VERSION,
        "signature": {"m": sig.m, "d": sig.d, "mprime": sig.mprime, "nu": sig.nu, "k": sig.k},
    }
    if doc.map is not None:
        out["map"] = _block("source", sig.source_space, f=doc.map.f, g=doc.map.g)
    if doc.model is not None:
        out["model"] = _block("target", sig.target_space, rho_tilde=doc.model.rho_tilde)
    if doc.germ is not None:
        out["germ"] = _block("graph", sig.graph_space, r=doc.germ.r)
    return out


def _read_block(data: dict, name: str, tag: str, space: VariableSpace, order: int, sizes: dict) -> dict:
    block = data[name]
    if not isinstance(block, dict):
        raise DocumentError(f"'{name}' must be an object")
    expected = {"space", "variables", *sizes}
    if set(block) != expected:
        raise DocumentError(f"'{name}' must have exactly the keys {sorted(expected)}")
    if block["space"] != tag:
        raise DocumentError(f"'{name}.space' must be {tag!r}")
    if block["variables"] != list(space.names):
        raise DocumentError(f"'{name}.variables' must be {list(space.names)} for this signature")
    out = {}
    for key, size in sizes.items():
        comps = block[key]
        if not isinstance(comps, list) or len(comps) != size:
            raise errors.SignatureMismatch(f"'{name}.{key}' must have {size} components")
        out[key] = SeriesVector(
            series_from_terms(c, space, order, f"{name}.{key}[{i}]") for i, c in enumerate(comps)
        )
    return out


def from_dict(data: dict) -> JetDocument:
    if not isinstance(data, dict):
        raise DocumentError("a jet document is a JSON object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise DocumentError(f"unsupported schema_version {data.get('schema_version')!r}")
    unknown = set(data) - {"schema_version", "signature", "map", "model", "germ"}
    if unknown:
        raise DocumentError(f"unknown top-level keys {sorted(unknown)}")
    sig_data = data.get("signature")
    if not isinstance(sig_data, dict) or set(sig_data) != {"m", "d", "mprime", "nu", "k"}:
        raise DocumentError("'signature' must have exactly the keys m, d, mprime, nu, k")
    sig = CrSignature(**{key: _int(v, f"signature.{key}") for key, v in sig_data.items()})
    F = model = germ = None
    if "map" in data:
        parts = _read_block(data, "map", "source", sig.source_space, sig.k, {"f": sig.mprime, "g": sig.d})
        F = MapJet(sig, parts["f"], parts["g"])
    if "model" in data:
        parts = _read_block(data, "model", "target", sig.target_space, sig.nu, {"rho_tilde": sig.d})
        model = AlgebraicModel(sig, parts["rho_tilde"])
    if "germ" in data:
        parts = _read_block(data, "germ", "graph", sig.graph_space, sig.k, {"r": sig.d})
        germ = GraphGerm(parts["r"], sig)
    return JetDocument(sig, F, model, germ)


def dumps(doc: JetDocument) -> str:
    return json.dumps(to_dict(doc), indent=2, ensure_ascii=True) + "\n"


def loads(text: str) -> JetDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from exc
    return from_dict(data)


def load(path) -> JetDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentIOError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return loads(text)


def dump(doc: JetDocument, path) -> None:
    try:
        Path(path).write_text(dumps(doc), encoding="utf-8")
    except OSError as exc:
        raise DocumentIOError(f"cannot write {path}: {exc.strerror or exc}") from exc


def fixture_names() -> list[str]:
    """Names of the bundled example documents."""
    return sorted(p.stem for p in _DATA.glob("*.json"))


def fixture_path(name: str) -> Path:
    path = _DATA / f"{name}.json"
    if not path.is_file():
        raise DocumentIOError(f"no bundled fixture {name!r}; have {fixture_names()}")
    return path
