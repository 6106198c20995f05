"""Descriptor files, corpus entries and the batch verification runner.

A descriptor file is a UTF-8 JSON object with ``"schema": 1``. Two kinds
exist:

* ``"kind": "manifold"`` (the default) describes the fundamental group of
  an oriented almost-flat 4-manifold and is run through
  :func:`almostflat.classify.analyze`.
* ``"kind": "group"`` describes a crystallographic group on its own (for
  instance the underlying group of an almost-Bieberbach group); only its
  abelianization is checked.

Top-level ``holonomy_gens`` of a manifold entry describe its own lattice
action, i.e. the flat case. ``underlying`` is an inline group object or
``{"ref": "other_file.json"}`` relative to the referencing file.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Union

from .classify import analyze
from .crystal import (
    DEFAULT_MAX_ORDER,
    AlmostBieberbachDescriptor,
    CrystalGroup,
    betti_via_holonomy,
)
from .errors import AlmostFlatError, DescriptorError, InconsistentRoutesError
from .forms import form_class_from_json
from .grouppres import Presentation, abelian_invariants, parse_presentation
from .linalg import IntMatrix

__all__ = [
    "SCHEMA_VERSION",
    "CorpusEntry",
    "GroupEntry",
    "load_document",
    "parse_document",
    "check_expected",
    "run_entry",
    "run_corpus",
    "shipped_corpus_dir",
    "DocumentError",
]

SCHEMA_VERSION = 1

_MANIFOLD_FIELDS = {
    "schema", "kind", "label", "citation", "dim", "nilpotency_class", "orientable",
    "spin", "torus", "holonomy_gens", "affine_parts", "presentation", "underlying",
    "expected",
}
_GROUP_FIELDS = {
    "schema", "kind", "label", "citation", "dim", "holonomy_gens", "affine_parts",
    "presentation", "expected",
}
_UNDERLYING_FIELDS = {"label", "dim", "holonomy_gens", "affine_parts", "presentation", "ref"}
_EXPECTED_FIELDS = {"b1", "b2", "form", "h1", "route"}


class DocumentError(DescriptorError):
    """A descriptor file failed to load; ``str()`` carries the location."""

    def __init__(self, path, message, line=None, col=None):
        self.path = str(path)
        self.line = line
        self.col = col
        self.message = message
        where = self.path if line is None else f"{self.path}:{line}:{col}"
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class CorpusEntry:
    descriptor: AlmostBieberbachDescriptor
    citation: str = ""
    expected: Optional[dict] = None
    path: Optional[str] = None

    @property
    def label(self) -> str:
        return self.descriptor.label


@dataclass(frozen=True)
class GroupEntry:
    """A stand-alone crystallographic group with both b1 routes where available."""

    label: str
    presentation: Optional[Presentation] = None
    crystal: Optional[CrystalGroup] = None
    citation: str = ""
    expected: Optional[dict] = None
    path: Optional[str] = None

    def summary(self, max_order: int = DEFAULT_MAX_ORDER) -> dict:
        out: dict[str, Any] = {"label": self.label, "kind": "group"}
        routes = {}
        if self.presentation is not None:
            inv = abelian_invariants(self.presentation)
            routes["presentation"] = inv.free_rank
            out["h1"] = str(inv)
        if self.crystal is not None:
            routes["holonomy"] = betti_via_holonomy(self.crystal, max_order)
        values = list(routes.values())
        if len(set(values)) > 1:
            raise InconsistentRoutesError(values[0], values[1])
        out["b1"] = values[0]
        out["routes"] = sorted(routes)
        return out


Entry = Union[CorpusEntry, GroupEntry]


def shipped_corpus_dir() -> Path:
    return Path(str(resources.files("almostflat") / "corpus"))


def _require(obj, key, kind, path, ctx):
    if key not in obj:
        raise DocumentError(path, f"{ctx}missing required field {key!r}")
    value = obj[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise DocumentError(path, f"{ctx}field {key!r} must be an integer")
    if kind is not int and not isinstance(value, kind):
        raise DocumentError(path, f"{ctx}field {key!r} must be of type {kind.__name__}")
    return value


def _reject_unknown(obj, allowed, path, ctx=""):
    extra = sorted(set(obj) - allowed)
    if extra:
        raise DocumentError(path, f"{ctx}unknown field(s): {', '.join(extra)}")


def _parse_presentation_field(text, path, ctx):
    if not isinstance(text, str):
        raise DocumentError(path, f"{ctx}field 'presentation' must be a string")
    try:
        return parse_presentation(text)
    except AlmostFlatError as exc:
        raise DocumentError(path, f"{ctx}presentation: {exc}") from exc


def _parse_matrix_field(value, dim, path, ctx):
    if not isinstance(value, list):
        raise DocumentError(path, f"{ctx}holonomy generator must be a list")
    if value and all(isinstance(r, list) for r in value):
        flat = [x for r in value for x in r]
        if len(value) != dim:
            raise DocumentError(path, f"{ctx}holonomy generator needs {dim} rows")
    else:
        flat = value
    if len(flat) != dim * dim or not all(isinstance(x, int) and not isinstance(x, bool) for x in flat):
        raise DocumentError(path, f"{ctx}holonomy generator needs {dim * dim} integers")
    return IntMatrix(dim, dim, flat)


def _parse_rational(x, path, ctx):
    try:
        if isinstance(x, bool) or not isinstance(x, (str, int)):
            raise ValueError
        return Fraction(x)
    except (ValueError, ZeroDivisionError):
        raise DocumentError(path, f"{ctx}invalid rational {x!r} in affine_parts") from None


def _parse_crystal(obj, label, path, ctx) -> Optional[CrystalGroup]:
    if "holonomy_gens" not in obj:
        if "affine_parts" in obj:
            raise DocumentError(path, f"{ctx}affine_parts given without holonomy_gens")
        return None
    dim = _require(obj, "dim", int, path, ctx)
    gens_raw = _require(obj, "holonomy_gens", list, path, ctx)
    gens = [_parse_matrix_field(g, dim, path, f"{ctx}holonomy_gens[{i}]: ") for i, g in enumerate(gens_raw)]
    affine = None
    if "affine_parts" in obj:
        raw = _require(obj, "affine_parts", list, path, ctx)
        affine = []
        for v in raw:
            if not isinstance(v, list):
                raise DocumentError(path, f"{ctx}affine_parts entries must be lists")
            affine.append(tuple(_parse_rational(x, path, ctx) for x in v))
    try:
        return CrystalGroup(dim, tuple(gens), None if affine is None else tuple(affine), label)
    except AlmostFlatError as exc:
        raise DocumentError(path, f"{ctx}{exc}") from exc


def _parse_group_object(obj, path, ctx, max_order):
    """Presentation and/or crystal data; both must give the same b1."""
    label = obj.get("label", "")
    if not isinstance(label, str):
        raise DocumentError(path, f"{ctx}field 'label' must be a string")
    pres = _parse_presentation_field(obj["presentation"], path, ctx) if "presentation" in obj else None
    crystal = _parse_crystal(obj, label, path, ctx)
    if pres is None and crystal is None:
        raise DocumentError(path, f"{ctx}group needs 'presentation' or 'holonomy_gens'")
    if pres is not None and crystal is not None:
        try:
            GroupEntry(label, pres, crystal).summary(max_order)
        except AlmostFlatError as exc:
            raise DocumentError(path, f"{ctx}{exc}") from exc
    return label, pres, crystal


def _parse_underlying(obj, path, max_order, seen):
    ctx = "underlying: "
    if not isinstance(obj, dict):
        raise DocumentError(path, f"{ctx}must be an object")
    _reject_unknown(obj, _UNDERLYING_FIELDS, path, ctx)
    if "ref" in obj:
        if len(obj) != 1:
            raise DocumentError(path, f"{ctx}'ref' cannot be combined with other fields")
        ref = obj["ref"]
        if not isinstance(ref, str):
            raise DocumentError(path, f"{ctx}'ref' must be a string")
        target = (Path(path).parent / ref).resolve()
        if target in seen:
            raise DocumentError(path, f"{ctx}reference cycle through {ref}")
        entry = load_document(target, max_order, seen | {target})
        if not isinstance(entry, GroupEntry):
            raise DocumentError(path, f"{ctx}{ref} is not a group document")
        pres, crystal = entry.presentation, entry.crystal
    else:
        _, pres, crystal = _parse_group_object(obj, path, ctx, max_order)
    return pres if pres is not None else crystal


def _parse_expected(obj, path):
    if not isinstance(obj, dict):
        raise DocumentError(path, "expected: must be an object")
    _reject_unknown(obj, _EXPECTED_FIELDS, path, "expected: ")
    if "form" in obj:
        try:
            form_class_from_json(obj["form"])
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            raise DocumentError(path, f"expected: bad form {obj['form']!r}: {exc}") from None
    return obj


def parse_document(obj: Any, path: Union[str, Path] = "<memory>",
                   max_order: int = DEFAULT_MAX_ORDER, seen: frozenset = frozenset()) -> Entry:
    """Validate a decoded JSON document and build the entry it describes."""
    if not isinstance(obj, dict):
        raise DocumentError(path, "document must be a JSON object")
    schema = obj.get("schema")
    if schema != SCHEMA_VERSION:
        raise DocumentError(path, f"unsupported or missing schema version {schema!r} (expected {SCHEMA_VERSION})")
    kind = obj.get("kind", "manifold")
    if kind not in ("manifold", "group"):
        raise DocumentError(path, f"unknown kind {kind!r}")
    _reject_unknown(obj, _MANIFOLD_FIELDS if kind == "manifold" else _GROUP_FIELDS, path)
    label = _require(obj, "label", str, path, "")
    citation = obj.get("citation", "")
    if not isinstance(citation, str):
        raise DocumentError(path, "field 'citation' must be a string")
    expected = _parse_expected(obj["expected"], path) if "expected" in obj else None

    if kind == "group":
        _, pres, crystal = _parse_group_object(obj, path, "", max_order)
        return GroupEntry(label, pres, crystal, citation, expected, str(path))

    nclass = _require(obj, "nilpotency_class", int, path, "")
    orientable = _require(obj, "orientable", bool, path, "")
    spin = _require(obj, "spin", bool, path, "")
    torus = obj.get("torus", False)
    if not isinstance(torus, bool):
        raise DocumentError(path, "field 'torus' must be a boolean")
    pres = _parse_presentation_field(obj["presentation"], path, "") if "presentation" in obj else None
    own_crystal = _parse_crystal(obj, label, path, "")
    if "dim" in obj and own_crystal is None:
        _require(obj, "dim", int, path, "")
    if own_crystal is not None and "underlying" in obj:
        raise DocumentError(path, "give either top-level holonomy_gens (flat case) or 'underlying', not both")
    underlying = own_crystal
    if "underlying" in obj:
        underlying = _parse_underlying(obj["underlying"], path, max_order, seen)
    try:
        descriptor = AlmostBieberbachDescriptor(
            label=label,
            nilpotency_class=nclass,
            presentation=pres,
            underlying=underlying,
            orientable=orientable,
            spin=spin,
            torus=torus,
        )
    except AlmostFlatError as exc:
        raise DocumentError(path, str(exc)) from exc
    return CorpusEntry(descriptor, citation, expected, str(path))


def load_document(path: Union[str, Path], max_order: int = DEFAULT_MAX_ORDER,
                  seen: frozenset = frozenset()) -> Entry:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(path, f"cannot read file: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise DocumentError(path, f"not valid UTF-8 at byte {exc.start}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(path, exc.msg, exc.lineno, exc.colno) from exc
    return parse_document(obj, path, max_order, seen | {path.resolve()})


def check_expected(expected: Optional[dict], actual: dict) -> list[str]:
    """Mismatches between an expectation fragment and a report/summary dict."""
    if not expected:
        return []
    problems = []
    for key, want in expected.items():
        have = actual.get(key)
        if key == "form":
            want = form_class_from_json(want).to_json()
        if have != want:
            problems.append(f"{key}: expected {want!r}, got {have!r}")
    return problems


def run_entry(path: Union[str, Path], strict_spin: bool = True,
              max_order: int = DEFAULT_MAX_ORDER) -> dict:
    """Load and evaluate one file; never raises for bad data.

    Returns a row dict with ``status`` PASS, FAIL (expectation mismatch)
    or ERROR (load or analysis failure).
    """
    path = Path(path)
    row: dict[str, Any] = {"file": path.name, "label": path.stem, "status": "ERROR"}
    try:
        entry = load_document(path, max_order)
        row["label"] = entry.label
        if isinstance(entry, GroupEntry):
            result = entry.summary(max_order)
            row["kind"] = "group"
        else:
            if not entry.citation.strip():
                raise DocumentError(path, "corpus entries need a nonempty citation")
            result = analyze(entry.descriptor, strict_spin, max_order).to_json()
            row["kind"] = "manifold"
    except AlmostFlatError as exc:
        row["error"] = str(exc)
        return row
    row["result"] = result
    problems = check_expected(entry.expected, result)
    row["status"] = "FAIL" if problems else "PASS"
    if problems:
        row["mismatches"] = problems
    return row


def _run_entry_args(args):
    return run_entry(*args)


def run_corpus(directory: Union[str, Path], parallel: int = 1, strict_spin: bool = True,
               max_order: int = DEFAULT_MAX_ORDER) -> list[dict]:
    """Evaluate every ``*.json`` file in ``directory`` in sorted filename order."""
    paths = sorted(Path(directory).glob("*.json"))
    jobs = [(p, strict_spin, max_order) for p in paths]
    if parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            return list(pool.map(_run_entry_args, jobs))
    return [_run_entry_args(j) for j in jobs]

