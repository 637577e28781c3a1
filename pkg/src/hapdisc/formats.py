"""Canonical JSON documents for every artifact the package produces.

Each document is one JSON object: ``kind``, ``version`` ("1"), the kind's
fields in a fixed order, and an optional trailing ``meta`` object with the
command and seed that produced it.  Integers that can exceed 53 bits
(primes products, determinants) are decimal strings; bounds are floats
rounded down to 12 significant digits; sets are sorted index arrays.
Serializing the same object always gives the same bytes.
"""

from __future__ import annotations

import csv
import io
import json
from decimal import ROUND_FLOOR, Context, Decimal

import numpy as np

from .certificates import CheckReport, LowerBoundCert
from .core import Coloring, DiscrepancyReport, SetSystem, SignMatrix, bits_of, mask_of
from .exact import DetSubsetResult, ExactResult
from .generators import EmbeddingWitness, point_label
from .heuristics import HeuristicOutcome

VERSION = "1"
_DOWN12 = Context(prec=12, rounding=ROUND_FLOOR)


class FormatError(ValueError):
    """Input is not a well-formed document."""


class InvariantError(FormatError):
    """A well-formed document violates a type invariant."""


def round_bound(x: float) -> float:
    """Round down to 12 significant digits (never overstates a lower bound)."""
    if x == 0 or not np.isfinite(x):
        return float(x)
    return float(_DOWN12.plus(Decimal(repr(float(x)))))


def _ints(arr) -> list[int]:
    return [int(v) for v in np.asarray(arr).reshape(-1).tolist()]


def _plain(value):
    """Metrics values: JSON-native scalars only."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        value = int(value)
        return value if abs(value) < 2**53 else str(value)
    if isinstance(value, (float, np.floating)):
        return round_bound(float(value))
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    raise TypeError(f"cannot serialize metric value {value!r}")


def to_document(obj) -> dict:
    if isinstance(obj, SetSystem):
        return {
            "kind": "set_system",
            "version": VERSION,
            "ground": list(obj.ground),
            "sets": [{"name": nm, "members": bits_of(s)} for nm, s in obj.sets],
        }
    if isinstance(obj, SignMatrix):
        return {
            "kind": "sign_matrix",
            "version": VERSION,
            "rows": obj.rows,
            "cols": obj.cols,
            "entries": [_ints(r) for r in obj.entries],
            "row_labels": None if obj.row_labels is None else list(obj.row_labels),
            "col_labels": None if obj.col_labels is None else list(obj.col_labels),
        }
    if isinstance(obj, Coloring):
        return {"kind": "coloring", "version": VERSION, "n": len(obj), "values": _ints(obj.values)}
    if isinstance(obj, EmbeddingWitness):
        return {
            "kind": "embedding_witness",
            "version": VERSION,
            "d": obj.d,
            "n": str(obj.n),
            "primes": [str(p) for p in obj.primes],
            "b_of_u": [{"u": point_label(u, obj.d), "b": str(b)} for u, b in enumerate(obj.b_of_u)],
            "a_of_v": [{"v": v, "a": str(a)} for v, a in obj.a_of_v.items()],
        }
    if isinstance(obj, LowerBoundCert):
        return {
            "kind": "lower_bound_cert",
            "version": VERSION,
            "k": obj.k,
            "row_subset": list(obj.row_subset),
            "col_subset": list(obj.col_subset),
            "det": str(obj.det),
            "bound": round_bound(obj.bound),
        }
    if isinstance(obj, CheckReport):
        return {
            "kind": "check_report",
            "version": VERSION,
            "name": obj.name,
            "passed": obj.passed,
            "detail": obj.detail,
            "trials": obj.trials,
            "metrics": {str(k): _plain(v) for k, v in obj.metrics.items()},
        }
    if isinstance(obj, DiscrepancyReport):
        return {
            "kind": "discrepancy_report",
            "version": VERSION,
            "value": obj.value,
            "argmax_row": obj.argmax_row,
            "per_row": None if obj.per_row is None else _ints(obj.per_row),
        }
    if isinstance(obj, ExactResult):
        return {
            "kind": "exact_result",
            "version": VERSION,
            "value": obj.value,
            "witness_coloring": None if obj.witness_coloring is None else _ints(obj.witness_coloring.values),
            "witness_subset": None if obj.witness_subset is None else bits_of(obj.witness_subset),
            "nodes_explored": obj.nodes_explored,
        }
    if isinstance(obj, HeuristicOutcome):
        return {
            "kind": "heuristic_outcome",
            "version": VERSION,
            "achieved": obj.achieved,
            "guarantee": obj.guarantee,
            "iterations": obj.iterations,
            "coloring": _ints(obj.coloring.values),
        }
    if isinstance(obj, DetSubsetResult):
        return {
            "kind": "det_subset",
            "version": VERSION,
            "columns": list(obj.columns),
            "det": str(obj.det),
            "root": round_bound(obj.root),
            "success": obj.success,
            "restarts": obj.restarts,
        }
    raise TypeError(f"no document format for {type(obj).__name__}")


def serialize(obj, meta: dict | None = None) -> bytes:
    doc = to_document(obj)
    if meta is not None:
        doc["meta"] = meta
    return (json.dumps(doc, separators=(",", ":"), ensure_ascii=True, allow_nan=False) + "\n").encode()


# ---------------------------------------------------------------- reading


def _field(doc: dict, name: str, kinds, where: str):
    if name not in doc:
        raise FormatError(f"{where}: missing field '{name}'")
    value = doc[name]
    if kinds is not None and not isinstance(value, kinds) or (kinds is int and isinstance(value, bool)):
        raise FormatError(f"{where}: field '{name}' has type {type(value).__name__}")
    return value


def _bigint(doc: dict, name: str, where: str) -> int:
    value = _field(doc, name, str, where)
    try:
        return int(value)
    except ValueError:
        raise FormatError(f"{where}: field '{name}' is not a decimal integer: {value!r}") from None


def _int_list(values, where: str) -> list[int]:
    if not isinstance(values, list) or any(isinstance(v, bool) or not isinstance(v, int) for v in values):
        raise FormatError(f"{where}: expected a list of integers")
    return values


def _sorted_members(values, n: int, where: str) -> int:
    values = _int_list(values, where)
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InvariantError(f"{where}: invariant 'sets are sorted index arrays' violated")
    if values and (values[0] < 0 or values[-1] >= n):
        raise InvariantError(f"{where}: invariant 'members lie in the ground' violated")
    return mask_of(values)


def from_document(doc) -> object:
    if not isinstance(doc, dict):
        raise FormatError("document root must be a JSON object")
    kind = _field(doc, "kind", str, "document")
    version = _field(doc, "version", str, kind)
    if version != VERSION:
        raise FormatError(f"{kind}: unsupported version {version!r}")
    try:
        return _READERS[kind](doc, kind)
    except KeyError:
        raise FormatError(f"unknown document kind {kind!r}") from None
    except InvariantError:
        raise
    except (ValueError, TypeError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise InvariantError(f"{kind}: invariant violated: {exc}") from None


def _read_set_system(doc, where):
    ground = _field(doc, "ground", list, where)
    sets = []
    for i, entry in enumerate(_field(doc, "sets", list, where)):
        w = f"{where}.sets[{i}]"
        if not isinstance(entry, dict):
            raise FormatError(f"{w}: expected an object")
        sets.append((_field(entry, "name", str, w), _sorted_members(_field(entry, "members", list, w), len(ground), f"{w}.members")))
    return SetSystem(tuple(ground), tuple(sets))


def _read_sign_matrix(doc, where):
    rows = _field(doc, "rows", int, where)
    cols = _field(doc, "cols", int, where)
    entries = _field(doc, "entries", list, where)
    if len(entries) != rows:
        raise InvariantError(f"{where}: invariant 'entries has rows lines' violated ({len(entries)} != {rows})")
    for i, r in enumerate(entries):
        _int_list(r, f"{where}.entries[{i}]")
        if len(r) != cols:
            raise InvariantError(f"{where}.entries[{i}]: invariant 'matrix is rectangular' violated")
        if any(v not in (-1, 0, 1) for v in r):
            raise InvariantError(f"{where}.entries[{i}]: invariant 'entries in {{-1,0,+1}}' violated")
    arr = np.array(entries, dtype=np.int64).reshape(rows, cols)
    return SignMatrix(arr, _field(doc, "row_labels", (list, type(None)), where), _field(doc, "col_labels", (list, type(None)), where))


def _read_coloring(doc, where):
    n = _field(doc, "n", int, where)
    values = _int_list(_field(doc, "values", list, where), f"{where}.values")
    if len(values) != n:
        raise InvariantError(f"{where}: invariant 'length equals n' violated")
    for i, v in enumerate(values):
        if v not in (-1, 1):
            raise InvariantError(f"{where}.values[{i}]: invariant 'entries are exactly +-1' violated (got {v})")
    return Coloring(np.array(values, dtype=np.int8))


def _read_witness(doc, where):
    d = _field(doc, "d", int, where)
    primes = tuple(_bigint({"p": p}, "p", f"{where}.primes") for p in _field(doc, "primes", list, where))
    b_entries = _field(doc, "b_of_u", list, where)
    if len(b_entries) != 1 << d or len(primes) != 2 * d:
        raise InvariantError(f"{where}: invariant '2d primes and 2^d integers b_u' violated")
    b_of_u = []
    for u, e in enumerate(b_entries):
        if _field(e, "u", str, f"{where}.b_of_u[{u}]") != point_label(u, d):
            raise InvariantError(f"{where}.b_of_u[{u}]: invariant 'canonical point order' violated")
        b_of_u.append(_bigint(e, "b", f"{where}.b_of_u[{u}]"))
    a_of_v = {}
    for i, e in enumerate(_field(doc, "a_of_v", list, where)):
        a_of_v[_field(e, "v", str, f"{where}.a_of_v[{i}]")] = _bigint(e, "a", f"{where}.a_of_v[{i}]")
    n = _bigint(doc, "n", where)
    if n != max(b_of_u):
        raise InvariantError(f"{where}: invariant 'n is the largest b_u' violated")
    return EmbeddingWitness(d, primes, tuple(b_of_u), a_of_v, n)


def _read_cert(doc, where):
    return LowerBoundCert(
        _field(doc, "k", int, where),
        tuple(_int_list(_field(doc, "row_subset", list, where), f"{where}.row_subset")),
        tuple(_int_list(_field(doc, "col_subset", list, where), f"{where}.col_subset")),
        _bigint(doc, "det", where),
        float(_field(doc, "bound", (int, float), where)),
    )


def _read_report(doc, where):
    return CheckReport(
        _field(doc, "name", str, where),
        _field(doc, "passed", bool, where),
        _field(doc, "detail", str, where),
        _field(doc, "trials", int, where),
        dict(_field(doc, "metrics", dict, where)),
    )


def _read_disc_report(doc, where):
    per_row = _field(doc, "per_row", (list, type(None)), where)
    return DiscrepancyReport(
        _field(doc, "value", int, where),
        _field(doc, "argmax_row", (int, type(None)), where),
        None if per_row is None else np.array(_int_list(per_row, f"{where}.per_row"), dtype=np.int64),
    )


def _read_exact(doc, where):
    wc = _field(doc, "witness_coloring", (list, type(None)), where)
    ws = _field(doc, "witness_subset", (list, type(None)), where)
    return ExactResult(
        _field(doc, "value", int, where),
        None if wc is None else _read_coloring({"n": len(wc), "values": wc}, f"{where}.witness_coloring"),
        None if ws is None else _sorted_members(ws, 1 << 30, f"{where}.witness_subset"),
        _field(doc, "nodes_explored", int, where),
    )


def _read_outcome(doc, where):
    values = _field(doc, "coloring", list, where)
    return HeuristicOutcome(
        _read_coloring({"n": len(values), "values": values}, f"{where}.coloring"),
        _field(doc, "achieved", int, where),
        _field(doc, "guarantee", (int, type(None)), where),
        _field(doc, "iterations", int, where),
    )


def _read_det_subset(doc, where):
    return DetSubsetResult(
        tuple(_int_list(_field(doc, "columns", list, where), f"{where}.columns")),
        _bigint(doc, "det", where),
        _field(doc, "success", bool, where),
        _field(doc, "restarts", int, where),
    )


_READERS = {
    "set_system": _read_set_system,
    "sign_matrix": _read_sign_matrix,
    "coloring": _read_coloring,
    "embedding_witness": _read_witness,
    "lower_bound_cert": _read_cert,
    "check_report": _read_report,
    "discrepancy_report": _read_disc_report,
    "exact_result": _read_exact,
    "heuristic_outcome": _read_outcome,
    "det_subset": _read_det_subset,
}


def read_document(data: bytes | str) -> tuple[object, dict | None]:
    """Parse a document; returns the object and its meta block (or None)."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise FormatError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    meta = doc.get("meta") if isinstance(doc, dict) else None
    return from_document(doc), meta


def deserialize(data: bytes | str) -> object:
    return read_document(data)[0]


# ---------------------------------------------------------------- csv

CSV_FIELDS = {
    DiscrepancyReport: ("value", "argmax_row"),
    CheckReport: ("name", "passed", "detail", "trials"),
}


def to_csv(obj) -> bytes:
    fields = CSV_FIELDS.get(type(obj))
    if fields is None:
        raise TypeError(f"no CSV export for {type(obj).__name__}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    extra = sorted(obj.metrics) if isinstance(obj, CheckReport) else []
    writer.writerow(list(fields) + [f"metrics.{k}" for k in extra])
    row = ["" if getattr(obj, f) is None else getattr(obj, f) for f in fields]
    row += [json.dumps(_plain(obj.metrics[k])) for k in extra]
    writer.writerow(row)
    return buf.getvalue().encode()


def from_csv(data: bytes | str) -> dict:
    """Summary fields of a CSV export, typed back."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    rows = list(csv.reader(io.StringIO(data)))
    if len(rows) != 2:
        raise FormatError("CSV export must hold a header and one row")
    out = {}
    for key, raw in zip(*rows):
        if key in ("value", "trials"):
            out[key] = int(raw)
        elif key == "argmax_row":
            out[key] = None if raw == "" else int(raw)
        elif key == "passed":
            out[key] = raw == "True"
        elif key.startswith("metrics."):
            out[key] = json.loads(raw)
        else:
            out[key] = raw
    return out
