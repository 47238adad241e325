"""JSON and CSV interchange formats.

Sums are stored as ``{"terms": [{"a": [re, im], "z": [re, im]}, ...]}`` and
samples as CSV rows ``k,re,im`` under a header. Floats are written with 17
significant digits so that files round-trip exactly and identical inputs give
byte-identical output.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .core import ExponentialSum, SampleSequence
from .errors import ValidationError


def _float(x: float) -> str:
    x = float(x)
    if not np.isfinite(x):
        raise ValidationError(f"cannot serialise non-finite value {x}")
    out = format(x, ".17g")
    if out == "-0":
        out = "0"
    return out


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON: dict order preserved, floats at 17 digits, complex as [re, im]."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{_float(obj.real)}, {_float(obj.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # short numeric rows stay on one line
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def sum_to_dict(s: ExponentialSum) -> dict:
    return {"terms": [{"a": complex(a), "z": complex(z)} for a, z in s.terms]}


def _pair(v, what: str) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        try:
            return complex(float(v[0]), float(v[1]))
        except (TypeError, ValueError):
            pass
    raise ValidationError(f"{what} must be a [re, im] pair, got {v!r}")


def sum_from_dict(d) -> ExponentialSum:
    if not isinstance(d, dict) or not isinstance(d.get("terms"), list):
        raise ValidationError('expected an object with a "terms" list')
    terms = []
    for i, t in enumerate(d["terms"]):
        if not isinstance(t, dict) or "a" not in t or "z" not in t:
            raise ValidationError(f'term {i} must have "a" and "z"')
        terms.append((_pair(t["a"], f"terms[{i}].a"), _pair(t["z"], f"terms[{i}].z")))
    return ExponentialSum.from_terms(terms)


def load_sum(path) -> ExponentialSum:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON ({exc})") from exc
    return sum_from_dict(data)


def save_sum(s: ExponentialSum, path) -> None:
    Path(path).write_text(dumps(sum_to_dict(s)) + "\n")


def samples_to_csv(samples: SampleSequence) -> str:
    buf = io.StringIO()
    buf.write("k,re,im\n")
    for k, v in enumerate(samples.values):
        buf.write(f"{k},{_float(v.real)},{_float(v.imag)}\n")
    return buf.getvalue()


def samples_from_csv(text: str) -> SampleSequence:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows or [c.strip() for c in rows[0]] != ["k", "re", "im"]:
        raise ValidationError('samples CSV must start with the header "k,re,im"')
    vals = []
    for n, r in enumerate(rows[1:]):
        if len(r) != 3:
            raise ValidationError(f"samples CSV row {n + 2}: expected 3 columns")
        try:
            k, re, im = int(r[0]), float(r[1]), float(r[2])
        except ValueError as exc:
            raise ValidationError(f"samples CSV row {n + 2}: {exc}") from exc
        if k != n:
            raise ValidationError(f"samples CSV row {n + 2}: expected k = {n}, got {k}")
        vals.append(complex(re, im))
    return SampleSequence(vals)


def load_samples(path) -> SampleSequence:
    return samples_from_csv(Path(path).read_text())


def save_samples(samples: SampleSequence, path) -> None:
    Path(path).write_text(samples_to_csv(samples))
