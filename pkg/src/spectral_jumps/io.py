"""Reading and writing signal descriptions and sample files.

Signal documents are JSON::

    {"name": "staircase",
     "pieces": [{"interval": ["0", "1/5"], "coeffs": [0.0]},
                {"interval": ["1/5", "2/5"], "coeffs": [2.0]}, ...]}

Interval endpoints are exact fractions of a full turn (``"p/q"`` means
``p/q * 2pi``); ``coeffs`` are ascending polynomial coefficients in ``x``
(radians).  A two-dimensional separable field is
``{"terms": [{"x": <signal or null>, "y": <signal or null>}, ...]}`` where
``null`` is the constant 1.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .corpus import Piece, SignalSpec
from .errors import InputFormatError, SignalSpecError
from .torus2d import SeparableField


def _parse_turns(text) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise InputFormatError(f"interval endpoint {text!r} must be a 'p/q' string or an integer")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputFormatError(f"bad rational endpoint {text!r}") from exc


def spec_from_dict(doc: dict) -> SignalSpec:
    try:
        raw = doc["pieces"]
    except (KeyError, TypeError):
        raise InputFormatError("signal document needs a 'pieces' list") from None
    pieces = []
    for i, item in enumerate(raw):
        try:
            lo, hi = item["interval"]
            coeffs = tuple(float(c) for c in item["coeffs"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputFormatError(f"piece {i}: expected 'interval' [lo, hi] and numeric 'coeffs'") from exc
        pieces.append(Piece(_parse_turns(lo), _parse_turns(hi), coeffs))
    try:
        return SignalSpec(tuple(pieces), name=str(doc.get("name", "custom")))
    except SignalSpecError as exc:
        raise InputFormatError(str(exc)) from exc


def spec_to_dict(spec: SignalSpec) -> dict:
    return {
        "name": spec.name,
        "pieces": [
            {"interval": [str(p.start), str(p.stop)], "coeffs": list(p.coeffs)}
            for p in spec.pieces
        ],
    }


def dumps_spec(spec: SignalSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2)


def field_from_dict(doc: dict) -> SeparableField:
    terms = []
    for t in doc.get("terms", []):
        gx = None if t.get("x") is None else spec_from_dict(t["x"])
        hy = None if t.get("y") is None else spec_from_dict(t["y"])
        terms.append((gx, hy))
    if not terms:
        raise InputFormatError("field document needs a non-empty 'terms' list")
    return SeparableField(tuple(terms), name=str(doc.get("name", "separable")))


def _read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def load_spec(path) -> SignalSpec:
    return spec_from_dict(_read_json(path))


def load_field(path) -> SeparableField:
    return field_from_dict(_read_json(path))


def save_spec(spec: SignalSpec, path) -> None:
    Path(path).write_text(dumps_spec(spec) + "\n", encoding="utf-8")


def load_samples(path) -> np.ndarray:
    """One real per line, read as values on ``x_m = 2 pi m / M``.  Blank lines are skipped."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc.strerror}") from exc
    values = []
    for lineno, line in enumerate(lines, start=1):
        s = line.strip()
        if not s:
            continue
        try:
            values.append(float(s))
        except ValueError:
            raise InputFormatError(f"{path}, line {lineno}: not a number: {s!r}") from None
    if not values:
        raise InputFormatError(f"{path}: no samples")
    return np.asarray(values, dtype=float)
