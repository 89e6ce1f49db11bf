"""Matrix and vector parsing, and JSON-safe rendering of exact and multiprecision numbers."""

from __future__ import annotations

import json
import math
import re
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np

from .errors import ParseError
from .exact_linalg import IntMatrix


def parse_matrix(text: str) -> IntMatrix:
    """Square integer matrix from a JSON array of arrays or a whitespace grid."""
    stripped = text.strip()
    if not stripped:
        raise ParseError("empty matrix", line=1, column=1)
    if stripped.startswith("["):
        try:
            rows = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
        if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
            raise ParseError("expected a non-empty array of arrays", 1, 1)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                if isinstance(x, bool) or not isinstance(x, int):
                    raise ParseError(f"entry {x!r} is not an integer (row {i + 1}, entry {j + 1})", 1, 1)
        positions = None
    else:
        rows, positions = [], []
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            row = []
            for m in re.finditer(r"[^\s,]+", line):
                try:
                    row.append(int(m.group()))
                except ValueError:
                    raise ParseError(f"entry {m.group()!r} is not an integer", lineno, m.start() + 1) from None
            rows.append(row)
            positions.append(lineno)
    n = len(rows)
    for i, row in enumerate(rows):
        if len(row) != n:
            line = positions[i] if positions else 1
            raise ParseError(f"matrix is not square: row {i + 1} has {len(row)} entries, expected {n}", line, 1)
    return IntMatrix(tuple(tuple(r) for r in rows))


def load_matrix(path: str | Path) -> IntMatrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_matrix(text)


def parse_vector(text: str, d: int | None = None) -> list[Fraction]:
    """Comma or whitespace separated rationals such as ``1/3, 0.25, -2``."""
    tokens = text.replace(",", " ").split()
    if not tokens:
        raise ParseError("empty vector", 1, 1)
    out = []
    for tok in tokens:
        try:
            out.append(Fraction(tok))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"entry {tok!r} is not a rational number", 1, text.index(tok) + 1) from None
    if d is not None and len(out) != d:
        raise ParseError(f"vector has {len(out)} entries, expected {d}", 1, 1)
    return out


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{text!r} is not a rational number", 1, 1) from None


def decimal(x, digits: int | None = None) -> str:
    """Decimal string for an mpf, float, Fraction or int."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, Fraction):
        x = mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if digits is None:
        digits = max(15, int(mpmath.mp.prec * math.log10(2)))
    return mpmath.nstr(mpmath.mpf(x), digits, strip_zeros=False)


def jsonable(obj, digits: int | None = None):
    """Recursively replace numbers by strings so no binary float reaches the report."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (mpmath.mpc, complex, np.complexfloating)):
        return {"re": decimal(mpmath.re(obj), digits), "im": decimal(mpmath.im(obj), digits)}
    if isinstance(obj, (mpmath.mpf, float, np.floating)):
        return decimal(obj, digits)
    if isinstance(obj, dict):
        return {str(k): jsonable(v, digits) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist(), digits)
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v, digits) for v in items]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def render_text(obj, indent: int = 0) -> str:
    """Readable, lossy rendering of a JSON-safe report."""
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_short(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat_list(v):
                lines.append(f"{pad}-")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_short(v)}")
    else:
        lines.append(f"{pad}{_short(obj)}")
    return "\n".join(lines)


def _flat_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _short(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    if isinstance(v, str) and len(v) > 24 and _looks_numeric(v):
        return mpmath.nstr(mpmath.mpf(v), 12)
    return str(v)


def _looks_numeric(s: str) -> bool:
    try:
        mpmath.mpf(s)
        return True
    except (ValueError, TypeError):
        return False
