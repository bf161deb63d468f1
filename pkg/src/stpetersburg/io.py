"""Readers and writers for the CSV, JSON and digit-file formats.

CSV: comma separated, header row, LF endings, floats with 12 significant
digits and the literal ``inf`` for infinities.  JSON: one object per
report.  Digit files: a single ASCII line of '0'/'1'.
"""

from __future__ import annotations

import csv
import io
import json
import math
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import PreconditionError
from .streams import as_digits, to_word

SIG_DIGITS = 12


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.{SIG_DIGITS}g}"


def fmt_outward(x: Fraction, upward: bool) -> str:
    """``x`` rounded to 12 significant digits away from the enclosed set."""
    rounding = ROUND_CEILING if upward else ROUND_FLOOR
    # one directed division at ample precision, then a directed rounding to
    # 12 digits; both move the same way, so the result is the 12-digit bound
    wide = Context(prec=max(len(str(abs(x.numerator))), len(str(x.denominator))) + 30,
                   rounding=rounding)
    q = wide.divide(Decimal(x.numerator), Decimal(x.denominator))
    return format(Context(prec=SIG_DIGITS, rounding=rounding).plus(q), f".{SIG_DIGITS}g")


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([c if isinstance(c, str) else fmt(c) for c in r])
    return buf.getvalue()


def _parse_cell(s: str):
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def read_csv(text: str) -> list[dict]:
    """Rows of a CSV produced by :func:`csv_text`, with numbers parsed."""
    r = csv.reader(io.StringIO(text))
    header = next(r)
    return [dict(zip(header, (_parse_cell(c) for c in row))) for row in r]


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def json_text(obj: dict) -> str:
    return json.dumps(_jsonable(obj)) + "\n"


def read_json(text: str) -> dict:
    return json.loads(text)


def read_digits(path: str | Path) -> str:
    text = Path(path).read_text(encoding="ascii")
    line = text[:-1] if text.endswith("\n") else text
    if "\n" in line or not line or line.strip("01"):
        raise PreconditionError(f"{path}: expected one line of 0/1 digits")
    return line


def digits_line(digits) -> str:
    return to_word(as_digits(digits)) + "\n"
