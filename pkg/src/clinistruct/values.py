"""Typed clinical values and their canonical text serialization.

Every value that crosses a module boundary (ledger truth, parsed statement,
extracted assignment) is compared through :func:`match_key`, which is applied
to both sides of an exact-match comparison.
"""
from __future__ import annotations

import datetime as dt
import math
import re
from typing import Union

SENTINEL = "None"

CATEGORIES = (
    "Immunizations",
    "Codes",
    "Names",
    "Medications",
    "Symptoms",
    "Conditions",
    "Observations",
    "Care-plans",
    "Procedures",
    "Devices",
)

VALUE_KINDS = ("numeric", "coded", "date", "free-text", "boolean")

CODE_SYSTEMS = ("LOINC", "SNOMED", "RXNORM", "ICD10")

# UCUM-style casing; "1" is the explicit unit-free marker.
_UNITS = {
    "ng/ml": "ng/mL",
    "mg/dl": "mg/dL",
    "g/dl": "g/dL",
    "mmol/l": "mmol/L",
    "umol/l": "umol/L",
    "meq/l": "mEq/L",
    "iu/ml": "IU/mL",
    "ku/l": "kU/L",
    "u/l": "U/L",
    "mg/l": "mg/L",
    "l": "L",
    "l/min": "L/min",
    "ml": "mL",
    "mg": "mg",
    "mcg": "mcg",
    "kg": "kg",
    "kg/m2": "kg/m2",
    "cm": "cm",
    "mm": "mm",
    "mm[hg]": "mm[Hg]",
    "cel": "Cel",
    "%": "%",
    "/min": "/min",
    "10*3/ul": "10*3/uL",
    "puffs/day": "puffs/day",
    "days": "days",
    "weeks": "weeks",
    "months": "months",
    "years": "years",
    "score": "score",
    "1": "1",
}

Value = Union[float, str, dt.date, bool]

ISO_DATE = re.compile(r"(\d{4})-(\d{2})-(\d{2})")
DOTTED_DATE = re.compile(r"(\d{2})\.(\d{2})\.(\d{4})")
HL7_DATE = re.compile(r"(\d{4})(\d{2})(\d{2})")
_NUMBER = re.compile(r"-?\d+(?:\.\d+)?")
_QUANTITY = re.compile(r"^(-?\d+(?:\.\d+)?)(?:\s*(\S+))?$")
_WS = re.compile(r"\s+")


def canonical_unit(unit: str | None) -> str | None:
    if unit is None:
        return None
    unit = unit.strip()
    if not unit:
        return None
    return _UNITS.get(unit.casefold(), unit)


def format_number(x: float) -> str:
    """Shortest round-trip decimal, without a trailing ``.0``."""
    if isinstance(x, bool) or not math.isfinite(float(x)):
        raise ValueError(f"not a finite number: {x!r}")
    x = float(x)
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def parse_date(text: str) -> dt.date | None:
    """Parse ISO ``2017-07-31``, dotted ``31.07.2017`` or HL7 ``20170731``."""
    text = text.strip()
    for pattern, order in ((ISO_DATE, "ymd"), (DOTTED_DATE, "dmy"), (HL7_DATE, "ymd")):
        m = pattern.fullmatch(text)
        if m:
            parts = dict(zip(order, m.groups()))
            try:
                return dt.date(int(parts["y"]), int(parts["m"]), int(parts["d"]))
            except ValueError:
                return None
    return None


_TS_PATTERNS = (
    re.compile(r"(\d{4}-\d{2}-\d{2})(?:[T ](?:at )?(\d{2}):(\d{2})(?::\d{2})?)?"),
    re.compile(r"(\d{2}\.\d{2}\.\d{4})(?:[T ](?:at )?(\d{2}):(\d{2})(?::\d{2})?)?"),
)
_HL7_TS = re.compile(r"(\d{8})(?:(\d{2})(\d{2})(?:\d{2})?)?")


def parse_timestamp(text: str) -> dt.datetime | None:
    """Accepts ISO, dotted and HL7 ``YYYYMMDDHHMM[SS]`` date-times.

    A bare date maps to midnight.
    """
    text = text.strip()
    for pattern in (*_TS_PATTERNS, _HL7_TS):
        m = pattern.fullmatch(text)
        if m:
            day = parse_date(m.group(1))
            if day is None:
                return None
            hh, mm = m.group(2), m.group(3)
            return dt.datetime(day.year, day.month, day.day, int(hh or 0), int(mm or 0))
    return None


def format_timestamp(ts: dt.datetime, style: str = "iso") -> str:
    if style == "iso":
        return ts.strftime("%Y-%m-%dT%H:%M")
    if style == "dotted":
        return ts.strftime("%d.%m.%Y %H:%M")
    if style == "hl7":
        return ts.strftime("%Y%m%d%H%M")
    raise ValueError(f"unknown timestamp style {style!r}")


def format_date(day: dt.date, style: str = "iso") -> str:
    if style == "iso":
        return day.isoformat()
    if style == "dotted":
        return day.strftime("%d.%m.%Y")
    if style == "hl7":
        return day.strftime("%Y%m%d")
    raise ValueError(f"unknown date style {style!r}")


def serialize(value: Value | None, unit: str | None = None) -> str:
    """Canonical text of a typed value (the ledger's ``true_value`` form)."""
    if value is None:
        return SENTINEL
    if isinstance(value, bool):
        return "Yes" if value else "No"
    if isinstance(value, (int, float)):
        u = canonical_unit(unit)
        num = format_number(value)
        return num if u in (None, "1") else f"{num} {u}"
    if isinstance(value, dt.datetime):
        return format_timestamp(value)
    if isinstance(value, dt.date):
        return value.isoformat()
    return _WS.sub(" ", str(value).strip())


def coerce_text(text: str, unit: str | None = None) -> Value:
    """Type a raw text value the way every parser does.

    A unit makes the value numeric; otherwise dates and Yes/No are
    recognized and everything else stays text.
    """
    text = text.strip()
    if canonical_unit(unit) is not None and _NUMBER.fullmatch(text):
        return float(text)
    day = parse_date(text)
    if day is not None and (ISO_DATE.fullmatch(text) or DOTTED_DATE.fullmatch(text)):
        return day
    low = text.casefold()
    if low == "yes":
        return True
    if low == "no":
        return False
    return _WS.sub(" ", text)


def match_key(text: str | None) -> str:
    """Normalization applied to both truth and extraction before comparison.

    Case-fold, trim, collapse whitespace, ISO dates, canonical unit casing,
    shortest decimal.
    """
    if text is None:
        return SENTINEL.casefold()
    text = _WS.sub(" ", str(text).strip())
    if not text:
        return SENTINEL.casefold()
    day = parse_date(text)
    if day is not None and not _is_bare_digits(text):
        return day.isoformat()
    m = _QUANTITY.match(text)
    if m:
        num = format_number(float(m.group(1)))
        unit = canonical_unit(m.group(2))
        text = num if unit in (None, "1") else f"{num} {unit}"
    return text.casefold()


def _is_bare_digits(text: str) -> bool:
    # eight bare digits are a number, not a date, in free text
    return HL7_DATE.fullmatch(text) is not None


def values_match(truth: str | None, extracted: str | None) -> bool:
    return match_key(truth) == match_key(extracted)


def encode_value(value: Value) -> tuple[str, object]:
    """(value_type, JSON-safe payload) for persisting a typed value."""
    if isinstance(value, bool):
        return "boolean", value
    if isinstance(value, (int, float)):
        return "quantity", float(value)
    if isinstance(value, dt.date):
        return "date", value.isoformat()
    return "text", str(value)


def decode_value(value_type: str, payload: object) -> Value:
    if value_type == "boolean":
        return bool(payload)
    if value_type == "quantity":
        return float(payload)  # type: ignore[arg-type]
    if value_type == "date":
        return dt.date.fromisoformat(str(payload))
    if value_type == "text":
        return str(payload)
    raise ValueError(f"unknown value type {value_type!r}")
