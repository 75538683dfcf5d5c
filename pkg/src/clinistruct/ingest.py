"""Format detection, per-format parsers and the CanonicalStatement they share.

Structured formats carry their codes, so statements from them are coded.
Narrative notes are scanned line by line against the registry's surface
forms; a surface that denotes more than one concept yields an uncoded
statement that extraction later resolves through the synonym index.
"""
from __future__ import annotations

import csv
import datetime as dt
import io
import json
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .docstore import DocStore, ObjectRef
from .formats import (
    CSV_HEADER,
    FHIR_CATEGORY_TAG,
    FHIR_CODE_ELEMENT,
    FHIR_DEFAULT_CATEGORY,
    FHIR_SUBJECT_ELEMENT,
    FHIR_SYSTEMS_BY_URL,
    FHIR_TIME_ELEMENT,
    FHIR_TIME_EXT,
    FHIR_VALUE_EXT,
    HL7_CATEGORY,
    HL7_KNOWN_SEGMENTS,
    HL7_SYSTEMS_BY_ID,
    NARRATIVE_SECTIONS,
    NARRATIVE_TITLES,
    FormatKind,
    hl7_unescape,
)
from .ontology import OntologyRegistry, surface_tokens
from .values import CATEGORIES, Value, canonical_unit, coerce_text, parse_date, parse_timestamp, serialize


class ParseError(ValueError):
    """A document cannot be parsed; the message names the locator."""


class MalformedMessageError(ParseError):
    """An HL7 body does not start with an MSH segment."""


@dataclass(frozen=True)
class SourceLink:
    object: ObjectRef | None
    locator: str
    doc_id: str | None = None

    def to_json(self) -> dict[str, Any]:
        return {"digest": self.object.digest if self.object else None,
                "size_bytes": self.object.size_bytes if self.object else None,
                "locator": self.locator, "doc_id": self.doc_id}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> SourceLink:
        ref = ObjectRef(obj["digest"], int(obj["size_bytes"])) if obj.get("digest") else None
        return cls(ref, obj["locator"], obj.get("doc_id"))


@dataclass(frozen=True)
class CanonicalStatement:
    patient: str | None
    category: str
    code_system: str | None
    code: str | None
    display: str
    value: Value
    unit: str | None
    timestamp: dt.datetime | None
    source: SourceLink
    format: FormatKind

    def __post_init__(self) -> None:
        if not self.code and not self.display:
            raise ValueError("a statement needs a code or a display")
        if isinstance(self.value, float) and not self.unit:
            raise ValueError("numeric statements carry a unit or the unit-free marker '1'")

    @property
    def value_text(self) -> str:
        return serialize(self.value, self.unit)

    def content_key(self) -> tuple[Any, ...]:
        """(category, code, value, unit, timestamp), the round-trip identity."""
        return (self.category, self.code, self.value_text, self.unit, self.timestamp)

    def to_json(self) -> dict[str, Any]:
        from .values import encode_value
        value_type, payload = encode_value(self.value)
        return {
            "patient": self.patient, "category": self.category,
            "code_system": self.code_system, "code": self.code, "display": self.display,
            "value_type": value_type, "value": payload, "unit": self.unit,
            "timestamp": self.timestamp.isoformat(timespec="minutes") if self.timestamp else None,
            "format": self.format.value, "source": self.source.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> CanonicalStatement:
        from .values import decode_value
        ts = obj.get("timestamp")
        return cls(
            patient=obj.get("patient"), category=obj["category"],
            code_system=obj.get("code_system"), code=obj.get("code"), display=obj["display"],
            value=decode_value(obj["value_type"], obj["value"]), unit=obj.get("unit"),
            timestamp=dt.datetime.fromisoformat(ts) if ts else None,
            source=SourceLink.from_json(obj["source"]), format=FormatKind(obj["format"]),
        )


@dataclass
class ParsedDocument:
    object: ObjectRef | None
    doc_id: str | None
    format: FormatKind
    patient: str | None
    statements: list[CanonicalStatement] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        return {
            "digest": self.object.digest if self.object else None,
            "size_bytes": self.object.size_bytes if self.object else None,
            "doc_id": self.doc_id, "format": self.format.value, "patient": self.patient,
            "statements": [s.to_json() for s in self.statements],
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> ParsedDocument:
        ref = ObjectRef(obj["digest"], int(obj["size_bytes"])) if obj.get("digest") else None
        return cls(ref, obj.get("doc_id"), FormatKind(obj["format"]), obj.get("patient"),
                   [CanonicalStatement.from_json(s) for s in obj["statements"]],
                   list(obj.get("warnings", [])))


# ---------------------------------------------------------------- detection


def detect_format(data: bytes) -> FormatKind:
    if not data or not data.strip():
        raise ParseError("empty document")
    text = data.lstrip(b"\xef\xbb\xbf \t\r\n")
    if text.startswith(b"MSH|"):
        return FormatKind.HL7_V2
    if text.startswith(b"{"):
        try:
            obj = json.loads(text)
        except ValueError:
            obj = None
        if isinstance(obj, dict) and obj.get("resourceType") == "Bundle":
            return FormatKind.FHIR_JSON
    first = text.split(b"\n", 1)[0].rstrip(b"\r")
    if first.decode("utf-8", errors="replace").split(",") == list(CSV_HEADER):
        return FormatKind.CSV_EXTRACT
    return FormatKind.NARRATIVE


def _decode(data: bytes, where: str) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{where}: invalid UTF-8 at byte {exc.start}") from exc


def _unit(raw: str | None) -> str | None:
    return canonical_unit(raw) if raw else None


def _typed(value: str, unit: str | None) -> tuple[Value, str | None]:
    v = coerce_text(value, unit)
    if isinstance(v, float):
        return v, unit or "1"
    return v, None


# ---------------------------------------------------------------- HL7 v2


def parse_hl7_message(data: bytes, *, ref: ObjectRef | None = None, doc_id: str | None = None,
                      patient: str | None = None, strict: bool = False) -> ParsedDocument:
    text = _decode(data, doc_id or "hl7")
    segments = [s for s in re.split(r"\r\n|\r|\n", text)]
    if not segments or not segments[0].startswith("MSH"):
        raise MalformedMessageError(f"{doc_id or 'hl7'}: segment 0 is not MSH")
    parsed = ParsedDocument(ref, doc_id, FormatKind.HL7_V2, patient)
    sep, comp = "|", "^"
    for idx, seg in enumerate(segments):
        if not seg.strip():
            continue
        where = f"segment {idx}"
        seg_id = seg[:3]
        if seg_id == "MSH":
            if len(seg) < 8:
                raise MalformedMessageError(f"{where}: truncated MSH")
            sep, comp = seg[3], seg[4]
            continue
        fields = seg.split(sep)
        if seg_id not in HL7_KNOWN_SEGMENTS or fields[0] != seg_id:
            msg = f"{where}: unknown segment {fields[0]!r} skipped"
            if strict:
                raise ParseError(msg)
            parsed.warnings.append(msg)
            continue
        if seg_id == "PID":
            if parsed.patient is None and len(fields) > 3:
                parsed.patient = hl7_unescape(fields[3].split(comp)[0]) or None
            continue
        try:
            stmt = _hl7_statement(seg_id, fields, comp, parsed.patient,
                                  SourceLink(ref, where, doc_id))
        except (IndexError, ValueError) as exc:
            msg = f"{where}: malformed {seg_id} segment ({exc})"
            if strict:
                raise ParseError(msg) from exc
            parsed.warnings.append(msg)
            continue
        parsed.statements.append(stmt)
    return parsed


def _field(fields: list[str], i: int) -> str:
    return fields[i] if i < len(fields) else ""


def _hl7_statement(seg_id: str, f: list[str], comp: str, patient: str | None,
                   source: SourceLink) -> CanonicalStatement:
    if seg_id == "OBX":
        cwe, value, unit, ts = f[3], _field(f, 5), _field(f, 6), _field(f, 14)
    elif seg_id == "DG1":
        cwe, value, unit, ts = f[3], _field(f, 4), "", _field(f, 5)
    elif seg_id == "RXA":
        cwe, value, unit, ts = f[5], _field(f, 6), _field(f, 7), f[3]
    elif seg_id == "RXE":
        timing = f[1].split(comp)
        cwe, value, unit, ts = f[2], _field(f, 3), _field(f, 5), timing[3] if len(timing) > 3 else ""
    else:  # PR1
        cwe, value, unit, ts = f[3], _field(f, 4), "", _field(f, 5)
    parts = [hl7_unescape(p) for p in cwe.split(comp)] + ["", "", ""]
    code, display, system_id = parts[0], parts[1], parts[2]
    if not code and not display:
        raise ValueError("no code or display")
    when = parse_timestamp(ts) if ts else None
    if ts and when is None:
        raise ValueError(f"bad timestamp {ts!r}")
    typed, unit_out = _typed(hl7_unescape(value), _unit(hl7_unescape(unit)))
    return CanonicalStatement(
        patient=patient, category=HL7_CATEGORY[seg_id],
        code_system=HL7_SYSTEMS_BY_ID.get(system_id, system_id or None), code=code or None,
        display=display, value=typed, unit=unit_out, timestamp=when, source=source,
        format=FormatKind.HL7_V2,
    )


# ---------------------------------------------------------------- FHIR


def _fhir_value(holder: dict[str, Any]) -> tuple[Value, str | None] | None:
    if "valueQuantity" in holder:
        q = holder["valueQuantity"]
        return float(q["value"]), _unit(q.get("unit") or q.get("code")) or "1"
    if "valueBoolean" in holder:
        return bool(holder["valueBoolean"]), None
    if "valueDate" in holder:
        day = parse_date(str(holder["valueDate"]))
        if day is None:
            raise ValueError(f"bad valueDate {holder['valueDate']!r}")
        return day, None
    if "valueString" in holder:
        return _typed(str(holder["valueString"]), None)
    return None


def parse_fhir_bundle(data: bytes, *, ref: ObjectRef | None = None, doc_id: str | None = None,
                      patient: str | None = None, strict: bool = False) -> ParsedDocument:
    where = doc_id or "fhir"
    try:
        bundle = json.loads(_decode(data, where))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{where}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(bundle, dict) or bundle.get("resourceType") != "Bundle":
        raise ParseError(f"{where}: $.resourceType is not 'Bundle'")
    parsed = ParsedDocument(ref, doc_id, FormatKind.FHIR_JSON, patient)
    entries = bundle.get("entry") or []
    for i, entry in enumerate(entries):
        res = entry.get("resource") or {}
        if res.get("resourceType") == "Patient" and parsed.patient is None:
            parsed.patient = res.get("id")
    for i, entry in enumerate(entries):
        path = f"$.entry[{i}].resource"
        res = entry.get("resource") or {}
        rtype = res.get("resourceType")
        if rtype == "Patient":
            continue
        try:
            stmt = _fhir_statement(res, parsed.patient, SourceLink(ref, path, doc_id))
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            msg = f"{path}: cannot read {rtype} ({exc})"
            if strict:
                raise ParseError(msg) from exc
            parsed.warnings.append(msg)
            continue
        parsed.statements.append(stmt)
    return parsed


def _fhir_statement(res: dict[str, Any], patient: str | None,
                    source: SourceLink) -> CanonicalStatement:
    rtype = res["resourceType"]
    if rtype not in FHIR_DEFAULT_CATEGORY:
        raise ValueError(f"unsupported resourceType {rtype!r}")
    category = FHIR_DEFAULT_CATEGORY[rtype]
    for tag in (res.get("meta") or {}).get("tag", []):
        if tag.get("system") == FHIR_CATEGORY_TAG and tag.get("code") in CATEGORIES:
            category = tag["code"]
    element, as_list = FHIR_CODE_ELEMENT[rtype]
    concept = res[element][0] if as_list else res[element]
    coding = concept["coding"][0]
    system = FHIR_SYSTEMS_BY_URL.get(coding.get("system", ""), coding.get("system"))
    extensions = {e.get("url"): e for e in res.get("extension", [])}
    path = FHIR_TIME_ELEMENT[rtype]
    if path is None:
        raw_ts = extensions.get(FHIR_TIME_EXT, {}).get("valueDateTime")
    elif "." in path:
        outer, inner = path.split(".")
        raw_ts = (res.get(outer) or {}).get(inner)
    else:
        raw_ts = res.get(path)
    when = parse_timestamp(raw_ts) if raw_ts else None
    if raw_ts and when is None:
        raise ValueError(f"bad date-time {raw_ts!r}")
    holder = res if rtype == "Observation" else extensions.get(FHIR_VALUE_EXT, {})
    typed = _fhir_value(holder)
    if typed is None:
        raise ValueError("no value")
    subject = res.get(FHIR_SUBJECT_ELEMENT.get(rtype, "subject"), {}).get("reference", "")
    return CanonicalStatement(
        patient=patient or subject.removeprefix("Patient/") or None,
        category=category, code_system=system, code=coding.get("code"),
        display=coding.get("display", ""), value=typed[0], unit=typed[1],
        timestamp=when, source=source, format=FormatKind.FHIR_JSON,
    )


# ---------------------------------------------------------------- CSV


def parse_csv_extract(data: bytes, *, ref: ObjectRef | None = None, doc_id: str | None = None,
                      patient: str | None = None, strict: bool = False) -> ParsedDocument:
    where = doc_id or "csv"
    reader = csv.reader(io.StringIO(_decode(data, where), newline=""))
    parsed = ParsedDocument(ref, doc_id, FormatKind.CSV_EXTRACT, patient)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(f"{where}: line 1: missing header") from None
    except csv.Error as exc:
        raise ParseError(f"{where}: line 1: {exc}") from exc
    if tuple(header) != CSV_HEADER:
        raise ParseError(f"{where}: line 1: unexpected header {header!r}")
    while True:
        try:
            row = next(reader)
        except StopIteration:
            break
        except csv.Error as exc:
            raise ParseError(f"{where}: line {reader.line_num}: {exc}") from exc
        line = reader.line_num
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise ParseError(f"{where}: line {line}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        _event_id, ts, category, code_cell, display, value, unit = row
        system, _, code = code_cell.partition(":")
        when = parse_timestamp(ts) if ts else None
        try:
            if ts and when is None:
                raise ValueError(f"bad timestamp {ts!r}")
            if category not in CATEGORIES:
                raise ValueError(f"unknown category {category!r}")
            typed, unit_out = _typed(value, _unit(unit))
            stmt = CanonicalStatement(
                patient=parsed.patient, category=category, code_system=system or None,
                code=code or None, display=display, value=typed, unit=unit_out, timestamp=when,
                source=SourceLink(ref, f"line {line}", doc_id), format=FormatKind.CSV_EXTRACT,
            )
        except ValueError as exc:
            if strict:
                raise ParseError(f"{where}: line {line}: {exc}") from exc
            parsed.warnings.append(f"line {line}: {exc}")
            continue
        parsed.statements.append(stmt)
    return parsed


# ---------------------------------------------------------------- narrative

_WORD = re.compile(r"[^\W_]+")
_NARR_TS = re.compile(
    r"(?<!\d)(\d{4}-\d{2}-\d{2}|\d{2}\.\d{2}\.\d{4})(?:(?:\s+at\s+|T|\s+)(\d{2}:\d{2}))?(?!\d)")
_NUM_UNIT = re.compile(r"(?<![\w.])(-?\d+(?:\.\d+)?)(?![\d.]\d)(?:[ \t]*([^\s;,()]*[^\s;,().]))?")
_UNIT_STOP = {"on", "at", "recorded", "collected", "dated", "documented", "reported", "in"}
_TEXT_LINK = re.compile(r"^\s*(?::|-|documented as\b|reported as\b|recorded as\b|was\b|is\b|of\b)?\s*",
                        re.IGNORECASE)
_TEXT_STOP = re.compile(r";|\s+on\s+(?=\d)", re.IGNORECASE)
_PATIENT_LINE = re.compile(r"^Patient ID:\s*(\S+)", re.MULTILINE)
_SKIP_LINES = {*NARRATIVE_SECTIONS.values(), *NARRATIVE_TITLES}


def _within_one_edit(a: str, b: str) -> bool:
    if a == b:
        return True
    la, lb = len(a), len(b)
    if abs(la - lb) > 1:
        return False
    if la > lb:
        a, b, la, lb = b, a, lb, la
    i = 0
    while i < la and a[i] == b[i]:
        i += 1
    if la == lb:
        return a[i + 1:] == b[i + 1:]
    return a[i:] == b[i + 1:]


def _deletes(word: str) -> set[str]:
    return {word} | {word[:i] + word[i + 1:] for i in range(len(word))}


class SurfaceMatcher:
    """Token-level longest-match over registry surfaces.

    Surface tokens of six or more characters also match text tokens within
    one edit (substitution, insertion or deletion).
    """

    FUZZY_MIN = 6

    def __init__(self, registry: OntologyRegistry):
        self.registry = registry
        self.by_first: dict[str, list[tuple[tuple[str, ...], str]]] = {}
        self._fuzzy: dict[str, set[str]] = {}
        vocab: set[str] = set()
        for norm in registry.synonym_index:
            toks = surface_tokens(norm)
            self.by_first.setdefault(toks[0], []).append((toks, norm))
            vocab.update(toks)
        for entries in self.by_first.values():
            entries.sort(key=lambda e: (-len(e[0]), e[1]))
        for tok in vocab:
            if len(tok) >= self.FUZZY_MIN:
                for d in _deletes(tok):
                    self._fuzzy.setdefault(d, set()).add(tok)
        self._cache: dict[str, frozenset[str]] = {}

    def _variants(self, token: str) -> frozenset[str]:
        """Surface tokens this text token may stand for."""
        hit = self._cache.get(token)
        if hit is None:
            out = {token}
            if len(token) >= self.FUZZY_MIN - 1:
                for d in _deletes(token):
                    for cand in self._fuzzy.get(d, ()):
                        if _within_one_edit(token, cand):
                            out.add(cand)
            hit = self._cache[token] = frozenset(out)
        return hit

    def first_match(self, tokens: Sequence[str]) -> tuple[int, int, str] | None:
        """(start token, end token, normalized surface) of the leftmost longest match."""
        for i in range(len(tokens)):
            best: tuple[int, int, str] | None = None
            # exact spelling first, then a fixed order so results never
            # depend on set iteration
            variants = sorted(self._variants(tokens[i]), key=lambda v: (v != tokens[i], v))
            for variant in variants:
                for surf_toks, norm in self.by_first.get(variant, ()):
                    n = len(surf_toks)
                    if best is not None and n <= best[1] - best[0]:
                        break
                    if i + n > len(tokens):
                        continue
                    if all(surf_toks[k] in self._variants(tokens[i + k]) for k in range(1, n)):
                        best = (i, i + n, norm)
                        break
            if best is not None:
                return best
        return None


def parse_narrative_note(data: bytes, registry: OntologyRegistry, *,
                         ref: ObjectRef | None = None, doc_id: str | None = None,
                         patient: str | None = None, strict: bool = False,
                         matcher: SurfaceMatcher | None = None) -> ParsedDocument:
    text = _decode(data, doc_id or "narrative")
    matcher = matcher or SurfaceMatcher(registry)
    parsed = ParsedDocument(ref, doc_id, FormatKind.NARRATIVE, patient)
    if parsed.patient is None:
        m = _PATIENT_LINE.search(text)
        parsed.patient = m.group(1) if m else None
    offset = 0
    in_header = True
    for line in text.splitlines(keepends=True):
        start = offset
        offset += len(line)
        body = line.rstrip("\r\n")
        if in_header:
            # demographic block runs up to the first blank line
            in_header = bool(body.strip())
            continue
        if not body.strip() or body.strip() in _SKIP_LINES or body.startswith("--"):
            continue
        stmt = _narrative_statement(body, start, matcher, parsed.patient, ref, doc_id)
        if stmt is not None:
            parsed.statements.append(stmt)
    return parsed


def _narrative_statement(line: str, start: int, matcher: SurfaceMatcher, patient: str | None,
                         ref: ObjectRef | None, doc_id: str | None) -> CanonicalStatement | None:
    words = list(_WORD.finditer(line))
    hit = matcher.first_match([w.group().casefold() for w in words])
    if hit is None:
        return None
    i, j, norm = hit
    term_start, term_end = words[i].start(), words[j - 1].end()
    keys = matcher.registry.synonym_index[norm]
    concepts = [matcher.registry.concepts[k] for k in sorted(keys, key=str)]
    lead = concepts[0]

    ts_match = None
    for m in _NARR_TS.finditer(line):
        if m.end() <= term_start or m.start() >= term_end:
            ts_match = m
            break
    when = None
    if ts_match is not None:
        when = parse_timestamp(ts_match.group(1) + (f" {ts_match.group(2)}" if ts_match.group(2) else ""))

    rest = line[term_end:]
    if ts_match is not None and ts_match.start() >= term_end:
        a, b = ts_match.start() - term_end, ts_match.end() - term_end
        rest = rest[:a] + " " * (b - a) + rest[b:]
    value: Value
    unit: str | None = None
    if lead.value_kind == "date":
        if when is None:
            return None
        value = when.date()
    elif lead.value_kind == "numeric":
        m = _NUM_UNIT.search(rest)
        if m is None:
            return None
        raw_unit = m.group(2)
        if raw_unit and raw_unit.casefold() in _UNIT_STOP:
            raw_unit = None
        value, unit = float(m.group(1)), _unit(raw_unit) or "1"
    else:
        rest = rest[_TEXT_LINK.match(rest).end():]
        stop = _TEXT_STOP.search(rest)
        raw = (rest[:stop.start()] if stop else rest).strip()
        if raw.endswith("."):
            raw = raw[:-1].rstrip()
        if not raw:
            return None
        value = coerce_text(raw, None)
        if lead.value_kind == "boolean" and not isinstance(value, bool):
            return None
    coded = len(concepts) == 1
    # a typo-tolerant hit is reported under its registered form
    exact = " ".join(w.group().casefold() for w in words[i:j]) == norm
    display = line[term_start:term_end] if exact else norm
    return CanonicalStatement(
        patient=patient, category=lead.category,
        code_system=lead.key.system if coded else None, code=lead.key.code if coded else None,
        display=display, value=value, unit=unit, timestamp=when,
        source=SourceLink(ref, f"chars {start + term_start}-{start + len(line)}", doc_id),
        format=FormatKind.NARRATIVE,
    )


# ---------------------------------------------------------------- routing


def parse_document(data: bytes, registry: OntologyRegistry | None = None, *,
                   ref: ObjectRef | None = None, doc_id: str | None = None,
                   patient: str | None = None, strict: bool = False,
                   matcher: SurfaceMatcher | None = None) -> ParsedDocument:
    fmt = detect_format(data)
    kw = dict(ref=ref, doc_id=doc_id, patient=patient, strict=strict)
    if fmt is FormatKind.HL7_V2:
        return parse_hl7_message(data, **kw)
    if fmt is FormatKind.FHIR_JSON:
        return parse_fhir_bundle(data, **kw)
    if fmt is FormatKind.CSV_EXTRACT:
        return parse_csv_extract(data, **kw)
    if registry is None and matcher is None:
        raise ValueError("narrative parsing needs a registry")
    return parse_narrative_note(data, registry or matcher.registry, matcher=matcher, **kw)


def resolve_locator(data: bytes, fmt: FormatKind, locator: str) -> str:
    """Text at ``locator`` inside a document body."""
    text = data.decode("utf-8")
    if fmt is FormatKind.HL7_V2:
        idx = int(locator.removeprefix("segment "))
        return re.split(r"\r\n|\r|\n", text)[idx]
    if fmt is FormatKind.CSV_EXTRACT:
        line = int(locator.removeprefix("line "))
        return text.splitlines()[line - 1]
    if fmt is FormatKind.NARRATIVE:
        a, b = locator.removeprefix("chars ").split("-")
        return text[int(a):int(b)]
    m = re.fullmatch(r"\$\.entry\[(\d+)\]\.resource", locator)
    if m is None:
        raise ValueError(f"unsupported locator {locator!r}")
    return json.dumps(json.loads(text)["entry"][int(m.group(1))]["resource"], ensure_ascii=False)


def ingest_store(store: DocStore, registry: OntologyRegistry, *, strict: bool = False,
                 records: Iterable[Any] | None = None) -> list[ParsedDocument]:
    """Parse every indexed document, taking the patient from its tags."""
    matcher = SurfaceMatcher(registry)
    out = []
    for rec in records if records is not None else store.records():
        data = store.get_object(rec.object)
        out.append(parse_document(data, registry, ref=rec.object, doc_id=rec.tags.get("doc_id"),
                                  patient=rec.tags.get("patient"), strict=strict, matcher=matcher))
    return out
