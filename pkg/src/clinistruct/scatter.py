"""Fragment patient records into heterogeneous documents, optionally noisy.

Four text formats are emitted: a FHIR-style JSON bundle, HL7 v2 messages,
a flat CSV extract and a narrative note laid out like a printed report.
Noise is applied at render time only; the ledger is never touched.
"""
from __future__ import annotations

import csv
import datetime as dt
import hashlib
import io
import json
import random
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .corpus import ClinicalEvent, PatientRecord, VariableSpec, stable_seed
from .formats import (
    CSV_HEADER,
    FHIR_CATEGORY_TAG,
    FHIR_CODE_ELEMENT,
    FHIR_RESOURCE,
    FHIR_SUBJECT_ELEMENT,
    FHIR_SYSTEM_URLS,
    FHIR_TIME_ELEMENT,
    FHIR_TIME_EXT,
    FHIR_VALUE_EXT,
    HL7_SEGMENT,
    HL7_SEGMENT_SEP,
    HL7_SYSTEM_IDS,
    NARRATIVE_SECTIONS,
    NARRATIVE_TEMPLATES,
    NARRATIVE_TITLES,
    UCUM_URL,
    FormatKind,
    UnsupportedCategoryError,
    hl7_escape,
)
from .values import CATEGORIES, Value, format_date, format_number, format_timestamp

MIN_DOCS, MAX_DOCS = 2, 20


@dataclass(frozen=True)
class MedicalDocument:
    doc_id: str
    patient_id: str
    disease_id: str
    format: FormatKind
    body: bytes
    created_at: dt.datetime
    covered_event_ids: tuple[str, ...]
    # render context, kept so noise can re-render; not part of identity
    events: tuple[ClinicalEvent, ...] = field(default=(), compare=False, repr=False)
    record: PatientRecord | None = field(default=None, compare=False, repr=False)
    render_seed: int = field(default=0, compare=False, repr=False)

    @property
    def filename(self) -> str:
        return f"{self.doc_id}.{self.format.extension}"

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.body).hexdigest()


@dataclass(frozen=True)
class NoiseProfile:
    """Render-time corruption rates. ``categories``/``diseases`` restrict
    which events are eligible; None means all."""

    synonym_swap_rate: float = 0.0
    typo_rate: float = 0.0
    duplicate_conflict_rate: float = 0.0
    omission_rate: float = 0.0
    format_jitter_rate: float = 0.0
    ambiguity_boost: Mapping[str, float] = field(default_factory=dict, hash=False)
    categories: frozenset[str] | None = None
    diseases: frozenset[str] | None = None

    _RATES = ("synonym_swap_rate", "typo_rate", "duplicate_conflict_rate",
              "omission_rate", "format_jitter_rate")

    def __post_init__(self) -> None:
        for name in self._RATES:
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {rate!r}")
        for cls, boost in self.ambiguity_boost.items():
            if boost < 0:
                raise ValueError(f"ambiguity_boost[{cls!r}] must be >= 0")
        if self.categories is not None:
            unknown = set(self.categories) - set(CATEGORIES)
            if unknown:
                raise ValueError(f"unknown categories in noise profile: {sorted(unknown)}")

    def is_zero(self) -> bool:
        return all(getattr(self, name) == 0.0 for name in self._RATES)

    def targets(self, event: ClinicalEvent, disease_id: str) -> bool:
        if self.categories is not None and event.category not in self.categories:
            return False
        return self.diseases is None or disease_id in self.diseases

    def boost(self, spec: VariableSpec | None) -> float:
        if spec is None or spec.ambiguity_class is None:
            return 1.0
        return float(self.ambiguity_boost.get(spec.ambiguity_class, 1.0))

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {name: getattr(self, name) for name in self._RATES}
        out["ambiguity_boost"] = dict(sorted(self.ambiguity_boost.items()))
        out["categories"] = sorted(self.categories) if self.categories is not None else None
        out["diseases"] = sorted(self.diseases) if self.diseases is not None else None
        return out

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> NoiseProfile:
        known = {*cls._RATES, "ambiguity_boost", "categories", "diseases", "description"}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown noise profile keys: {sorted(unknown)}")
        kwargs: dict[str, Any] = {name: float(obj.get(name, 0.0)) for name in cls._RATES}
        kwargs["ambiguity_boost"] = {str(k): float(v)
                                     for k, v in (obj.get("ambiguity_boost") or {}).items()}
        for key in ("categories", "diseases"):
            if obj.get(key) is not None:
                kwargs[key] = frozenset(obj[key])
        return cls(**kwargs)


ZERO_NOISE = NoiseProfile()


def noise_presets() -> list[str]:
    folder = resources.files("clinistruct") / "data" / "noise"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def load_noise_profile(name_or_path: str) -> NoiseProfile:
    """A bundled preset by name (``zero``, ``targeted``, ...) or a JSON file."""
    if name_or_path in noise_presets():
        text = (resources.files("clinistruct") / "data" / "noise" /
                f"{name_or_path}.json").read_text(encoding="utf-8")
    else:
        path = Path(name_or_path)
        if not path.is_file():
            raise FileNotFoundError(
                f"noise profile {name_or_path!r} is neither a preset "
                f"({', '.join(noise_presets())}) nor a file")
        text = path.read_text(encoding="utf-8")
    return NoiseProfile.from_json(json.loads(text))


# ---------------------------------------------------------------- planning


@dataclass(frozen=True)
class PlannedDocument:
    doc_id: str
    format: FormatKind
    event_ids: tuple[str, ...]


@dataclass(frozen=True)
class DocumentPlan:
    patient_id: str
    documents: tuple[PlannedDocument, ...]

    def covered(self) -> set[str]:
        return {eid for doc in self.documents for eid in doc.event_ids}

    def formats(self) -> set[FormatKind]:
        return {doc.format for doc in self.documents}


def supports(fmt: FormatKind, category: str) -> bool:
    if fmt is FormatKind.HL7_V2:
        return category in HL7_SEGMENT
    return category in FHIR_RESOURCE if fmt is FormatKind.FHIR_JSON else category in CATEGORIES


def plan_fragmentation(
    record: PatientRecord,
    seed: int,
    duplicate_rate: float = 0.1,
    max_docs: int = MAX_DOCS,
) -> DocumentPlan:
    """Partition a record's events over 2..max_docs documents of mixed formats.

    Every event lands in at least one document whose format can carry it;
    a fraction ``duplicate_rate`` is also copied into a second document.
    """
    events = record.events
    if not events:
        raise ValueError(f"{record.patient_id}: record has no events")
    if not MIN_DOCS <= max_docs <= MAX_DOCS:
        raise ValueError(f"max_docs must lie in [{MIN_DOCS}, {MAX_DOCS}]")
    rng = random.Random(stable_seed(seed, "plan", record.patient_id))
    n_docs = rng.randint(MIN_DOCS, max(MIN_DOCS, min(max_docs, len(events))))

    kinds = list(FormatKind)
    if not any(supports(FormatKind.HL7_V2, e.category) for e in events):
        kinds.remove(FormatKind.HL7_V2)
    formats = [rng.choice(kinds) for _ in range(n_docs)]
    if len(set(formats)) < 2:
        formats[-1] = rng.choice([k for k in kinds if k != formats[0]])
    # HL7 documents need at least one carriable event; others take anything
    assigned: list[list[int]] = [[] for _ in range(n_docs)]
    for i, event in enumerate(events):
        options = [j for j, f in enumerate(formats) if supports(f, event.category)]
        first = rng.choice(options)
        assigned[first].append(i)
        others = [j for j in options if j != first]
        if others and rng.random() < duplicate_rate:
            assigned[rng.choice(others)].append(i)
    for j, members in enumerate(assigned):
        if not members:
            fits = [i for i, e in enumerate(events) if supports(formats[j], e.category)]
            members.append(rng.choice(fits))

    docs = []
    for j, (fmt, members) in enumerate(zip(formats, assigned)):
        doc_id = "D" + format(stable_seed(seed, record.patient_id, "doc", j), "016x")[:12]
        ids = tuple(events[i].event_id for i in sorted(set(members)))
        docs.append(PlannedDocument(doc_id, fmt, ids))
    return DocumentPlan(record.patient_id, tuple(docs))


# ---------------------------------------------------------------- rendering


def _default_doc_id(record: PatientRecord, fmt: FormatKind, events: Sequence[ClinicalEvent]) -> str:
    return "D" + format(stable_seed(record.patient_id, fmt.value,
                                    *(e.event_id for e in events)), "016x")[:12]


def _created_at(doc_id: str, events: Sequence[ClinicalEvent]) -> dt.datetime:
    latest = max(e.timestamp for e in events)
    return latest + dt.timedelta(minutes=1 + stable_seed("created", doc_id) % 2880)


def _check_events(record: PatientRecord, events: Sequence[ClinicalEvent], fmt: FormatKind,
                  allow_empty: bool = False) -> None:
    if not events and not allow_empty:
        raise ValueError(f"cannot render an empty {fmt.value} document")
    for e in events:
        if e.patient_id != record.patient_id:
            raise ValueError(f"event {e.event_id} belongs to {e.patient_id}, not {record.patient_id}")
        if not supports(fmt, e.category):
            raise UnsupportedCategoryError(f"{fmt.value} cannot carry category {e.category!r}")


def _date_text(day: dt.date, style: str) -> str:
    return format_date(day, "dotted" if style == "dotted" else "iso")


def _plain_value(event: ClinicalEvent) -> str:
    """Value text without its unit, as placed in structured fields."""
    v = event.value
    if isinstance(v, bool):
        return "Yes" if v else "No"
    if isinstance(v, (int, float)):
        return format_number(v)
    if isinstance(v, dt.date):
        return _date_text(v, event.date_style)
    return str(v)


def _fhir_value(event: ClinicalEvent) -> dict[str, Any]:
    v = event.value
    if isinstance(v, bool):
        return {"valueBoolean": v}
    if isinstance(v, (int, float)):
        return {"valueQuantity": {"value": float(v), "unit": event.unit,
                                  "system": UCUM_URL, "code": event.unit}}
    if isinstance(v, dt.date) and event.date_style == "iso":
        return {"valueDate": v.isoformat()}
    return {"valueString": _plain_value(event)}


def _fhir_resource(record: PatientRecord, event: ClinicalEvent) -> dict[str, Any]:
    rtype = FHIR_RESOURCE[event.category]
    res: dict[str, Any] = {
        "resourceType": rtype,
        "id": event.event_id,
        "meta": {"tag": [{"system": FHIR_CATEGORY_TAG, "code": event.category}]},
    }
    concept = {"coding": [{"system": FHIR_SYSTEM_URLS[event.code_system],
                           "code": event.code, "display": event.display}]}
    element, as_list = FHIR_CODE_ELEMENT[rtype]
    res[element] = [concept] if as_list else concept
    res[FHIR_SUBJECT_ELEMENT.get(rtype, "subject")] = {"reference": f"Patient/{record.patient_id}"}
    when = event.timestamp.isoformat(timespec="seconds")
    path = FHIR_TIME_ELEMENT[rtype]
    extensions = []
    if path is None:
        extensions.append({"url": FHIR_TIME_EXT, "valueDateTime": when})
    elif "." in path:
        outer, inner = path.split(".")
        res[outer] = {inner: when}
    else:
        res[path] = when
    if rtype == "Observation":
        res["status"] = "final"
        res.update(_fhir_value(event))
    else:
        extensions.append({"url": FHIR_VALUE_EXT, **_fhir_value(event)})
    if extensions:
        res["extension"] = extensions
    return res


def _fhir_patient(record: PatientRecord) -> dict[str, Any]:
    d = record.demographics
    return {
        "resourceType": "Patient",
        "id": record.patient_id,
        "identifier": [{"system": "urn:clinistruct:mrn", "value": record.patient_id}],
        "name": [{"family": d.family, "given": [d.given], "text": d.full_name}],
        "gender": d.sex,
        "birthDate": d.birth_date.isoformat(),
        "address": [{"line": [d.street], "city": d.city, "state": d.state,
                     "postalCode": d.postal_code}],
    }


def _fhir_body(record: PatientRecord, events: Sequence[ClinicalEvent], doc_id: str,
               created: dt.datetime) -> bytes:
    entries = [{"fullUrl": f"urn:clinistruct:Patient/{record.patient_id}",
                "resource": _fhir_patient(record)}]
    for e in events:
        rtype = FHIR_RESOURCE[e.category]
        entries.append({"fullUrl": f"urn:clinistruct:{rtype}/{e.event_id}",
                        "resource": _fhir_resource(record, e)})
    bundle = {
        "resourceType": "Bundle",
        "id": doc_id,
        "type": "collection",
        "timestamp": created.isoformat(timespec="seconds"),
        "entry": entries,
    }
    return (json.dumps(bundle, indent=1, ensure_ascii=False) + "\n").encode("utf-8")


def _hl7_cwe(event: ClinicalEvent) -> str:
    return "^".join((hl7_escape(event.code), hl7_escape(event.display),
                     HL7_SYSTEM_IDS[event.code_system]))


def _hl7_segment(event: ClinicalEvent, set_id: int) -> str:
    seg = HL7_SEGMENT[event.category]
    ts = format_timestamp(event.timestamp, "hl7")
    value = hl7_escape(_plain_value(event))
    unit = hl7_escape(event.unit or "")
    if seg == "OBX":
        if isinstance(event.value, bool):
            vtype = "ST"
        elif isinstance(event.value, (int, float)):
            vtype = "NM"
        elif isinstance(event.value, dt.date):
            vtype = "DT"
        else:
            vtype = "ST"
        fields = ["OBX", str(set_id), vtype, _hl7_cwe(event), "", value, unit,
                  "", "", "", "", "F", "", "", ts]
    elif seg == "DG1":
        fields = ["DG1", str(set_id), "", _hl7_cwe(event), value, ts, "F"]
    elif seg == "RXA":
        fields = ["RXA", "0", "1", ts, ts, _hl7_cwe(event), value, unit]
    elif seg == "RXE":
        fields = ["RXE", f"^^^{ts}", _hl7_cwe(event), value, "", unit]
    else:
        fields = ["PR1", str(set_id), "", _hl7_cwe(event), value, ts]
    return "|".join(fields)


def _hl7_body(record: PatientRecord, events: Sequence[ClinicalEvent], doc_id: str,
              created: dt.datetime) -> bytes:
    d = record.demographics
    pid = "|".join([
        "PID", "1", "", f"{hl7_escape(record.patient_id)}^^^MRN", "",
        f"{hl7_escape(d.family)}^{hl7_escape(d.given)}", "",
        format_date(d.birth_date, "hl7"), {"male": "M", "female": "F"}.get(d.sex, "U"),
        "", "", "^".join(hl7_escape(x) for x in (d.street, "", d.city, d.state, d.postal_code)),
    ])
    # one message per calendar day of care
    by_day: dict[dt.date, list[ClinicalEvent]] = {}
    for e in events:
        by_day.setdefault(e.timestamp.date(), []).append(e)
    if not by_day:
        by_day[created.date()] = []
    messages = []
    for k, day in enumerate(sorted(by_day)):
        group = by_day[day]
        msg_ts = format_timestamp(group[0].timestamp if group else created, "hl7")
        segments = [
            f"MSH|^~\\&|CLINISTRUCT|SCATTER|INGEST|HUB|{msg_ts}||ORU^R01|{doc_id}-{k + 1}|P|2.5",
            pid,
        ]
        counters: dict[str, int] = {}
        for e in group:
            seg = HL7_SEGMENT[e.category]
            counters[seg] = counters.get(seg, 0) + 1
            segments.append(_hl7_segment(e, counters[seg]))
        messages.append(HL7_SEGMENT_SEP.join(segments) + HL7_SEGMENT_SEP)
    return "".join(messages).encode("utf-8")


def _csv_body(record: PatientRecord, events: Sequence[ClinicalEvent], doc_id: str,
              created: dt.datetime) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(CSV_HEADER)
    for e in events:
        style = "dotted" if e.date_style == "dotted" else "iso"
        writer.writerow([e.event_id, format_timestamp(e.timestamp, style), e.category,
                         f"{e.code_system}:{e.code}", e.display, _plain_value(e), e.unit or ""])
    return buf.getvalue().encode("utf-8")


def _narrative_ts(event: ClinicalEvent) -> str:
    fmt = "%d.%m.%Y at %H:%M" if event.date_style == "dotted" else "%Y-%m-%d at %H:%M"
    return event.timestamp.strftime(fmt)


def narrative_line(event: ClinicalEvent, template_index: int) -> str:
    term = event.narrative_hint or event.display
    v = event.value
    if isinstance(v, dt.date):
        group, value = "date", ""
    elif isinstance(v, (int, float)) and not isinstance(v, bool):
        group = "numeric"
        value = format_number(v) if event.unit in (None, "1") else f"{format_number(v)} {event.unit}"
    else:
        group, value = "text", _plain_value(event)
    templates = NARRATIVE_TEMPLATES[group]
    line = templates[template_index % len(templates)].format(
        term=term, value=value, ts=_narrative_ts(event))
    return line[0].upper() + line[1:]


def _narrative_body(record: PatientRecord, events: Sequence[ClinicalEvent], doc_id: str,
                    created: dt.datetime, seed: int) -> bytes:
    rng = random.Random(stable_seed(seed, "narrative", doc_id))
    d = record.demographics
    title = rng.choice(NARRATIVE_TITLES)
    rule = "=" * len(title)
    lines = [
        title,
        rule,
        f"Patient ID: {record.patient_id}",
        f"Name: {d.full_name}",
        f"DOB: {d.birth_date.isoformat()}",
        f"Sex: {d.sex}",
        f"Address: {d.street}, {d.city}, {d.state} {d.postal_code}",
        f"Report date: {created.date().isoformat()}",
        "",
    ]
    for category in CATEGORIES:
        members = [e for e in events if e.category == category]
        if not members:
            continue
        lines.append(NARRATIVE_SECTIONS[category])
        for e in members:
            pick = stable_seed(seed, "template", doc_id, e.event_id) % 3
            lines.append(narrative_line(e, pick))
        lines.append("")
    lines.append("-- end of report --")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _render(fmt: FormatKind, record: PatientRecord, events: Sequence[ClinicalEvent],
            doc_id: str | None, created_at: dt.datetime | None, seed: int,
            allow_empty: bool = False) -> MedicalDocument:
    _check_events(record, events, fmt, allow_empty)
    events = tuple(sorted(events, key=lambda e: (e.timestamp, e.event_id)))
    doc_id = doc_id or _default_doc_id(record, fmt, events)
    if created_at is None:
        created_at = _created_at(doc_id, events or record.events)
    if fmt is FormatKind.FHIR_JSON:
        body = _fhir_body(record, events, doc_id, created_at)
    elif fmt is FormatKind.HL7_V2:
        body = _hl7_body(record, events, doc_id, created_at)
    elif fmt is FormatKind.CSV_EXTRACT:
        body = _csv_body(record, events, doc_id, created_at)
    else:
        body = _narrative_body(record, events, doc_id, created_at, seed)
    return MedicalDocument(
        doc_id=doc_id,
        patient_id=record.patient_id,
        disease_id=record.disease_id,
        format=fmt,
        body=body,
        created_at=created_at,
        covered_event_ids=tuple(e.event_id for e in events),
        events=events,
        record=record,
        render_seed=seed,
    )


def render_fhir_bundle(record: PatientRecord, events: Sequence[ClinicalEvent], *,
                       doc_id: str | None = None,
                       created_at: dt.datetime | None = None) -> MedicalDocument:
    return _render(FormatKind.FHIR_JSON, record, events, doc_id, created_at, 0)


def render_hl7_messages(record: PatientRecord, events: Sequence[ClinicalEvent], *,
                        doc_id: str | None = None,
                        created_at: dt.datetime | None = None) -> MedicalDocument:
    return _render(FormatKind.HL7_V2, record, events, doc_id, created_at, 0)


def render_csv_extract(record: PatientRecord, events: Sequence[ClinicalEvent], *,
                       doc_id: str | None = None,
                       created_at: dt.datetime | None = None) -> MedicalDocument:
    return _render(FormatKind.CSV_EXTRACT, record, events, doc_id, created_at, 0)


def render_narrative_note(record: PatientRecord, events: Sequence[ClinicalEvent], seed: int = 0,
                          *, doc_id: str | None = None,
                          created_at: dt.datetime | None = None) -> MedicalDocument:
    return _render(FormatKind.NARRATIVE, record, events, doc_id, created_at, seed)


def render_document(fmt: FormatKind, record: PatientRecord, events: Sequence[ClinicalEvent],
                    seed: int = 0, **kwargs: Any) -> MedicalDocument:
    return _render(fmt, record, events, kwargs.get("doc_id"), kwargs.get("created_at"), seed)


# ---------------------------------------------------------------- noise

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def _typo(text: str, rng: random.Random) -> str:
    """One single-character edit inside a letter run of ``text``."""
    spots = [i for i, ch in enumerate(text) if ch.isalpha()]
    if not spots:
        return text
    i = rng.choice(spots)
    op = rng.randrange(3)
    if op == 0:
        choices = [c for c in _LETTERS if c != text[i].lower()]
        return text[:i] + rng.choice(choices) + text[i + 1:]
    if op == 1:
        return text[:i] + rng.choice(_LETTERS) + text[i:]
    if len(spots) > 1:
        return text[:i] + text[i + 1:]
    return text[:i] + text[i] + text[i:]


def _conflicting_value(spec: VariableSpec, current: Value, rng: random.Random,
                       when: dt.datetime) -> Value | None:
    kind = spec.value_kind
    if kind == "date":
        return when.date()
    if kind == "boolean":
        return not current
    if kind == "numeric":
        dom = spec.domain
        for _ in range(20):
            x = round(rng.uniform(dom["min"], dom["max"]), int(dom["decimals"]))
            x = float(min(max(x, dom["min"]), dom["max"]))
            if format_number(x) != format_number(float(current)):  # type: ignore[arg-type]
                return x
        return None
    others = [o for o in spec.options if o != current]
    return rng.choice(others) if others else None


def apply_noise(
    doc: MedicalDocument,
    profile: NoiseProfile,
    seed: int,
    variables: Mapping[str, VariableSpec] | None = None,
) -> MedicalDocument:
    """Corrupt a rendered document and re-render it.

    The zero profile returns ``doc`` itself. Codes are never edited; typos
    hit display text only. Synonym swaps and conflicting duplicates need the
    variable specs of the document's events.
    """
    if profile.is_zero():
        return doc
    if doc.record is None:
        raise ValueError(f"{doc.doc_id}: document carries no render context")
    variables = variables or {}
    rng = random.Random(stable_seed(seed, "noise", doc.doc_id))
    taken = {e.timestamp for e in doc.record.events}
    out: list[ClinicalEvent] = []
    for event in doc.events:
        if not profile.targets(event, doc.disease_id):
            out.append(event)
            continue
        spec = variables.get(event.variable_id or "")
        boost = profile.boost(spec)
        if rng.random() < min(1.0, profile.omission_rate * boost):
            continue
        if spec is not None and rng.random() < min(1.0, profile.synonym_swap_rate * boost):
            current = event.narrative_hint or event.display
            alternatives = [s for s in spec.synonyms if s != current]
            if alternatives:
                event = replace(event, narrative_hint=rng.choice(alternatives))
        if rng.random() < profile.typo_rate:
            if doc.format is FormatKind.NARRATIVE:
                event = replace(event, narrative_hint=_typo(event.narrative_hint or event.display, rng))
            else:
                event = replace(event, display=_typo(event.display, rng))
        if rng.random() < profile.format_jitter_rate:
            event = replace(event, date_style="dotted")
        out.append(event)
        if spec is not None and rng.random() < min(1.0, profile.duplicate_conflict_rate * boost):
            when = event.timestamp
            while when in taken:
                when = when + dt.timedelta(days=rng.randint(1, 60), minutes=rng.randint(1, 59))
            value = _conflicting_value(spec, event.value, rng, when)
            if value is not None:
                taken.add(when)
                out.append(replace(event, event_id=event.event_id + "X", timestamp=when,
                                   value=value))
    return _render(doc.format, doc.record, out, doc.doc_id, doc.created_at, doc.render_seed,
                   allow_empty=True)


# ---------------------------------------------------------------- corpus


def scatter_patient(
    record: PatientRecord,
    seed: int,
    profile: NoiseProfile = ZERO_NOISE,
    variables: Mapping[str, VariableSpec] | None = None,
    duplicate_rate: float = 0.1,
) -> list[MedicalDocument]:
    plan = plan_fragmentation(record, seed, duplicate_rate)
    by_id = {e.event_id: e for e in record.events}
    docs = []
    for planned in plan.documents:
        events = [by_id[eid] for eid in planned.event_ids]
        doc = _render(planned.format, record, events, planned.doc_id, None,
                      stable_seed(seed, "render", planned.doc_id))
        docs.append(apply_noise(doc, profile, seed, variables))
    return docs


def scatter_corpus(
    records: Iterable[PatientRecord],
    seed: int,
    profile: NoiseProfile = ZERO_NOISE,
    variables: Mapping[str, VariableSpec] | None = None,
    duplicate_rate: float = 0.1,
) -> list[MedicalDocument]:
    docs: list[MedicalDocument] = []
    for record in records:
        docs.extend(scatter_patient(record, seed, profile, variables, duplicate_rate))
    return docs


MANIFEST_VERSION = 1


def manifest_entry(doc: MedicalDocument, folder: str) -> dict[str, Any]:
    return {
        "doc_id": doc.doc_id,
        "patient_id": doc.patient_id,
        "disease_id": doc.disease_id,
        "format": doc.format.value,
        "path": f"{folder}/{doc.filename}",
        "created_at": doc.created_at.isoformat(timespec="minutes"),
        "sha256": doc.sha256,
        "size_bytes": len(doc.body),
        "covered_event_ids": list(doc.covered_event_ids),
    }


def write_documents(docs: Sequence[MedicalDocument], root: str | Path,
                    folder_of: Mapping[str, str] | None = None) -> Path:
    """Write ``<root>/<patient>/<doc_id>.<ext>`` plus ``<root>/manifest.json``.

    ``folder_of`` maps a patient id to its directory name (the pseudonym
    once anonymized); the raw patient id is used otherwise.
    """
    root = Path(root)
    entries = []
    for doc in sorted(docs, key=lambda d: (d.patient_id, d.doc_id)):
        folder = (folder_of or {}).get(doc.patient_id, doc.patient_id)
        target = root / folder / doc.filename
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(doc.body)
        entries.append(manifest_entry(doc, folder))
    manifest = {"manifest_version": MANIFEST_VERSION, "documents": entries}
    path = root / "manifest.json"
    root.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
    return path


def read_documents(root: str | Path) -> list[MedicalDocument]:
    """Load documents listed in a manifest (bodies only, no render context)."""
    root = Path(root)
    manifest = json.loads((root / "manifest.json").read_text(encoding="utf-8"))
    docs = []
    for entry in manifest["documents"]:
        body = (root / entry["path"]).read_bytes()
        if hashlib.sha256(body).hexdigest() != entry["sha256"]:
            raise ValueError(f"{entry['path']}: content digest does not match manifest")
        docs.append(MedicalDocument(
            doc_id=entry["doc_id"],
            patient_id=entry["patient_id"],
            disease_id=entry["disease_id"],
            format=FormatKind(entry["format"]),
            body=body,
            created_at=dt.datetime.fromisoformat(entry["created_at"]),
            covered_event_ids=tuple(entry["covered_event_ids"]),
        ))
    return docs
