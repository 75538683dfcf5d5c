"""Deterministic synthetic patient corpus with a ground-truth ledger."""
from __future__ import annotations

import datetime as dt
import hashlib
import json
import random
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .values import (
    CATEGORIES,
    CODE_SYSTEMS,
    SENTINEL,
    VALUE_KINDS,
    Value,
    decode_value,
    encode_value,
    serialize,
)

CATALOG_VERSION = 1
MIN_VARIABLES, MAX_VARIABLES = 8, 105
MIN_EVENTS, MAX_EVENTS = 3, 200
NUMERIC_CATEGORIES = frozenset({"Observations", "Medications", "Immunizations"})

# all histories end here; nothing depends on the wall clock
HISTORY_END = dt.datetime(2024, 12, 31, 23, 59)

_GIVEN = {
    "male": ["James", "Robert", "Michael", "William", "David", "Richard", "Joseph", "Thomas",
             "Charles", "Daniel", "Matthew", "Anthony", "Mark", "Steven", "Andrew", "Joshua",
             "Kenneth", "Kevin", "Brian", "George", "Timothy", "Ronald", "Jason", "Edward"],
    "female": ["Mary", "Patricia", "Jennifer", "Linda", "Elizabeth", "Barbara", "Susan",
               "Jessica", "Sarah", "Karen", "Lisa", "Nancy", "Betty", "Margaret", "Sandra",
               "Ashley", "Kimberly", "Emily", "Donna", "Michelle", "Carol", "Amanda", "Melissa"],
}
_FAMILY = ["Smith", "Johnson", "Williams", "Brown", "Jones", "Garcia", "Miller", "Davis",
           "Rodriguez", "Martinez", "Hernandez", "Lopez", "Gonzalez", "Wilson", "Anderson",
           "Thomas", "Taylor", "Moore", "Jackson", "Martin", "Lee", "Perez", "Thompson", "White",
           "Harris", "Sanchez", "Clark", "Ramirez", "Lewis", "Robinson", "Walker", "Young",
           "Allen", "King", "Wright", "Scott", "Torres", "Nguyen", "Hill", "Flores"]
_STREETS = ["Maple", "Oak", "Cedar", "Pine", "Elm", "Birch", "Willow", "Chestnut", "Walnut",
            "Spruce", "Hawthorn", "Juniper", "Magnolia", "Sycamore", "Aspen", "Poplar"]
_STREET_KINDS = ["Street", "Avenue", "Road", "Lane", "Drive", "Court", "Terrace"]
_CITIES = [("Newton", "MA"), ("Springfield", "IL"), ("Madison", "WI"), ("Salem", "OR"),
           ("Franklin", "TN"), ("Georgetown", "TX"), ("Clinton", "IA"), ("Fairview", "NJ")]


class CatalogError(ValueError):
    """The catalog file is missing, malformed or violates a schema rule."""


class CatalogConflictError(CatalogError):
    """Two catalog entries claim the same identifier."""


@dataclass(frozen=True)
class CodeBinding:
    system: str
    code: str

    def __str__(self) -> str:
        return f"{self.system}:{self.code}"


@dataclass(frozen=True)
class VariableSpec:
    variable_id: str
    disease_id: str
    name: str
    category: str
    value_kind: str
    code_bindings: tuple[CodeBinding, ...]
    synonyms: tuple[str, ...]
    domain: Mapping[str, Any] = field(default_factory=dict, hash=False, compare=False)
    ambiguity_class: str | None = None

    @property
    def display(self) -> str:
        """Preferred surface form used by document renderers."""
        return self.synonyms[0]

    @property
    def primary_code(self) -> CodeBinding:
        return self.code_bindings[0]

    @property
    def unit(self) -> str | None:
        return self.domain.get("unit") if self.value_kind == "numeric" else None

    @property
    def options(self) -> tuple[str, ...]:
        return tuple(self.domain.get("options", ()))

    def plausible(self, value: Value) -> bool:
        """Kind check plus, for numerics, the declared range."""
        kind = self.value_kind
        if kind == "numeric":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                return False
            return self.domain["min"] <= value <= self.domain["max"]
        if kind == "date":
            return isinstance(value, dt.date)
        if kind == "boolean":
            return isinstance(value, bool)
        return isinstance(value, str)


@dataclass(frozen=True)
class EventTemplate:
    variable_id: str
    probability: float
    min_repeats: int = 1
    max_repeats: int = 1


@dataclass(frozen=True)
class DiseaseModule:
    disease_id: str
    name: str
    variable_specs: tuple[VariableSpec, ...]
    event_templates: tuple[EventTemplate, ...]
    group: str = ""
    sex: str = "any"
    age_range: tuple[int, int] = (18, 80)
    history_years: int = 5

    def variable(self, variable_id: str) -> VariableSpec:
        for spec in self.variable_specs:
            if spec.variable_id == variable_id:
                return spec
        raise KeyError(variable_id)


@dataclass(frozen=True)
class ClinicalEvent:
    event_id: str
    patient_id: str
    timestamp: dt.datetime
    category: str
    code_system: str
    code: str
    display: str
    value: Value
    unit: str | None = None
    variable_id: str | None = None
    # render hints; never part of the clinical content
    narrative_hint: str | None = None
    date_style: str = "iso"

    @property
    def value_text(self) -> str:
        return serialize(self.value, self.unit)

    def to_json(self) -> dict[str, Any]:
        value_type, payload = encode_value(self.value)
        out = {
            "event_id": self.event_id,
            "patient_id": self.patient_id,
            "timestamp": self.timestamp.isoformat(timespec="minutes"),
            "category": self.category,
            "code_system": self.code_system,
            "code": self.code,
            "display": self.display,
            "value_type": value_type,
            "value": payload,
            "unit": self.unit,
            "variable_id": self.variable_id,
        }
        if self.narrative_hint is not None:
            out["narrative_hint"] = self.narrative_hint
        if self.date_style != "iso":
            out["date_style"] = self.date_style
        return out

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> ClinicalEvent:
        return cls(
            event_id=obj["event_id"],
            patient_id=obj["patient_id"],
            timestamp=dt.datetime.fromisoformat(obj["timestamp"]),
            category=obj["category"],
            code_system=obj["code_system"],
            code=obj["code"],
            display=obj["display"],
            value=decode_value(obj["value_type"], obj["value"]),
            unit=obj.get("unit"),
            variable_id=obj.get("variable_id"),
            narrative_hint=obj.get("narrative_hint"),
            date_style=obj.get("date_style", "iso"),
        )


@dataclass(frozen=True)
class Demographics:
    given: str
    family: str
    birth_date: dt.date
    sex: str
    street: str
    city: str
    state: str
    postal_code: str

    @property
    def full_name(self) -> str:
        return f"{self.given} {self.family}"


@dataclass
class PatientRecord:
    patient_id: str
    disease_id: str
    demographics: Demographics
    events: tuple[ClinicalEvent, ...]
    truth: dict[str, str]

    def events_for(self, variable_id: str) -> list[ClinicalEvent]:
        return [e for e in self.events if e.variable_id == variable_id]

    def to_json(self) -> dict[str, Any]:
        d = self.demographics
        return {
            "patient_id": self.patient_id,
            "disease_id": self.disease_id,
            "demographics": {
                "given": d.given, "family": d.family, "birth_date": d.birth_date.isoformat(),
                "sex": d.sex, "street": d.street, "city": d.city, "state": d.state,
                "postal_code": d.postal_code,
            },
            "events": [e.to_json() for e in self.events],
            "truth": dict(self.truth),
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> PatientRecord:
        demo = dict(obj["demographics"])
        demo["birth_date"] = dt.date.fromisoformat(demo["birth_date"])
        return cls(
            patient_id=obj["patient_id"],
            disease_id=obj["disease_id"],
            demographics=Demographics(**demo),
            events=tuple(ClinicalEvent.from_json(e) for e in obj["events"]),
            truth=dict(obj["truth"]),
        )


@dataclass(frozen=True)
class LedgerEntry:
    patient_id: str
    disease_id: str
    variable_id: str
    true_value: str
    event_ids: tuple[str, ...] = ()

    @property
    def sort_key(self) -> tuple[str, str, str]:
        return (self.disease_id, self.patient_id, self.variable_id)


@dataclass
class GroundTruthLedger:
    entries: list[LedgerEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def sorted(self) -> GroundTruthLedger:
        return GroundTruthLedger(sorted(self.entries, key=lambda e: e.sort_key))

    def as_mapping(self) -> dict[tuple[str, str], LedgerEntry]:
        return {(e.patient_id, e.variable_id): e for e in self.entries}


# ---------------------------------------------------------------- catalog


def default_catalog_path() -> Path:
    return Path(str(resources.files("clinistruct") / "data" / "catalog.json"))


def load_disease_catalog(path: str | Path | None = None) -> list[DiseaseModule]:
    """Load and validate a disease catalog; the bundled one when ``path`` is None."""
    path = Path(path) if path is not None else default_catalog_path()
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CatalogError(f"{path}: cannot read catalog ({exc.strerror})") from exc
    if not text.strip():
        raise CatalogError(f"{path}: no diseases defined")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_catalog(doc, source=str(path))


def parse_catalog(doc: Any, source: str = "<catalog>") -> list[DiseaseModule]:
    if not isinstance(doc, dict):
        raise CatalogError(f"{source}: top level must be an object")
    version = doc.get("catalog_version")
    if version != CATALOG_VERSION:
        raise CatalogError(f"{source}: catalog_version must be {CATALOG_VERSION}, got {version!r}")
    diseases = doc.get("diseases") or []
    if not diseases:
        raise CatalogError(f"{source}: no diseases defined")
    modules: list[DiseaseModule] = []
    seen: set[str] = set()
    seen_vars: set[str] = set()
    for i, raw in enumerate(diseases):
        where = f"{source}: diseases[{i}]"
        module = _parse_disease(raw, where)
        if module.disease_id in seen:
            raise CatalogConflictError(f"{where}: duplicate disease_id {module.disease_id!r}")
        seen.add(module.disease_id)
        for spec in module.variable_specs:
            if spec.variable_id in seen_vars:
                raise CatalogConflictError(f"{where}: duplicate variable_id {spec.variable_id!r}")
            seen_vars.add(spec.variable_id)
        modules.append(module)
    _check_surfaces(modules, source)
    return modules


def _require(obj: Mapping[str, Any], key: str, where: str, kind: type | tuple[type, ...]) -> Any:
    if key not in obj:
        raise CatalogError(f"{where}.{key}: missing")
    value = obj[key]
    if not isinstance(value, kind):
        raise CatalogError(f"{where}.{key}: expected {getattr(kind, '__name__', kind)}")
    return value


_BAD_TEXT_VALUE = re.compile(r";|\s+on\s+\d|\.\s*$")


def _parse_variable(raw: Mapping[str, Any], disease_id: str, where: str) -> VariableSpec:
    vid = _require(raw, "variable_id", where, str)
    category = _require(raw, "category", where, str)
    if category not in CATEGORIES:
        raise CatalogError(f"{where}.category: {category!r} is not one of {', '.join(CATEGORIES)}")
    kind = _require(raw, "value_kind", where, str)
    if kind not in VALUE_KINDS:
        raise CatalogError(f"{where}.value_kind: {kind!r} is not one of {', '.join(VALUE_KINDS)}")
    bindings = []
    for j, b in enumerate(_require(raw, "code_bindings", where, list)):
        bw = f"{where}.code_bindings[{j}]"
        system = _require(b, "system", bw, str)
        if system not in CODE_SYSTEMS:
            raise CatalogError(f"{bw}.system: {system!r} is not one of {', '.join(CODE_SYSTEMS)}")
        bindings.append(CodeBinding(system, _require(b, "code", bw, str)))
    if not bindings:
        raise CatalogError(f"{where}.code_bindings: at least one binding required")
    synonyms = tuple(_require(raw, "synonyms", where, list))
    if not synonyms or not all(isinstance(s, str) and s.strip() for s in synonyms):
        raise CatalogError(f"{where}.synonyms: at least one non-empty synonym required")
    domain = dict(raw.get("domain") or {})
    if kind == "numeric":
        for key in ("min", "max", "decimals", "unit"):
            if key not in domain:
                raise CatalogError(f"{where}.domain.{key}: required for numeric variables")
        if domain["min"] > domain["max"]:
            raise CatalogError(f"{where}.domain: min exceeds max")
        if category not in NUMERIC_CATEGORIES:
            raise CatalogError(f"{where}: numeric values are only supported for "
                               f"{', '.join(sorted(NUMERIC_CATEGORIES))}")
    elif kind in ("coded", "free-text"):
        options = domain.get("options")
        if not options:
            raise CatalogError(f"{where}.domain.options: required for {kind} variables")
        for opt in options:
            if not isinstance(opt, str) or not opt.strip() or _BAD_TEXT_VALUE.search(opt):
                raise CatalogError(f"{where}.domain.options: unusable option {opt!r}")
        weights = domain.get("weights")
        if weights is not None and len(weights) != len(options):
            raise CatalogError(f"{where}.domain.weights: length differs from options")
    elif kind == "boolean":
        p = domain.get("p_true", 0.5)
        if not 0.0 <= p <= 1.0:
            raise CatalogError(f"{where}.domain.p_true: must lie in [0, 1]")
    return VariableSpec(
        variable_id=vid,
        disease_id=disease_id,
        name=_require(raw, "name", where, str),
        category=category,
        value_kind=kind,
        code_bindings=tuple(bindings),
        synonyms=synonyms,
        domain=domain,
        ambiguity_class=raw.get("ambiguity_class"),
    )


def _parse_disease(raw: Any, where: str) -> DiseaseModule:
    if not isinstance(raw, dict):
        raise CatalogError(f"{where}: expected an object")
    disease_id = _require(raw, "disease_id", where, str)
    name = _require(raw, "name", where, str)
    raw_vars = _require(raw, "variables", where, list)
    specs = tuple(
        _parse_variable(v, disease_id, f"{where}.variables[{j}]") for j, v in enumerate(raw_vars)
    )
    if not MIN_VARIABLES <= len(specs) <= MAX_VARIABLES:
        raise CatalogError(f"{where}.variables: {len(specs)} variables, "
                           f"expected {MIN_VARIABLES}..{MAX_VARIABLES}")
    ids = {s.variable_id for s in specs}
    templates = []
    for j, t in enumerate(raw.get("event_templates") or []):
        tw = f"{where}.event_templates[{j}]"
        vid = _require(t, "variable_id", tw, str)
        if vid not in ids:
            raise CatalogError(f"{tw}.variable_id: unknown variable {vid!r}")
        p = float(_require(t, "probability", tw, (int, float)))
        if not 0.0 <= p <= 1.0:
            raise CatalogError(f"{tw}.probability: must lie in [0, 1]")
        lo, hi = t.get("repeats", [1, 1])
        if not 1 <= lo <= hi:
            raise CatalogError(f"{tw}.repeats: need 1 <= min <= max")
        templates.append(EventTemplate(vid, p, int(lo), int(hi)))
    demo = raw.get("demographics") or {}
    age = tuple(demo.get("age", (18, 80)))
    return DiseaseModule(
        disease_id=disease_id,
        name=name,
        variable_specs=specs,
        event_templates=tuple(templates),
        group=raw.get("group", ""),
        sex=demo.get("sex", "any"),
        age_range=(int(age[0]), int(age[1])),
        history_years=int(demo.get("history_years", 5)),
    )


def _check_surfaces(modules: Sequence[DiseaseModule], source: str) -> None:
    # variables sharing a primary code form one concept and must agree on shape
    concepts: dict[CodeBinding, VariableSpec] = {}
    for module in modules:
        for spec in module.variable_specs:
            first = concepts.setdefault(spec.primary_code, spec)
            if (first.category, first.value_kind, first.display, first.unit) != (
                spec.category, spec.value_kind, spec.display, spec.unit
            ):
                raise CatalogConflictError(
                    f"{source}: {spec.variable_id} and {first.variable_id} share code "
                    f"{spec.primary_code} but differ in category, kind, display or unit")
    # a shared surface form must not change how a value is read
    shape: dict[str, tuple[str, str, str | None, str]] = {}
    for module in modules:
        for spec in module.variable_specs:
            for surface in spec.synonyms:
                key = " ".join(surface.casefold().split())
                sig = (spec.category, spec.value_kind, spec.unit, spec.variable_id)
                prev = shape.setdefault(key, sig)
                if prev[:3] != sig[:3]:
                    raise CatalogConflictError(
                        f"{source}: surface form {surface!r} is shared by {prev[3]} and "
                        f"{spec.variable_id} with different category, kind or unit")
    displays: dict[str, CodeBinding] = {}
    for module in modules:
        for spec in module.variable_specs:
            key = " ".join(spec.display.casefold().split())
            owner = displays.setdefault(key, spec.primary_code)
            if owner != spec.primary_code:
                raise CatalogConflictError(
                    f"{source}: preferred term {spec.display!r} of {spec.variable_id} "
                    f"is claimed by concept {owner}")
    for module in modules:
        for spec in module.variable_specs:
            for surface in spec.synonyms[1:]:
                key = " ".join(surface.casefold().split())
                owner = displays.get(key)
                if owner is not None and owner != spec.primary_code:
                    raise CatalogConflictError(
                        f"{source}: synonym {surface!r} of {spec.variable_id} is the "
                        f"preferred term of concept {owner}")


# ---------------------------------------------------------------- generation


def stable_seed(*parts: object) -> int:
    """64-bit seed from a stable hash of ``parts``."""
    text = "\x1f".join(str(p) for p in parts)
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "big")


def _draw_value(spec: VariableSpec, rng: random.Random, when: dt.datetime) -> Value:
    dom = spec.domain
    kind = spec.value_kind
    if kind == "numeric":
        x = round(rng.uniform(dom["min"], dom["max"]), int(dom["decimals"]))
        return float(min(max(x, dom["min"]), dom["max"]))
    if kind in ("coded", "free-text"):
        return rng.choices(dom["options"], weights=dom.get("weights"))[0]
    if kind == "date":
        return when.date()
    return rng.random() < dom.get("p_true", 0.5)


def _demographics(module: DiseaseModule, rng: random.Random, start: dt.datetime) -> Demographics:
    sex = module.sex if module.sex in ("male", "female") else rng.choice(["male", "female"])
    age = rng.randint(*module.age_range)
    birth = start.date() - dt.timedelta(days=365 * age + rng.randrange(365))
    city, state = rng.choice(_CITIES)
    return Demographics(
        given=rng.choice(_GIVEN[sex]),
        family=rng.choice(_FAMILY),
        birth_date=birth,
        sex=sex,
        street=f"{rng.randint(10, 9899)} {rng.choice(_STREETS)} {rng.choice(_STREET_KINDS)}",
        city=city,
        state=state,
        postal_code=f"{rng.randint(1001, 99950):05d}",
    )


def generate_patient(module: DiseaseModule, patient_index: int, seed: int) -> PatientRecord:
    """One synthetic patient; a pure function of (module, index, seed)."""
    if patient_index < 0:
        raise ValueError("patient_index must be >= 0")
    sub = stable_seed(seed, module.disease_id, patient_index)
    rng = random.Random(sub)
    patient_id = f"MRN-{sub:016X}"[:16]
    start = HISTORY_END - dt.timedelta(days=365 * module.history_years)
    demographics = _demographics(module, rng, start)

    # daytime minute slots across the history window
    n_days = (HISTORY_END - start).days
    used: set[int] = set()

    def draw_time() -> dt.datetime:
        while True:
            slot = rng.randrange(n_days * 720)
            if slot not in used:
                used.add(slot)
                day, minute = divmod(slot, 720)
                return start + dt.timedelta(days=day, hours=7, minutes=minute)

    specs = {s.variable_id: s for s in module.variable_specs}
    planned: list[str] = []
    for tmpl in module.event_templates:
        if rng.random() < tmpl.probability:
            planned.extend([tmpl.variable_id] * rng.randint(tmpl.min_repeats, tmpl.max_repeats))
    while len(planned) < MIN_EVENTS:
        planned.append(rng.choice(module.event_templates).variable_id)
    planned = planned[:MAX_EVENTS]

    raw: list[tuple[dt.datetime, VariableSpec, Value]] = []
    for vid in planned:
        spec = specs[vid]
        when = draw_time()
        raw.append((when, spec, _draw_value(spec, rng, when)))
    raw.sort(key=lambda item: (item[0], item[1].variable_id))

    # event ids must not echo the patient id, which is derived from ``sub``
    event_base = stable_seed(sub, "events") >> 24
    events = []
    for i, (when, spec, value) in enumerate(raw):
        code = spec.primary_code
        events.append(ClinicalEvent(
            event_id=f"E{event_base:010x}{i:03d}",
            patient_id=patient_id,
            timestamp=when,
            category=spec.category,
            code_system=code.system,
            code=code.code,
            display=spec.display,
            value=value,
            unit=spec.unit,
            variable_id=spec.variable_id,
        ))

    truth: dict[str, str] = {}
    for spec in module.variable_specs:
        own = [e for e in events if e.variable_id == spec.variable_id]
        truth[spec.variable_id] = own[-1].value_text if own else SENTINEL
    return PatientRecord(patient_id, module.disease_id, demographics, tuple(events), truth)


def ledger_entries(record: PatientRecord, module: DiseaseModule) -> list[LedgerEntry]:
    out = []
    for spec in module.variable_specs:
        ids = tuple(e.event_id for e in record.events if e.variable_id == spec.variable_id)
        out.append(LedgerEntry(record.patient_id, record.disease_id, spec.variable_id,
                               record.truth[spec.variable_id], ids))
    return out


def _generate_one(args: tuple[DiseaseModule, int, int]) -> PatientRecord:
    return generate_patient(*args)


def generate_corpus(
    catalog: Sequence[DiseaseModule],
    patients_per_disease: int,
    seed: int,
    jobs: int = 1,
) -> tuple[list[PatientRecord], GroundTruthLedger]:
    if patients_per_disease < 1:
        raise ValueError("patients_per_disease must be >= 1")
    work = [(m, i, seed) for m in catalog for i in range(patients_per_disease)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_generate_one, work, chunksize=32))
    else:
        records = [_generate_one(w) for w in work]
    ids = [r.patient_id for r in records]
    if len(set(ids)) != len(ids):
        raise RuntimeError("patient id collision; choose another seed")
    modules = {m.disease_id: m for m in catalog}
    ledger = GroundTruthLedger()
    for record in records:
        ledger.entries.extend(ledger_entries(record, modules[record.disease_id]))
    return records, ledger.sorted()


# ---------------------------------------------------------------- persistence


def write_ground_truth_ledger(ledger: GroundTruthLedger, path: str | Path) -> Path:
    path = Path(path)
    lines = []
    for e in sorted(ledger.entries, key=lambda e: e.sort_key):
        lines.append(json.dumps({
            "patient_id": e.patient_id,
            "disease_id": e.disease_id,
            "variable_id": e.variable_id,
            "true_value": e.true_value,
            "event_ids": list(e.event_ids),
        }, ensure_ascii=False))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write ledger {path}: {exc.strerror}") from exc
    return path


def read_ground_truth_ledger(path: str | Path) -> GroundTruthLedger:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot read ledger {path}: {exc.strerror}") from exc
    entries = []
    for obj in map(json.loads, filter(None, text.splitlines())):
        entries.append(LedgerEntry(obj["patient_id"], obj["disease_id"], obj["variable_id"],
                                   str(obj["true_value"]), tuple(obj["event_ids"])))
    return GroundTruthLedger(entries)


def write_records(records: Iterable[PatientRecord], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_json(), ensure_ascii=False) + "\n")
    return path


def read_records(path: str | Path) -> list[PatientRecord]:
    with Path(path).open(encoding="utf-8") as fh:
        return [PatientRecord.from_json(json.loads(line)) for line in fh if line.strip()]


def variables_by_id(catalog: Iterable[DiseaseModule]) -> dict[str, VariableSpec]:
    return {s.variable_id: s for m in catalog for s in m.variable_specs}
