"""De-identification: stable pseudonyms and deny-list scrubbing.

Pseudonyms are ``P_<n>`` where ``n`` is the rank of a salted hash of the
source id, so the numbering carries no information about generation order.
Scrubbing combines a format-aware pass over the structured demographics
(FHIR Patient, HL7 PID, narrative header) with a textual deny-list pass
over the whole body, and is idempotent.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .corpus import Demographics, PatientRecord
from .formats import FormatKind
from .scatter import MedicalDocument

REDACTED = "[REDACTED]"
PSEUDONYM = re.compile(r"P_[0-9]+")
_MIN_TOKEN = 4


def _salted_rank_key(salt: int, patient_id: str) -> bytes:
    return hashlib.blake2b(patient_id.encode(), digest_size=16,
                           key=salt.to_bytes(8, "big")).digest()


@dataclass
class IdentityMap:
    salt: int
    forward: dict[str, str] = field(default_factory=dict)

    @classmethod
    def build(cls, patient_ids: Iterable[str], salt: int) -> IdentityMap:
        if not 0 <= salt < 2 ** 64:
            raise ValueError("salt must be a 64-bit unsigned integer")
        unique = sorted(set(patient_ids), key=lambda pid: (_salted_rank_key(salt, pid), pid))
        return cls(salt, {pid: f"P_{rank}" for rank, pid in enumerate(unique, start=1)})

    def pseudonym(self, patient_id: str) -> str:
        """Stable pseudonym; unseen ids are appended after the existing ones."""
        found = self.forward.get(patient_id)
        if found is None:
            found = f"P_{len(self.forward) + 1}"
            self.forward[patient_id] = found
        return found

    def reverse(self) -> dict[str, str]:
        return {v: k for k, v in self.forward.items()}

    def to_json(self) -> dict[str, Any]:
        pairs = sorted(self.forward.items(), key=lambda kv: int(kv[1][2:]))
        return {"salt": self.salt, "pairs": [[src, anon] for src, anon in pairs]}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> IdentityMap:
        return cls(int(obj["salt"]), {src: anon for src, anon in obj["pairs"]})

    def save(self, path: str | Path) -> Path:
        """Persist with owner-only permissions."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        os.chmod(path.parent, 0o700)
        fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=1)
            fh.write("\n")
        os.chmod(path, 0o600)
        return path

    @classmethod
    def load(cls, path: str | Path) -> IdentityMap:
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def pseudonymize_patient(patient_id: str, identity_map: IdentityMap) -> str:
    return identity_map.pseudonym(patient_id)


@dataclass(frozen=True)
class PatientPii:
    names: tuple[str, ...]
    addresses: tuple[str, ...]
    birth_dates: tuple[str, ...]
    birth_year: str

    @classmethod
    def of(cls, d: Demographics) -> PatientPii:
        b = d.birth_date
        return cls(
            names=(f"{d.given} {d.family}", f"{d.family}^{d.given}", f"{d.family}, {d.given}"),
            addresses=(d.street,),
            birth_dates=(b.isoformat(), b.strftime("%Y%m%d"), b.strftime("%d.%m.%Y")),
            birth_year=str(b.year),
        )

    @property
    def tokens(self) -> tuple[str, ...]:
        return (*self.names, *self.addresses, *self.birth_dates)


@dataclass
class PiiDenyList:
    tokens: frozenset[str]
    by_patient: dict[str, PatientPii] = field(default_factory=dict)

    @classmethod
    def from_records(cls, records: Iterable[PatientRecord]) -> PiiDenyList:
        by_patient = {r.patient_id: PatientPii.of(r.demographics) for r in records}
        tokens = frozenset(t for pii in by_patient.values() for t in pii.tokens)
        short = sorted(t for t in tokens if len(t) < _MIN_TOKEN)
        if short:
            raise ValueError(f"deny-list tokens too short to audit safely: {short}")
        return cls(tokens, by_patient)

    def __len__(self) -> int:
        return len(self.tokens)


def _replace_all(text: str, needles: Iterable[str], repl: str) -> str:
    for needle in sorted(set(needles), key=len, reverse=True):
        if needle.casefold() in text.casefold():
            text = re.sub(re.escape(needle), lambda _m: repl, text, flags=re.IGNORECASE)
    return text


def _scrub_fhir(text: str, raw_id: str, anon_id: str, year: str) -> str:
    bundle = json.loads(text)
    for entry in bundle.get("entry", []):
        res = entry.get("resource", {})
        if res.get("resourceType") != "Patient":
            continue
        if "name" in res:
            res["name"] = [{"text": REDACTED}]
        if "address" in res:
            res["address"] = [{"text": REDACTED}]
        if "birthDate" in res:
            res["birthDate"] = str(res["birthDate"])[:4] or year
    return json.dumps(bundle, indent=1, ensure_ascii=False) + "\n"


def scrub_document(doc: MedicalDocument, identity_map: IdentityMap,
                   deny: PiiDenyList) -> MedicalDocument:
    """Replace ids with pseudonyms, redact names and addresses, cut birth dates
    to the year. Applying it twice changes nothing further."""
    raw_id = identity_map.reverse().get(doc.patient_id, doc.patient_id) \
        if PSEUDONYM.fullmatch(doc.patient_id) else doc.patient_id
    anon_id = identity_map.pseudonym(raw_id)
    pii = deny.by_patient.get(raw_id)
    text = doc.body.decode("utf-8")
    if doc.format is FormatKind.FHIR_JSON and pii is not None:
        text = _scrub_fhir(text, raw_id, anon_id, pii.birth_year)
    text = text.replace(raw_id, anon_id)
    if pii is not None:
        text = _replace_all(text, (*pii.names, *pii.addresses), REDACTED)
        text = _replace_all(text, pii.birth_dates, pii.birth_year)
    return dataclasses.replace(doc, body=text.encode("utf-8"), patient_id=anon_id,
                               events=(), record=None)


@dataclass(frozen=True, order=True)
class Violation:
    doc_id: str
    token: str
    offset: int


def _prefix_index(tokens: Iterable[str]) -> dict[str, list[str]]:
    index: dict[str, list[str]] = {}
    for token in tokens:
        low = token.casefold()
        index.setdefault(low[:_MIN_TOKEN], []).append(low)
    return index


def _scan(doc_id: str, text: str, index: Mapping[str, list[str]],
          originals: Mapping[str, str]) -> list[Violation]:
    folded = text.casefold()
    if len(folded) != len(text):
        folded = text.lower()
    out = []
    for i in range(len(folded) - _MIN_TOKEN + 1):
        bucket = index.get(folded[i:i + _MIN_TOKEN])
        if bucket is None:
            continue
        for low in bucket:
            if folded.startswith(low, i):
                out.append(Violation(doc_id, originals[low], len(text[:i].encode("utf-8"))))
    return out


def verify_scrub(docs: Sequence[MedicalDocument], deny: PiiDenyList,
                 identity_map: IdentityMap | None = None) -> list[Violation]:
    """Every surviving deny-list token, as (doc_id, token, byte offset).

    Matching is an exact substring test after case folding. Names and
    street addresses are searched in every document. A full birth date is
    only identifying next to its own patient, and clinical dates of other
    patients routinely coincide with it, so birth dates are searched in the
    documents of the patient they belong to. ``identity_map`` links
    pseudonymized documents back to that patient.
    """
    reverse = identity_map.reverse() if identity_map is not None else {}
    shared = {t for pii in deny.by_patient.values() for t in (*pii.names, *pii.addresses)}
    if not deny.by_patient:
        shared = set(deny.tokens)
    shared_index = _prefix_index(shared)
    originals = {t.casefold(): t for t in deny.tokens}
    out: list[Violation] = []
    for doc in docs:
        text = doc.body.decode("utf-8", errors="replace")
        out.extend(_scan(doc.doc_id, text, shared_index, originals))
        pii = deny.by_patient.get(reverse.get(doc.patient_id, doc.patient_id))
        if pii is not None:
            out.extend(_scan(doc.doc_id, text, _prefix_index(pii.birth_dates), originals))
    return sorted(set(out))
