"""Resolve canonical statements to one value per (patient, variable)."""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .corpus import VariableSpec
from .ingest import CanonicalStatement, ParsedDocument, SourceLink
from .ontology import OntologyRegistry
from .values import SENTINEL, canonical_unit, match_key

FOUND = "found"
MISSING = "missing-sentinel"


@dataclass(frozen=True)
class ConflictPolicy:
    """Plausibility filter first, then currency, format priority, lexicographic."""

    check_plausibility: bool = True
    rules: tuple[str, ...] = ("currency", "format-priority", "lexicographic")


DEFAULT_POLICY = ConflictPolicy()


@dataclass(frozen=True)
class VariableAssignment:
    patient: str
    variable_id: str
    extracted_value: str
    status: str
    evidence: tuple[SourceLink, ...] = ()
    resolution_note: str = ""

    def __post_init__(self) -> None:
        if self.status == FOUND and not self.evidence:
            raise ValueError(f"{self.patient}/{self.variable_id}: found without evidence")
        if self.status not in (FOUND, MISSING):
            raise ValueError(f"unknown status {self.status!r}")

    def to_json(self) -> dict[str, Any]:
        return {
            "patient": self.patient, "variable_id": self.variable_id,
            "extracted_value": self.extracted_value, "status": self.status,
            "evidence": [e.to_json() for e in self.evidence],
            "resolution_note": self.resolution_note,
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> VariableAssignment:
        return cls(obj["patient"], obj["variable_id"], obj["extracted_value"], obj["status"],
                   tuple(SourceLink.from_json(e) for e in obj["evidence"]),
                   obj.get("resolution_note", ""))


def match_statements(
    statements: Iterable[CanonicalStatement],
    registry: OntologyRegistry,
    disease_id: str | None = None,
) -> list[tuple[CanonicalStatement, list[str]]]:
    """Candidate variables per statement: by code when coded, else by surface.

    With ``disease_id`` the candidates are limited to that disease. An
    ambiguous surface keeps every candidate that survives the filter.
    """
    out = []
    for stmt in statements:
        if stmt.code:
            concept = registry.concept_for_code(stmt.code_system, stmt.code)
            concepts = [concept] if concept is not None else []
        else:
            concepts = registry.concepts_for_surface(stmt.display)
        candidates: list[str] = []
        for concept in concepts:
            if concept.category != stmt.category:
                continue
            for vid in registry.variables_of(concept, disease_id):
                if vid not in candidates:
                    candidates.append(vid)
        out.append((stmt, candidates))
    return out


def _plausible(spec: VariableSpec, stmt: CanonicalStatement) -> bool:
    if not spec.plausible(stmt.value):
        return False
    if spec.value_kind == "numeric":
        return canonical_unit(stmt.unit) == canonical_unit(spec.unit)
    return True


def _ts_key(stmt: CanonicalStatement) -> tuple[int, str]:
    # undated statements lose to dated ones
    return (0, "") if stmt.timestamp is None else (1, stmt.timestamp.isoformat())


def _distinct(stmts: Sequence[CanonicalStatement]) -> set[str]:
    return {match_key(s.value_text) for s in stmts}


def resolve_conflicts(
    patient: str,
    spec: VariableSpec,
    candidates: Sequence[CanonicalStatement],
    policy: ConflictPolicy = DEFAULT_POLICY,
) -> VariableAssignment:
    if not candidates:
        return VariableAssignment(patient, spec.variable_id, SENTINEL, MISSING,
                                  resolution_note="no-candidates")
    pool = list(candidates)
    dropped = 0
    if policy.check_plausibility:
        pool = [s for s in candidates if _plausible(spec, s)]
        dropped = len(candidates) - len(pool)
        if not pool:
            return VariableAssignment(patient, spec.variable_id, SENTINEL, MISSING,
                                      resolution_note=f"implausible ({dropped} dropped)")
    if len(_distinct(pool)) == 1:
        note = "single" if len(pool) == 1 else "concordant"
    else:
        note = "unresolved"
        for rule in policy.rules:
            if rule == "currency":
                latest = max(_ts_key(s) for s in pool)
                pool = [s for s in pool if _ts_key(s) == latest]
            elif rule == "format-priority":
                best = min(s.format.priority for s in pool)
                pool = [s for s in pool if s.format.priority == best]
            elif rule == "lexicographic":
                smallest = min(s.value_text for s in pool)
                pool = [s for s in pool if s.value_text == smallest]
            else:
                raise ValueError(f"unknown conflict rule {rule!r}")
            if len(_distinct(pool)) == 1:
                note = rule
                break
        else:
            raise RuntimeError(f"{spec.variable_id}: conflict policy left a tie")
    chosen = min(pool, key=lambda s: s.value_text)
    key = match_key(chosen.value_text)
    evidence = sorted({s.source for s in candidates if match_key(s.value_text) == key},
                      key=lambda src: (src.doc_id or "", src.locator,
                                       src.object.digest if src.object else ""))
    if dropped:
        note = f"{note} ({dropped} implausible dropped)"
    return VariableAssignment(patient, spec.variable_id, chosen.value_text, FOUND,
                              tuple(evidence), note)


def extract_patient_variables(
    parsed_docs: Iterable[ParsedDocument],
    registry: OntologyRegistry,
    patient: str,
    disease_id: str,
    policy: ConflictPolicy = DEFAULT_POLICY,
) -> list[VariableAssignment]:
    """One assignment per catalog variable of ``disease_id``, in catalog order."""
    statements = [s for doc in parsed_docs for s in doc.statements
                  if s.patient in (None, patient)]
    by_var: dict[str, list[CanonicalStatement]] = defaultdict(list)
    for stmt, candidates in match_statements(statements, registry, disease_id):
        for vid in candidates:
            by_var[vid].append(stmt)
    return [resolve_conflicts(patient, registry.variables[vid], by_var.get(vid, []), policy)
            for vid in registry.disease_variables[disease_id]]


def extract_corpus(
    parsed_docs: Iterable[ParsedDocument],
    registry: OntologyRegistry,
    patient_disease: Mapping[str, str],
    policy: ConflictPolicy = DEFAULT_POLICY,
) -> list[VariableAssignment]:
    """Assignments for every patient in ``patient_disease``, documents or not."""
    grouped: dict[str, list[ParsedDocument]] = defaultdict(list)
    for doc in parsed_docs:
        if doc.patient is not None:
            grouped[doc.patient].append(doc)
    out: list[VariableAssignment] = []
    for patient in sorted(patient_disease, key=patient_sort_key):
        out.extend(extract_patient_variables(grouped.get(patient, []), registry, patient,
                                             patient_disease[patient], policy))
    return out


def patient_sort_key(patient: str) -> tuple[int, int, str]:
    """Pseudonyms sort by their numeric suffix, anything else lexically after them."""
    head, _, tail = patient.partition("_")
    if head == "P" and tail.isdigit():
        return (0, int(tail), patient)
    return (1, 0, patient)


def write_assignments(assignments: Iterable[VariableAssignment], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for a in assignments:
            fh.write(json.dumps(a.to_json(), ensure_ascii=False, sort_keys=True) + "\n")
    return path


def read_assignments(path: str | Path) -> list[VariableAssignment]:
    with Path(path).open(encoding="utf-8") as fh:
        return [VariableAssignment.from_json(json.loads(line)) for line in fh if line.strip()]
