"""Concept registry built from the disease catalog.

A concept is identified by the primary code binding of the variables that
carry it; variables of different diseases that share that binding share the
concept. The synonym index maps every normalized surface form to the set of
concepts it can denote, so ambiguous forms are visible by construction.
"""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import CodeBinding, DiseaseModule, VariableSpec

RELATIONS = ("is-a", "treats", "indicates")

_TOKEN = re.compile(r"[^\W_]+")


class RegistryError(ValueError):
    """A catalog binding cannot be resolved to a single concept."""


def normalize_surface(text: str) -> str:
    return " ".join(_TOKEN.findall(text.casefold()))


def surface_tokens(text: str) -> tuple[str, ...]:
    return tuple(_TOKEN.findall(text.casefold()))


@dataclass(frozen=True)
class Concept:
    key: CodeBinding
    display: str
    category: str
    value_kind: str
    unit: str | None
    codes: tuple[CodeBinding, ...]
    synonyms: tuple[str, ...]
    variable_ids: tuple[str, ...]


@dataclass(frozen=True)
class Relation:
    source: CodeBinding
    relation: str
    target: CodeBinding


@dataclass
class OntologyRegistry:
    concepts: dict[CodeBinding, Concept] = field(default_factory=dict)
    code_index: dict[CodeBinding, CodeBinding] = field(default_factory=dict)
    synonym_index: dict[str, frozenset[CodeBinding]] = field(default_factory=dict)
    # normalized surface -> ambiguity classes of the variables sharing it
    ambiguous: dict[str, frozenset[str]] = field(default_factory=dict)
    relations: list[Relation] = field(default_factory=list)
    variables: dict[str, VariableSpec] = field(default_factory=dict)
    disease_variables: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def concept_for_code(self, system: str | None, code: str | None) -> Concept | None:
        if not system or not code:
            return None
        key = self.code_index.get(CodeBinding(system, code))
        return self.concepts[key] if key is not None else None

    def concepts_for_surface(self, text: str) -> list[Concept]:
        keys = self.synonym_index.get(normalize_surface(text), frozenset())
        return [self.concepts[k] for k in sorted(keys, key=str)]

    def is_ambiguous(self, text: str) -> bool:
        return len(self.synonym_index.get(normalize_surface(text), ())) > 1

    def variables_of(self, concept: Concept, disease_id: str | None = None) -> list[str]:
        if disease_id is None:
            return list(concept.variable_ids)
        allowed = set(self.disease_variables.get(disease_id, ()))
        return [v for v in concept.variable_ids if v in allowed]

    def related(self, key: CodeBinding, relation: str) -> list[CodeBinding]:
        return sorted((r.target for r in self.relations
                       if r.source == key and r.relation == relation), key=str)

    def surfaces(self) -> Iterable[tuple[str, frozenset[CodeBinding]]]:
        return self.synonym_index.items()


def build_registry(catalog: Sequence[DiseaseModule]) -> OntologyRegistry:
    reg = OntologyRegistry()
    grouped: dict[CodeBinding, list[VariableSpec]] = defaultdict(list)
    for module in catalog:
        reg.disease_variables[module.disease_id] = tuple(s.variable_id for s in module.variable_specs)
        for spec in module.variable_specs:
            grouped[spec.primary_code].append(spec)
            reg.variables[spec.variable_id] = spec

    for key, specs in grouped.items():
        first = specs[0]
        codes: list[CodeBinding] = []
        synonyms: list[str] = []
        for spec in specs:
            for b in spec.code_bindings:
                if b not in codes:
                    codes.append(b)
            for s in spec.synonyms:
                if s not in synonyms:
                    synonyms.append(s)
        reg.concepts[key] = Concept(
            key=key,
            display=first.display,
            category=first.category,
            value_kind=first.value_kind,
            unit=first.unit,
            codes=tuple(codes),
            synonyms=tuple(synonyms),
            variable_ids=tuple(s.variable_id for s in specs),
        )
        for b in codes:
            owner = reg.code_index.setdefault(b, key)
            if owner != key:
                culprit = next(s.variable_id for s in specs if b in s.code_bindings)
                raise RegistryError(
                    f"{culprit}: code binding {b} already denotes concept {owner}")

    index: dict[str, set[CodeBinding]] = defaultdict(set)
    classes: dict[str, set[str]] = defaultdict(set)
    for key, concept in reg.concepts.items():
        for s in concept.synonyms:
            norm = normalize_surface(s)
            if not norm:
                raise RegistryError(f"{concept.variable_ids[0]}: synonym {s!r} has no word characters")
            index[norm].add(key)
    for spec in reg.variables.values():
        for s in spec.synonyms:
            if spec.ambiguity_class:
                classes[normalize_surface(s)].add(spec.ambiguity_class)
    reg.synonym_index = {k: frozenset(v) for k, v in sorted(index.items())}
    reg.ambiguous = {k: frozenset(classes.get(k, ())) for k, v in reg.synonym_index.items()
                     if len(v) > 1}
    reg.relations = _relations(catalog, reg)
    return reg


def _relations(catalog: Sequence[DiseaseModule], reg: OntologyRegistry) -> list[Relation]:
    """Disease-local edges: treatments treat and findings indicate conditions.
    Every concept is-a member of its category node."""
    edges: set[Relation] = set()
    for module in catalog:
        conditions = [s.primary_code for s in module.variable_specs if s.category == "Conditions"]
        for spec in module.variable_specs:
            for cond in conditions:
                if spec.category in ("Medications", "Procedures", "Care-plans"):
                    edges.add(Relation(spec.primary_code, "treats", cond))
                elif spec.category in ("Symptoms", "Observations"):
                    edges.add(Relation(spec.primary_code, "indicates", cond))
    for key, concept in reg.concepts.items():
        edges.add(Relation(key, "is-a", category_node(concept.category)))
    return sorted(edges, key=lambda r: (str(r.source), r.relation, str(r.target)))


def category_node(category: str) -> CodeBinding:
    return CodeBinding("CATEGORY", category)
