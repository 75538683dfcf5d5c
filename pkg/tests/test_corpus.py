from __future__ import annotations

import copy
import json

import pytest
from hypothesis import given, settings, strategies as st

from clinistruct.corpus import (
    CatalogConflictError,
    CatalogError,
    GroundTruthLedger,
    LedgerEntry,
    generate_corpus,
    generate_patient,
    load_disease_catalog,
    parse_catalog,
    read_ground_truth_ledger,
    write_ground_truth_ledger,
)
from clinistruct.values import CATEGORIES, SENTINEL

TABLE1_NAMES = [
    "Colorectal Cancer", "Prostate Cancer", "Contraceptives", "Female Reproduction", "Gout",
    "Attention Deficit Disorder (ADD)", "Epilepsy", "COPD", "Asthma", "Allergic Rhinitis",
    "Bronchitis", "Dermatitis", "Atopy", "Food Allergies", "Appendicitis", "Ear Infections",
]


def _raw_catalog():
    from clinistruct.corpus import default_catalog_path
    return json.loads(default_catalog_path().read_text(encoding="utf-8"))


def test_bundled_catalog_names(catalog):
    assert [m.name for m in catalog] == TABLE1_NAMES


def test_categories_cover_all_ten(catalog):
    assert {s.category for m in catalog for s in m.variable_specs} == set(CATEGORIES)
    assert len(CATEGORIES) == 10


def test_empty_catalog_file(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("", encoding="utf-8")
    with pytest.raises(CatalogError, match="no diseases defined"):
        load_disease_catalog(path)


def test_catalog_without_diseases():
    with pytest.raises(CatalogError, match="no diseases defined"):
        parse_catalog({"catalog_version": _raw_catalog()["catalog_version"], "diseases": []})


def test_duplicate_disease_id():
    doc = _raw_catalog()
    dup = copy.deepcopy(doc["diseases"][0])
    doc["diseases"].append(dup)
    with pytest.raises(CatalogConflictError):
        parse_catalog(doc)


def test_schema_error_names_location(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"catalog_version": 1,\n "diseases": [', encoding="utf-8")
    with pytest.raises(CatalogError, match="line 2"):
        load_disease_catalog(path)


def test_generate_patient_deterministic(catalog):
    prostate = next(m for m in catalog if m.disease_id == "prostate_cancer")
    assert generate_patient(prostate, 0, 42) == generate_patient(prostate, 0, 42)


def test_neighbouring_patients_differ(catalog):
    prostate = next(m for m in catalog if m.disease_id == "prostate_cancer")
    a, b = generate_patient(prostate, 0, 42), generate_patient(prostate, 1, 42)
    assert a.patient_id != b.patient_id
    assert any(a.truth[v] != b.truth[v] for v in a.truth)


def test_table3_values_are_representable(catalog):
    prostate = next(m for m in catalog if m.disease_id == "prostate_cancer")
    isup = prostate.variable("prostate_cancer.isup_score_in_biopsy_specimen")
    assert "8 (3+5)" in isup.options
    ipsa = prostate.variable("prostate_cancer.ipsa")
    assert ipsa.plausible(44.0)


def test_corpus_counts(catalog):
    records, ledger = generate_corpus(catalog, 1, 0)
    assert len(records) == 16
    assert len(ledger) == sum(len(m.variable_specs) for m in catalog)


def test_ledger_coverage_and_truth(small_corpus, catalog):
    records, ledger = small_corpus
    pairs = [(e.patient_id, e.variable_id) for e in ledger.entries]
    assert len(pairs) == len(set(pairs))
    assert len(pairs) == sum(5 * len(m.variable_specs) for m in catalog)
    by_id = {r.patient_id: r for r in records}
    for e in ledger.entries:
        record = by_id[e.patient_id]
        own = [ev for ev in record.events if ev.variable_id == e.variable_id]
        assert e.true_value == (own[-1].value_text if own else SENTINEL)


def test_numeric_truth_in_range(small_corpus, variables):
    records, _ = small_corpus
    for record in records:
        for ev in record.events:
            spec = variables[ev.variable_id]
            assert spec.plausible(ev.value), (ev.variable_id, ev.value)


def test_events_time_ordered(small_corpus):
    records, _ = small_corpus
    for record in records:
        stamps = [e.timestamp for e in record.events]
        assert stamps == sorted(stamps)


def test_ledger_write_read(tmp_path, small_corpus):
    _, ledger = small_corpus
    path = write_ground_truth_ledger(ledger, tmp_path / "ledger.jsonl")
    assert read_ground_truth_ledger(path).entries == ledger.entries


def test_empty_ledger_is_empty_file(tmp_path):
    path = write_ground_truth_ledger(GroundTruthLedger(), tmp_path / "l.jsonl")
    assert path.read_bytes() == b""


def test_ledger_lines_sorted(tmp_path):
    entries = [LedgerEntry("p2", "d", "v1", "1"), LedgerEntry("p1", "d", "v2", "x"),
               LedgerEntry("p1", "d", "v1", "None")]
    path = write_ground_truth_ledger(GroundTruthLedger(entries), tmp_path / "l.jsonl")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 3
    assert [json.loads(x)["patient_id"] + json.loads(x)["variable_id"] for x in lines] == \
        ["p1v1", "p1v2", "p2v1"]


def test_ledger_write_error_has_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        write_ground_truth_ledger(GroundTruthLedger(), blocker / "sub" / "l.jsonl")


def test_two_runs_identical_ledgers(tmp_path, catalog):
    a = write_ground_truth_ledger(generate_corpus(catalog, 3, 7)[1], tmp_path / "a.jsonl")
    b = write_ground_truth_ledger(generate_corpus(catalog, 3, 7)[1], tmp_path / "b.jsonl")
    assert a.read_bytes() == b.read_bytes()


def test_parallel_generation_matches_serial(catalog):
    serial, _ = generate_corpus(catalog[:3], 4, 5, jobs=1)
    parallel, _ = generate_corpus(catalog[:3], 4, 5, jobs=2)
    assert serial == parallel


@settings(max_examples=25, deadline=None)
@given(index=st.integers(min_value=0, max_value=10_000), seed=st.integers(min_value=0, max_value=2**32))
def test_generation_is_pure(catalog, index, seed):
    module = catalog[index % len(catalog)]
    assert generate_patient(module, index, seed) == generate_patient(module, index, seed)
