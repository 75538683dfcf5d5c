from __future__ import annotations

import datetime as dt
import json

import pytest
from hypothesis import given, settings, strategies as st

from clinistruct.formats import FormatKind, UnsupportedCategoryError
from clinistruct.ingest import parse_csv_extract, parse_hl7_message
from clinistruct.scatter import (
    ZERO_NOISE,
    NoiseProfile,
    apply_noise,
    load_noise_profile,
    noise_presets,
    plan_fragmentation,
    read_documents,
    render_csv_extract,
    render_fhir_bundle,
    render_hl7_messages,
    render_narrative_note,
    scatter_patient,
    write_documents,
)

from .strategies import MODULES, make_event, record_for

T0 = dt.datetime(2020, 5, 16, 9, 30)


def _spec(vid):
    disease = vid.split(".")[0]
    return MODULES[disease].variable(vid)


def _psa_record():
    ev = make_event(_spec("prostate_cancer.ipsa"), T0, "X", 1, value=8.8)
    return record_for("prostate_cancer", [ev])


def test_fhir_single_observation():
    record = _psa_record()
    doc = render_fhir_bundle(record, record.events)
    bundle = json.loads(doc.body)
    assert bundle["resourceType"] == "Bundle"
    obs = [e["resource"] for e in bundle["entry"] if e["resource"]["resourceType"] == "Observation"]
    assert len(obs) == 1
    assert obs[0]["code"]["coding"][0]["code"] == "2857-1"
    assert obs[0]["valueQuantity"]["value"] == 8.8
    assert obs[0]["valueQuantity"]["unit"] == "ng/mL"


@pytest.mark.parametrize("render", [render_fhir_bundle, render_hl7_messages, render_csv_extract])
def test_empty_events_rejected(render):
    record = _psa_record()
    with pytest.raises(ValueError):
        render(record, [])


def test_narrative_rejects_empty():
    with pytest.raises(ValueError):
        render_narrative_note(_psa_record(), [])


def test_hl7_obx_shape():
    record = _psa_record()
    body = render_hl7_messages(record, record.events).body.decode()
    segments = body.split("\r")
    assert segments[0].startswith("MSH|^~\\&|")
    obx = next(s for s in segments if s.startswith("OBX"))
    assert obx.startswith("OBX|1|NM|2857-1^")
    assert "||8.8|ng/mL|||||F" in obx
    assert "\n" not in body


def test_hl7_immunization_is_rxa():
    ev = make_event(_spec("ear_infections.influenza_vaccine"), T0, "X", 2)
    record = record_for("ear_infections", [ev])
    body = render_hl7_messages(record, record.events).body.decode()
    assert any(s.startswith("RXA|") for s in body.split("\r"))
    parsed = parse_hl7_message(render_hl7_messages(record, record.events).body)
    assert len(parsed.statements) == 1


def test_hl7_unsupported_category():
    care = next(s for m in MODULES.values() for s in m.variable_specs if s.category == "Care-plans")
    ev = make_event(care, T0, "X", 3)
    record = record_for(care.disease_id, [ev])
    with pytest.raises(UnsupportedCategoryError):
        render_hl7_messages(record, record.events)


def test_events_of_another_patient_rejected():
    record = _psa_record()
    other = make_event(_spec("prostate_cancer.ipsa"), T0, "SOMEONE-ELSE", 4)
    with pytest.raises(ValueError, match="belongs to"):
        render_csv_extract(record, [other])


def test_csv_two_events_three_lines():
    evs = [make_event(_spec("prostate_cancer.ipsa"), T0, "X", 1, value=8.8),
           make_event(_spec("prostate_cancer.adt_duration"), T0 + dt.timedelta(days=3), "X", 2)]
    record = record_for("prostate_cancer", evs)
    doc = render_csv_extract(record, record.events)
    lines = doc.body.decode().split("\r\n")
    assert lines[0] == "event_id,timestamp,category,code,display,value,unit"
    assert len([x for x in lines if x]) == 3
    assert len(parse_csv_extract(doc.body).statements) == 2


def test_narrative_medication_uses_a_synonym():
    spec = _spec("ear_infections.amoxicillin")
    record = record_for("ear_infections", [make_event(spec, T0, "X", 5)])
    text = render_narrative_note(record, record.events, seed=3).body.decode().casefold()
    assert any(s.casefold() in text for s in spec.synonyms)


def test_plan_three_events():
    evs = [make_event(_spec("prostate_cancer.ipsa"), T0 + dt.timedelta(days=i), "X", i)
           for i in range(3)]
    record = record_for("prostate_cancer", evs)
    plan = plan_fragmentation(record, 1)
    assert len(plan.documents) >= 2
    assert plan.covered() == {e.event_id for e in record.events}
    assert len(plan.formats()) >= 2


def test_plan_single_event_two_docs():
    record = _psa_record()
    plan = plan_fragmentation(record, 1)
    assert len(plan.documents) == 2
    assert all(d.event_ids == (record.events[0].event_id,) for d in plan.documents)


def test_plan_deterministic(small_corpus):
    records, _ = small_corpus
    for record in records[:10]:
        assert plan_fragmentation(record, 9) == plan_fragmentation(record, 9)


def test_plan_invariants_on_corpus(small_corpus):
    records, _ = small_corpus
    for record in records:
        plan = plan_fragmentation(record, 3)
        assert 2 <= len(plan.documents) <= 20
        assert plan.covered() == {e.event_id for e in record.events}
        assert len(plan.formats()) >= 2
        assert all(d.event_ids for d in plan.documents)


def test_duplicates_appear_with_rate(small_corpus):
    records, _ = small_corpus
    dup = 0
    for record in records:
        plan = plan_fragmentation(record, 3, duplicate_rate=1.0)
        counts = {}
        for d in plan.documents:
            for eid in d.event_ids:
                counts[eid] = counts.get(eid, 0) + 1
        dup += sum(c > 1 for c in counts.values())
    assert dup > 0


def test_zero_noise_is_identity(small_corpus, variables):
    records, _ = small_corpus
    for doc in scatter_patient(records[0], 5):
        assert apply_noise(doc, ZERO_NOISE, 5, variables) is doc


def test_noise_deterministic(small_corpus, variables):
    records, _ = small_corpus
    profile = load_noise_profile("default")
    a = scatter_patient(records[3], 5, profile, variables)
    b = scatter_patient(records[3], 5, profile, variables)
    assert [d.body for d in a] == [d.body for d in b]


def test_synonym_swap_otitis_media(variables):
    spec = _spec("ear_infections.otitis_media")
    record = record_for("ear_infections", [make_event(spec, T0, "X", 6)])
    doc = render_narrative_note(record, record.events, seed=1)
    assert "otitis media" in doc.body.decode().casefold()
    noisy = apply_noise(doc, NoiseProfile(synonym_swap_rate=1.0), 2, variables)
    text = noisy.body.decode().casefold()
    assert "otitis media" not in text
    assert any(s in text for s in ("ear infection", "middle ear infection"))


def test_typo_never_touches_codes(small_corpus, variables):
    records, _ = small_corpus
    profile = NoiseProfile(typo_rate=1.0)
    for doc in scatter_patient(records[1], 8):
        if doc.format is not FormatKind.CSV_EXTRACT:
            continue
        noisy = apply_noise(doc, profile, 8, variables)
        clean_rows = [r.split(",") for r in doc.body.decode().split("\r\n")[1:] if r]
        noisy_rows = [r.split(",") for r in noisy.body.decode().split("\r\n")[1:] if r]
        assert [r[3] for r in clean_rows] == [r[3] for r in noisy_rows]
        assert [r[4] for r in clean_rows] != [r[4] for r in noisy_rows]


def test_conflict_duplicate_is_later_and_differs(variables):
    spec = _spec("prostate_cancer.ipsa")
    record = record_for("prostate_cancer", [make_event(spec, T0, "X", 7, value=8.8)])
    doc = render_csv_extract(record, record.events)
    noisy = apply_noise(doc, NoiseProfile(duplicate_conflict_rate=1.0), 1, variables)
    parsed = parse_csv_extract(noisy.body)
    assert len(parsed.statements) == 2
    first, second = sorted(parsed.statements, key=lambda s: s.timestamp)
    assert first.value == 8.8 and second.value != 8.8


def test_omission_removes_events(variables):
    spec = _spec("prostate_cancer.ipsa")
    record = record_for("prostate_cancer", [make_event(spec, T0, "X", 8, value=8.8)])
    noisy = apply_noise(render_csv_extract(record, record.events),
                        NoiseProfile(omission_rate=1.0), 1, variables)
    assert parse_csv_extract(noisy.body).statements == []


def test_noise_rates_validated():
    with pytest.raises(ValueError):
        NoiseProfile(typo_rate=1.5)


def test_presets_load():
    assert {"zero", "default", "targeted"} <= set(noise_presets())
    assert load_noise_profile("zero").is_zero()
    assert not load_noise_profile("targeted").is_zero()


def test_noise_profile_json_round_trip(tmp_path):
    profile = load_noise_profile("targeted")
    path = tmp_path / "p.json"
    path.write_text(json.dumps(profile.to_json()))
    assert load_noise_profile(str(path)) == profile


def test_write_read_documents(tmp_path, small_corpus):
    records, _ = small_corpus
    docs = scatter_patient(records[2], 4)
    write_documents(docs, tmp_path)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert len(manifest["documents"]) == len(docs)
    for entry in manifest["documents"]:
        assert entry["path"].startswith(records[2].patient_id + "/")
        assert entry["path"].rsplit(".", 1)[-1] in ("json", "hl7", "csv", "txt")
    back = read_documents(tmp_path)
    assert sorted(d.body for d in back) == sorted(d.body for d in docs)


def test_tampered_document_detected(tmp_path, small_corpus):
    records, _ = small_corpus
    docs = scatter_patient(records[2], 4)
    write_documents(docs, tmp_path)
    entry = json.loads((tmp_path / "manifest.json").read_text())["documents"][0]
    (tmp_path / entry["path"]).write_bytes(b"tampered")
    with pytest.raises(ValueError, match="digest"):
        read_documents(tmp_path)


@settings(max_examples=30, deadline=None)
@given(index=st.integers(min_value=0, max_value=79), seed=st.integers(min_value=0, max_value=10**6))
def test_all_bodies_utf8_and_hl7_has_no_newlines(small_corpus, variables, index, seed):
    records, _ = small_corpus
    profile = load_noise_profile("default")
    for doc in scatter_patient(records[index], seed, profile, variables):
        text = doc.body.decode("utf-8")
        if doc.format is FormatKind.HL7_V2:
            assert "\n" not in text
