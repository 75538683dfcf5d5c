from __future__ import annotations

import json

import pytest
from hypothesis import given, settings, strategies as st

from clinistruct.formats import FormatKind, hl7_escape, hl7_unescape
from clinistruct.ingest import (
    CanonicalStatement,
    MalformedMessageError,
    ParseError,
    ParsedDocument,
    SourceLink,
    detect_format,
    parse_csv_extract,
    parse_document,
    parse_fhir_bundle,
    parse_hl7_message,
    parse_narrative_note,
    resolve_locator,
)
from clinistruct.scatter import render_document, scatter_patient, supports

from .strategies import event_sets, record_for

MSH = b"MSH|^~\\&|A|B|C|D|20200101||ORU^R01|1|P|2.5\r"


def expected(events):
    return sorted((e.category, e.code, e.value_text, e.unit, e.timestamp) for e in events)


def recovered(parsed):
    return sorted(s.content_key() for s in parsed.statements)


def test_detect_format_rules():
    assert detect_format(MSH) is FormatKind.HL7_V2
    assert detect_format(b'{"resourceType":"Bundle","entry":[]}') is FormatKind.FHIR_JSON
    assert detect_format(b"event_id,timestamp,category,code,display,value,unit\r\n") \
        is FormatKind.CSV_EXTRACT
    assert detect_format(b"The patient felt fine.") is FormatKind.NARRATIVE


def test_detect_format_empty():
    with pytest.raises(ParseError):
        detect_format(b"")


def test_hl7_obx_example():
    data = MSH + b"OBX|1|NM|2857-1^PSA^LN||8.8|ng/mL|||||F\r"
    (stmt,) = parse_hl7_message(data).statements
    assert (stmt.category, stmt.code, stmt.value, stmt.unit) == ("Observations", "2857-1", 8.8, "ng/mL")


def test_hl7_msh_pid_only():
    parsed = parse_hl7_message(MSH + b"PID|1||X^^^MRN\r")
    assert parsed.statements == [] and parsed.warnings == []
    assert parsed.patient == "X"


def test_hl7_unknown_segment_lenient_and_strict():
    data = MSH + b"OBX|1|NM|2857-1^PSA^LN||8.8|ng/mL|||||F\rZZZ|1\r"
    lenient = parse_hl7_message(data)
    assert len(lenient.statements) == 1 and len(lenient.warnings) == 1
    with pytest.raises(ParseError):
        parse_hl7_message(data, strict=True)


def test_hl7_missing_msh():
    with pytest.raises(MalformedMessageError):
        parse_hl7_message(b"OBX|1|NM|2857-1^PSA^LN||8.8|ng/mL|||||F\r")


@given(st.text(alphabet="ab|^~\\&c", max_size=20))
def test_hl7_escape_round_trip(text):
    escaped = hl7_escape(text)
    assert not any(ch in escaped for ch in "|^~&")
    assert hl7_unescape(escaped) == text


def test_hl7_escapes_decoded():
    data = MSH + b"OBX|1|ST|1234-5^Note^LN||a\\F\\b\\S\\c|||||F\r"
    (stmt,) = parse_hl7_message(data).statements
    assert stmt.value == "a|b^c"


def test_fhir_malformed_json_locates_error():
    with pytest.raises(ParseError, match="line 2"):
        parse_fhir_bundle(b'{"resourceType": "Bundle",\n "entry": [}')


def test_csv_header_only():
    assert parse_csv_extract(b"event_id,timestamp,category,code,display,value,unit\r\n").statements == []


def test_csv_ragged_row():
    data = b"event_id,timestamp,category,code,display,value,unit\r\nE1,2020-01-01T10:00,Symptoms\r\n"
    with pytest.raises(ParseError, match="line 2"):
        parse_csv_extract(data)


def test_narrative_psa_sentence(registry):
    (stmt,) = parse_narrative_note(b"Report\n\nPSA measured at 8.8 ng/mL on 2020-05-16\n",
                                   registry).statements
    assert (stmt.category, stmt.value, stmt.unit) == ("Observations", 8.8, "ng/mL")
    assert stmt.timestamp.date().isoformat() == "2020-05-16"


def test_narrative_no_terms(registry):
    assert parse_narrative_note(b"Note\n\nNothing of interest today.\n", registry).statements == []


def test_narrative_synonym_gets_code(registry):
    (stmt,) = parse_narrative_note(b"Note\n\nOtitis media diagnosed on 2020-05-16 at 10:00.\n",
                                   registry).statements
    assert stmt.category == "Conditions" and stmt.code is not None


def test_narrative_typo_tolerated(registry):
    (stmt,) = parse_narrative_note(b"Note\n\nOtitus media diagnosed on 2020-05-16 at 10:00.\n",
                                   registry).statements
    assert stmt.display == "otitis media"


def test_narrative_short_tokens_exact_only(registry):
    assert parse_narrative_note(b"Note\n\nPSB measured at 8.8 ng/mL on 2020-05-16\n",
                                registry).statements == []


def test_narrative_ambiguous_surface_is_uncoded(registry):
    (stmt,) = parse_narrative_note(b"Note\n\nCough reported on 2020-05-16 at 10:00: yes.\n",
                                   registry).statements
    assert stmt.code is None and stmt.display.casefold() == "cough"


def test_statement_requires_code_or_display():
    with pytest.raises(ValueError):
        CanonicalStatement(None, "Symptoms", None, None, "", True, None, None,
                           SourceLink(None, "line 2"), FormatKind.CSV_EXTRACT)


def test_numeric_statement_needs_unit():
    with pytest.raises(ValueError):
        CanonicalStatement(None, "Observations", "LOINC", "1", "x", 1.0, None, None,
                           SourceLink(None, "line 2"), FormatKind.CSV_EXTRACT)


def test_locators_resolve_on_clean_corpus(small_corpus, registry, matcher):
    records, _ = small_corpus
    for record in records[::4]:
        for doc in scatter_patient(record, 2):
            parsed = parse_document(doc.body, registry, matcher=matcher)
            for s in parsed.statements:
                text = resolve_locator(doc.body, doc.format, s.source.locator).casefold()
                assert (s.code and s.code.casefold() in text) or s.display.casefold() in text


def test_detect_format_confusion_zero(small_corpus):
    records, _ = small_corpus
    for record in records:
        for doc in scatter_patient(record, 6):
            assert detect_format(doc.body) is doc.format


def test_parsed_document_json_round_trip(small_corpus, registry, matcher):
    records, _ = small_corpus
    for doc in scatter_patient(records[0], 1):
        parsed = parse_document(doc.body, registry, doc_id=doc.doc_id, matcher=matcher)
        back = ParsedDocument.from_json(json.loads(json.dumps(parsed.to_json())))
        assert back == parsed


def _round_trip(fmt, disease_events, seed, registry, matcher):
    disease, events = disease_events
    record = record_for(disease, events)
    doc = render_document(fmt, record, record.events, seed=seed)
    parsed = parse_document(doc.body, registry, matcher=matcher)
    assert parsed.format is fmt
    assert recovered(parsed) == expected(record.events)


@settings(max_examples=150, deadline=None)
@given(event_sets(), st.integers(min_value=0, max_value=2**32))
def test_fhir_round_trip(registry, matcher, disease_events, seed):
    _round_trip(FormatKind.FHIR_JSON, disease_events, seed, registry, matcher)


@settings(max_examples=150, deadline=None)
@given(event_sets(supported=lambda c: supports(FormatKind.HL7_V2, c)),
       st.integers(min_value=0, max_value=2**32))
def test_hl7_round_trip(registry, matcher, disease_events, seed):
    _round_trip(FormatKind.HL7_V2, disease_events, seed, registry, matcher)


@settings(max_examples=150, deadline=None)
@given(event_sets(), st.integers(min_value=0, max_value=2**32))
def test_csv_round_trip(registry, matcher, disease_events, seed):
    _round_trip(FormatKind.CSV_EXTRACT, disease_events, seed, registry, matcher)


@settings(max_examples=150, deadline=None)
@given(event_sets(), st.integers(min_value=0, max_value=2**32))
def test_narrative_round_trip(registry, matcher, disease_events, seed):
    _round_trip(FormatKind.NARRATIVE, disease_events, seed, registry, matcher)
