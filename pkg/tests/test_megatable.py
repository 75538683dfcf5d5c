from __future__ import annotations

import csv

import pytest

from clinistruct.extract import FOUND, MISSING, VariableAssignment, extract_corpus
from clinistruct.ingest import SourceLink, parse_document
from clinistruct.megatable import (
    ID_COLUMN,
    Cell,
    CompletenessError,
    MegaTable,
    assemble_disease_table,
    export_csv,
    export_json,
    import_csv,
    import_json,
)
from clinistruct.scatter import scatter_corpus
from clinistruct.values import SENTINEL


def _assign(patient, vid, value):
    if value == SENTINEL:
        return VariableAssignment(patient, vid, value, MISSING, (), "no-candidates")
    return VariableAssignment(patient, vid, value, FOUND, (SourceLink(None, "line 2", "D1"),), "single")


@pytest.fixture(scope="module")
def prostate(catalog):
    return next(m for m in catalog if m.disease_id == "prostate_cancer")


@pytest.fixture(scope="module")
def prostate_table(small_corpus, registry, matcher, prostate):
    records, _ = small_corpus
    records = [r for r in records if r.disease_id == "prostate_cancer"]
    docs = scatter_corpus(records, 3)
    parsed = [parse_document(d.body, registry, doc_id=d.doc_id, patient=d.patient_id,
                             matcher=matcher) for d in docs]
    out = extract_corpus(parsed, registry, {r.patient_id: r.disease_id for r in records})
    return assemble_disease_table(out, prostate)


def test_prostate_columns_follow_catalog(prostate_table, prostate):
    assert prostate_table.names[:3] == ("iPSA", "ISUP score in biopsy specimen", "Date of biopsy")
    assert prostate_table.columns == tuple(s.variable_id for s in prostate.variable_specs)
    assert prostate_table.shape == (5, len(prostate.variable_specs))


def test_non_sentinel_cells_have_sources(prostate_table):
    for _, cells in prostate_table.rows:
        for cell in cells:
            assert cell.value == SENTINEL or cell.sources


def test_one_by_three(prostate):
    vids = [s.variable_id for s in prostate.variable_specs]
    sub = type(prostate)(prostate.disease_id, prostate.name, prostate.variable_specs[:3], ())
    table = assemble_disease_table([_assign("P_1", v, "x") for v in vids[:3]], sub)
    assert table.shape == (1, 3)


def test_rows_sorted_numerically(prostate):
    vid = prostate.variable_specs[0].variable_id
    sub = type(prostate)(prostate.disease_id, prostate.name, prostate.variable_specs[:1], ())
    table = assemble_disease_table([_assign(p, vid, "1 ng/mL") for p in ("P_10", "P_2", "P_1")], sub)
    assert table.patients() == ["P_1", "P_2", "P_10"]


def test_missing_pair_named(prostate):
    vids = [s.variable_id for s in prostate.variable_specs]
    rows = [_assign("P_1", v, "x") for v in vids[1:]]
    with pytest.raises(CompletenessError, match=vids[0]):
        assemble_disease_table(rows, prostate, patients=["P_1"])


def test_empty_cell_rejected():
    with pytest.raises(ValueError, match="sentinel|None"):
        MegaTable("d", ("v",), ("V",), (("P_1", (Cell(""),)),))


def test_csv_round_trip(tmp_path, prostate_table, prostate):
    path = export_csv(prostate_table, tmp_path / "m.csv")
    back = import_csv(path, prostate)
    assert back.values() == prostate_table.values()
    with path.open(newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh))
    assert header[0] == ID_COLUMN


def test_json_round_trip(tmp_path, prostate_table):
    assert import_json(export_json(prostate_table, tmp_path / "m.json")) == prostate_table


def test_empty_variable_disease(tmp_path, prostate):
    empty = type(prostate)("none", "None", (), ())
    table = assemble_disease_table([], empty, patients=["P_1"])
    path = export_csv(table, tmp_path / "e.csv")
    assert path.read_text(encoding="utf-8").splitlines() == [ID_COLUMN, "P_1"]


def test_table3_row(tmp_path, prostate):
    vids = [s.variable_id for s in prostate.variable_specs]
    values = {vids[0]: "44 ng/ml", vids[1]: "8 (3+5)", vids[2]: "2017-07-31"}
    rows = [_assign("P_844", v, values.get(v, SENTINEL)) for v in vids]
    table = assemble_disease_table(rows, prostate)
    path = export_csv(table, tmp_path / "p.csv")
    with path.open(newline="", encoding="utf-8") as fh:
        _, row = list(csv.reader(fh))
    assert row[:4] == ["P_844", "44 ng/ml", "8 (3+5)", "2017-07-31"]
