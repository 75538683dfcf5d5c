"""Per-disease patient x variable tables with source links."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

from .corpus import DiseaseModule
from .extract import VariableAssignment, patient_sort_key
from .ingest import SourceLink
from .values import SENTINEL

ID_COLUMN = "Anonymized ID"
MEGATABLE_VERSION = 1


class CompletenessError(ValueError):
    """A (patient, variable) pair has no assignment."""


@dataclass(frozen=True)
class Cell:
    value: str
    sources: tuple[SourceLink, ...] = ()


@dataclass(frozen=True)
class MegaTable:
    disease_id: str
    columns: tuple[str, ...]
    names: tuple[str, ...]
    rows: tuple[tuple[str, tuple[Cell, ...]], ...] = field(default=())

    def __post_init__(self) -> None:
        if len(self.columns) != len(self.names):
            raise ValueError("columns and names differ in length")
        for patient, cells in self.rows:
            if len(cells) != len(self.columns):
                raise ValueError(f"row {patient} has {len(cells)} cells, expected {len(self.columns)}")
            for col, cell in zip(self.columns, cells):
                if not cell.value:
                    raise ValueError(f"empty cell at ({patient}, {col}); use {SENTINEL!r}")

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.columns))

    def patients(self) -> list[str]:
        return [p for p, _ in self.rows]

    def cell(self, patient: str, variable_id: str) -> Cell:
        j = self.columns.index(variable_id)
        for p, cells in self.rows:
            if p == patient:
                return cells[j]
        raise KeyError(patient)

    def values(self) -> list[list[str]]:
        return [[p, *(c.value for c in cells)] for p, cells in self.rows]


def assemble_disease_table(
    assignments: Iterable[VariableAssignment],
    disease: DiseaseModule,
    patients: Sequence[str] | None = None,
) -> MegaTable:
    """Rows ordered by pseudonym number, columns in catalog order.

    ``patients`` defaults to every patient with an assignment for one of the
    disease's variables.
    """
    columns = tuple(s.variable_id for s in disease.variable_specs)
    wanted = set(columns)
    table: dict[tuple[str, str], VariableAssignment] = {}
    seen: set[str] = set()
    for a in assignments:
        if a.variable_id in wanted:
            table[(a.patient, a.variable_id)] = a
            seen.add(a.patient)
    roster = sorted(patients if patients is not None else seen, key=patient_sort_key)
    rows = []
    for patient in roster:
        cells = []
        for vid in columns:
            a = table.get((patient, vid))
            if a is None:
                raise CompletenessError(f"missing assignment for ({patient}, {vid})")
            cells.append(Cell(a.extracted_value, a.evidence))
        rows.append((patient, tuple(cells)))
    return MegaTable(disease.disease_id, columns,
                     tuple(s.name for s in disease.variable_specs), tuple(rows))


def export_csv(table: MegaTable, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow([ID_COLUMN, *table.names])
        writer.writerows(table.values())
    return path


def import_csv(path: str | Path, disease: DiseaseModule) -> MegaTable:
    """Values only; source links live in the JSON export."""
    with Path(path).open(encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:1] != [ID_COLUMN]:
        raise ValueError(f"{path}: first header cell must be {ID_COLUMN!r}")
    names = tuple(rows[0][1:])
    by_name = {s.name: s.variable_id for s in disease.variable_specs}
    try:
        columns = tuple(by_name[n] for n in names)
    except KeyError as exc:
        raise ValueError(f"{path}: unknown column {exc.args[0]!r}") from None
    body = tuple((r[0], tuple(Cell(v) for v in r[1:])) for r in rows[1:])
    return MegaTable(disease.disease_id, columns, names, body)


def to_json(table: MegaTable) -> dict[str, Any]:
    return {
        "megatable_version": MEGATABLE_VERSION,
        "disease_id": table.disease_id,
        "columns": [{"variable_id": c, "name": n} for c, n in zip(table.columns, table.names)],
        "rows": [{ID_COLUMN: p, **{c: cell.value for c, cell in zip(table.columns, cells)}}
                 for p, cells in table.rows],
        "sources": [{ID_COLUMN: p, **{c: [s.to_json() for s in cell.sources]
                                      for c, cell in zip(table.columns, cells)}}
                    for p, cells in table.rows],
    }


def from_json(obj: dict[str, Any]) -> MegaTable:
    if obj.get("megatable_version") != MEGATABLE_VERSION:
        raise ValueError(f"unsupported megatable_version {obj.get('megatable_version')!r}")
    columns = tuple(c["variable_id"] for c in obj["columns"])
    names = tuple(c["name"] for c in obj["columns"])
    rows = []
    for row, src in zip(obj["rows"], obj["sources"]):
        if row[ID_COLUMN] != src[ID_COLUMN]:
            raise ValueError(f"rows and sources disagree at {row[ID_COLUMN]!r}")
        cells = tuple(Cell(row[c], tuple(SourceLink.from_json(s) for s in src[c])) for c in columns)
        rows.append((row[ID_COLUMN], cells))
    return MegaTable(obj["disease_id"], columns, names, tuple(rows))


def export_json(table: MegaTable, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_json(table), indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def import_json(path: str | Path) -> MegaTable:
    return from_json(json.loads(Path(path).read_text(encoding="utf-8")))
