"""Run configuration and the stage functions behind the command line.

Every stage reads its inputs from the output root and writes its outputs
there, so stages can run one at a time or chained by :func:`run_all`.
"""
from __future__ import annotations

import dataclasses
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .anonymizer import IdentityMap, PiiDenyList, scrub_document, verify_scrub
from .corpus import (
    DiseaseModule,
    generate_corpus,
    load_disease_catalog,
    read_ground_truth_ledger,
    read_records,
    stable_seed,
    variables_by_id,
    write_ground_truth_ledger,
    write_records,
)
from .docstore import DocStore
from .evaluation import build_report, write_report
from .extract import extract_corpus, read_assignments, write_assignments
from .ingest import ParsedDocument, SurfaceMatcher, parse_document
from .megatable import assemble_disease_table, export_csv, export_json
from .ontology import build_registry
from .scatter import load_noise_profile, noise_presets, read_documents, scatter_corpus, write_documents

OUT_ENV = "CLINISTRUCT_OUT"
STAGES = ("gen", "scatter", "anonymize", "ingest", "extract", "assemble", "eval")


class ConfigError(ValueError):
    """One or more configuration problems, all reported together."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


class MissingInputError(FileNotFoundError):
    """A stage ran before the stage that produces its input."""

    def __init__(self, stage: str, path: Path, producer: str):
        super().__init__(f"{stage}: missing input {path} (run `{producer}` first)")
        self.stage, self.path, self.producer = stage, path, producer


@dataclass(frozen=True)
class RunConfig:
    seed: int | None = None
    patients_per_disease: int = 50
    diseases: tuple[str, ...] = ()
    noise: str = "zero"
    anonymize: bool = True
    strict: bool = False
    out: str = "clinistruct-out"
    jobs: int = 1
    duplicate_rate: float = 0.1
    resamples: int = 10000

    @property
    def root(self) -> Path:
        return Path(self.out)

    def validate(self, catalog: list[DiseaseModule] | None = None) -> None:
        """Collect every problem before raising."""
        problems: list[str] = []

        def is_int(x: Any) -> bool:
            return isinstance(x, int) and not isinstance(x, bool)

        if self.seed is None:
            problems.append("seed: required (no default)")
        elif not is_int(self.seed) or self.seed < 0:
            problems.append(f"seed: must be a non-negative integer, got {self.seed!r}")
        if not is_int(self.patients_per_disease) or self.patients_per_disease < 1:
            problems.append(f"patients_per_disease: must be an integer >= 1, got {self.patients_per_disease!r}")
        if not is_int(self.jobs) or self.jobs < 1:
            problems.append(f"jobs: must be an integer >= 1, got {self.jobs!r}")
        if not is_int(self.resamples) or self.resamples < 1:
            problems.append(f"resamples: must be an integer >= 1, got {self.resamples!r}")
        if not isinstance(self.duplicate_rate, (int, float)) or not 0.0 <= self.duplicate_rate <= 1.0:
            problems.append(f"duplicate_rate: must lie in [0, 1], got {self.duplicate_rate!r}")
        for name in ("anonymize", "strict"):
            if not isinstance(getattr(self, name), bool):
                problems.append(f"{name}: must be true or false")
        if not isinstance(self.out, str) or not self.out:
            problems.append("out: must be a non-empty path")
        if not isinstance(self.noise, str):
            problems.append(f"noise: must be a preset name or a path, got {self.noise!r}")
        else:
            try:
                load_noise_profile(self.noise)
            except FileNotFoundError:
                problems.append(f"noise: {self.noise!r} is neither a preset "
                                f"({', '.join(noise_presets())}) nor an existing file")
            except (ValueError, TypeError, json.JSONDecodeError) as exc:
                problems.append(f"noise: invalid profile {self.noise!r}: {exc}")
        if catalog is not None:
            known = {m.disease_id for m in catalog}
            unknown = [d for d in self.diseases if d not in known]
            if unknown:
                problems.append(f"diseases: unknown {unknown}; choose from {sorted(known)}")
        if problems:
            raise ConfigError(problems)

    def to_json(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        out["diseases"] = list(self.diseases)
        return out


CONFIG_KEYS = tuple(f.name for f in dataclasses.fields(RunConfig))


def read_config_file(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError([f"config: file {path} does not exist"])
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config: {path} line {exc.lineno} column {exc.colno}: {exc.msg}"]) from None
    if not isinstance(obj, dict):
        raise ConfigError([f"config: {path} must hold a JSON object"])
    unknown = sorted(set(obj) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError([f"config: unknown key {k!r}" for k in unknown])
    return obj


def resolve_config(flags: Mapping[str, Any], file_values: Mapping[str, Any] | None = None,
                   env: Mapping[str, str] | None = None) -> RunConfig:
    """Flags over the environment over the config file over defaults.

    ``None`` in ``flags`` means "not given". Only the output root has an
    environment override.
    """
    values: dict[str, Any] = {}
    values.update(file_values or {})
    env = os.environ if env is None else env
    if env.get(OUT_ENV):
        values["out"] = env[OUT_ENV]
    values.update({k: v for k, v in flags.items() if v is not None and k in CONFIG_KEYS})
    if "diseases" in values:
        d = values["diseases"]
        values["diseases"] = tuple([d] if isinstance(d, str) else d)
    return RunConfig(**values)


# ---------------------------------------------------------------- layout


@dataclass(frozen=True)
class Layout:
    root: Path

    records: Path = field(init=False)
    ledger: Path = field(init=False)
    raw: Path = field(init=False)
    scrubbed: Path = field(init=False)
    store: Path = field(init=False)
    identity_map: Path = field(init=False)
    parsed: Path = field(init=False)
    assignments: Path = field(init=False)
    tables: Path = field(init=False)
    report: Path = field(init=False)
    probe: Path = field(init=False)

    def __post_init__(self) -> None:
        r = self.root
        for name, rel in (("records", "corpus/records.jsonl"), ("ledger", "corpus/ground_truth.jsonl"),
                          ("raw", "raw"), ("scrubbed", "scrubbed"), ("store", "store"),
                          ("identity_map", "private/identity_map.json"),
                          ("parsed", "ingest/parsed.jsonl"),
                          ("assignments", "extract/assignments.jsonl"),
                          ("tables", "out"), ("report", "report"), ("probe", "probe/timing.json")):
            object.__setattr__(self, name, r / rel)


def _need(stage: str, path: Path, producer: str) -> Path:
    if not path.exists():
        raise MissingInputError(stage, path, producer)
    return path


def _catalog(cfg: RunConfig) -> list[DiseaseModule]:
    catalog = load_disease_catalog()
    if cfg.diseases:
        wanted = set(cfg.diseases)
        catalog = [m for m in catalog if m.disease_id in wanted]
    return catalog


def _salt(cfg: RunConfig) -> int:
    return stable_seed(cfg.seed, "identity-salt") & (2 ** 64 - 1)


# ---------------------------------------------------------------- stages


def stage_gen(cfg: RunConfig) -> dict[str, Any]:
    lay = Layout(cfg.root)
    records, ledger = generate_corpus(_catalog(cfg), cfg.patients_per_disease, cfg.seed, cfg.jobs)
    write_records(records, lay.records)
    write_ground_truth_ledger(ledger, lay.ledger)
    return {"patients": len(records), "ledger_entries": len(ledger)}


def stage_scatter(cfg: RunConfig) -> dict[str, Any]:
    lay = Layout(cfg.root)
    records = read_records(_need("scatter", lay.records, "gen"))
    profile = load_noise_profile(cfg.noise)
    docs = scatter_corpus(records, cfg.seed, profile, variables_by_id(load_disease_catalog()),
                          cfg.duplicate_rate)
    write_documents(docs, lay.raw)
    return {"documents": len(docs)}


def stage_anonymize(cfg: RunConfig) -> dict[str, Any]:
    """Scrub (when enabled) and load the documents into the object store."""
    lay = Layout(cfg.root)
    records = read_records(_need("anonymize", lay.records, "gen"))
    _need("anonymize", lay.raw / "manifest.json", "scatter")
    docs = read_documents(lay.raw)
    violations = 0
    if cfg.anonymize:
        identity = IdentityMap.build((r.patient_id for r in records), _salt(cfg))
        deny = PiiDenyList.from_records(records)
        docs = [scrub_document(d, identity, deny) for d in docs]
        found = verify_scrub(docs, deny, identity)
        violations = len(found)
        if found:
            # the tokens themselves are PII, so only ids and offsets are reported
            where = ", ".join(f"{v.doc_id}@{v.offset}" for v in found[:10])
            raise RuntimeError(f"anonymize: {len(found)} deny-list tokens survived scrubbing ({where})")
        identity.save(lay.identity_map)
        write_documents(docs, lay.scrubbed)
    store = DocStore(lay.store)
    with store.batch():
        for d in sorted(docs, key=lambda d: (d.patient_id, d.doc_id)):
            store.put_object(d.body, {
                "doc_id": d.doc_id, "patient": d.patient_id, "disease_id": d.disease_id,
                "format": d.format.value, "created_at": d.created_at.isoformat(timespec="minutes"),
            })
    return {"documents": len(docs), "objects": store.object_count(), "violations": violations,
            "anonymized": cfg.anonymize}


def _parse_store(store: DocStore, strict: bool) -> list[ParsedDocument]:
    registry = build_registry(load_disease_catalog())
    matcher = SurfaceMatcher(registry)
    out = []
    for rec in store.records():
        out.append(parse_document(store.get_object(rec.object), registry, ref=rec.object,
                                  doc_id=rec.tags.get("doc_id"), patient=rec.tags.get("patient"),
                                  strict=strict, matcher=matcher))
    return out


def stage_ingest(cfg: RunConfig) -> dict[str, Any]:
    lay = Layout(cfg.root)
    store = DocStore(_need("ingest", lay.store / "index.jsonl", "anonymize").parent)
    parsed = _parse_store(store, cfg.strict)
    lay.parsed.parent.mkdir(parents=True, exist_ok=True)
    with lay.parsed.open("w", encoding="utf-8") as fh:
        for doc in parsed:
            fh.write(json.dumps(doc.to_json(), ensure_ascii=False, sort_keys=True) + "\n")
    return {"documents": len(parsed), "statements": sum(len(p.statements) for p in parsed),
            "warnings": sum(len(p.warnings) for p in parsed)}


def read_parsed(path: Path) -> list[ParsedDocument]:
    with path.open(encoding="utf-8") as fh:
        return [ParsedDocument.from_json(json.loads(line)) for line in fh if line.strip()]


def _identity(cfg: RunConfig, stage: str) -> dict[str, str] | None:
    if not cfg.anonymize:
        return None
    lay = Layout(cfg.root)
    return IdentityMap.load(_need(stage, lay.identity_map, "anonymize")).forward


def _roster(cfg: RunConfig, stage: str) -> dict[str, str]:
    """Patient (pseudonym when anonymized) -> disease, for every generated patient."""
    lay = Layout(cfg.root)
    records = read_records(_need(stage, lay.records, "gen"))
    identity = _identity(cfg, stage)
    return {(identity[r.patient_id] if identity else r.patient_id): r.disease_id for r in records}


def stage_extract(cfg: RunConfig) -> dict[str, Any]:
    lay = Layout(cfg.root)
    parsed = read_parsed(_need("extract", lay.parsed, "ingest"))
    registry = build_registry(load_disease_catalog())
    assignments = extract_corpus(parsed, registry, _roster(cfg, "extract"))
    write_assignments(assignments, lay.assignments)
    return {"assignments": len(assignments),
            "missing": sum(a.status != "found" for a in assignments)}


def stage_assemble(cfg: RunConfig) -> dict[str, Any]:
    lay = Layout(cfg.root)
    assignments = read_assignments(_need("assemble", lay.assignments, "extract"))
    roster = _roster(cfg, "assemble")
    shapes = {}
    for module in _catalog(cfg):
        patients = [p for p, d in roster.items() if d == module.disease_id]
        if not patients:
            continue
        table = assemble_disease_table(assignments, module, patients)
        export_csv(table, lay.tables / module.disease_id / "megatable.csv")
        export_json(table, lay.tables / module.disease_id / "megatable.json")
        shapes[module.disease_id] = list(table.shape)
    return {"tables": shapes}


def stage_eval(cfg: RunConfig) -> dict[str, Any]:
    lay = Layout(cfg.root)
    ledger = read_ground_truth_ledger(_need("eval", lay.ledger, "gen"))
    assignments = read_assignments(_need("eval", lay.assignments, "extract"))
    present = {e.disease_id for e in ledger.entries}
    catalog = [m for m in load_disease_catalog() if m.disease_id in present]
    report = build_report(ledger, assignments, catalog, _identity(cfg, "eval"), cfg.seed,
                          resamples=cfg.resamples)
    write_report(report, lay.report)
    return {"overall": report.overall, "outliers": report.outliers.count if report.outliers else 0}


STAGE_FUNCS = {
    "gen": stage_gen, "scatter": stage_scatter, "anonymize": stage_anonymize,
    "ingest": stage_ingest, "extract": stage_extract, "assemble": stage_assemble,
    "eval": stage_eval,
}


def run_stage(name: str, cfg: RunConfig) -> dict[str, Any]:
    return STAGE_FUNCS[name](cfg)


def run_all(cfg: RunConfig) -> dict[str, Any]:
    return {name: run_stage(name, cfg) for name in STAGES}


def throughput_probe(cfg: RunConfig) -> dict[str, Any]:
    """Time ingest and extract over whatever the store holds."""
    lay = Layout(cfg.root)
    store_root = lay.store
    store = DocStore(store_root)
    t0 = time.perf_counter()
    parsed = _parse_store(store, cfg.strict)
    t1 = time.perf_counter()
    registry = build_registry(load_disease_catalog())
    roster = _roster(cfg, "probe") if parsed else {}
    assignments = extract_corpus(parsed, registry, roster)
    t2 = time.perf_counter()
    n_docs, n_pairs = len(parsed), len(assignments)
    summary = {
        "documents": n_docs,
        "pairs": n_pairs,
        "ingest_seconds": t1 - t0,
        "extract_seconds": t2 - t1,
        "total_seconds": t2 - t0,
        "seconds_per_document": (t1 - t0) / n_docs if n_docs else 0.0,
        "seconds_per_pair": (t2 - t1) / n_pairs if n_pairs else 0.0,
        "documents_per_second": n_docs / (t2 - t0) if n_docs and t2 > t0 else 0.0,
    }
    lay.probe.parent.mkdir(parents=True, exist_ok=True)
    lay.probe.write_text(json.dumps(summary, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return summary
