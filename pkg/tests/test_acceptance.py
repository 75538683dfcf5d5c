"""Acceptance criteria, one test each. Every test prints a single
``ACCEPT <n> PASS|FAIL`` line, repeated in the terminal summary."""
from __future__ import annotations

import dataclasses
import datetime as dt
import filecmp
import json
import random
import time

import numpy as np
import pytest

from clinistruct.anonymizer import IdentityMap, PiiDenyList, verify_scrub
from clinistruct.corpus import generate_corpus, read_records
from clinistruct.evaluation import build_report, category_ranking, outlier_proportion
from clinistruct.extract import extract_corpus
from clinistruct.formats import FormatKind
from clinistruct.ingest import parse_document
from clinistruct.pipeline import Layout, RunConfig, run_all, throughput_probe
from clinistruct.scatter import (
    load_noise_profile,
    read_documents,
    render_document,
    scatter_corpus,
    supports,
)
from clinistruct.stats import (
    bootstrap_ci,
    classify_effect,
    cohens_d,
    mann_whitney_u,
    standard_error,
    welch_t_test,
)

from .strategies import CATALOG, make_event, record_for
from .test_stats import SIZES, enumerate_p

RESULTS: list[str] = []


def verdict(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"ACCEPT {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def desk_runs(tmp_path_factory):
    """Two full zero-noise runs, 16 diseases x 50 patients, seed 7."""
    runs = []
    for name in ("a", "b"):
        cfg = RunConfig(seed=7, patients_per_disease=50,
                        out=str(tmp_path_factory.mktemp(f"desk-{name}")))
        cfg.validate(CATALOG)
        t0 = time.perf_counter()
        result = run_all(cfg)
        runs.append((cfg, result, time.perf_counter() - t0))
    return runs


def test_01_standard_error_worked_example():
    se = standard_error(0.95, 1000)
    verdict(1, "standard error", round(se, 4) == 0.0069, f"SE(0.95, 1000) = {se:.6f}")


def test_02_outlier_proportion():
    prop = outlier_proportion(45, 781)
    verdict(2, "outlier arithmetic", abs(prop - 5.76) <= 0.01, f"45/781 = {prop:.4f}%")


def test_03_oracle_equivalence(desk_runs):
    cfg, result, seconds = desk_runs[0]
    report = json.loads((Layout(cfg.root).report / "report.json").read_text())
    overall = report["overall"]["accuracy"]
    count = report["outliers"]["count"]
    n = report["overall"]["n_diseases"]
    ok = overall == 100.0 and count == 0 and n == 16 and seconds < 120
    verdict(3, "oracle equivalence", ok,
            f"{n} diseases, overall {overall}, {count} outliers, {seconds:.1f}s")


def _random_event_set(rng: random.Random, fmt: FormatKind):
    module = rng.choice(CATALOG)
    specs = [s for s in module.variable_specs if supports(fmt, s.category)]
    picks = [rng.choice(specs) for _ in range(rng.randint(1, 8))]
    events = []
    for i, spec in enumerate(picks):
        ts = dt.datetime(2014, 1, 1) + dt.timedelta(minutes=rng.randint(0, 11 * 365 * 24 * 60))
        events.append(make_event(spec, ts, "X", rng.randrange(2**31) * 100 + i,
                                 date_style=rng.choice(["iso", "dotted"])))
    return module.disease_id, events


def test_04_round_trip_suite(registry, matcher):
    summary = {}
    for fmt in FormatKind:
        rng = random.Random(f"round-trip-{fmt.value}")
        passed = 0
        for _ in range(1000):
            disease, events = _random_event_set(rng, fmt)
            record = record_for(disease, events, seed=rng.randrange(1000))
            doc = render_document(fmt, record, record.events, seed=rng.randrange(2**32))
            parsed = parse_document(doc.body, registry, matcher=matcher)
            want = sorted((e.category, e.code, e.value_text, e.unit, e.timestamp)
                          for e in record.events)
            passed += parsed.format is fmt and sorted(
                s.content_key() for s in parsed.statements) == want
        summary[fmt.value] = passed
    verdict(4, "round trip", all(v == 1000 for v in summary.values()),
            ", ".join(f"{k} {v}/1000" for k, v in summary.items()))


def test_05_noise_response_shape(catalog, registry, matcher, variables):
    profile = load_noise_profile("targeted")
    records, ledger = generate_corpus(catalog, 50, 7)
    docs = scatter_corpus(records, 7, profile, variables)
    parsed = [parse_document(d.body, registry, doc_id=d.doc_id, patient=d.patient_id,
                             matcher=matcher) for d in docs]
    assignments = extract_corpus(parsed, registry, {r.patient_id: r.disease_id for r in records})
    report = build_report(ledger, assignments, catalog, seed=7, resamples=1000)
    ranking = category_ranking(report.outliers)
    targeted_categories = set(profile.categories)
    targeted_diseases = {m.disease_id for m in catalog
                         if any(s.ambiguity_class in profile.ambiguity_boost
                                for s in m.variable_specs)}
    low = sorted(d.disease_id for d in report.diseases if d.mean < 90.0)
    ok = (len(ranking) >= 3 and set(ranking[:3]) == targeted_categories
          and set(low) <= targeted_diseases and bool(low))
    verdict(5, "noise response", ok,
            f"ranking {ranking}; below 90: {low}; targeted {sorted(targeted_diseases)}")


def test_06_statistics_oracles():
    rng = random.Random("mwu-exhaustive")
    mismatches = checked = 0
    for n1, n2 in SIZES:
        pools = [list(range(n1 + n2))]
        pools += [[rng.randint(0, 3) for _ in range(n1 + n2)] for _ in range(3)]
        for pool in pools:
            a, b = pool[:n1], pool[n1:]
            checked += 1
            mismatches += abs(mann_whitney_u(a, b).p_value - enumerate_p(a, b)) > 1e-12
    w = welch_t_test([1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 3.0, 4.0])
    d = cohens_d([70, 80], [85, 95]).d
    data_rng = np.random.default_rng(20240)
    hits = 0
    for i in range(500):
        x = (data_rng.random(200) < 0.9).astype(float).tolist()
        ci = bootstrap_ci(x, 0.95, 10000, seed=i)
        hits += ci.lo <= 0.9 <= ci.hi
    coverage = hits / 500
    ok = (mismatches == 0 and w.statistic == 0.0 and abs(w.p_value - 1.0) <= 1e-9
          and abs(d - (-2.1213)) <= 1e-4 and 0.93 <= coverage <= 0.97)
    verdict(6, "statistics oracles", ok,
            f"MWU {checked - mismatches}/{checked} exact; Welch t={w.statistic} p={w.p_value}; "
            f"d={d:.4f}; bootstrap coverage {coverage:.3f}")


BANDS = [(0.0, "small"), (0.2999, "small"), (-0.2999, "small"),
         (0.5, "medium"), (-0.5, "medium"), (0.7999, "medium"),
         (0.8, "large"), (-0.8, "large"), (3.0, "large")]


def test_07_effect_size_bands():
    wrong = [(d, want, classify_effect(d)) for d, want in BANDS if classify_effect(d) != want]
    verdict(7, "effect bands", not wrong, f"{len(BANDS) - len(wrong)}/{len(BANDS)} edges labeled")


def test_08_scrub_guarantee(desk_runs):
    cfg, _, _ = desk_runs[0]
    lay = Layout(cfg.root)
    records = read_records(lay.records)
    docs = read_documents(lay.scrubbed)
    deny = PiiDenyList.from_records(records)
    identity = IdentityMap.load(lay.identity_map)
    clean = verify_scrub(docs, deny, identity)
    victim = records[17].demographics
    leak = f"{victim.given} {victim.family}"
    planted = dataclasses.replace(docs[42], body=docs[42].body + f"\nco-signed {leak}\n".encode())
    found = verify_scrub([*docs[:42], planted, *docs[43:]], deny, identity)
    ok = (not clean and len(found) == 1 and found[0].doc_id == planted.doc_id)
    verdict(8, "scrub guarantee", ok,
            f"{len(docs)} scrubbed docs, {len(clean)} violations; planted leak -> {len(found)} found")


def test_09_determinism(desk_runs):
    (a, _, _), (b, _, _) = desk_runs
    la, lb = Layout(a.root), Layout(b.root)
    files = sorted(p.relative_to(la.tables) for p in la.tables.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(lb.tables) for p in lb.tables.rglob("*") if p.is_file())
    report_files = sorted(p.name for p in la.report.iterdir())
    same = files == files_b and all(
        filecmp.cmp(la.tables / f, lb.tables / f, shallow=False) for f in files) and all(
        filecmp.cmp(la.report / f, lb.report / f, shallow=False) for f in report_files)
    verdict(9, "determinism", same and len(files) == 32,
            f"{len(files)} mega-table files and {len(report_files)} report files compared")


def test_10_throughput_floor(desk_runs):
    cfg, _, _ = desk_runs[0]
    probe = throughput_probe(dataclasses.replace(cfg, jobs=1))
    rate = probe["documents_per_second"]
    verdict(10, "throughput", rate >= 15.0,
            f"{probe['documents']} docs in {probe['total_seconds']:.2f}s = {rate:.0f} docs/s")
