"""Exact-match accuracy, outlier analysis and the evaluation report.

Accuracy of a variable is the share of the disease's patients whose
extracted value matches the ledger after canonical normalization on both
sides. A disease scores the unweighted mean of its variables, the overall
score the unweighted mean of its diseases, all in percent.
"""
from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .corpus import DiseaseModule, GroundTruthLedger
from .extract import VariableAssignment
from .stats import (
    DegenerateVarianceError,
    bootstrap_ci,
    cohens_d,
    mann_whitney_u,
    sample_sd,
    standard_error,
    welch_t_test,
)
from .values import CATEGORIES, values_match

OUTLIER_THRESHOLD = 85.0
REPORT_VERSION = 1


class IncompleteAssignmentsError(ValueError):
    """A ledger entry has no matching extracted assignment."""


@dataclass(frozen=True)
class AccuracyCell:
    disease_id: str
    variable_id: str
    category: str
    p: float
    n_patients: int
    se: float
    n_correct: int

    @property
    def percent(self) -> float:
        return self.p * 100.0


def accuracy_variable(truth: Sequence[str], extracted: Sequence[str], *, disease_id: str = "",
                      variable_id: str = "", category: str = "") -> AccuracyCell:
    if len(truth) != len(extracted):
        raise ValueError(f"{len(truth)} truth values but {len(extracted)} extracted values")
    if not truth:
        raise ValueError("accuracy needs at least one patient")
    correct = sum(values_match(t, x) for t, x in zip(truth, extracted))
    p = correct / len(truth)
    return AccuracyCell(disease_id, variable_id, category, p, len(truth),
                        standard_error(p, len(truth)), correct)


@dataclass(frozen=True)
class DiseaseAccuracy:
    disease_id: str
    cells: tuple[AccuracyCell, ...]
    mean: float
    sd: float
    se: float
    name: str = ""

    @property
    def n_variables(self) -> int:
        return len(self.cells)


def accuracy_disease(cells: Sequence[AccuracyCell], name: str = "") -> DiseaseAccuracy:
    """Mean of the variable accuracies in percent; SD across variables; SE of
    the pooled proportion over every (patient, variable) pair."""
    if not cells:
        raise ValueError("a disease needs at least one variable")
    percents = [c.percent for c in cells]
    mean = math.fsum(percents) / len(percents)
    sd = sample_sd(percents) if len(percents) > 1 else 0.0
    n = sum(c.n_patients for c in cells)
    pooled = sum(c.n_correct for c in cells) / n
    return DiseaseAccuracy(cells[0].disease_id, tuple(cells), mean, sd,
                           standard_error(pooled, n) * 100.0, name)


@dataclass(frozen=True)
class OutlierAnalysis:
    threshold: float
    outliers: tuple[AccuracyCell, ...]
    total_variables: int
    proportion: float
    per_disease: dict[str, dict[str, float]]
    category_contribution: dict[str, float]
    category_mean_accuracy: dict[str, float]
    impact_matrix: dict[str, dict[str, int]]

    @property
    def count(self) -> int:
        return len(self.outliers)


def outlier_proportion(n_outliers: int, total_variables: int) -> float:
    """Outliers as a percentage of all variables."""
    if total_variables < 1:
        raise ValueError("total_variables must be >= 1")
    if not 0 <= n_outliers <= total_variables:
        raise ValueError("n_outliers must lie in [0, total_variables]")
    return 100.0 * n_outliers / total_variables


def find_outliers(cells: Sequence[AccuracyCell], threshold: float = OUTLIER_THRESHOLD) -> OutlierAnalysis:
    """Cells strictly below ``threshold`` percent, with the category and
    disease breakdowns computed over the outlier set."""
    outliers = tuple(c for c in cells if c.percent < threshold)
    per_disease_total = Counter(c.disease_id for c in cells)
    per_disease_out = Counter(c.disease_id for c in outliers)
    per_disease = {
        d: {"outliers": per_disease_out.get(d, 0), "variables": n,
            "proportion": 100.0 * per_disease_out.get(d, 0) / n}
        for d, n in per_disease_total.items()
    }
    by_cat: dict[str, list[AccuracyCell]] = defaultdict(list)
    for c in outliers:
        by_cat[c.category].append(c)
    contribution = {cat: 100.0 * len(by_cat[cat]) / len(outliers)
                    for cat in CATEGORIES if by_cat.get(cat)}
    mean_acc = {cat: math.fsum(c.percent for c in by_cat[cat]) / len(by_cat[cat])
                for cat in CATEGORIES if by_cat.get(cat)}
    impact: dict[str, dict[str, int]] = {}
    for cat in CATEGORIES:
        if by_cat.get(cat):
            impact[cat] = dict(sorted(Counter(c.disease_id for c in by_cat[cat]).items()))
    return OutlierAnalysis(
        threshold=threshold,
        outliers=outliers,
        total_variables=len(cells),
        proportion=outlier_proportion(len(outliers), len(cells)) if cells else 0.0,
        per_disease=per_disease,
        category_contribution=contribution,
        category_mean_accuracy=mean_acc,
        impact_matrix=impact,
    )


def category_ranking(analysis: OutlierAnalysis) -> list[str]:
    """Categories by outlier contribution, largest first (ties by name)."""
    return sorted(analysis.category_contribution,
                  key=lambda c: (-analysis.category_contribution[c], c))


@dataclass
class OverallReport:
    diseases: list[DiseaseAccuracy]
    overall: float
    sd_across_diseases: float
    pooled_se: float
    outliers: OutlierAnalysis | None = None
    statistics: dict[str, Any] = field(default_factory=dict)
    seed: int = 0


def accuracy_overall(diseases: Sequence[DiseaseAccuracy]) -> OverallReport:
    """Unweighted mean of disease accuracies; SD across diseases; SE of the
    pooled proportion over all scored pairs."""
    if not diseases:
        raise ValueError("overall accuracy needs at least one disease")
    means = [d.mean for d in diseases]
    overall = math.fsum(means) / len(means)
    sd = sample_sd(means) if len(means) > 1 else 0.0
    n = sum(c.n_patients for d in diseases for c in d.cells)
    correct = sum(c.n_correct for d in diseases for c in d.cells)
    return OverallReport(list(diseases), overall, sd, standard_error(correct / n, n) * 100.0)


def _effect(a: Sequence[float], b: Sequence[float]) -> dict[str, Any]:
    try:
        r = cohens_d(a, b)
    except (ValueError, DegenerateVarianceError) as exc:
        return {"available": False, "reason": str(exc), "n_a": len(a), "n_b": len(b)}
    return {"available": True, **asdict(r)}


def _test(fn: Any, a: Sequence[float], b: Sequence[float]) -> dict[str, Any]:
    try:
        r = fn(a, b)
    except (ValueError, DegenerateVarianceError) as exc:
        return {"available": False, "reason": str(exc)}
    return {"available": True, **asdict(r)}


def outlier_statistics(cells: Sequence[AccuracyCell], threshold: float = OUTLIER_THRESHOLD,
                       seed: int = 0, resamples: int = 10000) -> dict[str, Any]:
    """Outliers versus the rest, and all variables versus all minus outliers."""
    everything = [c.percent for c in cells]
    low = [c.percent for c in cells if c.percent < threshold]
    rest = [c.percent for c in cells if c.percent >= threshold]
    out: dict[str, Any] = {
        "groups": {
            "outliers": {"n": len(low), "mean": math.fsum(low) / len(low) if low else None},
            "rest": {"n": len(rest), "mean": math.fsum(rest) / len(rest) if rest else None},
            "all": {"n": len(everything),
                    "mean": math.fsum(everything) / len(everything) if everything else None},
        },
        "cohens_d_outliers_vs_rest": _effect(low, rest),
        "cohens_d_all_vs_without_outliers": _effect(everything, rest),
        "welch_t": _test(welch_t_test, low, rest),
        "mann_whitney_u": (_test(mann_whitney_u, low, rest) if low and rest
                           else {"available": False, "reason": "an empty group"}),
    }
    boots = {}
    for name, values in (("outliers", low), ("rest", rest), ("all", everything)):
        if values:
            boots[name] = {"available": True,
                           **asdict(bootstrap_ci(values, 0.95, resamples, seed))}
        else:
            boots[name] = {"available": False, "reason": "empty group"}
    out["bootstrap_mean_ci"] = boots
    return out


def score_assignments(
    ledger: GroundTruthLedger,
    assignments: Iterable[VariableAssignment],
    catalog: Sequence[DiseaseModule],
    identity: Mapping[str, str] | None = None,
) -> list[DiseaseAccuracy]:
    """Per-disease accuracies. ``identity`` maps ledger patient ids to the ids
    used in the assignments (pseudonyms); identity mapping when None."""
    extracted = {(a.patient, a.variable_id): a.extracted_value for a in assignments}
    by_var: dict[str, list[tuple[str, str]]] = defaultdict(list)
    for e in ledger.entries:
        pid = identity.get(e.patient_id, e.patient_id) if identity else e.patient_id
        got = extracted.get((pid, e.variable_id))
        if got is None:
            raise IncompleteAssignmentsError(
                f"no assignment for ({pid}, {e.variable_id}) (ledger patient {e.patient_id})")
        by_var[e.variable_id].append((e.true_value, got))
    results = []
    for module in catalog:
        cells = []
        for spec in module.variable_specs:
            pairs = by_var.get(spec.variable_id)
            if not pairs:
                continue
            cells.append(accuracy_variable([t for t, _ in pairs], [x for _, x in pairs],
                                           disease_id=module.disease_id,
                                           variable_id=spec.variable_id, category=spec.category))
        if cells:
            results.append(accuracy_disease(cells, module.name))
    return results


def build_report(
    ledger: GroundTruthLedger,
    assignments: Iterable[VariableAssignment],
    catalog: Sequence[DiseaseModule],
    identity: Mapping[str, str] | None = None,
    seed: int = 0,
    threshold: float = OUTLIER_THRESHOLD,
    resamples: int = 10000,
) -> OverallReport:
    diseases = score_assignments(ledger, assignments, catalog, identity)
    report = accuracy_overall(diseases)
    cells = [c for d in diseases for c in d.cells]
    report.outliers = find_outliers(cells, threshold)
    report.statistics = outlier_statistics(cells, threshold, seed, resamples)
    report.seed = seed
    return report


# ---------------------------------------------------------------- output


def _cell_json(c: AccuracyCell) -> dict[str, Any]:
    return {"disease_id": c.disease_id, "variable_id": c.variable_id, "category": c.category,
            "accuracy": c.percent, "p": c.p, "n_patients": c.n_patients,
            "n_correct": c.n_correct, "se": c.se}


def report_to_json(report: OverallReport) -> dict[str, Any]:
    o = report.outliers
    return {
        "report_version": REPORT_VERSION,
        "seed": report.seed,
        "overall": {"accuracy": report.overall, "sd_across_diseases": report.sd_across_diseases,
                    "pooled_se": report.pooled_se, "n_diseases": len(report.diseases),
                    "n_variables": sum(d.n_variables for d in report.diseases)},
        "diseases": [
            {"disease_id": d.disease_id, "name": d.name, "accuracy": d.mean, "sd": d.sd,
             "se": d.se, "n_variables": d.n_variables,
             "n_patients": d.cells[0].n_patients,
             "variables": [_cell_json(c) for c in d.cells]}
            for d in report.diseases
        ],
        "outliers": None if o is None else {
            "threshold": o.threshold, "count": o.count, "total_variables": o.total_variables,
            "proportion": o.proportion, "per_disease": o.per_disease,
            "category_contribution": o.category_contribution,
            "category_ranking": category_ranking(o),
            "category_mean_accuracy": o.category_mean_accuracy,
            "impact_matrix": o.impact_matrix,
            "cells": [_cell_json(c) for c in o.outliers],
        },
        "statistics": report.statistics,
    }


def _csv_text(rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def write_report(report: OverallReport, out_dir: str | Path) -> list[Path]:
    """``report.json``, ``fig5_accuracy.csv``, ``fig6_outliers.csv``, ``fig7_effect.csv``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    doc = report_to_json(report)
    p = out_dir / "report.json"
    p.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    paths.append(p)

    fig5 = [("disease_id", "name", "accuracy", "sd", "se", "n_variables", "n_patients")]
    for d in report.diseases:
        fig5.append((d.disease_id, d.name, repr(d.mean), repr(d.sd), repr(d.se),
                     d.n_variables, d.cells[0].n_patients))
    fig5.append(("overall", "Overall", repr(report.overall), repr(report.sd_across_diseases),
                 repr(report.pooled_se), sum(d.n_variables for d in report.diseases), ""))
    p = out_dir / "fig5_accuracy.csv"
    p.write_text(_csv_text(fig5), encoding="utf-8")
    paths.append(p)

    o = report.outliers
    fig6: list[tuple[Any, ...]] = [("panel", "key", "subkey", "value")]
    if o is not None:
        for d in report.diseases:
            row = o.per_disease.get(d.disease_id, {"outliers": 0, "proportion": 0.0})
            fig6.append(("A", d.disease_id, "count", row["outliers"]))
            fig6.append(("A", d.disease_id, "proportion", repr(row["proportion"])))
        fig6.append(("B", "outliers", "count", o.count))
        fig6.append(("B", "all", "count", o.total_variables))
        fig6.append(("B", "outliers", "proportion", repr(o.proportion)))
        for cat in category_ranking(o):
            fig6.append(("C", cat, "contribution", repr(o.category_contribution[cat])))
        for cat, mean in o.category_mean_accuracy.items():
            fig6.append(("D", cat, "mean_accuracy", repr(mean)))
        for cat, row in o.impact_matrix.items():
            for disease, n in row.items():
                fig6.append(("E", cat, disease, n))
    p = out_dir / "fig6_outliers.csv"
    p.write_text(_csv_text(fig6), encoding="utf-8")
    paths.append(p)

    s = report.statistics
    fig7: list[tuple[Any, ...]] = [("comparison", "metric", "value")]
    for group, vals in s.get("groups", {}).items():
        fig7.append((group, "n", vals["n"]))
        fig7.append((group, "mean", "" if vals["mean"] is None else repr(vals["mean"])))
    for key in ("cohens_d_outliers_vs_rest", "cohens_d_all_vs_without_outliers"):
        eff = s.get(key, {})
        if eff.get("available"):
            fig7.append((key, "d", repr(eff["d"])))
            fig7.append((key, "pooled_sd", repr(eff["pooled_sd"])))
            fig7.append((key, "label", eff["label"]))
        else:
            fig7.append((key, "d", ""))
    for key in ("welch_t", "mann_whitney_u"):
        t = s.get(key, {})
        fig7.append((key, "statistic", repr(t["statistic"]) if t.get("available") else ""))
        fig7.append((key, "p_value", repr(t["p_value"]) if t.get("available") else ""))
    p = out_dir / "fig7_effect.csv"
    p.write_text(_csv_text(fig7), encoding="utf-8")
    paths.append(p)
    return paths
