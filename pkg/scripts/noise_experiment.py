"""Score one noise preset across several seeds without touching disk.

Prints per-disease accuracy, the outlier set and the effect sizes for each
seed; handy when tuning a noise profile.

    python scripts/noise_experiment.py targeted --seeds 1 2 3 --patients 50
"""
from __future__ import annotations

import argparse

from clinistruct.corpus import generate_corpus, load_disease_catalog, variables_by_id
from clinistruct.evaluation import build_report, category_ranking
from clinistruct.extract import extract_corpus
from clinistruct.ingest import SurfaceMatcher, parse_document
from clinistruct.ontology import build_registry
from clinistruct.scatter import load_noise_profile, scatter_corpus


def run_seed(preset: str, seed: int, patients: int, resamples: int) -> None:
    catalog = load_disease_catalog()
    registry = build_registry(catalog)
    matcher = SurfaceMatcher(registry)
    records, ledger = generate_corpus(catalog, patients, seed)
    docs = scatter_corpus(records, seed, load_noise_profile(preset), variables_by_id(catalog))
    parsed = [parse_document(d.body, registry, doc_id=d.doc_id, patient=d.patient_id,
                             matcher=matcher) for d in docs]
    roster = {r.patient_id: r.disease_id for r in records}
    report = build_report(ledger, extract_corpus(parsed, registry, roster), catalog,
                          seed=seed, resamples=resamples)

    print(f"seed {seed}: overall {report.overall:.2f} (sd {report.sd_across_diseases:.2f})")
    for d in sorted(report.diseases, key=lambda d: d.mean):
        print(f"  {d.disease_id:<28} {d.mean:6.2f}")
    o = report.outliers
    print(f"  outliers {o.count}/{o.total_variables} ({o.proportion:.2f}%), "
          f"ranking {category_ranking(o)}")
    for c in o.outliers:
        print(f"    {c.variable_id:<40} {c.percent:6.1f}")
    for key in ("cohens_d_outliers_vs_rest", "cohens_d_all_vs_without_outliers"):
        eff = report.statistics[key]
        shown = f"{eff['d']:.3f} ({eff['label']})" if eff["available"] else "n/a"
        print(f"  {key}: {shown}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("preset", help="noise preset name or profile path")
    ap.add_argument("--seeds", type=int, nargs="+", default=[7])
    ap.add_argument("--patients", type=int, default=50)
    ap.add_argument("--resamples", type=int, default=2000)
    args = ap.parse_args()
    for seed in args.seeds:
        run_seed(args.preset, seed, args.patients, args.resamples)


if __name__ == "__main__":
    main()
