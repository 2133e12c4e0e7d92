"""Run every pipeline stage end to end on a synthetic corpus.

The corpus generator produces two crawl waves of plausible multilingual
privacy policies (plus some non-policy pages and malformed lines), so the
whole chain can be exercised without any crawling or network access:

    ingest -> annotate -> validate -> agreement -> cohort
           -> stats -> generators -> cluster -> report

Ground truth for the validate stage and a double-coded sample for the
agreement stage are derived from the baseline annotations with deliberate
flips, the same way a small hand-labeling round would disagree with the
model. Everything lands in demos/output/full_pipeline/.
"""

import csv
import json
from pathlib import Path

from policyaudit.cli import main
from policyaudit.codebook import format_update_date, read_annotations
from policyaudit.synth import write_synthetic_corpus

ROOT = Path(__file__).resolve().parent / "output" / "full_pipeline"
CODES = ("ispol", "contr", "purp", "rect", "forg", "port", "comp", "hum")


def human_row(record, coder_id, **flips):
    values = {code: getattr(record, code) for code in CODES}
    values.update(flips)
    if not values["ispol"]:
        for code in CODES[1:]:
            values[code] = False
    upd = "NA" if not values["ispol"] else format_update_date(record.upd)
    return [
        record.doc_id,
        coder_id,
        str(values["ispol"]).lower(),
        upd,
        *(str(values[code]).lower() for code in CODES[1:]),
    ]


def write_human_csv(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["doc_id", "coder_id", *CODES[:1], "upd", *CODES[1:]])
        writer.writerows(rows)


def run():
    ROOT.mkdir(parents=True, exist_ok=True)
    corpus_path = ROOT / "corpus_input.jsonl"
    out = ROOT / "out"
    truth_path = ROOT / "truth.csv"
    double_path = ROOT / "double_coding.csv"

    n_docs = write_synthetic_corpus(corpus_path, n_docs=400, seed=7)
    print(f"synthesized {n_docs} corpus lines -> {corpus_path}")

    config_path = ROOT / "config.json"
    config_path.write_text(
        json.dumps(
            {
                "corpus_paths": [str(corpus_path)],
                "output_dir": str(out),
                "seed": 7,
                "cluster": {"pseudo": True, "perplexity": 12.0, "iterations": 300},
                "validate": {"truth_path": str(truth_path)},
                "agreement": {"paths": [str(double_path)]},
            },
            indent=2,
        ),
        encoding="utf-8",
    )

    for stage in ("ingest", "annotate"):
        assert main([stage, "--config", str(config_path)]) == 0, stage

    # a 30-document hand-labeled sample that disagrees with the baseline in
    # a few places, and a 15-document double-coded sample for reliability
    records = [r for r in read_annotations(out / "annotations.jsonl") if r.ispol]
    sample = records[:30]
    truth_rows = []
    for i, record in enumerate(sample):
        flips = {"hum": not record.hum} if i % 6 == 0 else {}
        if i == 4:
            flips["ispol"] = False
        truth_rows.append(human_row(record, "truth-1", **flips))
    write_human_csv(truth_path, truth_rows)

    double_rows = []
    for i, record in enumerate(sample[:15]):
        double_rows.append(human_row(record, "coder-1"))
        flips = {"contr": not record.contr} if i % 4 == 0 else {}
        double_rows.append(human_row(record, "coder-2", **flips))
    write_human_csv(double_path, double_rows)
    print(f"wrote {len(truth_rows)} truth rows and {len(double_rows)} double-coded rows")

    for stage in ("validate", "agreement", "cohort", "stats", "generators",
                  "cluster", "report"):
        assert main([stage, "--config", str(config_path)]) == 0, stage

    print("\n--- summary.csv " + "-" * 44)
    print((out / "summary.csv").read_text(encoding="utf-8"))
    print("--- report.md (first 40 lines) " + "-" * 29)
    report = (out / "report.md").read_text(encoding="utf-8").splitlines()
    print("\n".join(report[:40]))
    print(f"\nfull report and {len(list(out.iterdir()))} artifacts under {out}")


if __name__ == "__main__":
    run()
