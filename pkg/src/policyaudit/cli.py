"""Pipeline orchestration: one subcommand per stage, artifacts on disk.

Stages communicate only through files in the output directory, so any
stage can be re-run in isolation and a re-run with unchanged inputs
produces byte-identical artifacts. The `report` stage formats what the
analysis stages wrote; it computes nothing, which is enforced in tests by
hashing the analysis artifacts before and after.

Exit codes: 0 success, 1 usage or configuration problem, 2 data problem,
3 backend or transport failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Optional

from . import reports
from .annotators import (
    RemoteBackend,
    RemoteConfig,
    annotate_baseline,
    import_human,
)
from .codebook import (
    OBLIGATION_CODES,
    read_annotations,
    write_annotations,
)
from .cohort import (
    assign_groups,
    detect_mentions,
    doc_group_map,
    doc_wave_map,
    is_top_website,
    load_term_dictionaries,
    summary_stats,
)
from .corpus import WINDOW_LABELS, ingest_corpus, median_word_count, write_corpus
from .embeddings import (
    EmbeddingClient,
    EmbeddingConfig,
    EmbeddingVector,
    cluster_cohesion,
    read_embeddings,
    write_embeddings,
)
from .errors import (
    BackendError,
    ConfigError,
    DataError,
    PolicyAuditError,
)
from .evalmetrics import (
    DegenerateError,
    build_metric_report,
    delta_f1,
    krippendorff_alpha,
    reliability_matrix_from_records,
)
from .generators import (
    compliance_by_generator,
    compliance_by_use,
    load_generator_specs,
    match_generators,
    prevalence,
    propose_generator_candidates,
)
from .stats import GROUP_ORDER, compliance_by_stratum, compliance_table, obligation_table_to_dict
from .tsne import project_tsne, write_projection

WAVES = (WINDOW_LABELS[0], WINDOW_LABELS[1])

STAGES = (
    "ingest",
    "annotate",
    "validate",
    "agreement",
    "cohort",
    "stats",
    "generators",
    "cluster",
    "report",
)

_ENV_PATTERN = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit 2; this pipeline reserves 2 for
    data problems, so usage errors are rethrown as config errors."""

    def error(self, message):
        raise ConfigError(message)


@dataclass
class RunConfig:
    corpus_paths: list = field(default_factory=list)
    output_dir: str = "out"
    backend: str = "baseline"
    alpha: float = 0.05
    power: float = 0.8
    seed: int = 7
    language_threshold: float = 0.5
    updated_since: str = "2023-09-01"
    terms_path: Optional[str] = None
    generators_path: Optional[str] = None
    remote: dict = field(default_factory=dict)
    embedding: dict = field(default_factory=dict)
    human: dict = field(default_factory=dict)
    validate: dict = field(default_factory=dict)
    cluster: dict = field(default_factory=dict)
    agreement: dict = field(default_factory=dict)

    def check(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0.0 < self.power < 1.0:
            raise ConfigError(f"power must be in (0, 1), got {self.power}")
        if self.backend not in ("baseline", "remote", "human"):
            raise ConfigError(f"unknown backend {self.backend!r}")
        try:
            date.fromisoformat(self.updated_since)
        except ValueError as exc:
            raise ConfigError(f"updated_since is not an ISO date: {exc}")
        for path in self.corpus_paths:
            if not Path(path).exists():
                raise ConfigError(f"corpus path does not exist: {path}")
        for path in (self.terms_path, self.generators_path):
            if path and not Path(path).exists():
                raise ConfigError(f"dictionary path does not exist: {path}")


def _interpolate(value, env=None):
    """Replace ${NAME} in strings, recursively; unknown names are errors."""
    env = os.environ if env is None else env

    def replace(match):
        name = match.group(1)
        if name not in env:
            raise ConfigError(f"environment variable {name} is not set")
        return env[name]

    if isinstance(value, str):
        return _ENV_PATTERN.sub(replace, value)
    if isinstance(value, list):
        return [_interpolate(item, env) for item in value]
    if isinstance(value, dict):
        return {key: _interpolate(item, env) for key, item in value.items()}
    return value


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file does not exist: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    raw = _interpolate(raw)
    known = {f.name for f in RunConfig.__dataclass_fields__.values()}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return RunConfig(**raw)


def _build_config(args) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    for name in ("output_dir", "backend", "alpha", "power", "seed"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(config, name, value)
    if getattr(args, "corpus", None):
        config.corpus_paths = list(args.corpus)
    config.check()
    return config


# -- artifact helpers -----------------------------------------------------------

def _out(config: RunConfig) -> Path:
    path = Path(config.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_text(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def _write_json(path: Path, payload) -> None:
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


def _read_json(path: Path):
    if not path.exists():
        raise DataError(f"missing pipeline artifact: {path} (run earlier stages first)")
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def _write_table(out: Path, stem: str, header, rows) -> None:
    _write_text(out / f"{stem}.csv", reports.render_csv(header, rows))


def _load_corpus_artifact(config: RunConfig):
    path = _out(config) / "corpus.jsonl"
    if not path.exists():
        raise DataError(f"missing pipeline artifact: {path} (run ingest first)")
    corpus, _report = ingest_corpus(path, language_threshold=config.language_threshold)
    return corpus


def _load_annotations(config: RunConfig):
    path = _out(config) / "annotations.jsonl"
    if not path.exists():
        raise DataError(f"missing pipeline artifact: {path} (run annotate first)")
    return read_annotations(path)


def _tables_payload(tables: dict) -> dict:
    return {
        "tables": {
            name: {"title": title, "header": list(header), "rows": [list(r) for r in rows]}
            for name, (title, header, rows) in tables.items()
        }
    }


# -- stages ----------------------------------------------------------------------

def _cmd_ingest(config: RunConfig) -> int:
    if not config.corpus_paths:
        raise ConfigError("no corpus paths configured")
    out = _out(config)
    merged = []
    seen_ids: dict = {}
    seen_snapshots = set()
    file_reports = []
    for path in config.corpus_paths:
        corpus, report = ingest_corpus(
            path, language_threshold=config.language_threshold
        )
        file_reports.append({"path": str(path), **report.to_dict()})
        for doc in corpus:
            if doc.doc_id in seen_ids:
                raise DataError(
                    f"doc_id {doc.doc_id!r} appears in both "
                    f"{seen_ids[doc.doc_id]} and {path}"
                )
            key = (doc.website.domain, doc.snapshot.snapshot_id)
            if key in seen_snapshots:
                continue
            seen_ids[doc.doc_id] = str(path)
            seen_snapshots.add(key)
            merged.append(doc)
    merged.sort(key=lambda d: d.doc_id)
    from .corpus import Corpus

    combined = Corpus(tuple(merged))
    write_corpus(combined, out / "corpus.jsonl")
    _write_json(
        out / "ingest_report.json",
        {"files": file_reports, "documents": len(merged)},
    )
    print(f"ingest: {len(merged)} documents -> {out / 'corpus.jsonl'}")
    return 0


def _cmd_annotate(config: RunConfig) -> int:
    out = _out(config)
    corpus = _load_corpus_artifact(config)
    failures: list = []
    warnings: list = []
    if config.backend == "baseline":
        records = [annotate_baseline(doc) for doc in corpus]
        backend_id = records[0].backend_id if records else "keyword-baseline-v1"
    elif config.backend == "human":
        path = config.human.get("path")
        if not path:
            raise ConfigError("backend 'human' needs human.path in the config")
        records, report = import_human(path, config.human.get("patches"))
        warnings = report.warnings
        failures = [{"row": r[0], "error": r[1]} for r in report.rejected]
        backend_id = records[0].backend_id if records else "human"
    else:
        try:
            remote_config = RemoteConfig(**config.remote)
        except TypeError as exc:
            raise ConfigError(f"bad remote backend settings: {exc}")
        backend = RemoteBackend(remote_config)
        result = backend.annotate_many(list(corpus))
        records = result.records
        warnings = result.warnings
        failures = result.failures
        backend_id = remote_config.model_id
        if corpus and not records:
            raise BackendError(
                f"all {len(failures)} annotation requests failed; "
                "see annotate_report.json"
            )
    write_annotations(records, out / "annotations.jsonl")
    _write_json(
        out / "annotate_report.json",
        {
            "backend": config.backend,
            "backend_id": backend_id,
            "annotated": len(records),
            "failures": failures,
            "warnings": sorted(warnings),
        },
    )
    print(f"annotate[{config.backend}]: {len(records)} records, {len(failures)} failures")
    return 0


def _read_truth(path_str: str):
    path = Path(path_str)
    if not path.exists():
        raise ConfigError(f"ground-truth path does not exist: {path}")
    if path.suffix.lower() in (".csv", ".json"):
        records, _report = import_human(path)
        return records
    return read_annotations(path)


def _cmd_validate(config: RunConfig) -> int:
    out = _out(config)
    truth_path = config.validate.get("truth_path")
    if not truth_path:
        raise ConfigError("validate needs validate.truth_path in the config")
    pred = _load_annotations(config)
    truth = _read_truth(truth_path)
    corpus = _load_corpus_artifact(config)
    doc_language = {doc.doc_id: doc.language for doc in corpus}
    report = build_metric_report(
        pred, truth, doc_language, backend_id=pred[0].backend_id if pred else ""
    )
    header, rows = reports.metric_report_rows(report)
    _write_table(out, "validation_metrics", header, rows)
    tables = {"validation_metrics": ("Validation metrics", header, rows)}
    payload = _tables_payload(tables)
    payload["warnings"] = report.warnings()
    compare_path = config.validate.get("compare_path")
    if compare_path:
        other = _read_truth(compare_path)
        other_report = build_metric_report(
            other, truth, doc_language, backend_id=other[0].backend_id if other else ""
        )
        deltas = delta_f1(report, other_report)
        d_header, d_rows = reports.delta_f1_rows(deltas)
        _write_table(out, "delta_f1", d_header, d_rows)
        payload["tables"]["delta_f1"] = {
            "title": "F1 difference vs comparison backend",
            "header": d_header,
            "rows": d_rows,
        }
    _write_json(out / "validation_tables.json", payload)
    print(f"validate: {len(report.cells)} cells, {len(payload['warnings'])} warnings")
    return 0


def _cmd_agreement(config: RunConfig) -> int:
    out = _out(config)
    paths = config.agreement.get("paths") or []
    if not paths:
        raise ConfigError("agreement needs agreement.paths in the config")
    records = []
    for path in paths:
        imported, _report = import_human(path)
        records.extend(imported)
    alphas: dict = {}
    from .codebook import DIMENSION_CODES

    for dimension in DIMENSION_CODES:
        try:
            matrix = reliability_matrix_from_records(records, dimension)
            alphas[dimension] = krippendorff_alpha(matrix)
        except (DegenerateError, ValueError):
            alphas[dimension] = None
    header, rows = reports.agreement_rows(alphas)
    _write_table(out, "agreement", header, rows)
    _write_json(
        out / "agreement_tables.json",
        _tables_payload({"agreement": ("Inter-annotator agreement", header, rows)}),
    )
    print(f"agreement: {sum(1 for a in alphas.values() if a is not None)} measurable dimensions")
    return 0


def _cmd_cohort(config: RunConfig) -> int:
    out = _out(config)
    corpus = _load_corpus_artifact(config)
    records = _load_annotations(config)
    assignments = assign_groups(corpus)
    doc_group = doc_group_map(corpus, assignments)
    doc_wave = doc_wave_map(corpus)
    ispol = {r.doc_id: r.ispol for r in records}

    tld_of = {doc.website.domain: doc.website.tld for doc in corpus}
    groups_header = ["domain", "tld", "group", "rationale"]
    groups_rows = [
        [domain, tld_of[domain], label.value, label.rationale]
        for domain, label in sorted(assignments.items())
    ]
    _write_table(out, "groups", groups_header, groups_rows)

    summary_rows = []
    for group in GROUP_ORDER:
        for wave in WAVES:
            summary_rows.append(
                summary_stats(list(corpus), records, group, wave, doc_group)
            )
    s_header, s_rows = reports.summary_table(summary_rows)
    _write_table(out, "summary", s_header, s_rows)

    medians = {}
    for group in GROUP_ORDER:
        for wave in WAVES:
            policy_docs = [
                d
                for d in corpus
                if doc_group.get(d.doc_id) == group
                and d.snapshot.window_label == wave
                and ispol.get(d.doc_id)
            ]
            medians[(group, wave)] = (
                median_word_count(policy_docs) if policy_docs else None
            )
    w_header, w_rows = reports.word_count_table(medians)
    _write_table(out, "word_counts", w_header, w_rows)

    dictionaries = load_term_dictionaries(config.terms_path)
    mention_counts: dict = {}
    mention_lines = []
    for doc in corpus:
        if not ispol.get(doc.doc_id):
            continue
        report = detect_mentions(doc.text, dictionaries, doc_id=doc.doc_id)
        mention_lines.append(
            {"doc_id": doc.doc_id, "mentions": sorted(report.mentions)}
        )
        group, wave = doc_group.get(doc.doc_id), doc_wave.get(doc.doc_id)
        if group not in GROUP_ORDER or wave not in WAVES:
            continue
        for dictionary in dictionaries:
            k, n = mention_counts.get((dictionary.law, group, wave), (0, 0))
            hit = int(dictionary.law in report.mentions)
            mention_counts[(dictionary.law, group, wave)] = (k + hit, n + 1)
    with open(out / "doc_mentions.jsonl", "w", encoding="utf-8") as handle:
        for line in sorted(mention_lines, key=lambda m: m["doc_id"]):
            handle.write(json.dumps(line, sort_keys=True) + "\n")
    laws = tuple(d.law for d in dictionaries)
    m_header, m_rows = reports.mentions_table(mention_counts, laws=laws)
    _write_table(out, "mentions", m_header, m_rows)

    maps = {
        "doc_group": doc_group,
        "doc_wave": doc_wave,
        "doc_language": {d.doc_id: d.language for d in corpus},
        "doc_top": {d.doc_id: is_top_website(d.website) for d in corpus},
    }
    _write_json(out / "cohort_maps.json", maps)
    _write_json(
        out / "cohort_tables.json",
        _tables_payload(
            {
                "summary": ("Corpus summary", s_header, s_rows),
                "word_counts": ("Median policy word counts", w_header, w_rows),
                "mentions": ("Law mentions in policies", m_header, m_rows),
            }
        ),
    )
    counted = sum(1 for v in doc_group.values() if v in GROUP_ORDER)
    print(f"cohort: {counted}/{len(doc_group)} documents in analysis groups")
    return 0


def _cmd_stats(config: RunConfig) -> int:
    out = _out(config)
    records = _load_annotations(config)
    maps = _read_json(out / "cohort_maps.json")
    doc_group, doc_wave = maps["doc_group"], maps["doc_wave"]
    table = compliance_table(
        records, doc_group, doc_wave, alpha=config.alpha, power=config.power
    )
    f_header, f_rows = reports.obligation_flow_table(table)
    _write_table(out, "compliance_aug_oct", f_header, f_rows)

    threshold = date.fromisoformat(config.updated_since)
    update_stratum = {
        r.doc_id: ("yes" if r.upd is not None and r.upd >= threshold else "no")
        for r in records
        if r.ispol and doc_group.get(r.doc_id) in GROUP_ORDER
    }
    top_stratum = {
        doc_id: ("yes" if maps["doc_top"].get(doc_id) else "no")
        for doc_id in update_stratum
    }
    lang_stratum = {
        doc_id: maps["doc_language"].get(doc_id)
        for doc_id in update_stratum
        if maps["doc_language"].get(doc_id) in reports.REPORT_LANGUAGES
    }
    blocks = []
    for title, stratum, order, with_delta in (
        ("update", update_stratum, ("no", "yes"), True),
        ("top", top_stratum, ("no", "yes"), True),
        ("language", lang_stratum, reports.REPORT_LANGUAGES, False),
    ):
        cells, totals = compliance_by_stratum(records, stratum)
        blocks.append((title, cells, totals, order, with_delta))
    b_header, b_rows = reports.stratified_table(blocks)
    _write_table(out, "compliance_breakdown", b_header, b_rows)

    _write_json(out / "stats_results.json", obligation_table_to_dict(table))
    _write_json(
        out / "stats_tables.json",
        _tables_payload(
            {
                "compliance_aug_oct": (
                    "Obligation compliance by group (both waves)",
                    f_header,
                    f_rows,
                ),
                "compliance_breakdown": (
                    "Obligation compliance by stratum",
                    b_header,
                    b_rows,
                ),
            }
        ),
    )
    starred = sum(
        1
        for row in table.rows.values()
        if row.test is not None and row.test.significant
    )
    print(f"stats: {starred} significant contrasts at alpha={config.alpha}")
    return 0


def _cmd_generators(config: RunConfig) -> int:
    out = _out(config)
    corpus = _load_corpus_artifact(config)
    records = _load_annotations(config)
    maps = _read_json(out / "cohort_maps.json")
    doc_group, doc_wave = maps["doc_group"], maps["doc_wave"]
    specs = load_generator_specs(config.generators_path)
    ispol = {r.doc_id: r.ispol for r in records}

    match_reports = [
        match_generators(doc.text, specs, doc_id=doc.doc_id)
        for doc in corpus
        if ispol.get(doc.doc_id)
    ]
    with open(out / "generator_matches.jsonl", "w", encoding="utf-8") as handle:
        for report in sorted(match_reports, key=lambda r: r.doc_id):
            handle.write(
                json.dumps(
                    {
                        "doc_id": report.doc_id,
                        "matches": sorted(
                            [list(m) for m in report.matches]
                        ),
                    },
                    sort_keys=True,
                )
                + "\n"
            )

    policy_totals: dict = {}
    for record in records:
        if not record.ispol:
            continue
        key = (doc_group.get(record.doc_id), doc_wave.get(record.doc_id))
        if key[0] in GROUP_ORDER and key[1] in WAVES:
            policy_totals[key] = policy_totals.get(key, 0) + 1

    prevalence_table = prevalence(
        match_reports, specs, doc_group, doc_wave, policy_totals
    )
    p_header, p_rows = reports.prevalence_rows(prevalence_table)
    _write_table(out, "generator_prevalence", p_header, p_rows)

    use_table = compliance_by_use(match_reports, records)
    u_header, u_rows = reports.use_compliance_rows(use_table)
    _write_table(out, "generator_use_compliance", u_header, u_rows)

    compliance_rows = compliance_by_generator(match_reports, records, specs)
    g_header, g_rows = reports.generator_compliance_rows(compliance_rows)
    _write_table(out, "generator_compliance", g_header, g_rows)

    candidates = propose_generator_candidates(records)
    c_header, c_rows = reports.candidate_rows(candidates)
    _write_table(out, "generator_candidates", c_header, c_rows)

    _write_json(
        out / "generator_tables.json",
        _tables_payload(
            {
                "generator_prevalence": (
                    "Generator prevalence by group and wave",
                    p_header,
                    p_rows,
                ),
                "generator_use_compliance": (
                    "Compliance without vs with a generator",
                    u_header,
                    u_rows,
                ),
                "generator_compliance": (
                    "Compliance by generator (single-generator policies)",
                    g_header,
                    g_rows,
                ),
                "generator_candidates": (
                    "Unmatched tool mentions for curation",
                    c_header,
                    c_rows,
                ),
            }
        ),
    )
    matched = sum(1 for r in match_reports if r.generator_ids)
    print(f"generators: {matched} policies matched at least one generator")
    return 0


def _scatter_svg(projection, labels: dict) -> str:
    xs, ys = projection.coords[:, 0], projection.coords[:, 1]
    span_x = max(xs.max() - xs.min(), 1e-9)
    span_y = max(ys.max() - ys.min(), 1e-9)
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="640" height="640" '
        'viewBox="0 0 640 640">',
        '<rect width="640" height="640" fill="white"/>',
    ]
    for doc_id, (x, y) in zip(projection.doc_ids, projection.coords):
        px = 20 + 600 * (x - xs.min()) / span_x
        py = 20 + 600 * (y - ys.min()) / span_y
        color = "#d62728" if labels.get(doc_id) else "#1f77b4"
        parts.append(
            f'<circle cx="{px:.2f}" cy="{py:.2f}" r="3" fill="{color}" '
            'fill-opacity="0.6"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _cmd_cluster(config: RunConfig) -> int:
    out = _out(config)
    corpus = _load_corpus_artifact(config)
    embeddings_path = config.cluster.get("embeddings_path")
    if embeddings_path:
        vectors = read_embeddings(embeddings_path)
    elif config.cluster.get("pseudo"):
        # Offline stand-in for environments without an embedding service.
        from .synth import pseudo_embedding

        annotations_path = _out(config) / "annotations.jsonl"
        ispol = None
        if annotations_path.exists():
            ispol = {r.doc_id: r.ispol for r in read_annotations(annotations_path)}
        vectors = [
            EmbeddingVector(
                doc_id=doc.doc_id,
                values=pseudo_embedding(doc.text),
                model_id="pseudo-hash-v1",
                truncated_to=doc.word_count,
            )
            for doc in corpus
            if ispol is None or ispol.get(doc.doc_id)
        ]
    else:
        if not config.embedding:
            raise ConfigError(
                "cluster needs embedding.* settings, cluster.embeddings_path, "
                "or cluster.pseudo=true"
            )
        try:
            embedding_config = EmbeddingConfig(**config.embedding)
        except TypeError as exc:
            raise ConfigError(f"bad embedding settings: {exc}")
        client = EmbeddingClient(embedding_config)
        batch = client.embed_many(list(corpus))
        if batch.failures and not batch.vectors:
            raise BackendError("all embedding requests failed")
        vectors = batch.vectors
        write_embeddings(vectors, out / "embeddings.jsonl")

    projection = project_tsne(
        vectors,
        perplexity=float(config.cluster.get("perplexity", 30.0)),
        iterations=int(config.cluster.get("iterations", 1000)),
        seed=config.seed,
    )
    labels: dict = {}
    matches_path = out / "generator_matches.jsonl"
    if matches_path.exists():
        with open(matches_path, encoding="utf-8") as handle:
            for line in handle:
                if not line.strip():
                    continue
                entry = json.loads(line)
                ids = sorted({m[0] for m in entry["matches"]})
                labels[entry["doc_id"]] = ids[0] if len(ids) == 1 else None
    write_projection(projection, out / "projection.csv", labels)
    _write_text(out / "scatter.svg", _scatter_svg(projection, labels))

    cohesion_rows = []
    if labels:
        cohesion = cluster_cohesion(vectors, labels)
        for generator_id, stats in cohesion.items():
            cohesion_rows.append(
                [
                    generator_id,
                    reports.fmt_count(stats["n"]),
                    reports.fmt_pct(stats["intra"], 4),
                    reports.fmt_pct(stats["cross"], 4),
                    reports.fmt_pct(stats["ratio"], 4),
                ]
            )
    c_header = ["generator", "documents", "intra_sim", "cross_sim", "ratio"]
    _write_table(out, "cohesion", c_header, cohesion_rows)
    _write_json(
        out / "cluster_tables.json",
        {
            **_tables_payload(
                {"cohesion": ("Within-generator cosine cohesion", c_header, cohesion_rows)}
            ),
            "projection": {
                "documents": len(projection.doc_ids),
                "perplexity": projection.perplexity,
                "iterations": projection.iterations,
                "seed": projection.seed,
                "exaggeration_kl": projection.exaggeration_kl,
                "final_kl": projection.final_kl,
            },
        },
    )
    print(
        f"cluster: {len(projection.doc_ids)} documents projected, "
        f"final KL {projection.final_kl:.4f}"
    )
    return 0


_REPORT_SECTIONS = (
    ("cohort_tables.json", ("summary", "word_counts", "mentions")),
    ("stats_tables.json", ("compliance_aug_oct", "compliance_breakdown")),
    (
        "generator_tables.json",
        (
            "generator_prevalence",
            "generator_use_compliance",
            "generator_compliance",
            "generator_candidates",
        ),
    ),
    ("validation_tables.json", ("validation_metrics", "delta_f1")),
    ("agreement_tables.json", ("agreement",)),
    ("cluster_tables.json", ("cohesion",)),
)


def _cmd_report(config: RunConfig) -> int:
    out = _out(config)
    sections = ["# Policy audit report", ""]
    found_any = False
    for artifact, names in _REPORT_SECTIONS:
        path = out / artifact
        if not path.exists():
            continue
        payload = _read_json(path)
        for name in names:
            table = payload.get("tables", {}).get(name)
            if table is None:
                continue
            found_any = True
            sections.append(f"## {table['title']}")
            sections.append("")
            sections.append(
                reports.render_markdown(table["header"], table["rows"]).rstrip()
            )
            sections.append("")
    if not found_any:
        raise DataError(
            f"no stage tables found under {out}; run analysis stages first"
        )
    _write_text(out / "report.md", "\n".join(sections).rstrip() + "\n")

    manifest = {}
    for path in sorted(out.rglob("*")):
        if not path.is_file() or path.name == "manifest.json":
            continue
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        manifest[str(path.relative_to(out))] = digest
    _write_json(out / "manifest.json", {"artifacts": manifest})
    print(f"report: {len(manifest)} artifacts listed in manifest")
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "annotate": _cmd_annotate,
    "validate": _cmd_validate,
    "agreement": _cmd_agreement,
    "cohort": _cmd_cohort,
    "stats": _cmd_stats,
    "generators": _cmd_generators,
    "cluster": _cmd_cluster,
    "report": _cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="policyaudit",
        description="Privacy-policy compliance audit pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in STAGES:
        stage = sub.add_parser(name, help=f"run the {name} stage")
        stage.add_argument("--config", help="JSON run configuration")
        stage.add_argument("--output-dir", dest="output_dir")
        stage.add_argument("--seed", type=int)
        stage.add_argument("--alpha", type=float)
        stage.add_argument("--power", type=float)
        if name == "ingest":
            stage.add_argument(
                "--corpus", action="append", help="corpus JSONL (repeatable)"
            )
        if name == "annotate":
            stage.add_argument(
                "--backend", choices=("baseline", "remote", "human")
            )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _build_config(args)
        return _COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return 3
    except PolicyAuditError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
