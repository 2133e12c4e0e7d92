"""Corpus ingest: policy snapshots with website metadata.

One JSON object per line with fields {doc_id, domain, tld, rank_buckets,
snapshot_id, window_label, capture_date, text}. Ingest tolerates individual
malformed lines (collected in the report) but refuses a file where more
than 10% of the lines are bad. Duplicates on (domain, snapshot_id) are
dropped, first occurrence wins. The resulting corpus is immutable.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from datetime import date
from typing import Callable, Iterable, Iterator, Mapping

from .errors import ConfigError, CorpusFormatError, EmptySelectionError
from .langid import detect_language

RANK_BUCKETS = ("1k", "5k", "10k", "50k", "100k", "500k", "1M", "5M", "10M+")
WINDOW_LABELS = ("AUG2023", "OCT2023", "OTHER")
LANGUAGES = ("de", "en", "fr", "it", "unknown")

CORPUS_FIELDS = (
    "doc_id",
    "domain",
    "tld",
    "rank_buckets",
    "snapshot_id",
    "window_label",
    "capture_date",
    "text",
)

MAX_MALFORMED_FRACTION = 0.10


@dataclass(frozen=True)
class WebsiteRecord:
    domain: str
    tld: str
    rank_buckets: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "domain", self.domain.strip().lower())
        object.__setattr__(self, "tld", self.tld.strip().lower())
        if not self.domain:
            raise ValueError("domain must be non-empty")
        if not self.tld:
            raise ValueError("tld must be non-empty")
        buckets = {}
        for country, bucket in dict(self.rank_buckets).items():
            country = str(country).strip().upper()
            if len(country) != 2 or not country.isalpha():
                raise ValueError(f"country code {country!r} is not alpha-2")
            if bucket not in RANK_BUCKETS:
                raise ValueError(f"rank bucket {bucket!r} not in {RANK_BUCKETS}")
            buckets[country] = bucket
        object.__setattr__(self, "rank_buckets", buckets)


@dataclass(frozen=True)
class PolicySnapshot:
    snapshot_id: str
    window_label: str
    capture_date: date

    def __post_init__(self):
        if not self.snapshot_id:
            raise ValueError("snapshot_id must be non-empty")
        if self.window_label not in WINDOW_LABELS:
            raise ValueError(
                f"window_label {self.window_label!r} not in {WINDOW_LABELS}"
            )
        if not isinstance(self.capture_date, date):
            raise ValueError("capture_date must be a date")


@dataclass(frozen=True)
class PolicyDocument:
    doc_id: str
    website: WebsiteRecord
    snapshot: PolicySnapshot
    text: str
    language: str
    language_confidence: float
    word_count: int

    def __post_init__(self):
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")
        if self.language not in LANGUAGES:
            raise ValueError(f"language {self.language!r} not in {LANGUAGES}")
        if not 0.0 <= self.language_confidence <= 1.0:
            raise ValueError("language_confidence must be in [0, 1]")
        if self.word_count != len(self.text.split()):
            raise ValueError("word_count does not match text")


@dataclass
class IngestReport:
    total_lines: int = 0
    accepted: int = 0
    duplicates: int = 0
    errors: list[tuple[int, str]] = field(default_factory=list)

    @property
    def rejected(self) -> int:
        return len(self.errors)

    def to_dict(self) -> dict:
        return {
            "total_lines": self.total_lines,
            "accepted": self.accepted,
            "duplicates": self.duplicates,
            "rejected": self.rejected,
            "errors": [{"line": n, "message": m} for n, m in self.errors],
        }


class Corpus:
    """Immutable, ordered collection of policy documents."""

    def __init__(self, documents: Iterable[PolicyDocument]):
        self._docs = tuple(documents)
        self._by_id = {d.doc_id: d for d in self._docs}
        if len(self._by_id) != len(self._docs):
            raise ValueError("doc_id values must be unique")

    def __len__(self) -> int:
        return len(self._docs)

    def __iter__(self) -> Iterator[PolicyDocument]:
        return iter(self._docs)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._by_id

    def get(self, doc_id: str) -> PolicyDocument:
        return self._by_id[doc_id]

    @property
    def documents(self) -> tuple[PolicyDocument, ...]:
        return self._docs

    def select(self, predicate: Callable[[PolicyDocument], bool]):
        return tuple(d for d in self._docs if predicate(d))


def word_count(text: str) -> int:
    """Number of maximal non-whitespace runs in ``text``."""
    return len(text.split())


def median_word_count(docs: Iterable[PolicyDocument]) -> float:
    """Median word count over a selection; even n takes the middle-pair mean."""
    counts = [d.word_count for d in docs]
    if not counts:
        raise EmptySelectionError("median_word_count over an empty selection")
    return statistics.median(counts)


def _parse_line(obj: dict, language_threshold: float) -> PolicyDocument:
    if not isinstance(obj, dict):
        raise ValueError("record is not a JSON object")
    missing = [k for k in CORPUS_FIELDS if k not in obj]
    if missing:
        raise ValueError(f"missing fields: {', '.join(missing)}")
    for key in ("doc_id", "domain", "tld", "snapshot_id", "window_label", "text"):
        if not isinstance(obj[key], str):
            raise ValueError(f"field {key!r} must be a string")
    if not isinstance(obj["rank_buckets"], dict):
        raise ValueError("field 'rank_buckets' must be an object")
    website = WebsiteRecord(
        domain=obj["domain"], tld=obj["tld"], rank_buckets=obj["rank_buckets"]
    )
    snapshot = PolicySnapshot(
        snapshot_id=obj["snapshot_id"],
        window_label=obj["window_label"],
        capture_date=date.fromisoformat(obj["capture_date"]),
    )
    text = obj["text"]
    language, confidence = detect_language(text, threshold=language_threshold)
    return PolicyDocument(
        doc_id=obj["doc_id"],
        website=website,
        snapshot=snapshot,
        text=text,
        language=language,
        language_confidence=confidence,
        word_count=word_count(text),
    )


def ingest_corpus(
    path,
    format: str = "jsonl",
    language_threshold: float = 0.5,
) -> tuple[Corpus, IngestReport]:
    """Read a corpus file and return (corpus, ingest report).

    Malformed lines are collected and skipped; more than 10% malformed is a
    hard failure. Duplicate (domain, snapshot_id) pairs are dropped with a
    count, and doc_id collisions are rejected as per-line errors. Ingesting
    the same file twice yields an identical corpus.
    """
    if format != "jsonl":
        raise ConfigError(f"unknown corpus format {format!r}")
    report = IngestReport()
    docs: list[PolicyDocument] = []
    seen_keys: set[tuple[str, str]] = set()
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            report.total_lines += 1
            try:
                doc = _parse_line(json.loads(line), language_threshold)
                if doc.doc_id in seen_ids:
                    raise ValueError(f"doc_id {doc.doc_id!r} already used")
            except (ValueError, TypeError) as exc:
                report.errors.append((line_no, str(exc)))
                continue
            key = (doc.website.domain, doc.snapshot.snapshot_id)
            if key in seen_keys:
                report.duplicates += 1
                continue
            seen_keys.add(key)
            seen_ids.add(doc.doc_id)
            docs.append(doc)
    if report.total_lines and report.rejected > MAX_MALFORMED_FRACTION * report.total_lines:
        raise CorpusFormatError(
            f"{report.rejected} of {report.total_lines} lines malformed "
            f"(limit {MAX_MALFORMED_FRACTION:.0%})",
            errors=report.errors,
        )
    report.accepted = len(docs)
    return Corpus(docs), report


def write_corpus(corpus: Corpus, path) -> None:
    """Serialize a corpus back to the JSON-lines interchange format."""
    with open(path, "w", encoding="utf-8") as handle:
        for doc in corpus:
            record = {
                "doc_id": doc.doc_id,
                "domain": doc.website.domain,
                "tld": doc.website.tld,
                "rank_buckets": dict(doc.website.rank_buckets),
                "snapshot_id": doc.snapshot.snapshot_id,
                "window_label": doc.snapshot.window_label,
                "capture_date": doc.snapshot.capture_date.isoformat(),
                "text": doc.text,
            }
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
