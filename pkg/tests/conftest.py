"""Shared builders for documents, records, and corpus files."""

from __future__ import annotations

import json
from datetime import date

import pytest

from policyaudit import (
    AnnotationRecord,
    PolicyDocument,
    PolicySnapshot,
    WebsiteRecord,
)
from policyaudit.synth import write_synthetic_corpus


def make_website(domain="example.ch", tld=None, rank_buckets=None) -> WebsiteRecord:
    if tld is None:
        tld = domain.rsplit(".", 1)[-1]
    return WebsiteRecord(
        domain=domain, tld=tld, rank_buckets=rank_buckets or {"CH": "10k"}
    )


def make_doc(
    doc_id="doc-1",
    domain="example.ch",
    text="Hallo Welt, dies ist ein Text.",
    tld=None,
    rank_buckets=None,
    window="AUG2023",
    snapshot_id=None,
    capture=None,
    language="de",
    confidence=1.0,
) -> PolicyDocument:
    website = make_website(domain, tld, rank_buckets)
    if capture is None:
        capture = date(2023, 8, 15) if window == "AUG2023" else date(2023, 10, 15)
    snapshot = PolicySnapshot(
        snapshot_id=snapshot_id or f"{window.lower()}-{doc_id}",
        window_label=window,
        capture_date=capture,
    )
    return PolicyDocument(
        doc_id=doc_id,
        website=website,
        snapshot=snapshot,
        text=text,
        language=language,
        language_confidence=confidence,
        word_count=len(text.split()),
    )


def make_record(
    doc_id="doc-1",
    source="human",
    backend_id="coder-1",
    ispol=True,
    upd=None,
    contr=False,
    purp=False,
    rect=False,
    forg=False,
    port=False,
    comp=False,
    hum=False,
    created_at=None,
    raw_payload="",
) -> AnnotationRecord:
    return AnnotationRecord(
        doc_id=doc_id,
        source=source,
        backend_id=backend_id,
        ispol=ispol,
        upd=upd,
        contr=contr,
        purp=purp,
        rect=rect,
        forg=forg,
        port=port,
        comp=comp,
        hum=hum,
        created_at=created_at,
        raw_payload=raw_payload,
    )


def corpus_line(**overrides) -> dict:
    """One raw JSONL corpus record with sane defaults."""
    line = {
        "doc_id": "example.ch:aug2023",
        "domain": "example.ch",
        "tld": "ch",
        "rank_buckets": {"CH": "10k"},
        "snapshot_id": "aug2023-example.ch",
        "window_label": "AUG2023",
        "capture_date": "2023-08-15",
        "text": "Datenschutzerklärung: Wir verarbeiten personenbezogene Daten.",
    }
    line.update(overrides)
    return line


def write_jsonl(path, lines) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for line in lines:
            handle.write(json.dumps(line, ensure_ascii=False) + "\n")


@pytest.fixture(scope="session")
def synth_corpus_path(tmp_path_factory):
    """A 300-document synthetic corpus shared across the suite."""
    path = tmp_path_factory.mktemp("synth") / "corpus.jsonl"
    write_synthetic_corpus(path, n_docs=300, seed=7)
    return path
