"""Study-group assignment, law-mention detection, and summary statistics.

Websites are assigned to CH / CH&EU / EU by TLD and country popularity
buckets: a Swiss TLD (.ch/.swiss) without any EU-country bucket is CH,
with one is CH&EU; a .de/.at/.fr/.it TLD without a Swiss bucket is EU;
everything else (generic TLDs, EU TLDs with Swiss buckets) is excluded.
Law mentions are detected from fixed term lists, case-insensitive for
phrases but case-sensitive with token boundaries for short acronym and
numeric terms, so "gdprize" never counts as GDPR.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping, Optional, Sequence

from .codebook import AnnotationRecord
from .corpus import Corpus, PolicyDocument, WebsiteRecord

SWISS_TLDS = frozenset({"ch", "swiss"})
EU_TLDS = frozenset({"de", "at", "fr", "it"})

#: ISO 3166-1 alpha-2 codes of the 27 EU member states.
EU_COUNTRIES = frozenset(
    {
        "AT", "BE", "BG", "HR", "CY", "CZ", "DK", "EE", "FI", "FR",
        "DE", "GR", "HU", "IE", "IT", "LV", "LT", "LU", "MT", "NL",
        "PL", "PT", "RO", "SK", "SI", "ES", "SE",
    }
)

#: Short terms matched case-sensitively with token boundaries.
ACRONYM_TERMS = frozenset(
    {"DSG", "nDSG", "rDSG", "LPD", "RGPD", "GDPR", "DSGVO", "DS-GVO", "235.1", "2016/679"}
)

#: Bucket values counting as "top 5k" membership.
TOP_BUCKETS = frozenset({"1k", "5k"})

GROUP_VALUES = ("EU", "CH", "CH_EU", "EXCLUDED")
RATIONALES = (
    "swiss_tld_no_eu_bucket",
    "swiss_tld_eu_bucket",
    "eu_tld_no_ch_bucket",
    "generic_tld",
    "other",
)

_CONSISTENT = {
    "CH": {"swiss_tld_no_eu_bucket"},
    "CH_EU": {"swiss_tld_eu_bucket"},
    "EU": {"eu_tld_no_ch_bucket"},
    "EXCLUDED": {"generic_tld", "other"},
}


@dataclass(frozen=True)
class GroupLabel:
    value: str
    rationale: str

    def __post_init__(self):
        if self.value not in GROUP_VALUES:
            raise ValueError(f"unknown group {self.value!r}")
        if self.rationale not in _CONSISTENT[self.value]:
            raise ValueError(
                f"rationale {self.rationale!r} inconsistent with group {self.value!r}"
            )


def assign_group(
    website: WebsiteRecord,
    swiss_tlds: frozenset = SWISS_TLDS,
    eu_countries: frozenset = EU_COUNTRIES,
) -> GroupLabel:
    """Pure function of (tld, rank_buckets); every website gets one label."""
    buckets = set(website.rank_buckets)
    has_eu_bucket = bool(buckets & eu_countries)
    has_ch_bucket = "CH" in buckets
    if website.tld in swiss_tlds:
        if has_eu_bucket:
            return GroupLabel("CH_EU", "swiss_tld_eu_bucket")
        return GroupLabel("CH", "swiss_tld_no_eu_bucket")
    if website.tld in EU_TLDS:
        if has_ch_bucket:
            return GroupLabel("EXCLUDED", "other")
        return GroupLabel("EU", "eu_tld_no_ch_bucket")
    return GroupLabel("EXCLUDED", "generic_tld")


def is_top_website(website: WebsiteRecord) -> bool:
    """Member of any country's top-5k popularity bucket."""
    return any(bucket in TOP_BUCKETS for bucket in website.rank_buckets.values())


# -- law mentions -------------------------------------------------------------

@dataclass(frozen=True)
class TermDictionary:
    law: str
    terms: tuple

    def __post_init__(self):
        if self.law not in ("GDPR", "FADP"):
            raise ValueError(f"unknown law {self.law!r}")
        if not self.terms:
            raise ValueError("term list must be non-empty")
        object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True)
class MentionReport:
    doc_id: str
    matched_terms: tuple  # (law, term, offset)

    @property
    def mentions(self) -> frozenset:
        return frozenset(law for law, _, _ in self.matched_terms)


def load_term_dictionaries(path=None) -> list[TermDictionary]:
    """Load the shipped GDPR/FADP term lists, or custom ones from a path."""
    if path is None:
        text = (
            resources.files("policyaudit.data")
            .joinpath("law_terms.json")
            .read_text(encoding="utf-8")
        )
    else:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    payload = json.loads(text)
    entries = payload["dictionaries"] if isinstance(payload, dict) else payload
    return [TermDictionary(law=d["law"], terms=tuple(d["terms"])) for d in entries]


def _term_pattern(term: str) -> re.Pattern:
    escaped = re.escape(term)
    if term in ACRONYM_TERMS:
        return re.compile(rf"(?<!\w){escaped}(?!\w)")
    return re.compile(rf"(?<!\w){escaped}(?!\w)", re.IGNORECASE)


class MentionDetector:
    """Precompiled matcher over one or more term dictionaries."""

    def __init__(self, dictionaries: Sequence[TermDictionary]):
        self._compiled = [
            (d.law, term, _term_pattern(term))
            for d in dictionaries
            for term in d.terms
        ]

    def detect(self, text: str, doc_id: str = "") -> MentionReport:
        matched = []
        for law, term, pattern in self._compiled:
            match = pattern.search(text)
            if match:
                matched.append((law, term, match.start()))
        return MentionReport(doc_id=doc_id, matched_terms=tuple(matched))


def detect_mentions(
    text: str, dictionaries: Sequence[TermDictionary], doc_id: str = ""
) -> MentionReport:
    """A law is mentioned iff at least one of its terms occurs in the text."""
    return MentionDetector(dictionaries).detect(text, doc_id)


# -- aggregation ---------------------------------------------------------------

def assign_groups(corpus: Corpus) -> dict:
    """domain -> GroupLabel over all websites in the corpus."""
    return {
        doc.website.domain: assign_group(doc.website)
        for doc in corpus
    }


def doc_group_map(corpus: Corpus, assignments: Optional[Mapping] = None) -> dict:
    """doc_id -> group value (CH / CH_EU / EU / EXCLUDED)."""
    if assignments is None:
        assignments = assign_groups(corpus)
    return {
        doc.doc_id: assignments[doc.website.domain].value for doc in corpus
    }


def doc_wave_map(corpus: Corpus) -> dict:
    """doc_id -> snapshot window label."""
    return {doc.doc_id: doc.snapshot.window_label for doc in corpus}


@dataclass
class SummaryRow:
    group: str
    window: str
    websites: int
    policies: int
    pct_policy: float
    language_shares: dict
    flagged: bool = False


def summary_stats(
    docs: Iterable[PolicyDocument],
    records: Iterable[AnnotationRecord],
    group: str,
    window: str,
    doc_group: Mapping[str, str],
) -> SummaryRow:
    """One summary row: website count, % with policy, language shares.

    The website count is the number of snapshot documents in the selection
    (one per domain within a window); language shares are over documents
    annotated ispol=true and always sum to 100% up to rounding.
    """
    ispol = {r.doc_id: r.ispol for r in records}
    selection = [
        d
        for d in docs
        if doc_group.get(d.doc_id) == group and d.snapshot.window_label == window
    ]
    websites = len(selection)
    policies = [d for d in selection if ispol.get(d.doc_id)]
    if websites == 0:
        return SummaryRow(group, window, 0, 0, 0.0, {}, flagged=True)
    shares: dict = {}
    for doc in policies:
        shares[doc.language] = shares.get(doc.language, 0) + 1
    total = len(policies)
    language_shares = (
        {lang: 100.0 * count / total for lang, count in sorted(shares.items())}
        if total
        else {}
    )
    return SummaryRow(
        group=group,
        window=window,
        websites=websites,
        policies=total,
        pct_policy=100.0 * total / websites,
        language_shares=language_shares,
    )
