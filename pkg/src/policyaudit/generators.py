"""Generator fingerprinting: detection, discovery, prevalence, compliance.

Detection runs a curated dictionary of conservative, name-anchored regex
patterns (shipped as JSON data, user-extendable); false negatives are
preferred over false positives. Discovery collects free-text tool mentions
into ranked candidates for human curation and never touches the dictionary
automatically.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, Optional, Sequence

from .codebook import AnnotationRecord, OBLIGATION_CODES
from .errors import ConfigError, DataError, EmptySelectionError


@dataclass(frozen=True)
class GeneratorSpec:
    id: str
    display_name: str
    country: str
    patterns: tuple

    def __post_init__(self):
        if not self.patterns:
            raise ValueError(f"generator {self.id!r} has no patterns")
        object.__setattr__(self, "patterns", tuple(self.patterns))
        compiled = tuple(re.compile(p) for p in self.patterns)
        object.__setattr__(self, "_compiled", compiled)

    @property
    def compiled(self) -> tuple:
        return self._compiled


def load_generator_specs(path=None) -> list[GeneratorSpec]:
    """Load the shipped dictionary, or a custom JSON file of the same shape."""
    if path is None:
        text = (
            resources.files("policyaudit.data")
            .joinpath("generators.json")
            .read_text(encoding="utf-8")
        )
    else:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    payload = json.loads(text)
    entries = payload["generators"] if isinstance(payload, dict) else payload
    specs = [
        GeneratorSpec(
            id=e["id"],
            display_name=e["display_name"],
            country=e["country"],
            patterns=tuple(e["patterns"]),
        )
        for e in entries
    ]
    ids = [s.id for s in specs]
    if len(set(ids)) != len(ids):
        raise ConfigError("generator ids must be unique")
    return specs


@dataclass(frozen=True)
class GeneratorMatchReport:
    doc_id: str
    matches: frozenset  # (generator_id, pattern_index, byte_offset)

    @property
    def generator_ids(self) -> frozenset:
        return frozenset(gid for gid, _, _ in self.matches)


def match_generators(
    text: str, specs: Sequence[GeneratorSpec], doc_id: str = ""
) -> GeneratorMatchReport:
    """All pattern hits with byte offsets; deterministic and order-free."""
    encoded_prefix_cache: dict = {}

    def byte_offset(char_pos: int) -> int:
        if char_pos not in encoded_prefix_cache:
            encoded_prefix_cache[char_pos] = len(
                text[:char_pos].encode("utf-8")
            )
        return encoded_prefix_cache[char_pos]

    matches = set()
    for spec in specs:
        for idx, pattern in enumerate(spec.compiled):
            for found in pattern.finditer(text):
                matches.add((spec.id, idx, byte_offset(found.start())))
    return GeneratorMatchReport(doc_id=doc_id, matches=frozenset(matches))


def detect_generators(text: str, specs: Sequence[GeneratorSpec]) -> set:
    """ids whose patterns match the text; several generators may match."""
    return set(match_generators(text, specs).generator_ids)


# -- discovery ----------------------------------------------------------------

@dataclass(frozen=True)
class ToolMentionCandidate:
    raw_string: str
    frequency: int
    example_doc_ids: tuple


def _org_from_record(record: AnnotationRecord) -> str:
    if not record.raw_payload:
        return ""
    try:
        payload = json.loads(record.raw_payload)
    except json.JSONDecodeError:
        return ""
    value = payload.get("org", "") if isinstance(payload, dict) else ""
    return value if isinstance(value, str) else ""


def propose_generator_candidates(
    records: Iterable[AnnotationRecord], max_examples: int = 5
) -> list[ToolMentionCandidate]:
    """Rank free-text tool mentions for human curation.

    Mentions are normalized (trim + casefold) and grouped; candidates come
    back by descending frequency, alphabetical within ties. The result is
    input to manual dictionary curation, never promoted automatically.
    """
    grouped: dict = {}
    for record in records:
        normalized = _org_from_record(record).strip().casefold()
        if not normalized:
            continue
        grouped.setdefault(normalized, []).append(record.doc_id)
    candidates = [
        ToolMentionCandidate(
            raw_string=norm,
            frequency=len(doc_ids),
            example_doc_ids=tuple(sorted(doc_ids)[:max_examples]),
        )
        for norm, doc_ids in grouped.items()
    ]
    candidates.sort(key=lambda c: (-c.frequency, c.raw_string))
    return candidates


# -- prevalence ----------------------------------------------------------------

@dataclass
class PrevalenceTable:
    rows: list  # (generator_id, display, country, {(group, wave): count}, total)
    with_generator: dict  # (group, wave) -> count of docs with >=1 generator
    policy_totals: dict  # (group, wave) -> policy count
    groups: tuple
    waves: tuple


def prevalence(
    reports: Iterable[GeneratorMatchReport],
    specs: Sequence[GeneratorSpec],
    doc_group: Mapping[str, str],
    doc_wave: Mapping[str, str],
    policy_totals: Mapping,
    groups: Sequence[str] = ("CH", "CH_EU", "EU"),
    waves: Sequence[str] = ("AUG2023", "OCT2023"),
) -> PrevalenceTable:
    """Per generator × group × wave counts, sorted by total use descending.

    The "with generator" row counts each document once however many
    generators it matches; percentages use the provided policy totals.
    """
    by_spec = {s.id: s for s in specs}
    counts: dict = {s.id: {} for s in specs}
    with_generator: dict = {}
    for report in reports:
        ids = report.generator_ids
        if not ids:
            continue
        key = (doc_group.get(report.doc_id), doc_wave.get(report.doc_id))
        if key[0] not in groups or key[1] not in waves:
            continue
        with_generator[key] = with_generator.get(key, 0) + 1
        for gid in ids:
            if gid in counts:
                counts[gid][key] = counts[gid].get(key, 0) + 1
    rows = []
    for gid, cells in counts.items():
        total = sum(cells.values())
        spec = by_spec[gid]
        rows.append((gid, spec.display_name, spec.country, cells, total))
    rows.sort(key=lambda r: (-r[4], r[0]))
    return PrevalenceTable(
        rows=rows,
        with_generator=with_generator,
        policy_totals=dict(policy_totals),
        groups=tuple(groups),
        waves=tuple(waves),
    )


# -- compliance ----------------------------------------------------------------

@dataclass
class GeneratorComplianceRow:
    generator_id: str
    display_name: str
    country: str
    obligation_pct: dict  # obligation -> percent
    average_pct: float
    policies: int
    market_share_pct: float = 0.0


def compliance_by_generator(
    reports: Iterable[GeneratorMatchReport],
    records: Iterable[AnnotationRecord],
    specs: Sequence[GeneratorSpec],
    single_only: bool = True,
) -> list[GeneratorComplianceRow]:
    """Mean obligation compliance per generator over its ispol=true policies.

    With single_only, documents matching two or more generators are excluded
    from every row. Generators with zero qualifying policies are suppressed.
    Market shares are over the included rows and sum to 100% up to rounding.
    """
    ispol_records = {r.doc_id: r for r in records if r.ispol}
    docs_by_generator: dict = {s.id: [] for s in specs}
    for report in reports:
        ids = report.generator_ids
        if not ids:
            continue
        if single_only and len(ids) > 1:
            continue
        record = ispol_records.get(report.doc_id)
        if record is None:
            continue
        for gid in ids:
            if gid in docs_by_generator:
                docs_by_generator[gid].append(record)
    by_spec = {s.id: s for s in specs}
    rows = []
    grand_total = sum(len(v) for v in docs_by_generator.values())
    for gid, members in docs_by_generator.items():
        if not members:
            continue
        spec = by_spec[gid]
        obligation_pct = {
            ob: 100.0 * sum(getattr(r, ob) for r in members) / len(members)
            for ob in OBLIGATION_CODES
        }
        average = sum(obligation_pct.values()) / len(OBLIGATION_CODES)
        rows.append(
            GeneratorComplianceRow(
                generator_id=gid,
                display_name=spec.display_name,
                country=spec.country,
                obligation_pct=obligation_pct,
                average_pct=average,
                policies=len(members),
                market_share_pct=100.0 * len(members) / grand_total
                if grand_total
                else 0.0,
            )
        )
    rows.sort(key=lambda r: (-r.policies, r.generator_id))
    return rows


@dataclass
class UseComplianceTable:
    """Per obligation: compliance among policies without vs with a generator."""

    cells: dict  # obligation -> {"no": (successes, n), "yes": (successes, n)}
    totals: dict  # "no"/"yes" -> policy count


def compliance_by_use(
    reports: Iterable[GeneratorMatchReport],
    records: Iterable[AnnotationRecord],
) -> UseComplianceTable:
    """Split ispol=true policies by "uses at least one generator"."""
    with_generator = {r.doc_id for r in reports if r.generator_ids}
    cells = {ob: {"no": [0, 0], "yes": [0, 0]} for ob in OBLIGATION_CODES}
    totals = {"no": 0, "yes": 0}
    for record in records:
        if not record.ispol:
            continue
        side = "yes" if record.doc_id in with_generator else "no"
        totals[side] += 1
        for ob in OBLIGATION_CODES:
            cells[ob][side][1] += 1
            if getattr(record, ob):
                cells[ob][side][0] += 1
    frozen = {
        ob: {side: tuple(pair) for side, pair in sides.items()}
        for ob, sides in cells.items()
    }
    return UseComplianceTable(cells=frozen, totals=totals)


# -- boilerplate ----------------------------------------------------------------

_WHITESPACE = re.compile(r"\s+")


def _normalize_ws(text: str) -> str:
    return _WHITESPACE.sub(" ", text)


def boilerplate_share(docs: Iterable, phrase: str) -> float:
    """Share of documents containing the phrase, whitespace-normalized.

    Runs of whitespace collapse to one space on both sides; matching is
    otherwise exact (no case folding). Accepts documents with a ``text``
    attribute or plain strings.
    """
    if not phrase:
        raise ConfigError("boilerplate phrase must be non-empty")
    needle = _normalize_ws(phrase)
    texts = [getattr(d, "text", d) for d in docs]
    if not texts:
        raise EmptySelectionError("boilerplate share over an empty document set")
    hits = sum(needle in _normalize_ws(t) for t in texts)
    return hits / len(texts)
