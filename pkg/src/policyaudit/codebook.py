"""Nine-dimension annotation codebook, records, and normalization rules.

The codebook itself lives in ``data/codebook.json`` so that prompt
generation, validation, and tests share one source of truth. Two global
rules are enforced on every record: a document that is not a policy
carries no obligations (all seven booleans false, update date NA), and
update dates are normalized to DD/MM/YYYY with the most recent mentioned
date winning.
"""

from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass
from datetime import date, datetime
from importlib import resources
from typing import Iterator, Optional, Sequence

DIMENSION_CODES = (
    "ispol",
    "upd",
    "contr",
    "purp",
    "rect",
    "forg",
    "port",
    "comp",
    "hum",
)

#: The seven boolean obligations gated by ispol.
OBLIGATION_CODES = ("contr", "purp", "rect", "forg", "port", "comp", "hum")

SOURCES = ("remote_llm", "baseline", "human")


@dataclass(frozen=True)
class CodebookDimension:
    code: str
    question: str
    legal_basis: str
    value_kind: str
    guidance: str = ""
    positive_example: str = ""
    negative_example: str = ""

    def __post_init__(self):
        if self.code not in DIMENSION_CODES:
            raise ValueError(f"unknown dimension code {self.code!r}")
        if self.value_kind not in ("boolean", "date"):
            raise ValueError(f"unknown value kind {self.value_kind!r}")


class Codebook:
    """Ordered collection of exactly nine dimensions."""

    def __init__(self, dimensions: Sequence[CodebookDimension], schema_version: str):
        dims = tuple(dimensions)
        codes = tuple(d.code for d in dims)
        if codes != DIMENSION_CODES:
            raise ValueError(
                f"codebook must contain exactly the nine codes {DIMENSION_CODES}, got {codes}"
            )
        for dim in dims:
            expected = "date" if dim.code == "upd" else "boolean"
            if dim.value_kind != expected:
                raise ValueError(
                    f"dimension {dim.code!r} must have value_kind {expected!r}"
                )
        self._dims = dims
        self._by_code = {d.code: d for d in dims}
        self.schema_version = schema_version

    def __len__(self) -> int:
        return len(self._dims)

    def __iter__(self) -> Iterator[CodebookDimension]:
        return iter(self._dims)

    def get(self, code: str) -> CodebookDimension:
        return self._by_code[code]

    @property
    def dimensions(self) -> tuple[CodebookDimension, ...]:
        return self._dims

    @classmethod
    def from_dict(cls, payload: dict) -> "Codebook":
        dims = [
            CodebookDimension(
                code=entry["code"],
                question=entry["question"],
                legal_basis=entry["legal_basis"],
                value_kind=entry["value_kind"],
                guidance=entry.get("guidance", ""),
                positive_example=entry.get("positive_example", ""),
                negative_example=entry.get("negative_example", ""),
            )
            for entry in payload["dimensions"]
        ]
        return cls(dims, schema_version=str(payload.get("schema_version", "1")))

    @classmethod
    def load(cls, path=None) -> "Codebook":
        """Load the packaged codebook, or one from an explicit path."""
        if path is None:
            text = (
                resources.files("policyaudit.data")
                .joinpath("codebook.json")
                .read_text(encoding="utf-8")
            )
        else:
            with open(path, encoding="utf-8") as handle:
                text = handle.read()
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class AnnotationRecord:
    doc_id: str
    source: str
    backend_id: str
    ispol: bool
    upd: Optional[date]
    contr: bool
    purp: bool
    rect: bool
    forg: bool
    port: bool
    comp: bool
    hum: bool
    created_at: Optional[datetime] = None
    raw_payload: str = ""

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"source {self.source!r} not in {SOURCES}")
        if self.upd is not None and not isinstance(self.upd, date):
            raise ValueError("upd must be a date or None")

    def value(self, code: str):
        if code not in DIMENSION_CODES:
            raise KeyError(code)
        return getattr(self, code)


def normalize_record(record: AnnotationRecord) -> tuple[AnnotationRecord, list[str]]:
    """Enforce the global rules; one warning per forced field change.

    A record with ispol=false carries no obligations: the seven booleans
    are forced to false and the update date to NA. Idempotent and total.
    """
    warnings: list[str] = []
    if record.ispol:
        return record, warnings
    changes = {}
    for code in OBLIGATION_CODES:
        if getattr(record, code):
            changes[code] = False
            warnings.append(
                f"{record.doc_id}: {code}=true forced to false (not a policy)"
            )
    if record.upd is not None:
        changes["upd"] = None
        warnings.append(f"{record.doc_id}: upd forced to NA (not a policy)")
    if changes:
        record = dataclasses.replace(record, **changes)
    return record, warnings


_MONTHS = {}
for _i, _names in enumerate(
    [
        # de, en, fr, it full month names plus frequent unaccented variants
        ("januar", "january", "janvier", "gennaio"),
        ("februar", "february", "février", "fevrier", "febbraio"),
        ("märz", "maerz", "march", "mars", "marzo"),
        ("april", "avril", "aprile"),
        ("mai", "may", "maggio"),
        ("juni", "june", "juin", "giugno"),
        ("juli", "july", "juillet", "luglio"),
        ("august", "août", "aout", "agosto"),
        ("september", "septembre", "settembre"),
        ("oktober", "october", "octobre", "ottobre"),
        ("november", "novembre"),
        ("dezember", "december", "décembre", "decembre", "dicembre"),
    ],
    start=1,
):
    for _name in _names:
        _MONTHS[_name] = _i

_NUMERIC_DMY = re.compile(r"(\d{1,2})([/.])(\d{1,2})\2(\d{4})$")
_ISO_YMD = re.compile(r"(\d{4})-(\d{2})-(\d{2})$")
_DAY_MONTH_YEAR = re.compile(
    r"(\d{1,2})\.?\s+([^\W\d_]+)\.?\s+(\d{4})$", re.UNICODE
)


def parse_date_candidate(raw: str) -> Optional[date]:
    """Parse one date string; None when it does not parse.

    Accepted forms: DD/MM/YYYY, DD.MM.YYYY, YYYY-MM-DD, and "D Month YYYY"
    with month names in German, English, French, or Italian. Ambiguous
    numeric forms are read day-first; two-digit years are rejected.
    """
    candidate = raw.strip()
    match = _NUMERIC_DMY.fullmatch(candidate)
    if match:
        day, _, month, year = match.groups()
        return _safe_date(int(year), int(month), int(day))
    match = _ISO_YMD.fullmatch(candidate)
    if match:
        year, month, day = (int(g) for g in match.groups())
        return _safe_date(year, month, day)
    match = _DAY_MONTH_YEAR.fullmatch(candidate)
    if match:
        day_s, month_name, year_s = match.groups()
        month = _MONTHS.get(month_name.casefold())
        if month is None:
            return None
        return _safe_date(int(year_s), month, int(day_s))
    return None


def _safe_date(year: int, month: int, day: int) -> Optional[date]:
    try:
        return date(year, month, day)
    except ValueError:
        return None


def normalize_update_date(candidates: Sequence[str]) -> Optional[date]:
    """Latest valid date among the candidates; None (NA) when none parse.

    Permutation-invariant; equal dates reached through different textual
    forms count as one.
    """
    parsed = [d for d in (parse_date_candidate(c) for c in candidates) if d]
    return max(parsed) if parsed else None


def format_update_date(value: Optional[date]) -> str:
    """Render a parsed update date as DD/MM/YYYY, or the literal "NA"."""
    return value.strftime("%d/%m/%Y") if value else "NA"


# -- record serialization ------------------------------------------------------

def record_to_dict(record: AnnotationRecord) -> dict:
    """JSON-safe form; upd in display format, created_at in ISO 8601."""
    payload = dataclasses.asdict(record)
    payload["upd"] = format_update_date(record.upd)
    payload["created_at"] = (
        record.created_at.isoformat() if record.created_at else None
    )
    return payload


def record_from_dict(payload: dict) -> AnnotationRecord:
    upd = payload.get("upd", "NA")
    created_at = payload.get("created_at")
    return AnnotationRecord(
        doc_id=payload["doc_id"],
        source=payload["source"],
        backend_id=payload["backend_id"],
        ispol=bool(payload["ispol"]),
        upd=None if upd in (None, "NA") else datetime.strptime(upd, "%d/%m/%Y").date(),
        contr=bool(payload["contr"]),
        purp=bool(payload["purp"]),
        rect=bool(payload["rect"]),
        forg=bool(payload["forg"]),
        port=bool(payload["port"]),
        comp=bool(payload["comp"]),
        hum=bool(payload["hum"]),
        created_at=datetime.fromisoformat(created_at) if created_at else None,
        raw_payload=payload.get("raw_payload", ""),
    )


def write_annotations(records: Sequence[AnnotationRecord], path) -> None:
    """One JSON object per line, sorted by doc_id for stable artifacts."""
    ordered = sorted(records, key=lambda r: (r.doc_id, r.backend_id))
    with open(path, "w", encoding="utf-8") as handle:
        for record in ordered:
            handle.write(
                json.dumps(record_to_dict(record), sort_keys=True, ensure_ascii=False)
                + "\n"
            )


def read_annotations(path) -> list[AnnotationRecord]:
    records = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                records.append(record_from_dict(json.loads(line)))
    return records
