"""Human-annotation import.

Accepts CSV (header: doc_id, coder_id, then the nine codebook codes) or a
JSON array of objects with the same keys. Each row becomes one normalized
record with the coder's identity preserved in backend_id, so agreement can
be computed per coder pair. Rows with missing fields are rejected into the
report; a duplicate (doc_id, coder_id) pair is a hard error. Ground-truth
corrections are applied only through an explicit patch file, never by
editing rows in place silently: every change lands in the report.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..codebook import (
    AnnotationRecord,
    DIMENSION_CODES,
    OBLIGATION_CODES,
    normalize_record,
    parse_date_candidate,
)
from ..errors import DataError

_REQUIRED = ("doc_id", "coder_id") + DIMENSION_CODES

_TRUE = {"true", "1", "yes", "y", "t"}
_FALSE = {"false", "0", "no", "n", "f"}


@dataclass
class ImportReport:
    accepted: int = 0
    rejected: list[tuple[int, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    patches_applied: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": [{"row": n, "message": m} for n, m in self.rejected],
            "warnings": list(self.warnings),
            "patches_applied": list(self.patches_applied),
        }


def _parse_bool(raw, context: str) -> bool:
    if isinstance(raw, bool):
        return raw
    token = str(raw).strip().casefold()
    if token in _TRUE:
        return True
    if token in _FALSE:
        return False
    raise ValueError(f"{context}: {raw!r} is not a boolean")


def _parse_upd(raw):
    if raw is None:
        return None
    token = str(raw).strip()
    if token == "" or token.upper() == "NA":
        return None
    parsed = parse_date_candidate(token)
    if parsed is None:
        raise ValueError(f"upd: {raw!r} is not a recognized date")
    return parsed


def _row_to_record(row: dict) -> AnnotationRecord:
    missing = [k for k in _REQUIRED if k not in row or row[k] is None or row[k] == ""]
    # upd may legitimately be empty (NA); everything else must be present.
    missing = [k for k in missing if k != "upd"]
    if missing:
        raise ValueError(f"missing fields: {', '.join(missing)}")
    return AnnotationRecord(
        doc_id=str(row["doc_id"]).strip(),
        source="human",
        backend_id=str(row["coder_id"]).strip(),
        ispol=_parse_bool(row["ispol"], "ispol"),
        upd=_parse_upd(row.get("upd")),
        created_at=None,
        raw_payload="",
        **{
            code: _parse_bool(row[code], code) for code in OBLIGATION_CODES
        },
    )


def _iter_rows(path: Path):
    if path.suffix.lower() == ".json":
        with open(path, encoding="utf-8") as handle:
            rows = json.load(handle)
        if not isinstance(rows, list):
            raise DataError(f"{path}: expected a JSON array of rows")
        yield from enumerate(rows, start=1)
        return
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        for n, row in enumerate(reader, start=1):
            yield n, row


def import_human(
    path, patch_path=None
) -> tuple[list[AnnotationRecord], ImportReport]:
    """Import human annotations; returns normalized records plus a report."""
    path = Path(path)
    report = ImportReport()
    records: list[AnnotationRecord] = []
    seen: set[tuple[str, str]] = set()
    for row_no, row in _iter_rows(path):
        try:
            record = _row_to_record(row)
        except (ValueError, TypeError) as exc:
            report.rejected.append((row_no, str(exc)))
            continue
        pair = (record.doc_id, record.backend_id)
        if pair in seen:
            raise DataError(
                f"{path}: duplicate (doc_id, coder_id) = {pair} at row {row_no}"
            )
        seen.add(pair)
        records.append(record)
    if patch_path is not None:
        records = _apply_patches(records, Path(patch_path), report)
    normalized = []
    for record in records:
        record, warnings = normalize_record(record)
        report.warnings.extend(warnings)
        normalized.append(record)
    report.accepted = len(normalized)
    return normalized, report


def _apply_patches(
    records: list[AnnotationRecord], patch_path: Path, report: ImportReport
) -> list[AnnotationRecord]:
    """Apply an explicit correction file: [{doc_id, coder_id, field, value}]."""
    with open(patch_path, encoding="utf-8") as handle:
        patches = json.load(handle)
    if not isinstance(patches, list):
        raise DataError(f"{patch_path}: expected a JSON array of patches")
    by_pair = {(r.doc_id, r.backend_id): r for r in records}
    for patch in patches:
        try:
            pair = (str(patch["doc_id"]), str(patch["coder_id"]))
            fieldname = patch["field"]
            value = patch["value"]
        except (KeyError, TypeError) as exc:
            raise DataError(f"{patch_path}: malformed patch entry: {exc}")
        if fieldname not in DIMENSION_CODES:
            raise DataError(f"{patch_path}: unknown field {fieldname!r}")
        if pair not in by_pair:
            raise DataError(f"{patch_path}: no record for {pair}")
        old = by_pair[pair]
        new_value = _parse_upd(value) if fieldname == "upd" else _parse_bool(
            value, fieldname
        )
        by_pair[pair] = dataclasses.replace(old, **{fieldname: new_value})
        report.patches_applied.append(
            f"{pair[0]}/{pair[1]}: {fieldname} {getattr(old, fieldname)!r} -> {new_value!r}"
        )
    return [by_pair[(r.doc_id, r.backend_id)] for r in records]
