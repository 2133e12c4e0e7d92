"""Deterministic keyword baseline annotator.

Case-insensitive substring rules per dimension, with terms in German,
English, French, and Italian. Deliberately weak: it exists to enable
offline tests and to serve as the comparison point for backend-to-backend
F1 differences, not to be accurate. The ispol rule gates everything else
through the standard normalization cascade.
"""

from __future__ import annotations

import json
import re

from ..codebook import AnnotationRecord, normalize_record, normalize_update_date

BACKEND_ID = "keyword-baseline-v1"

_KEYWORDS = {
    "ispol": (
        "datenschutzerklärung",
        "datenschutzrichtlinie",
        "personenbezogene daten",
        "privacy policy",
        "privacy notice",
        "personal data",
        "politique de confidentialité",
        "protection des données",
        "données personnelles",
        "informativa sulla privacy",
        "protezione dei dati",
        "dati personali",
    ),
    "contr": (
        "verantwortliche",
        "verantwortlicher",
        "data controller",
        "controller of",
        "responsable du traitement",
        "titolare del trattamento",
    ),
    "purp": (
        "zweck",
        "zwecke",
        "purpose",
        "purposes",
        "finalité",
        "finalités",
        "finalità",
    ),
    "rect": (
        "berichtigung",
        "auskunftsrecht",
        "recht auf auskunft",
        "rectification",
        "right of access",
        "right to access",
        "droit d'accès",
        "rettifica",
        "diritto di accesso",
    ),
    "forg": (
        "löschung",
        "recht auf vergessen",
        "erasure",
        "deletion of your",
        "right to be forgotten",
        "effacement",
        "droit à l'oubli",
        "cancellazione",
        "diritto all'oblio",
    ),
    "port": (
        "datenübertragbarkeit",
        "data portability",
        "portabilité",
        "portabilità",
    ),
    "comp": (
        "beschwerde",
        "aufsichtsbehörde",
        "lodge a complaint",
        "supervisory authority",
        "réclamation",
        "autorité de contrôle",
        "reclamo",
        "autorità di controllo",
    ),
    "hum": (
        "automatisierte entscheidung",
        "menschliches eingreifen",
        "automated decision",
        "human intervention",
        "human review",
        "décision automatisée",
        "intervention humaine",
        "decisione automatizzata",
        "intervento umano",
    ),
}

# Date mentions anywhere in the text, in the four accepted written forms.
_DATE_CANDIDATES = re.compile(
    r"\d{1,2}[/.]\d{1,2}[/.]\d{4}"
    r"|\d{4}-\d{2}-\d{2}"
    r"|\d{1,2}\.?\s+[^\W\d_]+\.?\s+\d{4}",
    re.UNICODE,
)


def annotate_baseline(policy) -> AnnotationRecord:
    """Annotate one policy with the keyword rules; pure and deterministic."""
    haystack = policy.text.casefold()
    hits = {
        code: [kw for kw in keywords if kw in haystack]
        for code, keywords in _KEYWORDS.items()
    }
    values = {code: bool(found) for code, found in hits.items()}
    upd = normalize_update_date(_DATE_CANDIDATES.findall(policy.text))
    raw_payload = json.dumps(
        {"hits": {k: v for k, v in sorted(hits.items()) if v}},
        sort_keys=True,
        ensure_ascii=False,
    )
    record = AnnotationRecord(
        doc_id=policy.doc_id,
        source="baseline",
        backend_id=BACKEND_ID,
        upd=upd,
        created_at=None,
        raw_payload=raw_payload,
        **values,
    )
    normalized, _ = normalize_record(record)
    return normalized
