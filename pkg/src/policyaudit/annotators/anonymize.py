"""Pattern-based identifier anonymization.

Replaces emails, phone numbers, URLs, and IBANs with fixed placeholders
before policy text leaves the machine. Pattern-based only, by design: the
matchers are conservative (false negatives over false positives) so that
dates (01/03/2023) and statute numbers (2016/679, SR 235.1) survive intact.
Placeholders contain no digits, "@", or scheme, so anonymization is
idempotent and never creates new matches.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

PLACEHOLDERS = {
    "URL": "[URL]",
    "EMAIL": "[EMAIL]",
    "IBAN": "[IBAN]",
    "PHONE": "[PHONE]",
}

_URL = re.compile(
    r"(?i)(?:https?://|www\.)[^\s<>\"']*[^\s<>\"'.,;:!?)\]}]"
)
_EMAIL = re.compile(
    r"\b[A-Za-z0-9][A-Za-z0-9._%+\-]*@[A-Za-z0-9.\-]+\.[A-Za-z]{2,}\b"
)
_IBAN = re.compile(
    r"(?<![A-Za-z0-9])[A-Z]{2}\d{2}(?:[ ]?[A-Za-z0-9]{4}){3,7}"
    r"(?:[ ]?[A-Za-z0-9]{1,3})?(?![A-Za-z0-9])"
)
# Phone forms: international (+41 44 123 45 67), area code with slash
# (044 / 123 45 67), grouped national (044 123 45 67, 0176-123-4567),
# and long national (0176 1234567). Candidates must additionally carry
# 7 to 15 digits in total, which is what keeps dates and law numbers out.
_PHONE = re.compile(
    r"(?<!\d)(?:"
    r"\+\d{1,3}(?:[ \-/]?\(0\))?(?:[ \-/]?\d){6,12}"
    r"|0\d{2,4}\s?/\s?\d(?:[ \-]?\d){4,10}"
    r"|0\d{2,4}(?:[ \-]\d{2,4}){2,4}"
    r"|0\d{2,4}[ \-]\d{5,8}"
    r")(?!\d)"
)

# Replacement order matters: URLs may embed emails or digit runs, so they
# go first; IBANs before phones so digit groups are not half-eaten.
_CLASS_ORDER = ("URL", "EMAIL", "IBAN", "PHONE")
_PATTERNS = {"URL": _URL, "EMAIL": _EMAIL, "IBAN": _IBAN, "PHONE": _PHONE}


@dataclass(frozen=True)
class AnonymizedText:
    text: str
    substitutions: tuple = field(default_factory=tuple)

    @property
    def count(self) -> int:
        return len(self.substitutions)


def _phone_plausible(candidate: str) -> bool:
    digits = sum(ch.isdigit() for ch in candidate)
    return 7 <= digits <= 15


def anonymize(text: str) -> AnonymizedText:
    """Replace identifier matches class-by-class; other text is untouched.

    Returns the rewritten text plus one (pattern_class, original_length,
    placeholder) triple per substitution.
    """
    substitutions = []

    def replace_class(current: str, cls: str) -> str:
        placeholder = PLACEHOLDERS[cls]

        def _sub(match: re.Match) -> str:
            span = match.group(0)
            if cls == "PHONE" and not _phone_plausible(span):
                return span
            substitutions.append((cls, len(span), placeholder))
            return placeholder

        return _PATTERNS[cls].sub(_sub, current)

    for cls in _CLASS_ORDER:
        text = replace_class(text, cls)
    return AnonymizedText(text=text, substitutions=tuple(substitutions))
