"""Prompt bundles and the response schema for the remote backend.

A bundle is one system message (global task and rules) plus two user
messages: the codebook rendered as questions with decision rules and
few-shot examples, and the anonymized policy text. Everything is generated
from the codebook JSON so identical inputs give byte-identical bundles.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..codebook import Codebook, DIMENSION_CODES
from ..errors import DataError
from .anonymize import anonymize

SCHEMA_VERSION = "1"
ORG_SCHEMA_VERSION = "1+org"

_SYSTEM_MESSAGE = """\
You are an annotator for a study of website privacy policies. You will \
receive a codebook with nine questions and then the text of one document. \
Answer every question for that document.

Rules:
- Respond with a single JSON object that conforms exactly to the provided \
schema. No explanations, no additional keys.
- Boolean questions: true only if the document itself clearly supports the \
answer; when in doubt, answer false.
- The date question (upd): report the most recent last-update or effective \
date stated in the document, formatted DD/MM/YYYY; answer "NA" when no \
such date is given.
- If the document is not a privacy policy (ispol=false), answer false to \
every other boolean question and "NA" for the date.
- The document may be in German, French, Italian, or English; judge it in \
its own language.\
"""

_ORG_RULE = """
- Additional question (org): if the document states that it was generated \
with the help of a tool, template, or service, report the name of that \
tool verbatim; otherwise report an empty string.\
"""


@dataclass(frozen=True)
class PromptBundle:
    system_message: str
    codebook_message: str
    policy_message: str
    schema_version: str

    def to_messages(self) -> list[dict]:
        """Render as one system plus two user messages (wire order)."""
        return [
            {"role": "system", "content": self.system_message},
            {"role": "user", "content": self.codebook_message},
            {"role": "user", "content": self.policy_message},
        ]


def build_response_schema(include_org: bool = False) -> dict:
    """Closed JSON schema: nine required fields, plus org in discovery mode."""
    properties = {}
    for code in DIMENSION_CODES:
        if code == "upd":
            properties[code] = {
                "type": "string",
                "pattern": r"^(\d{2}/\d{2}/\d{4}|NA)$",
            }
        else:
            properties[code] = {"type": "boolean"}
    required = list(DIMENSION_CODES)
    if include_org:
        properties["org"] = {"type": "string"}
        required.append("org")
    return {
        "type": "object",
        "properties": properties,
        "required": required,
        "additionalProperties": False,
    }


def render_codebook_message(codebook: Codebook, include_org: bool = False) -> str:
    """Render questions, decision rules, and few-shot examples from the JSON."""
    parts = ["Codebook. Answer each item for the document that follows.\n"]
    for i, dim in enumerate(codebook, start=1):
        kind = "date (DD/MM/YYYY or NA)" if dim.value_kind == "date" else "boolean"
        parts.append(f"{i}. {dim.code} ({kind}): {dim.question}")
        if dim.guidance:
            parts.append(f"   Rule: {dim.guidance}")
        if dim.positive_example:
            parts.append(f"   Example (answer true/date): {dim.positive_example!r}")
        if dim.negative_example:
            parts.append(f"   Example (answer false/NA): {dim.negative_example!r}")
        parts.append("")
    if include_org:
        parts.append(
            "10. org (string): Does the document state that it was generated "
            "with the help of a tool or template? Report the tool name "
            "verbatim, or an empty string."
        )
        parts.append("")
    return "\n".join(parts).rstrip() + "\n"


def build_prompt(
    codebook: Codebook,
    policy,
    include_org: bool = False,
    anonymizer=anonymize,
) -> PromptBundle:
    """Build the deterministic three-message bundle for one policy.

    The policy text is anonymized before leaving the machine; an empty
    text (before or after anonymization) is an error.
    """
    anonymized = anonymizer(policy.text)
    if not anonymized.text.strip():
        raise DataError(f"policy {policy.doc_id}: empty text, nothing to annotate")
    system_message = _SYSTEM_MESSAGE + (_ORG_RULE if include_org else "")
    return PromptBundle(
        system_message=system_message,
        codebook_message=render_codebook_message(codebook, include_org=include_org),
        policy_message=anonymized.text,
        schema_version=ORG_SCHEMA_VERSION if include_org else SCHEMA_VERSION,
    )
