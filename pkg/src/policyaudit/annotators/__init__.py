"""Annotation backends: remote structured-output client, keyword baseline,
and human-annotation import, plus shared anonymization and caching."""

from .anonymize import AnonymizedText, anonymize
from .baseline import annotate_baseline
from .cache import ResponseCache
from .human import import_human
from .prompts import PromptBundle, build_prompt, build_response_schema
from .remote import RemoteBackend, RemoteConfig

__all__ = [
    "AnonymizedText",
    "anonymize",
    "annotate_baseline",
    "ResponseCache",
    "import_human",
    "PromptBundle",
    "build_prompt",
    "build_response_schema",
    "RemoteBackend",
    "RemoteConfig",
]
