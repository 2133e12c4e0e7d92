"""Shared exception types.

The hierarchy mirrors how failures are reported at the command line:
configuration problems, data problems, and backend/transport problems are
distinct so callers can map them to exit codes without string matching.
"""

from __future__ import annotations


class PolicyAuditError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(PolicyAuditError):
    """Invalid configuration, arguments, or file formats chosen by the caller."""


class DataError(PolicyAuditError):
    """Input data violates a documented contract."""


class CorpusFormatError(DataError):
    """Too many malformed lines to trust the ingest."""

    def __init__(self, message: str, errors: list | None = None):
        super().__init__(message)
        self.errors = errors or []


class EmptySelectionError(DataError):
    """A statistic was requested over an empty selection of documents."""


class DegenerateError(DataError):
    """The requested statistic is undefined on this data (e.g. no variance)."""


class BackendError(PolicyAuditError):
    """Base class for annotation/embedding backend failures."""


class TransportError(BackendError):
    """Network-level failure that persisted through retries."""


class Timeout(TransportError):
    """The backend did not answer within the configured deadline."""


class SchemaViolation(BackendError):
    """Backend reply did not validate against the expected schema.

    Carries the raw payload so callers can log or inspect it.
    """

    def __init__(self, message: str, payload: object = None):
        super().__init__(message)
        self.payload = payload
