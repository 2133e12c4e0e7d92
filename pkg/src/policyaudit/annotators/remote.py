"""Remote structured-output annotation backend.

Speaks the common chat-completions wire format: one POST per policy with
three messages (system, codebook, policy) and a strict JSON schema in
``response_format``. Replies are validated against the closed schema and
normalized before anything is returned. A content-addressed cache is
consulted first; per-key locks guarantee at most one in-flight request per
distinct (backend, schema, bundle) triple, and batch results are merged in
doc_id order regardless of completion order.
"""

from __future__ import annotations

import json
import os
import random
import socket
import time
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Optional

import jsonschema

from ..codebook import (
    AnnotationRecord,
    Codebook,
    OBLIGATION_CODES,
    normalize_record,
    parse_date_candidate,
)
from ..errors import BackendError, SchemaViolation, Timeout, TransportError
from .cache import KeyedLocks, ResponseCache, bundle_key
from .prompts import PromptBundle, build_prompt, build_response_schema


@dataclass
class RemoteConfig:
    endpoint: str
    model_id: str
    api_key_env: str = "POLICYAUDIT_API_KEY"
    cache_dir: str = ".annotation-cache"
    timeout: float = 60.0
    max_attempts: int = 3
    backoff_base: float = 0.5
    backoff_cap: float = 8.0
    jitter: float = 0.1
    parallelism: int = 4
    include_org: bool = False
    temperature: float = 0.0


@dataclass
class BatchResult:
    records: list[AnnotationRecord] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


class RemoteBackend:
    def __init__(
        self,
        config: RemoteConfig,
        codebook: Optional[Codebook] = None,
        cache: Optional[ResponseCache] = None,
    ):
        self.config = config
        self.codebook = codebook or Codebook.load()
        self.cache = cache or ResponseCache(config.cache_dir)
        self.schema = build_response_schema(include_org=config.include_org)
        self._validator = jsonschema.Draft202012Validator(self.schema)
        self._locks = KeyedLocks()
        self._rng = random.Random()

    # -- single document ---------------------------------------------------

    def annotate(self, policy) -> tuple[AnnotationRecord, list[str]]:
        """Annotate one policy; returns the normalized record plus warnings.

        The cache is consulted before any network call; on a hit no request
        is issued and the stored response is replayed byte-for-byte.
        """
        bundle = build_prompt(
            self.codebook, policy, include_org=self.config.include_org
        )
        key = bundle_key(self.config.model_id, bundle.schema_version, bundle)
        with self._locks.lock_for(key):
            entry = self.cache.get(key)
            if entry is None:
                content = self._request_with_retries(bundle)
                stored_at = datetime.now(timezone.utc).isoformat()
                entry = self.cache.put(key, content, stored_at)
        return self._record_from(policy.doc_id, entry.value, entry.stored_at)

    # -- batch -------------------------------------------------------------

    def annotate_many(self, policies: Iterable) -> BatchResult:
        """Annotate a batch with bounded parallelism.

        Failures are collected per document and the batch continues; records
        come back sorted by doc_id so output order never depends on thread
        scheduling.
        """
        policies = list(policies)
        result = BatchResult()
        with ThreadPoolExecutor(max_workers=self.config.parallelism) as pool:
            outcomes = pool.map(self._annotate_safe, policies)
            for policy, outcome in zip(policies, outcomes):
                if isinstance(outcome, BackendError):
                    result.failures.append(
                        {
                            "doc_id": policy.doc_id,
                            "error": type(outcome).__name__,
                            "message": str(outcome),
                        }
                    )
                else:
                    record, warnings = outcome
                    result.records.append(record)
                    result.warnings.extend(warnings)
        result.records.sort(key=lambda r: r.doc_id)
        result.failures.sort(key=lambda f: f["doc_id"])
        return result

    def _annotate_safe(self, policy):
        try:
            return self.annotate(policy)
        except BackendError as exc:
            return exc

    # -- transport ---------------------------------------------------------

    def _request_with_retries(self, bundle: PromptBundle) -> str:
        last_error: BackendError | None = None
        for attempt in range(1, self.config.max_attempts + 1):
            try:
                content = self._post(bundle)
                self._validate(content)
                return content
            except (TransportError, SchemaViolation) as exc:
                last_error = exc
            if attempt < self.config.max_attempts:
                time.sleep(self._backoff(attempt))
        assert last_error is not None
        raise last_error

    def _backoff(self, attempt: int) -> float:
        base = min(
            self.config.backoff_cap, self.config.backoff_base * 2 ** (attempt - 1)
        )
        return base * (1.0 + self.config.jitter * self._rng.random())

    def _post(self, bundle: PromptBundle) -> str:
        payload = {
            "model": self.config.model_id,
            "temperature": self.config.temperature,
            "messages": bundle.to_messages(),
            "response_format": {
                "type": "json_schema",
                "json_schema": {
                    "name": "policy_annotation",
                    "strict": True,
                    "schema": self.schema,
                },
            },
        }
        headers = {"Content-Type": "application/json"}
        api_key = self._api_key()
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        request = urllib.request.Request(
            self.config.endpoint,
            data=json.dumps(payload).encode("utf-8"),
            headers=headers,
            method="POST",
        )
        try:
            with urllib.request.urlopen(
                request, timeout=self.config.timeout
            ) as response:
                body = response.read().decode("utf-8")
        except (socket.timeout, TimeoutError) as exc:
            raise Timeout(f"no answer within {self.config.timeout}s") from exc
        except urllib.error.HTTPError as exc:
            raise TransportError(f"HTTP {exc.code}: {exc.reason}") from exc
        except urllib.error.URLError as exc:
            if isinstance(exc.reason, (socket.timeout, TimeoutError)):
                raise Timeout(f"no answer within {self.config.timeout}s") from exc
            raise TransportError(str(exc.reason)) from exc
        try:
            envelope = json.loads(body)
            return envelope["choices"][0]["message"]["content"]
        except (json.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed response envelope: {exc}") from exc

    def _api_key(self) -> str:
        return os.environ.get(self.config.api_key_env, "")

    # -- parsing -----------------------------------------------------------

    def _validate(self, content: str) -> None:
        try:
            parsed = json.loads(content)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"reply is not JSON: {exc}", payload=content)
        errors = sorted(self._validator.iter_errors(parsed), key=str)
        if errors:
            raise SchemaViolation(
                "; ".join(e.message for e in errors), payload=content
            )

    def _record_from(
        self, doc_id: str, content: str, stored_at: str
    ) -> tuple[AnnotationRecord, list[str]]:
        parsed = json.loads(content)
        upd_raw = parsed["upd"]
        # Calendar-impossible dates that slip past the format pattern are
        # treated as unparseable: NA, never a crash.
        upd = None if upd_raw == "NA" else parse_date_candidate(upd_raw)
        record = AnnotationRecord(
            doc_id=doc_id,
            source="remote_llm",
            backend_id=self.config.model_id,
            ispol=parsed["ispol"],
            upd=upd,
            created_at=datetime.fromisoformat(stored_at),
            raw_payload=content,
            **{code: parsed[code] for code in OBLIGATION_CODES},
        )
        return normalize_record(record)
