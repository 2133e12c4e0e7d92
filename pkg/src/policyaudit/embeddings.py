"""Remote embedding client, cosine similarity, and cluster cohesion.

Requests carry at most the first 8 192 whitespace tokens of each document
(the service's own tokenizer is not available locally; the divergence is
deliberate and logged in the vector's ``truncated_to`` field). Responses
are cached on disk by content hash, so re-embedding an unchanged corpus
issues no network calls. Per-document failures are collected, not raised,
so one bad document never kills a batch.
"""

from __future__ import annotations

import hashlib
import json
import random
import socket
import time
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Mapping, Optional

import numpy as np

from .errors import BackendError, DataError, Timeout, TransportError
from .annotators.cache import KeyedLocks, ResponseCache

DEFAULT_TRUNCATE_TOKENS = 8192


@dataclass
class EmbeddingConfig:
    endpoint: str
    model_id: str
    api_key_env: str = "POLICYAUDIT_API_KEY"
    cache_dir: str = ".embedding-cache"
    timeout: float = 60.0
    max_attempts: int = 3
    backoff_base: float = 0.5
    backoff_cap: float = 8.0
    jitter: float = 0.1
    parallelism: int = 4
    truncate_tokens: int = DEFAULT_TRUNCATE_TOKENS


@dataclass
class EmbeddingVector:
    doc_id: str
    values: np.ndarray
    model_id: str
    truncated_to: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(values)):
            raise ValueError(f"{self.doc_id}: embedding has non-finite entries")
        self.values = values


@dataclass
class EmbeddingBatch:
    vectors: list = field(default_factory=list)
    failures: list = field(default_factory=list)


def truncate_text(text: str, limit: int = DEFAULT_TRUNCATE_TOKENS) -> tuple[str, int]:
    """First ``limit`` whitespace tokens; text within the limit is untouched."""
    tokens = text.split()
    if len(tokens) <= limit:
        return text, len(tokens)
    return " ".join(tokens[:limit]), limit


class EmbeddingClient:
    def __init__(self, config: EmbeddingConfig, cache: Optional[ResponseCache] = None):
        self.config = config
        self.cache = cache or ResponseCache(config.cache_dir)
        self._locks = KeyedLocks()
        self._rng = random.Random()

    def _key(self, payload_text: str) -> str:
        digest = hashlib.sha256()
        digest.update(self.config.model_id.encode("utf-8"))
        digest.update(b"\x00")
        digest.update(payload_text.encode("utf-8"))
        return digest.hexdigest()

    def embed(self, doc) -> EmbeddingVector:
        """Embed one document; cached by (model, truncated text) content hash."""
        if not doc.text.strip():
            raise DataError(f"{doc.doc_id}: empty text, nothing to embed")
        payload_text, token_count = truncate_text(
            doc.text, self.config.truncate_tokens
        )
        key = self._key(payload_text)
        with self._locks.lock_for(key):
            entry = self.cache.get(key)
            if entry is None:
                raw = self._request_with_retries(payload_text)
                stored_at = datetime.now(timezone.utc).isoformat()
                entry = self.cache.put(key, raw, stored_at)
        values = np.asarray(json.loads(entry.value), dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise TransportError(f"{doc.doc_id}: malformed embedding payload")
        try:
            return EmbeddingVector(
                doc_id=doc.doc_id,
                values=values,
                model_id=self.config.model_id,
                truncated_to=token_count,
            )
        except ValueError as exc:
            raise TransportError(str(exc))

    def embed_many(self, docs: Iterable) -> EmbeddingBatch:
        """Embed a batch; failures collected per doc, vectors in doc_id order."""
        docs = list(docs)
        batch = EmbeddingBatch()
        with ThreadPoolExecutor(max_workers=self.config.parallelism) as pool:
            outcomes = pool.map(self._embed_safe, docs)
            for doc, outcome in zip(docs, outcomes):
                if isinstance(outcome, Exception):
                    batch.failures.append(
                        {
                            "doc_id": doc.doc_id,
                            "error": type(outcome).__name__,
                            "message": str(outcome),
                        }
                    )
                else:
                    batch.vectors.append(outcome)
        batch.vectors.sort(key=lambda v: v.doc_id)
        batch.failures.sort(key=lambda f: f["doc_id"])
        dims = {v.values.size for v in batch.vectors}
        if len(dims) > 1:
            raise DataError(f"inconsistent embedding dimensions in one run: {dims}")
        return batch

    def _embed_safe(self, doc):
        try:
            return self.embed(doc)
        except (BackendError, DataError) as exc:
            return exc

    def _request_with_retries(self, payload_text: str) -> str:
        last_error = None
        for attempt in range(1, self.config.max_attempts + 1):
            try:
                return self._post(payload_text)
            except TransportError as exc:
                last_error = exc
            if attempt < self.config.max_attempts:
                base = min(
                    self.config.backoff_cap,
                    self.config.backoff_base * 2 ** (attempt - 1),
                )
                time.sleep(base * (1.0 + self.config.jitter * self._rng.random()))
        assert last_error is not None
        raise last_error

    def _post(self, payload_text: str) -> str:
        import os

        body = {"model": self.config.model_id, "input": payload_text}
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.config.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        request = urllib.request.Request(
            self.config.endpoint,
            data=json.dumps(body).encode("utf-8"),
            headers=headers,
            method="POST",
        )
        try:
            with urllib.request.urlopen(
                request, timeout=self.config.timeout
            ) as response:
                raw = response.read().decode("utf-8")
        except (socket.timeout, TimeoutError) as exc:
            raise Timeout(f"no answer within {self.config.timeout}s") from exc
        except urllib.error.HTTPError as exc:
            raise TransportError(f"HTTP {exc.code}: {exc.reason}") from exc
        except urllib.error.URLError as exc:
            raise TransportError(str(exc.reason)) from exc
        try:
            envelope = json.loads(raw)
            vector = envelope["data"][0]["embedding"]
        except (json.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed embedding envelope: {exc}") from exc
        return json.dumps(vector)


# -- similarity ----------------------------------------------------------------

def _as_array(vector) -> np.ndarray:
    values = vector.values if isinstance(vector, EmbeddingVector) else vector
    return np.asarray(values, dtype=np.float64)


def cosine_similarity(a, b) -> float:
    """dot(a, b) / (|a| |b|); zero vectors and dimension mismatches are errors."""
    va, vb = _as_array(a), _as_array(b)
    if va.shape != vb.shape:
        raise DataError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    norm_a, norm_b = np.linalg.norm(va), np.linalg.norm(vb)
    if norm_a == 0.0 or norm_b == 0.0:
        raise DataError("cosine similarity undefined for a zero vector")
    return float(np.dot(va, vb) / (norm_a * norm_b))


def similarity_matrix(vectors) -> np.ndarray:
    """NxN cosine similarities (unit-normalized rows, clipped to [-1, 1])."""
    matrix = np.stack([_as_array(v) for v in vectors])
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0.0):
        raise DataError("cosine similarity undefined for a zero vector")
    unit = matrix / norms[:, None]
    sims = unit @ unit.T
    return np.clip(sims, -1.0, 1.0)


# -- cluster cohesion ------------------------------------------------------------

def cluster_cohesion(
    vectors: Iterable[EmbeddingVector],
    labels: Mapping[str, Optional[str]],
) -> dict:
    """Per generator: mean intra-similarity, mean similarity to unlabeled
    documents, and their ratio (ratio > 1 indicates clustering).

    Generators with fewer than two documents are suppressed. Documents whose
    label is missing or None form the unlabeled comparison pool.
    """
    vectors = sorted(vectors, key=lambda v: v.doc_id)
    sims = similarity_matrix(vectors)
    index_by_label: dict = {}
    unlabeled = []
    for idx, vector in enumerate(vectors):
        label = labels.get(vector.doc_id)
        if label is None:
            unlabeled.append(idx)
        else:
            index_by_label.setdefault(label, []).append(idx)
    if not unlabeled:
        raise DataError("no unlabeled documents to compare against")
    results = {}
    for label in sorted(index_by_label):
        members = index_by_label[label]
        if len(members) < 2:
            continue
        intra = [sims[i, j] for i in members for j in members if i < j]
        cross = [sims[i, j] for i in members for j in unlabeled]
        mean_intra = float(np.mean(intra))
        mean_cross = float(np.mean(cross))
        results[label] = {
            "n": len(members),
            "intra": mean_intra,
            "cross": mean_cross,
            "ratio": mean_intra / mean_cross if mean_cross != 0.0 else float("inf"),
        }
    return results


# -- persistence ------------------------------------------------------------------

def write_embeddings(vectors: Iterable[EmbeddingVector], path) -> None:
    """JSON-lines: {doc_id, model_id, truncated_to, values}."""
    with open(path, "w", encoding="utf-8") as handle:
        for vector in vectors:
            handle.write(
                json.dumps(
                    {
                        "doc_id": vector.doc_id,
                        "model_id": vector.model_id,
                        "truncated_to": vector.truncated_to,
                        "values": [float(x) for x in vector.values],
                    }
                )
                + "\n"
            )


def read_embeddings(path) -> list[EmbeddingVector]:
    vectors = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            record = json.loads(line)
            vectors.append(
                EmbeddingVector(
                    doc_id=record["doc_id"],
                    values=np.asarray(record["values"], dtype=np.float64),
                    model_id=record["model_id"],
                    truncated_to=record["truncated_to"],
                )
            )
    return vectors
