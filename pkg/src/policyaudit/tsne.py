"""Exact t-SNE over cosine distances, sized for corpus-scale batches.

This is the classic O(N^2) formulation: no Barnes-Hut tree, no PCA
initialization, no approximations that would make runs harder to reason
about. Determinism matters more than speed here; all randomness flows
from a single seed, and documents are processed in doc_id order so the
projection is invariant to input permutation (same seed, same points,
same layout regardless of arrival order).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .embeddings import similarity_matrix

EARLY_EXAGGERATION = 12.0
EXAGGERATION_ITERS = 250
INITIAL_MOMENTUM = 0.5
FINAL_MOMENTUM = 0.8
_EPS = 1e-12


@dataclass(frozen=True)
class Projection2D:
    doc_ids: tuple
    coords: np.ndarray
    seed: int
    perplexity: float
    iterations: int
    exaggeration_kl: float
    final_kl: float

    def __post_init__(self):
        if self.coords.shape != (len(self.doc_ids), 2):
            raise ValueError("coords must be (N, 2)")
        if not np.all(np.isfinite(self.coords)):
            raise ValueError("projection diverged to non-finite coordinates")
        if self.final_kl < 0.0 or self.exaggeration_kl < 0.0:
            raise ValueError("KL divergence cannot be negative")


def _entropy_bits(p: np.ndarray) -> float:
    nonzero = p[p > 0.0]
    return float(-np.sum(nonzero * np.log2(nonzero)))


def conditional_probabilities(
    distances: np.ndarray, perplexity: float, tol: float = 1e-6, max_iter: int = 200
) -> tuple[np.ndarray, np.ndarray]:
    """Per-point Gaussian bandwidths tuned so each row's Shannon entropy
    equals log2(perplexity) bits to within ``tol``.

    Returns (P_conditional, betas) where beta = 1 / (2 sigma^2).
    """
    n = distances.shape[0]
    target = np.log2(perplexity)
    conditional = np.zeros((n, n))
    betas = np.ones(n)
    for i in range(n):
        beta, beta_min, beta_max = 1.0, 0.0, np.inf
        row = distances[i]
        for _ in range(max_iter):
            weights = np.exp(-row * beta)
            weights[i] = 0.0
            total = weights.sum()
            if total <= 0.0:
                # Bandwidth collapsed below float range; widen and retry.
                beta_max = beta
                beta = beta / 2.0 if beta_min == 0.0 else (beta + beta_min) / 2.0
                continue
            p = weights / total
            entropy = _entropy_bits(p)
            if abs(entropy - target) <= tol:
                break
            if entropy > target:
                # Distribution too flat: narrow the kernel.
                beta_min = beta
                beta = beta * 2.0 if beta_max == np.inf else (beta + beta_max) / 2.0
            else:
                beta_max = beta
                beta = beta / 2.0 if beta_min == 0.0 else (beta + beta_min) / 2.0
        conditional[i] = p
        betas[i] = beta
    return conditional, betas


def _joint_probabilities(distances: np.ndarray, perplexity: float) -> np.ndarray:
    conditional, _ = conditional_probabilities(distances, perplexity)
    n = distances.shape[0]
    joint = (conditional + conditional.T) / (2.0 * n)
    return np.maximum(joint, 0.0)


def _student_t(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sq = np.sum(coords**2, axis=1)
    sq_dist = sq[:, None] + sq[None, :] - 2.0 * coords @ coords.T
    num = 1.0 / (1.0 + np.maximum(sq_dist, 0.0))
    np.fill_diagonal(num, 0.0)
    q = num / max(num.sum(), _EPS)
    return np.maximum(q, _EPS), num


def _kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0.0
    return max(float(np.sum(p[mask] * np.log(p[mask] / q[mask]))), 0.0)


def project_tsne(
    vectors,
    perplexity: float = 30.0,
    iterations: int = 1000,
    seed: int = 0,
    learning_rate: float | None = None,
) -> Projection2D:
    """Project embeddings to 2-D.

    pre: at least 4 documents, perplexity < (N - 1) / 3.
    post: exaggeration_kl is measured against the plain (unexaggerated) P
    at the end of the early-exaggeration phase, final_kl at the last
    iteration; on any fixture the optimizer must not make things worse,
    so final_kl <= exaggeration_kl.
    """
    vectors = sorted(vectors, key=lambda v: v.doc_id)
    n = len(vectors)
    if n < 4:
        raise DataError(f"need at least 4 documents to project, got {n}")
    if perplexity <= 1.0:
        raise DataError("perplexity must exceed 1")
    if perplexity >= (n - 1) / 3.0:
        raise DataError(
            f"perplexity {perplexity} too large for {n} documents "
            f"(must be below {(n - 1) / 3.0:.2f})"
        )
    if iterations < 1:
        raise DataError("iterations must be positive")

    doc_ids = tuple(v.doc_id for v in vectors)
    distances = 1.0 - similarity_matrix(vectors)
    np.fill_diagonal(distances, 0.0)
    distances = np.maximum(distances, 0.0)

    joint = _joint_probabilities(distances, perplexity)
    exaggeration_end = min(EXAGGERATION_ITERS, iterations)
    lr = learning_rate if learning_rate is not None else n / EARLY_EXAGGERATION

    rng = np.random.default_rng(seed)
    coords = rng.normal(0.0, 1e-4, size=(n, 2))
    velocity = np.zeros((n, 2))
    gains = np.ones((n, 2))
    exaggeration_kl = np.nan

    for step in range(iterations):
        exaggerating = step < exaggeration_end
        p_step = joint * EARLY_EXAGGERATION if exaggerating else joint
        q, num = _student_t(coords)
        pq = (p_step - q) * num
        grad = 4.0 * (np.sum(pq, axis=1)[:, None] * coords - pq @ coords)

        momentum = INITIAL_MOMENTUM if exaggerating else FINAL_MOMENTUM
        same_sign = np.sign(grad) == np.sign(velocity)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        gains = np.maximum(gains, 0.01)
        velocity = momentum * velocity - lr * gains * grad
        coords = coords + velocity
        coords = coords - coords.mean(axis=0)

        if step == exaggeration_end - 1:
            q_check, _ = _student_t(coords)
            exaggeration_kl = _kl_divergence(joint, q_check)

    q_final, _ = _student_t(coords)
    final_kl = _kl_divergence(joint, q_final)
    if np.isnan(exaggeration_kl):
        exaggeration_kl = final_kl

    return Projection2D(
        doc_ids=doc_ids,
        coords=coords,
        seed=seed,
        perplexity=perplexity,
        iterations=iterations,
        exaggeration_kl=float(exaggeration_kl),
        final_kl=float(final_kl),
    )


def write_projection(projection: Projection2D, path, labels=None) -> None:
    """CSV: doc_id,x,y,label with full float precision (repr round-trip).

    ``labels`` maps doc_id to a generator id (or None); missing or None
    labels are written as an empty field.
    """
    import csv

    labels = labels or {}
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["doc_id", "x", "y", "label"])
        for doc_id, (x, y) in zip(projection.doc_ids, projection.coords):
            label = labels.get(doc_id) or ""
            writer.writerow([doc_id, repr(float(x)), repr(float(y)), label])
