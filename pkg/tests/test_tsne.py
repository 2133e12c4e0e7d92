"""2-D projection: bandwidth calibration, optimizer invariants, CSV export."""

import csv

import numpy as np
import pytest
from sklearn.metrics import silhouette_score

from policyaudit import DataError, EmbeddingVector, Projection2D, project_tsne
from policyaudit.tsne import (
    _joint_probabilities,
    conditional_probabilities,
    write_projection,
)


def two_blobs(n=100, dim=8, seed=11, spread=0.05):
    """n/2 points around each of two orthogonal centers; labels 0/1."""
    rng = np.random.default_rng(seed)
    half = n // 2
    centers = np.zeros((2, dim))
    centers[0, 0] = 1.0
    centers[1, 1] = 1.0
    points = np.concatenate(
        [
            centers[0] + rng.normal(0.0, spread, size=(half, dim)),
            centers[1] + rng.normal(0.0, spread, size=(n - half, dim)),
        ]
    )
    labels = np.array([0] * half + [1] * (n - half))
    vectors = [
        EmbeddingVector(f"doc-{i:03d}", points[i], "fixture", 1) for i in range(n)
    ]
    return vectors, labels


def random_distances(n=30, seed=5):
    rng = np.random.default_rng(seed)
    points = rng.normal(size=(n, 4))
    sq = np.sum(points**2, axis=1)
    distances = sq[:, None] + sq[None, :] - 2.0 * points @ points.T
    distances = np.maximum(distances, 0.0)
    np.fill_diagonal(distances, 0.0)
    return distances


class TestBandwidthCalibration:
    def test_row_entropy_hits_target(self):
        distances = random_distances()
        perplexity = 7.5
        conditional, betas = conditional_probabilities(distances, perplexity)
        target = np.log2(perplexity)
        for row in conditional:
            nonzero = row[row > 0.0]
            entropy = -np.sum(nonzero * np.log2(nonzero))
            assert entropy == pytest.approx(target, abs=1e-6)
        assert np.all(betas > 0.0)

    def test_rows_are_probability_distributions(self):
        distances = random_distances(n=20, seed=9)
        conditional, _ = conditional_probabilities(distances, 5.0)
        assert np.allclose(conditional.sum(axis=1), 1.0)
        assert np.allclose(np.diag(conditional), 0.0)
        assert np.all(conditional >= 0.0)

    def test_equidistant_points_get_equal_bandwidths(self):
        n = 9
        distances = np.ones((n, n)) - np.eye(n)
        # uniform rows carry log2(n-1) bits for any bandwidth
        conditional, betas = conditional_probabilities(distances, float(n - 1))
        assert np.allclose(betas, betas[0])
        off_diag = conditional[0][1:]
        assert np.allclose(off_diag, 1.0 / (n - 1))

    def test_nearer_points_get_more_mass(self):
        distances = random_distances(n=12, seed=2)
        conditional, _ = conditional_probabilities(distances, 4.0)
        i = 0
        order = np.argsort(distances[i])
        nearest, farthest = order[1], order[-1]
        assert conditional[i, nearest] > conditional[i, farthest]

    def test_joint_distribution_sums_to_one(self):
        distances = random_distances(n=15, seed=4)
        joint = _joint_probabilities(distances, 4.0)
        assert joint.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(joint, joint.T)
        assert np.all(joint >= 0.0)


class TestProjection:
    def test_two_blob_fixture_separates(self):
        vectors, labels = two_blobs()
        projection = project_tsne(vectors, perplexity=15.0, iterations=500, seed=3)
        score = silhouette_score(projection.coords, labels)
        assert score > 0.5

    def test_same_seed_is_bit_identical(self):
        vectors, _ = two_blobs(n=40)
        a = project_tsne(vectors, perplexity=8.0, iterations=200, seed=7)
        b = project_tsne(vectors, perplexity=8.0, iterations=200, seed=7)
        assert a.doc_ids == b.doc_ids
        assert np.array_equal(a.coords, b.coords)
        assert a.final_kl == b.final_kl

    def test_input_order_does_not_matter(self):
        vectors, _ = two_blobs(n=40)
        rng = np.random.default_rng(1)
        shuffled = list(vectors)
        rng.shuffle(shuffled)
        a = project_tsne(vectors, perplexity=8.0, iterations=200, seed=7)
        b = project_tsne(shuffled, perplexity=8.0, iterations=200, seed=7)
        assert a.doc_ids == b.doc_ids
        assert np.array_equal(a.coords, b.coords)

    def test_different_seeds_differ(self):
        vectors, _ = two_blobs(n=40)
        a = project_tsne(vectors, perplexity=8.0, iterations=150, seed=0)
        b = project_tsne(vectors, perplexity=8.0, iterations=150, seed=1)
        assert not np.array_equal(a.coords, b.coords)

    def test_optimizer_does_not_regress(self):
        vectors, _ = two_blobs(n=60)
        projection = project_tsne(vectors, perplexity=10.0, iterations=400, seed=5)
        assert projection.final_kl >= 0.0
        assert projection.exaggeration_kl >= 0.0
        assert projection.final_kl <= projection.exaggeration_kl

    def test_doc_ids_sorted_and_coords_centered(self):
        vectors, _ = two_blobs(n=40)
        projection = project_tsne(vectors, perplexity=8.0, iterations=100, seed=2)
        assert list(projection.doc_ids) == sorted(projection.doc_ids)
        assert np.allclose(projection.coords.mean(axis=0), 0.0, atol=1e-9)


class TestPreconditions:
    def _vectors(self, n):
        rng = np.random.default_rng(0)
        return [
            EmbeddingVector(f"d{i}", rng.normal(size=4) + 2.0, "m", 1)
            for i in range(n)
        ]

    def test_too_few_documents(self):
        with pytest.raises(DataError):
            project_tsne(self._vectors(3), perplexity=2.0)

    def test_perplexity_must_exceed_one(self):
        with pytest.raises(DataError):
            project_tsne(self._vectors(20), perplexity=1.0)

    def test_perplexity_too_large_for_corpus(self):
        with pytest.raises(DataError):
            project_tsne(self._vectors(10), perplexity=3.0)  # limit is (10-1)/3

    def test_iterations_must_be_positive(self):
        with pytest.raises(DataError):
            project_tsne(self._vectors(20), perplexity=4.0, iterations=0)

    def test_result_shape_validated(self):
        with pytest.raises(ValueError):
            Projection2D(
                doc_ids=("a", "b"), coords=np.zeros((3, 2)), seed=0,
                perplexity=2.0, iterations=1, exaggeration_kl=0.0, final_kl=0.0,
            )

    def test_negative_kl_rejected(self):
        with pytest.raises(ValueError):
            Projection2D(
                doc_ids=("a",), coords=np.zeros((1, 2)), seed=0,
                perplexity=2.0, iterations=1, exaggeration_kl=0.0, final_kl=-0.1,
            )


class TestExport:
    def test_projection_csv_round_trips(self, tmp_path):
        vectors, _ = two_blobs(n=20)
        projection = project_tsne(vectors, perplexity=4.0, iterations=100, seed=9)
        path = tmp_path / "projection.csv"
        labels = {"doc-000": "erecht24", "doc-003": None}
        write_projection(projection, path, labels)
        with open(path, encoding="utf-8", newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["doc_id", "x", "y", "label"]
        assert len(rows) == 21
        by_id = {row[0]: row for row in rows[1:]}
        assert by_id["doc-000"][3] == "erecht24"
        assert by_id["doc-003"][3] == ""  # None and absent both blank
        assert by_id["doc-010"][3] == ""
        for doc_id, (x, y) in zip(projection.doc_ids, projection.coords):
            assert float(by_id[doc_id][1]) == x
            assert float(by_id[doc_id][2]) == y

    def test_unix_line_endings(self, tmp_path):
        vectors, _ = two_blobs(n=20)
        projection = project_tsne(vectors, perplexity=4.0, iterations=50, seed=9)
        path = tmp_path / "projection.csv"
        write_projection(projection, path)
        raw = path.read_bytes()
        assert b"\r" not in raw
