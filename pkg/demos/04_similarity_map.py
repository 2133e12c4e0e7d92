"""Do policies from the same generator actually look alike?

Generator tools emit near-identical boilerplate, so their output should sit
closer together in embedding space than unrelated policies do. This demo
uses the deterministic hash-based pseudo embeddings (no API calls), checks
within-generator versus cross-pool cosine cohesion, and projects everything
to 2-D for plotting. The projection is exactly reproducible: same seed,
same coordinates, bit for bit.
"""

import random
from pathlib import Path

import numpy as np

from policyaudit import (
    EmbeddingVector,
    cluster_cohesion,
    project_tsne,
    similarity_matrix,
)
from policyaudit.synth import pseudo_embedding
from policyaudit.tsne import write_projection

ROOT = Path(__file__).resolve().parent / "output" / "similarity_map"

ERECHT24 = (
    "Erstellt mit dem Datenschutz-Generator von eRecht24. Verantwortlicher "
    "im Sinne der Verordnung ist die im Impressum genannte Stelle. "
)
SWISSANWALT = (
    "Diese Datenschutzerklärung wurde mit swissanwalt.ch generiert. Für die "
    "Bearbeitung von Personendaten gilt schweizerisches Recht. "
)
FILLERS = (
    "Wir betreiben einen Online-Shop für Gartenbedarf.",
    "Unsere Agentur gestaltet Webauftritte für Vereine.",
    "Der Blog dokumentiert Bergtouren in den Alpen.",
    "Die Praxis informiert über Sprechzeiten und Angebote.",
)


def build_vectors():
    """30 documents: two 10-strong generator families and 10 hand-written."""
    rng = random.Random(5)
    vectors, labels = [], {}
    for family, boilerplate in (("erecht24", ERECHT24), ("swissanwalt", SWISSANWALT)):
        for i in range(10):
            doc_id = f"{family}-{i:02d}"
            text = boilerplate + rng.choice(FILLERS)
            vectors.append(
                EmbeddingVector(doc_id, pseudo_embedding(text), "pseudo", 0)
            )
            labels[doc_id] = family
    for i in range(10):
        doc_id = f"hand-{i:02d}"
        text = " ".join(rng.sample(FILLERS, 3))
        vectors.append(EmbeddingVector(doc_id, pseudo_embedding(text), "pseudo", 0))
    return vectors, labels


def run():
    ROOT.mkdir(parents=True, exist_ok=True)
    vectors, labels = build_vectors()

    matrix = similarity_matrix(vectors)
    print(f"{len(vectors)} documents, cosine similarity range "
          f"[{matrix.min():.3f}, {matrix.max():.3f}]\n")

    print("## Within-generator vs cross-pool cohesion\n")
    for generator_id, stats in cluster_cohesion(vectors, labels).items():
        print(
            f"  {generator_id:12s} n={stats['n']:2d}  "
            f"intra={stats['intra']:.3f}  cross={stats['cross']:.3f}  "
            f"ratio={stats['ratio']:.2f}"
        )

    projection = project_tsne(vectors, perplexity=8.0, iterations=500, seed=42)
    again = project_tsne(vectors, perplexity=8.0, iterations=500, seed=42)
    assert np.array_equal(projection.coords, again.coords)
    print(f"\n2-D projection converged at KL {projection.final_kl:.4f} "
          f"(rerun is bit-identical)")

    csv_path = ROOT / "projection.csv"
    write_projection(projection, csv_path, labels=labels)
    print(f"coordinates written to {csv_path}")

    # a quick textual scatter: families should occupy separate corners
    coords = projection.coords
    for family in ("erecht24", "swissanwalt", None):
        member_ids = [
            i for i, doc_id in enumerate(projection.doc_ids)
            if labels.get(doc_id) == family
        ]
        center = coords[member_ids].mean(axis=0)
        name = family or "hand-written"
        print(f"  {name:12s} centroid at ({center[0]:+8.2f}, {center[1]:+8.2f})")


if __name__ == "__main__":
    run()
