"""Audit pipeline for privacy-policy corpora.

Ingest crawled policy snapshots, annotate them against a fixed nine-item
codebook (remote structured-output model, keyword baseline, or imported
human labels), assign websites to jurisdictional cohorts, run the
significance battery over obligation compliance, detect policy
generators, and render every result as CSV and Markdown. The `policyaudit`
command drives the same stages from the shell.
"""

from .annotators import (
    AnonymizedText,
    PromptBundle,
    RemoteBackend,
    RemoteConfig,
    ResponseCache,
    annotate_baseline,
    anonymize,
    build_prompt,
    build_response_schema,
    import_human,
)
from .codebook import (
    AnnotationRecord,
    Codebook,
    CodebookDimension,
    DIMENSION_CODES,
    OBLIGATION_CODES,
    format_update_date,
    normalize_record,
    normalize_update_date,
    parse_date_candidate,
    read_annotations,
    record_from_dict,
    record_to_dict,
    write_annotations,
)
from .cohort import (
    GroupLabel,
    MentionReport,
    SummaryRow,
    assign_group,
    assign_groups,
    detect_mentions,
    doc_group_map,
    doc_wave_map,
    is_top_website,
    load_term_dictionaries,
    summary_stats,
)
from .corpus import (
    Corpus,
    IngestReport,
    PolicyDocument,
    PolicySnapshot,
    WebsiteRecord,
    ingest_corpus,
    median_word_count,
    word_count,
    write_corpus,
)
from .embeddings import (
    EmbeddingBatch,
    EmbeddingClient,
    EmbeddingConfig,
    EmbeddingVector,
    cluster_cohesion,
    cosine_similarity,
    read_embeddings,
    similarity_matrix,
    truncate_text,
    write_embeddings,
)
from .errors import (
    BackendError,
    ConfigError,
    CorpusFormatError,
    DataError,
    DegenerateError,
    EmptySelectionError,
    PolicyAuditError,
    SchemaViolation,
    Timeout,
    TransportError,
)
from .evalmetrics import (
    ConfusionCounts,
    MetricCell,
    MetricReport,
    ReliabilityMatrix,
    build_metric_report,
    coincidence_matrix,
    confusion_counts,
    delta_f1,
    krippendorff_alpha,
    metrics_from_counts,
    prf1,
    reliability_matrix_from_records,
)
from .generators import (
    GeneratorMatchReport,
    GeneratorSpec,
    boilerplate_share,
    compliance_by_generator,
    compliance_by_use,
    detect_generators,
    load_generator_specs,
    match_generators,
    prevalence,
    propose_generator_candidates,
)
from .langid import detect_language
from .stats import (
    GROUP_ORDER,
    ObligationRow,
    ObligationTable,
    ProportionSample,
    TestResult,
    ZTestResult,
    bh_fdr,
    cohens_h,
    compliance_by_stratum,
    compliance_table,
    mde,
    normal_cdf,
    normal_quantile,
    two_prop_z,
)
from .tsne import Projection2D, conditional_probabilities, project_tsne

__version__ = "0.1.0"

__all__ = [
    "AnnotationRecord",
    "AnonymizedText",
    "BackendError",
    "Codebook",
    "CodebookDimension",
    "ConfigError",
    "ConfusionCounts",
    "Corpus",
    "CorpusFormatError",
    "DIMENSION_CODES",
    "DataError",
    "DegenerateError",
    "EmbeddingBatch",
    "EmbeddingClient",
    "EmbeddingConfig",
    "EmbeddingVector",
    "EmptySelectionError",
    "GROUP_ORDER",
    "GeneratorMatchReport",
    "GeneratorSpec",
    "GroupLabel",
    "IngestReport",
    "MentionReport",
    "MetricCell",
    "MetricReport",
    "OBLIGATION_CODES",
    "ObligationRow",
    "ObligationTable",
    "PolicyAuditError",
    "PolicyDocument",
    "PolicySnapshot",
    "Projection2D",
    "PromptBundle",
    "ProportionSample",
    "ReliabilityMatrix",
    "RemoteBackend",
    "RemoteConfig",
    "ResponseCache",
    "SchemaViolation",
    "SummaryRow",
    "TestResult",
    "Timeout",
    "TransportError",
    "WebsiteRecord",
    "ZTestResult",
    "annotate_baseline",
    "anonymize",
    "assign_group",
    "assign_groups",
    "bh_fdr",
    "boilerplate_share",
    "build_metric_report",
    "build_prompt",
    "build_response_schema",
    "cluster_cohesion",
    "cohens_h",
    "coincidence_matrix",
    "compliance_by_generator",
    "compliance_by_stratum",
    "compliance_by_use",
    "compliance_table",
    "conditional_probabilities",
    "confusion_counts",
    "cosine_similarity",
    "delta_f1",
    "detect_generators",
    "detect_language",
    "detect_mentions",
    "doc_group_map",
    "doc_wave_map",
    "format_update_date",
    "import_human",
    "ingest_corpus",
    "is_top_website",
    "krippendorff_alpha",
    "load_generator_specs",
    "load_term_dictionaries",
    "match_generators",
    "mde",
    "median_word_count",
    "metrics_from_counts",
    "normal_cdf",
    "normal_quantile",
    "normalize_record",
    "normalize_update_date",
    "parse_date_candidate",
    "prevalence",
    "prf1",
    "project_tsne",
    "propose_generator_candidates",
    "read_annotations",
    "read_embeddings",
    "record_from_dict",
    "record_to_dict",
    "reliability_matrix_from_records",
    "similarity_matrix",
    "summary_stats",
    "truncate_text",
    "two_prop_z",
    "word_count",
    "write_annotations",
    "write_corpus",
    "write_embeddings",
]
