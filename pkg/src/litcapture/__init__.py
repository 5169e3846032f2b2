"""Capture-recapture estimates of literature size, search coverage with
stopping rules, and similarity of truncated rankings."""

__version__ = "0.1.0"

from .coverage import (
    CoverageAnalyzer, CoverageSeries, KeywordClass, KeywordType, StoppingPoint,
    build_series, classify_keyword, information_gain, stopping_points,
)
from .estimators import (
    CaptureRecaptureEstimator, CaptureSample, PopulationEstimate,
    petersen_estimate, samples_from_capture_sets, schnabel_estimate,
)
from .graphsim import (
    ChurnConfig, ChurnExperiment, ExperimentRecord, Graph, ba_generate, churn_step,
    eigenvector_centrality, run_experiment, top_k_ranking,
)
from .ranksim import (
    RankingSimilarity, TruncatedRanking, kendall_tau_truncated, normalized_overlap,
    overlap_curve, pearson, similarity_s,
)
from .records import (
    ArticleRecord, DedupKey, RankedList, dedup_prefix, normalize_key, parse_export, write_csv,
)
