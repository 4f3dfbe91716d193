"""Influence decomposition of classifier inputs from output distributions.

Measures, in nats, how much of the variation in a classifier's output
distribution is attributable to the whole input, to each input element
(context vs question), and within an element to its meaning versus its
wording, together with the supporting measurements: temperature
calibration, reading-ease scoring, wording-probe question filtering,
embedding diversity, and analysis curves.
"""

from influx.analysis import (
    ConcordanceCurve,
    ConcordanceItem,
    CurvePoint,
    SweepCurve,
    concordance_curve,
    influence_sweep,
    items_from_dataset,
    normalized_ranks,
)
from influx.calibration import (
    CalibrationError,
    LogitRecord,
    Temperature,
    apply_temperature,
    fit_temperature,
    load_logits,
)
from influx.dataset import (
    Dataset,
    Distribution,
    Instance,
    Question,
    Realization,
    Task,
    ValidationError,
    build_dataset,
    build_instance,
    load_dataset,
    save_dataset,
    validate_distribution,
)
from influx.diversity import (
    DiversityResult,
    EmbeddingRecord,
    cosine_distance,
    linguistic_diversity,
    load_embeddings,
    semantic_diversity,
)
from influx.influence import (
    ConsistencyError,
    InfluenceReport,
    entropy,
    influence_report,
    mean_distribution,
    relative_influence,
)
from influx.questions import filter_questions, is_linguistic_question
from influx.readability import ReadabilityBreakdown, count_syllables, fres_score
from influx.synthetic import SyntheticSpec, exact_influence, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "CalibrationError",
    "ConcordanceCurve",
    "ConcordanceItem",
    "ConsistencyError",
    "CurvePoint",
    "Dataset",
    "Distribution",
    "DiversityResult",
    "EmbeddingRecord",
    "InfluenceReport",
    "Instance",
    "LogitRecord",
    "Question",
    "ReadabilityBreakdown",
    "Realization",
    "SweepCurve",
    "SyntheticSpec",
    "Task",
    "Temperature",
    "ValidationError",
    "apply_temperature",
    "build_dataset",
    "build_instance",
    "concordance_curve",
    "cosine_distance",
    "count_syllables",
    "entropy",
    "exact_influence",
    "filter_questions",
    "fit_temperature",
    "fres_score",
    "generate_synthetic",
    "influence_report",
    "influence_sweep",
    "is_linguistic_question",
    "items_from_dataset",
    "linguistic_diversity",
    "load_dataset",
    "load_embeddings",
    "load_logits",
    "mean_distribution",
    "normalized_ranks",
    "relative_influence",
    "save_dataset",
    "semantic_diversity",
    "validate_distribution",
]
