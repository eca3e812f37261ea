"""Temporal Poisson square root graphical models."""

from ._tpsqr import (
    CandidatePair,
    DesignProblem,
    EventRecord,
    FitResult,
    LedBenchmark,
    NumericalError,
    PathResult,
    PsqrModel,
    Template,
    Timespan,
    ValidationError,
    aggregate,
    aggregate_dataset,
    auc,
    build_design,
    build_graph_design,
    conditional_pmf,
    derive_seed,
    evaluate_candidate_pairs,
    fit,
    fit_path,
    generate_led_benchmark,
    gibbs_sample,
    lambda_max,
    log_partition,
    pair_index,
    random_sparse_model,
    score_pairs,
    select_aic_index,
    sparsistency_experiment,
    to_symmetric_theta,
    to_template,
    __version__,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
