"""Nested dichotomies: multi-class classification by recursive binary
class splits, with random, class-balanced, centroid and random-pair
subset selection, ensemble wrappers, tree-space analysis, and a repeated
cross-validation harness with the corrected resampled t-test."""

from .data import (
    AttributeSpec,
    Dataset,
    FoldPlan,
    Instance,
    bootstrap_sample,
    parse_arff,
    parse_csv,
    serialize_arff,
    stratified_folds,
    train_test_split,
    weighted_resample,
)
from .dichotomy import NDNode, NestedDichotomy, build_nd, predict_class, predict_distribution
from .ensemble import (
    EnsembleModel,
    build_adaboost_ensemble,
    build_bagged_ensemble,
    build_multiboost_ensemble,
    build_random_ensemble,
    ensemble_predict,
)
from .evaluation import CVResult, TTestOutcome, corrected_t, format_results_table, run_cv
from .learners import (
    BinaryModel,
    CentroidModel,
    LogisticParams,
    TreeParams,
    centroid_confusion,
    fit_binary_model,
    fit_centroids,
    fit_logistic,
    fit_tree,
    predict_prob,
)
from .combinatorics import (
    SpaceCount,
    SplitCensus,
    count_balanced,
    count_full,
    enumerate_splits,
    estimate_random_pair_count,
    measure_subset_proportions,
    p_fit,
    space_table,
)
from .selection import (
    SplitDecision,
    SubsetSelector,
    select_centroid,
    select_class_balanced,
    select_random,
    select_random_pair,
)

__version__ = "0.1.0"
