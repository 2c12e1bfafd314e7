"""Generative-tree data augmentation for causal effect estimation.

The package pairs a small causal-inference toolkit (regression trees,
Gaussian mixtures, classic effect estimators, evaluation metrics,
synthetic generators) with the augmentation pipeline that ties them
together and a replicated benchmark CLI.
"""

from .augment import (
    AugmentationPlan,
    AugmentedDataset,
    augment,
    default_plan,
    generated_fraction_by_region,
)
from .benchmark import BenchmarkResult, RunConfig, emit_table, run_benchmark, write_outputs
from .datagen import GeneratorSpec, generate
from .dataset import (
    CsvSchema,
    Dataset,
    DatasetSplit,
    OutcomeKind,
    load_csv,
    save_csv,
    split_by_treatment,
    train_test_split,
)
from .estimators import (
    EffectEstimate,
    RegressorSpec,
    compute_metric,
    dml,
    evaluate,
    fit_kernel_ridge,
    fit_lasso,
    fit_predict_ite,
    fit_propensity,
    fit_ridge,
    parse_estimator,
    s_learner,
    t_learner,
    x_learner,
)
from .gmm import GmmModel, bic, fit_em, sample, select_components
from .metrics import aggregate, ate_error, att_error, pehe, policy_risk, relative_delta
from .trees import (
    ForestModel,
    LeafPartition,
    TreeModel,
    assign_leaves,
    export_rules,
    fit_extra_trees,
    fit_tree,
    predict_tree,
    prune_cost_complexity,
    rule_count,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentationPlan",
    "AugmentedDataset",
    "BenchmarkResult",
    "CsvSchema",
    "Dataset",
    "DatasetSplit",
    "EffectEstimate",
    "ForestModel",
    "GeneratorSpec",
    "GmmModel",
    "LeafPartition",
    "OutcomeKind",
    "RegressorSpec",
    "RunConfig",
    "TreeModel",
    "__version__",
    "aggregate",
    "assign_leaves",
    "ate_error",
    "att_error",
    "augment",
    "bic",
    "compute_metric",
    "default_plan",
    "dml",
    "emit_table",
    "evaluate",
    "export_rules",
    "fit_em",
    "fit_extra_trees",
    "fit_kernel_ridge",
    "fit_lasso",
    "fit_predict_ite",
    "fit_propensity",
    "fit_ridge",
    "fit_tree",
    "generate",
    "generated_fraction_by_region",
    "load_csv",
    "parse_estimator",
    "pehe",
    "policy_risk",
    "predict_tree",
    "prune_cost_complexity",
    "relative_delta",
    "rule_count",
    "run_benchmark",
    "s_learner",
    "sample",
    "save_csv",
    "select_components",
    "split_by_treatment",
    "t_learner",
    "train_test_split",
    "write_outputs",
    "x_learner",
]
