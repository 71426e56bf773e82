"""Exact probabilistic abductive explanations for decision-tree classifiers."""

from .model import (
    DecisionTree,
    FeatureSpace,
    FeatureSpec,
    Instance,
    SchemaError,
    ValidationError,
    all_instances,
    load_tree,
    make_instance,
    parse_tree,
)
from .counting import (
    class_probability,
    conditional_precision,
    feature_factor,
    is_weak_paxp,
    parse_threshold,
    path_model_count,
    path_probability,
)
from .greedy import Explanation, compute_approx_paxp, compute_axp, is_deletion_minimal, order_features
from .minsolver import BackendError, compute_min_paxp, exists_weak_paxp_of_size, is_paxp

__version__ = "0.1.0"

__all__ = [
    "BackendError",
    "DecisionTree",
    "Explanation",
    "FeatureSpace",
    "FeatureSpec",
    "Instance",
    "SchemaError",
    "ValidationError",
    "all_instances",
    "class_probability",
    "compute_approx_paxp",
    "compute_axp",
    "compute_min_paxp",
    "conditional_precision",
    "exists_weak_paxp_of_size",
    "feature_factor",
    "is_deletion_minimal",
    "is_paxp",
    "is_weak_paxp",
    "load_tree",
    "make_instance",
    "order_features",
    "parse_threshold",
    "parse_tree",
    "path_model_count",
    "path_probability",
]
