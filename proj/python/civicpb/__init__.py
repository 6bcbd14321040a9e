"""Participatory budgeting survey analysis: legitimacy, relocation and quality-of-life models."""

import json as _json

from . import _civicpb as _core
from ._civicpb import (
    ComputeError,
    ConfigError,
    DataError,
    SchemaConfig,
    SurveyDataset,
    TrainedModel,
    __version__,
    build_features,
    knee_index,
    legitimacy,
    merge_qol_classes,
    perceived_quality_improvement,
    proposal_counts,
    relative_quality_improvement,
    smote,
)

__all__ = [
    "ComputeError",
    "ConfigError",
    "DataError",
    "SchemaConfig",
    "SurveyDataset",
    "TrainedModel",
    "__version__",
    "build_features",
    "evaluate_probabilities",
    "feature_significance",
    "knee_index",
    "legitimacy",
    "legitimacy_curve",
    "legitimacy_maps",
    "load_survey",
    "mean_satisfaction",
    "merge_qol_classes",
    "optimal_k",
    "parse_survey",
    "perceived_quality_improvement",
    "proposal_counts",
    "relative_quality_improvement",
    "relocation_report",
    "run_experiment",
    "smote",
    "train",
]


def load_survey(path, schema):
    """Return (dataset, load_report) for a survey file."""
    dataset, report = _core.load_survey(str(path), schema)
    return dataset, _json.loads(report)


def parse_survey(text, schema):
    dataset, report = _core.parse_survey(text, schema)
    return dataset, _json.loads(report)


def legitimacy_curve(counts):
    return _json.loads(_core.legitimacy_curve_json(list(counts)))


def optimal_k(counts):
    return _json.loads(_core.optimal_k_json(list(counts)))


def legitimacy_maps(dataset, axis="sectors"):
    return _json.loads(_core.legitimacy_maps_json(dataset, axis))


def mean_satisfaction(dataset):
    return _json.loads(_core.mean_satisfaction_json(dataset))


def relocation_report(dataset):
    return _json.loads(_core.relocation_report_json(dataset))


def train(X, labels, scale=True, **config):
    """Train the classifier; keyword arguments override MLP defaults (epochs, hidden_units, seed, ...)."""
    return _core.train(X, list(labels), _json.dumps(config) if config else "", scale)


def evaluate_probabilities(probabilities, labels):
    return _json.loads(_core.evaluate_probabilities_json(probabilities, list(labels)))


def feature_significance(X, labels, columns=()):
    return _json.loads(_core.feature_significance_json(X, list(labels), list(columns)))


def run_experiment(dataset, features="SP", sampling="smote", seed=0, **config):
    return _json.loads(
        _core.run_experiment_json(dataset, features, sampling, seed, _json.dumps(config) if config else "")
    )
