"""Honeypot-driven detection of spam profiles in a simulated social network.

The package covers the whole desk-scale pipeline: a deterministic
network simulation with passive honeypot accounts, per-profile feature
extraction, an ARFF dataset layer, a diversity-driven tree ensemble
learner, and a cross-validated evaluation battery.  A small HTTP
service exposes each stage; the bundled command-line client drives the
service in-process by default.
"""

__version__ = "0.1.0"

from .arff import Dataset, designate_class, parse, serialize
from .decorate import DecorateParams, Ensemble, load_model, save_model, train_decorate
from .errors import HoneytrapError
from .evaluation import EvalReport, ablation, cross_validate, cv_predictions
from .features import FeatureGroup, FeatureVector, extract, extract_all, vectors_to_dataset
from .simnet import SimConfig, harvest, parse_config, run_simulation

__all__ = [
    "__version__",
    "HoneytrapError",
    "Dataset",
    "parse",
    "serialize",
    "designate_class",
    "SimConfig",
    "run_simulation",
    "harvest",
    "parse_config",
    "FeatureGroup",
    "FeatureVector",
    "extract",
    "extract_all",
    "vectors_to_dataset",
    "DecorateParams",
    "Ensemble",
    "train_decorate",
    "save_model",
    "load_model",
    "EvalReport",
    "cross_validate",
    "cv_predictions",
    "ablation",
]
