"""Connections and numerical classification of complex Finsler metrics."""

from .classifier import ClassificationReport, PredicateResidual, classify
from .errors import FinslerError
from .geometry import ConnectionBundle, connection, cov_derivs
from .metric import MetricSpec, dump_metric, load_metric, make_spec
from .sample import SamplePlan, SampleSet, TangentSample, draw_samples
from .wirtinger import MultiIndex, derive, fd_check, taylor
from . import zoo

__version__ = "0.1.0"

__all__ = [
    "ClassificationReport", "ConnectionBundle", "FinslerError", "MetricSpec", "MultiIndex",
    "PredicateResidual", "SamplePlan", "SampleSet", "TangentSample", "classify", "connection",
    "cov_derivs", "derive", "draw_samples", "dump_metric", "fd_check", "load_metric", "make_spec",
    "taylor", "zoo",
]
