"""Generalized harmonic maps: induced geometry, Cartan connections and
topological-quantization checks for 2-D reductions of exact solutions."""

from . import geometry, ghm, jets, quantization, solutions
from .geometry import MetricField2, Signature, build_coframe, connection_from_cartan, curvature, pipeline
from .ghm import GhmSystem, field_eq_residual, induced_metric
from .jets import Jet
from .quantization import EulerDomain, GridSpec, euler_number, regularity_scan, spectrum_search, transition_check
from .solutions import FAMILIES, make_family

__version__ = "0.1.0"

__all__ = [
    "geometry", "ghm", "jets", "quantization", "solutions",
    "Jet", "MetricField2", "Signature", "build_coframe", "connection_from_cartan", "curvature", "pipeline",
    "GhmSystem", "field_eq_residual", "induced_metric",
    "EulerDomain", "GridSpec", "euler_number", "regularity_scan", "spectrum_search", "transition_check",
    "FAMILIES", "make_family",
]
