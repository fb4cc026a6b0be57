"""Well-posedness analysis and simulation of hyperbolic systems on metric graphs."""
from .classifier import WellPosednessReport, Verdict, classify
from .graph import MetricGraph, build_graph, star_graph
from .models import PRESETS, make_model
from .system import GlobalBoundary, LocalBoundary, NetworkSystem
from .tolerances import Tolerances, default_tolerances

__version__ = "0.1.0"

__all__ = ["GlobalBoundary", "LocalBoundary", "MetricGraph", "NetworkSystem", "PRESETS",
           "Tolerances", "Verdict", "WellPosednessReport", "build_graph", "classify",
           "default_tolerances", "make_model", "star_graph"]
