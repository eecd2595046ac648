"""Graph-guided fused lasso for multi-trait genetic association."""

from gflasso.data import CoefficientMatrix, GenotypeMatrix, PhenotypeMatrix, load_matrix
from gflasso.estimator import FitConfig, FitSpec, fit
from gflasso.graph import TraitGraph, build_graph
from gflasso.selection import SearchConfig, select_and_fit
from gflasso.simulation import SimulationSpec, simulate

__version__ = "0.1.0"

__all__ = [
    "CoefficientMatrix", "FitConfig", "FitSpec", "GenotypeMatrix", "PhenotypeMatrix", "SearchConfig",
    "SimulationSpec", "TraitGraph", "build_graph", "fit", "load_matrix", "select_and_fit", "simulate",
]
