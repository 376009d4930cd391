"""Minimization of decomposable submodular functions.

Builds set functions from threshold and concave potentials, smooths their
Lovász extensions, and minimizes them with an accelerated projected-gradient
loop, exact-set rounding and discrete optimality certificates.
"""

from .errors import (CapacityError, InfeasibleThresholdError, InvalidCurveError,
                     NotConcaveError, NumericalError, ParseError)
from .model import (ConcaveCurve, ConcavePotential, DecomposableFunction,
                    Oracle, ThresholdPotential, brute_force_minimize,
                    check_submodular, enumerate_values, indicator,
                    lovasz_extension, subset_from_indicator)
from .smoothing import (BreakpointProfile, ValueGrad, curvature_mass,
                        dual_mass, smoothed_concave, smoothed_objective,
                        smoothed_threshold, solve_shift, threshold_profile,
                        two_potential_grad)
from .certify import Certificate, candidate_set, certificate_gap, round_to_sets
from .solver import (SolveResult, SolverOptions, TraceRow, project_box,
                     slg_minimize, smoothed_gap)
from .reformulate import (SetCoverInstance, WeightedGraph, concave_cardinality,
                          graph_cut, queueing_objective, region_potential,
                          regions_objective, set_cover, two_potential)
from .formats import (parse_dimacs_cut, parse_problem, serialize_problem,
                      write_trace)
from .generate import SplitMix64, generate_cut_instance, random_modular

__version__ = "0.1.0"

__all__ = [
    "BreakpointProfile", "CapacityError", "Certificate", "ConcaveCurve",
    "ConcavePotential", "DecomposableFunction", "InfeasibleThresholdError",
    "InvalidCurveError", "NotConcaveError", "NumericalError", "Oracle",
    "ParseError", "SetCoverInstance", "SolveResult", "SolverOptions",
    "SplitMix64", "ThresholdPotential", "TraceRow", "ValueGrad",
    "WeightedGraph", "brute_force_minimize", "candidate_set",
    "certificate_gap", "check_submodular", "concave_cardinality",
    "curvature_mass", "dual_mass", "enumerate_values", "generate_cut_instance",
    "graph_cut", "indicator", "lovasz_extension", "parse_dimacs_cut",
    "parse_problem", "project_box", "queueing_objective", "random_modular",
    "region_potential", "regions_objective", "round_to_sets",
    "serialize_problem", "set_cover", "slg_minimize", "smoothed_concave",
    "smoothed_gap", "smoothed_objective", "smoothed_threshold", "solve_shift",
    "subset_from_indicator", "threshold_profile", "two_potential",
    "two_potential_grad", "write_trace",
]
