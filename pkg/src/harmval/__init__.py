"""Valence, critical sets and image partitions of harmonic maps of the plane."""

from .core import (DegeneracyReport, FunctionSpecError, HarmonicPolynomial, PlaneMap,
                   detect_degeneracy, eval_map, function_spec, jacobian, parse_function, psi)
from .preimage import PreimageSet, Verdict, preimages, preimages_numeric, valence
from .critical import CriticalSet, image_curve, trace
from .cluster import ClusterSet, cluster_set, escape_test
from .analysis import Analysis, analyze
from .harness import RandomPolySpec, SuiteResult, run_suite

__all__ = [
    "Analysis", "ClusterSet", "CriticalSet", "DegeneracyReport", "FunctionSpecError",
    "HarmonicPolynomial", "PlaneMap", "PreimageSet", "RandomPolySpec", "SuiteResult",
    "Verdict", "analyze", "cluster_set", "detect_degeneracy", "escape_test", "eval_map",
    "function_spec", "image_curve", "jacobian", "parse_function", "preimages",
    "preimages_numeric", "psi", "run_suite", "trace", "valence",
]
