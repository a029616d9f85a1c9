"""Laplacian biogeography-based sine cosine optimization and its experiment harness."""

from .algorithms import AlgorithmId, OptimizerConfig, run_bbo, run_lxbbo, run_lxbbsca, run_sca, run_trials
from .benchmarks import evaluate_benchmark, get_benchmark
from .core import ObjectiveProblem, RngStream, SearchSpace
from .problems import PenaltyPolicy, get_engineering_problem

__version__ = "0.1.0"
