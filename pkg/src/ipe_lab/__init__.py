"""Simulation and verification of self-similar interval partition evolutions."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:
    __version__ = "0.0.0"

from .partition import (EMPTY, IntervalPartition, JState, concat, dist_correspondence, dist_hausdorff,
                        reverse, scale, split_longest)
from .rng import RngStream
from .besq import BesqSpec, sample_path, sample_tau0, sample_transition
from .pdip import sample_pdip, sample_pdip_alpha0, sample_pdip_alphaalpha
from .kernel import KernelParams, kernel_step, sample_L, sample_mu
from .dagger import evolve_dagger
from .immigration import (sample_pseudo_stationary, sample_ssip2_marginal, sample_ssip2_path,
                          sample_ssip_marginal_from_empty)
from .scaffolding import clade_path, sample_clade, scaffold, skewer
from .harness import ExperimentReport, run_suite

__all__ = [
    "EMPTY", "IntervalPartition", "JState", "concat", "dist_correspondence", "dist_hausdorff", "reverse",
    "scale", "split_longest", "RngStream", "BesqSpec", "sample_path", "sample_tau0", "sample_transition",
    "sample_pdip", "sample_pdip_alpha0", "sample_pdip_alphaalpha", "KernelParams", "kernel_step", "sample_L",
    "sample_mu", "evolve_dagger", "sample_pseudo_stationary", "sample_ssip2_marginal", "sample_ssip2_path",
    "sample_ssip_marginal_from_empty", "clade_path", "sample_clade", "scaffold", "skewer", "ExperimentReport",
    "run_suite",
]
