"""Discrete laboratory for the standard additive coalescent.

Two constructions of the same fragmentation, coupled exactly:

* cutting a random tree at timed edges (``fragmentation``, ``cut_tree``);
* excursions of a drifted function above its running infimum
  (``pacman`` builds the function, ``excursion_ops`` decomposes it).

``reconstruct`` goes back from the function to the cut-tree and the tree,
``prim`` holds the Prim-order encoding, and ``harness`` runs the experiments.
"""
from .cut_tree import CutTree, build_cut_tree, components_from_cut_tree, leaf_distance, tau_from_lengths
from .excursion_ops import RecordDecomposition, PProcess, drifted_records, p_process, x_b
from .fragmentation import fragmentation_timeline, x_ap
from .harness import Report, ks_two_sample, multiset_equal, run_suite
from .model import EXPONENTIAL, RANK, ContractViolation, CutSchedule, RootedTree, component_masses, fixture
from .pacman import BreakpointFunction, bertoin_function, h_triple, pacman_run, record_sequence
from .prim import PrimPath, path_component_sizes, prim_order, prim_path
from .reconstruct import RoutedCutTree, complete_routings, phi_rebuild, xi_stick_breaking
from .samplers import ExcursionGrid, Seed, sample_cayley, sample_cut_schedule, sample_excursion_grid, sample_tagged_mass

__version__ = "0.1.0"

__all__ = [
    "CutTree",
    "build_cut_tree",
    "components_from_cut_tree",
    "leaf_distance",
    "tau_from_lengths",
    "RecordDecomposition",
    "PProcess",
    "drifted_records",
    "p_process",
    "x_b",
    "fragmentation_timeline",
    "x_ap",
    "Report",
    "ks_two_sample",
    "multiset_equal",
    "run_suite",
    "EXPONENTIAL",
    "RANK",
    "ContractViolation",
    "CutSchedule",
    "RootedTree",
    "component_masses",
    "fixture",
    "BreakpointFunction",
    "bertoin_function",
    "h_triple",
    "pacman_run",
    "record_sequence",
    "PrimPath",
    "path_component_sizes",
    "prim_order",
    "prim_path",
    "RoutedCutTree",
    "complete_routings",
    "phi_rebuild",
    "xi_stick_breaking",
    "ExcursionGrid",
    "Seed",
    "sample_cayley",
    "sample_cut_schedule",
    "sample_excursion_grid",
    "sample_tagged_mass",
]
