"""Self-adjusting BST laboratory: splay, tango, and multi-splay trees on an
instrumented pointer machine, with workload generators, an interleave
lower-bound oracle, and a benchmark harness."""

from .cost_model import CostMeter, MeteredTree, complete_tree_arrays
from .errors import BstLabError
from .multisplay import MultiSplayTree, lock_multisplay
from .reference_model import (InterleaveTrace, ReferenceModel, build_reference,
                              exact_common_path_probability, interleave_bound,
                              interleave_bound_direct, opt_lower_bound, rho,
                              unified_bound)
from .splay import SplayTree, build_splay
from .tango import TangoTree, lock_tango
from .workloads import (AccessSequence, Rng, gen_random, gen_sequential,
                        gen_unified, gen_working_set, read_sequence)

__all__ = [
    "AccessSequence", "BstLabError", "CostMeter", "InterleaveTrace",
    "MeteredTree", "MultiSplayTree", "ReferenceModel", "Rng", "SplayTree",
    "TangoTree", "build_reference", "build_splay", "complete_tree_arrays",
    "exact_common_path_probability", "gen_random", "gen_sequential",
    "gen_unified", "gen_working_set", "interleave_bound",
    "interleave_bound_direct", "lock_multisplay", "lock_tango",
    "opt_lower_bound", "read_sequence", "rho", "unified_bound",
]

__version__ = "0.1.0"
