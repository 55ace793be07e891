"""Kernelization and exact solving for maximum agreement forests on t >= 2 trees."""

from .generate import TightFamily, random_instance, random_tree, tight_family_A, tight_family_B
from .newick import NewickError, format_document, parse_document, parse_newick, read_treeset, serialize_newick, write_treeset
from .reductions import (
    KernelReport,
    PreconditionError,
    apply_chain_reduction,
    apply_subtree_reduction,
    common_pendant_subtrees,
    compute_r,
    find_common_chains,
    find_common_pendant_subtree,
    kernel_bound,
    kernelize,
    maximal_common_chains,
)
from .solver import (
    SolverLimitError,
    SolveResult,
    exact_decision,
    exact_maf,
    forest_violation,
    is_agreement_forest,
    maf_bruteforce,
    maf_cutset,
)
from .tree import (
    Chain,
    Partition,
    PhyloTree,
    TreeError,
    TreeSet,
    block_degree,
    canonical_form,
    induced_span,
    is_chain,
    is_pendant,
    project_forest,
    restrict,
    restrict_treeset,
    trees_equal,
)

__version__ = "0.1.0"
