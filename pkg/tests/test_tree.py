import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FIG5, FIG5_REDUCED, FIG6_REDUCED, labels, partitions, treeset, trees, treesets
from mafkernel import (
    Chain,
    Partition,
    PhyloTree,
    TreeError,
    TreeSet,
    block_degree,
    induced_span,
    is_agreement_forest,
    is_chain,
    is_pendant,
    parse_newick,
    project_forest,
    restrict,
    restrict_treeset,
    serialize_newick,
    trees_equal,
)
from mafkernel.generate import random_tree
import oracles


# -- construction and invariants ---------------------------------------------------


def test_degenerate_trees_are_values():
    one = PhyloTree.from_nested("x", rooted=True)
    assert one.n == 1 and one.num_vertices == 1
    pair = PhyloTree.from_nested(("x", "y"), rooted=False)
    assert pair.n == 2 and pair.num_vertices == 2 and len(pair.edges()) == 1
    rpair = PhyloTree.from_nested(("x", "y"), rooted=True)
    assert rpair.num_vertices == 3


@pytest.mark.parametrize(
    "adj, labs, rooted",
    [
        ([[1, 2], [0], [0]], [None, "a", "b"], False),  # degree-2 internal, unrooted
        ([[1], [0, 2], [1]], ["a", None, "b"], True),  # rooted root of out-degree 1
        ([[1, 2, 3], [0], [0], [0]], [None, "a", "a", "b"], False),  # duplicate label
        ([[1], [0]], ["a", "b c"], False),  # whitespace in label
    ],
)
def test_invalid_trees_rejected(adj, labs, rooted):
    with pytest.raises(TreeError):
        PhyloTree(adj, labs, rooted, root=0 if rooted else None)


@given(trees(min_n=3))
def test_vertex_and_edge_counts(tree):
    n = tree.n
    if tree.rooted:
        assert tree.num_vertices == 2 * n - 1 and len(tree.edges()) == 2 * n - 2
    else:
        assert tree.num_vertices == 2 * n - 2 and len(tree.edges()) == 2 * n - 3


# -- spans, degree, pendant ------------------------------------------------------


def test_fig1_span_of_chain(fig1):
    span = induced_span(fig1, "jklm")
    # four leaves plus the three chain parents r2, r3, r4
    assert len(span.vertices) == 7
    assert len(span.edges) == 6


def test_singleton_span(fig1):
    span = induced_span(fig1, ["e"])
    assert span.vertices == frozenset([fig1.leaf("e")]) and not span.edges


def test_span_matches_brute_force():
    rng = random.Random(5)
    for _ in range(6):
        tree = random_tree(labels(8), rng.random() < 0.5, rng)
        block = rng.sample(labels(8), 3)
        assert set(induced_span(tree, block).vertices) == oracles.brute_span(tree, block)


def test_unknown_taxon_is_error(fig1):
    with pytest.raises(TreeError):
        induced_span(fig1, ["a", "zz"])


def test_fig1_degrees(fig1):
    assert block_degree(fig1, "efg") == 2
    assert block_degree(fig1, "jklm") == 1
    assert block_degree(fig1, fig1.taxa) == 0
    assert is_pendant(fig1, "abcd")
    assert not is_pendant(fig1, "efg")


@given(trees(min_n=2), st.data())
def test_degree_properties(tree, data):
    x = data.draw(st.sampled_from(sorted(tree.taxa)))
    assert block_degree(tree, [x]) == 1
    assert is_pendant(tree, [x])
    assert block_degree(tree, tree.taxa) == 0
    block = data.draw(st.sets(st.sampled_from(sorted(tree.taxa)), min_size=1))
    deg = block_degree(tree, block)
    assert is_pendant(tree, block) == (deg == 1)
    # oracle: boundary edges counted from the brute-force span
    span = oracles.brute_span(tree, block)
    boundary = sum(1 for u, v in tree.edges() if (u in span) != (v in span))
    assert deg == boundary


# -- isomorphism -----------------------------------------------------------------


def test_fig5_trees_differ():
    ts = treeset(FIG5)
    assert not trees_equal(ts[0], ts[1])


def test_reordered_children_equal():
    a = parse_newick("((a,b),(c,d),(e,f));", rooted=False)
    b = parse_newick("((f,e),(b,a),(d,c));", rooted=False)
    c = parse_newick("(a,b,((c,d),(e,f)));", rooted=False)
    assert trees_equal(a, b) and trees_equal(a, c)


def test_equality_needs_same_taxa():
    a = parse_newick("(a,b,c);", rooted=False)
    b = parse_newick("(a,b,d);", rooted=False)
    with pytest.raises(TreeError):
        trees_equal(a, b)


def test_isomorphism_matches_brute_force():
    rng = random.Random(7)
    positives = 0
    for i in range(40):
        rooted = i % 2 == 0
        t1 = random_tree(labels(6), rooted, rng)
        # half the pairs are rebuilt copies, so both outcomes occur
        src = random.Random(i) if i % 4 < 2 else rng
        t2 = random_tree(labels(6), rooted, src) if i % 4 >= 2 else _rebuilt(t1)
        expect = oracles.brute_isomorphic(t1, t2)
        assert trees_equal(t1, t2) == expect
        positives += expect
    assert 0 < positives < 40


def _rebuilt(tree):
    """The same topology built from a different nested form."""
    return parse_newick(serialize_newick(tree), tree.rooted)


@given(trees(min_n=4, max_n=8))
def test_equality_matches_split_oracle(tree):
    other = random_tree(sorted(tree.taxa), tree.rooted, random.Random(tree.n))
    same = oracles.topology_signature(tree) == oracles.topology_signature(other)
    assert trees_equal(tree, other) == same
    assert trees_equal(tree, tree)


@given(st.lists(st.integers(0, 50), min_size=3, max_size=3), st.booleans())
def test_equality_is_an_equivalence(seeds, rooted):
    ts = [random_tree(labels(4), rooted, random.Random(s)) for s in seeds]
    a, b, c = ts
    assert trees_equal(a, b) == trees_equal(b, a)
    if trees_equal(a, b) and trees_equal(b, c):
        assert trees_equal(a, c)


# -- restriction -----------------------------------------------------------------


def test_fig5_restriction():
    ts = treeset(FIG5)
    for tree, expect in zip(ts.trees, FIG5_REDUCED):
        assert trees_equal(restrict(tree, "abcef"), parse_newick(expect, False))


def test_restrict_whole_set_is_identity(fig1):
    assert trees_equal(restrict(fig1, fig1.taxa), fig1)


def test_rooted_restriction_keeps_lca_as_root(fig3):
    sub = restrict(fig3, "gab")
    assert trees_equal(sub, parse_newick("(g,(a,b));", True))


@given(trees(min_n=2), st.data())
def test_restriction_matches_signature_oracle(tree, data):
    block = data.draw(st.sets(st.sampled_from(sorted(tree.taxa)), min_size=1))
    sub = restrict(tree, block)
    assert sub.taxa == frozenset(block) and sub.rooted == tree.rooted
    if len(block) >= 3:
        assert oracles.topology_signature(sub) == oracles.restricted_signature(tree, block)


@given(trees(min_n=3), st.data())
def test_restriction_nests(tree, data):
    a = data.draw(st.sets(st.sampled_from(sorted(tree.taxa)), min_size=1))
    b = data.draw(st.sets(st.sampled_from(sorted(a)), min_size=1))
    assert trees_equal(restrict(restrict(tree, a), b), restrict(tree, b))


# -- chains ----------------------------------------------------------------------


def test_fig3_rooted_chain_orientation(fig3):
    assert is_chain(fig3, ("g", "f", "e"))
    assert not is_chain(fig3, ("e", "f", "g"))
    assert is_chain(fig3, ("h", "i", "j", "k"))


def test_fig1_unrooted_chains_both_ways(fig1):
    assert is_chain(fig1, ("e", "f", "g")) and is_chain(fig1, ("g", "f", "e"))
    assert is_chain(fig1, ("j", "k", "l", "m"))


def test_cherry_is_chain(fig1):
    assert is_chain(fig1, ("a", "b")) and is_chain(fig1, ("l", "m"))


def test_shared_parent_only_at_ends(fig1):
    # k,l,m: l and m share a parent at the end, fine; l,m,k puts it first
    assert is_chain(fig1, ("k", "l", "m"))
    assert is_chain(fig1, ("m", "l", "k"))
    assert not is_chain(fig1, ("l", "k", "m"))


def test_chain_type_rejects_repeats():
    with pytest.raises(TreeError):
        Chain(("a", "b", "a"))
    with pytest.raises(TreeError):
        Chain(("a",))


@given(trees(min_n=2, max_n=7), st.data())
def test_is_chain_matches_definition(tree, data):
    seq = data.draw(st.lists(st.sampled_from(sorted(tree.taxa)), min_size=2, max_size=tree.n, unique=True))
    assert is_chain(tree, seq) == oracles.definitional_chain(tree, seq)
    if not tree.rooted:
        assert is_chain(tree, seq) == is_chain(tree, seq[::-1])


# -- tree sets and forests ----------------------------------------------------


def test_fig6_restricted_treeset(fig6):
    out = restrict_treeset(fig6, fig6.taxa - {"e", "f"})
    for tree, expect in zip(out.trees, FIG6_REDUCED):
        assert trees_equal(tree, parse_newick(expect, False))
    assert restrict_treeset(fig6, fig6.taxa) == fig6


def test_restrict_treeset_outside_taxa(fig6):
    with pytest.raises(TreeError):
        restrict_treeset(fig6, {"a", "zz"})


def test_treeset_checks_taxa_and_rootedness():
    a = parse_newick("(a,b,c);", False)
    with pytest.raises(TreeError):
        TreeSet((a,))
    with pytest.raises(TreeError):
        TreeSet((a, parse_newick("(a,b,d);", False)))
    with pytest.raises(TreeError):
        TreeSet((a, parse_newick("(a,(b,c));", True)))


def test_partition_checks():
    with pytest.raises(TreeError):
        Partition.of([["a", "b"], ["b"]])
    with pytest.raises(TreeError):
        Partition.of([["a"], []])
    with pytest.raises(TreeError):
        Partition.of([["a"]], taxa="ab")


def test_project_forest_examples():
    f = Partition.of(["abcd", "e", "f"])
    assert project_forest(f, "abe") == Partition.of(["ab", "e"])
    assert project_forest(f, "abcdef") == f


@given(treesets(min_n=2, max_n=8), st.data())
def test_observation_projection(ts, data):
    blocks = data.draw(partitions(ts.taxa))
    forest = Partition.of(blocks)
    sub = data.draw(st.sets(st.sampled_from(sorted(ts.taxa)), min_size=1))
    proj = project_forest(forest, sub)
    assert len(proj) <= len(forest)
    assert proj.taxa == frozenset(sub)
    if is_agreement_forest(ts, forest):
        assert is_agreement_forest(restrict_treeset(ts, sub), proj)
