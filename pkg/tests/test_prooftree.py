"""Proof tree tests: the path representation, validation, well-founded and
approximated proof search, proof graphs, unfolding and the level orders."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from coax.core import (
    InferenceSystem,
    Judgement,
    Rule,
    Universe,
    closure_of,
    generated,
    inductive,
    kernel_below,
)
from coax.prooftree import (
    NotConsistent,
    NotInGenerated,
    PathTree,
    approx_proof,
    approximating_sequence,
    proof_graph,
    tree_eq_n,
    tree_le_n,
    unfold,
    validate_approx_level,
    validate_proof_tree,
    wf_proof_search,
)

from oracles import random_system


def J(text: str) -> Judgement:
    return Judgement(text)


@pytest.fixture
def loopy():
    """a <- b, b <- a, c axiom, a <- c; coaxiom b."""
    uni = Universe(map(J, "abc"))
    rules = [
        Rule(J("a"), (J("b"),)),
        Rule(J("a"), (J("c"),)),
        Rule(J("b"), (J("a"),)),
        Rule(J("c")),
    ]
    return InferenceSystem(uni, rules, [J("b")])


# -- PathTree ----------------------------------------------------------------------


def test_leaf_and_branch():
    t = PathTree.branch(J("r"), [PathTree.leaf(J("x")), PathTree.leaf(J("y"))])
    assert t.root == J("r")
    assert t.children(()) == (J("x"), J("y"))
    assert t.depth == 1
    assert len(t) == 3
    assert t.label((J("x"),)) == J("x")


def test_branch_rejects_duplicate_children():
    with pytest.raises(ValueError):
        PathTree.branch(J("r"), [PathTree.leaf(J("x")), PathTree.leaf(J("x"))])


def test_paths_must_be_prefix_closed():
    with pytest.raises(ValueError):
        PathTree(J("r"), frozenset({(J("a"), J("b"))}))
    with pytest.raises(ValueError):
        PathTree(J("r"), frozenset({()}))


def test_subtree_and_nested():
    inner = PathTree.branch(J("x"), [PathTree.leaf(J("y"))])
    t = PathTree.branch(J("r"), [inner])
    assert t.subtree((J("x"),)) == inner
    assert t.subtree(()) == t
    assert t.to_nested() == {
        "judgement": "r",
        "children": [{"judgement": "x", "children": [{"judgement": "y", "children": []}]}],
    }
    with pytest.raises(ValueError):
        t.subtree((J("nope"),))


def test_render_shows_indentation():
    t = PathTree.branch(J("r"), [PathTree.leaf(J("x"))])
    assert t.render() == "r\n  x"


# -- validation --------------------------------------------------------------------


def test_validate_proof_tree(loopy):
    good = PathTree.branch(J("a"), [PathTree.leaf(J("c"))])
    assert validate_proof_tree(loopy, good).ok
    # b's only rule needs a; a leaf b is not a proof
    bad = PathTree.branch(J("a"), [PathTree.leaf(J("b"))])
    verdict = validate_proof_tree(loopy, bad)
    assert not verdict.ok
    assert verdict.path == (J("b"),)
    outside = PathTree.leaf(J("zzz"))
    assert not validate_proof_tree(loopy, outside).ok


# -- well-founded search -------------------------------------------------------------


def test_wf_proof_search(loopy):
    t = wf_proof_search(loopy, J("a"), depth_bound=3)
    assert t is not None
    assert validate_proof_tree(loopy, t).ok
    assert t.root == J("a")
    assert wf_proof_search(loopy, J("a"), depth_bound=0) is None  # a is not an axiom
    assert wf_proof_search(loopy, J("c"), depth_bound=0) is not None
    assert wf_proof_search(loopy, J("zzz"), depth_bound=5) is None


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**9))
def test_wf_search_decides_inductive_membership(seed):
    rng = random.Random(seed)
    system = random_system(rng, max_size=9)
    ind, _ = inductive(system)
    bound = len(system.universe)
    for j in system.universe:
        t = wf_proof_search(system, j, bound)
        assert (t is not None) == (j in ind)
        if t is not None:
            assert validate_proof_tree(system, t).ok
            assert t.root == j
            assert t.depth <= bound


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9))
def test_wf_search_depth_bound_matches_iteration_level(seed):
    """A judgement has a proof of depth <= n exactly when it appears within
    the first n+1 ascending steps."""
    rng = random.Random(seed)
    system = random_system(rng, max_size=8)
    _, trace = inductive(system)
    for j in system.universe:
        for n in range(len(system.universe) + 1):
            present = wf_proof_search(system, j, n) is not None
            assert present == (j in trace.at(n + 1)), (j, n)


# -- approximated proofs --------------------------------------------------------------


def test_approx_proof_small(loopy):
    # closure = {a,b,c}; descent keeps everything (a<-c<-axiom supports a, b<-a)
    for n in range(4):
        t = approx_proof(loopy, J("b"), n)
        assert t is not None
        assert validate_approx_level(loopy, t, n).ok


def test_validate_approx_level_flags_shallow_coaxioms(loopy):
    # the coaxiom leaf b at depth 0 is fine at level 0 but not at level 1
    leaf = PathTree.leaf(J("b"))
    assert validate_approx_level(loopy, leaf, 0).ok
    verdict = validate_approx_level(loopy, leaf, 1)
    assert not verdict.ok
    assert verdict.path == ()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_approx_proof_presence_matches_descent(seed):
    """approx_proof(j, n) exists exactly when j survives n descending steps
    from the closure, and the returned tree validates at its level."""
    rng = random.Random(seed)
    system = random_system(rng, max_size=8)
    beta = closure_of(system)
    _, descent = kernel_below(system, beta)
    for j in system.universe:
        for n in range(len(system.universe) + 1):
            t = approx_proof(system, j, n)
            assert (t is not None) == (j in descent.at(n))
            if t is not None:
                assert t.root == j
                assert validate_approx_level(system, t, n).ok


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_generated_iff_approx_proofs_at_every_level(seed):
    rng = random.Random(seed)
    system = random_system(rng, max_size=8)
    gen = generated(system)
    top = len(system.universe)
    for j in system.universe:
        all_levels = all(approx_proof(system, j, n) is not None for n in range(top + 1))
        assert all_levels == (j in gen)


# -- proof graphs ---------------------------------------------------------------------


def test_proof_graph_and_unfold(loopy):
    gen = generated(loopy)
    g = proof_graph(loopy, gen, J("a"))
    assert g.root == J("a")
    assert set(g.choice) == set(gen)
    t = unfold(g, 3)
    assert t.depth <= 3
    # every unfolded node's children are exactly its chosen premises
    for path in t.nodes():
        if len(path) < 3:
            assert t.children(path) == tuple(sorted(g.choice[t.label(path)]))
    d = g.to_dict()
    assert d["root"] == "a"
    assert set(d["choice"]) == {str(j) for j in gen}


def test_proof_graph_rejects_inconsistent_support(loopy):
    uni = loopy.universe
    # {a} alone: a's rules need b or c, neither inside
    with pytest.raises(NotConsistent) as exc:
        proof_graph(loopy, uni.subset([J("a")]), J("a"))
    assert exc.value.judgement == J("a")
    with pytest.raises(ValueError):
        proof_graph(loopy, uni.subset([J("c")]), J("a"))  # root outside support


# -- level orders ----------------------------------------------------------------------


def _tree_strategy():
    judgements = [J(t) for t in "xyz"]

    def build(depth: int, rng: random.Random) -> PathTree:
        if depth == 0 or rng.random() < 0.4:
            return PathTree.leaf(rng.choice(judgements))
        k = rng.randint(1, 3)
        roots = rng.sample(judgements, k)
        return PathTree.branch(
            rng.choice(judgements),
            [_relabel(build(depth - 1, rng), r) for r in roots],
        )

    return build


def _relabel(t: PathTree, new_root: Judgement) -> PathTree:
    return PathTree(new_root, t.paths)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9), st.integers(0, 4))
def test_level_order_laws(seed, n):
    rng = random.Random(seed)
    build = _tree_strategy()
    t1 = build(3, rng)
    t2 = build(3, rng)
    t3 = build(3, rng)
    assert tree_le_n(t1, t1, n)  # reflexive
    if tree_le_n(t1, t2, n) and tree_le_n(t2, t3, n):
        assert tree_le_n(t1, t3, n)  # transitive
    if tree_le_n(t1, t2, n):
        for k in range(n + 1):
            assert tree_le_n(t1, t2, k)  # downward monotone in the level
    # symmetric pair means equivalence
    assert tree_eq_n(t1, t2, n) == (tree_le_n(t1, t2, n) and tree_le_n(t2, t1, n))
    # at depth-exceeding levels the order is full equality of path sets
    deep = max(t1.depth, t2.depth)
    assert tree_eq_n(t1, t2, deep) == (
        t1.root == t2.root and t1.paths == t2.paths
    )


def test_le_is_conjunction_of_all_levels():
    a = PathTree.branch(J("r"), [PathTree.leaf(J("x"))])
    b = PathTree.branch(J("r"), [PathTree.branch(J("x"), [PathTree.leaf(J("y"))])])
    bound = max(a.depth, b.depth)
    assert all(tree_le_n(a, b, n) for n in range(bound + 1))
    assert not all(tree_le_n(b, a, n) for n in range(bound + 1))


# -- approximating sequences -------------------------------------------------------------


def test_approximating_sequence_on_loop(loopy):
    seq = approximating_sequence(loopy, J("b"), 3)
    assert len(seq) == 4
    for n, t in enumerate(seq):
        assert t.root == J("b")
        assert validate_approx_level(loopy, t, n).ok
        if n:
            assert tree_eq_n(seq[n - 1], t, n - 1)


def test_approximating_sequence_requires_generated():
    # pure cycle, no coaxioms: the closure is empty, nothing is generated
    uni = Universe([J("a"), J("b")])
    cycle = InferenceSystem(
        uni, [Rule(J("a"), (J("b"),)), Rule(J("b"), (J("a"),))], []
    )
    with pytest.raises(NotInGenerated):
        approximating_sequence(cycle, J("a"), 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 4))
def test_sequence_agrees_with_unfolded_proof_graph(seed, upto):
    """The level-N tree agrees with the N-deep unfolding of the canonical
    proof graph on the first N levels (both make the same canonical rule
    choice at every generated judgement)."""
    rng = random.Random(seed)
    system = random_system(rng, max_size=8)
    gen = generated(system)
    for j in gen:
        seq = approximating_sequence(system, j, upto)
        g = proof_graph(system, gen, j)
        t = unfold(g, upto)
        assert tree_eq_n(seq[upto], t, upto)
        break  # one judgement per system keeps the run fast


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9))
def test_sequence_trees_validate_and_chain(seed):
    rng = random.Random(seed)
    system = random_system(rng, max_size=7)
    gen = generated(system)
    upto = 3
    for j in gen:
        seq = approximating_sequence(system, j, upto)
        for n, t in enumerate(seq):
            assert validate_approx_level(system, t, n).ok
            if n:
                assert tree_eq_n(seq[n - 1], t, n - 1)
        break
