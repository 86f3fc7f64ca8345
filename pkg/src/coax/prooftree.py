"""Proof trees, proof search, approximated proofs, and regular proof graphs.

Trees here are *children-injective*: siblings always carry distinct judgement
labels (premise sets are sets), so a tree is fully described by its root label
plus the prefix-closed set of label paths from the root.  That representation
makes the level-n approximation order a plain set comparison.

Depth convention: the root sits at depth 0 and depth counts edges, so "a
coaxiom used at depth >= n" means its node's path has length >= n.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .core import (
    CoaxError,
    InferenceSystem,
    IterationTrace,
    Judgement,
    JudgementSet,
    closure_of,
    generated,
    inductive,
    kernel_below,
    with_coaxioms_as_axioms,
)


class NotConsistent(CoaxError):
    """A set offered as consistent contains a judgement no rule supports."""

    def __init__(self, judgement: Judgement):
        self.judgement = judgement
        super().__init__(f"no rule concludes {judgement} from inside the set")


class NotInGenerated(CoaxError):
    """The judgement lies outside the generated interpretation, so no
    approximating proof sequence for it exists."""

    def __init__(self, judgement: Judgement):
        self.judgement = judgement
        super().__init__(f"{judgement} is not in the generated interpretation")


Path = tuple[Judgement, ...]


@dataclass(frozen=True)
class PathTree:
    """A finite children-injective tree: root label + prefix-closed paths.

    ``paths`` holds every nonempty label path; the empty path (the root) is
    implicit.  The node reached by path p is labelled p[-1].
    """

    root: Judgement
    paths: frozenset[Path] = frozenset()

    def __post_init__(self) -> None:
        for p in self.paths:
            if not p:
                raise ValueError("the empty path is implicit and must not be stored")
            if len(p) > 1 and p[:-1] not in self.paths:
                raise ValueError(f"path set is not prefix-closed at {p}")

    @staticmethod
    def leaf(j: Judgement) -> "PathTree":
        return PathTree(j, frozenset())

    @staticmethod
    def branch(root: Judgement, subtrees: Iterable["PathTree"]) -> "PathTree":
        """Stack subtrees under a new root; subtree roots become the children
        and must be pairwise distinct (children injectivity)."""
        subs = list(subtrees)
        roots = [t.root for t in subs]
        if len(set(roots)) != len(roots):
            raise ValueError("children of a node must carry distinct labels")
        paths: set[Path] = set()
        for t in subs:
            paths.add((t.root,))
            for p in t.paths:
                paths.add((t.root,) + p)
        return PathTree(root, frozenset(paths))

    # -- structure -----------------------------------------------------------

    def label(self, path: Path) -> Judgement:
        return path[-1] if path else self.root

    def nodes(self) -> Iterator[Path]:
        """All node paths including the implicit root, in canonical order."""
        yield ()
        yield from sorted(self.paths)

    def children(self, path: Path) -> tuple[Judgement, ...]:
        n = len(path)
        return tuple(
            sorted(p[-1] for p in self.paths if len(p) == n + 1 and p[:n] == path)
        )

    @property
    def depth(self) -> int:
        return max((len(p) for p in self.paths), default=0)

    def __len__(self) -> int:
        return 1 + len(self.paths)

    def subtree(self, path: Path) -> "PathTree":
        if path and path not in self.paths:
            raise ValueError(f"no node at {path}")
        n = len(path)
        return PathTree(
            self.label(path),
            frozenset(p[n:] for p in self.paths if len(p) > n and p[:n] == path),
        )

    def to_nested(self) -> dict:
        """JSON-friendly nested form: {judgement, children: [...]}."""
        children_map: dict[Path, list[Path]] = {}
        for p in sorted(self.paths):
            children_map.setdefault(p[:-1], []).append(p)

        def build(path: Path) -> dict:
            return {
                "judgement": str(self.label(path)),
                "children": [build(c) for c in children_map.get(path, [])],
            }

        return build(())

    def render(self, indent: str = "  ") -> str:
        lines: list[str] = []

        def walk(path: Path, depth: int) -> None:
            lines.append(indent * depth + str(self.label(path)))
            for c in self.children(path):
                walk(path + (c,), depth + 1)

        walk((), 0)
        return "\n".join(lines)


@dataclass(frozen=True)
class TreeVerdict:
    """Outcome of a tree validation; on failure, the first offending node in
    canonical path order plus a human-readable reason."""

    ok: bool
    path: Optional[Path] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate_proof_tree(sys: InferenceSystem, t: PathTree) -> TreeVerdict:
    """Check that every node (leaves included) is the conclusion of a rule of
    the system whose premise set is exactly its children's labels."""
    for path in t.nodes():
        c = t.label(path)
        if c not in sys.universe:
            return TreeVerdict(False, path, f"{c} is outside the universe")
        if t.children(path) not in sys.premise_sets(c):
            return TreeVerdict(False, path, f"no rule concludes {c} from {t.children(path)}")
    return TreeVerdict(True)


def _levels(trace: IterationTrace) -> dict[Judgement, int]:
    """First ascending step at which each judgement appears (>= 1)."""
    out: dict[Judgement, int] = {}
    for n, step in enumerate(trace.steps):
        for j in step:
            out.setdefault(j, n)
    return out


def _wf_build(
    sys: InferenceSystem,
    levels: dict[Judgement, int],
    j: Judgement,
    budget: int,
    memo: dict[tuple[Judgement, int], PathTree],
) -> PathTree:
    """Greedy canonical construction: take the least premise set whose members
    are all provable within the remaining budget.  Well-defined whenever
    levels[j] - 1 <= budget."""
    key = (j, budget)
    hit = memo.get(key)
    if hit is not None:
        return hit
    for prs in sys.premise_sets(j):
        if all(levels.get(p, budget + 2) <= budget for p in prs):
            subtrees = [_wf_build(sys, levels, p, budget - 1, memo) for p in prs]
            tree = PathTree.branch(j, subtrees)
            break
    else:  # pragma: no cover - guarded by the level precondition
        raise AssertionError(f"no admissible rule for {j} at budget {budget}")
    memo[key] = tree
    return tree


def wf_proof_search(
    sys: InferenceSystem, j: Judgement, depth_bound: int
) -> Optional[PathTree]:
    """A finite proof tree for j of depth <= depth_bound, or None.

    With depth_bound = |universe| this decides inductive membership exactly:
    a judgement enters the n-th ascending iterate exactly when it has a proof
    of depth < n.  Coaxioms are not consulted; pass the coaxioms-as-axioms
    system to search modulo coaxioms.
    """
    if j not in sys.universe:
        return None
    _, trace = inductive(sys)
    levels = _levels(trace)
    if j not in levels or levels[j] - 1 > depth_bound:
        return None
    return _wf_build(sys, levels, j, min(depth_bound, len(sys.universe)), {})


def approx_proof(sys: InferenceSystem, j: Judgement, n: int) -> Optional[PathTree]:
    """An approximated proof tree of level n for j, or None.

    The result is a finite proof tree in the coaxioms-as-axioms system whose
    coaxiom uses all sit at depth >= n; it exists exactly when j survives n
    descending steps from the closure of the coaxioms.  Above the cut the tree
    follows genuine rules whose premises survive one step fewer; below it any
    well-founded proof modulo coaxioms is acceptable.
    """
    beta = closure_of(sys)
    _, descent = kernel_below(sys, beta)
    if j not in descent.at(n):
        return None
    relaxed = with_coaxioms_as_axioms(sys)
    _, up = inductive(relaxed)
    levels = _levels(up)
    wf_memo: dict[tuple[Judgement, int], PathTree] = {}
    memo: dict[tuple[Judgement, int], PathTree] = {}

    def build(c: Judgement, k: int) -> PathTree:
        if k <= 0:
            return _wf_build(relaxed, levels, c, len(relaxed.universe), wf_memo)
        key = (c, k)
        hit = memo.get(key)
        if hit is not None:
            return hit
        lower = descent.at(k - 1)
        for prs in sys.premise_sets(c):
            if all(p in lower for p in prs):
                tree = PathTree.branch(c, [build(p, k - 1) for p in prs])
                break
        else:  # pragma: no cover - guarded by descent membership
            raise AssertionError(f"{c} unsupported at level {k}")
        memo[key] = tree
        return tree

    return build(j, n)


def validate_approx_level(sys: InferenceSystem, t: PathTree, n: int) -> TreeVerdict:
    """Check that t is a proof tree in the coaxioms-as-axioms system AND that
    every node above the cut (depth < n) is justified by a genuine rule."""
    relaxed = with_coaxioms_as_axioms(sys)
    overall = validate_proof_tree(relaxed, t)
    if not overall:
        return overall
    for path in t.nodes():
        if len(path) >= n:
            continue
        if t.children(path) not in sys.premise_sets(t.label(path)):
            return TreeVerdict(
                False, path, f"depth {len(path)} < {n} node rests on a coaxiom"
            )
    return TreeVerdict(True)


@dataclass
class ProofGraph:
    """A rule choice on a consistent set: finite presentation of a regular,
    possibly non-well-founded proof.  Unfolding from any member stays inside
    the support."""

    support: JudgementSet
    choice: dict[Judgement, tuple[Judgement, ...]]
    root: Judgement

    def to_dict(self) -> dict:
        return {
            "root": str(self.root),
            "nodes": [str(j) for j in self.support],
            "choice": {str(j): [str(p) for p in prs] for j, prs in self.choice.items()},
        }


def proof_graph(sys: InferenceSystem, s: JudgementSet, j: Judgement) -> ProofGraph:
    """Choose, for every member of the consistent set s, the canonically least
    rule whose premises stay in s; rooted at j.

    Raises NotConsistent on the first member (in canonical order) that no rule
    supports from inside s.
    """
    if j not in s:
        raise ValueError(f"root {j} is not in the support set")
    choice: dict[Judgement, tuple[Judgement, ...]] = {}
    for c in s:
        for prs in sys.premise_sets(c):
            if all(p in s for p in prs):
                choice[c] = prs
                break
        else:
            raise NotConsistent(c)
    return ProofGraph(s, choice, j)


def unfold(g: ProofGraph, depth: int) -> PathTree:
    """The depth-bounded path expansion of the choice graph from its root.

    Every node strictly above the cut has exactly its chosen premises as
    children; nodes at the cut are left childless.
    """
    paths: set[Path] = set()
    frontier: list[Path] = [()]
    for _ in range(depth):
        next_frontier: list[Path] = []
        for path in frontier:
            label = path[-1] if path else g.root
            for p in g.choice[label]:
                child = path + (p,)
                paths.add(child)
                next_frontier.append(child)
        frontier = next_frontier
    return PathTree(g.root, frozenset(paths))


def tree_le_n(t1: PathTree, t2: PathTree, n: int) -> bool:
    """The level-n approximation order: the first n levels of t1 embed in t2
    (same root, path inclusion, labels agreeing by construction)."""
    if t1.root != t2.root:
        return False
    return all(p in t2.paths for p in t1.paths if len(p) <= n)


def tree_eq_n(t1: PathTree, t2: PathTree, n: int) -> bool:
    """Equality of the first n levels."""
    return tree_le_n(t1, t2, n) and tree_le_n(t2, t1, n)


def approximating_sequence(
    sys: InferenceSystem, j: Judgement, upto: int
) -> tuple[PathTree, ...]:
    """Trees t_0..t_upto with t_n a level-n approximated proof of j and each
    consecutive pair agreeing on the first n levels.

    Construction: fix for every generated judgement one well-founded proof
    modulo coaxioms (its t_0) and one genuine rule whose premises are all
    generated; t_{n+1} stacks that rule over the premises' t_n.  Exists
    exactly for generated judgements.
    """
    gen = generated(sys)
    if j not in gen:
        raise NotInGenerated(j)
    relaxed = with_coaxioms_as_axioms(sys)
    _, up = inductive(relaxed)
    levels = _levels(up)
    wf_memo: dict[tuple[Judgement, int], PathTree] = {}
    budget = len(relaxed.universe)

    chosen: dict[Judgement, tuple[Judgement, ...]] = {}
    for g in gen:
        for prs in sys.premise_sets(g):
            if all(p in gen for p in prs):
                chosen[g] = prs
                break
        else:  # pragma: no cover - gen is consistent by construction
            raise AssertionError(f"{g} unsupported inside the generated set")

    memo: dict[tuple[Judgement, int], PathTree] = {}

    def build(g: Judgement, n: int) -> PathTree:
        key = (g, n)
        hit = memo.get(key)
        if hit is None:
            if n == 0:
                hit = _wf_build(relaxed, levels, g, budget, wf_memo)
            else:
                hit = PathTree.branch(g, [build(p, n - 1) for p in chosen[g]])
            memo[key] = hit
        return hit

    return tuple(build(j, n) for n in range(upto + 1))
