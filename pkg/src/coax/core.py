"""Finite inference systems and their fixed-point interpretations.

An inference system is a finite set of rules ``premises / conclusion`` over a
finite universe of judgements, optionally extended with *coaxioms*: judgements
that bound the coinductive interpretation from above instead of being
derivable outright.

Everything here is exact: the universe is finite, sets are bitmasks over it,
and all interpretations (inductive, coinductive, and the coaxiom-generated one
in between) are computed by Kleene iteration, which stabilizes in at most
``|universe|`` strict steps on a finite lattice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator


class CoaxError(Exception):
    """Base class for library errors."""


class UniverseMismatch(CoaxError):
    """A judgement or judgement set does not belong to the expected universe."""


class BetaNotClosed(CoaxError):
    """The bound passed to kernel_below is not closed under inference.

    Carries one violating conclusion: a judgement derivable from the bound in
    one step but missing from it.
    """

    def __init__(self, conclusion: "Judgement"):
        self.conclusion = conclusion
        super().__init__(f"bound is not closed: it misses derivable {conclusion}")


class CapExceeded(CoaxError):
    """A backward closure or builder grew beyond its configured cap."""

    def __init__(self, cap: int, message: str | None = None):
        self.cap = cap
        super().__init__(message or f"closure exceeded cap of {cap}")


@dataclass(frozen=True, order=True)
class Judgement:
    """An atomic judgement, identified by its canonical serialization.

    The text is the payload: equality, hashing and the total order all follow
    it, so two judgements are interchangeable exactly when they print the
    same.  Texts contain no whitespace, which keeps every judgement a single
    token in the file format.
    """

    text: str

    def __post_init__(self) -> None:
        if not self.text or any(ch.isspace() for ch in self.text):
            raise ValueError(f"judgement text must be a nonempty token: {self.text!r}")

    def __str__(self) -> str:
        return self.text


class Universe:
    """An ordered finite set of distinct judgements.

    Members are kept in serialization order; positions 0..n-1 index the
    bitmask representation used by JudgementSet.
    """

    __slots__ = ("members", "_index", "_hash")

    def __init__(self, members: Iterable[Judgement]):
        ordered = tuple(sorted(set(members)))
        self.members: tuple[Judgement, ...] = ordered
        self._index: dict[Judgement, int] = {j: i for i, j in enumerate(ordered)}
        self._hash = hash(ordered)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Judgement]:
        return iter(self.members)

    def __contains__(self, j: Judgement) -> bool:
        return j in self._index

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return isinstance(other, Universe) and self.members == other.members

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Universe({len(self.members)} judgements)"

    def position(self, j: Judgement) -> int:
        try:
            return self._index[j]
        except KeyError:
            raise UniverseMismatch(f"{j} is not in this universe") from None

    def empty(self) -> "JudgementSet":
        return JudgementSet(self, 0)

    def full(self) -> "JudgementSet":
        return JudgementSet(self, (1 << len(self.members)) - 1)

    def subset(self, judgements: Iterable[Judgement]) -> "JudgementSet":
        mask = 0
        for j in judgements:
            mask |= 1 << self.position(j)
        return JudgementSet(self, mask)


def _require_same(u: Universe, v: Universe) -> None:
    if u is not v and u != v:
        raise UniverseMismatch("judgement sets belong to different universes")


class JudgementSet:
    """A subset of a universe, stored as a bitmask over member positions.

    Lattice structure: ``|`` is join, ``&`` is meet, ``<=`` is inclusion,
    ``complement()`` is relative complement in the universe.  All operations
    require both operands to share the universe.
    """

    __slots__ = ("universe", "mask")

    def __init__(self, universe: Universe, mask: int):
        if mask < 0 or mask >> len(universe):
            raise UniverseMismatch("mask has bits outside the universe")
        self.universe = universe
        self.mask = mask

    def __or__(self, other: "JudgementSet") -> "JudgementSet":
        _require_same(self.universe, other.universe)
        return JudgementSet(self.universe, self.mask | other.mask)

    def __and__(self, other: "JudgementSet") -> "JudgementSet":
        _require_same(self.universe, other.universe)
        return JudgementSet(self.universe, self.mask & other.mask)

    def __sub__(self, other: "JudgementSet") -> "JudgementSet":
        _require_same(self.universe, other.universe)
        return JudgementSet(self.universe, self.mask & ~other.mask)

    def complement(self) -> "JudgementSet":
        return JudgementSet(self.universe, self.universe.full().mask & ~self.mask)

    def issubset(self, other: "JudgementSet") -> bool:
        _require_same(self.universe, other.universe)
        return self.mask & ~other.mask == 0

    __le__ = issubset

    def __contains__(self, j: Judgement) -> bool:
        return (self.mask >> self.universe.position(j)) & 1 == 1

    def __iter__(self) -> Iterator[Judgement]:
        mask, members = self.mask, self.universe.members
        while mask:
            low = mask & -mask
            yield members[low.bit_length() - 1]
            mask ^= low

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, JudgementSet)
            and self.mask == other.mask
            and self.universe == other.universe
        )

    def __hash__(self) -> int:
        return hash((self.mask, self.universe))

    def __repr__(self) -> str:
        return "{" + ", ".join(str(j) for j in self) + "}"

    def judgements(self) -> tuple[Judgement, ...]:
        return tuple(self)


@dataclass(frozen=True, order=True)
class Rule:
    """One inference rule: a finite premise set and a conclusion.

    Premises are normalized to a sorted duplicate-free tuple; a rule with no
    premises is an axiom.
    """

    conclusion: Judgement
    premises: tuple[Judgement, ...] = ()

    def __post_init__(self) -> None:
        normalized = tuple(sorted(set(self.premises)))
        object.__setattr__(self, "premises", normalized)

    @property
    def is_axiom(self) -> bool:
        return not self.premises

    def __str__(self) -> str:
        if not self.premises:
            return f"axiom {self.conclusion}"
        return f"rule {self.conclusion} <- " + " ".join(str(p) for p in self.premises)


class InferenceSystem:
    """A finite inference system with coaxioms.

    Rules are indexed backward (conclusion -> distinct premise sets, each a
    sorted tuple, lists sorted lexicographically) so that "the canonically
    least rule for j" is well defined everywhere a choice has to be made.
    The coaxiom set may be empty, in which case the system is ordinary.
    """

    __slots__ = ("universe", "coaxioms", "_backward", "_compiled")

    def __init__(
        self,
        universe: Universe,
        rules: Iterable[Rule | tuple[Iterable[Judgement], Judgement]],
        coaxioms: JudgementSet | Iterable[Judgement] | None = None,
    ):
        self.universe = universe
        backward: dict[Judgement, set[tuple[Judgement, ...]]] = {}
        for r in rules:
            if not isinstance(r, Rule):
                prs, c = r
                r = Rule(c, tuple(prs))
            if r.conclusion not in universe:
                raise UniverseMismatch(f"rule conclusion {r.conclusion} outside universe")
            for p in r.premises:
                if p not in universe:
                    raise UniverseMismatch(f"rule premise {p} outside universe")
            backward.setdefault(r.conclusion, set()).add(r.premises)
        self._backward: dict[Judgement, tuple[tuple[Judgement, ...], ...]] = {
            c: tuple(sorted(prs)) for c, prs in backward.items()
        }
        if coaxioms is None:
            self.coaxioms = universe.empty()
        elif isinstance(coaxioms, JudgementSet):
            _require_same(universe, coaxioms.universe)
            self.coaxioms = coaxioms
        else:
            self.coaxioms = universe.subset(coaxioms)
        self._compiled: _Compiled | None = None

    # -- inspection ----------------------------------------------------------

    def premise_sets(self, conclusion: Judgement) -> tuple[tuple[Judgement, ...], ...]:
        """All premise sets of rules concluding the given judgement."""
        if conclusion not in self.universe:
            raise UniverseMismatch(f"{conclusion} is not in this universe")
        return self._backward.get(conclusion, ())

    def rules(self) -> Iterator[Rule]:
        for c in sorted(self._backward):
            for prs in self._backward[c]:
                yield Rule(c, prs)

    @property
    def rule_count(self) -> int:
        return sum(len(v) for v in self._backward.values())

    @property
    def is_deterministic(self) -> bool:
        """At most one rule per conclusion (meets distribute over inference)."""
        return all(len(v) <= 1 for v in self._backward.values())

    def __repr__(self) -> str:
        return (
            f"InferenceSystem({len(self.universe)} judgements, "
            f"{self.rule_count} rules, {len(self.coaxioms)} coaxioms)"
        )

    def _compile(self) -> "_Compiled":
        if self._compiled is None:
            self._compiled = _Compiled(self)
        return self._compiled


class _Compiled:
    """Flat, position-indexed rule tables shared by the iteration engines."""

    __slots__ = ("premise_masks", "rule_premises", "rule_conclusion", "rules_by_premise")

    def __init__(self, sys: InferenceSystem):
        uni = sys.universe
        # per conclusion position: tuple of premise bitmasks
        self.premise_masks: list[tuple[int, tuple[int, ...]]] = []
        # flat rule tables for the level-synchronized engines
        self.rule_premises: list[tuple[int, ...]] = []
        self.rule_conclusion: list[int] = []
        self.rules_by_premise: list[list[int]] = [[] for _ in range(len(uni))]
        for c, premise_sets in sys._backward.items():
            cpos = uni.position(c)
            masks = []
            for prs in premise_sets:
                positions = tuple(uni.position(p) for p in prs)
                mask = 0
                for pos in positions:
                    mask |= 1 << pos
                masks.append(mask)
                rid = len(self.rule_premises)
                self.rule_premises.append(positions)
                self.rule_conclusion.append(cpos)
                for pos in positions:
                    self.rules_by_premise[pos].append(rid)
            self.premise_masks.append((cpos, tuple(masks)))


@dataclass(frozen=True)
class IterationTrace:
    """The Kleene chain S0, S1, ... produced by iterating the inference
    operator, recorded up to and including the stabilization witness (the last
    two entries are equal).  ``len(trace)`` counts transformer applications,
    i.e. ``len(steps) - 1``.
    """

    steps: tuple[JudgementSet, ...]

    def __post_init__(self) -> None:
        if len(self.steps) < 2 or self.steps[-1] != self.steps[-2]:
            raise ValueError("trace must end with a stabilization witness")

    def __len__(self) -> int:
        return len(self.steps) - 1

    def __iter__(self) -> Iterator[JudgementSet]:
        return iter(self.steps)

    @property
    def result(self) -> JudgementSet:
        return self.steps[-1]

    def at(self, n: int) -> JudgementSet:
        """The n-th iterate; past stabilization the chain is constant."""
        return self.steps[min(n, len(self.steps) - 1)]


# -- the inference operator and its fixed points -----------------------------


def infer_step(sys: InferenceSystem, s: JudgementSet) -> JudgementSet:
    """One application of the inference operator.

    Returns every judgement that is the conclusion of some rule whose
    premises all lie in ``s``.  Coaxioms play no part here.
    """
    _require_same(sys.universe, s.universe)
    compiled = sys._compile()
    sm = s.mask
    out = 0
    for cpos, masks in compiled.premise_masks:
        for pm in masks:
            if pm & sm == pm:
                out |= 1 << cpos
                break
    return JudgementSet(sys.universe, out)


def with_coaxioms_as_axioms(sys: InferenceSystem) -> InferenceSystem:
    """The system where every coaxiom becomes an ordinary axiom.

    Inference in the result satisfies F'(s) = F(s) | coaxioms pointwise; its
    inductive interpretation is the closure of the coaxiom set.
    """
    extra = [Rule(j) for j in sys.coaxioms]
    return InferenceSystem(sys.universe, list(sys.rules()) + extra, None)


def restrict_to(sys: InferenceSystem, s: JudgementSet) -> InferenceSystem:
    """The system keeping only rules whose conclusion lies in ``s``.

    The universe and the coaxiom set are untouched; inference in the result
    satisfies F'(x) = F(x) & s pointwise.
    """
    _require_same(sys.universe, s.universe)
    kept = [r for r in sys.rules() if r.conclusion in s]
    return InferenceSystem(sys.universe, kept, sys.coaxioms)


def _ascending_trace(sys: InferenceSystem) -> list[int]:
    """Masks of the exact Kleene chain from the empty set, strictly growing,
    computed by level-synchronized counting (each rule fires the step after
    its last premise arrived) rather than whole-system rescans.
    """
    compiled = sys._compile()
    missing = [len(prs) for prs in compiled.rule_premises]
    current = 0
    frontier = [rid for rid, m in enumerate(missing) if m == 0]
    steps = [0]
    seen_rules_fired = [False] * len(missing)
    while True:
        new_positions: list[int] = []
        next_mask = current
        for rid in frontier:
            if seen_rules_fired[rid]:
                continue
            seen_rules_fired[rid] = True
            cpos = compiled.rule_conclusion[rid]
            bit = 1 << cpos
            if not next_mask & bit:
                next_mask |= bit
                new_positions.append(cpos)
        if next_mask == current:
            break
        steps.append(next_mask)
        current = next_mask
        frontier = []
        for pos in new_positions:
            for rid in compiled.rules_by_premise[pos]:
                missing[rid] -= 1
                if missing[rid] == 0:
                    frontier.append(rid)
    return steps


def _descending_trace(sys: InferenceSystem, start_mask: int) -> list[int]:
    """Masks of the exact Kleene chain descending from a closed start set.

    A rule dies the moment one premise has died; a judgement dies the step
    after its last live rule died.  This mirrors _ascending_trace dually and
    is only meaningful when F(start) <= start, which callers ensure.
    """
    compiled = sys._compile()
    uni_size = len(sys.universe)
    rule_dead = [False] * len(compiled.rule_premises)
    live_rules = [0] * uni_size
    for rid, prs in enumerate(compiled.rule_premises):
        cpos = compiled.rule_conclusion[rid]
        if not (start_mask >> cpos) & 1:
            continue  # rules concluding outside the start set never matter
        dead = any(not (start_mask >> p) & 1 for p in prs)
        if dead:
            rule_dead[rid] = True
        else:
            live_rules[cpos] += 1
    judgement_dead = [not (start_mask >> pos) & 1 for pos in range(uni_size)]

    current = start_mask
    steps = [current]
    # judgements of the start set with no live rule die in the first step;
    # afterwards deaths propagate one level at a time
    frontier = [
        pos
        for pos in range(uni_size)
        if (start_mask >> pos) & 1 and live_rules[pos] == 0
    ]
    while frontier:
        next_mask = current
        for pos in frontier:
            next_mask &= ~(1 << pos)
            judgement_dead[pos] = True
        steps.append(next_mask)
        current = next_mask
        new_frontier: list[int] = []
        for pos in frontier:
            for rid in compiled.rules_by_premise[pos]:
                if rule_dead[rid]:
                    continue
                rule_dead[rid] = True
                cpos = compiled.rule_conclusion[rid]
                if judgement_dead[cpos]:
                    continue
                live_rules[cpos] -= 1
                if live_rules[cpos] == 0:
                    new_frontier.append(cpos)
        frontier = new_frontier
    return steps


def _as_trace(universe: Universe, masks: list[int]) -> IterationTrace:
    masks = masks + [masks[-1]]  # stabilization witness
    return IterationTrace(tuple(JudgementSet(universe, m) for m in masks))


def inductive(sys: InferenceSystem) -> tuple[JudgementSet, IterationTrace]:
    """Least fixed point of the inference operator: judgements with finite,
    well-founded proof trees.  Coaxioms are ignored."""
    masks = _ascending_trace(sys)
    trace = _as_trace(sys.universe, masks)
    return trace.result, trace


def coinductive(sys: InferenceSystem) -> tuple[JudgementSet, IterationTrace]:
    """Greatest fixed point of the inference operator: judgements with
    arbitrary, possibly infinite proof trees.  Coaxioms are ignored."""
    masks = _descending_trace(sys, sys.universe.full().mask)
    trace = _as_trace(sys.universe, masks)
    return trace.result, trace


def closure_of(sys: InferenceSystem) -> JudgementSet:
    """Least set that contains the coaxioms and is closed under the rules:
    the inductive interpretation after turning coaxioms into axioms."""
    result, _ = inductive(with_coaxioms_as_axioms(sys))
    return result


def kernel_below(
    sys: InferenceSystem, beta: JudgementSet
) -> tuple[JudgementSet, IterationTrace]:
    """Greatest fixed point of the inference operator below ``beta``.

    ``beta`` must be closed (one inference step from it stays inside it);
    otherwise descent need not converge to a fixed point and BetaNotClosed is
    raised, carrying a violating conclusion.
    """
    _require_same(sys.universe, beta.universe)
    escaped = infer_step(sys, beta) - beta
    if escaped:
        raise BetaNotClosed(next(iter(escaped)))
    masks = _descending_trace(sys, beta.mask)
    trace = _as_trace(sys.universe, masks)
    return trace.result, trace


def generated(sys: InferenceSystem) -> JudgementSet:
    """The interpretation generated by the coaxioms: the greatest fixed point
    below the closure of the coaxiom set.

    Computed by descending from the closure; cross-checked against the
    equivalent formulation as the plain coinductive interpretation of the
    system restricted to conclusions inside the closure.
    """
    beta = closure_of(sys)
    result, _ = kernel_below(sys, beta)
    alt, _ = coinductive(restrict_to(sys, beta))
    assert result == alt, "the two characterizations of the generated set diverged"
    return result


PremiseProvider = Callable[[Judgement], Iterable[Iterable[Judgement]]]


def reachable_universe(
    provider: PremiseProvider, goals: Iterable[Judgement], cap: int
) -> Universe:
    """Backward closure of the goals under "add every premise of every rule
    concluding a member", capped at ``cap`` judgements.

    The provider enumerates, for a judgement, the premise sets of all rules
    concluding it.  Raises CapExceeded when the closure would grow past the
    cap, which signals the system is not finitely reachable at this budget.
    """
    seen: set[Judgement] = set()
    work = list(goals)
    while work:
        j = work.pop()
        if j in seen:
            continue
        if len(seen) >= cap:
            raise CapExceeded(cap)
        seen.add(j)
        for premise_set in provider(j):
            work.extend(premise_set)
    return Universe(seen)
