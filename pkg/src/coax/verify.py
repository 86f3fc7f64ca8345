"""Specification checkers and exhaustive brute-force oracles.

The checkers certify candidate sets against a system: closedness (no rule
escapes the set), consistency (every member is supported from inside), and the
bounded coinduction principle, which soundly places a candidate below the
generated interpretation.  The brute-force oracle recomputes every
interpretation by enumerating all subsets of the universe, entirely
independently of the iteration engine, so the two can check each other.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Union

from .core import (
    CoaxError,
    InferenceSystem,
    Judgement,
    JudgementSet,
    Rule,
    closure_of,
    generated,
    infer_step,
    kernel_below,
)

DEFAULT_ORACLE_CAP = 16
ORACLE_CAP_ENV = "COAX_ORACLE_CAP"


class UniverseTooLarge(CoaxError):
    """The universe exceeds the brute-force enumeration cap."""

    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(
            f"universe has {size} judgements, oracle cap is {cap} "
            f"(override with {ORACLE_CAP_ENV})"
        )


@dataclass(frozen=True)
class Verdict:
    """ok, or a re-checkable counterexample: the rule whose conclusion escaped
    (closedness), the unsupported judgement (consistency), or which conjunct
    of bounded coinduction failed."""

    ok: bool
    witness: Union[Rule, Judgement, None] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_closed(sys: InferenceSystem, s: JudgementSet) -> Verdict:
    """s is closed iff every rule with premises inside s concludes inside s."""
    for rule in sys.rules():
        if rule.conclusion not in s and all(p in s for p in rule.premises):
            return Verdict(False, rule, f"rule escapes the set at {rule.conclusion}")
    return Verdict(True)


def check_consistent(sys: InferenceSystem, s: JudgementSet) -> Verdict:
    """s is consistent iff every member is the conclusion of some rule whose
    premises lie inside s."""
    for c in s:
        if not any(all(p in s for p in prs) for prs in sys.premise_sets(c)):
            return Verdict(False, c, f"{c} has no supporting rule inside the set")
    return Verdict(True)


def bounded_coinduction(sys: InferenceSystem, s: JudgementSet) -> Verdict:
    """The bounded coinduction principle: if s sits below the closure of the
    coaxioms and is consistent, then s is contained in the generated
    interpretation.  ok certifies both premises."""
    beta = closure_of(sys)
    if not s.issubset(beta):
        stray = next(iter(s - beta))
        return Verdict(False, stray, f"{stray} is not below the closure of the coaxioms")
    inner = check_consistent(sys, s)
    if not inner:
        return Verdict(False, inner.witness, inner.reason)
    return Verdict(True)


def refute_level(sys: InferenceSystem, j: Judgement) -> Optional[int]:
    """The least n such that j fails to survive n descending steps from the
    closure of the coaxioms — i.e. j has no approximated proof of level n —
    or None when j survives to stabilization (exactly the generated set on a
    finite universe)."""
    beta = closure_of(sys)
    _, descent = kernel_below(sys, beta)
    if j in descent.result:
        return None
    for n, step in enumerate(descent.steps):
        if j not in step:
            return n
    raise AssertionError("unreachable: j missing from the limit but in every step")


@dataclass(frozen=True)
class BruteForceResult:
    fixed_points: tuple[JudgementSet, ...]
    mu: JudgementSet
    nu: JudgementSet
    gen: JudgementSet


def _oracle_cap() -> int:
    raw = os.environ.get(ORACLE_CAP_ENV)
    if raw is None:
        return DEFAULT_ORACLE_CAP
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{ORACLE_CAP_ENV} must be an integer, got {raw!r}") from None


def brute_force(sys: InferenceSystem, cap: Optional[int] = None) -> BruteForceResult:
    """Enumerate every subset of the universe and read the interpretations off
    the definitions: the least pre-fixed point, the greatest post-fixed point,
    and the greatest fixed point below the least pre-fixed point above the
    coaxioms.  Independent of the Kleene iteration engine by design.
    """
    if cap is None:
        cap = _oracle_cap()
    n = len(sys.universe)
    if n > cap:
        raise UniverseTooLarge(n, cap)
    uni = sys.universe
    full = (1 << n) - 1
    gamma = sys.coaxioms.mask

    # flat premise tables; F evaluated directly on integer masks
    compiled = sys._compile()
    tables = compiled.premise_masks

    def f(mask: int) -> int:
        out = 0
        for cpos, masks in tables:
            for pm in masks:
                if pm & mask == pm:
                    out |= 1 << cpos
                    break
        return out

    fixed: list[int] = []
    mu = full
    nu = 0
    beta_star = full  # least pre-fixed point above the coaxioms
    for mask in range(1 << n):
        fm = f(mask)
        pre = fm & ~mask == 0
        post = mask & ~fm == 0
        if pre:
            mu &= mask
            if gamma & ~mask == 0:
                beta_star &= mask
        if post:
            nu |= mask
        if pre and post:
            fixed.append(mask)
    gen = 0
    for mask in fixed:
        if mask & ~beta_star == 0:
            gen |= mask
    return BruteForceResult(
        fixed_points=tuple(JudgementSet(uni, m) for m in fixed),
        mu=JudgementSet(uni, mu),
        nu=JudgementSet(uni, nu),
        gen=JudgementSet(uni, gen),
    )
