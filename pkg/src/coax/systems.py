"""Builders that instantiate judgement families as concrete inference systems.

Each builder turns a finite structure (graph, grammar, regular term, lambda
term) into an ``(InferenceSystem, Universe)`` pair whose rules are the fully
instantiated meta-rules for that judgement, with the coaxiom set that gives
the intended semantics under the generated interpretation.

All builders keep the universe backward-closed (every premise of every rule is
itself a universe member) and emit space-free judgement texts, so every built
system can round-trip through the extensional file format.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

from .core import (
    CapExceeded,
    InferenceSystem,
    Judgement,
    Rule,
    Universe,
)
from .regular import EqSystem, ShapeMismatch, VAR, carrier

REACH_NODE_CAP = 10
FIRST_TERMINAL_CAP = 8
DIST_NODE_CAP = 10
DIST_WEIGHT_CAP = 64
BIGSTEP_CLOSURE_CAP = 2000


# -- extended costs ------------------------------------------------------------


@dataclass(frozen=True)
class ExtCost:
    """A natural number extended with infinity (None); infinity is absorbing
    for + and maximal for the order, and min over no costs is infinity."""

    finite: Optional[int] = None

    def __post_init__(self) -> None:
        if self.finite is not None and self.finite < 0:
            raise ValueError("costs are non-negative")

    @property
    def is_infinite(self) -> bool:
        return self.finite is None

    def __add__(self, other: Union["ExtCost", int]) -> "ExtCost":
        if isinstance(other, int):
            other = ExtCost(other)
        if self.finite is None or other.finite is None:
            return INFINITY
        return ExtCost(self.finite + other.finite)

    __radd__ = __add__

    def __lt__(self, other: "ExtCost") -> bool:
        if self.finite is None:
            return False
        if other.finite is None:
            return True
        return self.finite < other.finite

    def __le__(self, other: "ExtCost") -> bool:
        return self == other or self < other

    def __str__(self) -> str:
        return "inf" if self.finite is None else str(self.finite)

    @staticmethod
    def minimum(costs: Iterable["ExtCost"]) -> "ExtCost":
        best = INFINITY
        for c in costs:
            if c < best:
                best = c
        return best


INFINITY = ExtCost(None)


# -- graphs --------------------------------------------------------------------


class Graph:
    """A finite directed graph with optional non-negative edge weights."""

    __slots__ = ("nodes", "adj", "weights")

    def __init__(
        self,
        nodes: Iterable[str],
        edges: Iterable[tuple[str, str]],
        weights: Optional[Mapping[tuple[str, str], int]] = None,
    ):
        self.nodes: tuple[str, ...] = tuple(sorted(set(nodes)))
        node_set = set(self.nodes)
        adj: dict[str, set[str]] = {v: set() for v in self.nodes}
        edge_set = set()
        for u, v in edges:
            if u not in node_set or v not in node_set:
                raise ValueError(f"edge {u}->{v} mentions an undeclared node")
            adj[u].add(v)
            edge_set.add((u, v))
        self.adj: dict[str, tuple[str, ...]] = {v: tuple(sorted(adj[v])) for v in self.nodes}
        if weights is not None:
            if set(weights) != edge_set:
                raise ValueError("weights must be given exactly on the edges")
            if any(w < 0 for w in weights.values()):
                raise ValueError("weights are non-negative")
            self.weights: Optional[dict[tuple[str, str], int]] = dict(weights)
        else:
            self.weights = None

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return tuple((u, v) for u in self.nodes for v in self.adj[u])

    def weight(self, u: str, v: str) -> int:
        return 1 if self.weights is None else self.weights[(u, v)]


def parse_graph(text: str) -> Graph:
    """`node x` and `edge u v [w]` lines; `#` comments; nodes mentioned in
    edges are declared implicitly."""
    nodes: set[str] = set()
    edges: list[tuple[str, str]] = []
    weights: dict[tuple[str, str], int] = {}
    weighted = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "node" and len(parts) == 2:
            nodes.add(parts[1])
        elif parts[0] == "edge" and len(parts) in (3, 4):
            u, v = parts[1], parts[2]
            nodes.update((u, v))
            edges.append((u, v))
            if len(parts) == 4:
                weighted = True
                try:
                    weights[(u, v)] = int(parts[3])
                except ValueError:
                    raise ValueError(f"line {lineno}: weight must be an integer") from None
        else:
            raise ValueError(f"line {lineno}: expected `node x` or `edge u v [w]`")
    if weighted:
        for e in edges:
            weights.setdefault(e, 1)
    return Graph(nodes, edges, weights if weighted else None)


# -- grammars ------------------------------------------------------------------


class Grammar:
    """A context-free grammar; terminals are the body symbols that never head
    a production."""

    __slots__ = ("terminals", "nonterminals", "productions")

    def __init__(
        self,
        terminals: Iterable[str],
        nonterminals: Iterable[str],
        productions: Iterable[tuple[str, Sequence[str]]],
    ):
        self.terminals = frozenset(terminals)
        self.nonterminals = frozenset(nonterminals)
        if self.terminals & self.nonterminals:
            raise ValueError("terminals and nonterminals must be disjoint")
        prods: list[tuple[str, tuple[str, ...]]] = []
        seen = set()
        for head, body in productions:
            if head not in self.nonterminals:
                raise ValueError(f"production head {head!r} is not a nonterminal")
            body = tuple(body)
            for sym in body:
                if sym not in self.terminals and sym not in self.nonterminals:
                    raise ValueError(f"unknown symbol {sym!r} in a production body")
            if (head, body) not in seen:
                seen.add((head, body))
                prods.append((head, body))
        self.productions = tuple(sorted(prods))

    def bodies(self, head: str) -> tuple[tuple[str, ...], ...]:
        return tuple(b for h, b in self.productions if h == head)

    def nullables(self) -> frozenset[str]:
        """Nonterminals deriving the empty string, by the standard bottom-up
        worklist (an inductive inference system over judgements `nullable A`)."""
        judgements = {a: Judgement(f"nullable({a})") for a in self.nonterminals}
        uni = Universe(judgements.values())
        rules = []
        for head, body in self.productions:
            if all(sym in self.nonterminals for sym in body):
                rules.append(Rule(judgements[head], tuple(judgements[s] for s in body)))
        from .core import inductive

        result, _ = inductive(InferenceSystem(uni, rules))
        return frozenset(a for a in self.nonterminals if judgements[a] in result)


def parse_grammar(text: str) -> Grammar:
    """`A -> X Y Z` per production, `A -> .` for the empty body, `#` comments.
    Heads are the nonterminals; every other symbol is a terminal."""
    productions: list[tuple[str, tuple[str, ...]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 2 or parts[1] != "->":
            raise ValueError(f"line {lineno}: expected `A -> body` or `A -> .`")
        head = parts[0]
        body = tuple(parts[2:])
        if body == (".",):
            body = ()
        productions.append((head, body))
    heads = {h for h, _ in productions}
    symbols = {s for _, body in productions for s in body}
    return Grammar(symbols - heads, heads, productions)


# -- lambda terms ----------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    index: int  # de Bruijn


@dataclass(frozen=True)
class Abs:
    body: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


Term = Union[Var, Abs, App]


def parse_lambda(text: str) -> Term:
    """Minimal lambda syntax: `\\x. body`, application by juxtaposition
    (left-associative), parentheses.  The term must be closed."""
    tokens = _lex_lambda(text)
    pos = 0

    def peek() -> Optional[str]:
        return tokens[pos] if pos < len(tokens) else None

    def take(expected: Optional[str] = None) -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of lambda term")
        tok = tokens[pos]
        if expected is not None and tok != expected:
            raise ValueError(f"expected {expected!r}, found {tok!r}")
        pos += 1
        return tok

    def parse_term(env: tuple[str, ...]) -> Term:
        if peek() == "\\":
            take("\\")
            name = take()
            if not name.isidentifier():
                raise ValueError(f"bad binder name {name!r}")
            take(".")
            return Abs(parse_term((name,) + env))
        return parse_app(env)

    def parse_app(env: tuple[str, ...]) -> Term:
        t = parse_atom(env)
        while True:
            nxt = peek()
            if nxt is None or nxt in (")", "."):
                return t
            # a trailing abstraction extends as far right as possible
            t = App(t, parse_term(env) if nxt == "\\" else parse_atom(env))

    def parse_atom(env: tuple[str, ...]) -> Term:
        tok = peek()
        if tok == "(":
            take("(")
            t = parse_term(env)
            take(")")
            return t
        tok = take()
        if not tok.isidentifier():
            raise ValueError(f"unexpected token {tok!r}")
        try:
            return Var(env.index(tok))
        except ValueError:
            raise ValueError(f"free variable {tok!r}: goal terms must be closed") from None

    term = parse_term(())
    if pos != len(tokens):
        raise ValueError(f"trailing input from {tokens[pos]!r}")
    return term


def _lex_lambda(text: str) -> list[str]:
    tokens: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "\\λ().":
            tokens.append("\\" if ch == "λ" else ch)
            i += 1
        elif ch.isalnum() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            tokens.append(text[i:j])
            i = j
        else:
            raise ValueError(f"stray character {ch!r} in lambda term")
    return tokens


def substitute(body: Term, value: Term) -> Term:
    """body[x <- value] for the innermost binder; value must be closed, which
    makes capture impossible and no index shifting of value necessary."""

    def go(t: Term, depth: int) -> Term:
        if isinstance(t, Var):
            if t.index == depth:
                return value
            return Var(t.index - 1) if t.index > depth else t
        if isinstance(t, Abs):
            return Abs(go(t.body, depth + 1))
        return App(go(t.fn, depth), go(t.arg, depth))

    return go(body, 0)


def term_text(t: Term, depth: int = 0) -> str:
    """Canonical space-free serialization with binders named by depth, so
    alpha-equivalent terms print identically."""
    if isinstance(t, Var):
        return f"var(x{depth - 1 - t.index})"
    if isinstance(t, Abs):
        return f"abs(x{depth},{term_text(t.body, depth + 1)})"
    return f"app({term_text(t.fn, depth)},{term_text(t.arg, depth)})"


# -- shared text helpers ---------------------------------------------------------


def _set_text(items: Iterable[str]) -> str:
    return "{" + ",".join(sorted(items)) + "}"


def _int_set_text(items: Iterable[int]) -> str:
    return "{" + ",".join(str(i) for i in sorted(items)) + "}"


def _seq_text(symbols: Sequence[str]) -> str:
    return "[" + ",".join(symbols) + "]"


# -- reachability ----------------------------------------------------------------


def build_reach(g: Graph, cap: int = REACH_NODE_CAP) -> tuple[InferenceSystem, Universe]:
    """Judgements `reach(v,N)`: N is the set of nodes reachable from v.

    One rule instance per node and per choice of a claimed reachable set for
    each neighbour; the conclusion joins the node with the claims.  Coaxioms
    claim the empty set for every node; the generated interpretation then
    pins N to the true reachable set.
    """
    if len(g.nodes) > cap:
        raise CapExceeded(cap, f"graph has {len(g.nodes)} nodes, cap is {cap}")
    all_subsets = [frozenset(c) for r in range(len(g.nodes) + 1)
                   for c in itertools.combinations(g.nodes, r)]
    J = {(v, ns): Judgement(f"reach({v},{_set_text(ns)})")
         for v in g.nodes for ns in all_subsets}
    uni = Universe(J.values())
    rules = []
    for v in g.nodes:
        targets = g.adj[v]
        for claim in itertools.product(all_subsets, repeat=len(targets)):
            conclusion = frozenset({v}.union(*claim)) if claim else frozenset({v})
            premises = tuple(J[(t, ns)] for t, ns in zip(targets, claim))
            rules.append(Rule(J[(v, conclusion)], premises))
    coax = [J[(v, frozenset())] for v in g.nodes]
    return InferenceSystem(uni, rules, coax), uni


# -- first sets ------------------------------------------------------------------


def build_first(
    g: Grammar, cap: int = FIRST_TERMINAL_CAP
) -> tuple[InferenceSystem, Universe]:
    """Judgements `first(alpha,F)`: F is the set of terminals that can begin a
    string derived from the symbol sequence alpha.

    Sequences are the suffix closure of the production bodies plus every
    single nonterminal and the empty sequence.  Sequence rules decompose a
    leading terminal or nonterminal (with the nullable side condition);
    every nonterminal gets one rule per combination of claimed first sets for
    all its production bodies, concluding their union; coaxioms claim the
    empty first set for every nonterminal.

    Premise claims that no rule chain can ever establish (a terminal-headed
    body with a first set other than its head; the empty body with a nonempty
    set) are not instantiated; this leaves all interpretations unchanged and
    keeps the rule count polynomial in practice.
    """
    if len(g.terminals) > cap:
        raise CapExceeded(cap, f"{len(g.terminals)} terminals, cap is {cap}")
    seqs: set[tuple[str, ...]] = {()}
    for _, body in g.productions:
        for i in range(len(body) + 1):
            seqs.add(body[i:])
    for a in g.nonterminals:
        seqs.add((a,))
    subsets = [frozenset(c) for r in range(len(g.terminals) + 1)
               for c in itertools.combinations(sorted(g.terminals), r)]
    J = {(seq, fs): Judgement(f"first({_seq_text(seq)},{_set_text(fs)})")
         for seq in seqs for fs in subsets}
    uni = Universe(J.values())
    nullable = g.nullables()

    def claims(seq: tuple[str, ...]) -> list[frozenset[str]]:
        # first sets a derivation could actually assign to this sequence
        if not seq:
            return [frozenset()]
        if seq[0] in g.terminals:
            return [frozenset({seq[0]})]
        return subsets

    rules = []
    for seq in seqs:
        if not seq:
            rules.append(Rule(J[(seq, frozenset())]))  # first of the empty sequence
            continue
        head, rest = seq[0], seq[1:]
        if head in g.terminals:
            rules.append(Rule(J[(seq, frozenset({head}))]))
            continue
        if not rest:
            continue  # single nonterminals are concluded from their productions
        if head not in nullable:
            for fs in subsets:
                rules.append(Rule(J[(seq, fs)], (J[((head,), fs)],)))
        else:
            for fs in subsets:
                for fs2 in claims(rest):
                    rules.append(
                        Rule(J[(seq, fs | fs2)], (J[((head,), fs)], J[(rest, fs2)]))
                    )
    for a in sorted(g.nonterminals):
        bodies = g.bodies(a)
        # zero bodies contribute the single empty combination: first(A,{})
        for combo in itertools.product(*(claims(b) for b in bodies)):
            conclusion = frozenset().union(*combo)
            premises = tuple(J[(b, fs)] for b, fs in zip(bodies, combo))
            rules.append(Rule(J[((a,), conclusion)], premises))
    coax = [J[((a,), frozenset())] for a in sorted(g.nonterminals)]
    return InferenceSystem(uni, rules, coax), uni


# -- list predicates ---------------------------------------------------------------


def _canonical_list(l: EqSystem) -> EqSystem:
    if l.family != "list":
        raise ShapeMismatch(f"expected a list, got a {l.family}")
    return l.canonical()


def _head_tail(canon: EqSystem, state: str) -> tuple[int, str]:
    b = canon[state]
    head = b.args[0]
    if head.kind == VAR:
        raise ShapeMismatch("list elements must be integer atoms here")
    return head.value, b.args[1].value  # type: ignore[return-value]


def build_list_preds(
    l: EqSystem, x: int
) -> dict[str, tuple[InferenceSystem, Universe]]:
    """The four list predicates over the subterm states of a (possibly
    cyclic) integer list, as one system each:

    - member:  `member(x,s,b)` - does x occur in the list at state s
    - allpos:  `allpos(s,b)`   - are all elements positive
    - maxelem: `maxelem(s,z)`  - z is the greatest element (coaxioms guess
      the head, so the value is also attained, not just an upper bound)
    - elems:   `elems(s,xs)`   - xs is the set of elements

    The member judgement is specialized to the given query element x.
    """
    canon = _canonical_list(l)
    names = sorted(canon.states)
    cons_states = [s for s in names if canon[s].tag == "cons"]
    car = carrier(canon)

    out: dict[str, tuple[InferenceSystem, Universe]] = {}

    # member(x, s, b)
    J = {(s, b): Judgement(f"member({x},{s},{b})") for s in names for b in "TF"}
    uni = Universe(J.values())
    rules = []
    for s in cons_states:
        head, tail = _head_tail(canon, s)
        if head == x:
            rules.append(Rule(J[(s, "T")]))
        else:
            for b in "TF":
                rules.append(Rule(J[(s, b)], (J[(tail, b)],)))
    coax = [J[(s, "F")] for s in names]
    out["member"] = (InferenceSystem(uni, rules, coax), uni)

    # allpos(s, b)
    J = {(s, b): Judgement(f"allpos({s},{b})") for s in names for b in "TF"}
    uni = Universe(J.values())
    rules = []
    for s in names:
        if canon[s].tag == "nil":
            rules.append(Rule(J[(s, "T")]))
            continue
        head, tail = _head_tail(canon, s)
        if head <= 0:
            rules.append(Rule(J[(s, "F")]))
        else:
            for b in "TF":
                rules.append(Rule(J[(s, b)], (J[(tail, b)],)))
    coax = [J[(s, "T")] for s in names]
    out["allpos"] = (InferenceSystem(uni, rules, coax), uni)

    # maxelem(s, z) over the carrier; carriers are closed under binary max
    J = {(s, z): Judgement(f"maxelem({s},{z})") for s in names for z in sorted(car)}
    uni = Universe(J.values())
    rules = []
    for s in cons_states:
        head, tail = _head_tail(canon, s)
        if canon[tail].tag == "nil":
            rules.append(Rule(J[(s, head)]))
        for y in sorted(car):
            rules.append(Rule(J[(s, max(head, y))], (J[(tail, y)],)))
    coax = [J[(s, _head_tail(canon, s)[0])] for s in cons_states]
    out["maxelem"] = (InferenceSystem(uni, rules, coax), uni)

    # elems(s, xs) over subsets of the carrier
    car_sorted = sorted(car)
    xs_all = [frozenset(c) for r in range(len(car_sorted) + 1)
              for c in itertools.combinations(car_sorted, r)]
    J = {(s, xs): Judgement(f"elems({s},{_int_set_text(xs)})")
         for s in names for xs in xs_all}
    uni = Universe(J.values())
    rules = []
    for s in names:
        if canon[s].tag == "nil":
            rules.append(Rule(J[(s, frozenset())]))
            continue
        head, tail = _head_tail(canon, s)
        for xs in xs_all:
            rules.append(Rule(J[(s, xs | {head})], (J[(tail, xs)],)))
    coax = [J[(s, frozenset())] for s in names]
    out["elems"] = (InferenceSystem(uni, rules, coax), uni)

    return out


# -- weighted distances and shortest paths -------------------------------------------


def _check_weighted_caps(g: Graph, node_cap: int, weight_cap: int) -> int:
    if len(g.nodes) > node_cap:
        raise CapExceeded(node_cap, f"{len(g.nodes)} nodes, cap is {node_cap}")
    total = sum(g.weight(u, v) for u, v in g.edges)
    if total > weight_cap:
        raise CapExceeded(weight_cap, f"total edge weight {total}, cap is {weight_cap}")
    return total


def build_dist(
    g: Graph, node_cap: int = DIST_NODE_CAP, weight_cap: int = DIST_WEIGHT_CAP
) -> tuple[InferenceSystem, Universe]:
    """Judgements `dist(v,u,d)`: d is the least weight of a path from v to u,
    `inf` when unreachable.  Missing weights default to 1.

    Finite d ranges over 0..W with W the total edge weight: any simple path
    weighs at most W, and larger finite claims can never enter the generated
    interpretation, so dropping them loses nothing.  Coaxioms claim `inf` for
    every ordered pair of distinct nodes.
    """
    total = _check_weighted_caps(g, node_cap, weight_cap)
    costs = [ExtCost(d) for d in range(total + 1)] + [INFINITY]
    J = {(v, u, c): Judgement(f"dist({v},{u},{c})")
         for v in g.nodes for u in g.nodes for c in costs}
    uni = Universe(J.values())
    rules = []
    for v in g.nodes:
        for u in g.nodes:
            if v == u:
                rules.append(Rule(J[(v, u, ExtCost(0))]))
                continue
            targets = g.adj[v]
            if not targets:
                rules.append(Rule(J[(v, u, INFINITY)]))
                continue
            for combo in itertools.product(costs, repeat=len(targets)):
                d = ExtCost.minimum(g.weight(v, t) + c for t, c in zip(targets, combo))
                if (v, u, d) not in J:
                    continue  # a finite claim beyond W; unreachable in any case
                premises = tuple(J[(t, u, c)] for t, c in zip(targets, combo))
                rules.append(Rule(J[(v, u, d)], premises))
    coax = [J[(v, u, INFINITY)] for v in g.nodes for u in g.nodes if v != u]
    return InferenceSystem(uni, rules, coax), uni


def _simple_paths(g: Graph, source: str) -> dict[str, list[tuple[str, ...]]]:
    """All simple paths from source, grouped by final node (the trivial path
    is listed under source itself)."""
    out: dict[str, list[tuple[str, ...]]] = {v: [] for v in g.nodes}

    def walk(path: tuple[str, ...]) -> None:
        out[path[-1]].append(path)
        for t in g.adj[path[-1]]:
            if t not in path:
                walk(path + (t,))

    walk((source,))
    return out


def _path_weight(g: Graph, path: tuple[str, ...]) -> int:
    return sum(g.weight(a, b) for a, b in zip(path, path[1:]))


def build_spath(
    g: Graph, node_cap: int = DIST_NODE_CAP, weight_cap: int = DIST_WEIGHT_CAP
) -> tuple[InferenceSystem, Universe]:
    """Judgements `spath(v,u,p,d)`: p is the shortest path from v to u and d
    its weight, `spath(v,u,bot,inf)` when there is none.

    Each rule consults one claimed (path, weight) per neighbour and concludes
    via the neighbour minimizing the extended weight, ties broken towards the
    alphabetically least neighbour.  Claims range over the simple paths: with
    positive weights no shortest path repeats a node, and prepending `v` to a
    claim that already contains v would fall outside the universe, so such
    rule instances are skipped.
    """
    total = _check_weighted_caps(g, node_cap, weight_cap)
    del total

    def path_text(p: Union[tuple[str, ...], None]) -> str:
        return "bot" if p is None else _seq_text(p)

    # claimable (path, weight) pairs per ordered node pair
    claims: dict[tuple[str, str], list[tuple[Optional[tuple[str, ...]], ExtCost]]] = {}
    for v in g.nodes:
        by_target = _simple_paths(g, v)
        for u in g.nodes:
            if v == u:
                claims[(v, u)] = [((v,), ExtCost(0))]
            else:
                claims[(v, u)] = [(p, ExtCost(_path_weight(g, p))) for p in by_target[u]]
                claims[(v, u)].append((None, INFINITY))
    J = {
        (v, u, p, c): Judgement(f"spath({v},{u},{path_text(p)},{c})")
        for (v, u), pairs in claims.items()
        for p, c in pairs
    }
    uni = Universe(J.values())
    rules = []
    for v in g.nodes:
        for u in g.nodes:
            if v == u:
                rules.append(Rule(J[(v, u, (v,), ExtCost(0))]))
                continue
            targets = g.adj[v]
            if not targets:
                rules.append(Rule(J[(v, u, None, INFINITY)]))
                continue
            for combo in itertools.product(*(claims[(t, u)] for t in targets)):
                extended = [g.weight(v, t) + c for t, (_, c) in zip(targets, combo)]
                best = min(range(len(targets)), key=lambda i: (extended[i], i))
                chosen_path, _ = combo[best]
                if chosen_path is None:
                    new_path: Optional[tuple[str, ...]] = None
                else:
                    if v in chosen_path:
                        continue  # would not be simple; never a shortest path
                    new_path = (v,) + chosen_path
                key = (v, u, new_path, extended[best])
                if key not in J:
                    continue
                premises = tuple(
                    J[(t, u, p, c)] for t, (p, c) in zip(targets, combo)
                )
                rules.append(Rule(J[key], premises))
    coax = [J[(v, u, None, INFINITY)] for v in g.nodes for u in g.nodes if v != u]
    return InferenceSystem(uni, rules, coax), uni


# -- trees with an all-zero path -----------------------------------------------------


def build_path0(t: EqSystem) -> tuple[InferenceSystem, Universe]:
    """Judgements `path0(t)` (some root-to-infinity path carries only label 0)
    and `is_in(t,l)` (tree t occurs in list l) over the subterm states of a
    regular tree whose nodes hold 0/1 labels and regular lists of children.

    Membership stays purely inductive (no is_in coaxioms); only path0 carries
    coaxioms, so an infinite all-zero path must actually be exhibited.
    """
    if t.family != "tree":
        raise ShapeMismatch(f"expected a tree, got a {t.family}")
    canon = t.canonical()
    trees = [s for s in canon.states if canon[s].tag == "tree"]
    lists = [s for s in canon.states if canon[s].tag in ("cons", "nil")]
    for s in trees:
        label = canon[s].args[0].value
        if label not in (0, 1):
            raise ShapeMismatch("tree labels must be 0 or 1")
        if canon[canon[s].args[1].value].tag not in ("cons", "nil"):
            raise ShapeMismatch("tree children must form a list state")
    for s in lists:
        if canon[s].tag == "cons":
            elem = canon[s].args[0]
            if elem.kind != VAR or canon[elem.value].tag != "tree":
                raise ShapeMismatch("child lists must hold tree states")
    jp = {s: Judgement(f"path0({s})") for s in trees}
    ji = {(tr, l): Judgement(f"is_in({tr},{l})") for tr in trees for l in lists}
    uni = Universe(list(jp.values()) + list(ji.values()))
    rules = []
    for s in trees:
        label, kids = canon[s].args[0].value, canon[s].args[1].value
        if label == 0:
            for cand in trees:
                rules.append(Rule(jp[s], (ji[(cand, kids)], jp[cand])))
    for l in lists:
        if canon[l].tag != "cons":
            continue
        head, tail = canon[l].args[0].value, canon[l].args[1].value
        rules.append(Rule(ji[(head, l)]))
        for cand in trees:
            rules.append(Rule(ji[(cand, l)], (ji[(cand, tail)],)))
    coax = list(jp.values())
    return InferenceSystem(uni, rules, coax), uni


# -- digit stream addition -----------------------------------------------------------


def build_add(
    r1: EqSystem, r2: EqSystem, r: EqSystem
) -> tuple[InferenceSystem, Universe]:
    """Judgements `add(s1,s2,s,c)`: the streams denoted by states s1 and s2
    sum, digitwise with carry c in {-1,0,1,2}, to the stream at state s.

    States advance in lockstep, so the universe is the simultaneous-tail
    closure of the three roots crossed with the four carries.  The whole
    universe is the coaxiom set: the inductive phase filters nothing, all the
    work happens in the consistency descent.
    """
    streams = []
    for term in (r1, r2, r):
        if term.family != "stream":
            raise ShapeMismatch(f"expected digit streams, got a {term.family}")
        streams.append(term.canonical())
    c1, c2, c3 = streams

    def step(sys_: EqSystem, state: str) -> tuple[int, str]:
        b = sys_[state]
        return b.args[0].value, b.args[1].value  # type: ignore[return-value]

    triples: list[tuple[str, str, str]] = []
    seen = set()
    work = [(c1.root, c2.root, c3.root)]
    while work:
        tri = work.pop()
        if tri in seen:
            continue
        seen.add(tri)
        triples.append(tri)
        work.append((step(c1, tri[0])[1], step(c2, tri[1])[1], step(c3, tri[2])[1]))
    carries = (-1, 0, 1, 2)
    J = {(tri, c): Judgement(f"add({tri[0]},{tri[1]},{tri[2]},{c})")
         for tri in triples for c in carries}
    uni = Universe(J.values())
    rules = []
    for tri in triples:
        d1, t1 = step(c1, tri[0])
        d2, t2 = step(c2, tri[1])
        d3, t3 = step(c3, tri[2])
        for c in carries:
            s = c + d1 + d2
            if s % 10 == d3:
                rules.append(Rule(J[(tri, s // 10)], (J[((t1, t2, t3), c)],)))
    return InferenceSystem(uni, rules, list(J.values())), uni


# -- big-step evaluation with divergence ----------------------------------------------


def build_bigstep(
    goal: Term, cap: int = BIGSTEP_CLOSURE_CAP
) -> tuple[InferenceSystem, Universe]:
    """Judgements `eval(e,w)` for call-by-value lambda evaluation, where w is
    an abstraction or `inf` for divergence.

    The expression space is closed under evaluation from the goal:
    applications contribute their parts, and whenever a function value and an
    argument value can both flow to an application site, the redex result
    joins the space and its values flow back to the site.  A value judgement
    eval(e,v) exists only for values v the flow admits for e; coaxioms let
    every expression claim divergence, and the generated interpretation keeps
    that claim exactly for the expressions with an infinite call-by-value
    derivation.
    """
    exprs: list[Term] = []
    seen: set[Term] = set()
    vals: dict[Term, set[Abs]] = {}

    def add(e: Term) -> None:
        stack = [e]
        while stack:
            t = stack.pop()
            if t in seen:
                continue
            if len(seen) >= cap:
                raise CapExceeded(cap, f"expression closure exceeded {cap} terms")
            seen.add(t)
            exprs.append(t)
            vals[t] = {t} if isinstance(t, Abs) else set()
            if isinstance(t, App):
                stack.extend((t.fn, t.arg))

    add(goal)
    changed = True
    while changed:
        changed = False
        for e in list(exprs):
            if not isinstance(e, App):
                continue
            before = len(exprs)
            for f in sorted(vals[e.fn], key=term_text):
                for v in sorted(vals[e.arg], key=term_text):
                    r = substitute(f.body, v)
                    add(r)
                    if not vals[r] <= vals[e]:
                        vals[e] |= vals[r]
                        changed = True
            if len(exprs) != before:
                changed = True
    ordered = sorted(seen, key=term_text)
    INF_TEXT = "inf"
    J: dict[tuple[Term, object], Judgement] = {}
    for e in ordered:
        for w in sorted(vals[e], key=term_text):
            J[(e, w)] = Judgement(f"eval({term_text(e)},{term_text(w)})")
        J[(e, INF_TEXT)] = Judgement(f"eval({term_text(e)},inf)")
    uni = Universe(J.values())
    rules = []
    for e in ordered:
        if isinstance(e, Abs):
            rules.append(Rule(J[(e, e)]))
            continue
        rules.append(Rule(J[(e, INF_TEXT)], (J[(e.fn, INF_TEXT)],)))
        for f in sorted(vals[e.fn], key=term_text):
            rules.append(Rule(J[(e, INF_TEXT)], (J[(e.fn, f)], J[(e.arg, INF_TEXT)])))
            for v in sorted(vals[e.arg], key=term_text):
                body = substitute(f.body, v)
                for w in (*sorted(vals[body], key=term_text), INF_TEXT):
                    premises = (J[(e.fn, f)], J[(e.arg, v)], J[(body, w)])
                    rules.append(Rule(J[(e, w)], premises))
    coax = [J[(e, INF_TEXT)] for e in ordered]
    return InferenceSystem(uni, rules, coax), uni
