"""E-matching, the match/apply operator, the ICO, and budgeted saturation."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence

from .egraph import Automaton, EGraph, EGraphError, accepts, enumerate_terms, flatten, rebuild
from .terms import (AnyTerm, Pattern, RewriteRule, Signature, State, Term, Trs, Var,
                    enumerate_ground_terms, one_step_rewrites, rewrite_closure, size)


@dataclass(frozen=True)
class Match:
    rule: int
    sigma: tuple  # sorted (var name, class) pairs
    root: int

    @property
    def subst(self) -> dict[str, int]:
        return dict(self.sigma)


class Status(str, Enum):
    TERMINATED = "terminated"
    BUDGET = "budget"


@dataclass(frozen=True)
class Round:
    iteration: int
    classes: int
    nodes: int
    merges: int
    changed: bool

    def line(self) -> str:
        return f"iter={self.iteration} classes={self.classes} nodes={self.nodes} merges={self.merges}"


@dataclass
class EqSatOutcome:
    status: Status
    egraph: EGraph
    iterations: int
    history: list[Round] = field(default_factory=list)

    @property
    def terminated(self) -> bool:
        return self.status is Status.TERMINATED

    def report(self) -> str:
        lines = [r.line() for r in self.history]
        g = self.egraph
        lines.append(f"status={self.status.value} classes={g.num_classes} nodes={g.num_nodes}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- matching

def ematch(G: EGraph, lhs: Pattern, rule: int = 0, index=None) -> list[Match]:
    """All (sigma, root) with lhs[sigma] ->*_G root."""
    idx = G.index() if index is None else index
    out = set()
    if isinstance(lhs, Var):
        for c in idx:
            out.add(Match(rule, ((lhs.name, c),), c))
    else:
        for c, heads in idx.items():
            if lhs.head not in heads:
                continue
            for sigma in _match(idx, lhs, c, {}):
                out.add(Match(rule, tuple(sorted(sigma.items())), c))
    return sorted(out, key=lambda m: (m.root, m.sigma))


def _match(idx, p: Pattern, c: int, sigma: dict) -> Iterator[dict]:
    if isinstance(p, Var):
        bound = sigma.get(p.name)
        if bound is None:
            yield {**sigma, p.name: c}
        elif bound == c:
            yield sigma
        return
    for kids in idx[c].get(p.head, ()):
        if len(kids) == len(p.args):
            yield from _match_args(idx, p.args, kids, sigma)


def _match_args(idx, pats, kids, sigma) -> Iterator[dict]:
    if not pats:
        yield sigma
        return
    for s in _match(idx, pats[0], kids[0], sigma):
        yield from _match_args(idx, pats[1:], kids[1:], s)


def _pattern_at(p: Pattern, path: tuple) -> Pattern:
    for i in path:
        p = p.args[i]
    return p


def _positions(p: Pattern, path: tuple = ()) -> Iterator[tuple]:
    if isinstance(p, Term):
        yield path, p
        for i, a in enumerate(p.args):
            yield from _positions(a, path + (i,))


def _climb(idx, parents, lhs: Pattern, path: tuple, c: int, sigma: dict) -> Iterator[tuple]:
    # extend a match of lhs|path rooted at c to a match of lhs, via parent nodes
    if not path:
        yield c, sigma
        return
    up, i = _pattern_at(lhs, path[:-1]), path[-1]
    others = [j for j in range(len(up.args)) if j != i]
    for h, kids, pc in parents.get(c, ()):
        if h != up.head or len(kids) != len(up.args) or kids[i] != c:
            continue
        pats = tuple(up.args[j] for j in others)
        for s in _match_args(idx, pats, tuple(kids[j] for j in others), sigma):
            yield from _climb(idx, parents, lhs, path[:-1], pc, s)


def ematch_delta(G: EGraph, lhs: Pattern, delta: Sequence, rule: int = 0,
                 index=None, parents=None) -> list[Match]:
    """Matches of ``lhs`` that use at least one node of ``delta``."""
    idx = G.index() if index is None else index
    par = G.parents() if parents is None else parents
    out = set()
    if isinstance(lhs, Var):
        for c in {c for _, _, c in delta}:
            out.add(Match(rule, ((lhs.name, c),), c))
        return sorted(out, key=lambda m: (m.root, m.sigma))
    by_head: dict[str, list] = {}
    for h, kids, c in delta:
        by_head.setdefault(h, []).append((kids, c))
    for path, q in _positions(lhs):
        for kids, c in by_head.get(q.head, ()):
            if len(kids) != len(q.args):
                continue
            for s in _match_args(idx, q.args, kids, {}):
                for root, s2 in _climb(idx, par, lhs, path, c, s):
                    out.add(Match(rule, tuple(sorted(s2.items())), root))
    return sorted(out, key=lambda m: (m.root, m.sigma))


def all_matches(G: EGraph, R: Trs) -> list[Match]:
    idx = G.index()
    return [m for i, r in enumerate(R.rules) for m in ematch(G, r.lhs, i, idx)]


def instantiate(p: Pattern, sigma: dict[str, int]) -> AnyTerm:
    """rhs[sigma] as a term over the signature plus states."""
    if isinstance(p, Var):
        return State(sigma[p.name])
    return Term(p.head, tuple(instantiate(a, sigma) for a in p.args))


# ---------------------------------------------------------------- T_R and the ICO

def apply_matches(G: EGraph, R: Trs) -> Automaton:
    """T_R(G): G together with FL(rhs[sigma] ->* c) for every match."""
    A = G.to_automaton()
    A.signature = A.signature.merged(R.signature)
    by_class: dict[int, list] = {}
    for h, ch, c in A.transitions:
        by_class.setdefault(c, []).append((h, ch))
    extra = set()
    nxt = max(A.next_id(), G._next)
    for m in all_matches(G, R):
        rhs = instantiate(R.rules[m.rule].rhs, m.subst)
        if isinstance(rhs, State):
            # sigma(x) and the root must merge: duplicate x's transitions onto the root
            extra |= {(h, ch, m.root) for h, ch in by_class.get(rhs.id, ())}
            continue
        fl = flatten(rhs, m.root, nxt)
        nxt = max(fl.next_id(), nxt)
        extra |= fl.transitions
    return A | Automaton(set(), extra)


def ico_step_reference(G: EGraph, R: Trs) -> EGraph:
    """Literal CC(T_R(G)); slow, used to cross-check :func:`ico_step`."""
    return rebuild(apply_matches(G, R))[0]


def ico_step(G: EGraph, R: Trs, order: Sequence[int] | None = None) -> EGraph:
    """One parallel round: match against G, insert every instantiated rhs, rebuild.

    ``order`` permutes the matches before insertion (the result is the same up
    to isomorphism).
    """
    matches = all_matches(G, R)
    if order is not None:
        matches = [matches[i] for i in order]
    H = G.copy()
    H.signature = H.signature.merged(R.signature)
    for m in matches:
        H.insert_term(instantiate(R.rules[m.rule].rhs, m.subst), m.root)
    H.rebuild()
    return H


def eqsat(R: Trs, G: EGraph, budget: int = 1000, node_cap: int = 100000,
          on_round=None, incremental: bool = True) -> EqSatOutcome:
    """Iterate the ICO until nothing changes or ``budget`` rounds have run.

    With ``incremental`` the rounds run in place on a private copy and only
    look for matches touching nodes that changed in the previous round; the
    result is the same as iterating :func:`ico_step`.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    if incremental:
        return _eqsat_incremental(R, G, budget, node_cap, on_round)
    history: list[Round] = []
    for i in range(1, budget + 1):
        H = ico_step(G, R)
        st = H.stats
        changed = bool(st["classes_made"] or st["nodes_made"] or st["merges"])
        rnd = Round(i, H.num_classes, H.num_nodes, st["merges"], changed)
        history.append(rnd)
        if on_round is not None:
            on_round(rnd)
        if not changed:
            return EqSatOutcome(Status.TERMINATED, G, i - 1, history)
        G = H
        if G.num_nodes > node_cap:
            break
    return EqSatOutcome(Status.BUDGET, G, len(history), history)


def _eqsat_incremental(R, G, budget, node_cap, on_round) -> EqSatOutcome:
    G = G.copy()
    G.signature = G.signature.merged(R.signature)
    G.rebuild()
    G.take_delta()
    delta = None
    history: list[Round] = []
    for i in range(1, budget + 1):
        G.stats = {"classes_made": 0, "nodes_made": 0, "merges": 0}
        if delta is None:
            matches = all_matches(G, R)
        else:
            idx, par = G.index(), G.parents()
            matches = [m for k, r in enumerate(R.rules)
                       for m in ematch_delta(G, r.lhs, delta, k, idx, par)]
        for m in matches:
            G.insert_term(instantiate(R.rules[m.rule].rhs, m.subst), m.root)
        G.rebuild()
        delta = G.take_delta()
        st = G.stats
        changed = bool(st["classes_made"] or st["nodes_made"] or st["merges"])
        rnd = Round(i, G.num_classes, G.num_nodes, st["merges"], changed)
        history.append(rnd)
        if on_round is not None:
            on_round(rnd)
        if not changed:
            return EqSatOutcome(Status.TERMINATED, G, i - 1, history)
        if G.num_nodes > node_cap:
            break
    return EqSatOutcome(Status.BUDGET, G, len(history), history)


def eqsat_term(R: Trs, t: Term, **kw) -> tuple[EqSatOutcome, int]:
    G = EGraph(R.signature)
    root = G.add_term(t)
    out = eqsat(R, G, **kw)
    return out, out.egraph.find(root)


# ---------------------------------------------------------------- models

@dataclass(frozen=True)
class Violation:
    rule: int
    sigma: tuple
    root: int

    def __str__(self) -> str:
        s = ",".join(f"{x}=c{c}" for x, c in self.sigma)
        return f"rule={self.rule} sigma={{{s}}} root=c{self.root}"


def _evaluate(G: EGraph, t: AnyTerm) -> int | None:
    if isinstance(t, State):
        return G.find(t.id)
    kids = []
    for a in t.args:
        c = _evaluate(G, a)
        if c is None:
            return None
        kids.append(c)
    return G.lookup(t.head, kids)


def check_model(G: EGraph, R: Trs) -> list[Violation]:
    out = []
    for m in all_matches(G, R):
        if _evaluate(G, instantiate(R.rules[m.rule].rhs, m.subst)) != m.root:
            out.append(Violation(m.rule, m.sigma, m.root))
    return out


# ---------------------------------------------------------------- representation check

def congruence_classes(universe: Iterable[Term], pairs: Iterable[tuple[Term, Term]]) -> dict[Term, int]:
    """Least congruence on a subterm-closed finite universe containing ``pairs``.

    Plain union-find plus signature-table passes until stable; independent of
    the E-graph code so it can serve as an oracle.
    """
    terms = sorted(set(universe), key=lambda t: (size(t), repr(t)))
    pos = {t: i for i, t in enumerate(terms)}
    parent = list(range(len(terms)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> bool:
        i, j = find(i), find(j)
        if i == j:
            return False
        parent[max(i, j)] = min(i, j)
        return True

    for a, b in pairs:
        union(pos[a], pos[b])
    changed = True
    while changed:
        changed = False
        table: dict[tuple, int] = {}
        for t in terms:
            if not t.args or any(a not in pos for a in t.args):
                continue
            key = (t.head, tuple(find(pos[a]) for a in t.args))
            if key in table:
                changed |= union(table[key], pos[t])
            else:
                table[key] = pos[t]
    return {t: find(i) for t, i in pos.items()}


@dataclass(frozen=True)
class RepresentationReport:
    closure: frozenset  # R*(w)
    egraph_class: frozenset  # [w] in H
    congruence_class: frozenset  # [w] under the closure of R and G0
    size_bound: int

    @property
    def sizes(self) -> tuple[int, int, int]:
        return len(self.closure), len(self.egraph_class), len(self.congruence_class)

    @property
    def lower_holds(self) -> bool:
        return self.closure <= self.egraph_class

    @property
    def upper_holds(self) -> bool:
        return self.egraph_class <= self.congruence_class

    @property
    def all_equal(self) -> bool:
        return self.closure == self.egraph_class == self.congruence_class

    def counterexamples(self) -> list[Term]:
        return sorted((self.closure - self.egraph_class) | (self.egraph_class - self.congruence_class),
                      key=repr)


def verify_representation(R: Trs, G0: EGraph, H: EGraph, w: Term, size_bound: int,
                          explore_bound: int | None = None) -> RepresentationReport:
    """The three sets R*(w), [w]_H and [w] under the closure of R and G0, up to ``size_bound``.

    Rewrite paths may pass through terms up to ``explore_bound`` (default:
    ``size_bound``); a path forced through bigger intermediates is otherwise
    invisible and makes R*(w) look smaller than it is.
    """
    c = accepts(H, w)
    if c is None:
        raise EGraphError(f"term {w} is not represented")
    explore = size_bound if explore_bound is None else max(explore_bound, size_bound)
    closure = {u for u in rewrite_closure(R, w, explore) if size(u) <= size_bound}
    in_h = enumerate_terms(H, c, size_bound)
    sig = Signature(G0.signature).merged(R.signature).merged(H.signature)
    universe = [t for layer in enumerate_ground_terms(sig, size_bound).values() for t in layer]
    pairs = [(t, u) for t in universe for u in one_step_rewrites(R, t) if size(u) <= size_bound]
    by_g0: dict[int, Term] = {}
    for t in universe:
        d = accepts(G0, t)
        if d is not None:
            if d in by_g0:
                pairs.append((by_g0[d], t))
            else:
                by_g0[d] = t
    cls = congruence_classes(universe, pairs)
    mine = cls[w]
    cong = frozenset(t for t, k in cls.items() if k == mine)
    return RepresentationReport(frozenset(closure), frozenset(in_h), cong, size_bound)
