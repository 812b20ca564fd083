"""E-graphs as deterministic, reachable tree automata.

An :class:`EGraph` is the mutable working structure (union-find over class
ids, a hashcons from canonical nodes to classes, upward parent lists).  An
:class:`Automaton` is a plain, possibly nondeterministic, set of transitions;
:func:`rebuild` turns one into an E-graph by congruence closure.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .terms import AnyTerm, Signature, State, Term, TermError, _compositions

ENode = tuple  # (head, children)
Transition = tuple  # (head, children, target)


class EGraphError(ValueError):
    pass


class EGraph:
    def __init__(self, signature: Mapping[str, int] | None = None):
        self.signature = Signature(signature or {})
        self._parent: dict[int, int] = {}
        self._size: dict[int, int] = {}
        self._hashcons: dict[ENode, int] = {}
        self._uses: dict[int, list] = {}
        self._pending: list[int] = []
        self._next = 0
        # per-round bookkeeping read by the EqSat driver
        self.stats = {"classes_made": 0, "nodes_made": 0, "merges": 0}
        self._touched: set[ENode] = set()
        self._dirty: set[int] = set()

    # ------------------------------------------------------------ union-find

    def make_class(self, cid: int | None = None) -> int:
        if cid is None:
            cid = self._next
        elif cid in self._parent:
            raise EGraphError(f"class {cid} already exists")
        self._next = max(self._next, cid + 1)
        self._parent[cid] = cid
        self._size[cid] = 1
        self._uses[cid] = []
        self.stats["classes_made"] += 1
        return cid

    def find(self, c: int) -> int:
        parent = self._parent
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size.pop(rb)
        self._uses[ra].extend(self._uses.pop(rb))
        self._pending.append(ra)
        self._dirty.add(ra)
        self.stats["merges"] += 1
        return True

    # ------------------------------------------------------------ nodes

    def canon(self, head: str, children: Iterable[int]) -> ENode:
        return (head, tuple(self.find(c) for c in children))

    def _check_arity(self, head: str, n: int) -> None:
        known = self.signature.setdefault(head, n)
        if known != n:
            raise EGraphError(f"arity mismatch for {head!r}: expected {known}, got {n}")

    def lookup(self, head: str, children: Iterable[int] = ()) -> int | None:
        c = self._hashcons.get(self.canon(head, children))
        return None if c is None else self.find(c)

    def add(self, head: str, children: Iterable[int] = ()) -> int:
        """Class of ``head(children)``, creating a fresh class if needed."""
        node = self.canon(head, children)
        c = self._hashcons.get(node)
        if c is not None:
            return self.find(c)
        self._check_arity(head, len(node[1]))
        c = self.make_class()
        self._insert(node, c)
        return c

    def add_node(self, head: str, children: Iterable[int], target: int) -> None:
        """Add the transition ``head(children) -> target``."""
        node = self.canon(head, children)
        self._check_arity(head, len(node[1]))
        c = self._hashcons.get(node)
        if c is None:
            self._insert(node, self.find(target))
        else:
            self.union(c, target)

    def _insert(self, node: ENode, c: int) -> None:
        self._hashcons[node] = c
        self._touched.add(node)
        self.stats["nodes_made"] += 1
        for ch in set(node[1]):
            self._uses[ch].append((node, c))

    def add_term(self, t: AnyTerm) -> int:
        if isinstance(t, State):
            return self.find(t.id)
        if not isinstance(t, Term):
            raise TermError(f"cannot add non-ground pattern {t}")
        return self.add(t.head, [self.add_term(a) for a in t.args])

    def insert_term(self, t: AnyTerm, c: int) -> None:
        """Make ``t`` reach class ``c`` (flatten-and-union, hashconsed)."""
        if isinstance(t, State):
            self.union(t.id, c)
            return
        if not isinstance(t, Term):
            raise TermError(f"cannot insert non-ground pattern {t}")
        self.add_node(t.head, [self.add_term(a) for a in t.args], c)

    # ------------------------------------------------------------ rebuild

    def rebuild(self) -> int:
        """Restore congruence; returns the number of merges performed."""
        before = self.stats["merges"]
        while self._pending:
            todo = {self.find(c) for c in self._pending}
            self._pending = []
            for c in todo:
                self._repair(self.find(c))
        if self.stats["merges"] != before:
            # a node re-keyed through one child's use list can leave a half
            # canonical key behind; its canonical twin is always present
            parent = self._parent
            self._hashcons = {k: v for k, v in self._hashcons.items()
                              if all(parent[x] == x for x in k[1])}
        return self.stats["merges"] - before

    def _repair(self, c: int) -> None:
        # detach the use list; uses added by merges meanwhile land in a fresh
        # list and are handled when the class comes up again in the worklist
        uses = self._uses[c]
        self._uses[c] = []
        for node, _ in uses:
            self._hashcons.pop(node, None)
        fresh: dict[ENode, int] = {}
        for node, pc in uses:
            node = self.canon(*node)
            pc = self.find(pc)
            if node in fresh:
                self.union(fresh[node], pc)
            other = self._hashcons.get(node)
            if other is not None and self.find(other) != self.find(pc):
                self.union(other, pc)
            fresh[node] = self.find(pc)
            self._hashcons[node] = fresh[node]
            self._touched.add(node)
        self._uses[self.find(c)].extend((n, self.find(pc)) for n, pc in fresh.items())

    def take_delta(self) -> list[Transition]:
        """Nodes added, re-keyed, or sitting in a merged class since the last call."""
        dirty = {self.find(c) for c in self._dirty}
        touched = {self.canon(*n) for n in self._touched}
        self._touched, self._dirty = set(), set()
        out = []
        for node, c in self.canonical_nodes().items():
            if node in touched or c in dirty:
                out.append((node[0], node[1], c))
        return out

    def canonical_nodes(self) -> dict[ENode, int]:
        if not self._pending:
            # after a rebuild every hashcons key is canonical
            find = self.find
            return {node: find(c) for node, c in self._hashcons.items()}
        out: dict[ENode, int] = {}
        for node, c in self._hashcons.items():
            out.setdefault(self.canon(*node), self.find(c))
        return out

    @property
    def clean(self) -> bool:
        return not self._pending

    # ------------------------------------------------------------ views

    def classes(self) -> list[int]:
        return sorted(c for c, p in self._parent.items() if c == p)

    def nodes(self) -> list[Transition]:
        """Canonical transitions ``(head, children, class)``, deduplicated and sorted."""
        return sorted((h, ch, c) for (h, ch), c in self.canonical_nodes().items())

    @property
    def num_classes(self) -> int:
        return len(self._size)

    @property
    def num_nodes(self) -> int:
        if not self._pending:
            return len(self._hashcons)
        return len({self.canon(*n) for n in self._hashcons})

    def index(self) -> dict[int, dict[str, list[tuple]]]:
        """class -> head -> list of child tuples."""
        idx: dict[int, dict[str, list]] = {c: {} for c in self.classes()}
        for (h, ch), c in self.canonical_nodes().items():
            idx[c].setdefault(h, []).append(ch)
        return idx

    def parents(self) -> dict[int, list[Transition]]:
        """class -> canonical nodes having it as a child."""
        par: dict[int, list] = {c: [] for c in self.classes()}
        for (h, ch), c in self.canonical_nodes().items():
            for x in set(ch):
                par[x].append((h, ch, c))
        return par

    def nodes_of(self, c: int) -> list[tuple]:
        c = self.find(c)
        return [(h, ch) for h, ch, d in self.nodes() if d == c]

    def copy(self) -> "EGraph":
        g = EGraph.__new__(EGraph)
        g.signature = Signature(self.signature)
        g._parent = dict(self._parent)
        g._size = dict(self._size)
        g._hashcons = dict(self._hashcons)
        g._uses = {c: list(u) for c, u in self._uses.items()}
        g._pending = list(self._pending)
        g._next = self._next
        g.stats = {"classes_made": 0, "nodes_made": 0, "merges": 0}
        g._touched = set(self._touched)
        g._dirty = set(self._dirty)
        return g

    def to_automaton(self) -> "Automaton":
        return Automaton(set(self.classes()), set(self.nodes()), Signature(self.signature))

    def __repr__(self) -> str:
        return f"<EGraph classes={self.num_classes} nodes={self.num_nodes}>"


@dataclass
class Automaton:
    """A finite bottom-up tree automaton without final states."""

    states: set[int] = field(default_factory=set)
    transitions: set[Transition] = field(default_factory=set)
    signature: Signature = field(default_factory=Signature)

    def __post_init__(self) -> None:
        for h, ch, c in self.transitions:
            self.states.add(c)
            self.states.update(ch)
            known = self.signature.setdefault(h, len(ch))
            if known != len(ch):
                raise EGraphError(f"arity mismatch for {h!r}")

    def next_id(self) -> int:
        return max(self.states, default=-1) + 1

    def __or__(self, other: "Automaton") -> "Automaton":
        return Automaton(self.states | other.states, self.transitions | other.transitions,
                         self.signature.merged(other.signature))

    def grounded(self) -> set[int]:
        done: set[int] = set()
        changed = True
        while changed:
            changed = False
            for h, ch, c in self.transitions:
                if c not in done and all(x in done for x in ch):
                    done.add(c)
                    changed = True
        return done


# ---------------------------------------------------------------- flattening

def flatten(t: AnyTerm, root: int | None = None, next_id: int = 0) -> Automaton:
    """FL(t ->* root): one state per distinct non-state subterm, ``t`` at ``root``.

    State leaves of ``t`` are reused as-is.  Fresh states are numbered from
    ``next_id``, skipping the root and any state mentioned in ``t``.
    """
    if isinstance(t, State):
        if root is not None and root != t.id:
            raise TermError("flattening a bare state into a different root")
        return Automaton({t.id})
    if not isinstance(t, Term):
        raise TermError(f"cannot flatten non-ground pattern {t}")
    taken = {s.id for s in _states_in(t)}
    if root is not None:
        taken.add(root)
    counter = itertools.count(next_id)

    def fresh() -> int:
        while True:
            n = next(counter)
            if n not in taken:
                taken.add(n)
                return n

    ids: dict[Term, int] = {t: root if root is not None else fresh()}
    trans = set()

    def walk(u: AnyTerm) -> int:
        if isinstance(u, State):
            return u.id
        if u not in ids:
            ids[u] = fresh()
        ch = tuple(walk(a) for a in u.args)
        trans.add((u.head, ch, ids[u]))
        return ids[u]

    walk(t)
    return Automaton(set(ids.values()) | taken & _ids_of(t), trans)


def _states_in(t: AnyTerm):
    if isinstance(t, State):
        yield t
    elif isinstance(t, Term):
        for a in t.args:
            yield from _states_in(a)


def _ids_of(t: AnyTerm) -> set[int]:
    return {s.id for s in _states_in(t)}


def insert(G: EGraph, t: AnyTerm, c: int) -> Automaton:
    """G united with FL(t ->* c); ``c`` may be an existing class or a fresh id."""
    base = G.to_automaton()
    fl = flatten(t, c, next_id=max(base.next_id(), c + 1, G._next))
    return base | fl


def rebuild(A: Automaton, order: Iterable[Transition] | None = None) -> tuple[EGraph, dict[int, int]]:
    """Congruence closure CC(A) and the state map A -> CC(A)."""
    missing = A.states - A.grounded()
    if missing:
        raise EGraphError(f"unreachable states: {sorted(missing)}")
    G = EGraph(A.signature)
    for s in sorted(A.states):
        G.make_class(s)
    for h, ch, c in (order if order is not None else sorted(A.transitions)):
        G.add_node(h, ch, c)
    G.rebuild()
    return G, {s: G.find(s) for s in A.states}


def from_term(t: Term, signature: Mapping[str, int] | None = None) -> tuple[EGraph, int]:
    """E-graph representing exactly ``t`` and its subterms (FL with a fresh root)."""
    G = EGraph(signature)
    root = G.add_term(t)
    return G, root


# ---------------------------------------------------------------- queries

def accepts(G: EGraph, t: Term) -> int | None:
    if isinstance(t, State):
        return G.find(t.id)
    kids = []
    for a in t.args:
        c = accepts(G, a)
        if c is None:
            return None
        kids.append(c)
    return G.lookup(t.head, kids)


def pcr_related(G: EGraph, t1: Term, t2: Term) -> bool:
    c1 = accepts(G, t1)
    return c1 is not None and c1 == accepts(G, t2)


def enumerate_terms(G: EGraph, c: int, size_bound: int) -> set[Term]:
    """All terms of size <= ``size_bound`` accepted by class ``c``."""
    table = _term_table(G, size_bound)
    c = G.find(c)
    return {t for n in range(1, size_bound + 1) for t in table.get((c, n), ())}


def _term_table(G: EGraph, size_bound: int) -> dict[tuple[int, int], list[Term]]:
    nodes = G.nodes()
    table: dict[tuple[int, int], list[Term]] = {}
    for n in range(1, size_bound + 1):
        for h, ch, c in nodes:
            if not ch:
                if n == 1:
                    table.setdefault((c, 1), []).append(Term(h))
                continue
            for split in _compositions(n - 1, len(ch)):
                pools = [table.get((x, s)) for x, s in zip(ch, split)]
                if not all(pools):
                    continue
                bucket = table.setdefault((c, n), [])
                bucket.extend(Term(h, args) for args in itertools.product(*pools))
    return table


def ranks(G: EGraph) -> dict[int, int]:
    """Smallest depth of a term accepted by each class."""
    INF = float("inf")
    rank = {c: INF for c in G.classes()}
    nodes = G.nodes()
    changed = True
    while changed:
        changed = False
        for h, ch, c in nodes:
            r = 1 + max((rank[x] for x in ch), default=0)
            if r < rank[c]:
                rank[c] = r
                changed = True
    return rank


def rank(G: EGraph, c: int) -> int:
    return ranks(G)[G.find(c)]


def witnesses(G: EGraph) -> dict[int, tuple]:
    """For each class a node of minimal rank; ties go to the smaller symbol name."""
    rk = ranks(G)
    best: dict[int, tuple] = {}
    for h, ch, c in G.nodes():
        r = 1 + max((rk[x] for x in ch), default=0)
        if r != rk[c]:
            continue
        key = (h, tuple(rk[x] for x in ch), ch)
        if c not in best or key < best[c][0]:
            best[c] = (key, (h, ch))
    return {c: v[1] for c, v in best.items()}


def witness_term(G: EGraph, c: int) -> Term:
    wit = witnesses(G)

    def build(x: int) -> Term:
        h, ch = wit[x]
        return Term(h, tuple(build(y) for y in ch))

    return build(G.find(c))


def find_homomorphism(G: EGraph, H: EGraph) -> dict[int, int] | None:
    """The unique homomorphism G -> H, if one exists."""
    rk = ranks(G)
    wit = witnesses(G)
    h: dict[int, int] = {}
    for c in sorted(wit, key=lambda x: rk[x]):
        head, ch = wit[c]
        target = H.lookup(head, [h[x] for x in ch]) if all(x in h for x in ch) else None
        if target is None:
            return None
        h[c] = target
    for head, ch, c in G.nodes():
        if H.lookup(head, [h[x] for x in ch]) != h[c]:
            return None
    return h


def is_isomorphic(G: EGraph, H: EGraph) -> bool:
    return find_homomorphism(G, H) is not None and find_homomorphism(H, G) is not None


def lub(graphs: list[EGraph]) -> tuple[EGraph, list[dict[int, int]]]:
    """Least upper bound; also returns each input's embedding into it."""
    states: set[int] = set()
    trans: set[Transition] = set()
    sig = Signature()
    renames = []
    offset = 0
    for G in graphs:
        ren = {c: offset + i for i, c in enumerate(G.classes())}
        offset += len(ren)
        renames.append(ren)
        states |= set(ren.values())
        trans |= {(h, tuple(ren[x] for x in ch), ren[c]) for h, ch, c in G.nodes()}
        sig = sig.merged(G.signature)
    out, merge = rebuild(Automaton(states, trans, sig))
    maps = [{c: merge[r] for c, r in ren.items()} for ren in renames]
    return out, maps


def check_invariants(G: EGraph | Automaton) -> list[str]:
    """Violations of determinism, reachability, or congruence at rest."""
    problems: list[str] = []
    if isinstance(G, EGraph):
        if not G.clean:
            problems.append("pending merges: rebuild has not run")
        seen: dict[ENode, int] = {}
        for node, c in G._hashcons.items():
            canon = G.canon(*node)
            if canon != node:
                problems.append(f"stale node {_fmt_node(node)} in hashcons")
            d = G.find(c)
            if canon in seen and seen[canon] != d:
                problems.append(
                    f"congruence violation: {_fmt_node(canon)} -> c{seen[canon]} and c{d}")
            seen.setdefault(canon, d)
        A = Automaton(set(G.classes()), {(h, ch, c) for (h, ch), c in seen.items()})
    else:
        A = G
        targets: dict[ENode, int] = {}
        for h, ch, c in sorted(A.transitions):
            prev = targets.setdefault((h, ch), c)
            if prev != c:
                problems.append(
                    f"determinism violation: {_fmt_node((h, ch))} -> c{prev} and c{c}")
    for c in sorted(A.states - A.grounded()):
        problems.append(f"reachability violation: class c{c} accepts no term")
    return problems


# ---------------------------------------------------------------- text formats

def _fmt_node(node: ENode) -> str:
    h, ch = node
    return f"{h}(" + ",".join(f"c{x}" for x in ch) + ")"


def egraph_to_text(G: EGraph | Automaton) -> str:
    trans = G.nodes() if isinstance(G, EGraph) else sorted(G.transitions)
    return "".join(f"{_fmt_node((h, ch))} -> c{c}\n" for h, ch, c in trans)


_LINE = re.compile(r"^\s*([A-Za-z_][\w.\-']*)\s*(?:\(([^)]*)\))?\s*->\s*([A-Za-z_]\w*)\s*$")


def parse_automaton(text: str) -> tuple[Automaton, dict[str, int]]:
    """Parse ``f(c1,c1) -> c2`` lines; class names are mapped to ints in order."""
    names: dict[str, int] = {}
    trans = set()
    sig = Signature()

    def cid(name: str) -> int:
        return names.setdefault(name, len(names))

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if m is None:
            raise EGraphError(f"line {lineno}: expected 'f(c1,...) -> c'")
        head, args, target = m.groups()
        kids = tuple(cid(a.strip()) for a in args.split(",") if a.strip()) if args else ()
        try:
            sig = sig.merged({head: len(kids)})
        except TermError as e:
            raise EGraphError(f"line {lineno}: {e}") from None
        trans.add((head, kids, cid(target)))
    return Automaton(set(names.values()), trans, sig), names


def parse_egraph(text: str) -> EGraph:
    A, _ = parse_automaton(text)
    return rebuild(A)[0]


def to_dot(G: EGraph, name: str = "egraph") -> str:
    """One cluster per class; edges run from node arguments to child clusters."""
    lines = [f"digraph {name} {{", "  compound=true;", "  node [shape=box];"]
    by_class: dict[int, list] = {}
    for i, (h, ch, c) in enumerate(G.nodes()):
        by_class.setdefault(c, []).append((i, h, ch))
    anchor = {}
    for c, nodes in sorted(by_class.items()):
        lines.append(f"  subgraph cluster_c{c} {{")
        lines.append(f'    label="c{c}"; style=dotted;')
        for i, h, _ in nodes:
            lines.append(f'    n{i} [label="{h}"];')
        anchor[c] = nodes[0][0]
        lines.append("  }")
    for c, nodes in sorted(by_class.items()):
        for i, h, ch in nodes:
            for pos, x in enumerate(ch):
                lines.append(f'  n{i} -> n{anchor[x]} [lhead=cluster_c{x}, label="{pos + 1}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
