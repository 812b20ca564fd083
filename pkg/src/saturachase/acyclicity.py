"""Weak term acyclicity for rewrite systems and classic weak acyclicity for TGDs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import networkx as nx

from .chase import TGD, Dependency
from .terms import Pattern, RewriteRule, Signature, Term, TermError, Trs, Var, subterms, variables

Position = tuple  # (symbol, 1-based index)


def fmt_pos(p: Position) -> str:
    return f"({p[0]},{p[1]})"


def positions_of(p: Pattern, sub: Pattern) -> set[Position]:
    """Slots (f, i) such that some sub-pattern of ``p`` is f(..., sub, ...) with sub at i."""
    out = set()
    for q in subterms(p):
        if isinstance(q, Term):
            for i, a in enumerate(q.args, 1):
                if a == sub:
                    out.add((q.head, i))
    return out


def expand_degenerate(R: Trs, signature: Mapping[str, int] | None = None) -> Trs:
    sig = Signature(R.signature).merged(signature or {})
    rules = []
    for r in R.rules:
        if not isinstance(r.lhs, Var):
            rules.append(r)
            continue
        x = r.lhs.name
        if variables(r.rhs) - {x}:
            raise TermError(f"degenerate rule {r} uses variables besides {x}")
        for f, n in sorted(sig.items()):
            fresh = tuple(Var(f"{x}{i}") for i in range(1, n + 1))
            while any(v.name in variables(r.rhs) for v in fresh):
                fresh = tuple(Var(v.name + "_") for v in fresh)
            whole = Term(f, fresh)
            rules.append(RewriteRule(whole, _replace_var(r.rhs, x, whole)))
    return Trs(sig, tuple(dict.fromkeys(rules)))


def _replace_var(p: Pattern, x: str, by: Pattern) -> Pattern:
    if isinstance(p, Var):
        return by if p.name == x else p
    return Term(p.head, tuple(_replace_var(a, x, by) for a in p.args))


@dataclass(frozen=True)
class WtdGraph:
    nodes: frozenset
    edges: frozenset  # (src, dst, special)

    def digraph(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(sorted(self.nodes))
        for u, v, s in sorted(self.edges):
            g.add_edge(u, v, special=s)
        return g

    def to_dot(self, name: str = "wtdg") -> str:
        lines = [f"digraph {name} {{"]
        for n in sorted(self.nodes):
            lines.append(f'  "{fmt_pos(n)}";')
        for u, v, s in sorted(self.edges):
            label = ' [label="*"]' if s else ""
            lines.append(f'  "{fmt_pos(u)}" -> "{fmt_pos(v)}"{label};')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_wtdg(R: Trs) -> WtdGraph:
    nodes = {(f, i) for f, n in R.signature.items() for i in range(1, n + 1)}
    edges = set()
    for r in R.rules:
        if isinstance(r.lhs, Var):
            raise TermError(f"degenerate rule {r}; expand it first")
        for x in variables(r.rhs):
            for u in positions_of(r.lhs, Var(x)):
                for v in positions_of(r.rhs, Var(x)):
                    edges.add((u, v, False))
        lhs_subs = set(subterms(r.lhs))
        for p in set(subterms(r.rhs)):
            if p == r.rhs or isinstance(p, Var) or p in lhs_subs:
                continue
            targets = positions_of(r.rhs, p)
            for x in variables(p):
                for u in positions_of(r.rhs, Var(x)):
                    for v in targets:
                        edges.add((u, v, True))
    return WtdGraph(frozenset(nodes), frozenset(edges))


def special_cycle(graph: WtdGraph) -> list | None:
    """A cycle through a special edge as [(src, dst, special), ...], or None."""
    g = nx.DiGraph()
    g.add_nodes_from(graph.nodes)
    g.add_edges_from((u, v) for u, v, _ in graph.edges)
    comp = {}
    for k, scc in enumerate(nx.strongly_connected_components(g)):
        for n in scc:
            comp[n] = k
    normal = {(u, v) for u, v, s in graph.edges if not s}
    for u, v, s in sorted(graph.edges):
        if not s or comp[u] != comp[v]:
            continue
        # close the cycle from v back to u inside the component
        back = nx.shortest_path(g.subgraph([n for n in g if comp[n] == comp[u]]), v, u)
        cycle = []
        for a, b in zip(back, back[1:]):
            cycle.append((a, b, (a, b) not in normal))
        cycle.append((u, v, True))
        return cycle
    return None


def format_witness(cycle: list) -> str:
    out = fmt_pos(cycle[0][0])
    for _, b, s in cycle:
        out += ("*->" if s else "->") + fmt_pos(b)
    return out


def is_weakly_term_acyclic(R: Trs) -> tuple[bool, str | None]:
    cyc = special_cycle(build_wtdg(expand_degenerate(R)))
    return (cyc is None, None if cyc is None else format_witness(cyc))


def dependency_graph(deps: Iterable[Dependency]) -> WtdGraph:
    """Classic position graph over (relation, index); edges start at frontier variables."""
    nodes, edges = set(), set()
    for d in deps:
        atoms = d.body + (d.head if isinstance(d, TGD) else ())
        for a in atoms:
            nodes |= {(a.rel, i) for i in range(1, len(a.args) + 1)}
        if not isinstance(d, TGD):
            continue
        ex_pos = {(a.rel, i) for a in d.head for i, y in enumerate(a.args, 1) if y in d.existentials}
        for x in d.frontier:
            src = {(a.rel, i) for a in d.body for i, y in enumerate(a.args, 1) if y == x}
            dst = {(a.rel, i) for a in d.head for i, y in enumerate(a.args, 1) if y == x}
            for u in src:
                edges |= {(u, v, False) for v in dst}
                edges |= {(u, v, True) for v in ex_pos}
    return WtdGraph(frozenset(nodes), frozenset(edges))


def is_weakly_acyclic_deps(deps: Iterable[Dependency]) -> tuple[bool, str | None]:
    cyc = special_cycle(dependency_graph(deps))
    return (cyc is None, None if cyc is None else format_witness(cyc))
