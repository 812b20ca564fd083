"""Reductions between the chase and equality saturation, and their verifiers."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .chase import (EGD, TGD, Atom, ChaseError, ChaseOutcome, Constant, Dependency, Null,
                    Scheduler, SkolemPattern, SkolemTerm, instances_isomorphic, run_skolem_chase,
                    run_standard_chase, schema_of, skolemize)
from .egraph import Automaton, EGraph, EGraphError, check_invariants, rebuild
from .eqsat import EqSatOutcome, eqsat
from .terms import Pattern, RewriteRule, Signature, Term, Trs, Var

TOP = "top"
AND = "and"


class BridgeError(ValueError):
    pass


# ---------------------------------------------------------------- Skolem chase -> EqSat

@dataclass(frozen=True)
class SkolemEncoding:
    trs: Trs
    term: Term
    relations: dict
    skolem_fns: dict
    constants: frozenset

    @property
    def signature(self) -> Signature:
        return self.trs.signature


def _conj(atoms: Sequence[Pattern]) -> Pattern:
    out: Pattern = Term(TOP)
    for a in reversed(atoms):
        out = Term(AND, (a, out))
    return out


def _arg_pattern(x) -> Pattern:
    if isinstance(x, str):
        return Var(x)
    if isinstance(x, Constant):
        return Term(x.name)
    if isinstance(x, SkolemPattern):
        return Term(x.fn, tuple(Var(y) for y in x.args))
    raise BridgeError(f"unexpected argument {x!r}")


def _atom_pattern(a: Atom) -> Term:
    return Term(a.rel, tuple(_arg_pattern(x) for x in a.args))


def _element_term(e) -> Term:
    if isinstance(e, Constant):
        return Term(e.name)
    if isinstance(e, SkolemTerm):
        return Term(e.fn, tuple(_element_term(a) for a in e.args))
    raise BridgeError(f"nulls cannot be encoded as terms: {e}")


def encode_skolem_to_eqsat(deps: Iterable[Dependency], I0: Iterable[Atom],
                           schema: Mapping[str, int] | None = None) -> SkolemEncoding:
    deps = list(deps)
    I0 = sorted(I0, key=Atom.key)
    if any(isinstance(d, EGD) for d in deps):
        raise BridgeError("EGDs must be singularized before encoding")
    schema = dict(schema_of(deps, I0)) | dict(schema or {})
    sig = Signature({TOP: 0, AND: 2})
    rules = [RewriteRule(Term(TOP), Term(AND, (Term(TOP), Term(TOP))))]
    for rel, n in sorted(schema.items()):
        sig = sig.merged({rel: n})
        rules.append(RewriteRule(Term(rel, tuple(Var(f"x{i}") for i in range(1, n + 1))), Term(TOP)))
    skolem_fns: dict[str, int] = {}
    for j, d in enumerate(deps):
        sk = skolemize(d, j + 1)
        for a in sk.head:
            for x in a.args:
                if isinstance(x, SkolemPattern):
                    skolem_fns[x.fn] = len(x.args)
        rules.append(RewriteRule(_conj([_atom_pattern(a) for a in sk.body]),
                                 _conj([_atom_pattern(a) for a in sk.head])))
    constants = set()
    for a in I0:
        for e in a.args:
            if isinstance(e, Constant):
                constants.add(e.name)
        rules.append(RewriteRule(Term(TOP), _element_term_atom(a)))
    for d in deps:
        for a in d.body + d.head:
            constants |= {x.name for x in a.args if isinstance(x, Constant)}
    sig = sig.merged(skolem_fns).merged({c: 0 for c in constants})
    clash = set(schema) & (set(skolem_fns) | constants | {TOP, AND})
    if clash:
        raise BridgeError(f"relation names clash with other symbols: {sorted(clash)}")
    return SkolemEncoding(Trs(sig, tuple(rules)), Term(TOP), schema, skolem_fns, frozenset(constants))


def _element_term_atom(a: Atom) -> Term:
    return Term(a.rel, tuple(_element_term(e) for e in a.args))


def xi(G: EGraph, enc: SkolemEncoding | Mapping[str, int]) -> frozenset[Atom]:
    """Relational atoms over constants and Skolem terms represented in ``G``."""
    relations = enc.relations if isinstance(enc, SkolemEncoding) else dict(enc)
    idx = G.index()
    memo: dict[int, frozenset] = {}

    def readback(c: int, stack: frozenset) -> frozenset:
        if c in memo:
            return memo[c]
        if c in stack:
            raise BridgeError(f"class c{c} reads back to infinitely many domain elements")
        out = set()
        for head, kids_list in idx[c].items():
            if head in relations or head in (TOP, AND):
                continue
            for kids in kids_list:
                parts = [readback(k, stack | {c}) for k in kids]
                out |= {_domain(head, combo) for combo in _product(parts)}
        memo[c] = frozenset(out)
        return memo[c]

    atoms = set()
    for c, heads in idx.items():
        for rel in heads:
            if rel not in relations:
                continue
            for kids in heads[rel]:
                parts = [readback(k, frozenset()) for k in kids]
                if any(not p for p in parts):
                    raise BridgeError(f"argument of {rel} reads back to no domain element")
                atoms |= {Atom(rel, combo) for combo in _product(parts)}
    return frozenset(atoms)


def _product(parts):
    return itertools.product(*(sorted(p, key=str) for p in parts))


def _domain(head: str, args: tuple):
    return Constant(head) if not args else SkolemTerm(head, tuple(args))


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "pass" if self.passed else "fail"
        return f"check={self.name} status={status} detail={self.detail}"


@dataclass
class VerifyReport:
    name: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append(Check(name, ok, detail))

    def lines(self) -> str:
        out = [c.line() for c in self.checks]
        out.append(f"check={self.name} status={'pass' if self.passed else 'fail'}")
        return "\n".join(out) + "\n"


def verify_skolem_equiv(deps, I0, budget: int = 50, eqsat_budget: int | None = None) -> VerifyReport:
    """Compare xi(EqSat(encoding)) with the Skolem chase fixpoint."""
    deps, I0 = list(deps), frozenset(I0)
    enc = encode_skolem_to_eqsat(deps, I0)
    G = EGraph(enc.signature)
    G.add_term(enc.term)
    eq = eqsat(enc.trs, G, budget=eqsat_budget if eqsat_budget is not None else 3 * budget + 3)
    sk = run_skolem_chase(deps, I0, budget=budget)
    rep = VerifyReport("thm15")
    rep.add("thm15.status", eq.terminated == sk.terminated,
            f"eqsat={eq.status.value} skolem={sk.status.value}")
    if eq.terminated and sk.terminated:
        got = xi(eq.egraph, enc)
        rep.add("thm15.atoms", got == sk.instance,
                f"xi={len(got)} skolem={len(sk.instance)} diff={len(got ^ sk.instance)}")
    return rep


# ---------------------------------------------------------------- EqSat -> standard chase

def rel_name(f: str) -> str:
    return f"R_{f}"


def symbol_of(rel: str) -> str:
    if not rel.startswith("R_"):
        raise BridgeError(f"relation {rel!r} does not encode a function symbol")
    return rel[2:]


def class_null(c: int) -> Null:
    return Null(c + 1)


def encode_egraph_to_instance(G: EGraph) -> tuple[dict[str, int], frozenset[Atom]]:
    schema = {rel_name(f): n + 1 for f, n in G.signature.items()}
    atoms = frozenset(Atom(rel_name(h), tuple(class_null(x) for x in ch) + (class_null(c),))
                      for h, ch, c in G.nodes())
    return schema, atoms


def decode_instance_to_egraph(I: Iterable[Atom]) -> EGraph:
    atoms = sorted(I, key=Atom.key)
    ids: dict = {}
    trans = set()
    for a in atoms:
        if not a.args:
            raise BridgeError(f"{a.rel} has no result position")
        for e in a.args:
            ids.setdefault(e, len(ids))
        trans.add((symbol_of(a.rel), tuple(ids[e] for e in a.args[:-1]), ids[a.args[-1]]))
    A = Automaton(set(ids.values()), trans)
    problems = check_invariants(A)
    if problems:
        raise BridgeError("; ".join(problems))
    return rebuild(A)[0]


def _flatten_pattern(p: Pattern, root: str, fresh, shared: dict) -> tuple[str, list[Atom]]:
    """Atoms for ``p`` with its root named ``root``; internal nodes from ``fresh``."""
    atoms: list[Atom] = []

    def walk(q: Pattern, name: str | None) -> str:
        if isinstance(q, Var):
            return q.name
        if name is None:
            if q in shared:
                return shared[q]
            name = fresh()
            shared[q] = name
        args = tuple(walk(a, None) for a in q.args)
        atoms.append(Atom(rel_name(q.head), args + (name,)))
        return name

    return walk(p, root), atoms


def fd_egds(sig: Mapping[str, int]) -> list[EGD]:
    out = []
    for f, n in sorted(sig.items()):
        xs = tuple(f"x{i}" for i in range(1, n + 1))
        out.append(EGD((Atom(rel_name(f), xs + ("x",)), Atom(rel_name(f), xs + ("x_",))), "x", "x_"))
    return out


def encode_rule(rule: RewriteRule, sig: Mapping[str, int]) -> list[Dependency]:
    counter = iter(range(1, 10 ** 9))

    def fresh() -> str:
        return f"w{next(counter)}"

    lhs, rhs = rule.lhs, rule.rhs
    if isinstance(lhs, Var):
        # ground the variable through every symbol that can produce it
        if isinstance(rhs, Var):
            return []
        out = []
        for f, n in sorted(sig.items()):
            ys = tuple(f"y{i}" for i in range(1, n + 1))
            body = (Atom(rel_name(f), ys + (lhs.name,)),)
            out.extend(_encode_sides(body, lhs.name, rhs, fresh))
        return out
    _, body = _flatten_pattern(lhs, "r", fresh, {})
    if isinstance(rhs, Var):
        return [EGD(tuple(body), rhs.name, "r")]
    return _encode_sides(tuple(body), "r", rhs, fresh)


def _encode_sides(body: tuple, root: str, rhs: Pattern, fresh) -> list[Dependency]:
    shared: dict = {}
    _, head = _flatten_pattern(rhs, root, fresh, shared)
    ex = tuple(v for v in shared.values())
    return [TGD(body, tuple(head), ex)]


def encode_trs_to_deps(R: Trs, signature: Mapping[str, int] | None = None) -> list[Dependency]:
    sig = Signature(R.signature).merged(signature or {})
    deps: list[Dependency] = list(fd_egds(sig))
    for rule in R.rules:
        deps.extend(encode_rule(rule, sig))
    return deps


@dataclass
class ChaseEncoding:
    schema: dict
    deps: list
    instance: frozenset


def encode_eqsat_to_chase(R: Trs, G: EGraph) -> ChaseEncoding:
    sig = Signature(G.signature).merged(R.signature)
    H = G.copy()
    H.signature = sig
    schema, inst = encode_egraph_to_instance(H)
    return ChaseEncoding(schema, encode_trs_to_deps(R, sig), inst)


def verify_chase_equiv(R: Trs, G: EGraph, seeds: Sequence[int] = (1, 2, 3), budget: int = 1000,
                       chase_budget: int = 5000) -> tuple[VerifyReport, dict]:
    """Run EqSat and several fair chases on the encoding and compare."""
    enc = encode_eqsat_to_chase(R, G)
    eq = eqsat(R, G.copy(), budget=budget)
    runs: dict[str, ChaseOutcome] = {"egd_fair": run_standard_chase(enc.deps, enc.instance, "egd_fair",
                                                                      budget=chase_budget)}
    for s in seeds:
        runs[f"random_fair({s})"] = run_standard_chase(enc.deps, enc.instance,
                                                       Scheduler("random_fair", s), budget=chase_budget)
    rep = VerifyReport("thm17")
    if eq.terminated:
        _, expected = encode_egraph_to_instance(eq.egraph)
        for name, out in runs.items():
            rep.add(f"thm17.{name}.status", out.terminated, f"chase={out.status.value} steps={out.length}")
            if out.terminated:
                rep.add(f"thm17.{name}.iso", instances_isomorphic(out.instance, expected),
                        f"atoms={len(out.instance)} expected={len(expected)}")
    else:
        out = runs["egd_fair"]
        rep.add("thm17.egd_fair.status", not out.terminated,
                f"eqsat={eq.status.value} chase={out.status.value}")
    return rep, {"eqsat": eq, **runs}
