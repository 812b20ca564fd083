"""TGDs/EGDs, the standard chase with pluggable schedulers, and the Skolem chase."""
from __future__ import annotations

import random
import re
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Iterator, Mapping, Union


class ChaseError(ValueError):
    pass


class SearchBudgetExceeded(RuntimeError):
    """Backtracking search gave up; the answer is unknown, not negative."""


# ---------------------------------------------------------------- domain

@dataclass(frozen=True, order=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Null:
    index: int

    def __str__(self) -> str:
        return f"_n{self.index}"


@dataclass(frozen=True)
class SkolemTerm:
    fn: str
    args: tuple = ()

    def __str__(self) -> str:
        return f"{self.fn}(" + ",".join(map(str, self.args)) + ")"


Element = Union[Constant, Null, SkolemTerm]


def elem_key(e: Element) -> tuple:
    if isinstance(e, Constant):
        return (0, e.name)
    if isinstance(e, Null):
        return (1, e.index)
    return (2, e.fn, tuple(elem_key(a) for a in e.args))


def is_flexible(e: Element) -> bool:
    return not isinstance(e, Constant)


@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple

    def __str__(self) -> str:
        return f"{self.rel}(" + ", ".join(map(str, self.args)) + ")"

    def key(self) -> tuple:
        return (self.rel, tuple(elem_key(a) if not isinstance(a, str) else (-1, a) for a in self.args))


# Pattern atoms reuse Atom; arguments are variable names (str), Constants, or
# SkolemPattern (only in skolemized heads).

@dataclass(frozen=True)
class SkolemPattern:
    fn: str
    args: tuple  # variable names

    def __str__(self) -> str:
        return f"{self.fn}(" + ",".join(self.args) + ")"


@dataclass(frozen=True)
class TGD:
    body: tuple
    head: tuple
    existentials: tuple = ()

    def __post_init__(self) -> None:
        bv = _vars(self.body)
        for x in _vars(self.head):
            if x not in bv and x not in self.existentials:
                raise ChaseError(f"head variable {x} is neither in the body nor existential")

    @property
    def frontier(self) -> list[str]:
        hv = _vars(self.head)
        return [x for x in _ordered_vars(self.body) if x in hv]

    def __str__(self) -> str:
        ex = f"exists {', '.join(self.existentials)}. " if self.existentials else ""
        return f"{_fmt_conj(self.body)} -> {ex}{_fmt_conj(self.head)}"


@dataclass(frozen=True)
class EGD:
    body: tuple
    lhs: str
    rhs: str

    def __post_init__(self) -> None:
        bv = _vars(self.body)
        if self.lhs not in bv or self.rhs not in bv:
            raise ChaseError("EGD equates variables that do not occur in its body")

    def __str__(self) -> str:
        return f"{_fmt_conj(self.body)} -> {self.lhs} = {self.rhs}"


Dependency = Union[TGD, EGD]


def _fmt_arg(a) -> str:
    if isinstance(a, Constant):
        return f'"{a.name}"'
    return str(a)


def _fmt_conj(atoms) -> str:
    return ", ".join(f"{a.rel}(" + ",".join(_fmt_arg(x) for x in a.args) + ")" for a in atoms)


def _vars(atoms) -> set[str]:
    return set(_ordered_vars(atoms))


def _ordered_vars(atoms) -> list[str]:
    seen: dict[str, None] = {}
    for a in atoms:
        for x in a.args:
            if isinstance(x, str):
                seen.setdefault(x)
            elif isinstance(x, SkolemPattern):
                for y in x.args:
                    seen.setdefault(y)
    return list(seen)


def schema_of(deps: Iterable[Dependency] = (), instance: Iterable[Atom] = ()) -> dict[str, int]:
    sch: dict[str, int] = {}
    atoms = [a for d in deps for a in (d.body + (d.head if isinstance(d, TGD) else ()))]
    for a in list(atoms) + list(instance):
        if sch.setdefault(a.rel, len(a.args)) != len(a.args):
            raise ChaseError(f"arity mismatch for relation {a.rel}")
    return sch


# ---------------------------------------------------------------- instances

class Instance:
    """A mutable set of ground atoms with per-relation and per-element indexes."""

    def __init__(self, atoms: Iterable[Atom] = ()):
        self.atoms: set[Atom] = set()
        self.by_rel: dict[str, set[Atom]] = defaultdict(set)
        self.by_pos: dict[tuple, set[Atom]] = defaultdict(set)
        self.by_elem: dict[Element, set[Atom]] = defaultdict(set)
        self.log: list[Atom] = []  # every successful add, in order
        for a in atoms:
            self.add(a)

    def add(self, a: Atom) -> bool:
        if a in self.atoms:
            return False
        self.atoms.add(a)
        self.log.append(a)
        self.by_rel[a.rel].add(a)
        for i, e in enumerate(a.args):
            self.by_pos[(a.rel, i, e)].add(a)
            self.by_elem[e].add(a)
        return True

    def discard(self, a: Atom) -> None:
        if a not in self.atoms:
            return
        self.atoms.discard(a)
        self.by_rel[a.rel].discard(a)
        for i, e in enumerate(a.args):
            self.by_pos[(a.rel, i, e)].discard(a)
            self.by_elem[e].discard(a)

    def replace(self, old: Element, new: Element) -> None:
        for a in list(self.by_elem.get(old, ())):
            self.discard(a)
            self.add(Atom(a.rel, tuple(new if x == old else x for x in a.args)))
        self.by_elem.pop(old, None)

    def elements(self) -> set[Element]:
        return {e for e, s in self.by_elem.items() if s}

    def frozen(self) -> frozenset[Atom]:
        return frozenset(self.atoms)

    def copy(self) -> "Instance":
        return Instance(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self):
        return iter(sorted(self.atoms, key=Atom.key))

    def __contains__(self, a) -> bool:
        return a in self.atoms


def _as_instance(I) -> Instance:
    return I if isinstance(I, Instance) else Instance(I)


# ---------------------------------------------------------------- queries

def _ground(x, h: Mapping[str, Element]):
    if isinstance(x, str):
        return h.get(x)
    if isinstance(x, SkolemPattern):
        return SkolemTerm(x.fn, tuple(h[y] for y in x.args))
    return x


def _candidates(I: Instance, a: Atom, h: Mapping[str, Element]):
    best = None
    for i, x in enumerate(a.args):
        if isinstance(x, SkolemPattern):
            continue
        v = _ground(x, h)
        if v is not None:
            s = I.by_pos.get((a.rel, i, v), set())
            if best is None or len(s) < len(best):
                best = s
    return I.by_rel.get(a.rel, set()) if best is None else best


def _extend(a: Atom, fact: Atom, h: dict) -> dict | None:
    if len(a.args) != len(fact.args):
        return None
    out = h
    for x, v in zip(a.args, fact.args):
        if isinstance(x, str):
            cur = out.get(x)
            if cur is None:
                if out is h:
                    out = dict(h)
                out[x] = v
            elif cur != v:
                return None
        elif isinstance(x, SkolemPattern):
            if not (isinstance(v, SkolemTerm) and v.fn == x.fn and len(v.args) == len(x.args)):
                return None
            for y, w in zip(x.args, v.args):
                cur = out.get(y)
                if cur is None:
                    if out is h:
                        out = dict(h)
                    out[y] = w
                elif cur != w:
                    return None
        elif x != v:
            return None
    return out


def iter_cq(I: Instance, body: Iterable[Atom], h: Mapping[str, Element] | None = None) -> Iterator[dict]:
    """Homomorphisms from ``body`` into ``I`` extending ``h`` (nested loops, most-bound atom first)."""
    todo = list(body)
    h0 = dict(h or {})

    def go(todo, h):
        if not todo:
            yield h
            return
        i = min(range(len(todo)), key=lambda k: len(_candidates(I, todo[k], h)))
        a, rest = todo[i], todo[:i] + todo[i + 1:]
        for fact in list(_candidates(I, a, h)):
            h2 = _extend(a, fact, h)
            if h2 is not None:
                yield from go(rest, h2)

    yield from go(todo, h0)


def eval_cq(I, body, h=None) -> list[dict]:
    I = _as_instance(I)
    seen = set()
    out = []
    for m in iter_cq(I, body, h):
        key = tuple(sorted((k, elem_key(v)) for k, v in m.items()))
        if key not in seen:
            seen.add(key)
            out.append(m)
    return out


def is_active(I: Instance, d: Dependency, h: Mapping[str, Element]) -> bool:
    if isinstance(d, EGD):
        return h[d.lhs] != h[d.rhs]
    seed = {x: h[x] for x in d.frontier}
    return next(iter_cq(I, d.head, seed), None) is None


def active_triggers(I, d: Dependency) -> list[dict]:
    I = _as_instance(I)
    return [h for h in eval_cq(I, d.body) if is_active(I, d, h)]


def is_model(I, deps: Iterable[Dependency]) -> bool:
    I = _as_instance(I)
    return all(not active_triggers(I, d) for d in deps)


# ---------------------------------------------------------------- chase steps

class Failure(Exception):
    """An EGD tried to equate two distinct constants."""


@dataclass
class _NullSource:
    next: int = 1

    def fresh(self) -> Null:
        n = Null(self.next)
        self.next += 1
        return n


def chase_step(I, d: Dependency, h: Mapping[str, Element], nulls: _NullSource | None = None,
               rename: dict | None = None) -> Instance:
    """Fire an active trigger in place (a fresh Instance is made for frozen input)."""
    I = I if isinstance(I, Instance) else Instance(I)
    if not is_active(I, d, h):
        raise ChaseError("trigger is not active")
    if isinstance(d, TGD):
        nulls = nulls or _NullSource(1 + max((e.index for e in I.elements() if isinstance(e, Null)), default=0))
        ext = dict(h)
        for z in d.existentials:
            ext[z] = nulls.fresh()
        for a in d.head:
            I.add(Atom(a.rel, tuple(_ground(x, ext) for x in a.args)))
        return I
    a, b = h[d.lhs], h[d.rhs]
    old, new = _merge_direction(a, b)
    I.replace(old, new)
    if rename is not None:
        rename[old] = new
    return I


def _merge_direction(a: Element, b: Element) -> tuple[Element, Element]:
    """(replaced, kept): nulls give way to constants; higher nulls to lower ones."""
    if isinstance(a, Constant) and isinstance(b, Constant):
        raise Failure(f"cannot equate constants {a} and {b}")
    if isinstance(a, Constant):
        return b, a
    if isinstance(b, Constant):
        return a, b
    return (a, b) if elem_key(a) > elem_key(b) else (b, a)


class ChaseStatus(str, Enum):
    TERMINATED = "terminated"
    FAILED = "failed"
    BUDGET = "budget"


@dataclass(frozen=True)
class Step:
    index: int
    dep: int
    trigger: tuple
    kind: str

    def line(self) -> str:
        t = ",".join(f"{k}={v}" for k, v in self.trigger)
        return f"step={self.index} dep={self.dep} trigger={{{t}}} kind={self.kind}"


@dataclass
class ChaseOutcome:
    status: ChaseStatus
    instance: frozenset
    steps: list[Step] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def terminated(self) -> bool:
        return self.status is ChaseStatus.TERMINATED


@dataclass(frozen=True)
class Scheduler:
    kind: str = "egd_fair"
    seed: int | None = None

    @classmethod
    def parse(cls, text: str, seed: int | None = None) -> "Scheduler":
        kind = {"fifo": "fifo_fair", "random": "random_fair"}.get(text, text)
        if kind not in ("egd_fair", "fifo_fair", "random_fair"):
            raise ChaseError(f"unknown scheduler {text!r}")
        return cls(kind, seed if kind == "random_fair" else None)

    def __str__(self) -> str:
        return self.kind if self.seed is None else f"{self.kind}({self.seed})"


class _Budget(Exception):
    pass


class _Run:
    def __init__(self, deps, I0, budget, on_egd_fixpoint=None):
        self.deps = list(deps)
        self.I = Instance(I0)
        self.budget = budget
        self.steps: list[Step] = []
        self.rename: dict[Element, Element] = {}
        self.nulls = _NullSource(1 + max((e.index for e in self.I.elements() if isinstance(e, Null)),
                                         default=0))
        self.on_egd_fixpoint = on_egd_fixpoint
        self._mark = 0
        self._tmark = None

    def resolve(self, e: Element) -> Element:
        while e in self.rename:
            e = self.rename[e]
        return e

    def fire(self, j: int, h: dict) -> bool:
        d = self.deps[j]
        h = {k: self.resolve(v) for k, v in h.items()}
        # the trigger may be stale after EGD merges: re-check body and activeness
        if not all(a2 in self.I for a2 in (Atom(a.rel, tuple(_ground(x, h) for x in a.args)) for a in d.body)):
            return False
        if not is_active(self.I, d, h):
            return False
        if len(self.steps) >= self.budget:
            raise _Budget
        chase_step(self.I, d, h, self.nulls, self.rename)
        trig = tuple(sorted((k, str(v)) for k, v in h.items()))
        self.steps.append(Step(len(self.steps) + 1, j, trig, "tgd" if isinstance(d, TGD) else "egd"))
        return True

    def triggers(self, kinds=(TGD, EGD)) -> list[tuple[int, dict]]:
        """Active triggers, found semi-naively from atoms added since the last call.

        Inactive triggers stay inactive under additions and null renaming, and a
        renamed atom is re-added, so nothing is lost by looking only at the delta.
        """
        if self._tmark is None:
            delta = self.I
        else:
            delta = Instance(a for a in self.I.log[self._tmark:] if a in self.I)
        self._tmark = len(self.I.log)
        out = []
        for j, d in enumerate(self.deps):
            if not isinstance(d, kinds):
                continue
            seen = {}
            for h in _seminaive(self.I, delta, d.body):
                key = tuple(sorted((k, elem_key(v)) for k, v in h.items()))
                if key not in seen and is_active(self.I, d, h):
                    seen[key] = h
            out.extend((j, seen[k]) for k in sorted(seen))
        return out

    def saturate_egds(self) -> None:
        # only atoms added since the last EGD fixpoint can violate an EGD
        egds = [(j, d) for j, d in enumerate(self.deps) if isinstance(d, EGD)]
        while True:
            fresh = [a for a in self.I.log[self._mark:] if a in self.I]
            self._mark = len(self.I.log)
            if not fresh:
                break
            delta = Instance(fresh)
            for j, d in egds:
                ts = [h for h in _seminaive(self.I, delta, d.body) if h[d.lhs] != h[d.rhs]]
                ts.sort(key=lambda h: tuple(sorted((k, elem_key(v)) for k, v in h.items())))
                for h in ts:
                    self.fire(j, h)
        if self.on_egd_fixpoint is not None:
            self.on_egd_fixpoint(self.I.frozen())


def run_standard_chase(deps: Iterable[Dependency], I0: Iterable[Atom], scheduler="egd_fair",
                       budget: int = 10000, on_egd_fixpoint: Callable | None = None) -> ChaseOutcome:
    """Round-based fair chase.  ``budget`` bounds the number of fired steps."""
    sched = scheduler if isinstance(scheduler, Scheduler) else Scheduler.parse(scheduler)
    run = _Run(deps, I0, budget, on_egd_fixpoint)
    rng = random.Random(sched.seed)
    try:
        if sched.kind == "egd_fair":
            run.saturate_egds()
            while True:
                ts = run.triggers((TGD,))
                if not ts:
                    break
                for j, h in ts:
                    if run.fire(j, h):
                        run.saturate_egds()
        else:
            while True:
                ts = run.triggers()
                if not ts:
                    break
                if sched.kind == "random_fair":
                    rng.shuffle(ts)
                for j, h in ts:
                    run.fire(j, h)
    except Failure:
        return ChaseOutcome(ChaseStatus.FAILED, run.I.frozen(), run.steps)
    except _Budget:
        return ChaseOutcome(ChaseStatus.BUDGET, run.I.frozen(), run.steps)
    return ChaseOutcome(ChaseStatus.TERMINATED, run.I.frozen(), run.steps)


# ---------------------------------------------------------------- Skolem chase

@dataclass(frozen=True)
class SkolemRule:
    body: tuple
    head: tuple

    def __str__(self) -> str:
        return f"{_fmt_conj(self.body)} -> {_fmt_conj(self.head)}"


def skolemize(d: TGD, index: int = 1) -> SkolemRule:
    if not isinstance(d, TGD):
        raise ChaseError("only TGDs can be skolemized")
    fr = tuple(d.frontier)
    sub = {z: SkolemPattern(f"sk{index}_{z}", fr) for z in d.existentials}
    head = tuple(Atom(a.rel, tuple(sub.get(x, x) if isinstance(x, str) else x for x in a.args))
                 for a in d.head)
    return SkolemRule(d.body, head)


EQ = "Eq"


def singularize(deps: Iterable[Dependency], schema: Mapping[str, int] | None = None) -> list[TGD]:
    """Replace EGDs by an explicit, axiomatized Eq relation."""
    deps = list(deps)
    schema = dict(schema or schema_of(deps))
    schema.pop(EQ, None)
    out: list[TGD] = []
    for d in deps:
        if isinstance(d, TGD):
            out.append(d)
            continue
        body, joins = _split_repeated(d.body)
        out.append(TGD(body + joins, (Atom(EQ, (d.lhs, d.rhs)),)))
    for rel, n in sorted(schema.items()):
        xs = tuple(f"x{i}" for i in range(1, n + 1))
        for i in range(n):
            out.append(TGD((Atom(rel, xs),), (Atom(EQ, (xs[i], xs[i])),)))
        for i in range(n):
            ys = xs[:i] + ("y",) + xs[i + 1:]
            out.append(TGD((Atom(rel, xs), Atom(EQ, (xs[i], "y"))), (Atom(rel, ys),)))
    out.append(TGD((Atom(EQ, ("x", "y")),), (Atom(EQ, ("y", "x")),)))
    out.append(TGD((Atom(EQ, ("x", "y")), Atom(EQ, ("y", "z"))), (Atom(EQ, ("x", "z")),)))
    return out


def _split_repeated(body) -> tuple[tuple, tuple]:
    """Rename later occurrences of a shared variable apart and join them through Eq."""
    seen: dict[str, int] = {}
    new_atoms, joins = [], []
    for a in body:
        args = []
        for x in a.args:
            if isinstance(x, str) and x in seen:
                seen[x] += 1
                y = f"{x}_{seen[x]}"
                joins.append(Atom(EQ, (x, y)))
                args.append(y)
            else:
                if isinstance(x, str):
                    seen[x] = 1
                args.append(x)
        new_atoms.append(Atom(a.rel, tuple(args)))
    return tuple(new_atoms), tuple(joins)


def run_skolem_chase(deps: Iterable[Dependency], I0: Iterable[Atom], budget: int = 1000,
                     atom_cap: int = 200000) -> ChaseOutcome:
    """Semi-naive least fixpoint of the skolemized rules; ``budget`` counts rounds."""
    rules = []
    for j, d in enumerate(deps):
        if isinstance(d, EGD):
            raise ChaseError("Skolem chase needs TGDs only; singularize first")
        rules.append((j, skolemize(d, j + 1)))
    I = Instance(I0)
    delta = Instance(I0)
    steps: list[Step] = []
    for rnd in range(budget + 1):
        new: set[Atom] = set()
        for j, r in rules:
            for h in _seminaive(I, delta, r.body):
                for a in r.head:
                    fact = Atom(a.rel, tuple(_ground(x, h) for x in a.args))
                    if fact not in I:
                        new.add(fact)
        if not new:
            return ChaseOutcome(ChaseStatus.TERMINATED, I.frozen(), steps)
        if rnd == budget or len(I) + len(new) > atom_cap:
            break
        steps.append(Step(rnd + 1, -1, (("new", str(len(new))),), "round"))
        delta = Instance(new)
        for a in new:
            I.add(a)
    return ChaseOutcome(ChaseStatus.BUDGET, I.frozen(), steps)


def _seminaive(I: Instance, delta: Instance, body) -> Iterator[dict]:
    if not body:
        yield {}
        return
    for i, a in enumerate(body):
        for fact in list(delta.by_rel.get(a.rel, ())):
            h = _extend(a, fact, {})
            if h is not None:
                yield from iter_cq(I, body[:i] + body[i + 1:], h)


# ---------------------------------------------------------------- homomorphisms

def find_instance_hom(I, J, injective: bool = False, node_budget: int = 200000) -> dict | None:
    """A homomorphism I -> J fixing constants, or None.  Raises on search exhaustion."""
    I, J = _as_instance(I), _as_instance(J)
    atoms = sorted(I.atoms, key=Atom.key)
    counter = [0]

    def compatible(a: Atom, h: dict) -> list[Atom]:
        pool = None
        for i, e in enumerate(a.args):
            v = e if not is_flexible(e) else h.get(e)
            if v is not None:
                s = J.by_pos.get((a.rel, i, v), set())
                pool = s if pool is None or len(s) < len(pool) else pool
        return sorted(J.by_rel.get(a.rel, ()) if pool is None else pool, key=Atom.key)

    def go(todo: list[Atom], h: dict, used: set) -> dict | None:
        counter[0] += 1
        if counter[0] > node_budget:
            raise SearchBudgetExceeded(f"homomorphism search exceeded {node_budget} nodes")
        if not todo:
            return h
        k = min(range(len(todo)), key=lambda i: len(compatible(todo[i], h)))
        a, rest = todo[k], todo[:k] + todo[k + 1:]
        for b in compatible(a, h):
            h2, used2, ok = dict(h), set(used), True
            for e, v in zip(a.args, b.args):
                if not is_flexible(e):
                    ok = e == v
                elif e in h2:
                    ok = h2[e] == v
                elif injective and (v in used2 or not is_flexible(v)):
                    ok = False
                else:
                    h2[e] = v
                    used2.add(v)
                if not ok:
                    break
            if ok:
                res = go(rest, h2, used2)
                if res is not None:
                    return res
        return None

    return go(atoms, {}, set())


def is_core(I, node_budget: int = 200000) -> bool:
    I = _as_instance(I)
    for a in sorted(I.atoms, key=Atom.key):
        if not any(is_flexible(e) for e in a.args):
            continue
        rest = Instance(I.atoms - {a})
        if find_instance_hom(I, rest, node_budget=node_budget) is not None:
            return False
    return True


def instances_isomorphic(I, J, node_budget: int = 200000) -> bool:
    I, J = _as_instance(I), _as_instance(J)
    if len(I) != len(J) or len(I.elements()) != len(J.elements()):
        return False
    return find_instance_hom(I, J, injective=True, node_budget=node_budget) is not None


def hom_equivalent(I, J, node_budget: int = 200000) -> bool:
    return (find_instance_hom(I, J, node_budget=node_budget) is not None
            and find_instance_hom(J, I, node_budget=node_budget) is not None)


# ---------------------------------------------------------------- text formats

def _split_top(text: str, sep: str = ",") -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        out.append("".join(cur))
    return [s.strip() for s in out]


def _parse_pattern_atom(text: str, lineno: int) -> Atom:
    m = re.fullmatch(r"\s*([A-Za-z_]\w*)\s*\((.*)\)\s*", text)
    if m is None:
        raise ChaseError(f"line {lineno}: malformed atom {text.strip()!r}")
    args = []
    for a in _split_top(m.group(2)):
        if re.fullmatch(r'"[^"]*"', a):
            args.append(Constant(a[1:-1]))
        elif re.fullmatch(r"[A-Za-z_]\w*", a):
            args.append(a)
        else:
            raise ChaseError(f"line {lineno}: bad term {a!r} in atom")
    return Atom(m.group(1), tuple(args))


def parse_dependency(line: str, lineno: int = 1) -> Dependency:
    if "->" not in line:
        raise ChaseError(f"line {lineno}: expected '->'")
    lhs, rhs = line.split("->", 1)
    body = tuple(_parse_pattern_atom(a, lineno) for a in _split_top(lhs))
    rhs = rhs.strip()
    m = re.fullmatch(r"([A-Za-z_]\w*)\s*=\s*([A-Za-z_]\w*)", rhs)
    if m:
        return EGD(body, m.group(1), m.group(2))
    ex: tuple = ()
    m = re.match(r"exists\s+([\w\s,]+?)\s*\.\s*(.*)$", rhs)
    if m:
        ex = tuple(x.strip() for x in m.group(1).split(",") if x.strip())
        rhs = m.group(2)
    head = tuple(_parse_pattern_atom(a, lineno) for a in _split_top(rhs))
    try:
        return TGD(body, head, ex)
    except ChaseError as e:
        raise ChaseError(f"line {lineno}: {e}") from None


def parse_dependencies(text: str) -> list[Dependency]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if line:
            out.append(parse_dependency(line, lineno))
    return out


def deps_to_text(deps: Iterable[Dependency]) -> str:
    return "".join(f"{d}\n" for d in deps)


def _parse_element(text: str, lineno: int) -> Element:
    text = text.strip()
    m = re.fullmatch(r"_n(\d+)", text)
    if m:
        return Null(int(m.group(1)))
    m = re.fullmatch(r"([A-Za-z_]\w*)\s*\((.*)\)", text)
    if m:
        return SkolemTerm(m.group(1), tuple(_parse_element(a, lineno) for a in _split_top(m.group(2))))
    if re.fullmatch(r"[A-Za-z0-9_]\w*", text):
        return Constant(text)
    raise ChaseError(f"line {lineno}: bad element {text!r}")


def parse_instance(text: str) -> frozenset[Atom]:
    atoms = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        line = re.sub(r"\)\s+(?=[A-Za-z_])", "),", line)
        for piece in _split_top(line):
            m = re.fullmatch(r"([A-Za-z_]\w*)\s*\((.*)\)", piece)
            if m is None:
                raise ChaseError(f"line {lineno}: malformed atom {piece!r}")
            atoms.add(Atom(m.group(1), tuple(_parse_element(a, lineno) for a in _split_top(m.group(2)))))
    return frozenset(atoms)


def instance_to_text(I: Iterable[Atom]) -> str:
    return "".join(f"{a}\n" for a in sorted(I, key=Atom.key))
