"""Ground terms, patterns, and term rewriting systems.

Terms and patterns share one node type: a :class:`Term` whose children may
include :class:`Var` leaves (a pattern) or :class:`State` leaves (a term over
the signature extended with E-classes).  A term is ground when it has
neither.
"""
from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


class TermError(ValueError):
    """Malformed term, pattern, rule or signature."""


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return "?" + self.name


@dataclass(frozen=True, slots=True)
class State:
    """An E-class used as a nullary symbol inside a term."""

    id: int

    def __str__(self) -> str:
        return f"c{self.id}"


@dataclass(frozen=True, slots=True)
class Term:
    head: str
    args: tuple = ()
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((self.head, self.args)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return print_term(self)


Pattern = Union[Term, Var]
AnyTerm = Union[Term, Var, State]


def app(head: str, *args: AnyTerm) -> Term:
    return Term(head, tuple(args))


def size(t: AnyTerm) -> int:
    if isinstance(t, Term):
        return 1 + sum(size(a) for a in t.args)
    return 1


def depth(t: AnyTerm) -> int:
    if isinstance(t, Term) and t.args:
        return 1 + max(depth(a) for a in t.args)
    return 1


def variables(p: AnyTerm) -> set[str]:
    if isinstance(p, Var):
        return {p.name}
    if isinstance(p, Term):
        out: set[str] = set()
        for a in p.args:
            out |= variables(a)
        return out
    return set()


def is_ground(t: AnyTerm) -> bool:
    if isinstance(t, Term):
        return all(is_ground(a) for a in t.args)
    return False


def subterms(t: AnyTerm) -> Iterator[AnyTerm]:
    """Every sub-pattern of ``t``, parents before children, with repeats."""
    yield t
    if isinstance(t, Term):
        for a in t.args:
            yield from subterms(a)


def symbols_of(t: AnyTerm, out: dict[str, int] | None = None) -> dict[str, int]:
    out = {} if out is None else out
    for s in subterms(t):
        if isinstance(s, Term):
            known = out.setdefault(s.head, len(s.args))
            if known != len(s.args):
                raise TermError(
                    f"symbol {s.head!r} used with arities {known} and {len(s.args)}")
    return out


class Signature(dict):
    """Map from symbol name to arity."""

    def check(self, t: AnyTerm) -> None:
        for s in subterms(t):
            if not isinstance(s, Term):
                continue
            if s.head not in self:
                raise TermError(f"unknown symbol {s.head!r}")
            if self[s.head] != len(s.args):
                raise TermError(
                    f"arity mismatch for {s.head!r}: expected {self[s.head]}, got {len(s.args)}")

    def merged(self, other: Mapping[str, int]) -> "Signature":
        out = Signature(self)
        for k, n in other.items():
            if out.setdefault(k, n) != n:
                raise TermError(f"symbol {k!r} has conflicting arities {out[k]} and {n}")
        return out

    def constants(self) -> list[str]:
        return sorted(k for k, n in self.items() if n == 0)

    @classmethod
    def infer(cls, *terms: AnyTerm) -> "Signature":
        out: dict[str, int] = {}
        for t in terms:
            symbols_of(t, out)
        return cls(out)

    def __str__(self) -> str:
        return "sig " + " ".join(f"{k}/{n}" for k, n in sorted(self.items()))


@dataclass(frozen=True)
class RewriteRule:
    lhs: Pattern
    rhs: Pattern

    def __post_init__(self) -> None:
        extra = variables(self.rhs) - variables(self.lhs)
        if extra:
            raise TermError(f"rhs variables {sorted(extra)} not bound by lhs in {self}")
        for side in (self.lhs, self.rhs):
            if isinstance(side, State):
                raise TermError("rules may not mention E-classes")

    @property
    def variable_preserving(self) -> bool:
        return variables(self.lhs) == variables(self.rhs)

    def flipped(self) -> "RewriteRule":
        return RewriteRule(self.rhs, self.lhs)

    def __str__(self) -> str:
        return f"{print_term(self.lhs)} -> {print_term(self.rhs)}"


@dataclass(frozen=True)
class Trs:
    signature: Signature
    rules: tuple[RewriteRule, ...] = ()

    def __post_init__(self) -> None:
        for r in self.rules:
            self.signature.check(r.lhs)
            self.signature.check(r.rhs)

    @classmethod
    def of(cls, rules: Iterable[RewriteRule], signature: Mapping[str, int] | None = None) -> "Trs":
        rules = tuple(rules)
        sig = Signature(signature or {})
        for r in rules:
            sig = sig.merged(Signature.infer(r.lhs, r.rhs))
        return cls(sig, rules)

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def to_text(self, header: bool = True) -> str:
        lines = [str(self.signature)] if header else []
        lines += [str(r) for r in self.rules]
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-']*$")


def _tokens(text: str) -> list[str]:
    toks, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise TermError(f"syntax error at offset {pos}: {text[pos:pos + 10]!r}")
        toks.append(m.group(m.lastindex))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return toks


def _parse_sexpr(toks: list[str], i: int, allow_vars: bool) -> tuple[Pattern, int]:
    if i >= len(toks):
        raise TermError("syntax error: unexpected end of input")
    tok = toks[i]
    if tok == ")":
        raise TermError("syntax error: unexpected ')'")
    if tok != "(":
        return _atom(tok, allow_vars), i + 1
    i += 1
    if i >= len(toks) or toks[i] in "()":
        raise TermError("syntax error: expected a symbol after '('")
    head = toks[i]
    if head.startswith("?"):
        raise TermError(f"syntax error: variable {head} in head position")
    if not _IDENT.match(head):
        raise TermError(f"syntax error: bad symbol {head!r}")
    i += 1
    args = []
    while True:
        if i >= len(toks):
            raise TermError("syntax error: missing ')'")
        if toks[i] == ")":
            return Term(head, tuple(args)), i + 1
        a, i = _parse_sexpr(toks, i, allow_vars)
        args.append(a)


def _atom(tok: str, allow_vars: bool) -> Pattern:
    if tok.startswith("?"):
        if not allow_vars:
            raise TermError(f"variable {tok} not allowed in a ground term")
        if not _IDENT.match(tok[1:]):
            raise TermError(f"syntax error: bad variable {tok!r}")
        return Var(tok[1:])
    if not _IDENT.match(tok):
        raise TermError(f"syntax error: bad symbol {tok!r}")
    return Term(tok)


def parse_pattern(text: str, sig: Mapping[str, int] | None = None) -> Pattern:
    toks = _tokens(text)
    p, i = _parse_sexpr(toks, 0, allow_vars=True)
    if i != len(toks):
        raise TermError(f"syntax error: trailing input {' '.join(toks[i:])!r}")
    if sig is not None:
        Signature(sig).check(p)
    else:
        symbols_of(p)
    return p


def parse_term(text: str, sig: Mapping[str, int] | None = None) -> Term:
    """Parse an s-expression ground term, checking it against ``sig`` if given."""
    toks = _tokens(text)
    t, i = _parse_sexpr(toks, 0, allow_vars=False)
    if i != len(toks):
        raise TermError(f"syntax error: trailing input {' '.join(toks[i:])!r}")
    if sig is not None:
        Signature(sig).check(t)
    else:
        symbols_of(t)
    return t


def print_term(t: AnyTerm) -> str:
    if isinstance(t, Var):
        return "?" + t.name
    if isinstance(t, State):
        return str(t)
    if not t.args:
        return t.head
    return "(" + t.head + " " + " ".join(print_term(a) for a in t.args) + ")"


def parse_rule(line: str, sig: Mapping[str, int] | None = None) -> RewriteRule:
    if "->" not in line:
        raise TermError("expected 'lhs -> rhs'")
    lhs, rhs = line.split("->", 1)
    return RewriteRule(parse_pattern(lhs, sig), parse_pattern(rhs, sig))


def parse_trs(text: str) -> Trs:
    """Parse the line-oriented TRS format; errors carry 1-based line numbers."""
    declared: Signature | None = None
    inferred = Signature()
    rules: list[RewriteRule] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        try:
            if line.startswith("sig ") or line == "sig":
                declared = _parse_sig_line(line, declared)
                continue
            rule = parse_rule(line, declared)
            inferred = inferred.merged(Signature.infer(rule.lhs, rule.rhs))
            rules.append(rule)
        except TermError as e:
            raise TermError(f"line {lineno}: {e}") from None
    try:
        return Trs.of(rules, declared)
    except TermError as e:
        raise TermError(f"signature: {e}") from None


def _parse_sig_line(line: str, declared: Signature | None) -> Signature:
    sig = Signature(declared or {})
    for item in line.split()[1:]:
        name, _, n = item.rpartition("/")
        if not name or not n.isdigit():
            raise TermError(f"bad signature entry {item!r}")
        sig = sig.merged({name: int(n)})
    return sig


# ---------------------------------------------------------------- rewriting

def substitute(p: AnyTerm, sigma: Mapping[str, AnyTerm]) -> AnyTerm:
    """Apply ``sigma`` to pattern ``p``; every variable of ``p`` must be bound."""
    if isinstance(p, Var):
        try:
            return sigma[p.name]
        except KeyError:
            raise TermError(f"unbound variable ?{p.name}") from None
    if isinstance(p, State) or not p.args:
        return p
    return Term(p.head, tuple(substitute(a, sigma) for a in p.args))


def match(p: Pattern, t: Term, sigma: dict | None = None) -> dict | None:
    """Syntactic matching; repeated variables need identical subterms."""
    sigma = {} if sigma is None else sigma
    stack = [(p, t)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            bound = sigma.get(p.name)
            if bound is None:
                sigma[p.name] = t
            elif bound != t:
                return None
            continue
        if not isinstance(t, Term) or p.head != t.head or len(p.args) != len(t.args):
            return None
        stack.extend(zip(p.args, t.args))
    return sigma


def _positions(t: Term, prefix=()):
    yield prefix, t
    for i, a in enumerate(t.args):
        yield from _positions(a, prefix + (i,))


def replace_at(t: Term, pos: tuple, new: Term) -> Term:
    if not pos:
        return new
    i = pos[0]
    args = list(t.args)
    args[i] = replace_at(args[i], pos[1:], new)
    return Term(t.head, tuple(args))


def one_step_rewrites(R: Trs | Iterable[RewriteRule], t: Term) -> set[Term]:
    out = set()
    rules = R.rules if isinstance(R, Trs) else tuple(R)
    for pos, sub in _positions(t):
        for r in rules:
            sigma = match(r.lhs, sub)
            if sigma is not None:
                out.add(replace_at(t, pos, substitute(r.rhs, sigma)))
    return out


def rewrite_closure(R: Trs | Iterable[RewriteRule], t: Term, size_bound: int) -> set[Term]:
    """Terms reachable from ``t`` through terms of size at most ``size_bound``."""
    if size(t) > size_bound:
        raise TermError("size_bound is smaller than the start term")
    seen = {t}
    queue = deque([t])
    while queue:
        u = queue.popleft()
        for v in one_step_rewrites(R, u):
            if v not in seen and size(v) <= size_bound:
                seen.add(v)
                queue.append(v)
    return seen


def symmetric_closure(R: Trs) -> Trs:
    rules: list[RewriteRule] = []
    seen = set()
    for r in R.rules:
        if not r.variable_preserving:
            raise TermError(f"rule is not variable-preserving: {r}")
        for x in (r, r.flipped()):
            key = (x.lhs, x.rhs)
            if key not in seen:
                seen.add(key)
                rules.append(x)
    return Trs(R.signature, tuple(rules))


def enumerate_ground_terms(sig: Mapping[str, int], size_bound: int) -> dict[int, list[Term]]:
    """All ground terms over ``sig`` grouped by size, up to ``size_bound``."""
    by_size: dict[int, list[Term]] = {n: [] for n in range(1, size_bound + 1)}
    for n in range(1, size_bound + 1):
        for f, k in sorted(sig.items()):
            if k == 0:
                if n == 1:
                    by_size[1].append(Term(f))
                continue
            for split in _compositions(n - 1, k):
                for args in itertools.product(*(by_size[s] for s in split)):
                    by_size[n].append(Term(f, args))
    return by_size


def _compositions(total: int, parts: int):
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest

