"""Turing machines and PCP instances as rewrite systems (stress corpora).

Strings are tuples of symbol names.  A string ``s1 s2 ... sn`` becomes the
unary term ``s1(s2(...sn(eps)))``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .terms import RewriteRule, Signature, Term, TermError, Trs, Var

EPS = "eps"
LMARK = "lmark"
RMARK = "rmark"
BAR = "bar_"
LDUM = "L__"
RDUM = "R__"


class GeneratorError(ValueError):
    pass


# ---------------------------------------------------------------- strings and SRSs

@dataclass(frozen=True)
class StringRule:
    lhs: tuple
    rhs: tuple

    def __post_init__(self) -> None:
        if not self.lhs:
            raise GeneratorError("string rule with empty lhs")

    def __str__(self) -> str:
        return " ".join(self.lhs) + " -> " + " ".join(self.rhs)


@dataclass(frozen=True)
class Srs:
    rules: tuple
    alphabet: frozenset = frozenset()

    @classmethod
    def of(cls, rules: Iterable[StringRule]) -> "Srs":
        rules = tuple(dict.fromkeys(rules))
        alpha = frozenset(s for r in rules for s in r.lhs + r.rhs)
        return cls(rules, alpha)

    def successors(self, w: Sequence[str]) -> list[tuple]:
        w = tuple(w)
        out = []
        for r in self.rules:
            n = len(r.lhs)
            for i in range(len(w) - n + 1):
                if w[i:i + n] == r.lhs:
                    out.append(w[:i] + r.rhs + w[i + n:])
        return list(dict.fromkeys(out))


def string_to_term(s: Sequence[str], tail: Term | Var | None = None):
    out = Term(EPS) if tail is None else tail
    for a in reversed(tuple(s)):
        out = Term(a, (out,))
    return out


def term_to_string(t: Term) -> tuple:
    out = []
    while t.args:
        out.append(t.head)
        t = t.args[0]
    if t.head != EPS:
        raise GeneratorError(f"not a string term: ends in {t.head}")
    return tuple(out)


def srs_to_trs(S: Srs) -> Trs:
    sig = Signature({a: 1 for a in S.alphabet})
    sig[EPS] = 0
    x = Var("x")
    rules = tuple(RewriteRule(string_to_term(r.lhs, x), string_to_term(r.rhs, x)) for r in S.rules)
    return Trs(sig, rules)


# ---------------------------------------------------------------- Turing machines

@dataclass(frozen=True)
class Transition:
    state: str
    read: str
    write: str
    move: str
    target: str


@dataclass(frozen=True)
class TuringMachine:
    states: tuple
    blank: str
    transitions: tuple
    initial: str = ""
    input: tuple = ()

    def __post_init__(self) -> None:
        seen = set()
        for t in self.transitions:
            if t.move not in ("L", "R"):
                raise GeneratorError(f"bad move {t.move!r}")
            if (t.state, t.read) in seen:
                raise GeneratorError(f"nondeterministic machine at ({t.state}, {t.read})")
            seen.add((t.state, t.read))
            for q in (t.state, t.target):
                if q not in self.states:
                    raise GeneratorError(f"unknown state {q!r}")

    @property
    def q0(self) -> str:
        return self.initial or self.states[0]

    @property
    def tape_alphabet(self) -> tuple:
        syms = {self.blank, *self.input}
        for t in self.transitions:
            syms |= {t.read, t.write}
        return tuple(sorted(syms))

    def delta(self, q: str, a: str) -> Transition | None:
        for t in self.transitions:
            if t.state == q and t.read == a:
                return t
        return None

    def q(self, name: str) -> str:
        return f"q{self.states.index(name)}"

    def qbar(self, name: str) -> str:
        return f"barq{self.states.index(name)}"


def parse_tm(text: str) -> TuringMachine:
    states, blank, trans, inp, initial = (), None, [], (), ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        for part in raw.split("#", 1)[0].split(";"):
            words = part.split()
            if not words:
                continue
            key, rest = words[0], words[1:]
            if key == "states":
                states = tuple(rest)
            elif key == "blank" and len(rest) == 1:
                blank = rest[0]
            elif key == "initial" and len(rest) == 1:
                initial = rest[0]
            elif key == "input":
                inp = tuple(rest)
            elif key == "trans" and len(rest) == 5:
                trans.append(Transition(*rest))
            else:
                raise GeneratorError(f"line {lineno}: cannot parse {part.strip()!r}")
    if not states or blank is None:
        raise GeneratorError("machine needs 'states' and 'blank' lines")
    return TuringMachine(states, blank, tuple(trans), initial, inp)


def bar(a: str) -> str:
    return BAR + a


def tm_to_srs(M: TuringMachine) -> Srs:
    rules = []
    zs: list[str] = []
    for t in M.transitions:
        qi, qib, qj, qjb = M.q(t.state), M.qbar(t.state), M.q(t.target), M.qbar(t.target)
        a, b = t.read, t.write
        rows = [((qi, a), _z(qi, a)), ((bar(a), qib), _z(bar(a), qib))]
        for (lhs, z) in rows:
            zs.append(z)
            if t.move == "R":
                rules.append(StringRule(lhs, (LDUM + z, bar(b), qj)))
            else:
                rules.append(StringRule(lhs, (qjb, b, RDUM + z)))
        if a == M.blank:
            z1, z2 = _z(qi, RMARK), _z(LMARK, qib)
            zs += [z1, z2]
            if t.move == "R":
                rules.append(StringRule((qi, RMARK), (LDUM + z1, bar(b), qj, RMARK)))
                rules.append(StringRule((LMARK, qib), (LMARK, LDUM + z2, bar(b), qj)))
            else:
                rules.append(StringRule((qi, RMARK), (qjb, b, RDUM + z1, RMARK)))
                rules.append(StringRule((LMARK, qib), (LMARK, qjb, b, RDUM + z2)))
    for q in M.states:
        for z in dict.fromkeys(zs):
            rules.append(StringRule((M.q(q), RDUM + z), (LDUM + z, LDUM + z, M.q(q))))
            rules.append(StringRule((LDUM + z, M.qbar(q)), (M.qbar(q), RDUM + z, RDUM + z)))
    return Srs.of(rules)


def _z(x: str, y: str) -> str:
    return f"{x}_{y}"


def _is_state(s: str) -> bool:
    return re.fullmatch(r"q\d+", s) is not None


def _is_bar_state(s: str) -> bool:
    return re.fullmatch(r"barq\d+", s) is not None


def in_config(w: Sequence[str], M: TuringMachine | None = None) -> bool:
    w = tuple(w)
    if len(w) < 3 or w[0] != LMARK or w[-1] != RMARK:
        return False
    heads = [i for i, s in enumerate(w) if _is_state(s) or _is_bar_state(s)]
    if len(heads) != 1:
        return False
    k = heads[0]
    tape = set(M.tape_alphabet) if M is not None else None

    def left_ok(s: str) -> bool:
        if s.startswith(LDUM):
            return True
        return s.startswith(BAR) and (tape is None or s[len(BAR):] in tape)

    def right_ok(s: str) -> bool:
        if s.startswith(RDUM):
            return True
        if s in (LMARK, RMARK, EPS) or s.startswith((BAR, LDUM)) or _is_state(s) or _is_bar_state(s):
            return False
        return tape is None or s in tape

    return all(left_ok(s) for s in w[1:k]) and all(right_ok(s) for s in w[k + 1:-1])


def pi(w: Sequence[str], M: TuringMachine) -> tuple:
    """Project a CONFIG string to a machine configuration ``lmark u q v rmark``."""
    if not in_config(w, M):
        raise GeneratorError(f"not a CONFIG string: {' '.join(w)}")
    core = [s for s in w if not s.startswith((LDUM, RDUM))]
    out: list[str] = []
    for s in core:
        if _is_bar_state(s):
            q = "q" + s[len("barq"):]
            if out and out[-1].startswith(BAR):
                out[-1:] = [q, out[-1][len(BAR):]]
            else:
                out += [q, M.blank]
        else:
            out.append(s)
    return tuple(x[len(BAR):] if x.startswith(BAR) else x for x in out)


def initial_config(M: TuringMachine, tape: Sequence[str] | None = None) -> tuple:
    return (LMARK, M.q(M.q0), *(M.input if tape is None else tape), RMARK)


def normalize_config(c: Sequence[str], blank: str) -> tuple:
    """Drop blanks at the outer ends; the tape is two-way infinite."""
    c = list(c)
    k = next(i for i, s in enumerate(c) if _is_state(s))
    left, right = c[1:k], c[k + 1:-1]
    while left and left[0] == blank:
        left.pop(0)
    while right and right[-1] == blank:
        right.pop()
    return (c[0], *left, c[k], *right, c[-1])


def tm_step(M: TuringMachine, config: Sequence[str]) -> tuple | None:
    """Successor of a configuration ``lmark u q v rmark`` (states written q<i>)."""
    c = list(config)
    k = next(i for i, s in enumerate(c) if _is_state(s))
    left, q, right = c[1:k], M.states[int(c[k][1:])], c[k + 1:-1]
    a = right[0] if right else M.blank
    t = M.delta(q, a)
    if t is None:
        return None
    rest = right[1:]
    qj = M.q(t.target)
    if t.move == "R":
        return (LMARK, *left, t.write, qj, *rest, RMARK)
    if left:
        return (LMARK, *left[:-1], qj, left[-1], t.write, *rest, RMARK)
    return (LMARK, qj, M.blank, t.write, *rest, RMARK)


def is_type_a(w: Sequence[str], M: TuringMachine) -> bool:
    w = tuple(w)
    k = next(i for i, s in enumerate(w) if _is_state(s) or _is_bar_state(s))
    if _is_state(w[k]):
        return w[k + 1] == RMARK or not w[k + 1].startswith(RDUM)
    return w[k - 1] == LMARK or w[k - 1].startswith(BAR)


# ---------------------------------------------------------------- PCP

@dataclass(frozen=True)
class PcpInstance:
    pairs: tuple  # ((alpha, beta), ...) with words as symbol tuples

    def __post_init__(self) -> None:
        if not self.pairs:
            raise GeneratorError("PCP instance needs at least one pair")
        for a, b in self.pairs:
            if not a or not b:
                raise GeneratorError("PCP words must be nonempty")

    @property
    def alphabet(self) -> tuple:
        return tuple(sorted({s for a, b in self.pairs for s in a + b}))


def _word(text: str) -> tuple:
    text = text.strip()
    return tuple(text.split()) if re.search(r"\s", text) else tuple(text)


def parse_pcp(text: str) -> PcpInstance:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"pair\s+(.+?)\s*:\s*(.+)", line)
        if m is None:
            raise GeneratorError(f"line {lineno}: expected 'pair <alpha> : <beta>'")
        pairs.append((_word(m.group(1)), _word(m.group(2))))
    return PcpInstance(tuple(pairs))


def pcp_to_trs(P: PcpInstance) -> Trs:
    idx = [f"idx{i}" for i in range(1, len(P.pairs) + 1)]
    clash = set(P.alphabet) & (set(idx) | {"k", "r", EPS, "goal"})
    if clash:
        raise GeneratorError(f"alphabet clashes with reserved symbols: {sorted(clash)}")
    sig = Signature({"k": 2, "r": 2, EPS: 0, "goal": 0, **{i: 1 for i in idx},
                     **{s: 1 for s in P.alphabet}})
    x, y, z = Var("x"), Var("y"), Var("z")
    k = lambda a, b: Term("k", (a, b))  # noqa: E731
    r = lambda a, b: Term("r", (a, b))  # noqa: E731
    eps, goal = Term(EPS), Term("goal")
    rules = []
    for i, (alpha, beta) in zip(idx, P.pairs):
        rules.append(RewriteRule(k(x, y), k(Term(i, (x,)), string_to_term(alpha, y))))
    for i in idx:
        rules.append(RewriteRule(k(Term(i, (x,)), y), r(Term(i, (x,)), y)))
    for i, (alpha, beta) in zip(idx, P.pairs):
        rules.append(RewriteRule(r(Term(i, (x,)), string_to_term(beta, z)), r(x, z)))
    rules.append(RewriteRule(r(eps, eps), goal))
    rules.append(RewriteRule(goal, eps))
    for s in idx + list(P.alphabet):
        rules.append(RewriteRule(goal, Term(s, (goal,))))
    rules.append(RewriteRule(goal, k(goal, goal)))
    rules.append(RewriteRule(goal, r(goal, goal)))
    rules.append(RewriteRule(k(x, y), k(eps, eps)))
    rules.append(RewriteRule(r(x, y), k(eps, eps)))
    return Trs(sig, tuple(rules))


def pcp_start() -> Term:
    return Term("k", (Term(EPS), Term(EPS)))
