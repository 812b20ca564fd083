"""Hypothesis strategies shared by the property suites."""
from __future__ import annotations

from hypothesis import strategies as st

from saturachase.egraph import Automaton, EGraph, rebuild
from saturachase.terms import RewriteRule, Signature, Term, Trs, Var, variables

SIG = Signature({"a": 0, "b": 0, "f": 2, "g": 1})
FUNS = [("f", 2), ("g", 1)]


@st.composite
def ground_terms(draw, sig=SIG, max_depth=3):
    consts = sorted(h for h, n in sig.items() if n == 0)
    funs = sorted((h, n) for h, n in sig.items() if n > 0)
    if max_depth <= 1 or not funs or draw(st.booleans()):
        return Term(draw(st.sampled_from(consts)))
    h, n = draw(st.sampled_from(funs))
    return Term(h, tuple(draw(ground_terms(sig, max_depth - 1)) for _ in range(n)))


@st.composite
def automata(draw, max_states=6, sig=SIG, extra=6):
    """Reachable automata: state i is grounded by a node over states < i."""
    consts = sorted(h for h, n in sig.items() if n == 0)
    funs = sorted((h, n) for h, n in sig.items() if n > 0)
    n = draw(st.integers(1, max_states))
    trans = set()
    for i in range(n):
        if i == 0 or not funs or draw(st.booleans()):
            trans.add((draw(st.sampled_from(consts)), (), i))
        else:
            h, k = draw(st.sampled_from(funs))
            trans.add((h, tuple(draw(st.integers(0, i - 1)) for _ in range(k)), i))
    for _ in range(draw(st.integers(0, extra))):
        if funs and draw(st.booleans()):
            h, k = draw(st.sampled_from(funs))
            trans.add((h, tuple(draw(st.integers(0, n - 1)) for _ in range(k)), draw(st.integers(0, n - 1))))
        else:
            trans.add((draw(st.sampled_from(consts)), (), draw(st.integers(0, n - 1))))
    return Automaton(set(range(n)), trans, Signature(sig))


@st.composite
def egraphs(draw, max_states=6, sig=SIG, extra=6) -> EGraph:
    return rebuild(draw(automata(max_states, sig, extra)))[0]


@st.composite
def patterns(draw, vars_=("x", "y"), max_depth=3):
    if max_depth <= 1 or draw(st.integers(0, 2)) == 0:
        return draw(st.one_of(st.sampled_from([Var(v) for v in vars_]),
                              st.sampled_from([Term("a"), Term("b")])))
    h, n = draw(st.sampled_from(FUNS))
    return Term(h, tuple(draw(patterns(vars_, max_depth - 1)) for _ in range(n)))


@st.composite
def rules(draw, variable_preserving=False):
    lhs = draw(patterns().filter(lambda p: isinstance(p, Term)))
    if variable_preserving:
        rhs = draw(patterns().filter(lambda p: variables(p) == variables(lhs)))
    else:
        rhs = draw(patterns().filter(lambda p: variables(p) <= variables(lhs)))
    return RewriteRule(lhs, rhs)


@st.composite
def trss(draw, max_rules=3):
    rs = draw(st.lists(rules(), min_size=1, max_size=max_rules))
    return Trs(Signature(SIG), tuple(dict.fromkeys(rs)))
