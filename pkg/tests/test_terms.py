import pytest
from hypothesis import given, settings, strategies as st

from saturachase.terms import (RewriteRule, Signature, Term, TermError, Trs, Var, app,
                               enumerate_ground_terms, match, one_step_rewrites, parse_pattern,
                               parse_rule, parse_term, parse_trs, print_term, rewrite_closure, size,
                               substitute, symmetric_closure)

from strategies import SIG, ground_terms, patterns, rules


def T(text):
    return parse_term(text)


def test_parse_term_with_signature():
    assert parse_term("(f (g a))", {"f": 1, "g": 1, "a": 0}) == app("f", app("g", app("a")))


def test_parse_term_arity_mismatch():
    with pytest.raises(TermError):
        parse_term("(f a)", {"f": 2, "a": 0})


def test_parse_term_rejects_variables_and_trailing_input():
    with pytest.raises(TermError):
        parse_term("(f ?x)")
    with pytest.raises(TermError):
        parse_term("(f a) b")
    with pytest.raises(TermError):
        parse_term("(f a")


def test_eighth_power_term():
    t = T("(f (f (f a a) (f a a)) (f (f a a) (f a a)))")
    assert size(t) == 15
    assert t.args[0] == t.args[1]


def test_substitute_examples():
    x, z = Var("x"), Var("z")
    a, b = app("a"), app("b")
    assert substitute(app("f", x, x), {"x": a}) == app("f", a, a)
    assert substitute(x, {"x": app("g", a)}) == app("g", a)
    assert substitute(parse_pattern("(g (f ?z ?x))"), {"x": a, "z": b}) == T("(g (f b a))")
    with pytest.raises(TermError):
        substitute(app("f", x, z), {"x": a})


def test_match_nonlinear():
    p = parse_pattern("(f ?x ?x)")
    assert match(p, T("(f a a)")) == {"x": T("a")}
    assert match(p, T("(f a b)")) is None


def test_rewrite_closure_examples():
    R = parse_trs("sig f/2 a/0 b/0 c/0\na -> b\nc -> b\n")
    assert rewrite_closure(R, T("(f a b)"), 3) == {T("(f a b)"), T("(f b b)")}
    assert rewrite_closure(Trs(SIG), T("(f a b)"), 3) == {T("(f a b)")}
    R2 = parse_trs("(f ?x ?x) -> (g ?x ?x)")
    assert rewrite_closure(R2, T("(f a a)"), 3) == {T("(f a a)"), T("(g a a)")}


def test_rewrite_closure_bound_below_term_size():
    with pytest.raises(TermError):
        rewrite_closure(parse_trs("a -> b"), T("(f a a)"), 2)


def test_one_step_rewrites_examples():
    assert one_step_rewrites(parse_trs("sig f/2 a/0 b/0\na -> b"), T("(f a a)")) == {T("(f b a)"), T("(f a b)")}
    assert one_step_rewrites(parse_trs("(f ?x ?x) -> (g ?x ?x)"), T("(f a b)")) == set()
    R = parse_trs("(f (g ?x)) -> (g (f ?x))")
    assert one_step_rewrites(R, T("(f (g (f (g a))))")) == {T("(g (f (f (g a))))"), T("(f (g (g (f a))))")}


def test_symmetric_closure():
    R = parse_trs("(f (g ?x)) -> (g (f ?x))")
    S = symmetric_closure(R)
    assert [str(r) for r in S.rules] == ["(f (g ?x)) -> (g (f ?x))", "(g (f ?x)) -> (f (g ?x))"]
    assert symmetric_closure(Trs(Signature())).rules == ()
    S2 = symmetric_closure(parse_trs("(f ?x ?x) -> (g ?x ?x)"))
    assert len(S2.rules) == 2
    with pytest.raises(TermError):
        symmetric_closure(parse_trs("(f ?x ?y) -> ?x"))


def test_rule_requires_bound_rhs_variables():
    with pytest.raises(TermError):
        RewriteRule(Var("x"), Var("y"))


def test_trs_parsing_header_comments_and_errors():
    R = parse_trs("; comment\nsig f/2 g/1 a/0\n(f (f ?x ?y) ?z) -> (g (f ?z ?x))\n")
    assert R.signature == {"f": 2, "g": 1, "a": 0}
    assert len(R.rules) == 1
    with pytest.raises(TermError, match="line 2"):
        parse_trs("(f ?x) -> ?x\n(f ?x ?y) -> ?x\n")
    with pytest.raises(TermError, match="line 1"):
        parse_trs("(f ?x -> ?x")


def test_trs_text_round_trip():
    R = parse_trs("sig f/2 g/1 a/0\n(f ?x (g ?y)) -> (g (f ?y ?x))\n?x -> (g ?x)\n")
    assert parse_trs(R.to_text()) == R


def test_enumerate_ground_terms_counts():
    layers = enumerate_ground_terms({"a": 0, "g": 1, "f": 2}, 4)
    # sizes 1..4 over one constant, one unary, one binary symbol
    assert [len(layers[n]) for n in range(1, 5)] == [1, 1, 2, 4]


@given(ground_terms(max_depth=4))
@settings(max_examples=100)
def test_print_parse_round_trip(t):
    assert parse_term(print_term(t)) == t


@given(patterns(), st.dictionaries(st.sampled_from(["x", "y"]), ground_terms(max_depth=2), min_size=2))
@settings(max_examples=100)
def test_substitute_size(p, sigma):
    out = substitute(p, sigma)
    expected = size(p)
    stack = [p]
    while stack:
        q = stack.pop()
        if isinstance(q, Var):
            expected += size(sigma[q.name]) - 1
        else:
            stack.extend(q.args)
    assert size(out) == expected


@given(rules(variable_preserving=True), ground_terms(max_depth=3), st.integers(0, 2))
@settings(max_examples=100, deadline=None)
def test_closure_properties(rule, t, extra):
    R = symmetric_closure(Trs(SIG, (rule,)))
    b = size(t) + extra
    small = rewrite_closure(R, t, b)
    assert t in small
    assert small <= rewrite_closure(R, t, b + 1)
    for v in list(small)[:5]:
        assert t in rewrite_closure(R, v, b)


def test_parse_rule_with_signature():
    r = parse_rule("(f ?x ?y) -> (f ?y ?x)", {"f": 2})
    assert r.variable_preserving
    assert r.flipped().flipped() == r
