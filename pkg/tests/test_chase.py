import pytest
from hypothesis import given, settings, strategies as st

from saturachase.chase import (EGD, TGD, Atom, ChaseError, ChaseStatus, Constant, Failure, Null, Scheduler,
                               SearchBudgetExceeded, SkolemPattern, SkolemTerm, active_triggers, chase_step,
                               deps_to_text, eval_cq, find_instance_hom, hom_equivalent, instance_to_text,
                               instances_isomorphic, is_core, is_model, parse_dependencies, parse_dependency,
                               parse_instance, run_skolem_chase, run_standard_chase, singularize, skolemize)

from conftest import CORPUS

a, b, c, d = (Constant(x) for x in "abcd")
n1, n2, n3 = Null(1), Null(2), Null(3)


def A(rel, *args):
    return Atom(rel, args)


def D(text):
    return parse_dependency(text)


def load(name):
    return parse_dependencies((CORPUS / f"{name}.deps").read_text()), parse_instance((CORPUS / f"{name}.inst").read_text())


SCHEDULERS = ["egd_fair", "fifo", Scheduler.parse("random", 1), Scheduler.parse("random", 2)]


# ---------------------------------------------------------------- queries and triggers

def test_eval_cq_examples():
    assert eval_cq({A("R", a, b)}, [A("R", "x", "y")]) == [{"x": a, "y": b}]
    I = {A("R", a, b), A("R", b, c)}
    assert eval_cq(I, [A("R", "x", "y"), A("R", "y", "z")]) == [{"x": a, "y": b, "z": c}]
    assert eval_cq(I, [A("S", "x")]) == []
    assert eval_cq(I, [A("R", "x", "x")]) == []


def test_eval_cq_with_constant_in_body():
    I = {A("R", a, b), A("R", c, b)}
    assert eval_cq(I, [A("R", Constant("c"), "y")]) == [{"y": b}]


def test_tgd_triggers():
    tgd = D("R(x) -> exists z. S(x,z)")
    assert active_triggers({A("R", a)}, tgd) == [{"x": a}]
    assert active_triggers({A("R", a), A("S", a, n1)}, tgd) == []


def test_egd_triggers():
    egd = D("R(x,y), R(x,w) -> y = w")
    assert active_triggers({A("R", a, n1), A("R", a, n2)}, egd)
    assert active_triggers({A("R", a, n1)}, egd) == []


def test_chase_steps():
    tgd = D("R(x) -> exists z. S(x,z)")
    I = chase_step({A("R", a)}, tgd, {"x": a})
    assert I.frozen() == {A("R", a), A("S", a, n1)}
    egd = D("R(x,y), R(x,w) -> y = w")
    J = chase_step({A("R", a, n1), A("R", a, n2)}, egd, {"x": a, "y": n1, "w": n2})
    assert J.frozen() == {A("R", a, n1)}
    K = chase_step({A("R", a, n1), A("R", a, b)}, egd, {"x": a, "y": n1, "w": b})
    assert K.frozen() == {A("R", a, b)}
    with pytest.raises(Failure):
        chase_step({A("R", a, b), A("R", a, c)}, egd, {"x": a, "y": b, "w": c})
    with pytest.raises(ChaseError):
        chase_step({A("R", a), A("S", a, b)}, tgd, {"x": a})


def test_is_model():
    deps = [D("E(x,y) -> T(x,y)")]
    assert not is_model({A("E", a, b)}, deps)
    assert is_model({A("E", a, b), A("T", a, b)}, deps)


# ---------------------------------------------------------------- standard chase

def test_empty_deps_terminate_immediately():
    I0 = {A("R", a)}
    out = run_standard_chase([], I0)
    assert out.terminated and out.instance == I0 and out.length == 0


def test_transitive_closure_all_schedulers():
    deps, I0 = load("tc")
    results = [run_standard_chase(deps, I0, s) for s in SCHEDULERS]
    assert all(r.terminated for r in results)
    T = {x for x in results[0].instance if x.rel == "T"}
    assert len(T) == 6
    assert all(r.instance == results[0].instance for r in results)


def test_egd_chase_and_failure():
    deps, I0 = load("fd")
    out = run_standard_chase(deps, I0)
    assert out.terminated
    assert out.instance == {A("Emp", Constant("alice")), A("Mgr", Constant("alice"), n1)}
    bad = run_standard_chase(deps, I0 | {A("Mgr", Constant("alice"), b), A("Mgr", Constant("alice"), c)})
    assert bad.status is ChaseStatus.FAILED


def test_lower_null_survives_merges():
    deps = [D("R(x,y), R(x,w) -> y = w")]
    out = run_standard_chase(deps, {A("R", a, n3), A("R", a, n2), A("R", a, n1)})
    assert out.instance == {A("R", a, n1)}


def test_nonterminating_program_hits_budget():
    deps, I0 = load("loop")
    for s in SCHEDULERS:
        out = run_standard_chase(deps, I0, s, budget=40)
        assert out.status is ChaseStatus.BUDGET and out.length == 40


def test_egd_fair_reaches_egd_fixpoints():
    deps, I0 = load("emp")
    deps = deps + [D("Mgr(x,m), Mgr(x,n) -> m = n")]
    egds = [x for x in deps if isinstance(x, EGD)]
    seen = []
    out = run_standard_chase(deps, I0, "egd_fair", on_egd_fixpoint=seen.append)
    assert out.terminated and seen
    assert all(is_model(J, egds) for J in seen)
    assert is_model(out.instance, deps)


def test_trace_lines():
    deps, I0 = load("skolem1")
    out = run_standard_chase(deps, I0)
    assert [s.line() for s in out.steps] == ["step=1 dep=0 trigger={x=a} kind=tgd"]


def test_random_scheduler_is_reproducible():
    deps, I0 = load("emp")
    s = Scheduler.parse("random", 5)
    assert run_standard_chase(deps, I0, s).steps == run_standard_chase(deps, I0, s).steps
    with pytest.raises(ChaseError):
        Scheduler.parse("lifo")


# ---------------------------------------------------------------- Skolem chase

def test_skolemize():
    r = skolemize(D("R(x) -> exists z. S(x,z)"), 1)
    assert r.head == (Atom("S", ("x", SkolemPattern("sk1_z", ("x",)))),)
    assert skolemize(D("E(x,y) -> T(x,y)")).head == (A("T", "x", "y"),)
    two = skolemize(D("R(x) -> exists z, w. S(z,w)"), 3)
    assert {p.fn for p in two.head[0].args} == {"sk3_z", "sk3_w"}
    with pytest.raises(ChaseError):
        skolemize(D("R(x,y) -> x = y"))


def test_singularize():
    egd = D("R(x,y), R(x,w) -> y = w")
    out = singularize([egd])
    assert all(isinstance(t, TGD) for t in out)
    first = out[0]
    assert first.body == (A("R", "x", "y"), A("R", "x_2", "w"), A("Eq", "x", "x_2"))
    assert first.head == (A("Eq", "y", "w"),)
    assert TGD((A("Eq", "x", "y"),), (A("Eq", "y", "x"),)) in out
    assert TGD((A("Eq", "x", "y"), A("Eq", "y", "z")), (A("Eq", "x", "z"),)) in out
    tgd = D("E(x,y) -> T(x,y)")
    assert singularize([tgd])[0] == tgd


def test_skolem_chase_examples():
    deps, I0 = load("skolem1")
    out = run_skolem_chase(deps, I0)
    assert out.terminated
    assert out.instance == {A("R", a), A("S", a, SkolemTerm("sk1_z", (a,)))}
    deps, I0 = load("tc")
    assert len(run_skolem_chase(deps, I0).instance) == 9
    assert run_skolem_chase([], I0).instance == I0
    deps, I0 = load("loop")
    assert run_skolem_chase(deps, I0, budget=30).status is ChaseStatus.BUDGET
    with pytest.raises(ChaseError):
        run_skolem_chase([D("R(x,y) -> x = y")], I0)


def test_singularized_chase_tracks_equalities():
    deps, I0 = load("fd")
    out = run_skolem_chase(singularize(deps), I0)
    assert out.terminated
    assert A("Eq", n1, n2) in out.instance


def test_skolem_and_standard_agree_without_egds():
    for name in ("tc", "skolem1", "emp"):
        deps, I0 = load(name)
        sk = run_skolem_chase(deps, I0).instance
        st_ = run_standard_chase(deps, I0).instance
        assert hom_equivalent(sk, st_)


# ---------------------------------------------------------------- homomorphisms and cores

def test_homs_and_cores():
    I = {A("R", a, b)}
    assert find_instance_hom(I, I) == {}
    assert not is_core({A("R", a, n1), A("R", a, n2)})
    assert is_core({A("R", a, n1), A("S", n1)})
    assert find_instance_hom({A("R", a, n1)}, {A("R", b, c)}) is None
    assert find_instance_hom({A("R", a, n1)}, {A("R", a, c)}) == {n1: c}
    assert instances_isomorphic({A("R", a, n1)}, {A("R", a, n2)})
    assert not instances_isomorphic({A("R", a, n1)}, {A("R", a, b)})


def test_hom_search_budget_is_reported():
    # no 6-colouring of K7: the search has to exhaust a pigeonhole tree
    I = {A("E", Null(i), Null(j)) for i in range(7) for j in range(7) if i != j}
    J = {A("E", Null(100 + i), Null(100 + j)) for i in range(6) for j in range(6) if i != j}
    with pytest.raises(SearchBudgetExceeded):
        find_instance_hom(I, J, node_budget=50)


# ---------------------------------------------------------------- text formats

def test_parsing_round_trips():
    text = "R(x,y), S(y,z) -> exists w. T(x,w)\nRf(x,y,r), Rf(x,y,s) -> r = s\nP(x) -> Q(x, \"k\")\n"
    deps = parse_dependencies(text)
    assert isinstance(deps[1], EGD) and deps[0].existentials == ("w",)
    assert deps[2].head[0].args[1] == Constant("k")
    assert parse_dependencies(deps_to_text(deps)) == deps
    I = parse_instance("R(a, _n1) S(b)\n; comment\n")
    assert I == {A("R", a, n1), A("S", b)}
    assert parse_instance(instance_to_text(I)) == I


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ChaseError, match="line 2"):
        parse_dependencies("R(x) -> S(x)\nR(x) -> S(y)\n")
    with pytest.raises(ChaseError, match="line 1"):
        parse_dependencies("R(x) S(x)")
    with pytest.raises(ChaseError, match="line 1"):
        parse_instance("R(a,")


# ---------------------------------------------------------------- universality

# (program, instance, hand-built models)
UNIVERSAL_CASES = [
    ("skolem1", [{A("R", a), A("S", a, a)}, {A("R", a), A("S", a, b), A("S", a, c)}]),
    ("tc", [{A(r, x, y) for r in ("E", "T") for x in (a, b, c, d) for y in (a, b, c, d)}]),
    ("emp", [{A("Emp", Constant("alice")), A("Emp", Constant("bob")), A("Mgr", Constant("bob"), Constant("carol")),
              A("Mgr", Constant("alice"), Constant("carol")), A("Person", Constant("carol")),
              A("Boss", Constant("carol"))}]),
    ("fd", [{A("Emp", Constant("alice")), A("Mgr", Constant("alice"), d)}]),
]


@pytest.mark.parametrize("name,models", UNIVERSAL_CASES)
def test_chase_result_maps_into_models(name, models):
    deps, I0 = load(name)
    out = run_standard_chase(deps, I0)
    assert out.terminated
    for K in models:
        assert is_model(K, deps)
        assert find_instance_hom(I0, K) is not None
        assert find_instance_hom(out.instance, K) is not None


@st.composite
def edge_models(draw):
    # random supersets of the tc input, closed under the tc rules, with an extra relation
    dom = [a, b, c, d, Constant("e")]
    E = {A("E", x, y) for x, y in [(a, b), (b, c), (c, d)]}
    E |= {A("E", draw(st.sampled_from(dom)), draw(st.sampled_from(dom))) for _ in range(draw(st.integers(0, 4)))}
    pairs = {(x.args[0], x.args[1]) for x in E}
    changed = True
    while changed:
        new = {(x, z) for x, y in pairs for y2, z in pairs if y == y2} - pairs
        changed = bool(new)
        pairs |= new
    return E | {A("T", x, y) for x, y in pairs}


@given(edge_models())
@settings(max_examples=100, deadline=None)
def test_universality_on_random_models(K):
    deps, I0 = load("tc")
    J = run_standard_chase(deps, I0, "fifo").instance
    assert is_model(K, deps)
    assert find_instance_hom(J, K) is not None


@given(st.lists(st.sampled_from(["a", "b", "c"]), min_size=1, max_size=4), st.integers(0, 3))
@settings(max_examples=100, deadline=None)
def test_universality_with_existentials(people, seed):
    deps, _ = load("emp")
    I0 = {A("Emp", Constant(p)) for p in people}
    J = run_standard_chase(deps, I0, Scheduler.parse("random", seed)).instance
    # a model where everyone manages themself
    K = I0 | {A("Mgr", Constant(p), Constant(p)) for p in people}
    K |= {A("Person", Constant(p)) for p in people} | {A("Boss", Constant(p)) for p in people}
    assert is_model(K, deps)
    assert find_instance_hom(J, K) is not None
