import pytest

from saturachase.cli import EXIT_BUDGET, EXIT_FAIL, EXIT_OK, EXIT_USAGE, RunConfig, UsageError, run
from saturachase.egraph import is_isomorphic, parse_egraph
from saturachase.terms import parse_trs

from conftest import CORPUS


def cx(name):
    return str(CORPUS / name)


def call(capsys, *argv):
    rc = run(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_eqsat_run_reports_power_term_counts(capsys, tmp_path):
    rc, out, _ = call(capsys, "eqsat", "run", "--trs", cx("fxx.trs"), "--term", cx("power8.term"),
                      "--budget", "100", "--out", str(tmp_path / "g.eg"), "--dot", str(tmp_path / "g.dot"))
    assert rc == EXIT_OK
    assert out.splitlines()[-1] == "status=terminated classes=4 nodes=7"
    G = parse_egraph((tmp_path / "g.eg").read_text())
    assert (G.num_classes, G.num_nodes) == (4, 7)
    assert (tmp_path / "g.dot").read_text().startswith("digraph")


def test_eqsat_budget_and_strict(capsys):
    args = ["eqsat", "run", "--trs", cx("fg.trs"), "--egraph", cx("cyclic.eg"), "--budget", "5"]
    rc, out, _ = call(capsys, *args)
    assert rc == EXIT_OK and "status=budget" in out
    rc, _, _ = call(capsys, *args, "--strict")
    assert rc == EXIT_BUDGET


def test_output_is_deterministic(capsys):
    args = ["verify", "thm17", "--trs", cx("fxx.trs"), "--egraph", cx("t8.eg"), "--seeds", "1,2,3"]
    first = call(capsys, *args)
    assert first[0] == EXIT_OK
    assert first[1].splitlines()[-1] == "check=thm17 status=pass"
    assert call(capsys, *args) == first


def test_verify_thm15(capsys):
    rc, out, _ = call(capsys, "verify", "thm15", "--deps", cx("tc.deps"), "--instance", cx("tc.inst"),
                      "--budget", "20")
    assert rc == EXIT_OK and "check=thm15 status=pass" in out


def test_check_acyclic(capsys, tmp_path):
    rc, out, _ = call(capsys, "check-acyclic", "--trs", cx("acyclic1.trs"))
    assert rc == EXIT_OK and out == "weak_term_acyclic=true\n"
    rc, out, _ = call(capsys, "check-acyclic", "--trs", cx("grow.trs"), "--dot", str(tmp_path / "w.dot"))
    assert out == "weak_term_acyclic=false\nwitness=(f,1)->(g,1)*->(f,1)\n"
    assert 'label="*"' in (tmp_path / "w.dot").read_text()
    rc, out, _ = call(capsys, "check-acyclic", "--deps", cx("loop.deps"))
    assert out.startswith("weakly_acyclic=false\nwitness=")


def test_chase_run(capsys):
    rc, out, _ = call(capsys, "chase", "run", "--deps", cx("tc.deps"), "--instance", cx("tc.inst"),
                      "--scheduler", "random", "--seeds", "4")
    assert rc == EXIT_OK
    assert out.splitlines()[0] == "status=terminated steps=6 atoms=9"
    rc, out, _ = call(capsys, "chase", "run", "--deps", cx("loop.deps"), "--instance", cx("loop.inst"),
                      "--budget", "10", "--strict")
    assert rc == EXIT_BUDGET


def test_chase_failure_exit_code(capsys, tmp_path):
    inst = tmp_path / "bad.inst"
    inst.write_text("Emp(alice)\nMgr(alice,bob)\nMgr(alice,carol)\n")
    rc, out, _ = call(capsys, "chase", "run", "--deps", cx("fd.deps"), "--instance", str(inst))
    assert rc == EXIT_FAIL and out.startswith("status=failed")


def test_skolem_run_singularizes(capsys):
    rc, out, _ = call(capsys, "skolem", "run", "--deps", cx("fd.deps"), "--instance", cx("fd.inst"))
    assert rc == EXIT_OK and out.startswith("status=terminated")
    assert "Eq(_n1, _n2)" in out


def test_encode_round_trips(capsys, tmp_path):
    prefix = tmp_path / "enc"
    rc, out, _ = call(capsys, "encode", "skolem2eqsat", "--deps", cx("skolem1.deps"), "--instance",
                      cx("skolem1.inst"), "--out", str(prefix))
    assert rc == EXIT_OK and out.endswith("; start top\n")
    R = parse_trs((tmp_path / "enc.trs").read_text())
    assert len(R.rules) == 5
    rc, out, _ = call(capsys, "eqsat", "run", "--trs", str(tmp_path / "enc.trs"), "--term",
                      str(tmp_path / "enc.term"))
    assert "status=terminated" in out
    rc, out, _ = call(capsys, "encode", "eqsat2chase", "--trs", cx("fxx.trs"), "--egraph", cx("t8.eg"),
                      "--out", str(prefix))
    assert rc == EXIT_OK
    rc, out, _ = call(capsys, "chase", "run", "--deps", str(tmp_path / "enc.deps"), "--instance",
                      str(tmp_path / "enc.inst"))
    assert out.splitlines()[0].startswith("status=terminated") and "atoms=7" in out


def test_gen_commands(capsys, tmp_path):
    rc, out, _ = call(capsys, "gen", "tm", cx("halt2.tm"), "--sym", "--out", str(tmp_path / "h"))
    assert rc == EXIT_OK and "; start (lmark (q0 (a (rmark eps))))" in out
    rc, out, _ = call(capsys, "eqsat", "run", "--trs", str(tmp_path / "h.trs"), "--term", str(tmp_path / "h.term"),
                      "--budget", "50")
    assert "status=terminated" in out
    rc, out, _ = call(capsys, "gen", "pcp", cx("solvable.pcp"))
    assert rc == EXIT_OK and out.endswith("; start (k eps eps)\n")


def test_export_dot(capsys):
    rc, out, _ = call(capsys, "export", "dot", "--egraph", cx("t8.eg"))
    assert rc == EXIT_OK and out.count("subgraph cluster_") == 4


def test_usage_errors(capsys, tmp_path):
    assert call(capsys, "frobnicate")[0] == EXIT_USAGE
    assert call(capsys)[0] == EXIT_USAGE
    rc, _, err = call(capsys, "eqsat", "run", "--trs", str(tmp_path / "missing.trs"), "--term", cx("power8.term"))
    assert rc == EXIT_USAGE and err.startswith("error:")
    bad = tmp_path / "bad.trs"
    bad.write_text("(f ?x) -> ?x\n(f ?x ?y -> ?x\n")
    rc, _, err = call(capsys, "eqsat", "run", "--trs", str(bad), "--term", cx("power8.term"))
    assert rc == EXIT_USAGE and "line 2" in err
    assert call(capsys, "eqsat", "run", "--trs", cx("fxx.trs"), "--term", cx("power8.term"), "--budget", "0")[0] == EXIT_USAGE
    assert call(capsys, "chase", "run", "--seeds", "x,y")[0] == EXIT_USAGE


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig(command="eqsat", budget=-1)
    assert RunConfig(command="eqsat").budget == 1000


def test_help_exits_cleanly(capsys):
    assert run(["--help"]) == EXIT_OK
    assert "check-acyclic" in capsys.readouterr().out


def test_verify_aliases(capsys):
    rc, out, _ = call(capsys, "verify", "skolem-eqsat", "--deps", cx("tc.deps"), "--instance", cx("tc.inst"))
    assert rc == EXIT_OK and "check=thm15 status=pass" in out
    rc, out, _ = call(capsys, "verify", "eqsat-chase", "--trs", cx("fxx.trs"), "--egraph", cx("t8.eg"))
    assert rc == EXIT_OK and "check=thm17 status=pass" in out
