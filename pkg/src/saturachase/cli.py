"""Command-line front end.

Reports go to stdout as ``key=value`` lines; diagnostics go to stderr and are
controlled by ``SATURACHASE_LOG`` (``info`` or ``trace``).
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import acyclicity, bridge, chase, egraph, generators, terms
from .eqsat import eqsat as saturate

log = logging.getLogger("saturachase")
TRACE = 5

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    trs: Path | None = None
    term: Path | None = None
    egraph: Path | None = None
    deps: Path | None = None
    instance: Path | None = None
    budget: int = 1000
    node_cap: int = 100000
    scheduler: str = "egd_fair"
    seeds: tuple = (1, 2, 3)
    out: Path | None = None
    dot: Path | None = None
    strict: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.budget <= 0 or self.node_cap <= 0:
            raise UsageError("--budget and --node-cap must be positive")


def _setup_logging() -> None:
    logging.addLevelName(TRACE, "TRACE")
    level = {"trace": TRACE, "info": logging.INFO}.get(os.environ.get("SATURACHASE_LOG", "").lower(),
                                                        logging.WARNING)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(level)
    log.propagate = False


def _read(path: Path | None, what: str) -> str:
    if path is None:
        raise UsageError(f"missing --{what}")
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _strip_comments(text: str) -> str:
    return "\n".join(line.split(";", 1)[0] for line in text.splitlines())


def load_trs(cfg: RunConfig) -> terms.Trs:
    return terms.parse_trs(_read(cfg.trs, "trs"))


def load_egraph(cfg: RunConfig, R: terms.Trs | None = None) -> tuple[egraph.EGraph, int | None]:
    """E-graph from --egraph, or from --term as a single-term E-graph (with its root)."""
    sig = R.signature if R is not None else None
    if cfg.egraph is not None:
        G = egraph.parse_egraph(_read(cfg.egraph, "egraph"))
        if sig:
            G.signature = G.signature.merged(sig)
        return G, None
    t = terms.parse_term(_strip_comments(_read(cfg.term, "term")))
    G = egraph.EGraph(sig)
    return G, G.add_term(t)


def load_deps(cfg: RunConfig) -> list:
    return chase.parse_dependencies(_read(cfg.deps, "deps"))


def load_instance(cfg: RunConfig) -> frozenset:
    return chase.parse_instance(_read(cfg.instance, "instance"))


def _write(path: Path, text: str) -> None:
    Path(path).write_text(text)
    log.info("wrote %s", path)


def _emit(lines) -> None:
    out = lines if isinstance(lines, str) else "".join(f"{x}\n" for x in lines)
    sys.stdout.write(out)


def _budget_exit(cfg: RunConfig, exhausted: bool) -> int:
    return EXIT_BUDGET if exhausted and cfg.strict else EXIT_OK


# ---------------------------------------------------------------- subcommands

def cmd_eqsat_run(cfg: RunConfig) -> int:
    R = load_trs(cfg)
    G, root = load_egraph(cfg, R)
    on_round = (lambda r: log.log(TRACE, r.line())) if log.isEnabledFor(TRACE) else None
    out = saturate(R, G, budget=cfg.budget, node_cap=cfg.node_cap, on_round=on_round)
    _emit(out.report())
    if root is not None:
        log.info("root class c%d", out.egraph.find(root))
    if cfg.out:
        _write(cfg.out, egraph.egraph_to_text(out.egraph))
    if cfg.dot:
        _write(cfg.dot, egraph.to_dot(out.egraph))
    return _budget_exit(cfg, not out.terminated)


def _scheduler(cfg: RunConfig) -> chase.Scheduler:
    return chase.Scheduler.parse(cfg.scheduler, cfg.seeds[0] if cfg.seeds else None)


def _chase_report(out: chase.ChaseOutcome) -> list[str]:
    for s in out.steps:
        log.log(TRACE, s.line())
    return [f"status={out.status.value} steps={out.length} atoms={len(out.instance)}"]


def cmd_chase_run(cfg: RunConfig) -> int:
    deps, I0 = load_deps(cfg), load_instance(cfg)
    out = chase.run_standard_chase(deps, I0, _scheduler(cfg), budget=cfg.budget)
    _emit(_chase_report(out))
    _emit(chase.instance_to_text(out.instance))
    if cfg.out:
        _write(cfg.out, chase.instance_to_text(out.instance))
    if out.status is chase.ChaseStatus.FAILED:
        return EXIT_FAIL
    return _budget_exit(cfg, not out.terminated)


def cmd_skolem_run(cfg: RunConfig) -> int:
    deps, I0 = load_deps(cfg), load_instance(cfg)
    if any(isinstance(d, chase.EGD) for d in deps):
        log.info("replacing EGDs by an axiomatized %s relation", chase.EQ)
        deps = chase.singularize(deps, chase.schema_of(deps, I0))
    out = chase.run_skolem_chase(deps, I0, budget=cfg.budget)
    _emit([f"status={out.status.value} rounds={out.length} atoms={len(out.instance)}"])
    _emit(chase.instance_to_text(out.instance))
    if cfg.out:
        _write(cfg.out, chase.instance_to_text(out.instance))
    return _budget_exit(cfg, not out.terminated)


def cmd_encode(cfg: RunConfig) -> int:
    direction = cfg.extra["direction"]
    if direction == "skolem2eqsat":
        enc = bridge.encode_skolem_to_eqsat(load_deps(cfg), load_instance(cfg))
        text = enc.trs.to_text()
        term = terms.print_term(enc.term)
        _emit(text + f"; start {term}\n")
        if cfg.out:
            _write(Path(f"{cfg.out}.trs"), text)
            _write(Path(f"{cfg.out}.term"), term + "\n")
        return EXIT_OK
    R = load_trs(cfg)
    G, _ = load_egraph(cfg, R)
    enc = bridge.encode_eqsat_to_chase(R, G)
    deps_text = chase.deps_to_text(enc.deps)
    inst_text = chase.instance_to_text(enc.instance)
    _emit(deps_text + "".join(f"; {line}\n" for line in inst_text.splitlines()))
    if cfg.out:
        _write(Path(f"{cfg.out}.deps"), deps_text)
        _write(Path(f"{cfg.out}.inst"), inst_text)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    which = cfg.extra["which"]
    if which in ("thm15", "skolem-eqsat"):
        rep = bridge.verify_skolem_equiv(load_deps(cfg), load_instance(cfg), budget=cfg.budget)
    else:
        R = load_trs(cfg)
        G, _ = load_egraph(cfg, R)
        rep, runs = bridge.verify_chase_equiv(R, G, seeds=cfg.seeds, budget=cfg.budget,
                                              chase_budget=5 * cfg.budget)
        for name, out in runs.items():
            if isinstance(out, chase.ChaseOutcome):
                log.info("%s: %s after %d steps", name, out.status.value, out.length)
    _emit(rep.lines())
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_check_acyclic(cfg: RunConfig) -> int:
    if cfg.deps is not None:
        ok, witness = acyclicity.is_weakly_acyclic_deps(load_deps(cfg))
        lines = [f"weakly_acyclic={str(ok).lower()}"]
        graph = acyclicity.dependency_graph(load_deps(cfg))
    else:
        R = load_trs(cfg)
        ok, witness = acyclicity.is_weakly_term_acyclic(R)
        lines = [f"weak_term_acyclic={str(ok).lower()}"]
        graph = acyclicity.build_wtdg(acyclicity.expand_degenerate(R))
    if witness:
        lines.append(f"witness={witness}")
    _emit(lines)
    if cfg.dot:
        _write(cfg.dot, graph.to_dot())
    return EXIT_OK


def cmd_gen(cfg: RunConfig) -> int:
    kind, src = cfg.extra["kind"], cfg.extra["source"]
    text = _read(src, "source")
    if kind == "tm":
        M = generators.parse_tm(text)
        R = generators.srs_to_trs(generators.tm_to_srs(M))
        start = generators.string_to_term(generators.initial_config(M))
    else:
        R = generators.pcp_to_trs(generators.parse_pcp(text))
        start = generators.pcp_start()
    if cfg.extra.get("sym"):
        R = terms.symmetric_closure(R)
    trs_text, term = R.to_text(), terms.print_term(start)
    _emit(trs_text + f"; start {term}\n")
    if cfg.out:
        _write(Path(f"{cfg.out}.trs"), trs_text)
        _write(Path(f"{cfg.out}.term"), term + "\n")
    return EXIT_OK


def cmd_export_dot(cfg: RunConfig) -> int:
    R = load_trs(cfg) if cfg.trs is not None else None
    G, _ = load_egraph(cfg, R)
    dot = egraph.to_dot(G)
    if cfg.dot:
        _write(cfg.dot, dot)
    else:
        _emit(dot)
    return EXIT_OK


# ---------------------------------------------------------------- argument parsing

def _seeds(text: str) -> tuple:
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from None


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--trs", type=Path)
    p.add_argument("--term", type=Path)
    p.add_argument("--egraph", type=Path)
    p.add_argument("--deps", type=Path)
    p.add_argument("--instance", type=Path)
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--node-cap", type=int, default=100000)
    p.add_argument("--scheduler", choices=["egd_fair", "fifo", "random"], default="egd_fair")
    p.add_argument("--seeds", type=_seeds, default=(1, 2, 3))
    p.add_argument("--out", type=Path, help="output file (or prefix for multi-file outputs)")
    p.add_argument("--dot", type=Path)
    p.add_argument("--strict", action="store_true", help="exit 3 when a budget runs out")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="saturachase",
                                     description="Equality saturation and the chase, side by side.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in [("eqsat", "run equality saturation"), ("chase", "run the standard chase"),
                        ("skolem", "run the Skolem chase")]:
        p = sub.add_parser(name, help=help_)
        p.add_subparsers(dest="action", required=True).add_parser("run", parents=[common])

    p = sub.add_parser("encode", help="translate between EqSat and chase inputs")
    enc = p.add_subparsers(dest="direction", required=True)
    enc.add_parser("skolem2eqsat", parents=[common])
    enc.add_parser("eqsat2chase", parents=[common])

    p = sub.add_parser("verify", help="cross-check engines on the same input")
    ver = p.add_subparsers(dest="which", required=True)
    ver.add_parser("thm15", parents=[common], aliases=["skolem-eqsat"],
                   help="Skolem chase vs EqSat on the encoding")
    ver.add_parser("thm17", parents=[common], aliases=["eqsat-chase"],
                   help="EqSat vs fair standard chases on the encoding")

    sub.add_parser("check-acyclic", parents=[common], help="weak (term) acyclicity")

    p = sub.add_parser("gen", help="generate rewrite systems from machines or PCP instances")
    gen = p.add_subparsers(dest="kind", required=True)
    for kind in ("tm", "pcp"):
        g = gen.add_parser(kind, parents=[common])
        g.add_argument("source", type=Path)
        g.add_argument("--sym", action="store_true", help="emit the symmetric closure")

    p = sub.add_parser("export", help="export graphs")
    p.add_subparsers(dest="fmt", required=True).add_parser("dot", parents=[common])
    return parser


COMMANDS = {
    "eqsat": cmd_eqsat_run,
    "chase": cmd_chase_run,
    "skolem": cmd_skolem_run,
    "encode": cmd_encode,
    "verify": cmd_verify,
    "check-acyclic": cmd_check_acyclic,
    "gen": cmd_gen,
    "export": cmd_export_dot,
}


def run(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    extra = {k: getattr(ns, k) for k in ("direction", "which", "kind", "source", "sym") if hasattr(ns, k)}
    try:
        cfg = RunConfig(ns.command, ns.trs, ns.term, ns.egraph, ns.deps, ns.instance, ns.budget,
                        ns.node_cap, ns.scheduler, ns.seeds, ns.out, ns.dot, ns.strict, extra)
        return COMMANDS[ns.command](cfg)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
    except (terms.TermError, egraph.EGraphError, chase.ChaseError, generators.GeneratorError,
            bridge.BridgeError) as e:
        print(f"error: {e}", file=sys.stderr)
    return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
