"""Run EqSat and several fair standard chases on encoded corpus inputs and tabulate the outcome."""
import argparse
import time
from dataclasses import dataclass
from pathlib import Path

from saturachase.bridge import verify_chase_equiv
from saturachase.egraph import EGraph, parse_egraph
from saturachase.terms import parse_term, parse_trs

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
PAIRS = [("fxx.trs", "t8.eg"), ("fg.trs", "fg.term"), ("comm.trs", "abc.term"), ("acyclic1.trs", "abc.term"),
         ("acyclic2.trs", "acyclic2.term"), ("proj.trs", "fab.term"), ("assoc.trs", "abc.term"),
         ("fg.trs", "cyclic.eg")]


@dataclass(frozen=True)
class Config:
    budget: int = 30
    seeds: tuple = (1, 2, 3)


def load(trs: str, src: str):
    R = parse_trs((CORPUS / trs).read_text())
    if src.endswith(".eg"):
        return R, parse_egraph((CORPUS / src).read_text())
    G = EGraph(R.signature)
    G.add_term(parse_term((CORPUS / src).read_text().strip()))
    return R, G


def main(cfg: Config) -> int:
    print(f"{'trs':14} {'input':14} {'eqsat':10} {'classes':>7} {'chases':24} {'verdict':7} {'secs':>5}")
    bad = 0
    for trs, src in PAIRS:
        R, G = load(trs, src)
        t0 = time.perf_counter()
        rep, runs = verify_chase_equiv(R, G, seeds=cfg.seeds, budget=cfg.budget, chase_budget=5 * cfg.budget)
        eq = runs.pop("eqsat")
        chases = "/".join(r.status.value[0] for r in runs.values())
        verdict = "pass" if rep.passed else "FAIL"
        bad += not rep.passed
        print(f"{trs:14} {src:14} {eq.status.value:10} {eq.egraph.num_classes:7d} {chases:24} {verdict:7} "
              f"{time.perf_counter() - t0:5.2f}")
    return 1 if bad else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budget", type=int, default=Config.budget)
    ap.add_argument("--seeds", type=lambda s: tuple(int(x) for x in s.split(",")), default=Config.seeds)
    raise SystemExit(main(Config(**vars(ap.parse_args()))))
