"""Encode Turing machines and PCP instances as rewrite systems and watch EqSat on them."""
import argparse
from dataclasses import dataclass
from pathlib import Path

from saturachase.egraph import EGraph
from saturachase.eqsat import eqsat
from saturachase.generators import (initial_config, parse_pcp, parse_tm, pcp_start, pcp_to_trs, srs_to_trs,
                                    string_to_term, tm_to_srs)
from saturachase.terms import symmetric_closure

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


@dataclass(frozen=True)
class Config:
    budget: int = 100
    every: int = 10


def saturate(name, R, start, cfg: Config) -> None:
    G = EGraph(R.signature)
    G.add_term(start)

    def show(r):
        if r.iteration % cfg.every == 0:
            print(f"  {r.line()}")

    out = eqsat(R, G, budget=cfg.budget, on_round=show)
    print(f"{name}: rules={len(R.rules)} status={out.status.value} rounds={out.iterations} "
          f"classes={out.egraph.num_classes} nodes={out.egraph.num_nodes}")


def main(cfg: Config) -> None:
    for name in ("halt2.tm", "loop1.tm"):
        M = parse_tm((CORPUS / name).read_text())
        R = symmetric_closure(srs_to_trs(tm_to_srs(M)))
        saturate(name, R, string_to_term(initial_config(M)), cfg)
    for name in ("solvable.pcp", "unsolvable.pcp"):
        saturate(name, pcp_to_trs(parse_pcp((CORPUS / name).read_text())), pcp_start(), cfg)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budget", type=int, default=Config.budget)
    ap.add_argument("--every", type=int, default=Config.every)
    main(Config(**vars(ap.parse_args())))
