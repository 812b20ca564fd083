"""Saturate f(x,x) -> g(x,x) on the eighth-power term and print what the E-graph represents."""
import argparse
from dataclasses import dataclass
from pathlib import Path

from saturachase.egraph import enumerate_terms, to_dot
from saturachase.eqsat import eqsat_term
from saturachase.terms import parse_term, parse_trs, print_term

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


@dataclass(frozen=True)
class Config:
    trs: Path = CORPUS / "fxx.trs"
    term: Path = CORPUS / "power8.term"
    show: int = 5
    dot: Path | None = None


def main(cfg: Config) -> None:
    R = parse_trs(cfg.trs.read_text())
    t = parse_term(cfg.term.read_text().strip())
    out, root = eqsat_term(R, t)
    print(out.report(), end="")
    terms = sorted(enumerate_terms(out.egraph, root, 15), key=print_term)
    print(f"root=c{root} represented_terms={len(terms)}")
    for u in terms[:cfg.show]:
        print("  " + print_term(u))
    if cfg.dot:
        cfg.dot.write_text(to_dot(out.egraph))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trs", type=Path, default=Config.trs)
    ap.add_argument("--term", type=Path, default=Config.term)
    ap.add_argument("--show", type=int, default=Config.show)
    ap.add_argument("--dot", type=Path)
    main(Config(**vars(ap.parse_args())))
