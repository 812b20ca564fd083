"""Equality saturation over E-graphs and the chase over relational instances."""
from .egraph import EGraph, Automaton, flatten, rebuild, enumerate_terms, find_homomorphism, is_isomorphic
from .eqsat import EqSatOutcome, Status, eqsat, eqsat_term, ico_step
from .terms import RewriteRule, Signature, Term, Trs, Var, parse_term, parse_trs
from .chase import Atom, Constant, EGD, Null, TGD, run_skolem_chase, run_standard_chase

__all__ = [
    "Atom", "Automaton", "Constant", "EGD", "EGraph", "EqSatOutcome", "Null", "RewriteRule",
    "Signature", "Status", "TGD", "Term", "Trs", "Var", "enumerate_terms", "eqsat", "eqsat_term",
    "find_homomorphism", "flatten", "ico_step", "is_isomorphic", "parse_term", "parse_trs",
    "rebuild", "run_skolem_chase", "run_standard_chase",
]
__version__ = "0.1.0"
