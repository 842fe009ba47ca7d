"""Cellular automata on finitely generated abelian groups, extended to
partial configurations, and a small laboratory for checking Kan extension
statements between finite posets."""

from .automaton import Automaton, LocElem, RuleTable, SubElem
from .config import EMPTY, PartialConfig, StateSet, completions, enumerate_configs, join, leq, meet, restrict, shift
from .group import GroupElement, GroupSpec, compose, enumerate_elements, inverse, set_product, translate_set

__version__ = "0.1.0"
