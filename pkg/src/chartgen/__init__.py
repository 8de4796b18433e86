"""Index-domain compilation and pruned chart generation for unification grammars."""

from importlib.resources import files

from .domains import DomainTable, Triple, compile_inner, compile_outer, load_table, serialize_table
from .fs import FeatureStructure, parse_avm, subsumes, unify
from .generator import generate, lex_lookup
from .grammar import Grammar, parse_grammar, parse_sem, validate_coherence

__version__ = '0.1.0'


def data_path(name: str):
    """Path of a bundled grammar, corpus or semantics file."""
    return files(__package__) / 'data' / name
