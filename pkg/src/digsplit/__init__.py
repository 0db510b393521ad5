"""Digraph splitting laboratory: expanders, reduction gadgets and an exact split solver."""

from .digraph import (
    Digraph,
    DigraphFormatError,
    emit_digraph,
    is_acyclic,
    max_out_degree,
    min_out_degree,
    out_core,
    parse_digraph,
)
from .generators import complete_digraph, directed_cycle, paley_tournament, random_digraph_min_outdeg
from .solver import SplitSpec, SplitWitness, exists_split, exists_split_bruteforce, verify_partition

__version__ = "0.1.0"
