"""Deterministic digraph families used as lower-bound witnesses and test corpora."""

from __future__ import annotations

from .digraph import Digraph
from .rng import SplitMix64


def complete_digraph(n: int) -> Digraph:
    """All ``n(n-1)`` ordered pairs; min out-degree ``n-1``."""
    if n < 1:
        raise ValueError(f"complete_digraph needs n >= 1, got {n}")
    return Digraph(n, [[u for u in range(n) if u != v] for v in range(n)])


def directed_cycle(n: int) -> Digraph:
    if n < 2:
        raise ValueError(f"directed_cycle needs n >= 2, got {n}")
    return Digraph(n, [[(v + 1) % n] for v in range(n)])


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def quadratic_residues(p: int) -> frozenset[int]:
    return frozenset(x * x % p for x in range(1, p))


def paley_tournament(p: int) -> Digraph:
    """Quadratic-residue tournament: ``u -> v`` iff ``v - u`` is a nonzero square mod ``p``.

    Requires ``p`` prime with ``p = 3 (mod 4)``, so that -1 is a non-residue and
    exactly one of ``u -> v``, ``v -> u`` is present.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p % 4 != 3:
        raise ValueError(f"{p} is not 3 mod 4; -1 is a residue and the tournament property fails")
    residues = sorted(quadratic_residues(p))
    return Digraph(p, [[(v + r) % p for r in residues] for v in range(p)])


def random_digraph_min_outdeg(n: int, delta: int, seed: int) -> Digraph:
    """Each vertex gets an independent uniform ``delta``-subset of the others as out-neighbours."""
    if not 1 <= delta <= n - 1:
        raise ValueError(f"delta must be in 1..{n - 1}, got {delta}")
    rng = SplitMix64(seed)
    rows = []
    for v in range(n):
        # sample from 0..n-2 and skip over v
        rows.append([u if u < v else u + 1 for u in rng.sample(n - 1, delta)])
    return Digraph(n, rows)
