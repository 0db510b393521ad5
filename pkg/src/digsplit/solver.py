"""Exact (s, t)-splitting of concrete digraphs.

A split is a partition ``A | B`` of the vertices into non-empty parts with
``min_out_degree(D, A) >= s`` and ``min_out_degree(D, B) >= t``. Internally
vertex sets are int bitmasks.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .digraph import Digraph, iter_bits

__all__ = [
    "SplitSpec",
    "SplitWitness",
    "SearchResult",
    "InstanceTooLarge",
    "verify_partition",
    "exists_split_bruteforce",
    "exists_split",
    "max_bounded_core",
]

BRUTE_FORCE_CAP = 20
BOUNDED_CORE_CAP = 64


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class SplitSpec:
    s: int
    t: int

    def __post_init__(self):
        if self.s < 1 or self.t < 1:
            raise ValueError(f"thresholds must be at least 1, got s={self.s}, t={self.t}")

    def swapped(self) -> SplitSpec:
        return SplitSpec(self.t, self.s)


@dataclass(frozen=True)
class SplitWitness:
    A: tuple[int, ...]
    B: tuple[int, ...]
    spec: SplitSpec


@dataclass(frozen=True)
class SearchResult:
    outcome: str  # "found" | "none" | "budget"
    witness: SplitWitness | None
    nodes: int
    elapsed: float

    @property
    def found(self) -> bool:
        return self.outcome == "found"

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "A": list(self.witness.A) if self.witness else [],
            "B": list(self.witness.B) if self.witness else [],
            "nodes": self.nodes,
            "elapsed_ms": int(self.elapsed * 1000),
        }


def _mask(vertices) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def _witness(A: int, B: int, spec: SplitSpec) -> SplitWitness:
    return SplitWitness(tuple(iter_bits(A)), tuple(iter_bits(B)), spec)


def _min_deg_at_least(out_masks, part: int, s: int) -> bool:
    return all((out_masks[v] & part).bit_count() >= s for v in iter_bits(part))


def verify_partition(D: Digraph, w: SplitWitness) -> bool:
    A, B = _mask(w.A), _mask(w.B)
    full = (1 << D.n) - 1
    if len(set(w.A)) != len(w.A) or len(set(w.B)) != len(w.B):
        return False
    if any(not 0 <= v < D.n for v in (*w.A, *w.B)):
        return False
    if not A or not B or A & B or A | B != full:
        return False
    masks = D.out_masks
    return _min_deg_at_least(masks, A, w.spec.s) and _min_deg_at_least(masks, B, w.spec.t)


def exists_split_bruteforce(D: Digraph, spec: SplitSpec, cap: int = BRUTE_FORCE_CAP) -> SearchResult:
    """Try every proper bipartition; the witness has the smallest A-bitmask.

    With ``s == t`` only parts A containing vertex 0 are tried.
    """
    start = time.perf_counter()
    n = D.n
    if n > cap:
        raise InstanceTooLarge(f"brute force is capped at n={cap}, got n={n}")
    if n < 2:
        return SearchResult("none", None, 0, time.perf_counter() - start)
    full = (1 << n) - 1
    out = np.array(D.out_masks, dtype=np.int64)
    chunk = 1 << 16
    tried = 0
    for lo in range(1, full, chunk):
        A = np.arange(lo, min(lo + chunk, full), dtype=np.int64)
        if spec.s == spec.t:
            A = A[(A & 1) == 1]
        B = full ^ A
        ok = np.ones(A.shape, dtype=bool)
        for v in range(n):
            in_a = ((A >> v) & 1).astype(bool)
            deg_a = np.bitwise_count(A & out[v])
            deg_b = np.bitwise_count(B & out[v])
            ok &= np.where(in_a, deg_a >= spec.s, deg_b >= spec.t)
        tried += int(A.size)
        hits = np.flatnonzero(ok)
        if hits.size:
            a = int(A[hits[0]])
            w = _witness(a, full ^ a, spec)
            return SearchResult("found", w, tried, time.perf_counter() - start)
    return SearchResult("none", None, tried, time.perf_counter() - start)


def _core(out_masks, in_adj, C: int, s: int) -> int:
    """Bitmask version of the out-core peel."""
    if s <= 0 or not C:
        return C
    deg = {}
    stack = []
    for v in iter_bits(C):
        d = (out_masks[v] & C).bit_count()
        deg[v] = d
        if d < s:
            stack.append(v)
    for v in stack:
        C &= ~(1 << v)
    while stack:
        v = stack.pop()
        for u in in_adj[v]:
            if C >> u & 1:
                deg[u] -= 1
                if deg[u] < s:
                    C &= ~(1 << u)
                    stack.append(u)
    return C


def exists_split(
    D: Digraph, spec: SplitSpec, budget: int | None = None, prune: bool = True
) -> SearchResult:
    """Branch and bound over labellings A / B / undecided.

    Pruning (``prune=True``): every decided A-vertex must survive the s-core of
    ``A | U``, every B-vertex the t-core of ``B | U``; undecided vertices outside
    one core are forced to the other side. Branching picks the undecided vertex
    of least slack (lowest id on ties) and tries A first. With ``s == t``,
    vertex 0 is fixed in A.
    """
    start = time.perf_counter()
    n = D.n
    s, t = spec.s, spec.t
    if n < 2:
        return SearchResult("none", None, 0, time.perf_counter() - start)
    out_masks, in_adj = D.out_masks, D.in_adj
    full = (1 << n) - 1

    def propagate(A: int, B: int, U: int):
        while True:
            CA = _core(out_masks, in_adj, A | U, s)
            if A & ~CA or not CA:
                return None
            CB = _core(out_masks, in_adj, B | U, t)
            if B & ~CB or not CB:
                return None
            to_b = U & ~CA
            to_a = U & ~CB
            if to_a & to_b:
                return None
            if not (to_a | to_b):
                return A, B, U
            A, B, U = A | to_a, B | to_b, U & ~(to_a | to_b)

    def slack(v: int, AU: int, BU: int) -> int:
        m = out_masks[v]
        return min((m & AU).bit_count() - s, (m & BU).bit_count() - t)

    root = (1, 0, full & ~1) if s == t else (0, 0, full)
    stack = [root]
    nodes = 0
    while stack:
        A, B, U = stack.pop()
        nodes += 1
        if budget is not None and nodes > budget:
            return SearchResult("budget", None, nodes - 1, time.perf_counter() - start)
        if prune:
            state = propagate(A, B, U)
            if state is None:
                continue
            A, B, U = state
        if not U:
            if A and B and _min_deg_at_least(out_masks, A, s) and _min_deg_at_least(out_masks, B, t):
                return SearchResult("found", _witness(A, B, spec), nodes, time.perf_counter() - start)
            continue
        AU, BU = A | U, B | U
        v = min(iter_bits(U), key=lambda x: (slack(x, AU, BU), x))
        bit = 1 << v
        stack.append((A, B | bit, U & ~bit))
        stack.append((A | bit, B, U & ~bit))
    return SearchResult("none", None, nodes, time.perf_counter() - start)


def max_bounded_core(D: Digraph, m: int, cap: int = BOUNDED_CORE_CAP) -> int:
    """Largest min out-degree of ``D[X]`` over non-empty ``X`` with ``|X| <= m``."""
    n = D.n
    if n > cap:
        raise InstanceTooLarge(f"exact bounded-core search is capped at n={cap}, got n={n}")
    if not 1 <= m <= n:
        raise ValueError(f"m must be in 1..{n}, got {m}")
    out_masks, in_adj = D.out_masks, D.in_adj
    full = (1 << n) - 1

    def grow(I: int, allowed: int, target: int) -> bool:
        allowed = _core(out_masks, in_adj, allowed, target)
        if I & ~allowed:
            return False
        size = I.bit_count()
        worst, worst_need = -1, 0
        for v in iter_bits(I):
            need = target - (out_masks[v] & I).bit_count()
            if need > worst_need:
                worst, worst_need = v, need
        if worst < 0:
            return True
        if size + worst_need > m:
            return False
        cands = out_masks[worst] & allowed & ~I
        if cands.bit_count() < worst_need:
            return False
        for w in iter_bits(cands):
            if grow(I | 1 << w, allowed, target):
                return True
            allowed &= ~(1 << w)
        return False

    def feasible(target: int) -> bool:
        if target + 1 > m:
            return False
        allowed = _core(out_masks, in_adj, full, target)
        for r in list(iter_bits(allowed)):
            if not allowed >> r & 1:
                continue
            if grow(1 << r, allowed, target):
                return True
            allowed = _core(out_masks, in_adj, allowed & ~(1 << r), target)
        return False

    best = 0
    while feasible(best + 1):
        best += 1
    return best
