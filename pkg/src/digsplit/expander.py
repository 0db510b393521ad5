"""Random bipartite k-out graphs and exhaustive verification of their expansion.

A ``BipartiteKOut`` has sides ``S = T = {0..n-1}``; every ``x`` in ``S`` picks a
uniform ``k``-subset of ``T``. The expansion property checked here:

    for every non-empty X in S with |X| <= x_cap and every Y in T such that
    each x in X has at least 3 neighbours in Y, we have |Y| > |X|.

It suffices to look for equal-size violations ``|X| = |Y| = i``: a violation
of size ``i`` exists iff some ``i``-set ``Y`` has ``m(Y) >= i``, where
``m(Y)`` counts the ``x`` with ``|N(x) & Y| >= 3``. Sizes below 3 are vacuous.

Witnesses are canonical: the smallest violating size ``i``, the colex-smallest
``Y`` of that size, and the ``i`` smallest ``x`` with ``|N(x) & Y| >= 3``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations

from .certified import Certified, scaled_e2
from .rng import SplitMix64

__all__ = [
    "BipartiteKOut",
    "ExpanderParams",
    "PropertyVerdict",
    "VerifiedExpander",
    "ExpanderSearchFailed",
    "BipartiteFormatError",
    "epsilon",
    "lemma_x_cap",
    "sample_k_out",
    "check_property_ii",
    "union_bound_sum",
    "generate_verified",
    "parse_bipartite",
    "emit_bipartite",
]

# above this many Y-subsets per size the colex sweep hands over to the cluster search
COLEX_LIMIT = 200_000


class BipartiteFormatError(ValueError):
    pass


class ExpanderSearchFailed(RuntimeError):
    def __init__(self, message: str, last_verdict: PropertyVerdict):
        super().__init__(message)
        self.last_verdict = last_verdict


@dataclass(frozen=True)
class BipartiteKOut:
    n: int
    k: int
    nbrs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.nbrs) != self.n:
            raise ValueError(f"expected {self.n} neighbourhoods, got {len(self.nbrs)}")
        rows = tuple(tuple(sorted(r)) for r in self.nbrs)
        for x, row in enumerate(rows):
            if len(set(row)) != self.k or len(row) != self.k:
                raise ValueError(f"S-vertex {x} has {len(set(row))} distinct neighbours, expected {self.k}")
            if row and not (0 <= row[0] and row[-1] < self.n):
                raise ValueError(f"S-vertex {x} has a T-neighbour out of range")
        object.__setattr__(self, "nbrs", rows)

    @cached_property
    def inverse(self) -> tuple[tuple[int, ...], ...]:
        """For each T-vertex, the S-vertices adjacent to it."""
        cols: list[list[int]] = [[] for _ in range(self.n)]
        for x, row in enumerate(self.nbrs):
            for y in row:
                cols[y].append(x)
        return tuple(tuple(c) for c in cols)


def epsilon(k: int) -> Certified:
    """``3 / (e^2 k^3)`` with a certified rational bracket."""
    if k < 3:
        raise ValueError(f"the expansion lemma needs k >= 3, got {k}")
    return scaled_e2(Fraction(3, k**3), inverse=True)


def lemma_x_cap(n: int, k: int) -> int:
    """``floor(epsilon(k) * n)``, certified; raises ``AmbiguousFloor`` near integers."""
    return scaled_e2(Fraction(3 * n, k**3), inverse=True).floor()


@dataclass(frozen=True)
class ExpanderParams:
    n: int
    k: int
    x_cap: int
    epsilon: Certified | None = None
    # False when x_cap was supplied by hand instead of derived from epsilon
    certified: bool = True

    @classmethod
    def for_lemma(cls, n: int, k: int) -> ExpanderParams:
        return cls(n, k, lemma_x_cap(n, k), epsilon(k), True)

    @classmethod
    def with_cap(cls, n: int, k: int, x_cap: int) -> ExpanderParams:
        if x_cap < 0:
            raise ValueError("x_cap must be non-negative")
        return cls(n, k, x_cap, None, False)


@dataclass(frozen=True)
class PropertyVerdict:
    holds: bool
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    x_cap: int = 0
    sizes_checked: tuple[int, ...] = ()

    def __post_init__(self):
        if self.holds != (self.witness is None):
            raise ValueError("a witness is present exactly when the property fails")


def sample_k_out(n: int, k: int, seed: int) -> BipartiteKOut:
    """Each S-vertex independently draws a uniform k-subset of T (no replacement)."""
    if k < 3:
        raise ValueError(f"k must be at least 3, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the side size n={n}")
    rng = SplitMix64(seed)
    return BipartiteKOut(n, k, tuple(tuple(rng.sample(n, k)) for _ in range(n)))


def _colex_key(y: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(reversed(y))


def _witness_x(G: BipartiteKOut, Y: tuple[int, ...]) -> tuple[int, ...]:
    ys = set(Y)
    xs = sorted({x for y in Y for x in G.inverse[y]})
    hits = [x for x in xs if sum(1 for u in G.nbrs[x] if u in ys) >= 3]
    return tuple(hits[: len(Y)])


def _violation_by_triples(G: BipartiteKOut) -> tuple[int, ...] | None:
    """Size-3 violations: a triple contained in three or more neighbourhoods."""
    counts = Counter(t for row in G.nbrs for t in combinations(row, 3))
    bad = [t for t, c in counts.items() if c >= 3]
    return min(bad, key=_colex_key) if bad else None


def _violation_by_colex(G: BipartiteKOut, i: int) -> tuple[int, ...] | None:
    """First ``i``-set Y in colex order with m(Y) >= i; m maintained incrementally."""
    inv = G.inverse
    cnt = [0] * G.n
    chosen: list[int] = []
    m = 0

    def rec(r: int, limit: int) -> bool:
        nonlocal m
        for top in range(r - 1, limit):
            for x in inv[top]:
                cnt[x] += 1
                if cnt[x] == 3:
                    m += 1
            chosen.append(top)
            if r == 1:
                found = m >= i
            else:
                found = rec(r - 1, top)
            if found:
                return True
            chosen.pop()
            for x in inv[top]:
                if cnt[x] == 3:
                    m -= 1
                cnt[x] -= 1
        return False

    if rec(i, G.n):
        return tuple(sorted(chosen))
    return None


def _violations_by_cluster(G: BipartiteKOut, cap: int) -> tuple[int, ...] | None:
    """Smallest violation via connected growth of Y.

    At the smallest violating size every violating Y is connected through the
    3+-traces of its hitting S-vertices (otherwise a component would be a
    smaller violation), so growing Y one trace at a time from a single
    neighbourhood reaches all of them.
    """
    nbrs, inv = G.nbrs, G.inverse
    seen: set[frozenset[int]] = set()
    stack: list[frozenset[int]] = []
    for row in nbrs:
        for j in range(3, min(len(row), cap) + 1):
            for sub in combinations(row, j):
                Y = frozenset(sub)
                if Y not in seen:
                    seen.add(Y)
                    stack.append(Y)
    while stack:
        Y = stack.pop()
        room = cap - len(Y)
        if room <= 0:
            continue
        touching = {x for y in Y for x in inv[y]}
        for x in touching:
            inside = sum(1 for u in nbrs[x] if u in Y)
            outside = [u for u in nbrs[x] if u not in Y]
            for j in range(max(1, 3 - inside), min(len(outside), room) + 1):
                for add in combinations(outside, j):
                    Z = Y.union(add)
                    if Z not in seen:
                        seen.add(Z)
                        stack.append(Z)
    best: tuple[int, ...] | None = None
    for Y in seen:
        if best is not None and len(Y) > len(best):
            continue
        xs = {x for y in Y for x in inv[y]}
        m = sum(1 for x in xs if sum(1 for u in nbrs[x] if u in Y) >= 3)
        if m >= len(Y):
            cand = tuple(sorted(Y))
            if best is None or len(cand) < len(best) or _colex_key(cand) < _colex_key(best):
                best = cand
    return best


def check_property_ii(
    G: BipartiteKOut, params: ExpanderParams | None = None, method: str = "auto"
) -> PropertyVerdict:
    """Exhaustively decide the expansion property up to ``params.x_cap``.

    ``method`` is ``"auto"`` (triple shortcut at size 3, colex sweep above it,
    cluster search once the sweep gets large), ``"colex"`` (generic sweep at
    every size) or ``"cluster"``. All three return the same canonical witness.
    """
    if params is None:
        params = ExpanderParams.for_lemma(G.n, G.k)
    if (params.n, params.k) != (G.n, G.k):
        raise ValueError(f"params are for (n={params.n}, k={params.k}), graph is (n={G.n}, k={G.k})")
    if method not in ("auto", "colex", "cluster"):
        raise ValueError(f"unknown method {method!r}")
    cap = min(params.x_cap, G.n)
    sizes = tuple(range(3, cap + 1))
    Y = None
    if method == "cluster":
        Y = _violations_by_cluster(G, cap) if sizes else None
    else:
        for i in sizes:
            if method == "auto" and i == 3:
                Y = _violation_by_triples(G)
            elif method == "auto" and math.comb(G.n, i) > COLEX_LIMIT:
                Y = _violations_by_cluster(G, cap)
                break
            else:
                Y = _violation_by_colex(G, i)
            if Y is not None:
                break
    if Y is None:
        return PropertyVerdict(True, None, params.x_cap, sizes)
    return PropertyVerdict(False, (_witness_x(G, Y), Y), params.x_cap, sizes)


@dataclass(frozen=True)
class UnionBound:
    n: int
    k: int
    x_cap: int
    terms: tuple[Fraction, ...]
    # closed form of the geometric majorant; exactly 1 at epsilon = 3/(e^2 k^3)
    majorant: Fraction = field(default=Fraction(1))

    @property
    def value(self) -> Fraction:
        return sum(self.terms, Fraction(0))

    def partial_sums(self) -> list[Fraction]:
        out, acc = [], Fraction(0)
        for t in self.terms:
            acc += t
            out.append(acc)
        return out

    def __float__(self):
        return float(self.value)


def union_bound_sum(n: int, k: int) -> UnionBound:
    """Exact ``sum_{i=1}^{floor(eps n)} C(n,i)^2 6^-i (k i / n)^(3i)`` as fractions."""
    if k < 3 or n < 1:
        raise ValueError("need k >= 3 and n >= 1")
    cap = lemma_x_cap(n, k)
    terms = tuple(
        Fraction(math.comb(n, i) ** 2 * (k * i) ** (3 * i), 6**i * n ** (3 * i))
        for i in range(1, cap + 1)
    )
    bound = UnionBound(n, k, cap, terms)
    if not bound.value < bound.majorant:
        raise ArithmeticError(f"union bound sum {float(bound.value)} is not below 1")
    return bound


@dataclass(frozen=True)
class VerifiedExpander:
    graph: BipartiteKOut
    params: ExpanderParams
    verdict: PropertyVerdict
    seed: int
    tries: int


def generate_verified(n: int, k: int, seed: int, max_tries: int = 20) -> VerifiedExpander:
    """Sample with seeds ``seed, seed+1, ...`` until the expansion property is verified."""
    if max_tries < 1:
        raise ValueError("max_tries must be at least 1")
    params = ExpanderParams.for_lemma(n, k)
    verdict = None
    for attempt in range(max_tries):
        G = sample_k_out(n, k, seed + attempt)
        verdict = check_property_ii(G, params)
        if verdict.holds:
            return VerifiedExpander(G, params, verdict, seed + attempt, attempt + 1)
    raise ExpanderSearchFailed(
        f"no verified expander for n={n}, k={k} in {max_tries} tries from seed {seed}; "
        f"last witness X={verdict.witness[0]}, Y={verdict.witness[1]}",
        verdict,
    )


def emit_bipartite(G: BipartiteKOut) -> str:
    lines = [f"bip {G.n} {G.k}"]
    lines.extend(" ".join(map(str, row)) for row in G.nbrs)
    return "\n".join(lines) + "\n"


def parse_bipartite(text: str) -> BipartiteKOut:
    lines = [(i, ln.strip()) for i, ln in enumerate(text.split("\n"), start=1)]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise BipartiteFormatError("empty document")
    lineno, head = lines[0]
    fields = head.split()
    if len(fields) != 3 or fields[0] != "bip":
        raise BipartiteFormatError(f"line {lineno}: expected 'bip n k' header")
    try:
        n, k = int(fields[1]), int(fields[2])
    except ValueError:
        raise BipartiteFormatError(f"line {lineno}: non-integer header") from None
    body = lines[1:]
    if len(body) != n:
        raise BipartiteFormatError(f"expected {n} neighbourhood lines, found {len(body)}")
    rows = []
    for lineno, ln in body:
        try:
            row = [int(f) for f in ln.split()]
        except ValueError:
            raise BipartiteFormatError(f"line {lineno}: non-integer id") from None
        if len(row) != k or row != sorted(set(row)):
            raise BipartiteFormatError(f"line {lineno}: expected {k} strictly increasing ids")
        if row and not (0 <= row[0] and row[-1] < n):
            raise BipartiteFormatError(f"line {lineno}: id out of range")
        rows.append(tuple(row))
    return BipartiteKOut(n, k, tuple(rows))
