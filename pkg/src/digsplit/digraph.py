"""Simple digraphs, induced out-degree arithmetic and the text format.

Vertices are ``0..n-1``. A vertex set is any iterable of ids; functions that
return sets return ``frozenset``. The solver works on int bitmasks instead
(see ``Digraph.out_masks``).
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

__all__ = [
    "Digraph",
    "DigraphFormatError",
    "parse_digraph",
    "emit_digraph",
    "min_out_degree",
    "max_out_degree",
    "out_core",
    "is_acyclic",
    "iter_bits",
]


class DigraphFormatError(ValueError):
    """Raised for malformed digraph documents; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Digraph:
    """Immutable simple digraph. Digons are allowed, loops and parallel arcs are not."""

    __slots__ = ("n", "out_adj", "m", "_in_adj", "_out_masks")

    def __init__(self, n: int, out_adj: Sequence[Iterable[int]]):
        if n < 0:
            raise ValueError(f"vertex count must be non-negative, got {n}")
        if len(out_adj) != n:
            raise ValueError(f"expected {n} adjacency rows, got {len(out_adj)}")
        rows = []
        m = 0
        for v, nbrs in enumerate(out_adj):
            row = tuple(sorted(nbrs))
            for i, u in enumerate(row):
                if not 0 <= u < n:
                    raise ValueError(f"arc {v}->{u}: head out of range")
                if u == v:
                    raise ValueError(f"self-loop at {v}")
                if i and row[i - 1] == u:
                    raise ValueError(f"parallel arc {v}->{u}")
            rows.append(row)
            m += len(row)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "out_adj", tuple(rows))
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "_in_adj", None)
        object.__setattr__(self, "_out_masks", None)

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]]) -> Digraph:
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in arcs:
            if not 0 <= u < n:
                raise ValueError(f"arc {u}->{v}: tail out of range")
            adj[u].append(v)
        return cls(n, adj)

    def __setattr__(self, name, value):
        raise AttributeError("Digraph is immutable")

    def __eq__(self, other):
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and self.out_adj == other.out_adj

    def __hash__(self):
        return hash((self.n, self.out_adj))

    def __repr__(self):
        return f"Digraph(n={self.n}, m={self.m})"

    def arcs(self) -> Iterable[tuple[int, int]]:
        for v, row in enumerate(self.out_adj):
            for u in row:
                yield v, u

    def has_arc(self, u: int, v: int) -> bool:
        return bool(self.out_masks[u] >> v & 1)

    def out_degree(self, v: int) -> int:
        return len(self.out_adj[v])

    @property
    def in_adj(self) -> tuple[tuple[int, ...], ...]:
        if self._in_adj is None:
            rows: list[list[int]] = [[] for _ in range(self.n)]
            for v, row in enumerate(self.out_adj):
                for u in row:
                    rows[u].append(v)
            object.__setattr__(self, "_in_adj", tuple(tuple(r) for r in rows))
        return self._in_adj

    @property
    def out_masks(self) -> tuple[int, ...]:
        """Out-neighbourhoods as int bitmasks (bit u set iff v->u)."""
        if self._out_masks is None:
            masks = []
            for row in self.out_adj:
                mask = 0
                for u in row:
                    mask |= 1 << u
                masks.append(mask)
            object.__setattr__(self, "_out_masks", tuple(masks))
        return self._out_masks

    def induced(self, vertices: Iterable[int]) -> tuple[Digraph, list[int]]:
        """Induced subdigraph relabelled to ``0..|W|-1``, plus the old ids in order."""
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        rows = [[index[u] for u in self.out_adj[v] if u in index] for v in keep]
        return Digraph(len(keep), rows), keep


def iter_bits(mask: int) -> Iterable[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _member_flags(D: Digraph, W: Iterable[int] | None) -> bytearray:
    flags = bytearray(D.n)
    if W is None:
        flags[:] = b"\x01" * D.n
        return flags
    for v in W:
        if not 0 <= v < D.n:
            raise ValueError(f"vertex {v} not in digraph on {D.n} vertices")
        flags[v] = 1
    return flags


def min_out_degree(D: Digraph, W: Iterable[int] | None = None) -> int:
    """Minimum out-degree of ``D[W]`` (``W`` defaults to all vertices)."""
    flags = _member_flags(D, W)
    best = None
    for v in range(D.n):
        if flags[v]:
            deg = sum(flags[u] for u in D.out_adj[v])
            if best is None or deg < best:
                best = deg
    if best is None:
        raise ValueError("min_out_degree of an empty vertex set is undefined")
    return best


def max_out_degree(D: Digraph) -> int:
    if D.n < 1:
        raise ValueError("max_out_degree needs at least one vertex")
    return max(len(row) for row in D.out_adj)


def out_core(D: Digraph, W: Iterable[int] | None, s: int) -> frozenset[int]:
    """Largest ``C`` within ``W`` with ``min_out_degree(D, C) >= s``; empty if none.

    Worklist peeling, O(n + m). The result does not depend on the deletion
    order because sets with min out-degree >= s are closed under union.
    """
    if s < 0:
        raise ValueError(f"threshold must be non-negative, got {s}")
    alive = _member_flags(D, W)
    out_adj, in_adj = D.out_adj, D.in_adj
    deg = [0] * D.n
    stack = []
    for v in range(D.n):
        if alive[v]:
            d = sum(alive[u] for u in out_adj[v])
            deg[v] = d
            if d < s:
                stack.append(v)
    for v in stack:
        alive[v] = 0
    while stack:
        v = stack.pop()
        for u in in_adj[v]:
            if alive[u]:
                deg[u] -= 1
                if deg[u] < s:
                    alive[u] = 0
                    stack.append(u)
    return frozenset(v for v in range(D.n) if alive[v])


def is_acyclic(D: Digraph, W: Iterable[int] | None = None) -> bool:
    """True iff ``D[W]`` has no directed cycle."""
    return not out_core(D, W, 1)


def parse_digraph(text: str) -> Digraph:
    """Parse the ``n m`` / ``u v`` arc-list format. ``#`` lines and blank lines are skipped."""
    header = None
    arcs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    lineno = 0
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 2:
            raise DigraphFormatError(f"expected two integers, got {line!r}", lineno)
        try:
            a, b = int(fields[0]), int(fields[1])
        except ValueError:
            raise DigraphFormatError(f"non-integer field in {line!r}", lineno) from None
        if header is None:
            if a < 0 or b < 0:
                raise DigraphFormatError("negative header value", lineno)
            header = (a, b)
            continue
        n, m = header
        if len(arcs) == m:
            raise DigraphFormatError(f"more than the declared {m} arcs", lineno)
        if not (0 <= a < n and 0 <= b < n):
            raise DigraphFormatError(f"vertex id out of range 0..{n - 1}", lineno)
        if a == b:
            raise DigraphFormatError(f"self-loop at {a}", lineno)
        if (a, b) in seen:
            raise DigraphFormatError(f"duplicate arc {a}->{b}", lineno)
        seen.add((a, b))
        arcs.append((a, b))
    if header is None:
        raise DigraphFormatError("missing 'n m' header", lineno or 1)
    if len(arcs) != header[1]:
        raise DigraphFormatError(f"declared {header[1]} arcs, found {len(arcs)}", lineno)
    return Digraph.from_arcs(header[0], arcs)


def emit_digraph(D: Digraph) -> str:
    """Canonical document: header, then arcs in lexicographic order, LF-terminated."""
    lines = [f"{D.n} {D.m}"]
    lines.extend(f"{u} {v}" for u, v in D.arcs())
    return "\n".join(lines) + "\n"
