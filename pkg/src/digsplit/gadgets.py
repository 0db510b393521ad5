"""The two reduction gadgets, their projection back to the base digraph, and
runtime checks of the lifting claims.

Vertex numbering in a gadget: base vertices keep their ids ``0..N-1``;
auxiliary vertices follow. In the splitter, ``v_{i,j}`` (``1 <= j <= f``) is
``N + i*f + (j-1)``. In the tower, slot ``q`` of layer ``U_{i,j}``
(``3 <= j <= s-1``) is ``N + (i*(s-3) + (j-3))*d + q``.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

from .certified import scaled_e2
from .digraph import Digraph, is_acyclic, min_out_degree
from .expander import (
    BipartiteKOut,
    ExpanderParams,
    check_property_ii,
    epsilon,
    generate_verified,
)

__all__ = [
    "Original",
    "SplitAux",
    "TowerAux",
    "OriginMap",
    "TowerParams",
    "Verdict",
    "GadgetPreconditionError",
    "LiftPreconditionError",
    "layer_size",
    "slack_holds",
    "split_neighborhood_gadget",
    "tower_gadget",
    "project",
    "check_lift_a",
    "check_lift_b",
    "audit",
    "chain_bound",
    "f_bound",
    "emit_origin",
    "parse_origin",
]


class GadgetPreconditionError(ValueError):
    pass


class LiftPreconditionError(ValueError):
    """The vertex set handed to a claim checker does not meet the claim's hypothesis."""


class Original(NamedTuple):
    v: int


class SplitAux(NamedTuple):
    i: int
    j: int


class TowerAux(NamedTuple):
    i: int
    j: int
    slot: int


Tag = Union[Original, SplitAux, TowerAux]


def layer_size(k: int, s: int) -> int:
    """Certified ``floor((e^2/3) k^3 s)``."""
    if k < 3:
        raise ValueError(f"layer_size needs k >= 3, got {k}")
    if s < 4:
        raise ValueError(f"layer_size needs s >= 4, got {s}")
    return scaled_e2(Fraction(k**3 * s, 3)).floor()


def slack_holds(s: int, k: int, d: int) -> bool:
    """Certified ``s - 1 < epsilon(k) * d``: sets of at most s-1 layer vertices lie under the cap."""
    return epsilon(k).lower * d > s - 1


@dataclass(frozen=True)
class TowerParams:
    s: int
    k: int
    d: int
    G: BipartiteKOut
    # False when d was overridden or the slack inequality fails
    certified: bool = True
    seed: int | None = None

    def __post_init__(self):
        if self.s < 4:
            raise GadgetPreconditionError(f"the tower needs s >= 4, got {self.s}")
        if (self.G.n, self.G.k) != (self.d, self.k):
            raise GadgetPreconditionError(
                f"expander is (n={self.G.n}, k={self.G.k}), tower needs (n={self.d}, k={self.k})"
            )

    @classmethod
    def build(
        cls, s: int, k: int, seed: int = 0, max_tries: int = 20, layer_size_override: int | None = None
    ) -> TowerParams:
        """Layer size, a verified expander on it, and the slack check."""
        if layer_size_override is None:
            d = layer_size(k, s)
            certified = True
        else:
            d = layer_size_override
            certified = False
        verified = generate_verified(d, k, seed, max_tries)
        if certified and not slack_holds(s, k, d):
            raise ArithmeticError(f"slack inequality s-1 < eps*d fails for s={s}, k={k}, d={d}")
        certified = certified and slack_holds(s, k, d)
        return cls(s, k, d, verified.graph, certified, verified.seed)

    def expansion_verified(self) -> bool:
        return check_property_ii(self.G, ExpanderParams.for_lemma(self.d, self.k)).holds


@dataclass(frozen=True)
class OriginMap:
    base: Digraph
    gadget: Digraph
    origin: tuple[Tag, ...]
    kind: str
    f: int | None = None
    tower: TowerParams | None = None
    certified: bool = True

    @property
    def n_base(self) -> int:
        return self.base.n

    def aux_vertices(self) -> range:
        return range(self.base.n, self.gadget.n)


def split_neighborhood_gadget(D: Digraph, f: int) -> OriginMap:
    """Splitter D': ``v_i -> v_{i,j}`` and ``v_{i,j} -> u_i^{(j-1)f+l}``, ``l = 1..f``.

    The ``u_i`` are the first ``f^2`` out-neighbours of ``v_i`` in id order.
    """
    if f < 1:
        raise GadgetPreconditionError(f"f must be at least 1, got {f}")
    N = D.n
    if N == 0:
        raise GadgetPreconditionError("base digraph is empty")
    need = f * f
    if min_out_degree(D) < need:
        raise GadgetPreconditionError(
            f"splitter needs min out-degree >= f^2 = {need}, base has {min_out_degree(D)}"
        )
    rows: list[list[int]] = []
    origin: list[Tag] = [Original(v) for v in range(N)]
    for i in range(N):
        rows.append([N + i * f + j for j in range(f)])
    for i in range(N):
        targets = D.out_adj[i][:need]
        for j in range(1, f + 1):
            rows.append(list(targets[(j - 1) * f : j * f]))
            origin.append(SplitAux(i, j))
    return OriginMap(D, Digraph(N * (1 + f), rows), tuple(origin), "split", f=f)


def tower_gadget(D: Digraph, p: TowerParams) -> OriginMap:
    """Tower D'': layers ``U_{i,3..s-1}`` joined by copies of the expander, ``U_{i,s}`` in N+(v_i).

    Arcs of D itself are not kept.
    """
    s, d, G = p.s, p.d, p.G
    N = D.n
    if N == 0:
        raise GadgetPreconditionError("base digraph is empty")
    if min_out_degree(D) < d:
        raise GadgetPreconditionError(f"tower needs min out-degree >= d = {d}, base has {min_out_degree(D)}")
    layers = s - 3
    total = N + N * layers * d
    rows: list[list[int] | tuple[int, ...]] = [None] * total  # type: ignore[list-item]
    origin: list[Tag] = [Original(v) for v in range(N)] + [None] * (total - N)  # type: ignore[list-item]
    for i in range(N):
        base_i = N + i * layers * d
        rows[i] = range(base_i, base_i + d)
        last = D.out_adj[i][:d]
        for jj in range(layers):
            start = base_i + jj * d
            if jj + 1 < layers:
                nxt = start + d
                targets = [[nxt + y for y in row] for row in G.nbrs]
            else:
                targets = [[last[y] for y in row] for row in G.nbrs]
            for q in range(d):
                rows[start + q] = targets[q]
                origin[start + q] = TowerAux(i, jj + 3, q)
    gadget = Digraph(total, rows)
    return OriginMap(D, gadget, tuple(origin), "tower", tower=p, certified=p.certified)


def project(om: OriginMap, Wp: Iterable[int]) -> frozenset[int]:
    """``W' & V(D)``, expressed in base ids."""
    out = set()
    for g in Wp:
        tag = om.origin[g]
        if isinstance(tag, Original):
            out.add(tag.v)
    return frozenset(out)


@dataclass(frozen=True)
class Verdict:
    holds: bool
    projected: frozenset[int]
    required: int
    achieved: int | None
    # base vertex whose out-degree inside the projection falls short
    witness: int | None = None
    certified: bool = True


def _check_lift(om: OriginMap, Wp: Iterable[int], level: int, required: int) -> Verdict:
    Wp = frozenset(Wp)
    if not Wp:
        raise LiftPreconditionError("W' is empty")
    have = min_out_degree(om.gadget, Wp)
    if have < level:
        raise LiftPreconditionError(f"min out-degree of D[W'] is {have}, hypothesis needs {level}")
    W = project(om, Wp)
    if not W:
        return Verdict(False, W, required, None, None, om.certified)
    deg = {v: sum(1 for u in om.base.out_adj[v] if u in W) for v in W}
    worst = min(W, key=lambda v: (deg[v], v))
    achieved = deg[worst]
    holds = achieved >= required
    return Verdict(holds, W, required, achieved, None if holds else worst, om.certified)


def check_lift_a(om: OriginMap, Wp: Iterable[int], level: int) -> Verdict:
    """Splitter claim: out-degree 1 in D'[W'] lifts to 1 in D[W], out-degree 2 lifts to 4."""
    if om.kind != "split":
        raise ValueError("check_lift_a needs a splitter origin map")
    if level not in (1, 2):
        raise ValueError(f"level must be 1 or 2, got {level}")
    return _check_lift(om, Wp, level, 1 if level == 1 else 4)


def check_lift_b(om: OriginMap, Wp: Iterable[int], level: int) -> Verdict:
    """Tower claim: out-degree 1 in D''[W'] lifts to 1, out-degree 3 lifts to s."""
    if om.kind != "tower" or om.tower is None:
        raise ValueError("check_lift_b needs a tower origin map")
    if level not in (1, 3):
        raise ValueError(f"level must be 1 or 3, got {level}")
    return _check_lift(om, Wp, level, 1 if level == 1 else om.tower.s)


def audit(om: OriginMap) -> dict[str, bool]:
    """Size formulas, exact out-degrees and acyclicity of the auxiliary part."""
    N, g = om.base.n, om.gadget
    degs = [len(row) for row in g.out_adj]
    checks: dict[str, bool] = {}
    if om.kind == "split":
        f = om.f
        checks["vertices"] = g.n == N * (1 + f)
        checks["arcs"] = g.m == N * f + N * f * f
        checks["original_out_degree"] = all(d == f for d in degs[:N])
        checks["aux_out_degree"] = all(d == f for d in degs[N:])
        checks["min_out_degree"] = min(degs) == f
    else:
        p = om.tower
        layers = p.s - 3
        checks["vertices"] = g.n == N + N * layers * p.d
        checks["arcs"] = g.m == N * p.d + N * layers * p.d * p.k
        checks["original_out_degree"] = all(d == p.d for d in degs[:N])
        checks["aux_out_degree"] = all(d == p.k for d in degs[N:])
        checks["min_out_degree"] = min(degs) == min(p.k, p.d)
        checks["slack"] = slack_holds(p.s, p.k, p.d)
    checks["aux_acyclic"] = is_acyclic(g, om.aux_vertices())
    return checks


def chain_bound(f2b2: int) -> int:
    """Upper bound ``f2b2**2`` on F(4, b(4)), hence on F(3, b(3))."""
    if f2b2 < 1:
        raise ValueError("f2b2 must be at least 1")
    return f2b2 * f2b2


def f_bound(f2b2: int, s: int, t: int, mode: str = "both"):
    """Strict upper bound ``(e^2/3) f2b2^6 max(s, t)`` as a ``Certified`` value.

    ``mode="both"`` is the two-sided statement; ``mode="one"`` is the
    ``F(s, 1)`` statement and requires ``t == 1``.
    """
    if f2b2 < 1 or s < 1 or t < 1:
        raise ValueError("f2b2, s and t must be at least 1")
    if mode not in ("both", "one"):
        raise ValueError(f"mode must be 'both' or 'one', got {mode!r}")
    if mode == "one" and t != 1:
        raise ValueError("mode 'one' bounds F(s, 1); t must be 1")
    return scaled_e2(Fraction(f2b2**6 * max(s, t), 3))


def emit_origin(om: OriginMap) -> str:
    lines = []
    for g, tag in enumerate(om.origin):
        if isinstance(tag, Original):
            lines.append(f"{g} O {tag.v}")
        elif isinstance(tag, SplitAux):
            lines.append(f"{g} S {tag.i} {tag.j}")
        else:
            lines.append(f"{g} T {tag.i} {tag.j} {tag.slot}")
    return "\n".join(lines) + "\n"


def parse_origin(text: str) -> tuple[Tag, ...]:
    tags: list[Tag] = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        fields = line.split()
        try:
            g = int(fields[0])
            nums = [int(x) for x in fields[2:]]
        except (ValueError, IndexError):
            raise ValueError(f"line {lineno}: malformed origin record {line!r}") from None
        if g != len(tags):
            raise ValueError(f"line {lineno}: expected gadget id {len(tags)}, got {g}")
        kind = fields[1]
        if kind == "O" and len(nums) == 1:
            tags.append(Original(*nums))
        elif kind == "S" and len(nums) == 2:
            tags.append(SplitAux(*nums))
        elif kind == "T" and len(nums) == 3:
            tags.append(TowerAux(*nums))
        else:
            raise ValueError(f"line {lineno}: malformed origin record {line!r}")
    return tuple(tags)
