"""Reproducible experiment campaigns behind the CLI.

Every campaign returns an ``ExperimentReport``. Per-trial randomness comes
from ``derive_seed(seed, trial)``, so records do not depend on scheduling.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .digraph import Digraph, iter_bits, out_core
from .expander import (
    ExpanderParams,
    check_property_ii,
    epsilon,
    sample_k_out,
    union_bound_sum,
)
from .gadgets import (
    OriginMap,
    TowerParams,
    audit,
    chain_bound,
    check_lift_a,
    check_lift_b,
    f_bound,
    layer_size,
    project,
    slack_holds,
    split_neighborhood_gadget,
    tower_gadget,
)
from .generators import complete_digraph
from .rng import SplitMix64, derive_seed
from .solver import SplitSpec, SplitWitness, exists_split, verify_partition

FORMAT_VERSION = "digsplit-report/1"
DENSITIES = (0.25, 0.5, 0.75, 0.9)
TIMING_KEYS = frozenset({"elapsed_ms"})


@dataclass
class ExperimentReport:
    command: str
    params: dict
    seed: int
    records: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    verdict: str = "pass"
    version: str = FORMAT_VERSION

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def summary_object(self) -> dict:
        return {
            "type": "summary",
            "format_version": self.version,
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "summary": self.summary,
            "verdict": self.verdict,
        }

    def lines(self, timing: bool = True) -> list[str]:
        objs = [{"type": "trial", **r} for r in self.records] + [self.summary_object()]
        if not timing:
            objs = [_strip_timing(o) for o in objs]
        return [json.dumps(o, sort_keys=True) for o in objs]

    def to_jsonl(self, timing: bool = True) -> str:
        return "\n".join(self.lines(timing)) + "\n"

    def canonical(self) -> str:
        """The report with timing fields removed; stable across identical runs."""
        return self.to_jsonl(timing=False)


def _strip_timing(obj):
    if isinstance(obj, dict):
        return {k: _strip_timing(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [_strip_timing(v) for v in obj]
    return obj


def lemma_sweep(n: int, k: int, trials: int, seed: int) -> ExperimentReport:
    """Sample ``trials`` k-out graphs and verify the expansion property on each."""
    start = time.perf_counter()
    params = ExpanderParams.for_lemma(n, k)
    report = ExperimentReport("lemma-sweep", {"n": n, "k": k, "trials": trials}, seed)
    failures = 0
    for trial in range(trials):
        sub = derive_seed(seed, trial)
        verdict = check_property_ii(sample_k_out(n, k, sub), params)
        failures += not verdict.holds
        report.records.append(
            {
                "trial": trial,
                "seed": sub,
                "holds": verdict.holds,
                "witness": None if verdict.holds else [list(verdict.witness[0]), list(verdict.witness[1])],
            }
        )
    ub = union_bound_sum(n, k)
    report.summary = {
        "x_cap": params.x_cap,
        "epsilon": str(params.epsilon.value)[:20],
        "successes": trials - failures,
        "failures": failures,
        "failure_rate": failures / trials if trials else 0.0,
        "union_bound_sum": float(ub.value),
        "union_bound_below_one": ub.value < 1,
        "vacuous": params.x_cap < 3,
        "elapsed_ms": int((time.perf_counter() - start) * 1000),
    }
    report.verdict = "pass" if trials - failures >= 1 else "fail"
    return report


def sample_subset(n: int, seed: int) -> tuple[str, np.ndarray]:
    """Random starting set for a fuzz trial, as a boolean membership array.

    Four draws in five are uniform with density from ``DENSITIES``; the rest
    delete a handful of random vertices from the full set.
    """
    rng = SplitMix64(seed)
    mode = rng.below(len(DENSITIES) + 1)
    if mode < len(DENSITIES):
        density = DENSITIES[mode]
        threshold = np.uint64(int(density * 2**64))
        return f"density={density}", rng.next_block(n) < threshold
    members = np.ones(n, dtype=bool)
    count = 1 + rng.below(max(1, min(n - 1, 16)))
    members[rng.sample(n, count)] = False
    return f"delete={count}", members


def _levels(kind: str) -> tuple[int, int]:
    return (1, 2) if kind == "a" else (1, 3)


def _fuzz_trial(om: OriginMap, kind: str, seed: int, trial: int) -> dict:
    sub = derive_seed(seed, trial)
    mode, members = sample_subset(om.gadget.n, sub)
    w0 = np.flatnonzero(members).tolist()
    check = check_lift_a if kind == "a" else check_lift_b
    rec: dict = {"trial": trial, "seed": sub, "sampler": mode, "w0_size": len(w0)}
    for level in _levels(kind):
        core = out_core(om.gadget, w0, level)
        key = f"level{level}"
        if not core:
            rec[key] = {"core_size": 0, "skipped": True}
            continue
        v = check(om, core, level)
        rec[key] = {
            "core_size": len(core),
            "skipped": False,
            "projected_size": len(v.projected),
            "required": v.required,
            "achieved": v.achieved,
            "holds": v.holds,
        }
    return rec


_WORKER_OM: OriginMap | None = None


def _init_worker(om: OriginMap) -> None:
    global _WORKER_OM
    _WORKER_OM = om


def _worker_trial(args) -> dict:
    kind, seed, trial = args
    return _fuzz_trial(_WORKER_OM, kind, seed, trial)


def _exhaustive_split_check(om: OriginMap) -> dict:
    """Every non-empty W' of a small splitter gadget, hypotheses tested directly."""
    g = om.gadget
    if g.n > 22:
        raise ValueError(f"exhaustive check is limited to 22 gadget vertices, got {g.n}")
    masks = g.out_masks
    N = om.base.n
    base_masks = om.base.out_masks
    base_part = (1 << N) - 1
    counts = {"subsets": 0, "hyp_level1": 0, "hyp_level2": 0, "violations_level1": 0, "violations_level2": 0}
    for Wp in range(1, 1 << g.n):
        counts["subsets"] += 1
        dmin = min((masks[v] & Wp).bit_count() for v in iter_bits(Wp))
        if dmin < 1:
            continue
        W = Wp & base_part
        wdeg = min((base_masks[v] & W).bit_count() for v in iter_bits(W)) if W else -1
        counts["hyp_level1"] += 1
        if W == 0 or wdeg < 1:
            counts["violations_level1"] += 1
        if dmin >= 2:
            counts["hyp_level2"] += 1
            if W == 0 or wdeg < 4:
                counts["violations_level2"] += 1
    return counts


def claim_fuzz(
    kind: str,
    trials: int,
    seed: int,
    base: Digraph | None = None,
    f: int = 2,
    s: int = 4,
    k: int = 3,
    tower_seed: int = 0,
    layer_size_override: int | None = None,
    exhaustive: bool = False,
    threads: int = 1,
) -> ExperimentReport:
    """Runtime check of a lifting claim on cores of random gadget subsets.

    ``kind="a"`` uses the splitter on ``base`` (default K5) with parameter ``f``;
    ``kind="b"`` the tower with thresholds ``s`` and expander degree ``k`` on
    ``base`` (default the complete digraph on ``d + 1`` vertices).
    """
    start = time.perf_counter()
    if kind not in ("a", "b"):
        raise ValueError(f"kind must be 'a' or 'b', got {kind!r}")
    params: dict = {"kind": kind, "trials": trials, "exhaustive": exhaustive}
    if kind == "a":
        base = base if base is not None else complete_digraph(5)
        om = split_neighborhood_gadget(base, f)
        params.update(f=f)
    else:
        tp = TowerParams.build(s, k, tower_seed, layer_size_override=layer_size_override)
        base = base if base is not None else complete_digraph(tp.d + 1)
        om = tower_gadget(base, tp)
        params.update(s=s, k=k, d=tp.d, tower_seed=tower_seed, expander_seed=tp.seed, certified=tp.certified)
    params.update(base_n=base.n, base_m=base.m, gadget_n=om.gadget.n, gadget_m=om.gadget.m)
    report = ExperimentReport("claim-fuzz", params, seed)
    checks = audit(om)

    if exhaustive:
        if kind != "a":
            raise ValueError("exhaustive mode is only available for the splitter")
        counts = _exhaustive_split_check(om)
        violations = counts["violations_level1"] + counts["violations_level2"]
        report.summary = {**counts, "audit": checks, "violations": violations}
    else:
        jobs = [(kind, seed, t) for t in range(trials)]
        if threads > 1:
            with ProcessPoolExecutor(threads, initializer=_init_worker, initargs=(om,)) as pool:
                report.records = list(pool.map(_worker_trial, jobs, chunksize=max(1, trials // (4 * threads))))
        else:
            report.records = [_fuzz_trial(om, kind, seed, t) for t in range(trials)]
        summary: dict = {"audit": checks}
        violations = 0
        for level in _levels(kind):
            key = f"level{level}"
            used = [r[key] for r in report.records if not r[key]["skipped"]]
            bad = sum(1 for r in used if not r["holds"])
            violations += bad
            summary[key] = {
                "non_empty_cores": len(used),
                "skip_rate": 1 - len(used) / trials if trials else 0.0,
                "violations": bad,
            }
        summary["violations"] = violations
        report.summary = summary
    report.summary["elapsed_ms"] = int((time.perf_counter() - start) * 1000)
    report.verdict = "pass" if violations == 0 and all(checks.values()) else "fail"
    return report


def bounds_table(f2b2: int, s: int, t: int, mode: str = "both", k: int | None = None) -> dict:
    """Every closed-form quantity of the reduction for one parameter choice."""
    if mode == "one" and t != 1:
        raise ValueError("mode 'one' bounds F(s, 1); t must be 1")
    chain = chain_bound(f2b2)
    k = chain if k is None else k
    top = max(s, t)
    bound = f_bound(f2b2, s, t, mode)
    row: dict = {
        "f2b2": f2b2,
        "s": s,
        "t": t,
        "mode": mode,
        "statement": "F(s,t) < (e^2/3) * F(2,2)^6 * max(s,t)" if mode == "both" else "F(s,1) < (e^2/3) * F(2,1)^6 * s",
        "chain_bound": chain,
        "k": k,
        "f_bound": float(bound.value),
        "f_bound_bracket": [str(bound.lower), str(bound.upper)],
    }
    notes = []
    if k < 3:
        notes.append(f"k = {k} < 3: the expander lemma needs k >= 3, layer size not computed")
        row.update(epsilon=None, layer_size=None, slack_holds=None)
    else:
        row["epsilon"] = float(epsilon(k).value)
        if top < 4:
            notes.append(f"max(s,t) = {top} < 4: no tower gadget; small thresholds follow by monotonicity")
            row.update(layer_size=None, slack_holds=None)
        else:
            d = layer_size(k, top)
            row.update(layer_size=d, slack_holds=slack_holds(top, k, d))
    row["notes"] = notes
    return row


def pipeline(
    kind: str,
    base: Digraph,
    seed: int = 0,
    f: int = 2,
    k: int = 3,
    s: int = 4,
    mode: str = "both",
    budget: int | None = 10_000,
    layer_size_override: int | None = None,
) -> ExperimentReport:
    """Build a gadget over ``base``, solve it at the small thresholds and lift the split."""
    start = time.perf_counter()
    if mode not in ("both", "one"):
        raise ValueError(f"mode must be 'both' or 'one', got {mode!r}")
    params: dict = {"kind": kind, "mode": mode, "base_n": base.n, "base_m": base.m, "budget": budget}
    if kind == "split":
        om = split_neighborhood_gadget(base, f)
        inner = SplitSpec(2, 2 if mode == "both" else 1)
        lifted = SplitSpec(4, 4 if mode == "both" else 1)
        params.update(f=f)
    elif kind == "tower":
        tp = TowerParams.build(s, k, seed, layer_size_override=layer_size_override)
        om = tower_gadget(base, tp)
        inner = SplitSpec(3, 3 if mode == "both" else 1)
        lifted = SplitSpec(s, s if mode == "both" else 1)
        params.update(s=s, k=k, d=tp.d, expander_seed=tp.seed, certified=tp.certified)
    else:
        raise ValueError(f"kind must be 'split' or 'tower', got {kind!r}")
    params.update(gadget_n=om.gadget.n, gadget_m=om.gadget.m, inner=[inner.s, inner.t], lifted=[lifted.s, lifted.t])
    report = ExperimentReport("pipeline", params, seed)
    checks = audit(om)
    result = exists_split(om.gadget, inner, budget=budget)
    summary: dict = {"audit": checks, "outcome": result.outcome, "nodes": result.nodes}
    ok = all(checks.values())
    if result.found:
        A = sorted(project(om, result.witness.A))
        B = sorted(project(om, result.witness.B))
        projected = SplitWitness(tuple(A), tuple(B), lifted)
        valid = verify_partition(base, projected)
        summary.update(projected_A=A, projected_B=B, projected_valid=valid)
        ok = ok and valid
    summary["elapsed_ms"] = int((time.perf_counter() - start) * 1000)
    report.summary = summary
    report.verdict = "pass" if ok else "fail"
    return report
