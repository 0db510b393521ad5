from fractions import Fraction
from itertools import combinations

import mpmath
import pytest

from digsplit.digraph import Digraph, is_acyclic, min_out_degree, out_core
from digsplit.expander import check_property_ii, epsilon
from digsplit.gadgets import (
    GadgetPreconditionError,
    LiftPreconditionError,
    Original,
    SplitAux,
    TowerAux,
    TowerParams,
    audit,
    chain_bound,
    check_lift_a,
    check_lift_b,
    emit_origin,
    f_bound,
    layer_size,
    parse_origin,
    project,
    slack_holds,
    split_neighborhood_gadget,
    tower_gadget,
)
from digsplit.generators import complete_digraph, random_digraph_min_outdeg
from digsplit.rng import SplitMix64

mpmath.mp.dps = 40


@pytest.fixture(scope="module")
def tower_small():
    """Uncertified tower with a small layer, for mechanics tests."""
    tp = TowerParams.build(5, 3, seed=1, layer_size_override=12)
    base = random_digraph_min_outdeg(14, 12, 3)
    return tower_gadget(base, tp)


@pytest.fixture(scope="module")
def tower_267():
    tp = TowerParams.build(4, 3, seed=0)
    return tower_gadget(complete_digraph(267), tp)


@pytest.mark.parametrize("k, s, d", [(3, 4, 266), (3, 5, 332), (4, 4, 630), (3, 6, 399), (5, 4, 1231)])
def test_layer_size_against_oracle(k, s, d):
    assert layer_size(k, s) == d
    assert int(mpmath.floor(mpmath.e**2 / 3 * k**3 * s)) == d


def test_layer_size_preconditions():
    with pytest.raises(ValueError):
        layer_size(2, 5)
    with pytest.raises(ValueError):
        layer_size(3, 3)


def test_split_gadget_on_k5():
    om = split_neighborhood_gadget(complete_digraph(5), 2)
    g = om.gadget
    assert g.n == 15 and g.m == 30 and min_out_degree(g) == 2
    assert is_acyclic(g, om.aux_vertices())
    # v_{0,1} feeds u_0^1, u_0^2 = 1, 2; v_{0,2} feeds 3, 4
    assert g.out_adj[0] == (5, 6)
    assert g.out_adj[5] == (1, 2) and g.out_adj[6] == (3, 4)
    assert om.origin[6] == SplitAux(0, 2)
    assert all(audit(om).values())


def test_split_gadget_f1_subdivides_one_arc():
    D = complete_digraph(3)
    om = split_neighborhood_gadget(D, 1)
    assert om.gadget.n == 6
    for i in range(3):
        aux = 3 + i
        assert om.gadget.out_adj[i] == (aux,)
        assert om.gadget.out_adj[aux] == (D.out_adj[i][0],)


def test_split_gadget_precondition():
    with pytest.raises(GadgetPreconditionError):
        split_neighborhood_gadget(complete_digraph(4), 2)


@pytest.mark.parametrize("seed", range(20))
def test_split_gadget_formulas_on_random_bases(seed):
    rng = SplitMix64(seed)
    f = 1 + rng.below(3)
    n = f * f + 1 + rng.below(8)
    D = random_digraph_min_outdeg(n, f * f + rng.below(n - f * f), seed)
    om = split_neighborhood_gadget(D, f)
    checks = audit(om)
    assert all(checks.values()), checks
    assert om.gadget.n == n * (1 + f)
    assert om.gadget.m == n * f + n * f * f


def test_tower_mechanics_small(tower_small):
    om = tower_small
    p = om.tower
    assert not om.certified
    checks = audit(om)
    assert all(v for key, v in checks.items() if key != "slack"), checks
    assert om.gadget.n == 14 + 14 * 2 * 12
    # U_{0,3} hangs off vertex 0 and maps into U_{0,4}
    first = 14
    assert om.gadget.out_adj[0] == tuple(range(first, first + 12))
    assert om.origin[first] == TowerAux(0, 3, 0)
    assert om.gadget.out_adj[first] == tuple(first + 12 + y for y in p.G.nbrs[0])
    # last fresh layer U_{0,4} maps into the first 12 out-neighbours of vertex 0
    last = first + 12
    U_s = om.base.out_adj[0][:12]
    assert om.gadget.out_adj[last] == tuple(sorted(U_s[y] for y in p.G.nbrs[0]))


def test_tower_preconditions():
    tp = TowerParams.build(4, 3, layer_size_override=10)
    with pytest.raises(GadgetPreconditionError):
        tower_gadget(complete_digraph(10), tp)
    with pytest.raises(GadgetPreconditionError):
        TowerParams(3, 3, 10, tp.G)
    with pytest.raises(GadgetPreconditionError):
        TowerParams(4, 3, 11, tp.G)


def test_tower_on_complete_267(tower_267):
    om = tower_267
    g = om.gadget
    assert om.certified and om.tower.d == 266
    assert g.n == 71_289
    degs = [len(r) for r in g.out_adj]
    assert all(d == 266 for d in degs[:267])
    assert all(d == 3 for d in degs[267:])
    assert min_out_degree(g) == 3
    assert all(audit(om).values())
    assert check_property_ii(om.tower.G).holds


def test_tower_whole_gadget_lifts(tower_267):
    v = check_lift_b(tower_267, range(tower_267.gadget.n), 3)
    assert v.holds and v.achieved == 266 and v.projected == frozenset(range(267))


def test_slack_inequality():
    assert slack_holds(4, 3, 266)
    assert slack_holds(5, 3, 332)
    assert not slack_holds(5, 3, 12)
    for s in range(4, 12):
        for k in (3, 4, 5):
            d = layer_size(k, s)
            assert slack_holds(s, k, d)
            assert s - 1 < mpmath.mpf(3) / (mpmath.e**2 * k**3) * d


def test_project_examples(tower_small):
    om = split_neighborhood_gadget(complete_digraph(5), 2)
    assert project(om, range(15)) == frozenset(range(5))
    assert project(om, range(5, 15)) == frozenset()
    assert project(om, [3, 7, 11]) == frozenset({3})
    W1, W2 = {0, 5, 9}, {2, 9, 14}
    assert project(om, W1 | W2) == project(om, W1) | project(om, W2)


def test_lift_a_whole_gadget_and_digon():
    om = split_neighborhood_gadget(complete_digraph(5), 2)
    v = check_lift_a(om, range(15), 2)
    assert v.holds and v.achieved == 4
    # 0 -> v_{0,1} -> 1 -> v_{1,1} -> 0 : v_{0,1} = 5 feeds {1, 2}, v_{1,1} = 7 feeds {0, 2}
    cyc = [0, 5, 1, 7, 2, 9]
    assert min_out_degree(om.gadget, cyc) >= 1
    v = check_lift_a(om, cyc, 1)
    assert v.holds and v.projected == frozenset({0, 1, 2})


def test_lift_checkers_enforce_hypothesis():
    om = split_neighborhood_gadget(complete_digraph(5), 2)
    with pytest.raises(LiftPreconditionError):
        check_lift_a(om, [], 1)
    with pytest.raises(LiftPreconditionError):
        check_lift_a(om, [0, 5], 1)
    with pytest.raises(ValueError):
        check_lift_a(om, range(15), 3)


def test_lift_a_exhaustive_over_small_bases():
    # K5 is the only 5-vertex digraph with min out-degree 4 = f^2
    om = split_neighborhood_gadget(complete_digraph(5), 2)
    g = om.gadget
    for r in range(1, 16):
        for Wp in combinations(range(15), r):
            dmin = min_out_degree(g, Wp)
            if dmin >= 1:
                assert check_lift_a(om, Wp, 1).holds
            if dmin >= 2:
                assert check_lift_a(om, Wp, 2).holds


def test_lift_a_fuzz_on_random_bases():
    for seed in range(30):
        D = random_digraph_min_outdeg(9, 4 + seed % 4, seed)
        om = split_neighborhood_gadget(D, 2)
        rng = SplitMix64(seed)
        for _ in range(20):
            W0 = [v for v in range(om.gadget.n) if rng.below(10) < 8]
            for level in (1, 2):
                core = out_core(om.gadget, W0, level)
                if core:
                    assert check_lift_a(om, core, level).holds


def test_lift_b_small_tower_fuzz(tower_small):
    om = tower_small
    rng = SplitMix64(4)
    non_empty = 0
    for _ in range(100):
        W0 = [v for v in range(om.gadget.n) if rng.below(100) < 97]
        core = out_core(om.gadget, W0, 1)
        assert project(om, core) or not core
        core = out_core(om.gadget, W0, 3)
        if core:
            non_empty += 1
            v = check_lift_b(om, core, 3)
            assert v.projected and v.certified is False
    assert non_empty > 0


def test_chain_bound():
    assert [chain_bound(c) for c in (2, 3, 10)] == [4, 9, 100]
    with pytest.raises(ValueError):
        chain_bound(0)


def test_f_bound_values():
    assert float(f_bound(2, 1, 1).value) == pytest.approx(157.63319677718720, rel=1e-14)
    assert float(f_bound(1, 1, 1).value) == pytest.approx(2.4630186996435500, rel=1e-14)
    assert f_bound(3, 2, 7) == f_bound(3, 7, 2)
    b = f_bound(2, 5, 1, "one")
    assert b.lower < Fraction(b.value) < b.upper
    with pytest.raises(ValueError):
        f_bound(2, 5, 2, "one")


def test_origin_format_roundtrip(tower_small):
    for om in (split_neighborhood_gadget(complete_digraph(5), 2), tower_small):
        text = emit_origin(om)
        assert parse_origin(text) == om.origin
    lines = emit_origin(split_neighborhood_gadget(complete_digraph(5), 2)).splitlines()
    assert lines[0] == "0 O 0" and lines[5] == "5 S 0 1"
    assert emit_origin(tower_small).splitlines()[14] == "14 T 0 3 0"
    with pytest.raises(ValueError):
        parse_origin("1 O 0\n")
    with pytest.raises(ValueError):
        parse_origin("0 Q 0\n")


def test_tags_are_unique_and_originals_biject(tower_small):
    om = tower_small
    assert len(set(om.origin)) == len(om.origin)
    originals = [t.v for t in om.origin if isinstance(t, Original)]
    assert sorted(originals) == list(range(om.base.n))


def test_eps_bracket_used_by_slack():
    eps = epsilon(3)
    assert eps.lower * 266 > 3
    assert 3 < float(eps.value) * 266 < 4


def test_digraph_base_unchanged(tower_small):
    base = tower_small.base
    assert isinstance(base, Digraph)
    assert base.n == 14 and all(len(r) == 12 for r in base.out_adj)
