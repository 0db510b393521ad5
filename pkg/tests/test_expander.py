from fractions import Fraction

import mpmath
import pytest

from digsplit.certified import E2_HI, E2_LO, AmbiguousFloor, certified_floor
from digsplit.expander import (
    BipartiteFormatError,
    BipartiteKOut,
    ExpanderParams,
    ExpanderSearchFailed,
    check_property_ii,
    emit_bipartite,
    epsilon,
    generate_verified,
    lemma_x_cap,
    parse_bipartite,
    sample_k_out,
    union_bound_sum,
)
from oracles import property_ii_direct, property_ii_from_x_side

mpmath.mp.dps = 40


def mp_eps(k):
    return 3 / (mpmath.e**2 * k**3)


def test_e2_bracket_is_correct():
    e2 = mpmath.e**2
    assert mpmath.mpf(E2_LO.numerator) / E2_LO.denominator < e2
    assert e2 < mpmath.mpf(E2_HI.numerator) / E2_HI.denominator


@pytest.mark.parametrize("k", [3, 4, 5, 7])
def test_epsilon_matches_oracle(k):
    eps = epsilon(k)
    assert abs(mpmath.mpf(str(eps.value)) - mp_eps(k)) < mpmath.mpf(10) ** -35
    assert eps.lower < Fraction(str(mpmath.nstr(mp_eps(k), 30))) < eps.upper


def test_epsilon_frozen_values():
    # 40-digit mpmath evaluation of 3/(e^2 k^3)
    assert float(epsilon(3).value) == pytest.approx(0.015037253692956965766, rel=1e-15)
    assert float(epsilon(4).value) == pytest.approx(0.0063438414017162199325, rel=1e-15)
    assert epsilon(3).value > epsilon(4).value > epsilon(5).value
    with pytest.raises(ValueError):
        epsilon(2)


def test_x_cap_values():
    assert lemma_x_cap(6, 3) == 0
    assert lemma_x_cap(200, 3) == 3  # 3.0074...
    assert lemma_x_cap(266, 3) == 3  # 3.99998...
    assert lemma_x_cap(332, 3) == 4
    assert lemma_x_cap(10000, 4) == 63


def test_certified_floor_refuses_near_integers():
    with pytest.raises(AmbiguousFloor):
        certified_floor(Fraction(3) - Fraction(1, 10**12), Fraction(3) + Fraction(1, 10**12))
    with pytest.raises(AmbiguousFloor):
        certified_floor(Fraction(3) + Fraction(1, 10**11), Fraction(3) + Fraction(2, 10**11))
    assert certified_floor(Fraction(7, 2), Fraction(7, 2)) == 3


def test_sample_forced_and_deterministic():
    G = sample_k_out(3, 3, 42)
    assert G.nbrs == ((0, 1, 2),) * 3
    a, b = sample_k_out(50, 3, 7), sample_k_out(50, 3, 7)
    assert a == b
    assert all(len(set(row)) == 3 for row in a.nbrs)
    assert a != sample_k_out(50, 3, 8)


@pytest.mark.parametrize("n, k", [(2, 3), (10, 2)])
def test_sample_rejects_bad_parameters(n, k):
    with pytest.raises(ValueError):
        sample_k_out(n, k, 0)


def test_bipartite_invariants():
    with pytest.raises(ValueError):
        BipartiteKOut(2, 2, ((0, 0), (0, 1)))
    with pytest.raises(ValueError):
        BipartiteKOut(2, 2, ((0, 2), (0, 1)))


def test_vacuous_when_cap_below_three():
    G = sample_k_out(10, 3, 1)
    v = check_property_ii(G)
    assert v.holds and v.sizes_checked == ()


def _planted(n=200, seed=0):
    """Three S-vertices forced onto the triple {0,1,2}."""
    G = sample_k_out(n, 3, seed)
    rows = list(G.nbrs)
    rows[5] = rows[17] = rows[90] = (0, 1, 2)
    return BipartiteKOut(n, 3, tuple(rows))


@pytest.mark.parametrize("method", ["auto", "colex", "cluster"])
def test_planted_violation(method):
    G = _planted()
    v = check_property_ii(G, method=method)
    assert not v.holds
    X, Y = v.witness
    assert Y == (0, 1, 2)
    assert X == (5, 17, 90)


def test_methods_agree_on_canonical_witness():
    mismatches = 0
    for seed in range(60):
        G = sample_k_out(14, 3, seed)
        for cap in (3, 4, 5, 6):
            params = ExpanderParams.with_cap(14, 3, cap)
            verdicts = {m: check_property_ii(G, params, m) for m in ("auto", "colex", "cluster")}
            mismatches += len({(v.holds, v.witness) for v in verdicts.values()}) != 1
    assert mismatches == 0


def test_triple_shortcut_matches_generic_path_at_size_three():
    for seed in range(30):
        G = sample_k_out(9, 4, seed)
        p = ExpanderParams.with_cap(9, 4, 3)
        assert check_property_ii(G, p, "auto") == check_property_ii(G, p, "colex")


def test_witness_is_independently_recheckable():
    seen = 0
    for seed in range(80):
        G = sample_k_out(12, 3, seed)
        v = check_property_ii(G, ExpanderParams.with_cap(12, 3, 6))
        if v.holds:
            continue
        seen += 1
        X, Y = v.witness
        assert len(Y) <= len(X) <= 6
        assert all(len(set(G.nbrs[x]) & set(Y)) >= 3 for x in X)
    assert seen > 0


@pytest.mark.parametrize("cap", [3, 4, 5, 6, 8])
def test_equal_size_reduction_matches_direct_brute_force(cap):
    for seed in range(40):
        n = 8 + seed % 5
        G = sample_k_out(n, 3, 1000 + seed)
        got = check_property_ii(G, ExpanderParams.with_cap(n, 3, cap)).holds
        assert got == property_ii_direct(G, cap)


def test_x_side_oracle_agrees_with_direct_oracle():
    for seed in range(40):
        G = sample_k_out(10, 3, seed)
        for cap in (3, 4, 5):
            assert property_ii_from_x_side(G, cap) == property_ii_direct(G, cap)


def test_param_mismatch_is_an_error():
    with pytest.raises(ValueError):
        check_property_ii(sample_k_out(20, 3, 0), ExpanderParams.for_lemma(21, 3))


def test_union_bound_examples():
    assert union_bound_sum(6, 3).value == 0
    ub = union_bound_sum(1000, 3)
    first = Fraction(1000**2 * 3**3, 6 * 1000**3)
    assert ub.terms[0] == first
    assert 0 < ub.value < 1
    assert ub.terms[0] > ub.value / 2
    # 40-digit mpmath summation
    assert float(ub.value) == pytest.approx(0.0048929228201475788088, rel=1e-12)
    assert float(union_bound_sum(10000, 4).value) == pytest.approx(0.0010855715337279945892, rel=1e-12)


@pytest.mark.parametrize("n, k", [(1000, 3), (10000, 4), (5000, 5), (266, 3), (777, 4)])
def test_union_bound_partial_sums_under_geometric_majorant(n, k):
    ub = union_bound_sum(n, k)
    for i, (term, partial) in enumerate(zip(ub.terms, ub.partial_sums()), start=1):
        assert term <= Fraction(1, 2**i)
        assert partial <= 1 - Fraction(1, 2**i)
        # intermediate step C(n,i) <= (en/i)^i, evaluated with mpmath
        bound = (mpmath.e**2 * k**3 * i / (6 * n)) ** i
        assert mpmath.mpf(term.numerator) / term.denominator <= bound
    assert ub.value < ub.majorant == 1


def test_generate_verified_trivial_and_realistic():
    V = generate_verified(3, 3, 0)
    assert V.tries == 1 and V.verdict.holds
    V = generate_verified(200, 3, 5, max_tries=20)
    assert V.verdict.holds and V.tries <= 20
    assert check_property_ii(V.graph).holds


def test_generate_verified_reports_exhaustion(monkeypatch):
    import digsplit.expander as ex

    monkeypatch.setattr(ex, "sample_k_out", lambda n, k, seed: _planted(n, seed))
    with pytest.raises(ExpanderSearchFailed) as info:
        ex.generate_verified(200, 3, 0, max_tries=3)
    assert info.value.last_verdict.witness[1] == (0, 1, 2)


def test_bipartite_format_roundtrip():
    G = sample_k_out(12, 4, 3)
    text = emit_bipartite(G)
    assert text.splitlines()[0] == "bip 12 4"
    assert parse_bipartite(text) == G
    for bad in ["", "bip 2\n", "bop 1 1\n0\n", "bip 2 2\n0 1\n", "bip 1 2\n1 0\n", "bip 1 1\n5\n"]:
        with pytest.raises(BipartiteFormatError):
            parse_bipartite(bad)
