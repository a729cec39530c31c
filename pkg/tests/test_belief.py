from fractions import Fraction

import pytest
from hypothesis import assume, given, settings

from halfblind import fixtures
from halfblind.belief import (
    BUDGET_EXHAUSTED,
    belief_is_idempotent,
    belief_iterate,
    belief_product,
    close_belief_monoid,
    decide,
    find_leaks,
    generators,
    unit_belief,
)
from halfblind.expr import materialize_word, to_text
from halfblind.game import enumerate_stationary
from halfblind.markov import ElemStore, NotIdempotent, from_rows, is_leak, set_closure
from halfblind.oracle import best_response

from oracles import bmat_from_mask, games, naive_belief_closure


def as_oracle(beliefs, store):
    n = store.n

    def conv(i):
        e = store[i]
        return bmat_from_mask(e.action, n), bmat_from_mask(e.support, n)

    return {frozenset(conv(m) for m in b.members) for b in beliefs}


@pytest.mark.parametrize("name", ["fig1", "fig2", "fig3_pa", "fig4_gadget"])
def test_closure_matches_naive_oracle(closures, games, name):
    beliefs, store = closures[name]
    assert as_oracle(beliefs, store) == set(naive_belief_closure(games[name]))


@settings(max_examples=40)
@given(games(max_s1=3, max_s2=3))
def test_closure_matches_naive_oracle_random(g):
    try:
        ref = naive_belief_closure(g, cap=150)
    except OverflowError:
        assume(False)
    beliefs, store = close_belief_monoid(g)
    assert as_oracle(beliefs, store) == set(ref)
    assert len({b.members for b in beliefs}) == len(beliefs)


def test_fig1_sharp_has_one_action_part(closures):
    beliefs, store = closures["fig1"]
    (sharp,) = [b for b in beliefs if to_text(b.provenance) == "(a)#"]
    actions = {store[m].action for m in sharp.members}
    assert actions == {from_rows([[0, 1], [0, 1]])}


def test_fig1_sizes(verdicts):
    v = verdicts["fig1"]
    assert (v.n_beliefs, v.n_elems) == (3, 4)
    assert find_leaks(v.closure.beliefs, v.closure.store) == []


def test_fig2_golden(verdicts):
    v = verdicts["fig2"]
    assert v.leaktight is True
    assert (v.n_beliefs, v.n_elems) == (7, 20)
    assert [to_text(b.provenance) for b in v.closure.beliefs] == [
        "a", "b", "", "aa", "ab", "(aa)#", "(aa)#b"
    ]


def test_fig3_leak_details(games, verdicts):
    g, v = games["fig3_pa"], verdicts["fig3_pa"]
    store = v.closure.store
    for leak in v.leaks:
        assert is_leak(store[leak.element]) == leak.pair
        assert leak.element in v.closure.beliefs[leak.belief].members
    assert {(g.s1[r], g.s1[t]) for _, _, (r, t) in v.leaks} == {("r", "s"), ("c", "s")}


def test_fig4_and_fig5(verdicts):
    assert verdicts["fig4_gadget"].answer == "maxmin_one"
    assert to_text(verdicts["fig4_gadget"].witness_expr) == "ba"
    assert verdicts["fig5_game"].answer == "not_leaktight"


def test_unit_laws(games):
    g = games["fig2"]
    store = ElemStore(g.n)
    a, b = generators(g, store)
    one = unit_belief(store)
    assert belief_product(one, a, store).members == a.members
    assert belief_product(a, one, store).members == a.members
    assert belief_iterate(one, store).members == one.members


def test_iterate_needs_idempotent(games):
    g = games["fig2"]
    store = ElemStore(g.n)
    a, _ = generators(g, store)
    assert not belief_is_idempotent(a, store)
    with pytest.raises(NotIdempotent):
        belief_iterate(a, store)


@pytest.mark.parametrize("name", fixtures.NAMES)
def test_generators_deduplicate(games, name):
    g = games[name]
    store = ElemStore(g.n)
    for gen in generators(g, store):
        assert 1 <= len(gen.members) <= len(enumerate_stationary(g))


@settings(max_examples=30)
@given(games(max_s1=3, max_s2=3))
def test_associativity_on_closure(g):
    beliefs, store = close_belief_monoid(g, max_beliefs=60)
    sample = beliefs[:6]
    for u in sample:
        for v in sample:
            for w in sample:
                left = belief_product(belief_product(u, v, store), w, store)
                right = belief_product(u, belief_product(v, w, store), store)
                assert left.members == right.members


def _pa_game(g):
    from halfblind.game import Game

    kernel = {k: v for k, v in g.kernel.items() if k[0] in g.s1}
    for t in g.s2:
        b = g.available(t)[0]
        kernel[(t, b)] = g.kernel[(t, b)]
    return Game(g.s1, g.s2, g.a1, g.a2, kernel, g.initial, g.finals)


@settings(max_examples=40)
@given(games(max_s1=3, max_s2=3))
def test_degenerate_pa(g):
    pa = _pa_game(g)
    beliefs, store = close_belief_monoid(pa)
    assert all(len(b.members) == 1 for b in beliefs)
    gens = [m for b in generators(pa, store) for m in b.members]
    plain = set_closure(gens + [store.unit()], store)
    direct = {m for m in plain if is_leak(store[m]) is not None}
    assert {leak.element for leak in find_leaks(beliefs, store)} == direct


def test_budget_exhaustion(games):
    v = decide(games["fig5_game"], max_beliefs=100)
    assert v.answer == BUDGET_EXHAUSTED and v.leaktight is None
    assert v.budget_hit and "belief" in v.budget_hit
    v = decide(games["fig2"], max_elems=5)
    assert v.answer == BUDGET_EXHAUSTED and "element" in v.budget_hit


@pytest.mark.parametrize("name", ["fig1", "fig2", "fig3_pa", "fig4_gadget"])
def test_parallel_closure_is_identical(closures, games, name):
    serial = closures[name]
    par = close_belief_monoid(games[name], jobs=4)
    assert [b.members for b in par.beliefs] == [b.members for b in serial.beliefs]
    assert [to_text(b.provenance) for b in par.beliefs] == [
        to_text(b.provenance) for b in serial.beliefs
    ]
    assert par.store.elems == serial.store.elems


@pytest.mark.parametrize("name", ["fig1", "fig4_gadget"])
def test_witness_soundness(games, verdicts, name):
    g, v = games[name], verdicts[name]
    assert v.answer == "maxmin_one"
    values = [best_response(g, materialize_word(v.witness_expr, n), g.initial)[0] for n in range(1, 13)]
    assert values[:8] == sorted(values[:8])
    assert max(values) > Fraction(99, 100)
