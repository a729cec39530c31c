from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halfblind.belief import unit_belief
from halfblind.expr import to_text
from halfblind.game import base_matrix
from halfblind.markov import ElemStore, identity
from halfblind.oracle import (
    best_response,
    bounded_maxmin,
    check_faithful,
    distribution_after,
    outcome_matrix,
    support_matrix,
)

from oracles import (
    brute_best_response,
    final_mass,
    game_word_strategy,
    games,
    history_dependent_value,
    history_distribution,
)


@settings(max_examples=150)
@given(game_word_strategy(max_len=5))
def test_distribution_matches_history_enumeration(case):
    g, word, strat = case
    for s0 in g.s1:
        d = distribution_after(g, word, strat, s0)
        assert d == history_distribution(g, word, strat, s0)
        assert sum(d.values()) == 1 and all(p >= 0 for p in d.values())


@settings(max_examples=120)
@given(game_word_strategy(max_len=4, max_s2=3))
def test_best_response_matches_brute_force(case):
    g, word, strat = case
    value, tau = best_response(g, word, g.initial)
    assert value == brute_best_response(g, word, g.initial)
    assert value == history_dependent_value(g, word, g.initial)
    # the returned strategy attains the value
    assert final_mass(g, distribution_after(g, word, tau, g.initial)) == value
    assert value <= final_mass(g, distribution_after(g, word, strat, g.initial))


@settings(max_examples=80)
@given(games(max_s1=3, max_s2=3), st.integers(0, 4))
def test_bounded_maxmin_is_monotone(g, L):
    v1, w1 = bounded_maxmin(g, g.initial, L)
    v2, _ = bounded_maxmin(g, g.initial, L + 1)
    assert v1 <= v2
    assert len(w1) <= L
    assert best_response(g, w1, g.initial)[0] == v1


@settings(max_examples=80)
@given(game_word_strategy(max_len=5))
def test_outcome_matrix_support(case):
    g, word, strat = case
    p = outcome_matrix(g, word, strat)
    sup = support_matrix(g, word, strat)
    assert all((sup[i] >> j & 1) == (p[i][j] > 0) for i in range(g.n) for j in range(g.n))


def test_empty_word(games):
    g = games["fig1"]
    table = g.default_table()
    assert distribution_after(g, (), [], "i") == {"i": 1, "f": 0}
    assert best_response(g, (), "f")[0] == 1
    assert support_matrix(g, (), []) == identity(2)
    assert bounded_maxmin(g, "f", 0) == (1, ())
    with pytest.raises(ValueError):
        distribution_after(g, ("a",), [], "i")
    with pytest.raises(ValueError):
        distribution_after(g, ("a",), [table], {"i": Fraction(1, 2)})


def test_fig1_values(games):
    g = games["fig1"]
    tau = [("alpha", "_")] * 3
    assert distribution_after(g, ("a",) * 3, tau, "i")["f"] == Fraction(7, 8)
    assert best_response(g, ("a",) * 8, "i")[0] == 1 - Fraction(1, 256)
    assert bounded_maxmin(g, "i", 5) == (1 - Fraction(1, 32), ("a",) * 5)


def test_fig2_values(games):
    g = games["fig2"]
    value, _ = best_response(g, ("a", "a", "b"), "i")
    assert value == Fraction(3, 16)
    assert bounded_maxmin(g, "i", 6) == (Fraction(31, 128), ("a",) * 5 + ("b",))


def test_bounded_maxmin_caps(games):
    g = games["fig2"]
    with pytest.raises(ValueError):
        bounded_maxmin(g, "i", 13)
    with pytest.raises(ValueError):
        bounded_maxmin(g, "i", 6, max_words=10)


def test_faithful_fig2_letter(closures, games):
    g = games["fig2"]
    beliefs, store = closures["fig2"]
    a = beliefs[0]
    report = check_faithful(g, a, store, 1)
    assert report.exhaustive and report.faithful
    for m in report.members:
        # each member is produced by exactly its own table
        (table,) = m.strategy
        assert store.lookup(base_matrix(g, "a", table)) == m.element
    # i reaches f through 2 only: 1/2 * 1/4
    assert sorted(m.attained_min for m in report.members) == [
        Fraction(1, 8), Fraction(1, 8), Fraction(1, 2), Fraction(1)
    ]
    assert report.mu == Fraction(1, 8)
    frontier = check_faithful(g, a, store, 1, exhaustive_limit=0)
    assert not frontier.exhaustive and frontier.faithful


def test_faithful_fig1_sharp(closures, games):
    g = games["fig1"]
    beliefs, store = closures["fig1"]
    (sharp,) = [b for b in beliefs if to_text(b.provenance) == "(a)#"]
    report = check_faithful(g, sharp, store, 6)
    assert report.faithful and report.word == ("a",) * 6
    by_strategy = {tuple(m.strategy): m.attained_min for m in report.members}
    assert by_strategy[(("alpha", "_"),) * 6] == 1 - Fraction(1, 64)


def test_faithful_unit(games):
    g = games["fig2"]
    store = ElemStore(g.n)
    report = check_faithful(g, unit_belief(store), store, 3)
    assert report.word == () and report.faithful


def test_faithful_length_cap(closures, games):
    g = games["fig1"]
    beliefs, store = closures["fig1"]
    with pytest.raises(ValueError):
        check_faithful(g, beliefs[-1], store, 100)
