"""Exact game semantics: outcome distributions, best responses, bounded maxmin.

Minimizer strategies are pure and time dependent (one stationary table per
round).  Against a blind maximizer playing a fixed word this loses nothing:
for a fixed word the minimizer faces a finite-horizon safety MDP, where such
strategies are optimal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .belief import Belief
from .expr import Empty, materialize_word
from .game import Game, MinimizerTable, enumerate_stationary, step_matrix, support_rows
from .markov import BitMatrix, ElemStore, identity, mat_product

RationalDist = dict[str, Fraction]

MAX_WORD_LEN = 12
MAX_WORDS = 1_000_000
EXHAUSTIVE_LIMIT = 10_000


def _start_vector(g: Game, start: str | Mapping[str, Fraction]) -> list[Fraction]:
    if isinstance(start, str):
        if start not in g.s1:
            raise ValueError(f"{start!r} is not a maximizer state")
        return [Fraction(s == start) for s in g.s1]
    vec = [Fraction(start.get(s, 0)) for s in g.s1]
    extra = set(start) - set(g.s1)
    if extra:
        raise ValueError(f"not maximizer states: {sorted(extra)}")
    if any(x < 0 for x in vec) or sum(vec) != 1:
        raise ValueError("initial distribution must be nonnegative and sum to 1")
    return vec


def _check_lengths(word: Sequence[str], strategy: Sequence[MinimizerTable]) -> None:
    if len(word) != len(strategy):
        raise ValueError(f"strategy has {len(strategy)} steps for a word of length {len(word)}")


def distribution_after(
    g: Game,
    word: Sequence[str],
    strategy: Sequence[MinimizerTable],
    start: str | Mapping[str, Fraction],
    *,
    before_last_choice: bool = False,
) -> RationalDist:
    """Distribution over S1 after playing ``word`` against ``strategy``.

    With ``before_last_choice`` the play stops right after the maximizer's
    last move and the distribution over S2 is returned instead.
    """
    _check_lengths(word, strategy)
    if before_last_choice and not word:
        raise ValueError("before_last_choice needs a nonempty word")
    vec = dict(zip(g.s1, _start_vector(g, start)))
    for i, (a, table) in enumerate(zip(word, strategy)):
        mid = {t: Fraction(0) for t in g.s2}
        for s, m in vec.items():
            if m:
                for t, p in g.kernel[(s, a)]:
                    mid[t] += m * p
        if before_last_choice and i == len(word) - 1:
            return mid
        choice = dict(zip(g.s2, table))
        vec = {s: Fraction(0) for s in g.s1}
        for t, m in mid.items():
            if m:
                for u, q in g.kernel[(t, choice[t])]:
                    vec[u] += m * q
    return vec


def _backup(g: Game, a: str, values: Sequence[Fraction]) -> tuple[list[Fraction], MinimizerTable]:
    """One round of backward induction: minimizer picks per S2 state, ties to A2 order."""
    idx = {s: i for i, s in enumerate(g.s1)}
    best: dict[str, Fraction] = {}
    table = []
    for t in g.s2:
        choice, value = None, None
        for b in g.available(t):
            v = sum((q * values[idx[u]] for u, q in g.kernel[(t, b)]), Fraction(0))
            if value is None or v < value:
                choice, value = b, v
        best[t] = value
        table.append(choice)
    out = [sum((p * best[t] for t, p in g.kernel[(s, a)]), Fraction(0)) for s in g.s1]
    return out, tuple(table)


def _final_vector(g: Game) -> list[Fraction]:
    return [Fraction(s in g.finals) for s in g.s1]


def best_response(
    g: Game, word: Sequence[str], s0: str
) -> tuple[Fraction, list[MinimizerTable]]:
    """inf over minimizer strategies of the probability of ending in F, and a strategy attaining it."""
    g.check_word(word)
    values = _final_vector(g)
    tables = []
    for a in reversed(word):
        values, table = _backup(g, a, values)
        tables.append(table)
    tables.reverse()
    return values[g.s1_index(s0)], tables


def bounded_maxmin(
    g: Game,
    s0: str,
    max_len: int,
    *,
    len_cap: int = MAX_WORD_LEN,
    max_words: int = MAX_WORDS,
) -> tuple[Fraction, tuple[str, ...]]:
    """Best best-response value over all words of length <= max_len.

    Ties go to the shortest word, then the lexicographically least in A1 order.
    Value vectors are shared between words with a common suffix.
    """
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    if max_len > len_cap:
        raise ValueError(f"max_len {max_len} exceeds the cap {len_cap}")
    k = len(g.a1)
    total = sum(k**n for n in range(max_len + 1))
    if total > max_words:
        raise ValueError(f"{total} words exceed the enumeration cap {max_words}")
    s = g.s1_index(s0)
    best_key: tuple | None = None
    best_word: tuple[str, ...] = ()
    best_value = Fraction(0)

    def visit(suffix: tuple[int, ...], values: list[Fraction]) -> None:
        nonlocal best_key, best_word, best_value
        key = (-values[s], len(suffix), suffix)
        if best_key is None or key < best_key:
            best_key, best_value = key, values[s]
            best_word = tuple(g.a1[i] for i in suffix)
        if len(suffix) == max_len:
            return
        for i, a in enumerate(g.a1):
            nxt, _ = _backup(g, a, values)
            visit((i,) + suffix, nxt)

    visit((), _final_vector(g))
    return best_value, best_word


def support_matrix(
    g: Game, word: Sequence[str], strategy: Sequence[MinimizerTable]
) -> BitMatrix:
    """Which (s, t) get positive probability, computed from exact distributions."""
    _check_lengths(word, strategy)
    rows = []
    for s in g.s1:
        dist = distribution_after(g, word, strategy, s)
        rows.append(sum(1 << j for j, t in enumerate(g.s1) if dist[t] > 0))
    return tuple(rows)


def _matmul(x: list[list[Fraction]], y: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(x)
    out = []
    for i in range(n):
        row = [Fraction(0)] * n
        for k, xik in enumerate(x[i]):
            if xik:
                yk = y[k]
                for j in range(n):
                    if yk[j]:
                        row[j] += xik * yk[j]
        out.append(row)
    return out


def _eye(n: int) -> list[list[Fraction]]:
    return [[Fraction(i == j) for j in range(n)] for i in range(n)]


def outcome_matrix(
    g: Game, word: Sequence[str], strategy: Sequence[MinimizerTable]
) -> list[list[Fraction]]:
    """P[s][t] = probability of ending in t from s."""
    _check_lengths(word, strategy)
    m = _eye(g.n)
    for a, table in zip(word, strategy):
        m = _matmul(m, step_matrix(g, a, table))
    return m


@dataclass
class MemberFaith:
    element: int
    strategy: list[MinimizerTable] | None
    exact: bool
    attained_min: Fraction | None


@dataclass
class FaithReport:
    word: tuple[str, ...]
    exhaustive: bool
    members: list[MemberFaith] = field(default_factory=list)

    @property
    def faithful(self) -> bool:
        return all(m.exact for m in self.members)

    @property
    def mu(self) -> Fraction | None:
        mins = [m.attained_min for m in self.members if m.attained_min is not None]
        return min(mins) if mins else None


def _attained(p: list[list[Fraction]], action: BitMatrix) -> Fraction | None:
    vals = [p[s][t] for s, row in enumerate(action) for t in range(len(action)) if row >> t & 1]
    return min(vals) if vals else None


def _support_of(p: list[list[Fraction]]) -> BitMatrix:
    return tuple(sum(1 << j for j, x in enumerate(row) if x > 0) for row in p)


def check_faithful(
    g: Game,
    u: Belief,
    store: ElemStore,
    n: int,
    *,
    exhaustive_limit: int = EXHAUSTIVE_LIMIT,
    max_len: int = 64,
) -> FaithReport:
    """Look for minimizer strategies realizing each member of ``u`` on its n-th word.

    A member (U, Us) is realized exactly when the support of the outcome equals
    Us; the attained minimum is the least probability over the entries of U.
    When ``|tables| ** len(word)`` is within ``exhaustive_limit`` every strategy
    is tried and the largest attained minimum is kept.  Otherwise strategies
    are searched at the level of supports (exact for existence; the first
    realizing strategy found is reported).
    """
    word = materialize_word(u.provenance, n) if not isinstance(u.provenance, Empty) else ()
    if len(word) > max_len:
        raise ValueError(f"word of length {len(word)} exceeds the cap {max_len}")
    tables = enumerate_stationary(g)
    exhaustive = len(tables) ** len(word) <= exhaustive_limit
    report = FaithReport(word, exhaustive)
    if exhaustive:
        candidates = _all_outcomes(g, word, tables)
        for m in u.members:
            e = store[m]
            found, best = None, None
            for strat, p in candidates:
                if _support_of(p) != e.support:
                    continue
                att = _attained(p, e.action)
                if found is None or (att is not None and (best is None or att > best)):
                    found, best = strat, att
            report.members.append(MemberFaith(m, found, found is not None, best))
    else:
        frontier = _support_frontier(g, word, tables)
        for m in u.members:
            e = store[m]
            strat = frontier.get(e.support)
            if strat is None:
                report.members.append(MemberFaith(m, None, False, None))
            else:
                p = outcome_matrix(g, word, strat)
                report.members.append(MemberFaith(m, strat, True, _attained(p, e.action)))
    return report


def _all_outcomes(
    g: Game, word: Sequence[str], tables: Sequence[MinimizerTable]
) -> list[tuple[list[MinimizerTable], list[list[Fraction]]]]:
    steps = {(a, t): step_matrix(g, a, t) for a in set(word) for t in tables}
    out = []

    def dfs(i: int, prefix: list[MinimizerTable], p: list[list[Fraction]]) -> None:
        if i == len(word):
            out.append((list(prefix), p))
            return
        for t in tables:
            prefix.append(t)
            dfs(i + 1, prefix, _matmul(p, steps[(word[i], t)]))
            prefix.pop()

    dfs(0, [], _eye(g.n))
    return out


def _support_frontier(
    g: Game, word: Sequence[str], tables: Sequence[MinimizerTable]
) -> dict[BitMatrix, list[MinimizerTable]]:
    """Reachable outcome supports, each with the first strategy producing it."""
    frontier: dict[BitMatrix, list[MinimizerTable]] = {identity(g.n): []}
    rows = {(a, t): support_rows(g, a, t) for a in set(word) for t in tables}
    for a in word:
        nxt: dict[BitMatrix, list[MinimizerTable]] = {}
        for sup, strat in frontier.items():
            for t in tables:
                m = mat_product(sup, rows[(a, t)])
                if m not in nxt:
                    nxt[m] = strat + [t]
        frontier = nxt
    return frontier


def all_strategies(g: Game, length: int) -> itertools.product:
    """Every pure time-dependent strategy of the given length."""
    return itertools.product(enumerate_stationary(g), repeat=length)
