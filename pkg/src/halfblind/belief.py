"""The extended belief monoid and the maxmin reachability decision procedure."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .expr import Concat, Empty, Iter, Letter, WordExpr, to_text
from .game import Game, base_matrix, enumerate_stationary
from .markov import (
    DEFAULT_MAX_ELEMS,
    BudgetExceeded,
    ElemStore,
    ExtElem,
    NotIdempotent,
    ext_product,
    ext_unit,
    is_leak,
    set_closure,
)

DEFAULT_MAX_BELIEFS = 50_000

MAXMIN_ONE = "maxmin_one"
NOT_MAXMIN_ONE = "not_maxmin_one"
NOT_LEAKTIGHT = "not_leaktight"
BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class Belief:
    members: tuple[int, ...]
    provenance: WordExpr = field(compare=False)


def _concat(left: WordExpr, right: WordExpr) -> WordExpr:
    if isinstance(left, Empty):
        return right
    if isinstance(right, Empty):
        return left
    return Concat(left, right)


def _iter(child: WordExpr) -> WordExpr:
    return child if isinstance(child, Empty) else Iter(child)


def belief_product(u: Belief, v: Belief, store: ElemStore) -> Belief:
    out = {store.product(x, y) for x in u.members for y in v.members}
    return Belief(tuple(sorted(out)), _concat(u.provenance, v.provenance))


def belief_is_idempotent(u: Belief, store: ElemStore) -> bool:
    return belief_product(u, u, store).members == u.members


def belief_iterate(u: Belief, store: ElemStore) -> Belief:
    """Close {U E# V : U, E, V members, E idempotent} under product and iteration."""
    if not belief_is_idempotent(u, store):
        raise NotIdempotent("belief iteration needs an idempotent belief")
    seed = []
    for e in u.members:
        if not store.is_idempotent(e):
            continue
        e_sharp = store.iterate(e)
        for x in u.members:
            for y in u.members:
                seed.append(store.product(x, store.product(e_sharp, y)))
    return Belief(set_closure(seed, store), _iter(u.provenance))


def unit_belief(store: ElemStore) -> Belief:
    return Belief((store.unit(),), Empty())


def generators(g: Game, store: ElemStore) -> list[Belief]:
    """One belief per maximizer letter: its base matrices under every stationary table."""
    tables = enumerate_stationary(g)
    out = []
    for a in g.a1:
        ids = [store.intern(base_matrix(g, a, t)) for t in tables]
        out.append(Belief(tuple(sorted(set(ids))), Letter(a)))
    return out


class BeliefClosure(NamedTuple):
    beliefs: list[Belief]
    store: ElemStore


def _raw_products(args: tuple[list[ExtElem], list[ExtElem]]) -> list[ExtElem]:
    left, right = args
    return [ext_product(x, y) for x in left for y in right]


def _members(u: Belief, v: Belief, store: ElemStore) -> tuple[int, ...]:
    return tuple(sorted({store.product(x, y) for x in u.members for y in v.members}))


def close_belief_monoid(
    g: Game,
    max_beliefs: int = DEFAULT_MAX_BELIEFS,
    max_elems: int = DEFAULT_MAX_ELEMS,
    jobs: int = 1,
) -> BeliefClosure:
    """Least set of beliefs holding the generators and the unit, closed under
    product and iteration.

    Each belief is a product of letter beliefs and iterated beliefs, so the
    worklist right-multiplies every belief, in discovery order, by each of
    those generators.  Only an iterate not yet in the set becomes a generator
    (one already present is a product of existing generators); it is then
    applied to every belief already processed.

    With ``jobs > 1`` the raw element products of a round run on a thread pool
    and are interned afterwards in the serial order, so ids and output do not
    depend on ``jobs``.
    """
    store = ElemStore(g.n, max_elems)
    beliefs: list[Belief] = []
    index: dict[tuple[int, ...], int] = {}

    def add(members: tuple[int, ...], make_prov) -> int:
        i = index.get(members)
        if i is not None:
            return i
        if len(beliefs) >= max_beliefs:
            raise BudgetExceeded("belief", max_beliefs, len(beliefs))
        i = index[members] = len(beliefs)
        beliefs.append(Belief(members, make_prov()))
        return i

    gens: list[int] = []
    for b in generators(g, store):
        gens.append(add(b.members, lambda b=b: b.provenance))
    unit = unit_belief(store)
    add(unit.members, lambda: unit.provenance)
    gens = sorted(set(gens))

    def multiply(pairs: list[tuple[int, int]]) -> None:
        if pool is None:
            prods = [_members(beliefs[i], beliefs[j], store) for i, j in pairs]
        else:
            prods = _parallel_members([(beliefs[i], beliefs[j]) for i, j in pairs], store, pool)
        for (i, j), members in zip(pairs, prods):
            u, v = beliefs[i], beliefs[j]
            add(members, lambda: _concat(u.provenance, v.provenance))

    pool = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        k = 0
        while k < len(beliefs):
            multiply([(k, j) for j in gens])
            x = beliefs[k]
            k += 1
            if belief_is_idempotent(x, store):
                z = belief_iterate(x, store)
                if z.members not in index:
                    zi = add(z.members, lambda: z.provenance)
                    gens.append(zi)
                    multiply([(y, zi) for y in range(k)])
    finally:
        if pool is not None:
            pool.shutdown()
    return BeliefClosure(beliefs, store)


def _parallel_members(
    pairs: Sequence[tuple[Belief, Belief]], store: ElemStore, pool: ThreadPoolExecutor
) -> list[tuple[int, ...]]:
    elems = store.elems
    work = [([elems[i] for i in u.members], [elems[i] for i in v.members]) for u, v in pairs]
    raw = list(pool.map(_raw_products, work))
    out = []
    for (u, v), prods in zip(pairs, raw):
        ids = set()
        it = iter(prods)
        for x in u.members:
            for y in v.members:
                ids.add(store.record_product(x, y, next(it)))
        out.append(tuple(sorted(ids)))
    return out


def is_reachability_witness(u: Belief, store: ElemStore, s0: int, final_mask: int) -> bool:
    return all(store[m].action[s0] & ~final_mask == 0 for m in u.members)


def find_reachability_witness(
    beliefs: Sequence[Belief], store: ElemStore, s0: int, final_mask: int
) -> Belief | None:
    """First witness in discovery order.  The unit only counts when s0 is final."""
    unit = store.lookup(ext_unit(store.n))
    for b in beliefs:
        if b.members == (unit,) and not final_mask >> s0 & 1:
            continue
        if is_reachability_witness(b, store, s0, final_mask):
            return b
    return None


class Leak(NamedTuple):
    belief: int
    element: int
    pair: tuple[int, int]


def find_leaks(beliefs: Sequence[Belief], store: ElemStore) -> list[Leak]:
    """Every leaking member, reported once with the first belief containing it."""
    seen: set[int] = set()
    out = []
    for bi, b in enumerate(beliefs):
        for m in b.members:
            if m in seen:
                continue
            seen.add(m)
            w = is_leak(store[m])
            if w is not None:
                out.append(Leak(bi, m, w))
    return out


@dataclass
class Verdict:
    answer: str
    leaktight: bool | None
    leaks: list[Leak]
    witness: Belief | None
    n_beliefs: int
    n_elems: int
    budget_hit: str | None = None
    closure: BeliefClosure | None = field(default=None, repr=False, compare=False)

    @property
    def witness_expr(self) -> WordExpr | None:
        return None if self.witness is None else self.witness.provenance

    def to_dict(self, g: Game) -> dict:
        beliefs = self.closure.beliefs if self.closure else []
        pairs: list[list[str]] = []
        for leak in self.leaks:
            p = [g.s1[leak.pair[0]], g.s1[leak.pair[1]]]
            if p not in pairs:
                pairs.append(p)
        first = None
        if self.leaks:
            leak = self.leaks[0]
            first = {
                "belief": to_text(beliefs[leak.belief].provenance),
                "element": leak.element,
                "pair": [g.s1[leak.pair[0]], g.s1[leak.pair[1]]],
            }
        return {
            "answer": self.answer,
            "leaktight": self.leaktight,
            "witness_expr": None if self.witness is None else to_text(self.witness.provenance),
            "leaks": pairs,
            "first_leak": first,
            "sizes": {"beliefs": self.n_beliefs, "elements": self.n_elems},
            "budget_hit": self.budget_hit,
        }


def decide(
    g: Game,
    max_beliefs: int = DEFAULT_MAX_BELIEFS,
    max_elems: int = DEFAULT_MAX_ELEMS,
    jobs: int = 1,
) -> Verdict:
    """Closure, then leak scan, then witness search.

    A verdict on maxmin reachability is only given for leaktight games.
    """
    try:
        closure = close_belief_monoid(g, max_beliefs, max_elems, jobs)
    except BudgetExceeded as exc:
        nb, ne = (exc.size, 0) if exc.kind == "belief" else (0, exc.size)
        return Verdict(BUDGET_EXHAUSTED, None, [], None, nb, ne, budget_hit=str(exc))
    beliefs, store = closure
    leaks = find_leaks(beliefs, store)
    sizes = dict(n_beliefs=len(beliefs), n_elems=len(store))
    if leaks:
        return Verdict(NOT_LEAKTIGHT, False, leaks, None, closure=closure, **sizes)
    w = find_reachability_witness(beliefs, store, g.s1_index(g.initial), g.final_mask())
    answer = MAXMIN_ONE if w is not None else NOT_MAXMIN_ONE
    return Verdict(answer, True, [], w, closure=closure, **sizes)
