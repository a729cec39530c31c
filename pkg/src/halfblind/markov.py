"""Boolean matrices over S1, extended pairs, and closure under product and iteration.

A matrix is a tuple of row bitmasks: bit ``j`` of row ``i`` is the entry (i, j).
Tuples are immutable and hashable, which makes interning cheap.
"""

from __future__ import annotations

import threading
from typing import Iterable, NamedTuple, Sequence

BitMatrix = tuple[int, ...]

DEFAULT_MAX_ELEMS = 200_000


class BudgetExceeded(RuntimeError):
    def __init__(self, kind: str, cap: int, size: int) -> None:
        super().__init__(f"{kind} budget exhausted: cap {cap}, reached {size}")
        self.kind = kind
        self.cap = cap
        self.size = size


class NotIdempotent(ValueError):
    pass


def identity(n: int) -> BitMatrix:
    return tuple(1 << i for i in range(n))


def zero(n: int) -> BitMatrix:
    return (0,) * n


def from_rows(rows: Sequence[Sequence[int]]) -> BitMatrix:
    """Build a matrix from 0/1 rows, e.g. ``from_rows([[1, 0], [0, 1]])``."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix must be square")
    return tuple(sum(1 << j for j, x in enumerate(r) if x) for r in rows)


def to_rows(m: BitMatrix) -> list[list[int]]:
    n = len(m)
    return [[(row >> j) & 1 for j in range(n)] for row in m]


def format_matrix(m: BitMatrix) -> str:
    """One line per row, entries ``0``/``1`` separated by single spaces."""
    return "\n".join(" ".join(str(x) for x in r) for r in to_rows(m))


def mat_product(u: BitMatrix, v: BitMatrix) -> BitMatrix:
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    out = []
    for row in u:
        acc = 0
        while row:
            low = row & -row
            acc |= v[low.bit_length() - 1]
            row ^= low
        out.append(acc)
    return tuple(out)


def leq(u: BitMatrix, v: BitMatrix) -> bool:
    """Entrywise u <= v."""
    return all(a & ~b == 0 for a, b in zip(u, v))


def is_idempotent(u: BitMatrix) -> bool:
    return mat_product(u, u) == u


def recurrent_mask(u: BitMatrix) -> int:
    """Bitmask of U-recurrent states: every U-successor of t leads back to t."""
    mask = 0
    for t, row in enumerate(u):
        bit = 1 << t
        r, j, ok = row, 0, True
        while r:
            if r & 1 and not u[j] & bit:
                ok = False
                break
            r >>= 1
            j += 1
        if ok:
            mask |= bit
    return mask


def recurrent_states(u: BitMatrix) -> list[int]:
    mask = recurrent_mask(u)
    return [t for t in range(len(u)) if mask >> t & 1]


def mat_iterate(u: BitMatrix) -> BitMatrix:
    """Keep only the edges of an idempotent U that end in U-recurrent states."""
    if not is_idempotent(u):
        raise NotIdempotent("iteration is only defined on idempotent matrices")
    rec = recurrent_mask(u)
    return tuple(row & rec for row in u)


class ExtElem(NamedTuple):
    """Extended Markov monoid element: the action part and the support part."""

    action: BitMatrix
    support: BitMatrix


def ext_unit(n: int) -> ExtElem:
    one = identity(n)
    return ExtElem(one, one)


def ext_product(e1: ExtElem, e2: ExtElem) -> ExtElem:
    return ExtElem(mat_product(e1.action, e2.action), mat_product(e1.support, e2.support))


def ext_is_idempotent(e: ExtElem) -> bool:
    return is_idempotent(e.action) and is_idempotent(e.support)


def ext_iterate(e: ExtElem) -> ExtElem:
    if not ext_is_idempotent(e):
        raise NotIdempotent("iteration is only defined on idempotent pairs")
    return ExtElem(mat_iterate(e.action), e.support)


def is_leak(e: ExtElem) -> tuple[int, int] | None:
    """Least (r, r') with both U-recurrent, r -/-> r' in U but r -> r' in the support.

    Non-idempotent elements are never leaks.
    """
    if not ext_is_idempotent(e):
        return None
    u, s = e.action, e.support
    rec = recurrent_mask(u)
    for r in range(len(u)):
        if not rec >> r & 1:
            continue
        gap = s[r] & ~u[r] & rec
        if gap:
            return r, (gap & -gap).bit_length() - 1
    return None


class ElemStore:
    """Interning table for extended elements with memoized product and iteration.

    Ids are dense and handed out in allocation order.  Interning is guarded by
    a lock; deterministic ids still require callers to intern in a fixed order.
    """

    def __init__(self, n: int, max_elems: int = DEFAULT_MAX_ELEMS) -> None:
        self.n = n
        self.max_elems = max_elems
        self.elems: list[ExtElem] = []
        self._ids: dict[ExtElem, int] = {}
        self._prod: dict[tuple[int, int], int] = {}
        self._iter: dict[int, int] = {}
        self._idem: dict[int, bool] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.elems)

    def __getitem__(self, i: int) -> ExtElem:
        return self.elems[i]

    def intern(self, e: ExtElem) -> int:
        i = self._ids.get(e)
        if i is not None:
            return i
        if len(e.action) != self.n or len(e.support) != self.n:
            raise ValueError(f"dimension mismatch: store holds {self.n}x{self.n} matrices")
        with self._lock:
            i = self._ids.get(e)
            if i is None:
                if len(self.elems) >= self.max_elems:
                    raise BudgetExceeded("element", self.max_elems, len(self.elems))
                i = len(self.elems)
                self.elems.append(e)
                self._ids[e] = i
        return i

    def lookup(self, e: ExtElem) -> int | None:
        return self._ids.get(e)

    def unit(self) -> int:
        return self.intern(ext_unit(self.n))

    def product(self, i: int, j: int) -> int:
        key = (i, j)
        k = self._prod.get(key)
        if k is None:
            k = self.intern(ext_product(self.elems[i], self.elems[j]))
            self._prod[key] = k
        return k

    def record_product(self, i: int, j: int, e: ExtElem) -> int:
        """Intern a product computed elsewhere and memoize it under (i, j)."""
        k = self._prod.get((i, j))
        if k is None:
            k = self._prod[(i, j)] = self.intern(e)
        return k

    def is_idempotent(self, i: int) -> bool:
        flag = self._idem.get(i)
        if flag is None:
            flag = self._idem[i] = ext_is_idempotent(self.elems[i])
        return flag

    def iterate(self, i: int) -> int:
        k = self._iter.get(i)
        if k is None:
            k = self.intern(ext_iterate(self.elems[i]))
            self._iter[i] = k
        return k


def set_closure(xs: Iterable[int], store: ElemStore) -> tuple[int, ...]:
    """Least superset of ``xs`` closed under product and iteration, as sorted ids.

    Every element of the closure is a product of generators, where the
    generators are the seed plus every iterated idempotent found so far, so it
    suffices to right-multiply each element by each generator.  An iterate
    that is already in the set is a product of existing generators and needs
    no promotion; a new one is applied to all elements already processed.
    """
    queue = sorted(set(xs))
    seen = set(queue)
    gens = list(queue)
    k = 0

    def push(z: int) -> None:
        if z not in seen:
            seen.add(z)
            queue.append(z)

    while k < len(queue):
        x = queue[k]
        k += 1
        for g in gens:
            push(store.product(x, g))
        if store.is_idempotent(x):
            z = store.iterate(x)
            if z not in seen:
                gens.append(z)
                push(z)
                for y in queue[:k]:
                    push(store.product(y, z))
    return tuple(sorted(seen))
