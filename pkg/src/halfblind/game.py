"""Half-blind game arenas: parsing, validation, one-step semantics and DOT export.

Game file grammar (line oriented, ``#`` starts a comment)::

    p1states <name>+
    p2states <name>+
    p1actions <name>+
    p2actions <name>+
    init <s1name>
    final <s1name>*
    trans <state> <action> (<state> <prob>)+

Probabilities are exact: ``p/q`` or a decimal literal.  The order in which
names are declared fixes every index used downstream.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .markov import ExtElem

# A pure stationary minimizer choice: one action per S2 state, aligned with Game.s2.
MinimizerTable = tuple[str, ...]
# A pure time-dependent minimizer strategy, one table per word position.
TimedStrategy = Sequence[MinimizerTable]
Word = tuple[str, ...]

RESERVED_ACTION = "_"

_SECTION_KEYS = ("p1states", "p2states", "p1actions", "p2actions")


class GameError(Exception):
    """Base class for malformed game descriptions."""


class GameSyntaxError(GameError):
    def __init__(self, lineno: int, message: str) -> None:
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class GameValidationError(GameError):
    pass


@dataclass(frozen=True, eq=True)
class Game:
    s1: tuple[str, ...]
    s2: tuple[str, ...]
    a1: tuple[str, ...]
    a2: tuple[str, ...]
    # (state, action) -> ((target, probability), ...) sorted by target index
    kernel: dict[tuple[str, str], tuple[tuple[str, Fraction], ...]]
    initial: str
    finals: frozenset[str]

    def __post_init__(self) -> None:
        _validate(self)

    @property
    def n(self) -> int:
        return len(self.s1)

    def s1_index(self, state: str) -> int:
        return self.s1.index(state)

    def available(self, state: str) -> list[str]:
        """Minimizer actions available at an S2 state, in A2 order."""
        return [b for b in self.a2 if (state, b) in self.kernel]

    def final_mask(self) -> int:
        return sum(1 << i for i, s in enumerate(self.s1) if s in self.finals)

    def check_word(self, word: Sequence[str]) -> Word:
        for letter in word:
            if letter not in self.a1:
                raise GameValidationError(f"unknown maximizer action {letter!r}")
        return tuple(word)

    def check_table(self, table: Sequence[str]) -> MinimizerTable:
        if len(table) != len(self.s2):
            raise GameValidationError(
                f"table has {len(table)} entries, expected {len(self.s2)}"
            )
        for t, b in zip(self.s2, table):
            if (t, b) not in self.kernel:
                raise GameValidationError(f"action {b!r} is not available at {t!r}")
        return tuple(table)

    def default_table(self) -> MinimizerTable:
        return tuple(self.available(t)[0] for t in self.s2)


def _validate(g: Game) -> None:
    names = [*g.s1, *g.s2]
    if len(set(names)) != len(names):
        raise GameValidationError("state names must be pairwise distinct across S1 and S2")
    actions = [*g.a1, *g.a2]
    if len(set(actions)) != len(actions):
        raise GameValidationError("action names must be pairwise distinct across A1 and A2")
    if not g.s1:
        raise GameValidationError("S1 is empty")
    if not g.a1:
        raise GameValidationError("A1 is empty")
    if g.initial not in g.s1:
        raise GameValidationError(f"initial state {g.initial!r} is not in S1")
    for f in g.finals:
        if f not in g.s1:
            raise GameValidationError(f"final state {f!r} is not in S1")

    s1, s2, a1, a2 = set(g.s1), set(g.s2), set(g.a1), set(g.a2)
    for (state, action), dist in g.kernel.items():
        if state in s1:
            if action not in a1:
                raise GameValidationError(
                    f"action {action!r} at maximizer state {state!r} is not in A1"
                )
            side = s2
        elif state in s2:
            if action not in a2:
                raise GameValidationError(
                    f"action {action!r} at minimizer state {state!r} is not in A2"
                )
            side = s1
        else:
            raise GameValidationError(f"unknown state {state!r}")
        for target, p in dist:
            if target not in side:
                raise GameValidationError(
                    f"trans {state} {action}: target {target!r} is not on the opposite side"
                )
            if not 0 < p <= 1:
                raise GameValidationError(
                    f"trans {state} {action}: probability {p} outside (0,1]"
                )
        total = sum((p for _, p in dist), Fraction(0))
        if total != 1:
            raise GameValidationError(
                f"trans {state} {action}: distribution sums to {total} ≠ 1"
            )

    for s in g.s1:
        for a in g.a1:
            if (s, a) not in g.kernel:
                raise GameValidationError(f"missing maximizer action {a!r} at state {s!r}")
    for t in g.s2:
        if not any((t, b) in g.kernel for b in g.a2):
            raise GameValidationError(f"minimizer state {t!r} has no available action")


def parse_prob(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"bad probability {text!r}") from None


def parse_game(text: str) -> Game:
    """Parse and validate a game description."""
    header: dict[str, list[str]] = {}
    initial: str | None = None
    finals: list[str] | None = None
    raw: dict[tuple[str, str], list[tuple[str, Fraction]]] = {}

    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, *args = line.split()
        if key in _SECTION_KEYS:
            if key in header:
                raise GameSyntaxError(lineno, f"duplicate {key} declaration")
            if not args:
                raise GameSyntaxError(lineno, f"{key} needs at least one name")
            if len(set(args)) != len(args):
                raise GameSyntaxError(lineno, f"duplicate name in {key}")
            header[key] = args
        elif key == "init":
            if initial is not None:
                raise GameSyntaxError(lineno, "duplicate init declaration")
            if len(args) != 1:
                raise GameSyntaxError(lineno, "init takes exactly one state")
            initial = args[0]
        elif key == "final":
            if finals is not None:
                raise GameSyntaxError(lineno, "duplicate final declaration")
            finals = args
        elif key == "trans":
            if len(args) < 4 or len(args) % 2:
                raise GameSyntaxError(
                    lineno, "trans expects <state> <action> followed by (<state> <prob>) pairs"
                )
            state, action, rest = args[0], args[1], args[2:]
            if (state, action) in raw:
                raise GameSyntaxError(lineno, f"duplicate trans for ({state}, {action})")
            dist: list[tuple[str, Fraction]] = []
            for target, ptext in zip(rest[::2], rest[1::2]):
                try:
                    p = parse_prob(ptext)
                except ValueError as exc:
                    raise GameSyntaxError(lineno, str(exc)) from None
                if any(target == t for t, _ in dist):
                    raise GameSyntaxError(lineno, f"target {target!r} listed twice")
                dist.append((target, p))
            raw[(state, action)] = dist
        else:
            raise GameSyntaxError(lineno, f"unknown directive {key!r}")

    for key in _SECTION_KEYS:
        if key not in header:
            raise GameValidationError(f"missing {key} declaration")
    if initial is None:
        raise GameValidationError("missing init declaration")

    s1 = tuple(header["p1states"])
    s2 = tuple(header["p2states"])
    order = {name: i for i, name in enumerate(s1 + s2)}
    kernel: dict[tuple[str, str], tuple[tuple[str, Fraction], ...]] = {}
    for (state, action), dist in raw.items():
        for target, _ in dist:
            if target not in order:
                raise GameValidationError(
                    f"trans {state} {action}: unknown state {target!r}"
                )
        kernel[(state, action)] = tuple(sorted(dist, key=lambda tp: order[tp[0]]))

    return Game(
        s1=s1,
        s2=s2,
        a1=tuple(header["p1actions"]),
        a2=tuple(header["p2actions"]),
        kernel=kernel,
        initial=initial,
        finals=frozenset(finals or ()),
    )


def format_game(g: Game) -> str:
    """Serialize a game in the file grammar; parse_game(format_game(g)) == g."""
    lines = [
        "p1states " + " ".join(g.s1),
        "p2states " + " ".join(g.s2),
        "p1actions " + " ".join(g.a1),
        "p2actions " + " ".join(g.a2),
        f"init {g.initial}",
        " ".join(["final", *(s for s in g.s1 if s in g.finals)]),
    ]
    for state in (*g.s1, *g.s2):
        for action in (*g.a1, *g.a2):
            dist = g.kernel.get((state, action))
            if dist is None:
                continue
            pairs = " ".join(f"{t} {p}" for t, p in dist)
            lines.append(f"trans {state} {action} {pairs}")
    return "\n".join(lines) + "\n"


def enumerate_stationary(g: Game) -> list[MinimizerTable]:
    """All pure stationary minimizer tables, lexicographic over the S2 listing."""
    return [tuple(c) for c in itertools.product(*(g.available(t) for t in g.s2))]


def step_matrix(g: Game, a: str, table: MinimizerTable) -> list[list[Fraction]]:
    """Exact S1 x S1 transition matrix for one round (letter a, then the table)."""
    idx = {s: i for i, s in enumerate(g.s1)}
    choice = dict(zip(g.s2, table))
    rows = []
    for s in g.s1:
        row = [Fraction(0)] * g.n
        for t, p in g.kernel[(s, a)]:
            for u, q in g.kernel[(t, choice[t])]:
                row[idx[u]] += p * q
        rows.append(row)
    return rows


def support_rows(g: Game, a: str, table: MinimizerTable) -> tuple[int, ...]:
    """Rows of the one-round support matrix as bitmasks (bit j = S1 state j)."""
    idx = {s: i for i, s in enumerate(g.s1)}
    choice = dict(zip(g.s2, table))
    rows = []
    for s in g.s1:
        mask = 0
        for t, _ in g.kernel[(s, a)]:
            for u, _ in g.kernel[(t, choice[t])]:
                mask |= 1 << idx[u]
        rows.append(mask)
    return tuple(rows)


def base_matrix(g: Game, a: str, table: MinimizerTable) -> ExtElem:
    """Generator element (B, B) of the extended Markov monoid."""
    b = support_rows(g, a, table)
    return ExtElem(b, b)


def iter_edges(g: Game) -> Iterator[tuple[str, str, str, Fraction]]:
    for state in (*g.s1, *g.s2):
        for action in (*g.a1, *g.a2):
            for target, p in g.kernel.get((state, action), ()):
                yield state, target, action, p


_DOT_ID = re.compile(r"^(?:[A-Za-z_][A-Za-z0-9_]*|-?(?:\.[0-9]+|[0-9]+(?:\.[0-9]*)?))$")


def _dot_id(name: str) -> str:
    if _DOT_ID.match(name):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(g: Game) -> str:
    """Graphviz description: circles for S1, boxes for S2, final states doubled."""
    out = ["digraph game {", "  rankdir=LR;"]
    for s in g.s1:
        shape = "doublecircle" if s in g.finals else "circle"
        out.append(f"  {_dot_id(s)} [shape={shape}];")
    for t in g.s2:
        out.append(f"  {_dot_id(t)} [shape=box];")
    out.append("  __start [shape=point];")
    out.append(f"  __start -> {_dot_id(g.initial)};")
    for state, target, action, p in iter_edges(g):
        if action == RESERVED_ACTION and p == 1:
            attrs = ""
        else:
            label = action if p == 1 else f"{action},{p}"
            attrs = f' [label="{label}"]'
        out.append(f"  {_dot_id(state)} -> {_dot_id(target)}{attrs};")
    out.append("}")
    return "\n".join(out) + "\n"


def parse_strategy(g: Game, text: str, length: int) -> list[MinimizerTable]:
    """Read a timed minimizer strategy: ``step <i>: <s2name>=<action> ...``.

    Steps are 1-based.  Unlisted steps and states fall back to the first
    available action.
    """
    default = g.default_table()
    steps = [list(default) for _ in range(length)]
    seen: set[int] = set()
    pos = {t: i for i, t in enumerate(g.s2)}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.match(r"^step\s+(\d+)\s*:(.*)$", line)
        if not m:
            raise GameSyntaxError(lineno, "expected 'step <i>: <state>=<action> ...'")
        i = int(m.group(1))
        if not 1 <= i <= length:
            raise GameSyntaxError(lineno, f"step {i} outside 1..{length}")
        if i in seen:
            raise GameSyntaxError(lineno, f"step {i} given twice")
        seen.add(i)
        for item in m.group(2).split():
            state, sep, action = item.partition("=")
            if not sep or state not in pos:
                raise GameSyntaxError(lineno, f"bad assignment {item!r}")
            if (state, action) not in g.kernel:
                raise GameSyntaxError(
                    lineno, f"action {action!r} is not available at {state!r}"
                )
            steps[i - 1][pos[state]] = action
    return [tuple(s) for s in steps]
