"""Bundled example games."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from ..game import Game, parse_game

HERE = Path(__file__).parent
NAMES = ("fig1", "fig2", "fig3_pa", "fig4_gadget", "fig5_game")


def path(name: str) -> Path:
    return HERE / f"{name}.hb"


def load(name: str) -> Game:
    return parse_game(path(name).read_text(encoding="utf-8"))


def fig5_text(x1: Fraction, y1: Fraction, x2: Fraction, y2: Fraction) -> str:
    """Coin-tossing game: heads bias x1 at T (via c1), tails bias y2 at B (via c2).

    Moves not drawn in the picture lead to the sink s.
    """
    s1 = ["i", "T", "B", "TT", "TB", "BB", "BT", "m", "s", "f"]
    a1 = ["a", "c1", "c2", "R", "Rbar"]
    moves: dict[tuple[str, str], list[tuple[str, Fraction]]] = {
        ("i", "a"): [("T", Fraction(1, 2)), ("B", Fraction(1, 2))],
        ("T", "c1"): [("TT", x1), ("TB", y1)],
        ("B", "c1"): [("B", Fraction(1))],
        ("B", "c2"): [("BB", y2), ("BT", x2)],
        ("TT", "c2"): [("TT", Fraction(1))],
        ("TB", "c2"): [("TB", Fraction(1))],
        ("TT", "R"): [("T", Fraction(1))],
        ("TB", "R"): [("m", Fraction(1))],
        ("BT", "R"): [("m", Fraction(1))],
        ("BB", "R"): [("B", Fraction(1))],
        ("T", "Rbar"): [("f", Fraction(1))],
        ("B", "Rbar"): [("s", Fraction(1))],
        ("m", "Rbar"): [("i", Fraction(1))],
        ("m", "R"): [("m", Fraction(1))],
        ("m", "c1"): [("m", Fraction(1))],
        ("m", "c2"): [("m", Fraction(1))],
    }
    for a in a1:
        moves[("f", a)] = [("f", Fraction(1))]
    lines = [
        f"# Coin-tossing game with x1={x1}, y1={y1}, x2={x2}, y2={y2}.",
        "# S2 states to_<q> relay deterministically to q; undrawn moves go to the sink s.",
        "p1states " + " ".join(s1),
        "p2states " + " ".join(f"to_{q}" for q in s1),
        "p1actions " + " ".join(a1),
        "p2actions _",
        "init i",
        "final f",
    ]
    for q in s1:
        for a in a1:
            dist = moves.get((q, a), [("s", Fraction(1))])
            lines.append(f"trans {q} {a} " + " ".join(f"to_{t} {p}" for t, p in dist))
    for q in s1:
        lines.append(f"trans to_{q} _ {q} 1")
    return "\n".join(lines) + "\n"


FIG5_PARAMS = (Fraction(2, 3), Fraction(1, 3), Fraction(1, 3), Fraction(2, 3))
