"""Command-line front end.

Exit codes for ``check``: 0 maxmin_one, 1 not_maxmin_one, 2 not_leaktight,
3 budget or resource cap hit.  Every subcommand exits 4 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence, TextIO

from .belief import (
    BUDGET_EXHAUSTED,
    DEFAULT_MAX_BELIEFS,
    MAXMIN_ONE,
    NOT_LEAKTIGHT,
    NOT_MAXMIN_ONE,
    BudgetExceeded,
    close_belief_monoid,
    belief_is_idempotent,
    decide,
)
from .expr import ExprSyntaxError, materialize_word, parse_expr, parse_word, to_text, word_text
from .game import (
    Game,
    GameError,
    base_matrix,
    enumerate_stationary,
    export_dot,
    parse_game,
    parse_strategy,
)
from .markov import DEFAULT_MAX_ELEMS, format_matrix, to_rows
from .oracle import MAX_WORD_LEN, best_response, bounded_maxmin, distribution_after

EXIT_CODES = {MAXMIN_ONE: 0, NOT_MAXMIN_ONE: 1, NOT_LEAKTIGHT: 2, BUDGET_EXHAUSTED: 3}
EXIT_RESOURCE = 3
EXIT_INPUT = 4


class InputError(Exception):
    pass


class ResourceError(Exception):
    pass


def _load(path: str) -> Game:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return parse_game(text)
    except GameError as exc:
        raise InputError(f"{path}: {exc}") from None


def _emit_json(out: TextIO, payload: dict) -> None:
    out.write(json.dumps(payload, separators=(",", ":"), ensure_ascii=False) + "\n")


def _table_text(g: Game, table: Sequence[str]) -> str:
    return " ".join(f"{t}={b}" for t, b in zip(g.s2, table))


def cmd_check(args: argparse.Namespace, out: TextIO) -> int:
    g = _load(args.game)
    v = decide(g, args.max_beliefs, args.max_elems, args.jobs)
    report = v.to_dict(g)
    if args.json:
        _emit_json(out, report)
    else:
        lt = {True: "yes", False: "no", None: "unknown"}[report["leaktight"]]
        lines = [f"leaktight: {lt}", f"answer: {report['answer']}"]
        if report["witness_expr"] is not None:
            lines.append(f"witness: {report['witness_expr']}")
        if report["leaks"]:
            lines.append("leaks: " + " ".join(f"({r},{t})" for r, t in report["leaks"]))
            first = report["first_leak"]
            lines.append(
                f"first leak: element {first['element']} of belief {first['belief']}"
                f" at ({first['pair'][0]},{first['pair'][1]})"
            )
        if report["budget_hit"]:
            lines.append(f"budget: {report['budget_hit']}")
        lines.append(f"beliefs: {report['sizes']['beliefs']}")
        lines.append(f"elements: {report['sizes']['elements']}")
        out.write("\n".join(lines) + "\n")
    return EXIT_CODES[v.answer]


def cmd_monoid(args: argparse.Namespace, out: TextIO) -> int:
    g = _load(args.game)
    try:
        beliefs, store = close_belief_monoid(g, args.max_beliefs, args.max_elems, args.jobs)
    except BudgetExceeded as exc:
        raise ResourceError(str(exc)) from None
    tables = enumerate_stationary(g)
    if args.json:
        payload: dict = {"sizes": {"beliefs": len(beliefs), "elements": len(store)}}
        if args.dump:
            payload["generators"] = [
                {
                    "letter": a,
                    "table": dict(zip(g.s2, t)),
                    "matrix": to_rows(base_matrix(g, a, t).action),
                }
                for a in g.a1
                for t in tables
            ]
            payload["beliefs"] = [
                {
                    "expr": to_text(b.provenance),
                    "members": list(b.members),
                    "idempotent": belief_is_idempotent(b, store),
                }
                for b in beliefs
            ]
            payload["elements"] = [
                {"id": i, "action": to_rows(e.action), "support": to_rows(e.support)}
                for i, e in enumerate(store.elems)
            ]
        _emit_json(out, payload)
        return 0

    out.write(f"beliefs: {len(beliefs)}\nelements: {len(store)}\n")
    if args.dump:
        out.write("states: " + " ".join(g.s1) + "\n")
        for a in g.a1:
            for t in tables:
                out.write(f"\ngenerator {a} [{_table_text(g, t)}]\n")
                out.write(format_matrix(base_matrix(g, a, t).action) + "\n")
        for i, b in enumerate(beliefs):
            expr = to_text(b.provenance) or "1"
            ids = " ".join(str(m) for m in b.members)
            out.write(f"\nbelief {i} {expr}: {ids}\n")
        for i, e in enumerate(store.elems):
            out.write(f"\nelement {i}\naction:\n{format_matrix(e.action)}\n")
            out.write(f"support:\n{format_matrix(e.support)}\n")
    return 0


def _word(g: Game, text: str) -> tuple[str, ...]:
    try:
        return g.check_word(parse_word(text, g.a1))
    except (ExprSyntaxError, GameError) as exc:
        raise InputError(str(exc)) from None


def _state(g: Game, name: str | None) -> str:
    if name is None:
        return g.initial
    if name not in g.s1:
        raise InputError(f"{name!r} is not a maximizer state")
    return name


def cmd_eval(args: argparse.Namespace, out: TextIO) -> int:
    g = _load(args.game)
    word = _word(g, args.word)
    start = _state(g, args.start)
    if args.strategy:
        try:
            text = Path(args.strategy).read_text(encoding="utf-8")
            strategy = parse_strategy(g, text, len(word))
        except OSError as exc:
            raise InputError(f"{args.strategy}: {exc.strerror}") from None
        except GameError as exc:
            raise InputError(f"{args.strategy}: {exc}") from None
    else:
        strategy = [g.default_table()] * len(word)
    dist = distribution_after(g, word, strategy, start)
    mass = sum((dist[s] for s in g.finals), Fraction(0))
    value, _ = best_response(g, word, start)
    if args.json:
        _emit_json(
            out,
            {
                "word": word_text(word),
                "from": start,
                "distribution": {s: str(p) for s, p in dist.items()},
                "final_mass": str(mass),
                "best_response": str(value),
            },
        )
    else:
        for s, p in dist.items():
            out.write(f"{s}: {p}\n")
        out.write(f"final mass: {mass}\nbest response: {value}\n")
    return 0


def cmd_maxmin(args: argparse.Namespace, out: TextIO) -> int:
    g = _load(args.game)
    start = _state(g, args.start)
    try:
        value, word = bounded_maxmin(g, start, args.max_len, len_cap=args.len_cap)
    except ValueError as exc:
        raise ResourceError(str(exc)) from None
    if args.json:
        _emit_json(
            out, {"from": start, "max_len": args.max_len, "value": str(value), "word": word_text(word)}
        )
    else:
        out.write(f"value: {value}\nword: {word_text(word)}\n")
    return 0


def cmd_materialize(args: argparse.Namespace, out: TextIO) -> int:
    alphabet = _load(args.game).a1 if args.game else None
    if args.n < 1:
        raise InputError("--n must be >= 1")
    try:
        expr = parse_expr(args.expr, alphabet)
    except ExprSyntaxError as exc:
        raise InputError(str(exc)) from None
    out.write(word_text(materialize_word(expr, args.n)) + "\n")
    return 0


def cmd_dot(args: argparse.Namespace, out: TextIO) -> int:
    out.write(export_dot(_load(args.game)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="halfblind", description="Maxmin reachability for half-blind stochastic games."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def budgets(p: argparse.ArgumentParser) -> None:
        p.add_argument("--max-beliefs", type=int, default=DEFAULT_MAX_BELIEFS)
        p.add_argument("--max-elems", type=int, default=DEFAULT_MAX_ELEMS)
        p.add_argument("--jobs", type=int, default=1, help="worker threads for the closure")

    p = sub.add_parser("check", help="decide maxmin reachability")
    p.add_argument("game")
    p.add_argument("--json", action="store_true")
    budgets(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("monoid", help="compute the extended belief monoid")
    p.add_argument("game")
    p.add_argument("--json", action="store_true")
    p.add_argument("--dump", action="store_true", help="print generators, beliefs and elements")
    budgets(p)
    p.set_defaults(func=cmd_monoid)

    p = sub.add_parser("eval", help="outcome distribution of a word against a strategy")
    p.add_argument("game")
    p.add_argument("--word", required=True)
    p.add_argument("--strategy", help="file with lines 'step <i>: <state>=<action> ...'")
    p.add_argument("--from", dest="start", help="maximizer start state (default: init)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("maxmin", help="best value over words up to a length")
    p.add_argument("game")
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--len-cap", type=int, default=MAX_WORD_LEN, help=argparse.SUPPRESS)
    p.add_argument("--from", dest="start")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_maxmin)

    p = sub.add_parser("materialize", help="n-th word of a witness expression")
    p.add_argument("--expr", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--game", help="game whose letters split the expression")
    p.set_defaults(func=cmd_materialize)

    p = sub.add_parser("dot", help="Graphviz export")
    p.add_argument("game")
    p.set_defaults(func=cmd_dot)
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except ResourceError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
