"""Word expressions: letters, concatenation and iteration, plus their text form.

Text grammar::

    expr := letter | expr expr | "(" expr ")#"

When every letter is a single character, pieces are juxtaposed (``(a)#b``);
otherwise they are separated by single spaces (``(c1 c2 R)# Rbar``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence, Union


@dataclass(frozen=True)
class Empty:
    """The empty word; only the unit belief carries it."""


@dataclass(frozen=True)
class Letter:
    name: str


@dataclass(frozen=True)
class Concat:
    left: WordExpr
    right: WordExpr


@dataclass(frozen=True)
class Iter:
    child: WordExpr


WordExpr = Union[Empty, Letter, Concat, Iter]


class ExprSyntaxError(ValueError):
    pass


def letters(e: WordExpr) -> list[str]:
    match e:
        case Letter(name):
            return [name]
        case Concat(left, right):
            return letters(left) + letters(right)
        case Iter(child):
            return letters(child)
    return []


def depth(e: WordExpr) -> int:
    match e:
        case Concat(left, right):
            return 1 + max(depth(left), depth(right))
        case Iter(child):
            return 1 + depth(child)
    return 0


def to_text(e: WordExpr) -> str:
    sep = "" if all(len(x) == 1 for x in letters(e)) else " "

    def go(e: WordExpr) -> str:
        match e:
            case Letter(name):
                return name
            case Concat(left, right):
                return go(left) + sep + go(right)
            case Iter(child):
                return "(" + go(child) + ")#"
        return ""

    return go(e)


def materialize_word(e: WordExpr, n: int) -> tuple[str, ...]:
    """The n-th word of the sequence associated with an expression.

    Letters stay put, concatenation concatenates, iteration repeats n times.
    """
    if n < 1:
        raise ValueError("repetition parameter must be >= 1")
    match e:
        case Letter(name):
            return (name,)
        case Concat(left, right):
            return materialize_word(left, n) + materialize_word(right, n)
        case Iter(child):
            return materialize_word(child, n) * n
    return ()


def word_text(word: Sequence[str]) -> str:
    sep = "" if all(len(x) == 1 for x in word) else " "
    return sep.join(word)


_TOKEN = re.compile(r"\s*(?:(\()|(\)#)|([A-Za-z0-9_]+))")


def split_run(run: str, alphabet: Iterable[str] | None) -> list[str]:
    """Split a run of name characters into letters.

    Without an alphabet every character is a letter.  With one, the run is
    cut greedily by longest matching letter.
    """
    if alphabet is None:
        return list(run)
    names = sorted(set(alphabet), key=len, reverse=True)
    out, i = [], 0
    while i < len(run):
        for name in names:
            if run.startswith(name, i):
                out.append(name)
                i += len(name)
                break
        else:
            raise ExprSyntaxError(f"cannot split {run!r} into letters of {sorted(set(alphabet))}")
    return out


def parse_word(text: str, alphabet: Iterable[str] | None = None) -> tuple[str, ...]:
    alphabet = None if alphabet is None else list(alphabet)
    out: list[str] = []
    for run in text.split():
        out.extend(split_run(run, alphabet))
    return tuple(out)


def _concat(parts: list[WordExpr]) -> WordExpr:
    if not parts:
        raise ExprSyntaxError("empty expression")
    acc = parts[0]
    for p in parts[1:]:
        acc = Concat(acc, p)
    return acc


def parse_expr(text: str, alphabet: Iterable[str] | None = None) -> WordExpr:
    alphabet = None if alphabet is None else list(alphabet)
    stack: list[list[WordExpr]] = [[]]
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExprSyntaxError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group(1):
            stack.append([])
        elif m.group(2):
            if len(stack) == 1:
                raise ExprSyntaxError("unbalanced ')#'")
            inner = _concat(stack.pop())
            stack[-1].append(Iter(inner))
        else:
            stack[-1].extend(Letter(x) for x in split_run(m.group(3), alphabet))
    if len(stack) != 1:
        raise ExprSyntaxError("unclosed '('")
    return _concat(stack[0])
