"""Maxmin reachability for half-blind stochastic games via the belief monoid."""

from .belief import Belief, Verdict, close_belief_monoid, decide
from .game import Game, parse_game

__all__ = ["Belief", "Game", "Verdict", "close_belief_monoid", "decide", "parse_game"]
