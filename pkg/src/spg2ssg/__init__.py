"""Reduce stochastic parity games to simple stochastic games and solve both exactly."""

from .game import (
    Arena,
    Game,
    MarkovChain,
    Owner,
    Parity,
    PureStrategy,
    Reachability,
    check_game,
    delta_min,
    induce,
    max_denominator,
    validate,
)
from .markov import bsccs, classify_bsccs, parity_value, reach_probability
from .reduction import AlphaSchedule, bounds_report, check_alpha, default_alpha, epsilon, reduce
from .solvers import oracle_values, separation_check, strategy_iteration, value_iteration, verify_transfer

__all__ = [
    "Arena",
    "Game",
    "MarkovChain",
    "Owner",
    "Parity",
    "PureStrategy",
    "Reachability",
    "check_game",
    "delta_min",
    "induce",
    "max_denominator",
    "validate",
    "bsccs",
    "classify_bsccs",
    "parity_value",
    "reach_probability",
    "AlphaSchedule",
    "bounds_report",
    "check_alpha",
    "default_alpha",
    "epsilon",
    "reduce",
    "oracle_values",
    "separation_check",
    "strategy_iteration",
    "value_iteration",
    "verify_transfer",
]
