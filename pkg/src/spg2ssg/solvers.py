"""Solvers for stochastic parity and reachability games.

* :func:`oracle_values` enumerates every pair of pure memoryless strategies
  and takes sup-inf and inf-sup literally. It is the ground truth.
* :func:`strategy_iteration` improves Eve's strategy against Adam's exact
  best response; all arithmetic is exact.
* :func:`value_iteration` is the floating point Bellman iteration.

Ties are broken by the lowest vertex index, then the lowest successor index.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .game import Arena, Owner, Parity, PureStrategy, Reachability, check_game, induce, max_denominator
from .markov import parity_value, reach_probability
from .reduction import AlphaSchedule, epsilon, reduce

__all__ = [
    "EnumerationCapExceeded",
    "DidNotConverge",
    "SolveResult",
    "PayoffTable",
    "enumerate_strategies",
    "strategy_count",
    "payoff_table",
    "pair_values",
    "oracle_values",
    "optimal_strategies",
    "value_iteration",
    "strategy_iteration",
    "TransferReport",
    "verify_transfer",
    "SeparationReport",
    "separation_check",
]

DEFAULT_CAP = 10**6


class EnumerationCapExceeded(RuntimeError):
    pass


class DidNotConverge(RuntimeError):
    """Value iteration hit ``max_iters``; the partial result is on ``.result``."""

    def __init__(self, message, result):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class SolveResult:
    values: tuple
    eve_strategy: PureStrategy
    adam_strategy: PureStrategy
    method: str
    iterations: int = 0
    exact: bool = True
    adam_values: tuple | None = None
    converged: bool = True


def enumerate_strategies(arena: Arena, player: Owner) -> Iterator[PureStrategy]:
    """All pure memoryless strategies of ``player`` in lexicographic order."""
    player = Owner(player)
    owned = arena.vertices_of(player)
    for picks in itertools.product(*(arena.successors[u] for u in owned)):
        yield PureStrategy(player, tuple(zip(owned, picks)))


def strategy_count(arena: Arena, player: Owner) -> int:
    return math.prod(len(arena.successors[u]) for u in arena.vertices_of(player))


def pair_values(arena: Arena, objective, sigma, gamma) -> tuple:
    """Exact value vector of one strategy pair."""
    mc = induce(arena, sigma, gamma)
    if isinstance(objective, Parity):
        return parity_value(mc, objective.priorities)
    return reach_probability(mc, objective.target)


@dataclass(frozen=True)
class PayoffTable:
    eve: tuple
    adam: tuple
    values: tuple  # values[i][j] is the vector for (eve[i], adam[j])

    def lower(self, i: int) -> tuple:
        """Vertexwise guarantee of Eve's i-th strategy."""
        return tuple(map(min, zip(*self.values[i])))

    def upper(self, j: int) -> tuple:
        """Vertexwise guarantee of Adam's j-th strategy."""
        return tuple(map(max, zip(*(row[j] for row in self.values))))


def payoff_table(arena: Arena, objective, cap: int = DEFAULT_CAP) -> PayoffTable:
    pairs = strategy_count(arena, Owner.EVE) * strategy_count(arena, Owner.ADAM)
    if pairs > cap:
        raise EnumerationCapExceeded(f"{pairs} strategy pairs exceed the cap of {cap}")
    check_game(arena, objective)
    eve = tuple(enumerate_strategies(arena, Owner.EVE))
    adam = tuple(enumerate_strategies(arena, Owner.ADAM))
    values = tuple(tuple(pair_values(arena, objective, s, g) for g in adam) for s in eve)
    return PayoffTable(eve, adam, values)


def oracle_values(arena: Arena, objective, cap: int = DEFAULT_CAP, table: PayoffTable | None = None) -> SolveResult:
    """Exact game values by exhaustive enumeration.

    Computes ``sup_sigma inf_gamma`` and ``inf_gamma sup_sigma`` vertexwise and
    checks they agree. The witnesses are the first strategies (in enumeration
    order) that attain the value at every vertex.
    """
    table = table or payoff_table(arena, objective, cap)
    lowers = [table.lower(i) for i in range(len(table.eve))]
    uppers = [table.upper(j) for j in range(len(table.adam))]
    sup_inf = tuple(map(max, zip(*lowers)))
    inf_sup = tuple(map(min, zip(*uppers)))
    if sup_inf != inf_sup:
        raise AssertionError(f"determinacy violated: {sup_inf} != {inf_sup}")
    eve = next(s for s, lo in zip(table.eve, lowers) if lo == sup_inf)
    adam = next(g for g, up in zip(table.adam, uppers) if up == inf_sup)
    return SolveResult(
        values=sup_inf,
        eve_strategy=eve,
        adam_strategy=adam,
        method="oracle",
        iterations=len(table.eve) * len(table.adam),
        adam_values=tuple(1 - x for x in inf_sup),
    )


def optimal_strategies(table: PayoffTable, values: tuple) -> tuple:
    """(Eve strategies, Adam strategies) that attain ``values`` at every vertex."""
    eve = tuple(s for i, s in enumerate(table.eve) if table.lower(i) == values)
    adam = tuple(g for j, g in enumerate(table.adam) if table.upper(j) == values)
    return eve, adam


def _require_reachability(objective):
    if not isinstance(objective, Reachability):
        raise TypeError("this solver needs a reachability objective")
    return objective.target


def _argbest(succ, x, better):
    best = succ[0]
    for w in succ[1:]:
        if better(x[w], x[best]):
            best = w
    return best


def value_iteration(arena: Arena, objective, tol: float = 1e-12, max_iters: int = 1_000_000) -> SolveResult:
    """Floating point Bellman iteration from the target indicator.

    Raises :class:`DidNotConverge` carrying the partial result when the
    sup-norm change is still at least ``tol`` after ``max_iters`` sweeps.
    """
    target = _require_reachability(objective)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    check_game(arena, objective)
    succ = arena.successors
    owners = arena.owners
    probs = [[float(arena.delta[(u, v)]) for v in succ[u]] if owners[u] is Owner.RANDOM else None for u in range(arena.n)]
    x = [1.0 if v in target else 0.0 for v in range(arena.n)]
    converged = False
    it = 0
    while it < max_iters:
        it += 1
        y = list(x)
        for u in range(arena.n):
            if u in target:
                continue
            if owners[u] is Owner.EVE:
                y[u] = max(x[w] for w in succ[u])
            elif owners[u] is Owner.ADAM:
                y[u] = min(x[w] for w in succ[u])
            else:
                y[u] = math.fsum(p * x[w] for p, w in zip(probs[u], succ[u]))
        change = max((abs(a - b) for a, b in zip(x, y)), default=0.0)
        x = y
        if change < tol:
            converged = True
            break
    eve = PureStrategy(Owner.EVE, {u: _argbest(succ[u], x, lambda a, b: a > b) for u in arena.vertices_of(Owner.EVE)})
    adam = PureStrategy(
        Owner.ADAM, {u: _argbest(succ[u], x, lambda a, b: a < b) for u in arena.vertices_of(Owner.ADAM)}
    )
    result = SolveResult(tuple(x), eve, adam, "vi", it, exact=False, converged=converged)
    if not converged:
        raise DidNotConverge(f"no convergence after {max_iters} iterations", result)
    return result


def _zero_set(arena: Arena, target, eve_choice: dict) -> set:
    """Vertices from which Adam can keep the reach probability at 0 (Eve fixed)."""
    succ = arena.successors
    alive = set(range(arena.n)) - set(target)
    changed = True
    while changed:
        changed = False
        for u in sorted(alive):
            owner = arena.owners[u]
            if owner is Owner.EVE:
                keep = eve_choice[u] in alive
            elif owner is Owner.ADAM:
                keep = any(w in alive for w in succ[u])
            else:
                keep = all(w in alive for w in succ[u])
            if not keep:
                alive.discard(u)
                changed = True
    return alive


def _best_response(arena: Arena, target, sigma: PureStrategy | None) -> tuple:
    """Adam's exact best response to ``sigma`` by policy iteration."""
    succ = arena.successors
    eve_choice = {} if sigma is None else sigma.mapping
    zero = _zero_set(arena, target, eve_choice)
    adam_vertices = arena.vertices_of(Owner.ADAM)
    choice = {}
    for u in adam_vertices:
        inside = [w for w in succ[u] if w in zero]
        choice[u] = inside[0] if u in zero else succ[u][0]
    rounds = 0
    while True:
        rounds += 1
        gamma = PureStrategy(Owner.ADAM, choice) if adam_vertices else None
        x = reach_probability(induce(arena, sigma, gamma), target)
        changed = False
        for u in adam_vertices:
            if u in zero:
                continue
            best = _argbest(succ[u], x, lambda a, b: a < b)
            if x[best] < x[choice[u]]:
                choice[u] = best
                changed = True
        if not changed:
            return x, gamma, rounds


def strategy_iteration(arena: Arena, objective, max_rounds: int = 100_000) -> SolveResult:
    """Exact strategy improvement for Eve against Adam's best response.

    Eve switches only where a successor is strictly better under the current
    values, keeping her choice on ties. The returned Adam strategy is the
    value-greedy one, which is optimal for the safety player.
    """
    target = _require_reachability(objective)
    check_game(arena, objective)
    succ = arena.successors
    eve_vertices = arena.vertices_of(Owner.EVE)
    choice = {u: succ[u][0] for u in eve_vertices}
    rounds = 0
    while True:
        rounds += 1
        if rounds > max_rounds:
            raise RuntimeError("strategy iteration did not terminate")
        sigma = PureStrategy(Owner.EVE, choice) if eve_vertices else None
        x, _, _ = _best_response(arena, target, sigma)
        changed = False
        for u in eve_vertices:
            best = _argbest(succ[u], x, lambda a, b: a > b)
            if x[best] > x[choice[u]]:
                choice[u] = best
                changed = True
        if not changed:
            break
    eve = PureStrategy(Owner.EVE, choice)
    adam = PureStrategy(
        Owner.ADAM, {u: _argbest(succ[u], x, lambda a, b: a < b) for u in arena.vertices_of(Owner.ADAM)}
    )
    return SolveResult(tuple(x), eve, adam, "si", rounds, adam_values=tuple(1 - v for v in x))


@dataclass(frozen=True)
class TransferReport:
    """Optimal strategies of the reduced game checked for optimality in the parity game.

    ``failures`` holds ``(player, strategy, reduced_guarantee, parity_guarantee)``
    for every counterexample. ``converse_failures`` lists parity-optimal
    strategies whose lift is not optimal in the reduced game; these are
    recorded only.
    """

    spg_values: tuple
    ssg_values: tuple
    eve_optimal: int
    adam_optimal: int
    failures: tuple = ()
    converse_failures: tuple = ()

    @property
    def holds(self) -> bool:
        return not self.failures


def verify_transfer(arena: Arena, priorities, alpha: AlphaSchedule, cap: int = DEFAULT_CAP) -> TransferReport:
    objective = priorities if isinstance(priorities, Parity) else Parity(priorities)
    red = reduce(arena, objective, alpha)
    spg_table = payoff_table(arena, objective, cap)
    ssg_table = payoff_table(red.arena, red.objective, cap)
    spg_values = oracle_values(arena, objective, table=spg_table).values
    ssg_values = oracle_values(red.arena, red.objective, table=ssg_table).values

    # Both enumerations run in the same vertex/successor order, so index i of
    # one table is the lift of index i of the other.
    failures = []
    for i, s in enumerate(ssg_table.eve):
        lo = ssg_table.lower(i)
        if lo == ssg_values and spg_table.lower(i) != spg_values:
            failures.append(("eve", red.project(s), lo, spg_table.lower(i)))
    for j, g in enumerate(ssg_table.adam):
        up = ssg_table.upper(j)
        if up == ssg_values and spg_table.upper(j) != spg_values:
            failures.append(("adam", red.project(g), up, spg_table.upper(j)))
    converse = []
    for i, s in enumerate(spg_table.eve):
        if spg_table.lower(i) == spg_values and ssg_table.lower(i) != ssg_values:
            converse.append(("eve", s))
    for j, g in enumerate(spg_table.adam):
        if spg_table.upper(j) == spg_values and ssg_table.upper(j) != ssg_values:
            converse.append(("adam", g))
    eve_opt, adam_opt = optimal_strategies(ssg_table, ssg_values)
    return TransferReport(
        spg_values=spg_values,
        ssg_values=ssg_values,
        eve_optimal=len(eve_opt),
        adam_optimal=len(adam_opt),
        failures=tuple(failures),
        converse_failures=tuple(converse),
    )


@dataclass(frozen=True)
class SeparationReport:
    epsilon: Fraction
    min_gap: Fraction | None
    violations: tuple = field(default=())

    @property
    def holds(self) -> bool:
        return not self.violations


def separation_check(arena: Arena, priorities, cap: int = DEFAULT_CAP, table: PayoffTable | None = None) -> SeparationReport:
    """Check that distinct strategy-pair values differ by more than epsilon."""
    objective = priorities if isinstance(priorities, Parity) else Parity(priorities)
    table = table or payoff_table(arena, objective, cap)
    eps = epsilon(arena.n, max_denominator(arena))
    min_gap = None
    violations = []
    for v in range(arena.n):
        distinct = sorted({row[j][v] for row in table.values for j in range(len(row))})
        for a, b in zip(distinct, distinct[1:]):
            gap = b - a
            if min_gap is None or gap < min_gap:
                min_gap = gap
            if gap <= eps:
                violations.append((v, a, b))
    return SeparationReport(eps, min_gap, tuple(violations))
