"""Gadget reduction from stochastic parity games to simple stochastic games.

Every original vertex ``v`` is split into a bar copy (keeps the owner and the
outgoing edges) and a random hat copy that every move into ``v`` passes
through. The hat copy leaks probability ``alpha[p(v)]`` to the winning sink
(even ``p(v)``) or the losing sink (odd ``p(v)``) and otherwise continues to
the bar copy.

Vertex layout of the reduced arena: ``bar(i) = 2i``, ``hat(i) = 2i + 1``,
``win = 2n``, ``lose = 2n + 1``.

The module also evaluates the closed-form bounds that make the reduction
correct: the probability of reaching a parity-BSCC image (``crosspath``),
the win probabilities inside one, the resulting value interval, the
separation constant ``epsilon`` and the conditions on the schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .game import (
    Arena,
    MarkovChain,
    Owner,
    Parity,
    PureStrategy,
    Reachability,
    check_game,
    delta_min as _delta_min,
    max_denominator,
    to_fraction,
)

__all__ = [
    "AlphaUndefinedForPriority",
    "AlphaOutOfRange",
    "DeltaMinTooLarge",
    "AlphaSchedule",
    "ReductionOutput",
    "reduce",
    "bar",
    "hat",
    "default_alpha",
    "alpha_base",
    "epsilon",
    "AlphaCheck",
    "check_alpha",
    "alpha0_max",
    "ratio_max",
    "crosspath_lower_bound",
    "crosspath_corollary_bound",
    "win_even_lower_bound",
    "win_odd_upper_bound",
    "win_even_corollary_bound",
    "interval_bounds",
    "reduction_thresholds",
    "sink_reach_lower_bound",
    "worst_case_mc",
    "BoundsReport",
    "bounds_report",
]


class AlphaUndefinedForPriority(KeyError):
    pass


class AlphaOutOfRange(ValueError):
    pass


class DeltaMinTooLarge(ValueError):
    """The bounds assume every random branch has probability at most 1/2."""


@dataclass(frozen=True)
class AlphaSchedule:
    """Sink probability per priority.

    ``kind`` is ``"geometric"`` (``alpha_k = first * ratio**k``) or
    ``"table"`` (explicit values for listed priorities only).
    """

    kind: str
    first: Fraction | None = None
    ratio: Fraction | None = None
    table: tuple = ()
    provenance: str = "user"

    def __post_init__(self):
        if self.kind == "geometric":
            object.__setattr__(self, "first", to_fraction(self.first))
            object.__setattr__(self, "ratio", to_fraction(self.ratio))
        elif self.kind == "table":
            items = self.table.items() if isinstance(self.table, Mapping) else self.table
            object.__setattr__(self, "table", tuple(sorted((int(k), to_fraction(a)) for k, a in items)))
        else:
            raise ValueError(f"unknown schedule kind {self.kind!r}")

    @classmethod
    def geometric(cls, first, ratio, provenance="user"):
        return cls("geometric", first=first, ratio=ratio, provenance=provenance)

    @classmethod
    def constant(cls, value):
        return cls("geometric", first=value, ratio=1)

    @classmethod
    def from_table(cls, values):
        return cls("table", table=values)

    def __getitem__(self, k: int) -> Fraction:
        if k < 0:
            raise AlphaUndefinedForPriority(k)
        if self.kind == "geometric":
            return self.first * self.ratio**k
        for key, value in self.table:
            if key == k:
                return value
        raise AlphaUndefinedForPriority(k)

    def defined_at(self, k: int) -> bool:
        try:
            self[k]
        except AlphaUndefinedForPriority:
            return False
        return True

    def is_strictly_decreasing(self, priorities: Sequence[int]) -> bool:
        used = sorted(set(priorities))
        return all(self[a] > self[b] for a, b in zip(used, used[1:]))


def bar(i: int) -> int:
    return 2 * i


def hat(i: int) -> int:
    return 2 * i + 1


@dataclass(frozen=True)
class ReductionOutput:
    arena: Arena
    target: frozenset
    mapping: tuple
    sinks: tuple
    alpha: AlphaSchedule
    source: Arena
    priorities: tuple

    @property
    def win(self) -> int:
        return self.sinks[0]

    @property
    def lose(self) -> int:
        return self.sinks[1]

    @property
    def objective(self) -> Reachability:
        return Reachability(self.target)

    def lift(self, strategy: PureStrategy | None) -> PureStrategy | None:
        """Map a strategy of the parity game to the reduced game."""
        if strategy is None:
            return None
        return PureStrategy(strategy.player, {bar(u): hat(v) for u, v in strategy.choice})

    def project(self, strategy: PureStrategy | None) -> PureStrategy | None:
        """Inverse of :meth:`lift`."""
        if strategy is None:
            return None
        return PureStrategy(strategy.player, {u // 2: v // 2 for u, v in strategy.choice})

    def pbscc(self, component) -> frozenset:
        """Image of an original vertex set under the gadget."""
        return frozenset(x for v in component for x in (bar(v), hat(v)))


def _priorities_of(objective) -> tuple:
    if isinstance(objective, Parity):
        return objective.priorities
    return tuple(int(p) for p in objective)


def reduce(arena: Arena, priorities, alpha: AlphaSchedule) -> ReductionOutput:
    """Build the reduced reachability game.

    ``priorities`` is a :class:`Parity` objective or a plain sequence.
    Monotonicity of ``alpha`` is not enforced so that non-compliant schedules
    can be studied; :func:`check_alpha` tests the correctness conditions.
    """
    pr = _priorities_of(priorities)
    check_game(arena, Parity(pr))
    alphas = {}
    for k in sorted(set(pr)):
        if not alpha.defined_at(k):
            raise AlphaUndefinedForPriority(k)
        a = alpha[k]
        if not 0 < a < 1:
            raise AlphaOutOfRange(f"alpha[{k}] = {a} is outside (0, 1)")
        alphas[k] = a

    n = arena.n
    win, lose = 2 * n, 2 * n + 1
    owners = []
    labels = []
    for i in range(n):
        owners += [arena.owners[i], Owner.RANDOM]
        labels += [arena.labels[i], arena.labels[i] + "^"]
    owners += [Owner.RANDOM, Owner.RANDOM]
    labels += ["win", "lose"]

    edges = []
    delta = {}
    for u, v in arena.edges:
        edges.append((bar(u), hat(v)))
        if arena.owners[u] is Owner.RANDOM:
            delta[(bar(u), hat(v))] = arena.delta[(u, v)]
    for v in range(n):
        a = alphas[pr[v]]
        sink = win if pr[v] % 2 == 0 else lose
        edges += [(hat(v), bar(v)), (hat(v), sink)]
        delta[(hat(v), bar(v))] = 1 - a
        delta[(hat(v), sink)] = a
    for s in (win, lose):
        edges.append((s, s))
        delta[(s, s)] = Fraction(1)

    reduced = Arena(owners, edges, delta, labels)
    return ReductionOutput(
        arena=reduced,
        target=frozenset({win}),
        mapping=tuple((bar(i), hat(i)) for i in range(n)),
        sinks=(win, lose),
        alpha=alpha,
        source=arena,
        priorities=pr,
    )


def alpha_base(n: int, M: int) -> int:
    """The integer ``16 (n!)^2 M^(2n^2+n) + 1``."""
    return 16 * math.factorial(n) ** 2 * M ** (2 * n * n + n) + 1


def default_alpha(n: int, M: int) -> AlphaSchedule:
    """Geometric schedule ``alpha_k = alpha_base(n, M) ** -(k+1)``."""
    if n < 1 or M < 1:
        raise ValueError("n and M must be positive")
    a0 = Fraction(1, alpha_base(n, M))
    return AlphaSchedule.geometric(a0, a0, provenance=f"default(n={n}, M={M})")


def epsilon(n: int, M: int) -> Fraction:
    """Lower bound on the gap between distinct strategy-pair values."""
    return Fraction(1, math.factorial(n) ** 2 * M ** (2 * n * n))


def _require_delta(delta_min) -> Fraction:
    d = to_fraction(delta_min)
    if not 0 < d <= Fraction(1, 2):
        raise DeltaMinTooLarge(f"delta_min = {d} is outside (0, 1/2]")
    return d


def alpha0_max(n: int, M: int, delta_min) -> Fraction:
    d = _require_delta(delta_min)
    return d**n / (8 * math.factorial(n) ** 2 * M ** (2 * n * n))


def ratio_max(n: int, M: int, delta_min) -> Fraction:
    d = _require_delta(delta_min)
    return d**n * (1 - d) / (8 * math.factorial(n) ** 2 * M ** (2 * n * n) + 1)


@dataclass(frozen=True)
class AlphaCheck:
    """Outcome of :func:`check_alpha`; ``failures`` holds ``(condition, k, value, limit)``."""

    failures: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def first(self):
        return self.failures[0] if self.failures else None

    def __bool__(self):
        return self.ok


def check_alpha(alpha: AlphaSchedule, n: int, M: int, delta_min, max_priority: int) -> AlphaCheck:
    """Check the schedule against the sufficient conditions for correctness.

    Conditions are checked in order: range of every ``alpha_k`` for
    ``k <= max_priority``, the cap on ``alpha_0``, then the ratio cap for
    ``k = 0 .. max_priority - 1``.
    """
    cap0 = alpha0_max(n, M, delta_min)
    cap_ratio = ratio_max(n, M, delta_min)
    failures = []
    values = []
    for k in range(max_priority + 1):
        a = alpha[k]
        values.append(a)
        if not 0 < a < 1:
            failures.append(("range", k, a, None))
    if values[0] > cap0:
        failures.append(("alpha0", 0, values[0], cap0))
    for k in range(max_priority):
        if values[k] <= 0:
            continue
        r = values[k + 1] / values[k]
        if r > cap_ratio:
            failures.append(("ratio", k, r, cap_ratio))
    return AlphaCheck(tuple(failures))


def crosspath_lower_bound(n: int, delta_min, alpha0) -> Fraction:
    d, a0 = to_fraction(delta_min), to_fraction(alpha0)
    x0 = d * (1 - a0)
    x1 = (1 - d) * (1 - a0)
    return (1 - x0) * x0**n / ((1 - x0) - (1 - x0**n) * x1)


def crosspath_corollary_bound(n: int, delta_min, alpha0) -> Fraction:
    """Weaker but simpler form of :func:`crosspath_lower_bound`."""
    d, a0 = to_fraction(delta_min), to_fraction(alpha0)
    q = d**n * (1 - a0) ** (n + 1)
    return q / (2 * a0 + q)


def win_even_lower_bound(n: int, delta_min, alpha_k, alpha_k1) -> Fraction:
    """Least probability of reaching the winning sink inside an even component.

    ``alpha_k`` belongs to the component's least priority and ``alpha_k1``
    to the next one.
    """
    d, ak, ak1 = to_fraction(delta_min), to_fraction(alpha_k), to_fraction(alpha_k1)
    x2 = d * (1 - ak1)
    x3 = (1 - d) * (1 - ak1)
    x4 = d * ak
    x5 = d * (1 - ak) + (1 - d) * (1 - ak1)
    t = x3
    num = (1 - ak1) * (1 - x2) * x2 ** (n - 1) * x4
    den = 1 - (x2 + x3) + x5 * x2**n + t * x2 ** (n - 1) - x5 * x2 ** (n - 1)
    return num / den


def win_odd_upper_bound(n: int, delta_min, alpha_k, alpha_k1) -> Fraction:
    return 1 - win_even_lower_bound(n, delta_min, alpha_k, alpha_k1)


def win_even_corollary_bound(n: int, delta_min, alpha_k, alpha_k1) -> Fraction:
    d = to_fraction(delta_min)
    r = to_fraction(alpha_k1) / to_fraction(alpha_k)
    q = d**n * (1 - d)
    return (q - r) / (q + r)


def interval_bounds(x, y, p_spg) -> tuple:
    """Interval containing the reduced-game value given the parity value ``p_spg``.

    ``x`` bounds the probability of reaching a component image from below,
    ``y`` the win probability inside even components (and ``1 - y`` bounds it
    from above inside odd ones).
    """
    x, y, p = to_fraction(x), to_fraction(y), to_fraction(p_spg)
    return y * p - y + x * y, p + 1 - x * y


def reduction_thresholds(eps) -> tuple:
    eps = to_fraction(eps)
    return (4 - eps) / 4, 4 / (4 + eps)


def sink_reach_lower_bound(m: int, s, k, l, alpha) -> Fraction:
    s, k, l, alpha = (to_fraction(x) for x in (s, k, l, alpha))
    t = 1 - alpha - s
    den = 1 - (s + t) + k * s ** (m + 1) + t * s**m - k * s**m
    return (1 - s) * s**m * l / den


def worst_case_mc(m: int, s, alpha) -> MarkovChain:
    """Line of ``m`` states with restarts whose target probability meets the bound.

    States ``0..m-1`` are the line, ``m`` is the frontier, ``m+1`` the target
    and ``m+2`` the leak sink.
    """
    s, alpha = to_fraction(s), to_fraction(alpha)
    if not (0 < s < 1 and 0 < alpha < 1 and s + alpha < 1):
        raise ValueError("need 0 < s, alpha and s + alpha < 1")
    if m < 1:
        raise ValueError("m must be at least 1")
    t = 1 - alpha - s
    front, target, leak = m, m + 1, m + 2
    rows = []
    for i in range(m):
        rows.append(((0, t), (i + 1, s), (leak, alpha)))
    rows.append(((0, t), (target, s), (leak, alpha)))
    rows.append(((target, Fraction(1)),))
    rows.append(((leak, Fraction(1)),))
    labels = [f"v{i + 1}" for i in range(m)] + ["vf", "vb", "vs"]
    return MarkovChain(tuple(rows), initial=0, labels=labels)


@dataclass(frozen=True)
class BoundsReport:
    n: int
    M: int
    delta_min: Fraction
    epsilon: Fraction
    alpha0_max: Fraction
    ratio_max: Fraction
    crosspath_threshold: Fraction
    win_threshold: Fraction


def bounds_report(arena: Arena) -> BoundsReport:
    """Every quantity the reduction's correctness conditions depend on."""
    n = arena.n
    M = max_denominator(arena)
    d = _require_delta(_delta_min(arena))
    eps = epsilon(n, M)
    cx, cy = reduction_thresholds(eps)
    return BoundsReport(
        n=n,
        M=M,
        delta_min=d,
        epsilon=eps,
        alpha0_max=alpha0_max(n, M, d),
        ratio_max=ratio_max(n, M, d),
        crosspath_threshold=cx,
        win_threshold=cy,
    )
