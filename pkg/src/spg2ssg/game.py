"""Exact data model for stochastic arenas, objectives and pure strategies.

Vertices are dense integer indices ``0..n-1``. Probabilities are
:class:`fractions.Fraction` throughout; binary floats are never accepted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

__all__ = [
    "Owner",
    "Arena",
    "Parity",
    "Reachability",
    "Objective",
    "Game",
    "PureStrategy",
    "MarkovChain",
    "Violation",
    "ArenaHasNoRandomTransitions",
    "StrategyEdgeMissing",
    "InvalidGameError",
    "to_fraction",
    "validate",
    "validate_chain",
    "check_game",
    "delta_min",
    "max_denominator",
    "induce",
]


class Owner(enum.Enum):
    EVE = "eve"
    ADAM = "adam"
    RANDOM = "random"


class ArenaHasNoRandomTransitions(ValueError):
    """The arena has no random transition, so the minimum probability is undefined."""


class StrategyEdgeMissing(ValueError):
    """A strategy picks a successor that is not an edge of the arena."""


class InvalidGameError(ValueError):
    """Raised by :func:`check_game`; ``violations`` lists every broken invariant."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


def to_fraction(value) -> Fraction:
    """Convert an exact value to a Fraction.

    Accepts Fractions, ints and strings such as ``"1/10"`` or ``"0.1"``.
    Floats are rejected because their binary expansion is not the number
    the user wrote.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(value, float):
        raise TypeError(f"binary float {value!r} rejected; pass an exact string like '1/10'")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


@dataclass(frozen=True)
class Arena:
    """Stochastic arena.

    ``edges`` is normalised to a sorted tuple of distinct pairs and ``delta``
    maps ``(random_vertex, successor)`` to an exact probability. Construction
    does not validate; call :func:`validate` or :func:`check_game`.
    """

    owners: tuple
    edges: tuple
    delta: Mapping = field(default_factory=dict)
    labels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "owners", tuple(Owner(o) for o in self.owners))
        object.__setattr__(self, "edges", tuple(sorted({(int(u), int(v)) for u, v in self.edges})))
        object.__setattr__(
            self,
            "delta",
            MappingProxyType({(int(u), int(v)): to_fraction(p) for (u, v), p in dict(self.delta).items()}),
        )
        labels = tuple(self.labels)
        if not labels:
            labels = tuple(f"v{i}" for i in range(len(self.owners)))
        object.__setattr__(self, "labels", labels)

    def __hash__(self):
        return hash((self.owners, self.edges, tuple(sorted(self.delta.items()))))

    def __eq__(self, other):
        if not isinstance(other, Arena):
            return NotImplemented
        return (
            self.owners == other.owners
            and self.edges == other.edges
            and dict(self.delta) == dict(other.delta)
            and self.labels == other.labels
        )

    @property
    def n(self) -> int:
        return len(self.owners)

    @cached_property
    def successors(self) -> tuple:
        succ = [[] for _ in range(self.n)]
        for u, v in self.edges:
            if 0 <= u < self.n:
                succ[u].append(v)
        return tuple(tuple(s) for s in succ)

    def vertices_of(self, owner: Owner) -> tuple:
        owner = Owner(owner)
        return tuple(v for v, o in enumerate(self.owners) if o is owner)

    def prob(self, u: int, v: int) -> Fraction:
        return self.delta.get((u, v), Fraction(0))

    def is_markov_chain(self) -> bool:
        return all(o is Owner.RANDOM for o in self.owners)


@dataclass(frozen=True)
class Parity:
    """Eve wins iff the least priority seen infinitely often is even."""

    priorities: tuple

    def __post_init__(self):
        object.__setattr__(self, "priorities", tuple(int(p) for p in self.priorities))


@dataclass(frozen=True)
class Reachability:
    target: frozenset

    def __post_init__(self):
        object.__setattr__(self, "target", frozenset(int(t) for t in self.target))


Objective = Union[Parity, Reachability]


@dataclass(frozen=True)
class Game:
    arena: Arena
    objective: Objective

    @property
    def n(self) -> int:
        return self.arena.n


@dataclass(frozen=True)
class PureStrategy:
    """Pure memoryless strategy as a sorted tuple of ``(vertex, successor)`` pairs."""

    player: Owner
    choice: tuple

    def __post_init__(self):
        player = Owner(self.player)
        if player is Owner.RANDOM:
            raise ValueError("random vertices have no strategy")
        object.__setattr__(self, "player", player)
        pairs = self.choice.items() if isinstance(self.choice, Mapping) else self.choice
        object.__setattr__(self, "choice", tuple(sorted((int(u), int(v)) for u, v in pairs)))

    @cached_property
    def mapping(self) -> dict:
        return dict(self.choice)

    def __getitem__(self, vertex: int) -> int:
        return self.mapping[vertex]

    def __len__(self):
        return len(self.choice)

    def __iter__(self):
        return iter(self.mapping)


@dataclass(frozen=True)
class MarkovChain:
    """Finite Markov chain; ``rows[u]`` is a tuple of ``(successor, probability)``."""

    rows: tuple
    initial: int | None = None
    labels: tuple = ()

    def __post_init__(self):
        rows = tuple(
            tuple(sorted((int(v), to_fraction(p)) for v, p in row if to_fraction(p) != 0))
            for row in self.rows
        )
        object.__setattr__(self, "rows", rows)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"s{i}" for i in range(len(rows))))
        else:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self) -> int:
        return len(self.rows)

    @cached_property
    def successors(self) -> tuple:
        return tuple(tuple(v for v, _ in row) for row in self.rows)

    def prob(self, u: int, v: int) -> Fraction:
        for w, p in self.rows[u]:
            if w == v:
                return p
        return Fraction(0)

    def as_arena(self) -> Arena:
        edges = [(u, v) for u, row in enumerate(self.rows) for v, _ in row]
        delta = {(u, v): p for u, row in enumerate(self.rows) for v, p in row}
        return Arena([Owner.RANDOM] * self.n, edges, delta, self.labels)

    @classmethod
    def from_dense(cls, matrix: Sequence[Sequence], initial=None, labels=()):
        rows = [[(j, p) for j, p in enumerate(r) if to_fraction(p) != 0] for r in matrix]
        return cls(rows, initial, labels)


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    vertex: int | None = None
    edge: tuple | None = None

    def __str__(self):
        return self.message


def validate(arena: Arena, objective: Objective | None = None) -> list:
    """Return every violated arena/objective invariant; empty means valid."""
    out = []
    n = arena.n
    if n == 0:
        out.append(Violation("empty", "arena has no vertices"))
    if len(arena.labels) != n:
        out.append(Violation("labels", f"{len(arena.labels)} labels for {n} vertices"))
    for u, v in arena.edges:
        if not (0 <= u < n and 0 <= v < n):
            out.append(Violation("edge-range", f"edge ({u}, {v}) references an unknown vertex", edge=(u, v)))
    for u in range(n):
        if not arena.successors[u]:
            out.append(Violation("blocking", f"vertex {arena.labels[u]} has no successor", vertex=u))

    edge_set = set(arena.edges)
    for (u, v), p in arena.delta.items():
        if not (0 <= u < n) or arena.owners[u] is not Owner.RANDOM:
            out.append(Violation("delta-source", f"probability given on ({u}, {v}) but {u} is not random", edge=(u, v)))
        elif not (0 < p <= 1):
            out.append(Violation("delta-range", f"probability {p} on ({u}, {v}) outside (0, 1]", edge=(u, v)))
        elif (u, v) not in edge_set:
            out.append(Violation("support", f"probability on ({u}, {v}) but no such edge", edge=(u, v)))
    for u in arena.vertices_of(Owner.RANDOM):
        for v in arena.successors[u]:
            if (u, v) not in arena.delta:
                out.append(Violation("support", f"edge ({u}, {v}) from random vertex has no probability", edge=(u, v)))
        total = sum((p for (a, _), p in arena.delta.items() if a == u), Fraction(0))
        if arena.successors[u] and total != 1:
            out.append(
                Violation("distribution", f"distribution at {arena.labels[u]} sums to {total} != 1", vertex=u)
            )

    if isinstance(objective, Parity):
        if len(objective.priorities) != n:
            out.append(Violation("priority", f"{len(objective.priorities)} priorities for {n} vertices"))
        for v, p in enumerate(objective.priorities):
            if p < 0:
                out.append(Violation("priority", f"negative priority {p} at vertex {v}", vertex=v))
    elif isinstance(objective, Reachability):
        if not objective.target:
            out.append(Violation("target", "reachability target is empty"))
        for t in sorted(objective.target):
            if not 0 <= t < n:
                out.append(Violation("target", f"target {t} is not a vertex", vertex=t))
    elif objective is not None:
        out.append(Violation("objective", f"unknown objective {objective!r}"))
    return out


def validate_chain(mc: MarkovChain) -> list:
    out = []
    for u, row in enumerate(mc.rows):
        for v, p in row:
            if not 0 <= v < mc.n:
                out.append(Violation("edge-range", f"transition ({u}, {v}) leaves the chain", edge=(u, v)))
            if not 0 < p <= 1:
                out.append(Violation("delta-range", f"probability {p} on ({u}, {v})", edge=(u, v)))
        total = sum((p for _, p in row), Fraction(0))
        if total != 1:
            out.append(Violation("distribution", f"row {u} sums to {total} != 1", vertex=u))
    return out


def check_game(arena: Arena, objective: Objective | None = None) -> Game:
    """Raise :class:`InvalidGameError` unless the arena and objective are valid."""
    violations = validate(arena, objective)
    if violations:
        raise InvalidGameError(violations)
    return Game(arena, objective)


def delta_min(arena: Arena) -> Fraction:
    positive = [p for p in arena.delta.values() if p > 0]
    if not positive:
        raise ArenaHasNoRandomTransitions("arena has no random transitions")
    return min(positive)


def max_denominator(arena: Arena) -> int:
    return max((p.denominator for p in arena.delta.values()), default=1)


def _check_strategy(arena: Arena, strategy: PureStrategy | None, player: Owner) -> dict:
    owned = arena.vertices_of(player)
    choice = {} if strategy is None else strategy.mapping
    if strategy is not None and strategy.player is not player:
        raise ValueError(f"expected a strategy for {player.value}, got {strategy.player.value}")
    for u in owned:
        if u not in choice:
            raise StrategyEdgeMissing(f"{player.value} strategy has no choice at vertex {u}")
        if choice[u] not in arena.successors[u]:
            raise StrategyEdgeMissing(f"({u}, {choice[u]}) is not an edge")
    extra = set(choice) - set(owned)
    if extra:
        raise StrategyEdgeMissing(f"{player.value} strategy chooses at vertices it does not own: {sorted(extra)}")
    return choice


def induce(arena: Arena, sigma: PureStrategy | None, gamma: PureStrategy | None, initial=None) -> MarkovChain:
    """Markov chain obtained by fixing Eve's ``sigma`` and Adam's ``gamma``."""
    eve = _check_strategy(arena, sigma, Owner.EVE)
    adam = _check_strategy(arena, gamma, Owner.ADAM)
    rows = []
    for u, owner in enumerate(arena.owners):
        if owner is Owner.EVE:
            rows.append(((eve[u], Fraction(1)),))
        elif owner is Owner.ADAM:
            rows.append(((adam[u], Fraction(1)),))
        else:
            rows.append(tuple((v, arena.delta[(u, v)]) for v in arena.successors[u]))
    return MarkovChain(tuple(rows), initial, arena.labels)

