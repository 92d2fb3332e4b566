"""Small game corpora: the running example, exhaustive and random games."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .game import Arena, Owner, Parity, Reachability

__all__ = [
    "running_example",
    "RUNNING_PRIORITIES",
    "distributions",
    "exhaustive_spgs",
    "random_spg",
    "random_spgs",
    "random_ssg",
]

F = Fraction
RUNNING_PRIORITIES = (0, 0, 0, 3, 4, 5)


def running_example() -> tuple:
    """Six-vertex arena with Eve at v3, Adam at v4, the rest random."""
    R, E, A = Owner.RANDOM, Owner.EVE, Owner.ADAM
    owners = [R, R, R, E, A, R]
    delta = {
        (0, 0): F(9, 10), (0, 1): F(1, 10),
        (1, 0): F(9, 10), (1, 2): F(1, 10),
        (2, 0): F(9, 10), (2, 4): F(1, 10),
        (5, 3): F(1, 2), (5, 4): F(1, 2),
    }
    edges = list(delta) + [(3, 2), (3, 5), (4, 1), (4, 3), (4, 5)]
    return Arena(owners, edges, delta), Parity(RUNNING_PRIORITIES)


def distributions(k: int, max_den: int) -> list:
    """Every distribution over ``k`` successors with denominators at most ``max_den``.

    Each is a tuple of positive Fractions summing to 1, in lexicographic order.
    """
    out = set()
    for den in range(1, max_den + 1):
        for parts in itertools.product(range(1, den + 1), repeat=k):
            if sum(parts) == den:
                out.add(tuple(F(p, den) for p in parts))
    return sorted(out)


def _vertex_options(n: int, max_out: int, max_den: int) -> list:
    """(owner, successors, probabilities) choices for one vertex."""
    opts = []
    for size in range(1, min(max_out, n) + 1):
        for succ in itertools.combinations(range(n), size):
            opts.append((Owner.EVE, succ, None))
            opts.append((Owner.ADAM, succ, None))
            for dist in distributions(size, max_den):
                opts.append((Owner.RANDOM, succ, dist))
    return opts


def _build(choices) -> Arena:
    owners, edges, delta = [], [], {}
    for u, (owner, succ, dist) in enumerate(choices):
        owners.append(owner)
        edges += [(u, v) for v in succ]
        if dist is not None:
            delta.update({(u, v): p for v, p in zip(succ, dist)})
    return Arena(owners, edges, delta)


def exhaustive_spgs(n: int, max_priority: int = 3, max_out: int = 3, max_den: int = 3):
    """Yield ``(arena, Parity)`` for every game of the given shape."""
    opts = _vertex_options(n, max_out, max_den)
    for choices in itertools.product(opts, repeat=n):
        arena = _build(choices)
        for pr in itertools.product(range(max_priority + 1), repeat=n):
            yield arena, Parity(pr)


def random_spg(
    rng: random.Random,
    n: int,
    max_priority: int = 3,
    max_out: int = 3,
    max_den: int = 3,
    require_branching: bool = True,
):
    """Draw one game.

    With ``require_branching`` (and ``n > 1``) some random vertex has two or
    more successors, so the smallest probability is at most 1/2.
    """
    opts = _vertex_options(n, max_out, max_den)
    branching = [o for o in opts if o[0] is Owner.RANDOM and len(o[1]) > 1]
    choices = [rng.choice(opts) for _ in range(n)]
    if require_branching and branching and not any(c in branching for c in choices):
        choices[rng.randrange(n)] = rng.choice(branching)
    pr = tuple(rng.randint(0, max_priority) for _ in range(n))
    return _build(choices), Parity(pr)


def random_spgs(seed: int, count: int, n: int, **kwargs) -> list:
    rng = random.Random(seed)
    return [random_spg(rng, n, **kwargs) for _ in range(count)]


def random_ssg(rng: random.Random, n: int, max_out: int = 3, max_den: int = 3):
    """Random reachability game whose last vertex is the (absorbing) target."""
    opts = _vertex_options(n, max_out, max_den)
    choices = [rng.choice(opts) for _ in range(n - 1)]
    choices.append((Owner.RANDOM, (n - 1,), (F(1),)))
    return _build(choices), Reachability({n - 1})
