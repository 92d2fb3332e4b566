"""Exact analysis of finite Markov chains.

Bottom strongly connected components, reachability probabilities via an exact
linear solve, and the parity value of a chain (probability of ending in a BSCC
whose least priority is even).
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .game import MarkovChain
from .linalg import solve

__all__ = [
    "ParityClass",
    "BsccDecomposition",
    "strongly_connected_components",
    "bsccs",
    "classify_bsccs",
    "predecessors_closure",
    "reach_probability",
    "parity_value",
    "crosspath_probability",
    "win_in_pbscc",
]


class ParityClass(enum.Enum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class BsccDecomposition:
    bsccs: tuple
    parity_classes: tuple = ()

    def __post_init__(self):
        comps = tuple(sorted((frozenset(b) for b in self.bsccs), key=min))
        object.__setattr__(self, "bsccs", comps)
        if not self.parity_classes:
            object.__setattr__(self, "parity_classes", (None,) * len(comps))

    def union(self, parity: ParityClass | None = None) -> frozenset:
        out = set()
        for b, c in zip(self.bsccs, self.parity_classes):
            if parity is None or c is parity:
                out |= b
        return frozenset(out)


def strongly_connected_components(successors: Sequence[Sequence[int]]) -> list:
    """Tarjan's algorithm with an explicit stack.

    Returns SCCs as lists, in reverse topological order (sinks first).
    """
    n = len(successors)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    out = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            succ = successors[v]
            if i < len(succ):
                work[-1] = (v, i + 1)
                w = succ[i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def bsccs(mc: MarkovChain) -> BsccDecomposition:
    succ = mc.successors
    comp_of = [0] * mc.n
    comps = strongly_connected_components(succ)
    for i, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = i
    bottom = []
    for i, comp in enumerate(comps):
        if all(comp_of[w] == i for v in comp for w in succ[v]):
            bottom.append(frozenset(comp))
    return BsccDecomposition(tuple(bottom))


def classify_bsccs(decomp: BsccDecomposition, priorities: Sequence[int]) -> BsccDecomposition:
    classes = tuple(
        ParityClass.EVEN if min(priorities[v] for v in b) % 2 == 0 else ParityClass.ODD for b in decomp.bsccs
    )
    return BsccDecomposition(decomp.bsccs, classes)


def predecessors_closure(mc: MarkovChain, target: Iterable[int]) -> set:
    """States from which ``target`` is reachable (reverse BFS)."""
    preds = [[] for _ in range(mc.n)]
    for u, row in enumerate(mc.rows):
        for v, _ in row:
            preds[v].append(u)
    seen = set(target)
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for u in preds[v]:
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return seen


def reach_probability(mc: MarkovChain, target: Iterable[int]) -> tuple:
    """Exact probability of eventually visiting ``target`` from every state."""
    target = set(target)
    can_reach = predecessors_closure(mc, target)
    unknown = sorted(can_reach - target)
    pos = {v: i for i, v in enumerate(unknown)}
    matrix = []
    rhs = []
    for v in unknown:
        row = [Fraction(0)] * len(unknown)
        row[pos[v]] = Fraction(1)
        b = Fraction(0)
        for w, p in mc.rows[v]:
            if w in target:
                b += p
            elif w in pos:
                row[pos[w]] -= p
        matrix.append(row)
        rhs.append(b)
    solution = solve(matrix, rhs) if unknown else []
    values = [Fraction(0)] * mc.n
    for v in target:
        values[v] = Fraction(1)
    for v, x in zip(unknown, solution):
        values[v] = x
    return tuple(values)


def parity_value(mc: MarkovChain, priorities: Sequence[int]) -> tuple:
    decomp = classify_bsccs(bsccs(mc), priorities)
    even = decomp.union(ParityClass.EVEN)
    if not even:
        return (Fraction(0),) * mc.n
    return reach_probability(mc, even)


def crosspath_probability(mc: MarkovChain, pbscc_vertices: Iterable[int]) -> tuple:
    """Probability of entering a pBSCC before being absorbed by a sink.

    pBSCCs only leak into the sinks, so first entry and eventual visit
    coincide and this is a plain reachability probability.
    """
    return reach_probability(mc, pbscc_vertices)


def win_in_pbscc(mc: MarkovChain, pbscc: Iterable[int], win_sink: int) -> tuple:
    """(min, max) over the pBSCC's vertices of the probability of reaching ``win_sink``."""
    pbscc = list(pbscc)
    values = reach_probability(mc, {win_sink})
    inside = [values[v] for v in pbscc]
    return min(inside), max(inside)
