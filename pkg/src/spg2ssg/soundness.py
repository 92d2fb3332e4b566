"""Check the reduction's closed-form bounds against exact probabilities.

For every pure strategy pair of a parity game this compares, vertex by
vertex, the exact quantities of the reduced chain with their bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .game import Arena, Owner, Parity, delta_min, induce
from .markov import ParityClass, bsccs, classify_bsccs, reach_probability
from .reduction import (
    AlphaSchedule,
    bar,
    crosspath_corollary_bound,
    crosspath_lower_bound,
    interval_bounds,
    reduce,
    win_even_corollary_bound,
    win_even_lower_bound,
    win_odd_upper_bound,
)
from .solvers import DEFAULT_CAP, EnumerationCapExceeded, enumerate_strategies, strategy_count

__all__ = ["SoundnessReport", "bound_soundness"]


@dataclass
class SoundnessReport:
    """Violations are ``(check, sigma, gamma, vertex, exact, bound)`` tuples."""

    pairs: int = 0
    checks: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations

    def _record(self, name, ok, *witness):
        self.checks[name] = self.checks.get(name, 0) + 1
        if not ok:
            self.violations.append((name, *witness))


def bound_soundness(arena: Arena, priorities, alpha: AlphaSchedule, corollaries: bool = True, cap: int = DEFAULT_CAP) -> SoundnessReport:
    objective = priorities if isinstance(priorities, Parity) else Parity(priorities)
    pr = objective.priorities
    n = arena.n
    d = delta_min(arena)
    red = reduce(arena, objective, alpha)
    if strategy_count(arena, Owner.EVE) * strategy_count(arena, Owner.ADAM) > cap:
        raise EnumerationCapExceeded("too many strategy pairs")

    cross_bound = crosspath_lower_bound(n, d, alpha[0])
    cross_cor = crosspath_corollary_bound(n, d, alpha[0])
    even_lo = {}
    even_cor = {}
    for k in set(pr):
        even_lo[k] = win_even_lower_bound(n, d, alpha[k], alpha[k + 1])
        even_cor[k] = win_even_corollary_bound(n, d, alpha[k], alpha[k + 1])

    report = SoundnessReport()
    for sigma in enumerate_strategies(arena, Owner.EVE):
        sigma = sigma if len(sigma) else None
        for gamma in enumerate_strategies(arena, Owner.ADAM):
            gamma = gamma if len(gamma) else None
            report.pairs += 1
            mc = induce(arena, sigma, gamma)
            decomp = classify_bsccs(bsccs(mc), pr)
            even = decomp.union(ParityClass.EVEN)
            p_spg = reach_probability(mc, even) if even else (0,) * n

            rmc = induce(red.arena, red.lift(sigma), red.lift(gamma))
            images = [red.pbscc(b) for b in decomp.bsccs]
            cross = reach_probability(rmc, frozenset().union(*images))
            win = reach_probability(rmc, {red.win})

            y = None
            for b, cls, image in zip(decomp.bsccs, decomp.parity_classes, images):
                k = min(pr[v] for v in b)
                y = even_lo[k] if y is None else min(y, even_lo[k])
                inside = [win[x] for x in sorted(image)]
                if cls is ParityClass.EVEN:
                    lo = min(inside)
                    report._record("win_even", lo >= even_lo[k], sigma, gamma, sorted(b), lo, even_lo[k])
                    if corollaries:
                        report._record("win_even_corollary", lo >= even_cor[k], sigma, gamma, sorted(b), lo, even_cor[k])
                else:
                    hi = max(inside)
                    bound = win_odd_upper_bound(n, d, alpha[k], alpha[k + 1])
                    report._record("win_odd", hi <= bound, sigma, gamma, sorted(b), hi, bound)

            for v in range(n):
                c = cross[bar(v)]
                report._record("crosspath", c >= cross_bound, sigma, gamma, v, c, cross_bound)
                if corollaries:
                    report._record("crosspath_corollary", c >= cross_cor, sigma, gamma, v, c, cross_cor)
                lo, hi = interval_bounds(cross_bound, y, p_spg[v])
                value = win[bar(v)]
                report._record("interval", lo <= value <= hi, sigma, gamma, v, value, (lo, hi))
    return report
