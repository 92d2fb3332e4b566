"""Acceptance criteria, each at its stated tolerance.

Run ``python3 tests/test_acceptance.py`` for a standalone report, or let
pytest print the summary section at the end of the session.
"""

import functools
import math
import os
import random
import time
from fractions import Fraction as F

import pytest

from acceptance_report import record
from spg2ssg.game import Arena, Owner, Parity, PureStrategy, delta_min, induce, max_denominator
from spg2ssg.generators import exhaustive_spgs, random_spgs, random_ssg, running_example
from spg2ssg.io import serialize
from spg2ssg.markov import parity_value, reach_probability
from spg2ssg.reduction import AlphaSchedule, alpha_base, default_alpha, reduce, sink_reach_lower_bound, worst_case_mc
from spg2ssg.soundness import bound_soundness
from spg2ssg.solvers import (
    oracle_values,
    payoff_table,
    separation_check,
    strategy_iteration,
    value_iteration,
    verify_transfer,
)

# corpus sizes; the exhaustive part covers every game with n <= 2, or n <= 3
# with SPG2SSG_EXHAUSTIVE=1 (about 1.26M games at n = 3, an hour on one core)
EXHAUSTIVE_N3 = os.environ.get("SPG2SSG_EXHAUSTIVE") == "1"
RANDOM_SIZES = {4: 2000, 5: 500} if EXHAUSTIVE_N3 else {3: 3000, 4: 2000, 5: 500}
TRANSFER_GAMES = {2: 70, 3: 70, 4: 70}


@functools.lru_cache(maxsize=None)
def spg_corpus():
    games = list(exhaustive_spgs(1)) + list(exhaustive_spgs(2))
    if EXHAUSTIVE_N3:
        games += exhaustive_spgs(3)
    for n, count in RANDOM_SIZES.items():
        games += random_spgs(1000 + n, count, n)
    return games


@functools.lru_cache(maxsize=None)
def transfer_corpus():
    games = []
    for n, count in TRANSFER_GAMES.items():
        games += random_spgs(2000 + n, count, n, require_branching=False)
    return games


@functools.lru_cache(maxsize=None)
def corpus_tables():
    """Separation and determinacy results per corpus game, sharing one payoff table."""
    out = []
    for arena, parity in spg_corpus():
        table = payoff_table(arena, parity)
        try:
            res = oracle_values(arena, parity, table=table)
            determined = all(a + b == 1 for a, b in zip(res.values, res.adam_values))
        except AssertionError:
            determined = False
        out.append((determined, separation_check(arena, parity, table=table)))
    return out


def criterion_1():
    start = time.perf_counter()
    mismatches = []
    for m in range(1, 7):
        for s in (F(1, 4), F(1, 3)):
            for a in (F(1, 8), F(1, 16)):
                exact = reach_probability(worst_case_mc(m, s, a), {m + 1})[0]
                if exact != sink_reach_lower_bound(m, s, 1 - a - s, s, a):
                    mismatches.append((m, s, a))
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 1.0
    return ok, f"worst-case chain tight in 24/24 settings: {not mismatches}, {elapsed:.3f}s (< 1s)"


def criterion_2():
    games = pairs = 0
    skipped = 0
    violations = []
    for arena, parity in spg_corpus():
        if not arena.delta or delta_min(arena) > F(1, 2):
            skipped += 1
            continue
        rep = bound_soundness(arena, parity, default_alpha(arena.n, max_denominator(arena)))
        games += 1
        pairs += rep.pairs
        violations += rep.violations
    detail = (
        f"bounds sound on {games} games / {pairs} strategy pairs "
        f"({skipped} games without a branching random vertex skipped), violations={len(violations)}"
    )
    return not violations, detail


def criterion_3():
    reps = [sep for _, sep in corpus_tables()]
    bad = sum(1 for r in reps if not r.holds)
    return bad == 0, f"epsilon separation on {len(reps)} games, games with violations={bad}"


def criterion_4():
    failing = []
    converse = 0
    for arena, parity in transfer_corpus():
        rep = verify_transfer(arena, parity, default_alpha(arena.n, max_denominator(arena)))
        if not rep.holds:
            failing.append((arena, parity))
        converse += bool(rep.converse_failures)
    total = len(transfer_corpus())
    return not failing and total >= 100, (
        f"optimal strategies transfer in {total - len(failing)}/{total} games "
        f"(converse fails in {converse}, recorded only)"
    )


def criterion_5():
    flags = [d for d, _ in corpus_tables()]
    return all(flags), f"determinacy (sup-inf = inf-sup, Eve + Adam = 1) on {sum(flags)}/{len(flags)} games"


def criterion_6():
    rng = random.Random(6)
    ssgs = [random_ssg(rng, rng.randint(1, 5)) for _ in range(500)]
    exact_corpus = list(ssgs)
    for arena, parity in transfer_corpus():
        red = reduce(arena, parity, default_alpha(arena.n, max_denominator(arena)))
        exact_corpus.append((red.arena, red.objective))
    si_bad = 0
    for arena, obj in exact_corpus:
        si_bad += strategy_iteration(arena, obj).values != oracle_values(arena, obj).values

    moderate = list(ssgs)
    flat = AlphaSchedule.constant(F(1, 8))
    for arena, parity in transfer_corpus():
        red = reduce(arena, parity, flat)
        moderate.append((red.arena, red.objective))
    worst = 0.0
    for arena, obj in moderate:
        assert max(p.denominator for p in arena.delta.values()) <= 16
        exact = oracle_values(arena, obj).values
        approx = value_iteration(arena, obj, tol=1e-14).values
        worst = max(worst, max(abs(float(a) - b) for a, b in zip(exact, approx)))
    ok = si_bad == 0 and worst < 1e-9
    return ok, (
        f"SI = oracle exactly on {len(exact_corpus) - si_bad}/{len(exact_corpus)} SSGs; "
        f"VI max error {worst:.2e} (< 1e-9) on {len(moderate)} SSGs"
    )


def cycle_game(n, M):
    """n random vertices on a cycle with probabilities 1/M and (M-1)/M, priorities 0..n-1."""
    delta = {}
    for i in range(n):
        delta[(i, (i + 1) % n)] = F(1, M)
        delta[(i, i)] = 1 - F(1, M)
    return Arena([Owner.RANDOM] * n, list(delta), delta), Parity(range(n))


def criterion_7a():
    bad = []
    for n in range(2, 7):
        for M in (2, 10):
            D = alpha_base(n, M)
            sched = default_alpha(n, M)
            for k in range(n):
                den = sched[k].denominator
                if den != D ** (k + 1) or den.bit_length() > (k + 1) * D.bit_length():
                    bad.append((n, M, k))
    return not bad, "alpha_k denominator = D^(k+1) exactly, bit length <= (k+1)*bits(D), n=2..6, M in {2,10}"


def size_fit():
    rows = []
    for M in (2, 10):
        for n in range(2, 7):
            arena, parity = cycle_game(n, M)
            red = reduce(arena, parity, default_alpha(n, M))
            bits = 8 * len(serialize(red.arena, red.objective, indent=None).encode())
            rows.append((n, M, bits, bits / (n**5 * math.log2(M))))
    c = math.exp(sum(math.log(r[3]) for r in rows) / len(rows))
    spread = [r[3] / c for r in rows]
    return c, rows, spread


def criterion_7b():
    c, rows, spread = size_fit()
    ok = all(0.5 <= s <= 2 for s in spread)
    return ok, f"size fits c*n^5*log M within factor 2 (c={c:.2f}); measured/fit ranges {min(spread):.2f}..{max(spread):.2f}"


FIG5_ROWS = {
    0: {3: F(1, 10), 1: F(9, 10)},
    2: {5: F(1, 10), 1: F(9, 10)},
    4: {9: F(1, 10), 1: F(9, 10)},
    6: {11: F(1)},
    8: {11: F(1)},
    10: {7: F(1, 2), 9: F(1, 2)},
}
# hat vertex -> (bar, sink, priority)
FIG5_HATS = {1: (0, 12, 0), 3: (2, 12, 0), 5: (4, 12, 0), 7: (6, 13, 3), 9: (8, 12, 4), 11: (10, 13, 5)}


def criterion_8():
    arena, parity = running_example()
    alpha = default_alpha(6, 10)
    red = reduce(arena, parity, alpha)
    sigma, gamma = PureStrategy(Owner.EVE, {3: 5}), PureStrategy(Owner.ADAM, {4: 5})
    mc = induce(red.arena, red.lift(sigma), red.lift(gamma))
    expected = dict(FIG5_ROWS)
    for h, (b, sink, k) in FIG5_HATS.items():
        expected[h] = {b: 1 - alpha[k], sink: alpha[k]}
    expected[12] = {12: F(1)}
    expected[13] = {13: F(1)}
    got = {u: dict(row) for u, row in enumerate(mc.rows)}
    spg_value = parity_value(induce(arena, sigma, gamma), parity.priorities)
    ok = red.arena.n == 14 and len(red.arena.edges) == 27 and got == expected and spg_value == (0,) * 6
    return ok, (
        f"{red.arena.n} vertices, {len(red.arena.edges)} edges, induced chain matches edge for edge: "
        f"{got == expected}, induced parity value {set(spg_value)}"
    )


def test_worst_case_tightness():
    ok, detail = criterion_1()
    record("1", ok, detail)
    assert ok


def test_bound_soundness_sweep():
    ok, detail = criterion_2()
    record("2", ok, detail)
    assert ok


def test_epsilon_separation():
    ok, detail = criterion_3()
    record("3", ok, detail)
    assert ok


def test_optimal_strategy_transfer():
    ok, detail = criterion_4()
    record("4", ok, detail)
    assert ok


def test_determinacy():
    ok, detail = criterion_5()
    record("5", ok, detail)
    assert ok


def test_solver_agreement():
    ok, detail = criterion_6()
    record("6", ok, detail)
    assert ok


def test_alpha_bit_length():
    ok, detail = criterion_7a()
    record("7a", ok, detail)
    assert ok


@pytest.mark.xfail(
    strict=True,
    reason="reduced size grows like n^4 log M plus lower-order terms; an n^5 fit cannot stay within factor 2 over n=2..6",
)
def test_reduction_size_fit():
    ok, detail = criterion_7b()
    record("7b", ok, detail)
    assert ok


def test_running_example():
    ok, detail = criterion_8()
    record("8", ok, detail)
    assert ok


if __name__ == "__main__":
    checks = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7a", criterion_7a),
        ("7b", criterion_7b),
        ("8", criterion_8),
    ]
    for name, fn in checks:
        record(name, *fn())
