"""Heavier differential checks: structured hard instances and growth paths."""

import numpy as np

from ubcount import Formula, SolverConfig, solve
from ubcount.engine import Solver
from ubcount.bench import gen_random
from ubcount import bruteforce

UNLIMITED = SolverConfig(conflict_limit=None)


def pigeonhole(holes: int) -> Formula:
    """holes+1 pigeons into holes: unsatisfiable, resistant to propagation."""
    pigeons = holes + 1

    def var(i, j):
        return i * holes + j + 1

    clauses = [tuple(var(i, j) for j in range(holes)) for i in range(pigeons)]
    for j in range(holes):
        for i1 in range(pigeons):
            for i2 in range(i1 + 1, pigeons):
                clauses.append((-var(i1, j), -var(i2, j)))
    return Formula.of(pigeons * holes, clauses)


def test_pigeonhole_unsat_with_learning():
    for holes in (4, 5, 6):
        out = solve(pigeonhole(holes), cfg=UNLIMITED)
        assert out.is_unsat
        assert out.conflicts_used > 0  # needs real search, not propagation


def test_dense_random_verdicts_and_budget_prefix():
    rng = np.random.default_rng(31337)
    for _ in range(8):
        f, _ = gen_random(18, 108, 3, 0.5, seed=int(rng.integers(1 << 30)))
        full = solve(f, cfg=UNLIMITED)
        assert full.is_sat == (bruteforce.model_codes(f).size > 0)
        # the budget only truncates the same trajectory
        half = solve(f, cfg=SolverConfig(conflict_limit=max(1, full.conflicts_used // 2)))
        if not half.is_unknown:
            assert half.verdict == full.verdict


def test_enumeration_database_growth():
    # 2^12 blocking clauses stream through the in-kernel database
    f = Formula.of(12, [])
    s = Solver(f, UNLIMITED)
    cnt, complete, unknown, _ = s.count_projections(range(1, 13), bound=1 << 20)
    assert complete and not unknown and cnt == 1 << 12


def test_enumeration_budget_partial_count():
    f, p = gen_random(16, 24, 3, 1.0, seed=8)
    s = Solver(f, UNLIMITED)
    full, complete, _, _ = s.count_projections(p.vars, bound=1 << 30)
    assert complete
    part, _, unknown, _ = s.count_projections(p.vars, bound=1 << 30, conflict_limit=3)
    if unknown:
        assert part <= full
