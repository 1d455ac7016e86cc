import numpy as np
import pytest

from ubcount import (
    Formula,
    SolverConfig,
    Verdict,
    XorClause,
    blast_xor,
    evaluate,
    solve,
)
from ubcount.engine import Solver
from ubcount.bench import gen_random
from ubcount import bruteforce

UNLIMITED = SolverConfig(conflict_limit=None)


class TestSolve:
    def test_contradiction_unsat(self):
        assert solve(Formula.of(1, [(1,), (-1,)])).verdict is Verdict.UNSATISFIABLE

    def test_assumption_forces_other(self):
        out = solve(Formula.of(2, [(1, 2)]), assumptions=[-1])
        assert out.is_sat and out.model == {1: False, 2: True}

    def test_empty_formula_sat(self):
        out = solve(Formula(0))
        assert out.is_sat and out.model == {}

    def test_empty_clause_unsat(self):
        from ubcount.cnf import Clause

        assert solve(Formula(0, (Clause(()),))).is_unsat

    def test_rejects_native_xor(self):
        f = Formula(2, (), (XorClause.of([1, 2], True),))
        with pytest.raises(ValueError):
            solve(f)

    def test_models_are_total_and_valid(self):
        rng = np.random.default_rng(101)
        for _ in range(60):
            n = int(rng.integers(1, 14))
            f, _ = gen_random(n, int(rng.integers(1, 4 * n + 1)), 3, 0.5,
                              seed=int(rng.integers(1 << 30)))
            out = solve(f, cfg=UNLIMITED)
            if out.is_sat:
                assert set(out.model) == set(range(1, n + 1))
                assert evaluate(f, out.model)

    def test_oracle_agreement(self):
        rng = np.random.default_rng(7)
        for _ in range(150):
            n = int(rng.integers(1, 15))
            f, _ = gen_random(n, int(rng.integers(1, 5 * n + 1)),
                              int(rng.integers(1, 5)), 0.5,
                              seed=int(rng.integers(1 << 30)))
            expect = bruteforce.model_codes(f).size > 0
            assert solve(f, cfg=UNLIMITED).is_sat == expect

    def test_determinism(self):
        f, _ = gen_random(12, 40, 3, 0.5, seed=99)
        outs = [solve(f, cfg=UNLIMITED) for _ in range(3)]
        assert all(o.verdict == outs[0].verdict for o in outs)
        assert all(o.model == outs[0].model for o in outs)
        assert all(o.conflicts_used == outs[0].conflicts_used for o in outs)

    def test_budget_monotonicity(self):
        # once decided at budget b, the verdict is identical at any larger budget
        rng = np.random.default_rng(13)
        for _ in range(25):
            f, _ = gen_random(16, 70, 3, 0.5, seed=int(rng.integers(1 << 30)))
            verdicts = {}
            for b in (0, 1, 2, 5, 20, 100, 10_000):
                out = solve(f, cfg=SolverConfig(conflict_limit=b))
                verdicts[b] = out.verdict
            decided = None
            for b in sorted(verdicts):
                v = verdicts[b]
                if decided is None and v is not Verdict.UNKNOWN:
                    decided = v
                elif decided is not None:
                    assert v is decided

    def test_unknown_matches_unbudgeted_when_decided(self):
        # tight budget at the hard 3-CNF ratio: Unknown is allowed, anything
        # else must match the unlimited verdict
        rng = np.random.default_rng(21)
        unknowns = 0
        for _ in range(30):
            f, _ = gen_random(20, 84, 3, 0.5, seed=int(rng.integers(1 << 30)))
            budgeted = solve(f, cfg=SolverConfig(conflict_limit=1))
            if budgeted.verdict is Verdict.UNKNOWN:
                unknowns += 1
            else:
                assert budgeted.verdict == solve(f, cfg=UNLIMITED).verdict
        assert unknowns > 0  # the budget does bite at this density

    def test_conflicts_used_reported(self):
        f, _ = gen_random(16, 70, 3, 0.5, seed=3)
        out = solve(f, cfg=UNLIMITED)
        assert out.conflicts_used >= 0


class TestEnumeration:
    def test_projection_counts_match_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(80):
            n = int(rng.integers(1, 13))
            f, p = gen_random(n, int(rng.integers(1, 4 * n + 1)), 3,
                              float(rng.uniform(0.1, 1.0)),
                              seed=int(rng.integers(1 << 30)))
            s = Solver(f, UNLIMITED)
            cnt, complete, unknown, _ = s.count_projections(p.vars, bound=1 << 40)
            assert complete and not unknown
            assert cnt == bruteforce.count_projected(f, p.vars)

    def test_bound_stops_early(self):
        f = Formula.of(4, [])  # 16 models over 4 free vars
        s = Solver(f, UNLIMITED)
        cnt, complete, unknown, _ = s.count_projections([1, 2, 3, 4], bound=5)
        assert cnt == 5 and not complete and not unknown

    def test_truncate_restores_state(self):
        s = Solver(Formula.of(2, [(1, 2)]), UNLIMITED)
        mark = s.mark()
        s.add_clause([-1])
        s.add_clause([-2])
        assert s.solve().is_unsat
        s.truncate(mark)
        assert s.solve().is_sat


class TestBlastXor:
    def test_unit_xor(self):
        f = blast_xor(Formula(1, (), (XorClause.of([1], True),)))
        assert [c.lits for c in f.clauses] == [(1,)]
        f = blast_xor(Formula(1, (), (XorClause.of([1], False),)))
        assert [c.lits for c in f.clauses] == [(-1,)]

    def test_two_var_even_parity(self):
        f = blast_xor(Formula(2, (), (XorClause.of([1, 2], False),)))
        got = {frozenset(c.lits) for c in f.clauses}
        assert got == {frozenset({-1, 2}), frozenset({1, -2})}

    def test_six_vars_one_aux_width_four(self):
        f = blast_xor(Formula(6, (), (XorClause.of([1, 2, 3, 4, 5, 6], True),)))
        assert f.num_vars == 7
        assert all(len(c) <= 4 for c in f.clauses)
        assert len(f.clauses) == 16  # 2^(4-1) per width-4 chunk, two chunks
        # model count over the original vars is preserved: parity halves 2^6
        assert bruteforce.count_projected(f, range(1, 7)) == 32

    def test_empty_xor(self):
        t = blast_xor(Formula(0, (), (XorClause.of([], True),)))
        assert len(t.clauses) == 1 and len(t.clauses[0]) == 0
        v = blast_xor(Formula(0, (), (XorClause.of([], False),)))
        assert not v.clauses

    def test_count_preservation_random(self):
        rng = np.random.default_rng(9)
        for _ in range(60):
            n = int(rng.integers(1, 12))
            f, _ = gen_random(n, int(rng.integers(0, 2 * n + 1)), 3, 0.5,
                              seed=int(rng.integers(1 << 30)))
            xors = []
            for _ in range(int(rng.integers(1, 4))):
                k = int(rng.integers(0, n + 1))
                vs = (rng.choice(n, size=k, replace=False) + 1).tolist() if k else []
                xors.append(XorClause.of(vs, bool(rng.integers(0, 2))))
            fx = Formula(f.num_vars, f.clauses, tuple(xors))
            expect = bruteforce.count_projected(fx, range(1, n + 1))
            assert bruteforce.count_projected(blast_xor(fx), range(1, n + 1)) == expect

    def test_pure_cnf_passthrough(self):
        f = Formula.of(2, [(1, 2)])
        assert blast_xor(f).clauses == f.clauses
