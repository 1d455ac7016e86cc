"""The kernel must produce identical results compiled and interpreted."""

import json
import os
import subprocess
import sys

WORKLOAD = """
import json
import numpy as np
from ubcount import Formula, SolverConfig, solve, approx_count
from ubcount.engine import Solver
from ubcount.bench import gen_random
from ubcount._jit import JIT_ENABLED

out = {"jit": JIT_ENABLED, "runs": []}
for seed in range(6):
    f, p = gen_random(10, 28, 3, 0.6, seed=seed)
    o = solve(f, cfg=SolverConfig(conflict_limit=None))
    s = Solver(f, SolverConfig(conflict_limit=None))
    cnt, complete, unknown, conflicts = s.count_projections(p.vars, bound=1 << 30)
    out["runs"].append({
        "verdict": o.verdict.value,
        "model": None if o.model is None else sorted(o.model.items()),
        "count": cnt,
    })
f = Formula.of(11, [])
ac = approx_count(f, range(1, 11), 0.8, 0.4, rng=np.random.default_rng(2))
out["approx"] = [ac.mantissa, ac.exponent]
print(json.dumps(out, sort_keys=True))
"""


def _run(env_flag):
    env = dict(os.environ)
    env.pop("NUMBA_DISABLE_JIT", None)
    if env_flag:
        env["UBCOUNT_NO_JIT"] = "1"
    else:
        env.pop("UBCOUNT_NO_JIT", None)
    r = subprocess.run(
        [sys.executable, "-c", WORKLOAD], capture_output=True, text=True, env=env
    )
    assert r.returncode == 0, r.stderr
    return json.loads(r.stdout)


def test_fallback_matches_jit():
    jit = _run(env_flag=False)
    plain = _run(env_flag=True)
    assert jit["jit"] is True
    assert plain["jit"] is False
    assert jit["runs"] == plain["runs"]
    assert jit["approx"] == plain["approx"]
