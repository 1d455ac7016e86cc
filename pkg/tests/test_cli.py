import json
import subprocess
import sys

import pytest

from ubcount import emit_dimacs, parse_dimacs
from ubcount.bench import gen_theorem1, par2, read_records
from ubcount.cli import DEFAULTS


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "ubcount", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


@pytest.fixture(scope="module")
def t1n4_file(tmp_path_factory):
    inst = gen_theorem1(4)
    path = tmp_path_factory.mktemp("cnf") / "t1n4.cnf"
    path.write_text(emit_dimacs(inst.formula, inst.projection))
    return str(path)


@pytest.fixture(scope="module")
def t1n8_file(tmp_path_factory):
    inst = gen_theorem1(8)
    path = tmp_path_factory.mktemp("cnf") / "t1n8.cnf"
    path.write_text(emit_dimacs(inst.formula, inst.projection))
    return str(path)


@pytest.fixture(scope="module")
def unsat_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cnf") / "unsat.cnf"
    path.write_text("p cnf 2 3\nc ind 1 2 0\n1 0\n-1 0\n2 0\n")
    return str(path)


def kv(stdout):
    out = {}
    for line in stdout.splitlines():
        k, _, v = line.partition("=")
        out[k] = v
    return out


class TestFindSupport:
    def test_ubs_size(self, t1n4_file):
        r = run_cli("find-support", t1n4_file, "--mode", "ubs")
        assert r.returncode == 0, r.stderr
        got = kv(r.stdout)
        assert got["size"] == "2"
        assert got["kind"] == "ubs"
        assert "pre_time_s" in got

    def test_is_size(self, t1n4_file):
        r = run_cli("find-support", t1n4_file, "--mode", "is")
        assert r.returncode == 0
        assert kv(r.stdout)["size"] == "3"

    def test_missing_projection_usage_error(self, tmp_path):
        path = tmp_path / "noproj.cnf"
        path.write_text("p cnf 2 1\n1 2 0\n")
        r = run_cli("find-support", str(path))
        assert r.returncode == 1
        assert "projection" in r.stderr

    def test_explicit_proj_file(self, tmp_path):
        cnf = tmp_path / "f.cnf"
        cnf.write_text("p cnf 3 1\n1 2 0\n")
        proj = tmp_path / "p.txt"
        proj.write_text("1 3 0\n")
        r = run_cli("find-support", str(cnf), "--proj", str(proj))
        assert r.returncode == 0, r.stderr

    def test_parse_error_exit_2(self, tmp_path):
        path = tmp_path / "bad.cnf"
        path.write_text("p cnf 2 1\n1 5 0\n")
        r = run_cli("find-support", str(path))
        assert r.returncode == 2
        assert "parse error" in r.stderr

    def test_deadline_exit_3_with_result(self, t1n4_file):
        r = run_cli("find-support", t1n4_file, "--timeout-pre", "0")
        assert r.returncode == 3
        got = kv(r.stdout)
        assert got["deadline_hit"] == "true"
        assert got["minimal"] == "false"

    def test_json_mode(self, t1n4_file):
        r = run_cli("find-support", t1n4_file, "--format", "json")
        assert r.returncode == 0
        obj = json.loads(r.stdout)
        assert obj["size"] == 2 and obj["vars"] == [4, 5]


class TestCount:
    def test_exact_over_projection(self, t1n8_file):
        r = run_cli("count", t1n8_file, "--exact", "--mode", "none")
        assert r.returncode == 0, r.stderr
        assert kv(r.stdout)["count"] == "8*2^0"

    def test_unsat_zero(self, unsat_file):
        r = run_cli("count", unsat_file, "--mode", "none", "--seed", "1")
        assert r.returncode == 0
        assert kv(r.stdout)["count"] == "0*2^0"

    def test_ubs_mode_reports_support(self, t1n4_file):
        r = run_cli("count", t1n4_file, "--mode", "ubs", "--seed", "7")
        assert r.returncode == 0
        got = kv(r.stdout)
        assert got["support_size"] == "2"
        assert got["mode"] == "ubs"

    def test_fixed_seed_repeat_identical(self, t1n4_file):
        outs = [run_cli("count", t1n4_file, "--seed", "5").stdout for _ in range(2)]
        assert outs[0] == outs[1]

    def test_json_requires_seed(self, t1n4_file):
        r = run_cli("count", t1n4_file, "--format", "json")
        assert r.returncode == 1
        assert "--seed" in r.stderr

    def test_structured_output_feeds_bench_reader(self, t1n4_file):
        from ubcount.bench import run_record_from_cli

        r = run_cli("count", t1n4_file, "--format", "json", "--seed", "9")
        assert r.returncode == 0
        rec = run_record_from_cli(r.stdout, instance="t1n4")
        assert rec.status == "solved" and rec.mode == "ubs"
        assert rec.mantissa is not None and rec.seed == 9

    def test_structured_determinism_three_runs(self, t1n4_file):
        outs = [
            run_cli("count", t1n4_file, "--format", "json", "--seed", "3").stdout
            for _ in range(3)
        ]
        assert outs[0] == outs[1] == outs[2]
        obj = json.loads(outs[0])
        assert obj["status"] == "ok"
        assert obj["seed"] == 3

    def test_counting_timeout_exit_4(self, tmp_path):
        # 12 free projected vars force the hashing path; zero budget aborts it
        from ubcount import Formula, ProjectionSet

        path = tmp_path / "wide.cnf"
        path.write_text(
            emit_dimacs(Formula.of(14, [(13, 14)]), ProjectionSet.of(range(1, 13)))
        )
        r = run_cli("count", str(path), "--mode", "none", "--seed", "1",
                    "--timeout-count", "0")
        assert r.returncode == 4
        assert kv(r.stdout)["status"] == "unknown"


class TestBench:
    def test_gen_theorem1_writes_parseable_file(self, tmp_path):
        r = run_cli("bench", "--gen-theorem1", "8", "--out", str(tmp_path))
        assert r.returncode == 0, r.stderr
        path = tmp_path / "theorem1_n8.cnf"
        assert path.exists()
        f, p = parse_dimacs(path.read_text())
        assert f.num_vars == 10 and p is not None and len(p) == 7

    def test_gen_rejects_bad_n(self, tmp_path):
        r = run_cli("bench", "--gen-theorem1", "5", "--out", str(tmp_path))
        assert r.returncode == 1

    def test_suite_run_and_par2_consistency(self, tmp_path):
        r = run_cli(
            "bench", "--max-n", "4", "--seed", "2", "--out", str(tmp_path),
            "--timeout-pre", "60", "--timeout-count", "60",
        )
        assert r.returncode == 0, r.stderr
        got = kv(r.stdout)
        records = read_records(str(tmp_path / "records.jsonl"))
        assert len(records) == int(got["records"]) == 4
        assert (tmp_path / "summary.csv").exists()
        # the printed PAR-2 matches the metric recomputed from the records
        assert float(got["par2_s"]) == pytest.approx(par2(records, 60.0), abs=1e-3)

    def test_json_summary_deterministic_fields(self, tmp_path):
        outs = []
        for d in ("a", "b"):
            out_dir = tmp_path / d
            r = run_cli("bench", "--max-n", "4", "--seed", "2", "--out",
                        str(out_dir), "--format", "json")
            assert r.returncode == 0
            obj = json.loads(r.stdout)
            obj.pop("records_file")
            obj.pop("csv_file")
            outs.append(obj)
        assert outs[0] == outs[1]


class TestHelpAndDefaults:
    def test_defaults_documented_in_help(self):
        for sub in ("find-support", "count", "bench"):
            r = run_cli(sub, "--help")
            assert r.returncode == 0
            text = r.stdout
            assert str(DEFAULTS["conflict_limit"]) in text
            assert DEFAULTS["strategy"] in text
            if sub != "find-support":
                assert str(DEFAULTS["epsilon"]) in text
                assert str(DEFAULTS["delta"]) in text

    def test_unknown_flag_usage_error(self, t1n4_file):
        r = run_cli("count", t1n4_file, "--no-such-flag")
        assert r.returncode == 1

    def test_strategy_choices(self, t1n4_file):
        for strat in ("nonproj-first", "proj-only", "index", "occ-asc"):
            r = run_cli("find-support", t1n4_file, "--strategy", strat)
            assert r.returncode == 0
