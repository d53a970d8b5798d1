import csv
import json

import numpy as np
import pytest

from atomdfo import cli
from atomdfo.analysis import PropertyReport


def write_manifest(path, **overrides):
    manifest = {
        "pairs": [[2, 6]],
        "functions": ["power", "quartc"],
        "seeds": [0],
        "solvers": ["ord"],
        "budget_factor": 20,
    }
    manifest.update(overrides)
    path.write_text(json.dumps(manifest))
    return path


def read_summary(out_dir):
    with open(out_dir / "summary.csv", newline="") as fh:
        return list(csv.DictReader(fh))


class TestRun:
    def test_writes_trace_and_summary(self, tmp_path):
        manifest = write_manifest(tmp_path / "suite.json", functions=["power"])
        out = tmp_path / "out"
        assert cli.main(["run", "--config", str(manifest), "--out", str(out)]) == 0
        files = sorted(p.name for p in out.iterdir())
        assert files == ["power_n2_m6_seed0__ord.csv", "summary.csv"]

    def test_summary_rows_and_sparsity(self, tmp_path):
        manifest = write_manifest(tmp_path / "suite.json", seeds=[0, 1])
        out = tmp_path / "out"
        assert cli.main(["run", "--config", str(manifest), "--out", str(out)]) == 0
        rows = read_summary(out)
        assert len(rows) == 4  # 2 functions x 2 seeds x 1 solver
        for row in rows:
            assert 0.0 <= float(row["sparsity"]) <= 1.0
            assert int(row["evals"]) <= 20 * 3

    def test_same_seed_gives_identical_traces(self, tmp_path):
        manifest = write_manifest(tmp_path / "suite.json", solvers=["ord", "dfsimplex"])
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert cli.main(["run", "--config", str(manifest), "--out", str(out1)]) == 0
        assert cli.main(["run", "--config", str(manifest), "--out", str(out2)]) == 0
        traces = sorted(p.name for p in out1.iterdir() if p.name != "summary.csv")
        assert traces
        for name in traces:
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        # summaries agree except for the wall-time column
        for r1, r2 in zip(read_summary(out1), read_summary(out2)):
            r1.pop("seconds"), r2.pop("seconds")
            assert r1 == r2

    def test_invalid_function_is_usage_error(self, tmp_path):
        manifest = write_manifest(tmp_path / "suite.json", functions=["nope"])
        assert cli.main(["run", "--config", str(manifest), "--out", str(tmp_path / "o")]) == 2

    def test_odd_dimension_for_paired_function_rejected(self, tmp_path):
        manifest = write_manifest(
            tmp_path / "suite.json", pairs=[[3, 5]], functions=["ext_beale"]
        )
        assert cli.main(["run", "--config", str(manifest), "--out", str(tmp_path / "o")]) == 2

    def test_bad_solver_options_rejected_up_front(self, tmp_path, capsys):
        manifest = write_manifest(tmp_path / "suite.json", ord={"gamma": -1.0})
        assert cli.main(["run", "--config", str(manifest), "--out", str(tmp_path / "o")]) == 2
        assert "gamma" in capsys.readouterr().err

    def test_solver_options_change_the_run(self, tmp_path):
        base = write_manifest(tmp_path / "a.json", functions=["power"])
        tweaked = write_manifest(
            tmp_path / "b.json",
            functions=["power"],
            ord={"drop_rule": "zero_weight", "mu0": 0.9, "inner": {"delta": 0.3}},
        )
        out_a, out_b = tmp_path / "oa", tmp_path / "ob"
        assert cli.main(["run", "--config", str(base), "--out", str(out_a)]) == 0
        assert cli.main(["run", "--config", str(tweaked), "--out", str(out_b)]) == 0
        trace = "power_n2_m6_seed0__ord.csv"
        assert (out_a / trace).read_bytes() != (out_b / trace).read_bytes()

    def test_missing_manifest_is_usage_error(self, tmp_path):
        assert cli.main(["run", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 2

    def test_full_catalog_run_produces_25_rows(self, tmp_path):
        manifest = tmp_path / "suite.json"
        manifest.write_text(json.dumps({"pairs": [[10, 200]], "seeds": [0], "solvers": ["ord"]}))
        out = tmp_path / "out"
        assert cli.main(["run", "--config", str(manifest), "--out", str(out)]) == 0
        rows = read_summary(out)
        assert len(rows) == 25
        assert all(0.0 <= float(r["sparsity"]) <= 1.0 for r in rows)
        assert len(list(out.iterdir())) == 26  # 25 traces + summary

    def test_seed_flag_overrides_manifest(self, tmp_path):
        manifest = write_manifest(tmp_path / "suite.json", functions=["power"], seeds=[0, 1])
        out = tmp_path / "out"
        assert cli.main([
            "run", "--config", str(manifest), "--out", str(out), "--seed", "7",
        ]) == 0
        rows = read_summary(out)
        assert [r["seed"] for r in rows] == ["7"]

    def test_worker_pool_matches_sequential_output(self, tmp_path):
        manifest = write_manifest(tmp_path / "suite.json", seeds=[0, 1])
        seq, par = tmp_path / "seq", tmp_path / "par"
        assert cli.main(["run", "--config", str(manifest), "--out", str(seq)]) == 0
        assert cli.main(["run", "--config", str(manifest), "--out", str(par), "--jobs", "2"]) == 0
        for name in sorted(p.name for p in seq.iterdir() if p.name != "summary.csv"):
            assert (seq / name).read_bytes() == (par / name).read_bytes()

    def test_run_failure_recorded_per_row(self, tmp_path, monkeypatch, capsys):
        calls = {"n": 0}
        original = cli.run_one

        def flaky(*args):
            calls["n"] += 1
            if calls["n"] == 1:
                raise RuntimeError("boom")
            return original(*args)

        monkeypatch.setattr(cli, "run_one", flaky)
        manifest = write_manifest(tmp_path / "suite.json", seeds=[0, 1])
        out = tmp_path / "out"
        assert cli.main(["run", "--config", str(manifest), "--out", str(out)]) == 1
        rows = read_summary(out)
        assert len(rows) == 4  # the failed run still has a summary row
        assert sum(1 for r in rows if r["final_f"] == "nan") == 1
        assert "boom" in capsys.readouterr().err


def make_trace_dir(tmp_path, t_by_run, length=40, n=5):
    """Hand-build a cmd_run-shaped output directory with known first-hit times."""
    out = tmp_path / "traces"
    out.mkdir()
    rows = []
    for (problem, solver), t in t_by_run.items():
        hist = np.full(length, 10.0)
        hist[t - 1 :] = 0.0
        with open(out / f"{problem}__{solver}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(cli.TRACE_HEADER)
            for idx, best in enumerate(hist, start=1):
                writer.writerow([idx, f"{best:.17g}", f"{best:.17g}"])
        rows.append((problem, solver, n, length, 0, 0.0, length, 0.0, 0.0))
    rows.sort()
    with open(out / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cli.SUMMARY_HEADER)
        writer.writerows(rows)
    return out


class TestProfile:
    def test_two_solver_curves_match_hand_computation(self, tmp_path):
        traces = make_trace_dir(tmp_path, {("p1", "s1"): 10, ("p1", "s2"): 20})
        out = tmp_path / "profiles"
        assert cli.main([
            "profile", "--traces", str(traces), "--out", str(out), "--tau", "0.1",
        ]) == 0
        files = sorted(p.name for p in out.iterdir())
        assert files == ["data_profile_tau0.1.csv", "performance_profile_tau0.1.csv"]
        perf = {}
        with open(out / "performance_profile_tau0.1.csv", newline="") as fh:
            for row in csv.DictReader(fh):
                perf.setdefault(row["solver_id"], []).append(
                    (float(row["grid_value"]), float(row["curve_value"]))
                )
        s1 = dict(perf["s1"])
        s2 = dict(perf["s2"])
        assert s1[1.0] == 1.0
        assert s2[1.0] == 0.0
        assert s2[2.0] == 1.0

    def test_single_solver_rho_at_one_is_solved_fraction(self, tmp_path):
        traces = make_trace_dir(tmp_path, {("p1", "s1"): 5, ("p2", "s1"): 7})
        out = tmp_path / "profiles"
        assert cli.main([
            "profile", "--traces", str(traces), "--out", str(out), "--tau", "0.5",
        ]) == 0
        with open(out / "performance_profile_tau0.5.csv", newline="") as fh:
            rows = [row for row in csv.DictReader(fh)]
        at_one = [r for r in rows if float(r["grid_value"]) == 1.0]
        assert float(at_one[0]["curve_value"]) == 1.0

    def test_empty_dir_is_an_error(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        assert cli.main(["profile", "--traces", str(empty), "--out", str(tmp_path / "o")]) == 2

    def test_malformed_trace_names_the_file(self, tmp_path, capsys):
        traces = make_trace_dir(tmp_path, {("p1", "s1"): 5})
        bad = traces / "p1__s1.csv"
        bad.write_text("eval,f,best_f\n1,not_a_number,xyz\n")
        assert cli.main(["profile", "--traces", str(traces), "--out", str(tmp_path / "o")]) == 2
        assert "p1__s1.csv" in capsys.readouterr().err

    def test_default_tau_grid_writes_six_files(self, tmp_path):
        traces = make_trace_dir(tmp_path, {("p1", "s1"): 5})
        out = tmp_path / "profiles"
        assert cli.main(["profile", "--traces", str(traces), "--out", str(out)]) == 0
        assert len(list(out.iterdir())) == 6


class TestSuiteConfig:
    @pytest.mark.parametrize(
        "overrides",
        [
            {"pairs": []},
            {"pairs": [[0, 5]]},
            {"solvers": ["nope"]},
            {"budget_factor": 0},
        ],
    )
    def test_invalid_manifest_fields(self, tmp_path, overrides):
        manifest = write_manifest(tmp_path / "suite.json", **overrides)
        assert cli.main(["run", "--config", str(manifest), "--out", str(tmp_path / "o")]) == 2

    def test_unparseable_json(self, tmp_path):
        path = tmp_path / "suite.json"
        path.write_text("{not json")
        assert cli.main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == 2


class TestLoadRunRecords:
    def test_missing_trace_file(self, tmp_path):
        traces = make_trace_dir(tmp_path, {("p1", "s1"): 5})
        (traces / "p1__s1.csv").unlink()
        with pytest.raises(cli.UsageError, match="missing trace"):
            cli.load_run_records(traces)

    def test_wrong_trace_header(self, tmp_path):
        traces = make_trace_dir(tmp_path, {("p1", "s1"): 5})
        (traces / "p1__s1.csv").write_text("a,b\n1,2\n")
        with pytest.raises(cli.UsageError, match="header"):
            cli.load_run_records(traces)

    def test_empty_trace(self, tmp_path):
        traces = make_trace_dir(tmp_path, {("p1", "s1"): 5})
        (traces / "p1__s1.csv").write_text("eval,f,best_f\n")
        with pytest.raises(cli.UsageError, match="empty"):
            cli.load_run_records(traces)


class TestEndToEnd:
    def test_run_then_profile_round_trip(self, tmp_path):
        manifest = tmp_path / "suite.json"
        manifest.write_text(
            json.dumps(
                {
                    "pairs": [[2, 8]],
                    "functions": ["power", "ext_himmelblau", "cosine"],
                    "seeds": [0, 1],
                    "solvers": ["ord", "dfsimplex"],
                    "budget_factor": 50,
                }
            )
        )
        traces = tmp_path / "traces"
        out = tmp_path / "profiles"
        assert cli.main(["run", "--config", str(manifest), "--out", str(traces)]) == 0
        assert cli.main([
            "profile", "--traces", str(traces), "--out", str(out), "--tau", "0.1",
        ]) == 0
        records = cli.load_run_records(traces)
        assert len(records) == 12  # 3 functions x 2 seeds x 2 solvers
        for rec in records:
            assert np.all(np.diff(rec.history) <= 0.0)
            assert len(rec.history) <= 150
        with open(out / "data_profile_tau0.1.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        by_solver = {}
        for row in rows:
            by_solver.setdefault(row["solver_id"], []).append(float(row["curve_value"]))
        assert set(by_solver) == {"ord", "dfsimplex"}
        for curve in by_solver.values():
            assert curve == sorted(curve)  # non-decreasing
            assert 0.0 <= curve[-1] <= 1.0


class TestVerify:
    def test_quick_level_passes_and_reports_properties(self, capsys):
        assert cli.main(["verify", "--level", "quick", "--seed", "0"]) == 0
        out = capsys.readouterr().out
        lines = [ln for ln in out.splitlines() if "trials=" in ln]
        assert len(lines) >= 6
        assert all("PASS" in ln for ln in lines)

    def test_injected_failure_flips_exit_code(self, monkeypatch, capsys):
        broken = [PropertyReport("cone-measure", 10, -1.0, False)]
        monkeypatch.setattr(cli, "run_property_suite", lambda level, seed: broken)
        assert cli.main(["verify"]) == 1
        assert "FAIL" in capsys.readouterr().out
