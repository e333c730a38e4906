import json

import numpy as np
import pytest

from backflow.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main
from backflow.maxflow import kernel_entry
from backflow.selfcheck import format_report, run_selfcheck


class TestExitCodes:
    def test_ok(self, capsys):
        assert main(["feasibility", "--mass", "1", "--sigma", "1", "--time", "1"]) == EXIT_OK
        assert "feasible" in capsys.readouterr().out

    def test_unknown_command(self, capsys):
        assert main(["no-such-command"]) == EXIT_USAGE
        capsys.readouterr()

    def test_missing_required_argument(self, capsys):
        assert main(["example-current"]) == EXIT_USAGE
        capsys.readouterr()

    def test_invalid_value(self, capsys):
        assert main(["feasibility", "--mass", "-1", "--sigma", "1", "--time", "1"]) == EXIT_USAGE
        assert "error" in capsys.readouterr().err

    def test_numerical_failure(self, capsys):
        # no sign change anywhere near [20, 21], even after widening
        code = main(["critical-width", "--tol", "1e-4", "--lo", "20", "--hi", "21"])
        assert code == EXIT_NUMERICAL
        assert "numerical failure" in capsys.readouterr().err

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        capsys.readouterr()


class TestOutputs:
    def test_example_current_csv(self, tmp_path, capsys):
        out = tmp_path / "point.csv"
        assert main(["example-current", "--s", "1.0", "--out", str(out)]) == EXIT_OK
        assert "backflow" in capsys.readouterr().out
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "s,J_scaled"
        assert float(lines[1].split(",")[1]) < 0

    def test_example_current_json_refs(self, tmp_path, capsys):
        out = tmp_path / "point.json"
        main(["example-current", "--s", "1.0", "--out", str(out), "--format", "json"])
        capsys.readouterr()
        payload = json.loads(out.read_text())
        assert payload["paper_refs"]
        assert all(isinstance(r, str) for r in payload["paper_refs"])

    def test_sweep_json_refs(self, tmp_path, capsys):
        out = tmp_path / "sweep.json"
        main(["example-sweep", "--start", "1", "--stop", "2", "--points", "3",
              "--out", str(out), "--format", "json"])
        capsys.readouterr()
        payload = json.loads(out.read_text())
        assert payload["columns"] == ["s", "J_scaled", "converged"]
        assert len(payload["rows"]) == 3
        assert payload["paper_refs"]

    def test_sweep_determinism(self, tmp_path, capsys):
        args = ["max-sweep", "--start", "0", "--stop", "2", "--points", "3",
                "--nodes", "120", "--umax", "6"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(a)]) == EXIT_OK
        assert main(args + ["--out", str(b)]) == EXIT_OK
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()
        header = a.read_text().split("\n")[0]
        assert header == "varsigma,delta_max,varsigma_sq,ln_delta_max,nodes,umax,residual"

    def test_max_backflow_eigenvector_dump(self, tmp_path, capsys):
        vec = tmp_path / "state.csv"
        assert main(["max-backflow", "--varsigma", "1.0", "--nodes", "100",
                     "--umax", "6", "--eigenvector-out", str(vec)]) == EXIT_OK
        capsys.readouterr()
        lines = vec.read_text().strip().split("\n")
        assert lines[0] == "u,weight,phi"
        assert len(lines) == 101
        data = np.array([[float(c) for c in line.split(",")] for line in lines[1:]])
        # phi carries unit norm in the weighted inner product
        assert data[:, 1] @ data[:, 2] ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_time_check_output(self, tmp_path, capsys):
        out = tmp_path / "tc.csv"
        assert main(["time-check", "--varsigma", "1.0", "--nodes", "150",
                     "--umax", "7", "--out", str(out)]) == EXIT_OK
        assert "deviation" in capsys.readouterr().out
        header, row = out.read_text().strip().split("\n")
        fields = dict(zip(header.split(","), row.split(",")))
        assert float(fields["deviation"]) <= 1e-5


@pytest.fixture(scope="module")
def results():
    return run_selfcheck()


class TestSelfcheck:
    def test_all_pass(self, results):
        failed = [r.name for r in results if not r.passed]
        assert failed == []

    def test_report_shape(self, results):
        report = format_report(results)
        lines = report.strip().split("\n")
        assert len(lines) == len(results) + 1
        assert all(line.startswith(("PASS", "FAIL")) for line in lines[:-1])
        assert lines[-1] == f"{len(results)}/{len(results)} checks passed"

    def test_report_deterministic(self, results):
        assert format_report(results) == format_report(results)

    def test_corrupted_kernel_is_caught(self):
        # flipping the kernel sign must fail exactly the sharp-bound check
        def flipped(u, v, w):
            return -kernel_entry(u, v, w)

        results = run_selfcheck(kernel_fn=flipped)
        by_name = {r.name: r.passed for r in results}
        assert not by_name["sharp-transfer-bound"]

    def test_cli_selfcheck_exit(self, tmp_path, capsys):
        out = tmp_path / "report.txt"
        assert main(["selfcheck", "--out", str(out)]) == EXIT_OK
        shown = capsys.readouterr().out
        assert out.read_text() == shown
        assert "checks passed" in shown
