import csv
import json
import shutil
from importlib.resources import files

import numpy as np
import pytest

from hadamard_vi.cli import main

BENCH = files("hadamard_vi") / "benchmarks"


def bench_obj(name):
    return json.loads((BENCH / name).read_text())


def write(tmp_path, obj, name="problem.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


ANTI = {
    "manifold": {"kind": "euclidean", "dim": 2},
    "field": {"type": "affine", "matrix": [[-1, 0], [0, -1]], "offset": [0, 0]},
    "omega": {"type": "box", "lower": [-1, -1], "upper": [1, 1]},
    "p0": [0.5, 0.3],
    "reference": [0.0, 0.0],
    "solver": {"max_iter": 50, "epsilon0": 1.0},
}


def read_trace(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestRun:
    def test_linear_halving(self, tmp_path, capsys):
        trace = tmp_path / "trace.csv"
        rc = main(["run", str(BENCH / "euclidean_linear.json"), "--trace", str(trace)])
        assert rc == 0
        cert = json.loads(capsys.readouterr().out)
        assert cert["status"] == "eps_solution"
        d = np.array([float(r["dist_to_reference"]) for r in read_trace(trace)])
        # distance to the solution halves at each step on the identity field
        np.testing.assert_allclose(d[1:] / d[:-1], 0.5, rtol=1e-9)

    def test_certificate_file(self, tmp_path):
        cert = tmp_path / "cert.json"
        assert main(["run", str(BENCH / "line_linear.json"), "--cert", str(cert)]) == 0
        assert json.loads(cert.read_text())["monitor_violations"] == 0

    def test_p0_outside(self, tmp_path, capsys):
        obj = bench_obj("line_linear.json")
        obj["p0"] = [2.0]
        assert main(["run", write(tmp_path, obj)]) == 4
        assert "p0" in capsys.readouterr().err

    def test_delta_ordering(self, tmp_path, capsys):
        obj = bench_obj("line_linear.json")
        obj["solver"]["delta_minus"] = 0.9
        obj["solver"]["delta_plus"] = 0.3
        assert main(["run", write(tmp_path, obj)]) == 4
        assert "delta_minus < delta_plus" in capsys.readouterr().err

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["run", str(path)]) == 4

    def test_missing_file(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.json")]) == 4

    def test_monitor_violation(self, tmp_path, capsys):
        assert main(["run", write(tmp_path, ANTI)]) == 2
        assert "Fejer" in capsys.readouterr().err

    def test_solver_failure(self, tmp_path, capsys):
        obj = bench_obj("euclidean_linear.json")
        # the identity field from (1, 0) needs two halvings at delta_minus = 0.6
        obj["solver"].update(max_backtracks=1, delta_minus=0.6, epsilon0=0.1)
        assert main(["run", write(tmp_path, obj)]) == 3
        assert "BacktrackExhausted" in capsys.readouterr().err

    def test_deterministic_trace(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        src = str(BENCH / "hyperbolic_mean.json")
        assert main(["run", src, "--trace", str(a)]) == 0
        assert main(["run", src, "--trace", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_cli_overrides_file(self, tmp_path, capsys):
        src = str(BENCH / "euclidean_linear.json")
        main(["run", src, "--max-iter", "3", "--stop-tol", "0"])
        cert = json.loads(capsys.readouterr().out)
        assert cert["status"] == "max_iter" and cert["iterations"] == 3

    def test_stop_tol_override(self, tmp_path, capsys):
        src = str(BENCH / "euclidean_linear.json")
        main(["run", src])
        tight = json.loads(capsys.readouterr().out)["iterations"]
        main(["run", src, "--stop-tol", "1e-3"])
        loose = json.loads(capsys.readouterr().out)["iterations"]
        assert loose < tight


class TestValidate:
    def test_reference_consistent(self, capsys):
        assert main(["validate", str(BENCH / "hyperbolic_mean.json")]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["verdict"] == "consistent"
        assert out["gap"]["value_lower_bound"] <= 1e-6
        assert all(r <= 1e-8 for r in out["fixed_point_residual"].values())

    def test_perturbed_refuted(self, capsys):
        rc = main(["validate", str(BENCH / "line_linear.json"), "--point", "[0.5]", "--eps", "0.01"])
        assert rc == 2
        assert json.loads(capsys.readouterr().out)["verdict"] == "refuted"

    def test_missing_field(self, tmp_path, capsys):
        obj = bench_obj("line_linear.json")
        del obj["field"]
        assert main(["validate", write(tmp_path, obj)]) == 4
        assert "field" in capsys.readouterr().err

    def test_point_outside(self):
        assert main(["validate", str(BENCH / "line_linear.json"), "--point", "[3.0]"]) == 4

    def test_bad_point(self):
        assert main(["validate", str(BENCH / "line_linear.json"), "--point", "[oops"]) == 4

    def test_no_reference(self, tmp_path):
        obj = bench_obj("euclidean_rotation.json")
        obj.pop("reference", None)
        assert main(["validate", write(tmp_path, obj)]) == 3

    def test_seed_override(self, capsys):
        src = str(BENCH / "euclidean_median.json")
        args = ["validate", src, "--point", "[0.4, 0.4]", "--samples", "64"]
        main(args + ["--seed", "1"])
        a = json.loads(capsys.readouterr().out)["gap"]
        main(args + ["--seed", "2"])
        b = json.loads(capsys.readouterr().out)["gap"]
        assert a != b


class TestSuite:
    def test_bundled(self, tmp_path, capsys):
        report = tmp_path / "report.json"
        assert main(["suite", str(BENCH), "--report", str(report), "--samples", "1024"]) == 0
        out = capsys.readouterr().out
        assert out.count("PASS") == len(out.splitlines())
        assert json.loads(report.read_text())["pass"] is True

    def test_anti_monotone(self, tmp_path, capsys):
        d = tmp_path / "suite"
        d.mkdir()
        shutil.copy(BENCH / "line_linear.json", d / "line_linear.json")
        write(d, ANTI, "anti.json")
        assert main(["suite", str(d), "--samples", "256"]) == 2
        out = capsys.readouterr().out
        assert "FAIL anti.json (" in out and "monotonicity" in out
        assert "PASS line_linear.json" in out

    def test_empty_dir(self, tmp_path):
        assert main(["suite", str(tmp_path)]) == 4

    def test_deterministic_report(self, tmp_path):
        d = tmp_path / "suite"
        d.mkdir()
        shutil.copy(BENCH / "line_linear.json", d / "line_linear.json")
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["suite", str(d), "--report", str(a), "--samples", "256"])
        main(["suite", str(d), "--report", str(b), "--samples", "256"])
        assert a.read_bytes() == b.read_bytes()


def test_requires_subcommand():
    with pytest.raises(SystemExit):
        main([])
