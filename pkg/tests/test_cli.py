import json
import subprocess
import sys

import pytest

from lpchar.cli import main

HOLDER = ["--phi", "power:1,2", "--psi", "power:1,2", "--mu", "0.5,0.5"]
BAD_PAIR = ["--phi", "power:1,3", "--psi", "power:1,1.2", "--mu", "0.5,0.5"]


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def run_exit(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    capsys.readouterr()
    return exc.value.code


def exit_code(argv, capsys):
    """Exit status whether ``main`` returns it or argparse raises it."""
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    capsys.readouterr()
    return code


class TestCheck:
    def test_holder_json(self, capsys):
        code, out = run(["check", "holder", *HOLDER, "--f", "1,2", "--g", "1,3"], capsys)
        rep = json.loads(out)
        assert code == 0 and rep["holds"] and rep["lhs"] == 3.5
        assert set(rep) == {"name", "lhs", "rhs", "gap", "holds", "is_equality", "tolerance", "witness"}

    def test_violation_exit_one(self, capsys):
        code, out = run(["check", "holder", *BAD_PAIR, "--f", "0.6912400496806171,0.941603164575184",
                         "--g", "0.04442757062895951,0.10790840445381392"], capsys)
        assert code == 1 and not json.loads(out)["holds"]

    def test_mulholland_quads(self, capsys):
        code, out = run(["check", "mulholland", "--gen", "power:1,2", "--quad", "3,0,0,4", "--quad", "1,1,1,1",
                         "--output", "jsonl"], capsys)
        lines = [json.loads(line) for line in out.splitlines()]
        assert code == 0 and len(lines) == 2 and lines[0]["lhs"] == 5

    def test_gmi(self, capsys):
        code, out = run(["check", "gmi", "--p", "2", "--mu", "0.5,0.5", "--nu", "0.5,0.5", "--F", "1,0;0,1"], capsys)
        assert code == 0 and json.loads(out)["rhs"] == pytest.approx(0.5**0.5)

    def test_genmink(self, capsys):
        code, _ = run(["check", "genmink", "--phi", "power:1,2", "--psi", "power:1,0.5", "--mu", "0.5,0.5",
                       "--nu", "1,1", "--F", "1,2;3,4"], capsys)
        assert code == 0

    def test_quasimean(self, capsys):
        code, out = run(["check", "quasimean", "--gen", "expm1", "--a", "0,2", "--b", "2,0", "--q", "0.5,0.5"], capsys)
        assert code == 0 and json.loads(out)["holds"]

    def test_csv_output(self, capsys):
        code, out = run(["check", "holder", *HOLDER, "--f", "1,2", "--g", "1,3", "--output", "csv"], capsys)
        header, row = out.strip().splitlines()
        assert header.split(",")[:2] == ["name", "lhs"] and row.startswith("holder,3.5")

    @pytest.mark.parametrize("argv", [
        ["check", "holder", "--phi", "sinh", "--psi", "power:1,2", "--mu", "0.5,0.5", "--f", "1,2", "--g", "1,3"],
        ["check", "holder", *HOLDER, "--f", "1,2,3", "--g", "1,3"],
        ["check", "holder", *HOLDER, "--f", "1,-2", "--g", "1,3"],
        ["check", "holder", *HOLDER, "--f", "1,2"],
    ])
    def test_bad_input_exit_two(self, argv, capsys):
        assert exit_code(argv, capsys) == 2


class TestSearch:
    def test_none(self, capsys):
        code, out = run(["search", "holder", *HOLDER, "--seed", "0", "--budget", "3000"], capsys)
        assert code == 0 and out.strip() == "none"

    def test_seed_required(self, capsys):
        assert run_exit(["search", "holder", *HOLDER], capsys) == 2

    def test_witness_round_trip(self, capsys, tmp_path):
        code, out = run(["search", "holder", *BAD_PAIR, "--seed", "0"], capsys)
        assert code == 1
        found = json.loads(out)
        path = tmp_path / "w.json"
        path.write_text(out)
        code, out = run(["check", "holder", "--witness", str(path)], capsys)
        rep = json.loads(out)
        assert code == 1
        assert rep["gap"] == pytest.approx(found["report"]["gap"], abs=1e-12)
        assert rep["gap"] < 0

    def test_byte_identical(self):
        argv = [sys.executable, "-m", "lpchar", "search", "genmink", "--phi", "expm1", "--psi", "inverse:expm1",
                "--mu", "0.5,0.5", "--nu", "1,1", "--two-block", "--seed", "5", "--budget", "20000"]
        a = subprocess.run(argv, capture_output=True, check=False).stdout
        b = subprocess.run(argv, capture_output=True, check=False).stdout
        assert a and a == b

    def test_jobs_byte_identical(self, capsys):
        base = ["search", "holder", *BAD_PAIR, "--seed", "11", "--budget", "5000"]
        _, a = run(base, capsys)
        _, b = run(base + ["--jobs", "3"], capsys)
        assert a == b


class TestScanFitDemo:
    def test_scan_matches_predicate(self, capsys):
        code, out = run(["scan-concavity", "--p-values", "1.5,2,3", "--q-values", "1.5,2,3"], capsys)
        cells = json.loads(out)
        assert code == 0 and len(cells) == 9

    def test_scan_csv(self, capsys):
        code, out = run(["scan-concavity", "--p-values", "1.5,3", "--q-values", "1.5,3", "--output", "csv"], capsys)
        lines = out.strip().splitlines()
        assert lines[0].startswith("p,q,concave") and len(lines) == 5

    def test_fit(self, capsys):
        code, out = run(["fit", "--gen", "power:2,3"], capsys)
        fit = json.loads(out)
        assert code == 0 and fit["c"] == pytest.approx(2) and fit["p"] == pytest.approx(3)

    def test_demo_forward(self, capsys):
        code, out = run(["demo-optimality", "--mode", "forward", *["--phi", "power:1,3", "--psi", "power:1,3"],
                         "--mu", "0.5,0.5", "--f", "1,2"], capsys)
        assert code == 1 and json.loads(out)["min_gap"] > 1e-4

    def test_demo_strict_gap(self, capsys):
        code, _ = run(["demo-optimality", "--mode", "strict-gap", "--p", "2", "--p-prime", "1.5", "--mu", "0.5,0.5",
                       "--f", "1,2"], capsys)
        assert code == 0

    def test_empty_range(self, capsys):
        assert run_exit(["demo-optimality", *HOLDER, "--f", "1,2", "--r-range", "5,1"], capsys) == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "lpchar", "--help"], capture_output=True, text=True, check=True)
    assert "scan-concavity" in out.stdout
