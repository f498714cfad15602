import json
import subprocess
import sys

import pytest

from hirzebruch import cli, floors

GOOD = {
    "twist": 0, "base_degree": 1, "genus": 0,
    "moving_tangencies": [-1, 1], "psi_powers": [0, 0, 0],
}


@pytest.fixture
def problem(tmp_path):
    def write(payload, name="problem.json"):
        p = tmp_path / name
        p.write_text(json.dumps(payload))
        return str(p)
    return write


def test_invariant_both_methods_agree(problem, capsys):
    rc = cli.main(["invariant", problem(GOOD), "--method", "both"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "floors connected builtin = 1" in out
    assert "fock connected builtin = 1" in out
    assert "methods agree" in out


def test_invariant_records_format(problem, capsys):
    rc = cli.main([
        "invariant", problem(GOOD), "--method", "floors", "--format", "records",
    ])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.splitlines()[0].startswith("invariant floors")
    assert "term 1 1" in out


def test_invariant_disconnected_formal(problem, capsys):
    rc = cli.main([
        "invariant", problem(GOOD), "--disconnected", "--oracle", "formal",
        "--method", "both",
    ])
    assert rc == 0
    assert "methods agree" in capsys.readouterr().out


def test_validation_failures_exit_2(problem, capsys):
    bad = dict(GOOD, moving_tangencies=[-1, 2])
    assert cli.main(["invariant", problem(bad)]) == 2
    assert "unbalanced" in capsys.readouterr().err

    assert cli.main(["invariant", problem({"twist": "x"})]) == 2
    assert cli.main(["invariant", problem(dict(GOOD, surface="F2"))]) == 2
    assert cli.main(["invariant", str(problem("x")) + ".missing"]) == 2
    assert cli.main(["invariant", problem([1, 2])]) == 2


def test_bad_oracle_choice_exits_2(problem, capsys):
    assert cli.main(["invariant", problem(GOOD), "--oracle", "magic"]) == 2
    assert "oracle" in capsys.readouterr().err


def test_too_small_bounds_exit_3(problem, capsys):
    rc = cli.main([
        "invariant", problem(GOOD), "--method", "fock", "--disconnected",
        "--w-max", "0",
    ])
    assert rc == 3
    assert "bounds" in capsys.readouterr().err


def test_unsafe_bounds_run_anyway(problem, capsys):
    rc = cli.main([
        "invariant", problem(GOOD), "--method", "fock", "--disconnected",
        "--w-max", "1", "--unsafe-bounds",
    ])
    assert rc == 0


def test_diagrams_records_and_dot(problem, tmp_path, capsys):
    dotdir = tmp_path / "dots"
    rc = cli.main([
        "diagrams", problem(GOOD), "--format", "records",
        "--dot", str(dotdir),
    ])
    out = capsys.readouterr().out
    assert rc == 0
    assert "total 1 diagrams" in out
    # records output parses back to the diagram that was drawn
    block = out.split("multiplicity")[0]
    diagram = floors.parse_records(block)
    assert diagram.points == 3
    files = sorted(dotdir.iterdir())
    assert [f.name for f in files] == ["diagram_0000.dot"]
    assert "graph d0 {" in files[0].read_text()


def test_verify_prints_pass_lines(problem, capsys):
    rc = cli.main(["verify", problem(GOOD), "--oracle", "formal"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "PASS methods agree (disconnected)" in out
    for split in range(4):
        assert f"PASS degeneration split {split}|{3 - split}" in out


def test_verify_single_split(problem, capsys):
    rc = cli.main(["verify", problem(GOOD), "--split", "1"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "degeneration split 1|2" in out
    assert "split 0|3" not in out


def test_table_oracle_through_cli(problem, tmp_path, capsys):
    table = tmp_path / "table.txt"
    table.write_text("g=0 p=0 fL= mL=1 fR= mR=1 value=5\n")
    rc = cli.main([
        "invariant", problem(GOOD), "--method", "floors",
        "--oracle", f"table:{table}",
    ])
    out = capsys.readouterr().out
    assert rc == 0
    # both weight-1 strand floors evaluate to 5 instead of 1
    assert "= 25" in out


def test_console_script_is_installed(problem):
    proc = subprocess.run(
        [sys.executable, "-m", "hirzebruch.cli", "invariant", problem(GOOD)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "methods agree" in proc.stdout
