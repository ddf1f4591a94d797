from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from qleak.cli import main, parse_subspace_selector
from qleak.errors import InputError
from qleak.gf import GF
from qleak.subspace import span, zero_space

F2 = GF(2)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -- selectors -----------------------------------------------------------------

@pytest.mark.parametrize(
    "text,rows",
    [
        ("e2+e3", [(0, 1, 1, 0)]),
        ("(1,0,1,1)", [(1, 0, 1, 1)]),
        ("e2,e4", [(0, 1, 0, 0), (0, 0, 0, 1)]),
        ("e1, (0,1,1,0)", [(1, 0, 0, 0), (0, 1, 1, 0)]),
        ("e1+e1", []),
    ],
)
def test_selectors(text, rows):
    assert parse_subspace_selector(text, 4, F2) == span(rows, 4, F2)


def test_selector_coefficients_and_zero():
    F3 = GF(3)
    assert parse_subspace_selector("2e1+e3", 3, F3) == span([(2, 0, 1)], 3, F3)
    assert parse_subspace_selector("0", 3, F3) == zero_space(F3, 3)


@pytest.mark.parametrize("text", ["", "e9", "e0", "(1,0)", "(1,2,0,0)", "x1", "(1,0,1,1", "3e1"])
def test_bad_selectors(text):
    with pytest.raises(InputError):
        parse_subspace_selector(text, 4, F2)


# -- commands ------------------------------------------------------------------

def test_port_command(capsys):
    code, out, _ = run(capsys, "port", "--code", "example421", "--p0", "e1")
    assert code == 0
    d = json.loads(out)
    assert {V["label"] for V in d["gamma_min"]} == {"<e2+e4>", "<e2+e3>", "<e3+e4>"}
    assert d["flags"]["perfect"] and not d["flags"]["connected"]
    assert d["secret_rank"] == {"num": 1, "den": 1, "unit": "rank"}


def test_leakage_sweep_csv(capsys):
    code, out, _ = run(capsys, "leakage", "--code", "example421", "--p0", "e1", "--sweep", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 67
    row = next(r for r in rows if r["rowspace"] == "<e2+e3>")
    assert row["H_x_given_BC"] == "0.000000" and row["leakage_logq"] == "2" and row["H_unit"] == "bits"
    row = next(r for r in rows if r["rowspace"] == "<e2>")
    assert row["H_x_given_BC"] == "2.000000"


def test_entropy_routes_and_sampling(capsys):
    code, out, _ = run(capsys, "entropy", "--code", "example421", "--p0", "e1", "--obs", "e2", "--samples", "20000", "--seed", "1")
    assert code == 0
    d = json.loads(out)
    assert {k: v["num"] for k, v in d["cond_entropy"].items()} == {"direct": 2, "padded": 2, "dual_dimension": 2, "port": 2}
    assert abs(d["monte_carlo"]["bits"] - 2) < 0.05


def test_entropy_quotients(capsys):
    code, out, _ = run(capsys, "entropy", "--code", "example421", "--v", "e1", "--v", "e3,e4")
    assert code == 0
    d = json.loads(out)["quotient_entropies"]
    assert d["identities_hold"]
    assert [h["num"] for h in d["marginals"]] == [2, 4]


def test_rank_table_csv(capsys):
    code, out, _ = run(capsys, "rank-table", "--code", "example424", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 67 and rows[-1]["rank_num"] == "2"


def test_minimal_command(capsys):
    code, out, _ = run(capsys, "minimal", "--code", "example424", "--dual", "--p0", "e1")
    assert code == 0
    d = json.loads(out)
    assert d["classes"] == 9 and d["is_minimal_code"]
    assert len(d["massey"]["image"]) == 3 and len(d["massey"]["gamma_min"]) == 5
    assert d["massey"]["passed"] is False


def test_gabidulin_command(capsys):
    code, out, _ = run(capsys, "gabidulin", "--n", "4", "--k", "2", "--m", "4")
    assert code == 0
    d = json.loads(out)
    assert d["matrix_dim"] == 8 and d["min_rank_distance"] == 3 and d["mrd"]


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "axioms", "--seed", "7", "--count", "5")
    assert code == 0
    assert json.loads(out)["checked"] == 5


def test_out_file(tmp_path, capsys):
    target = tmp_path / "port.json"
    code, out, _ = run(capsys, "port", "--code", "example421", "--p0", "e1", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["code"] == "example421"


# -- exit codes ------------------------------------------------------------------

def test_exit_input_errors(capsys, tmp_path):
    assert run(capsys, "port", "--code", str(tmp_path / "none.json"), "--p0", "e1")[0] == 2
    assert run(capsys, "port", "--code", "example421", "--p0", "e9")[0] == 2
    assert run(capsys, "port", "--code", "example421")[0] == 2
    assert run(capsys, "minimal", "--code", "example421")[0] == 2
    assert run(capsys, "gabidulin", "--n", "4", "--k", "2", "--m", "3")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, _, err = run(capsys, "rank-table", "--code", str(bad))
    assert code == 2 and "malformed" in err


def test_exit_budget(capsys):
    code, _, err = run(capsys, "rank-table", "--code", "example421", "--budget-subspaces", "10")
    assert code == 3 and "budget" in err


def test_exit_verification_and_replay(capsys, tmp_path):
    code, _, err = run(capsys, "verify", "--suite", "massey", "--code", "example424")
    assert code == 4
    cex = json.loads(err.splitlines()[1])
    assert cex["suite"] == "massey"
    path = tmp_path / "cex.json"
    path.write_text(json.dumps(cex))
    code, _, err2 = run(capsys, "verify", "--suite", "massey", "--code", str(path))
    assert code == 4
    assert json.loads(err2.splitlines()[1]) == cex


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "nope"])
    assert exc.value.code == 2


# -- determinism -----------------------------------------------------------------

def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "qleak", *argv], capture_output=True, check=False)


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "--suite", "leakage-thm", "--seed", "3", "--count", "4"),
        ("leakage", "--code", "example421", "--p0", "e1", "--sweep", "--format", "csv"),
        ("entropy", "--code", "example421", "--p0", "e1", "--obs", "e2", "--samples", "5000", "--seed", "9"),
    ],
)
def test_byte_identical_runs(argv):
    a, b = _cli(*argv), _cli(*argv)
    assert a.returncode == 0
    assert a.stdout == b.stdout and a.stdout
