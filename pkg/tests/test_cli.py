import csv
import io
import json

import pytest

from stabdistill.cli import CSV_COLUMNS, RANDOM_COLUMNS, grid, main
from stabdistill.states import BdsState, isotropic, save_state

from conftest import WORKED_STATE


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("d,rows", [(2, 15), (3, 40)])
def test_enumerate(capsys, d, rows):
    code, out, err = run(capsys, "enumerate", "--d", str(d))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "index,k1,k2,l1,l2" and len(lines) == rows + 1
    assert f"{rows} stabilizers" in err


def test_enumerate_non_prime(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["enumerate", "--d", "4"])
    assert exc.value.code == 2
    assert "d must be prime" in capsys.readouterr().err


def test_distill_worked_state(tmp_path, capsys):
    path = tmp_path / "b.json"
    save_state(BdsState.from_list(WORKED_STATE, 3), path)
    code, out, _ = run(capsys, "distill", "--state", str(path))
    data = json.loads(out)
    assert code == 0 and data["reached_target"]
    assert data["records"][0]["fidelity_after"] == pytest.approx(0.63, abs=0.01)


def test_distill_exit_codes(tmp_path, capsys):
    iso = tmp_path / "iso.json"
    save_state(isotropic(3, 0.26), iso)
    assert run(capsys, "distill", "--state", str(iso))[0] == 0
    flat = tmp_path / "flat.json"
    save_state(BdsState.from_list([1 / 9] * 9, 3), flat)
    code, out, _ = run(capsys, "distill", "--state", str(flat))
    assert code == 1 and json.loads(out)["reached_target"] is False
    bad = tmp_path / "bad.json"
    bad.write_text('{"d": 3, "kind": "bds", "bell_probs": [0.5, 0.5]}')
    assert run(capsys, "distill", "--state", str(bad))[0] == 2
    assert run(capsys, "distill", "--state", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "distill")[0] == 2
    assert run(capsys, "distill", "--state", str(iso), "--target", "1.5")[0] == 2


def test_distill_out_file(tmp_path, capsys):
    iso = tmp_path / "iso.json"
    save_state(isotropic(2, 0.6), iso)
    dest = tmp_path / "run.json"
    code, out, _ = run(capsys, "distill", "--state", str(iso), "--out", str(dest))
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["reached_target"]


def test_grid():
    assert grid(0, 1, 0.25) == [0, 0.25, 0.5, 0.75, 1.0]
    assert len(grid(0, 1, 0.01)) == 101
    assert grid(0, 1, 0.01)[7] == 0.07


def test_sweep_isotropic(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "isotropic", "--d", "3", "--step", "0.05")
    assert code == 0 and "\r" not in out
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == CSV_COLUMNS
    assert [float(r["parameter"]) for r in rows] == grid(0, 1, 0.05)
    for r in rows:
        assert (float(r["efficiency"]) > 0) == (float(r["input_fidelity"]) > 1 / 3 + 1e-12)
    assert rows[-1]["n_iterations"] == "0" and float(rows[-1]["efficiency"]) == 1


def test_sweep_byte_identical(capsys):
    args = ["sweep", "--family", "offline", "--p-from", "0.5", "--p-to", "1", "--step", "0.1"]
    first = run(capsys, *args)[1]
    assert run(capsys, *args)[1] == first
    assert run(capsys, *args, "--workers", "2")[1] == first


def test_sweep_random(capsys):
    args = ["sweep", "--family", "random", "--d", "2", "--samples", "2", "--bins", "0.5", "--seed", "3"]
    code, out, _ = run(capsys, *args)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and list(rows[0]) == RANDOM_COLUMNS
    assert [r["bin"] for r in rows] == ["0", "0", "1", "1"]
    for r in rows:
        lo = 0.5 * int(r["bin"])
        assert lo <= float(r["input_fidelity"]) < lo + 0.5
    mean = (float(rows[2]["efficiency"]) + float(rows[3]["efficiency"])) / 2
    assert float(rows[2]["bin_mean_efficiency"]) == pytest.approx(mean)
    assert run(capsys, *args)[1] == out
    assert run(capsys, *args[:-1], "4")[1] != out


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep"],
        ["sweep", "--family", "offline", "--d", "2"],
        ["sweep", "--family", "isotropic", "--step", "0"],
        ["sweep", "--family", "isotropic", "--p-from", "-0.5"],
        ["sweep", "--family", "isotropic", "--p-from", "0.8", "--p-to", "0.2"],
        ["sweep", "--family", "random", "--samples", "0"],
        ["sweep", "--family", "random", "--step", "0.1"],
    ],
)
def test_sweep_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "algebra", "--d", "5")
    assert code == 0 and "all checks passed" in out
    assert all(line.startswith("[algebra] PASS") for line in out.splitlines()[:-1])
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--d", "2,4"])
    assert exc.value.code == 2


def test_verify_maximality_seed(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "maximality", "--d", "3", "--seed", "7")
    assert code == 0 and "PASS" in out


def test_verify_failure_exit(capsys, monkeypatch):
    import stabdistill.verify as verify

    monkeypatch.setitem(verify.SUITES, "algebra", lambda d, seed=0: [verify.Check("broken", 1.0, 0.0)])
    code, out, _ = run(capsys, "verify", "--suite", "algebra", "--d", "2")
    assert code == 1 and "FAIL" in out
