import json
import subprocess
import sys

import pytest

from richtangent import cli

TERNARY = {"kind": "cantor", "family": "ternary", "depth": 9}


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture
def files(tmp_path):
    (tmp_path / "x.csv").write_text("n=3\n0,1,1\n1,0,1\n1,1,0\n")
    (tmp_path / "y.csv").write_text("n=2\n0,1/2\n1/2,0\n")
    (tmp_path / "a.csv").write_text("0\n1/2\n")
    (tmp_path / "b.csv").write_text("0\n1\n")
    (tmp_path / "cantor.json").write_text(json.dumps(TERNARY))
    (tmp_path / "recip.json").write_text(json.dumps({"kind": "points", "points": [[0]] + [[f"1/{n}"] for n in range(1, 65)]}))
    return tmp_path


def test_gh_identical_prints_zero(files, capsys):
    assert run("gh", "--a", files / "x.csv", "--b", files / "x.csv") == 0
    assert capsys.readouterr().out.strip() == "0"


def test_gh_value(files, capsys):
    assert run("gh", "--a", files / "x.csv", "--b", files / "y.csv") == 0
    assert capsys.readouterr().out.strip() == "1/2"


def test_gh_budget_exit(files):
    assert run("gh", "--a", files / "x.csv", "--b", files / "y.csv", "--budget-gh", 1) in (0, 3)


def test_hausdorff(files, capsys):
    assert run("hausdorff", "--a", files / "a.csv", "--b", files / "b.csv") == 0
    assert "1/2" in capsys.readouterr().out


def test_invalid_matrix_exit_one(files):
    (files / "bad.csv").write_text("n=2\n0,1\n2,0\n")
    assert run("gh", "--a", files / "bad.csv", "--b", files / "x.csv") == 1


def test_missing_file_exit_one(files):
    assert run("hausdorff", "--a", files / "nope.csv", "--b", files / "b.csv") == 1


def test_bad_tolerance_exit_one():
    with pytest.raises(SystemExit) as e:
        run("moran", "--ratios", "1/3,1/3", "--tol", "1.5")
    assert e.value.code == 1


def test_moran(capsys):
    assert run("moran", "--ratios", "1/3,1/3") == 0
    assert abs(float(capsys.readouterr().out.split()[0]) - 0.6309297535772) < 1e-9


def test_boxdim_report(files, tmp_path):
    out = tmp_path / "o"
    assert run("boxdim", "--construction", files / "cantor.json", "--depths", "4:9", "--out", out) == 0
    assert (out / "boxdim.csv").read_text().startswith("k,")


def test_porosity_and_scan(files, tmp_path):
    out = tmp_path / "o"
    assert run("porosity", "--construction", files / "recip.json", "--x", "0", "--radii", "1/2,1/4,1/8", "--out", out) == 0
    assert run("scan", "--construction", files / "recip.json", "--x", "0", "--geometric", "1,1/2,4", "--out", out) == 0


def test_zoom(files, capsys):
    assert run("zoom", "--construction", files / "recip.json", "--x", "0", "--t", "1/2", "--exact") == 0


def test_verify_sigma_tangent():
    assert run("verify", "sigma-tangent", "--depth", 3, "--level", 2) == 0


@pytest.mark.parametrize("which", ["pisigma-structure", "pisigma-tangent", "c0", "photograph", "kinf", "zero-tangent", "whitney"])
def test_verify_passes(which):
    assert run("verify", which) == 0


def test_unknown_pattern_exit_one():
    assert run("verify", "pisigma-tangent", "--pattern", "0;1/3") == 1


def test_point_budget_exit_three():
    assert run("build", "pisigma", "--depth", 6, "--budget-points", 5) == 3


def test_failed_certification_exit_two(monkeypatch):
    monkeypatch.setitem(cli.VERIFIERS, "c0", lambda args: ([{"n": 1, "pass": False}], False, True))
    assert run("verify", "c0") == 2


@pytest.mark.parametrize("kind", ["cantor", "c0", "global", "whitney", "zero-tangent"])
def test_build_writes_artifacts(kind, tmp_path):
    assert run("build", kind, "--out", tmp_path) == 0
    assert (tmp_path / f"{kind}.csv").exists() and (tmp_path / f"{kind}.json").exists()


def test_runs_are_byte_identical(files, tmp_path):
    def go(d):
        run("build", "cantor", "--config", files / "cantor.json", "--out", d, "--exact")
        run("verify", "c0", "--out", d)
        run("boxdim", "--construction", files / "cantor.json", "--out", d)
        run("export-svg", "--profile", d / "c0.csv", "--x-col", "n", "--y", "dH", "--out", d)
        return {p.name: p.read_bytes() for p in sorted(d.iterdir())}

    a, b = go(tmp_path / "1"), go(tmp_path / "2")
    assert a.keys() == b.keys() and len(a) >= 5
    assert a == b


def test_console_entry_point(files):
    r = subprocess.run([sys.executable, "-m", "richtangent", "gh", "--a", str(files / "x.csv"), "--b", str(files / "x.csv")], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "0"
