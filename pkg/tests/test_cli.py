import json

import pytest

from boundstate.cli import DEFAULT_TOL, default_tol, main


@pytest.fixture
def manifest(tmp_path):
    f = tmp_path / "m.ini"
    f.write_text("[states]\ngaussian = catalog:gaussian\nextended = catalog:extended\nwide = exp(-x^2/8)\n")
    return f


def test_analyze_writes_one_document_per_state(manifest, tmp_path, capsys):
    out = tmp_path / "res"
    assert main(["analyze", "--manifest", str(manifest), "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["extended.json", "gaussian.json", "wide.json"]
    doc = json.loads((out / "gaussian.json").read_text())
    assert doc["moments"]["product_U"]["value"] == pytest.approx(0.5, abs=1e-8)
    ext = json.loads((out / "extended.json").read_text())
    assert ext["moments"]["mean_x2"]["status"] == "divergent"
    assert ext["moments"]["mean_x2"]["value"] == "infinite"
    assert ext["decay"]["verdict"] == "extended"


def test_analyze_is_deterministic(manifest, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["analyze", "--manifest", str(manifest), "--out", str(a)])
    main(["analyze", "--manifest", str(manifest), "--out", str(b)])
    for p in a.iterdir():
        assert p.read_bytes() == (b / p.name).read_bytes()


def test_analyze_non_normalizable_is_input_error(tmp_path, capsys):
    f = tmp_path / "x.ini"
    f.write_text("[states]\nx = x\n")
    assert main(["analyze", "--manifest", str(f), "--out", str(tmp_path / "o")]) == 1
    assert "NotNormalizable" in capsys.readouterr().err


def test_bad_manifest_lists_every_problem(tmp_path, capsys):
    f = tmp_path / "bad.ini"
    f.write_text("[states]\na = exp(-x^2\nb = foo(x)\n[units]\nhbar = -1\n")
    assert main(["analyze", "--manifest", str(f)]) == 1
    err = capsys.readouterr().err
    assert "bad.ini:2" in err and "bad.ini:3" in err and "hbar" in err


def test_invert_writes_grid(manifest, tmp_path):
    out = tmp_path / "inv"
    code = main(["invert", "--manifest", str(manifest), "--range", "-2", "2", "--points", "401", "--out", str(out)])
    assert code == 0
    meta = json.loads((out / "gaussian_potential.json").read_text())
    assert meta["max_deviation_from_closed_form"] < 1e-9
    rows = (out / "gaussian_potential.csv").read_text().splitlines()
    assert len(rows) == 402


def test_solve_harmonic(tmp_path, capsys):
    out = tmp_path / "s"
    assert main(["solve", "--potential", "x^2", "--states", "0,1", "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert [s["energy"] for s in summary["states"]] == pytest.approx([1.0, 3.0], abs=1e-6)
    assert (out / "state_1.csv").exists()


def test_solve_threshold_potential_points_to_verify(tmp_path, capsys):
    code = main(["solve", "--potential", "(2*x^2-1)/(1+x^2)^2", "--states", "0", "--out", str(tmp_path / "s")])
    assert code == 1
    assert "verify" in capsys.readouterr().err


def test_syntax_error_shows_caret(capsys):
    assert main(["solve", "--potential", "x^^2", "--states", "0"]) == 1
    err = capsys.readouterr().err
    assert "^" in err.splitlines()[-1]


def test_verify_prints_residual(capsys):
    code = main(["verify", "--potential", "(2*x^2-1)/(1+x^2)^2", "--psi", "catalog:extended", "--energy", "0"])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["residual"] < 1e-10


def test_tolerance_env(monkeypatch):
    monkeypatch.delenv("BOUNDSTATE_TOL", raising=False)
    assert default_tol() == DEFAULT_TOL
    monkeypatch.setenv("BOUNDSTATE_TOL", "1e-6")
    assert default_tol() == 1e-6
    monkeypatch.setenv("BOUNDSTATE_TOL", "junk")
    with pytest.raises(SystemExit):
        default_tol()


def test_paper_command_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["paper", "--out", str(a)]) == 0
    assert main(["paper", "--out", str(b)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == ["fig1a.csv", "fig1b.csv", "fig1c.csv", "paper_report.json"]
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert json.loads((a / "paper_report.json").read_text())["passed"] is True
