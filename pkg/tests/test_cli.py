import hashlib
import json

import pytest

from twophase import __version__, cli

FAST = ["--set", "radial.steps=50", "--set", "spectrum.lmax=2", "--set", "spectrum.lam_points=8",
        "--set", "spectrum.nodes=24", "--set", "variations.lmax=4"]


def run(command, out, *extra):
    return cli.main([command, "--out", str(out), *FAST, *extra], quiet=True)


def manifest_matches(out):
    man = json.loads((out / "manifest.json").read_text())
    for name, digest in man["files"].items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest
    assert set(man["files"]) | {"manifest.json"} == {p.name for p in out.iterdir()}
    return man


@pytest.mark.parametrize("command", [c for c in cli.COMMANDS if c != "suite"])
def test_commands_write_consistent_manifest(tmp_path, command):
    out = tmp_path / command
    assert run(command, out) == 0
    man = manifest_matches(out)
    assert man["command"] == command and man["library_version"] == __version__
    assert man["schema_version"] == cli.MANIFEST_SCHEMA


@pytest.mark.parametrize("command", ["equilibrium", "simulate-radial", "spectrum"])
def test_reruns_are_byte_identical(tmp_path, command):
    assert run(command, tmp_path / "a") == 0
    assert run(command, tmp_path / "b") == 0
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert files == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_invalid_config_exits_2_without_artifacts(tmp_path, capsys):
    out = tmp_path / "o"
    assert run("equilibrium", out, "--set", "geometry.n=5") == 2
    assert not out.exists()
    assert "configuration error" in capsys.readouterr().err


def test_model_error_exits_2(tmp_path, capsys):
    # a sphere that does not fit in the container
    assert run("equilibrium", tmp_path / "o", "--set", "geometry.radius=3.0") == 2
    assert "invalid input" in capsys.readouterr().err


def test_numerical_failure_exits_3(tmp_path, capsys):
    # the radial solver leaves the admissible temperature range
    code = run("simulate-radial", tmp_path / "o", "--set", "radial.family=two_constant",
               "--set", "radial.amplitude=1.5", "--set", "geometry.theta=1.9")
    err = capsys.readouterr().err
    assert code == 3
    assert "numerical failure in simulate_radial" in err


def test_validate_materials_flags_violations(tmp_path):
    out = tmp_path / "o"
    assert run("validate-materials", out, "--set", "materials.phase2.rho=2.0") == 2
    report = json.loads((out / "validation.json").read_text())
    assert report["ok"] is False


def test_spectrum_with_zero_kinetic_coefficient(tmp_path):
    out = tmp_path / "o"
    assert run("spectrum", out, "--set", "materials.surface.gamma.value=0.0", "--set", "spectrum.direct=false") == 0
    res = json.loads((out / "spectrum.json").read_text())
    assert res["dispersion"] == "skipped: GammaZero"
    assert res["modes"]["1"]["roots"] == "skipped: GammaZero"


def test_output_directory_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(f"output:\n  dir: {tmp_path / 'from_config'}\n")
    monkeypatch.setenv("TWOPHASE_OUT", str(tmp_path / "from_env"))
    assert cli.main(["equilibrium", "--config", str(cfg)], quiet=True) == 0
    assert (tmp_path / "from_env" / "manifest.json").exists()
    assert cli.main(["equilibrium", "--config", str(cfg), "--out", str(tmp_path / "flag")], quiet=True) == 0
    assert (tmp_path / "flag" / "manifest.json").exists()
    monkeypatch.delenv("TWOPHASE_OUT")
    assert cli.main(["equilibrium", "--config", str(cfg)], quiet=True) == 0
    assert (tmp_path / "from_config" / "manifest.json").exists()


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_suite_subset(tmp_path, capsys):
    out = tmp_path / "o"
    code = cli.main(["suite", "--out", str(out), "--set", "suite.checks=[1]", "--set", "suite.thermo_draws=50"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines and all(line.startswith("PASS 1") for line in lines)
    manifest_matches(out)
