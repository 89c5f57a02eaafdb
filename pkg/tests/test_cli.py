"""End-to-end CLI tests: flag parsing, exit codes, and output files."""

import subprocess
import sys

import numpy as np
import pytest

import layerscat as ls
from layerscat import cli
from layerscat.errors import SingularMatrixError
from layerscat.sceneio import RunConfig

SCENE = """
background: 1.0 1.0 0.0
layer 1: circle(0, 0, 1.0) 4.0 1.0 0.0
"""

POLYGON_SCENE = """
background: 1.0 1.0 0.0
layer 1: polygon(0, 0, 1, 0, 1, 1, 0, 1) 4.0 1.0 0.0
"""


@pytest.fixture()
def scene_file(tmp_path):
    p = tmp_path / "cylinder.scene"
    p.write_text(SCENE)
    return p


def make_config(scene_path, out_path, **kw):
    base = dict(
        scene_path=str(scene_path),
        freq=300e6,
        ppw=6,
        formulation="dsao",
        out_path=str(out_path),
        angles=90,
    )
    base.update(kw)
    return RunConfig(**base)


def test_parser_accepts_documented_flags():
    args = cli.build_parser().parse_args(
        [
            "--scene", "s.scene",
            "--freq", "3e8",
            "--ppw", "10",
            "--formulation", "dsao",
            "--angles", "180",
            "--out", "o.csv",
            "--diagnostics", "d.txt",
            "--extension-d", "0.05",
        ]
    )
    config = cli.config_from_args(args)
    assert config.freq == 3e8 and config.ppw == 10
    assert config.extension_override == 0.05
    assert config.diagnostics_path == "d.txt"


def test_parser_requires_core_flags():
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(["--scene", "s"])


def test_run_success_writes_csv_and_diagnostics(tmp_path, scene_file):
    out = tmp_path / "out.csv"
    diag = tmp_path / "diag.txt"
    code = cli.run(make_config(scene_file, out, diagnostics_path=str(diag)))
    assert code == cli.EXIT_OK
    curve = ls.read_rcs_csv(out)
    assert len(curve.angles) == 90
    text = diag.read_text()
    assert "P[g0.gamma1]" in text
    assert "flop estimates" in text


def test_run_mie_and_pmchwt_agree_with_dsao(tmp_path, scene_file):
    curves = {}
    for form in ("dsao", "pmchwt", "mie"):
        out = tmp_path / f"{form}.csv"
        assert cli.run(make_config(scene_file, out, formulation=form)) == 0
        curves[form] = ls.read_rcs_csv(out)
    assert ls.relative_error(curves["dsao"], curves["mie"]) < 5e-2
    assert ls.relative_error(curves["pmchwt"], curves["mie"]) < 5e-2


def test_run_is_byte_deterministic(tmp_path, scene_file):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.run(make_config(scene_file, a)) == 0
    assert cli.run(make_config(scene_file, b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_extension_override_adds_fictitious_boundary(tmp_path, scene_file):
    out = tmp_path / "ext.csv"
    diag = tmp_path / "ext_diag.txt"
    config = make_config(
        scene_file, out, ppw=10, diagnostics_path=str(diag), extension_override=0.2
    )
    assert cli.run(config) == cli.EXIT_OK
    assert "gamma_ext" in diag.read_text()
    base = tmp_path / "base.csv"
    assert cli.run(make_config(scene_file, base, ppw=10)) == 0
    # pushing the solve boundary outward must not change the physics much
    assert ls.relative_error(ls.read_rcs_csv(out), ls.read_rcs_csv(base)) < 5e-2


def test_exit_parse_error(tmp_path):
    bad = tmp_path / "bad.scene"
    bad.write_text("background: 1 1 0\nlayer 1: blob(1, 2) 4 1 0\n")
    assert cli.run(make_config(bad, tmp_path / "o.csv")) == cli.EXIT_PARSE


def test_exit_validation_mie_on_polygon(tmp_path):
    poly = tmp_path / "poly.scene"
    poly.write_text(POLYGON_SCENE)
    code = cli.run(make_config(poly, tmp_path / "o.csv", formulation="mie"))
    assert code == cli.EXIT_VALIDATION


def test_exit_validation_bad_mesh_density(tmp_path, scene_file):
    assert cli.run(make_config(scene_file, tmp_path / "o.csv", ppw=3)) == (
        cli.EXIT_VALIDATION
    )


def test_exit_singular_matrix(tmp_path, scene_file, monkeypatch):
    def boom(*args, **kwargs):
        raise SingularMatrixError("P[g0.gamma1]")

    monkeypatch.setattr(cli, "compute_rcs", boom)
    assert cli.run(make_config(scene_file, tmp_path / "o.csv")) == cli.EXIT_SINGULAR


def test_exit_io_missing_scene(tmp_path):
    missing = tmp_path / "nope.scene"
    assert cli.run(make_config(missing, tmp_path / "o.csv")) == cli.EXIT_IO


def test_exit_io_unwritable_output(scene_file, tmp_path):
    out = tmp_path / "no_such_dir" / "o.csv"
    assert cli.run(make_config(scene_file, out)) == cli.EXIT_IO


def test_main_exits_with_run_code(tmp_path, scene_file):
    out = tmp_path / "o.csv"
    argv = [
        "--scene", str(scene_file),
        "--freq", "3e8",
        "--ppw", "6",
        "--formulation", "mie",
        "--angles", "45",
        "--out", str(out),
    ]
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == 0
    assert out.exists()


def test_module_entry_point_help():
    proc = subprocess.run(
        [sys.executable, "-m", "layerscat", "--help"],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 0
    for flag in ("--scene", "--freq", "--ppw", "--formulation", "--angles",
                 "--out", "--diagnostics", "--extension-d"):
        assert flag in proc.stdout
