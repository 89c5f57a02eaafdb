"""Scene-file parsing and CSV serialization tests."""

import numpy as np
import pytest

import layerscat as ls
from layerscat.errors import SceneParseError, SceneValidationError
from layerscat.sceneio import _sci9

DIELECTRIC_CYLINDER = """
# homogeneous cylinder, eps_r 4
background: 1.0 1.0 0.0
layer 1: circle(0, 0, 1.0) 4.0 1.0 0.0
"""

COATED_PEC = """
background: 1.0 1.0 0.0
layer 1: circle(0, 0, 0.010) 1.0 1.0 0.0 pec
layer 2: circle(0, 0, 0.014) 2.3 1.0 0.0
"""

COATED_LOSSY = """
background: 1.0 1.0 0.0
layer 1: circle(0, 0, 0.010) 1.0 1.0 5.6e7
layer 2: circle(0, 0, 0.014) 2.3 1.0 0.0
"""

THREE_SECTOR = """
# three rotated sectors inside three shared dielectric shells
background: 1.0 1.0 0.0
group:
layer 1: sector(0.06, 0, 1.0, -60, 60) 1.0 1.0 5.6e7
end
group:
layer 1: sector(-0.03, 0.05196152422706631, 1.0, 60, 180) 1.0 1.0 5.6e7
end
group:
layer 1: sector(-0.03, -0.05196152422706631, 1.0, 180, 300) 1.0 1.0 5.6e7
end
layer 2: circle(0, 0, 1.2) 2.3 1.0 0.0
layer 3: circle(0, 0, 1.5) 4.0 1.0 0.0
layer 4: circle(0, 0, 1.8) 2.3 1.0 0.0
"""


# ---------------------------------------------------------------- parsing

def test_parse_single_cylinder():
    scene = ls.parse_scene_text(DIELECTRIC_CYLINDER)
    assert len(scene.groups) == 1 and not scene.shared_layers
    (layer,) = scene.layer_chain
    assert isinstance(layer.boundary, ls.Circle)
    assert layer.boundary.radius == 1.0
    assert layer.medium.eps_r == 4.0 and not layer.pec
    assert scene.extension_distance == 0.0
    assert scene.background.eps_r == 1.0


def test_parse_coated_pec_and_lossy_variants():
    pec = ls.parse_scene_text(COATED_PEC)
    assert pec.layer_chain[0].pec
    assert pec.layer_chain[1].medium.eps_r == 2.3
    assert pec.innermost_is_pec
    lossy = ls.parse_scene_text(COATED_LOSSY)
    assert not lossy.layer_chain[0].pec
    assert lossy.layer_chain[0].medium.sigma == 5.6e7


def test_parse_three_sector_multilayer():
    scene = ls.parse_scene_text(THREE_SECTOR)
    assert len(scene.groups) == 3
    assert len(scene.shared_layers) == 3
    for g in scene.groups:
        assert len(g.layers) == 1
        assert isinstance(g.layers[0].boundary, ls.Sector)
        assert g.layers[0].medium.sigma == 5.6e7
    radii = [lay.boundary.radius for lay in scene.shared_layers]
    assert radii == [1.2, 1.5, 1.8]


def test_parse_extension_directive():
    scene = ls.parse_scene_text(DIELECTRIC_CYLINDER + "extension: 0.25\n")
    assert scene.extension_distance == 0.25


def test_sector_angles_in_degrees():
    scene = ls.parse_scene_text(
        "background: 1 1 0\nlayer 1: sector(0, 0, 1.0, 0, 120) 4.0 1.0 0\n"
    )
    sec = scene.layer_chain[0].boundary
    assert sec.end_angle - sec.start_angle == pytest.approx(2 * np.pi / 3)


def test_parse_scene_from_file_prefixes_path(tmp_path):
    p = tmp_path / "scene.txt"
    p.write_text(DIELECTRIC_CYLINDER)
    scene = ls.parse_scene(p)
    assert scene.layer_chain[0].medium.eps_r == 4.0
    bad = tmp_path / "bad.txt"
    bad.write_text("background: 1 1 0\nwhat is this\n")
    with pytest.raises(SceneParseError) as info:
        ls.parse_scene(bad)
    assert "bad.txt" in str(info.value)
    assert info.value.line_no == 2


@pytest.mark.parametrize(
    "text, line_no",
    [
        ("background: 1 1 0\nbackground: 1 1 0\n", 2),
        ("background: 1 1 0\nlayer 1: blob(1) 1 1 0\n", 2),
        ("background: 1 1 0\nlayer 1: circle(0, 0) 4 1 0\n", 2),
        ("background: 1 1 0\nlayer 1: circle(0, 0, x) 4 1 0\n", 2),
        ("background: 1 1 0\nlayer 1: polygon(0, 0, 1, 0, 1) 4 1 0\n", 2),
        ("background: 1 1 0\nlayer 1: circle(0, 0, 1) 4 1\n", 2),
        ("background: 1 1 0\nlayer 2: circle(0, 0, 1) 4 1 0\n", 2),
        ("background: 1 1 0\nend\n", 2),
        ("background: 1 1 0\nextension: -1\n", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text, line_no):
    with pytest.raises(SceneParseError) as info:
        ls.parse_scene_text(text)
    assert info.value.line_no == line_no


def test_parse_structural_errors():
    with pytest.raises(SceneParseError):
        ls.parse_scene_text("layer 1: circle(0,0,1) 4 1 0\n")  # no background
    with pytest.raises(SceneParseError):
        ls.parse_scene_text("background: 1 1 0\n")  # no layers
    with pytest.raises(SceneParseError):
        ls.parse_scene_text("background: 1 1 0\ngroup:\nlayer 1: circle(0,0,1) 4 1 0\n")
    with pytest.raises(SceneParseError):
        ls.parse_scene_text("background: 1 1 0\ngroup:\nend\n")


def test_parsed_medium_validation_still_applies():
    with pytest.raises(SceneValidationError):
        ls.parse_scene_text("background: 1 1 0\nlayer 1: circle(0,0,1) -4 1 0\n")


def test_run_config_validation():
    kw = dict(scene_path="s", freq=1e9, ppw=10, out_path="o")
    ls.RunConfig(formulation="dsao", **kw)
    with pytest.raises(SceneValidationError):
        ls.RunConfig(formulation="fem", **kw)
    with pytest.raises(SceneValidationError):
        ls.RunConfig(formulation="dsao", angles=0, **kw)
    with pytest.raises(SceneValidationError):
        ls.RunConfig(
            scene_path="s", freq=-1.0, ppw=10, formulation="dsao", out_path="o"
        )


# ---------------------------------------------------------------- CSV

def sample_curve(n=360):
    ang = ls.angle_grid(n)
    # several decades of dynamic range, including a deep null
    sig = 10.0 ** (3.0 * np.sin(3 * ang)) * 1e-2
    sig[n // 2] = 0.0
    return ls.RcsCurve(ang, sig)


def test_csv_structure(tmp_path):
    path = tmp_path / "out.csv"
    ls.write_rcs_csv(sample_curve(), path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert len(lines) == 361
    assert lines[0] == "phi_deg,sigma_m,sigma_db"
    assert lines[1].startswith("0.000000,")
    assert lines[2].startswith("1.000000,")


def test_csv_zero_curve(tmp_path):
    path = tmp_path / "zero.csv"
    n = 8
    ls.write_rcs_csv(ls.RcsCurve(ls.angle_grid(n), np.zeros(n)), path)
    for line in path.read_text().splitlines()[1:]:
        _, sig, db = line.split(",")
        assert sig == "0.000000000e0"
        assert db == "-inf"


def test_csv_round_trip(tmp_path):
    path = tmp_path / "rt.csv"
    curve = sample_curve()
    ls.write_rcs_csv(curve, path)
    back = ls.read_rcs_csv(path)
    assert np.allclose(back.angles, curve.angles, atol=1e-12)
    nz = curve.sigma > 0
    assert np.max(np.abs(back.sigma[nz] - curve.sigma[nz]) / curve.sigma[nz]) < 1e-8
    assert np.all(back.sigma[~nz] == 0.0)


def test_csv_byte_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    ls.write_rcs_csv(sample_curve(), a)
    ls.write_rcs_csv(sample_curve(), b)
    assert a.read_bytes() == b.read_bytes()


def test_csv_rejects_foreign_header(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("angle,value\n0,1\n")
    with pytest.raises(SceneParseError):
        ls.read_rcs_csv(p)


def test_sci9_formatting():
    assert _sci9(0.0) == "0.000000000e0"
    assert _sci9(1.0) == "1.000000000e0"
    assert _sci9(-3.5) == "-3.500000000e0"
    assert _sci9(78.84941562) == "7.884941562e1"
    assert _sci9(1e-30) == "1.000000000e-30"
    assert _sci9(float("-inf")) == "-inf"
    # mantissa rounding that carries into the next decade
    assert _sci9(9.9999999999) == "1.000000000e1"
    # output is locale-independent plain ASCII
    assert _sci9(0.0005) == "5.000000000e-4"
