"""Three copper sectors inside three concentric dielectric shells, 300 MHz.

The awkward case for a dense solve: four boundaries, 700+ segments, most of
them interior.  The admittance recursion compresses everything onto the
outermost boundary; the diagnostics report shows per-depth condition
numbers and the flop-count comparison against the dense reference.
"""

import pathlib

import numpy as np

import layerscat as ls

FREQ = 300e6
OUT = pathlib.Path(__file__).resolve().parent


def build_scene():
    copper = ls.Medium(1.0, 1.0, 5.6e7)
    groups = []
    for deg in (0.0, 120.0, 240.0):
        a = np.radians(deg)
        apex = (0.06 * np.cos(a), 0.06 * np.sin(a))
        sector = ls.Sector(apex, 1.0, a - np.pi / 3, a + np.pi / 3)
        groups.append(ls.ObjectGroup((ls.Layer(sector, copper),)))
    shared = (
        ls.Layer(ls.Circle((0.0, 0.0), 1.2), ls.Medium(2.3)),
        ls.Layer(ls.Circle((0.0, 0.0), 1.5), ls.Medium(4.0)),
        ls.Layer(ls.Circle((0.0, 0.0), 1.8), ls.Medium(2.3)),
    )
    return ls.Scene(ls.VACUUM, tuple(groups), shared)


def main():
    scene = build_scene()
    exc = ls.Excitation()
    angles = ls.angle_grid(360)
    mesh = ls.build_scene_mesh(scene, FREQ, 10)
    print(f"boundaries: {[db.segment_count for db in mesh.boundaries]} segments\n")

    result = ls.solve_scene_dsao(scene, mesh, FREQ, exc, angles)
    print(result.report.render())

    dense = ls.solve_scene_pmchwt(scene, mesh, FREQ, exc, angles)
    print(f"cross-check RE vs dense reference: "
          f"{ls.relative_error(result.curve, dense.curve):.3e}")
    ls.write_rcs_csv(result.curve, OUT / "sector_multilayer.csv")
    print(f"wrote CSV curve to {OUT}")


if __name__ == "__main__":
    main()
