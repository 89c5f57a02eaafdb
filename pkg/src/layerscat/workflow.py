"""High-level runs: mesh a scene, build the solution by the requested
formulation, and collect the RCS curve plus diagnostics."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

from .admittance import build_dsao
from .diagnostics import (
    DiagnosticsReport,
    flops_final,
    flops_lu,
    flops_pmchwt,
    flops_solve,
)
from .errors import SceneValidationError
from .exterior import (
    Excitation,
    RcsCurve,
    SolutionFields,
    angle_grid,
    incident_vector,
    rcs_curve,
    solve_exterior,
    solve_pec_direct,
)
from .geometry import Scene, SceneMesh, build_scene_mesh
from .operators import DEFAULT_ORDER, Kernel, assemble_G, assemble_P
from .reference import mie_rcs, pmchwt_solve, pmchwt_unknown_count, stack_from_scene

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RunResult:
    formulation: str
    curve: RcsCurve
    report: DiagnosticsReport
    fields: SolutionFields | None = None


def _is_bare_pec(scene: Scene) -> bool:
    return (
        len(scene.groups) == 1
        and len(scene.groups[0].layers) == 1
        and scene.groups[0].layers[0].pec
        and not scene.shared_layers
        and scene.extension_distance == 0.0
    )


def solve_scene_dsao(
    scene: Scene,
    mesh: SceneMesh,
    freq: float,
    exc: Excitation,
    angles,
    order: int = DEFAULT_ORDER,
) -> RunResult:
    """Admittance path on a prebuilt mesh (callers control the density)."""
    kern0 = Kernel.for_medium(scene.background, freq)
    if _is_bare_pec(scene):
        db = mesh.group_meshes[0][0]
        p_hat = assemble_P(db, db, kern0, order=order)
        e_inc = incident_vector(db, exc, kern0)
        fields, cond = solve_pec_direct(p_hat, e_inc, db)
        records = []
        final_label = f"P_hat[{db.boundary_id}]"
        final_flops = flops_lu(db.segment_count) + flops_solve(db.segment_count, 1)
    else:
        ys, records = build_dsao(scene, mesh, freq, order=order)
        db = mesh.boundaries[-1]
        g_ext = assemble_G(db, db, kern0, order=order)
        e_inc = incident_vector(db, exc, kern0)
        fields, cond = solve_exterior(ys, g_ext, e_inc, db)
        final_label = f"L-G_ext.Ys[{ys.boundary_id}]"
        final_flops = flops_final(db.segment_count)
    curve = rcs_curve(fields.j, db, kern0, angles, exc.amplitude)
    n_ref = pmchwt_unknown_count(scene, mesh)
    report = DiagnosticsReport(
        records=records,
        final_label=final_label,
        final_condition=cond,
        unknowns={"dsao": db.segment_count, "pmchwt": n_ref},
        recursion_flops=sum(rec.flops for rec in records),
        final_flops=final_flops,
        pmchwt_flops=flops_pmchwt(n_ref),
    )
    return RunResult("dsao", curve, report, fields)


def solve_scene_pmchwt(
    scene: Scene,
    mesh: SceneMesh,
    freq: float,
    exc: Excitation,
    angles,
    order: int = DEFAULT_ORDER,
) -> RunResult:
    sol = pmchwt_solve(scene, mesh, freq, exc, angles, order=order)
    report = DiagnosticsReport(
        records=[],
        final_label="dense two-trace system",
        final_condition=sol.condition,
        unknowns={"pmchwt": sol.unknowns},
        recursion_flops=0.0,
        final_flops=flops_pmchwt(sol.unknowns),
        pmchwt_flops=flops_pmchwt(sol.unknowns),
    )
    return RunResult("pmchwt", sol.curve, report)


def compute_rcs(
    scene: Scene,
    freq: float,
    ppw: int,
    formulation: str,
    exc: Excitation = Excitation(),
    n_angles: int = 360,
    order: int = DEFAULT_ORDER,
) -> RunResult:
    """Parseable-scene entry point used by the CLI."""
    t0 = time.perf_counter()
    angles = angle_grid(n_angles)
    if formulation == "mie":
        stack = stack_from_scene(scene)
        curve = mie_rcs(stack, freq, exc, angles)
        result = RunResult("mie", curve, DiagnosticsReport())
    else:
        mesh = build_scene_mesh(scene, freq, ppw)
        logger.info(
            "meshed scene: %d boundaries, %d segments",
            len(mesh), mesh.total_segments,
        )
        if formulation == "dsao":
            result = solve_scene_dsao(scene, mesh, freq, exc, angles, order=order)
        elif formulation == "pmchwt":
            result = solve_scene_pmchwt(scene, mesh, freq, exc, angles, order=order)
        else:
            raise SceneValidationError(f"unknown formulation {formulation!r}")
    logger.info("%s solve finished in %.2f s", formulation, time.perf_counter() - t0)
    return result
