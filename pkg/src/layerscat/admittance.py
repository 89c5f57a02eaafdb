"""Surface admittance construction: one boundary, recursion over nested
layers, PEC cores, multi-object unions, and the fictitious-boundary extension.

The operator Y_s on a boundary maps the pulse coefficients of the total
tangential E field to an equivalent surface current J (J = Y_s E) that, when
radiating in the surrounding medium, reproduces the exterior scattered field
while the interior is replaced by that surrounding medium.

Per depth i (gamma_prev inside gamma_this, region medium between them):
    tested on gamma_prev (full trace):
        L_prev E_prev = U_prev E_this + P_prev H_this + G_prev J_prev
    tested on gamma_this (half trace):
        1/2 L_this E_this = U_this E_this + P_this H_this + G_this J_prev
    with J_prev = Ys_prev E_prev; eliminating E_prev and H_this yields
        Y = (P_this + F P_prev)^-1 (1/2 L - U_this - F U_prev),
        F = G_this Ys_prev (L_prev - G_prev Ys_prev)^-1,
    and Y_s = Y - Y_hat with Y_hat = P_hat^-1 (1/2 L - U_hat) built from the
    surrounding medium's kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .diagnostics import (
    LayerSolveRecord,
    condition_number,
    flops_layer_step,
    flops_pec_coated,
    flops_sao,
    merge_same_depth,
)
from .errors import SceneValidationError, SingularMatrixError
from .geometry import Scene, SceneMesh, concatenate_boundaries
from .operators import DEFAULT_ORDER, Kernel, OperatorSet, build_operator_set


@dataclass(frozen=True, eq=False)
class AdmittanceOperator:
    """Y_s matrix on one boundary (J = Y_s E), with its provenance."""

    matrix: np.ndarray
    boundary_id: str
    depth: int

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("Y_s must be square")

    @property
    def size(self):
        return self.matrix.shape[0]


def _solve(label, a, b):
    try:
        return np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(label) from exc


def sao_single(ops: OperatorSet) -> np.ndarray:
    """Interior field-to-current map on one boundary: P^-1 (1/2 L - U)."""
    rhs = 0.5 * ops.L - ops.U
    return _solve(f"P[{ops.row_id}]", ops.P, rhs)


def dsao_single(
    ops_in: OperatorSet, ops_hat: OperatorSet, depth: int = 1
) -> tuple[AdmittanceOperator, LayerSolveRecord]:
    """Y_s on an innermost boundary: interior minus surrounding-medium map."""
    y = sao_single(ops_in)
    y_hat = sao_single(ops_hat)
    bid = ops_in.row_id
    m = y.shape[0]
    rec = LayerSolveRecord(
        depth=depth,
        boundary_id=bid,
        conditions=(
            (f"P[{bid}]", condition_number(ops_in.P)),
            (f"P_hat[{bid}]", condition_number(ops_hat.P)),
        ),
        flops=flops_sao(m),
    )
    return AdmittanceOperator(y - y_hat, bid, depth), rec


def layer_step(
    ys_prev: AdmittanceOperator,
    ops_prev_row: OperatorSet,
    ops_this_row: OperatorSet,
    ops_hat: OperatorSet,
    depth: int,
) -> tuple[AdmittanceOperator, LayerSolveRecord]:
    """Absorb the admittance of gamma_prev into a new Y_s on gamma_this."""
    bid_prev = ys_prev.boundary_id
    bid = ops_this_row.row_id
    ys = ys_prev.matrix
    v_inv = ops_prev_row.L - ops_prev_row.G @ ys
    gy = ops_this_row.G @ ys
    f = _solve(f"V[{bid_prev}]", v_inv.T, gy.T).T
    ya = ops_this_row.P + f @ ops_prev_row.P
    yb = 0.5 * ops_this_row.L - ops_this_row.U - f @ ops_prev_row.U
    y = _solve(f"P+F.P_prev[{bid}]", ya, yb)
    y_hat = sao_single(ops_hat)
    rec = LayerSolveRecord(
        depth=depth,
        boundary_id=bid,
        conditions=(
            (f"V[{bid_prev}]", condition_number(v_inv)),
            (f"P+F.P_prev[{bid}]", condition_number(ya)),
            (f"P_hat[{bid}]", condition_number(ops_hat.P)),
        ),
        flops=flops_layer_step(ys.shape[0], y.shape[0]),
    )
    return AdmittanceOperator(y - y_hat, bid, depth), rec


def pec_coated(
    ops_core_row: OperatorSet,
    ops_this_row: OperatorSet,
    ops_hat: OperatorSet,
    depth: int,
) -> tuple[AdmittanceOperator, LayerSolveRecord]:
    """Y_s on the first boundary enclosing a PEC core.

    The vanishing core trace (E = 0 on gamma_core) turns the tested-on-core
    equation into a map from the coat-region traces to the core current:
        J_core = -G_core^-1 (U_core E + P_core H),
    which substitutes into the tested-on-this equation in place of the
    recursion's F-product.
    """
    bid_core = ops_core_row.row_id
    bid = ops_this_row.row_id
    x = _solve(
        f"G_core[{bid_core}]",
        ops_core_row.G,
        np.hstack([ops_core_row.P, ops_core_row.U]),
    )
    m = ops_this_row.L.shape[0]
    xp, xu = x[:, :m], x[:, m:]
    ya = ops_this_row.P - ops_this_row.G @ xp
    yb = 0.5 * ops_this_row.L - ops_this_row.U + ops_this_row.G @ xu
    y = _solve(f"P-G.Ginv.P[{bid}]", ya, yb)
    y_hat = sao_single(ops_hat)
    rec = LayerSolveRecord(
        depth=depth,
        boundary_id=bid,
        conditions=(
            (f"G_core[{bid_core}]", condition_number(ops_core_row.G)),
            (f"P-G.Ginv.P[{bid}]", condition_number(ya)),
            (f"P_hat[{bid}]", condition_number(ops_hat.P)),
        ),
        flops=flops_pec_coated(ops_core_row.G.shape[0], m),
    )
    return AdmittanceOperator(y - y_hat, bid, depth), rec


def assemble_multi(operators: list[AdmittanceOperator]) -> AdmittanceOperator:
    """Block-diagonal Y_s of disjoint objects on their union boundary."""
    if len(operators) == 1:
        return operators[0]
    mat = block_diag(*[op.matrix for op in operators])
    bid = "+".join(op.boundary_id for op in operators)
    return AdmittanceOperator(mat, bid, max(op.depth for op in operators))


def extend_same_medium(
    ys: AdmittanceOperator,
    ops_prev_row: OperatorSet,
    ops_this_row: OperatorSet,
    depth: int,
) -> tuple[AdmittanceOperator, LayerSolveRecord]:
    """Move Y_s outward to a fictitious boundary through the background medium.

    Identical algebra to :func:`layer_step`; since the region between the two
    boundaries is the background itself, the hat operators coincide with the
    un-hatted ones on the new boundary.
    """
    return layer_step(ys, ops_prev_row, ops_this_row, ops_this_row, depth)


# ---------------------------------------------------------------------------
# Scene driver
# ---------------------------------------------------------------------------
def build_dsao(
    scene: Scene,
    mesh: SceneMesh,
    freq: float,
    order: int = DEFAULT_ORDER,
) -> tuple[AdmittanceOperator, list[LayerSolveRecord]]:
    """Run the recursion over a meshed scene; Y_s lands on the outermost
    (or fictitious extension) boundary.

    A bare PEC scatterer with no enclosing layer has no admittance
    description; callers solve it directly from the core current equation.
    """
    records: list[LayerSolveRecord] = []

    def interior_ops(db, kern):
        return build_operator_set(db, db, kern, order=order)

    def step_ops(db_prev, db_this, kern):
        prev_row = build_operator_set(db_prev, db_this, kern, current=db_prev, order=order)
        this_row = build_operator_set(db_this, db_this, kern, current=db_prev, order=order)
        return prev_row, this_row

    def surrounding_kernel(g_idx, d_idx):
        g = scene.groups[g_idx]
        if d_idx + 1 < len(g.layers):
            return Kernel.for_medium(g.layers[d_idx + 1].medium, freq)
        if scene.shared_layers:
            return Kernel.for_medium(scene.shared_layers[0].medium, freq)
        return Kernel.for_medium(scene.background, freq)

    # per-group chains: each yields either an admittance on its outermost
    # boundary or a pending PEC core awaiting an enclosing layer
    group_results = []  # (ys or None, pending_pec_mesh or None)
    for g_idx, g in enumerate(scene.groups):
        meshes = mesh.group_meshes[g_idx]
        ys = None
        pending_pec = None
        for d_idx, lay in enumerate(g.layers):
            db = meshes[d_idx]
            if d_idx == 0:
                if lay.pec:
                    pending_pec = db
                    continue
                kern = Kernel.for_medium(lay.medium, freq)
                op_in = interior_ops(db, kern)
                op_hat = interior_ops(db, surrounding_kernel(g_idx, d_idx))
                ys, rec = dsao_single(op_in, op_hat, depth=1)
                records.append(rec)
                continue
            kern = Kernel.for_medium(lay.medium, freq)
            prev_row, this_row = step_ops(meshes[d_idx - 1], db, kern)
            op_hat = interior_ops(db, surrounding_kernel(g_idx, d_idx))
            if pending_pec is not None:
                ys, rec = pec_coated(prev_row, this_row, op_hat, depth=d_idx + 1)
                pending_pec = None
            else:
                ys, rec = layer_step(ys, prev_row, this_row, op_hat, depth=d_idx + 1)
            records.append(rec)
        group_results.append((ys, pending_pec))

    # union of groups at the first shared layer (or pass the single group on)
    pecs = [p for _, p in group_results if p is not None]
    yss = [y for y, _ in group_results if y is not None]
    if pecs and yss:
        raise SceneValidationError(
            "cannot mix bare PEC objects with layered objects under one shared layer"
        )
    if pecs:
        prev_mesh = pecs[0] if len(pecs) == 1 else concatenate_boundaries(pecs)
        ys = None
    else:
        ys = assemble_multi(yss)
        prev_mesh = (
            mesh.group_meshes[0][-1]
            if len(scene.groups) == 1
            else concatenate_boundaries([gm[-1] for gm in mesh.group_meshes])
        )

    depth0 = max(len(g.layers) for g in scene.groups)
    for s_idx, lay in enumerate(scene.shared_layers):
        db = mesh.shared_meshes[s_idx]
        kern = Kernel.for_medium(lay.medium, freq)
        if s_idx + 1 < len(scene.shared_layers):
            hat_kern = Kernel.for_medium(scene.shared_layers[s_idx + 1].medium, freq)
        else:
            hat_kern = Kernel.for_medium(scene.background, freq)
        prev_row, this_row = step_ops(prev_mesh, db, kern)
        op_hat = interior_ops(db, hat_kern)
        depth = depth0 + s_idx + 1
        if ys is None:
            ys, rec = pec_coated(prev_row, this_row, op_hat, depth=depth)
        else:
            ys, rec = layer_step(ys, prev_row, this_row, op_hat, depth=depth)
        records.append(rec)
        prev_mesh = db

    if mesh.extension_mesh is not None:
        db = mesh.extension_mesh
        kern = Kernel.for_medium(scene.background, freq)
        prev_row, this_row = step_ops(prev_mesh, db, kern)
        depth = depth0 + len(scene.shared_layers) + 1
        if ys is None:
            ys, rec = pec_coated(prev_row, this_row, this_row, depth=depth)
        else:
            ys, rec = extend_same_medium(ys, prev_row, this_row, depth=depth)
        records.append(rec)
        prev_mesh = db

    if ys is None:
        raise SceneValidationError(
            "bare PEC scatterer has no surface admittance; solve it directly "
            "(automatic in the workflow layer) or add an extension distance"
        )
    return ys, merge_same_depth(records)
