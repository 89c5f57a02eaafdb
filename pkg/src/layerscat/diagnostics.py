"""Per-depth solve records, flop accounting, and the diagnostics report.

Flop model (complex arithmetic, one multiply-add = 8 real flops):
    matmul (n x m)(m x p): 8 n m p
    LU factorization of n x n: (8/3) n^3
    triangular solves for k right-hand sides after LU: 8 n^2 k
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def flops_mm(n: int, m: int, p: int) -> float:
    return 8.0 * n * m * p


def flops_lu(n: int) -> float:
    return (8.0 / 3.0) * n ** 3


def flops_solve(n: int, k: int) -> float:
    return 8.0 * n * n * k


def flops_sao(m: int) -> float:
    """Single-boundary admittance: two LU + full-width solves (Y and Y-hat)."""
    return 2.0 * (flops_lu(m) + flops_solve(m, m))


def flops_layer_step(m_prev: int, m_this: int) -> float:
    """One recursion step absorbing gamma_prev's admittance into gamma_this."""
    total = flops_mm(m_prev, m_prev, m_prev)          # G_prev @ Ys_prev
    total += flops_mm(m_this, m_prev, m_prev)         # G_this @ Ys_prev
    total += flops_lu(m_prev) + flops_solve(m_prev, m_this)   # F via V-solve
    total += 2.0 * flops_mm(m_this, m_prev, m_this)   # F @ P_prev, F @ U_prev
    total += flops_lu(m_this) + flops_solve(m_this, m_this)   # Y solve
    total += flops_lu(m_this) + flops_solve(m_this, m_this)   # Y-hat solve
    return total


def flops_pec_coated(m_core: int, m_this: int) -> float:
    """Coated-conductor closure: eliminate the core current instead of E."""
    total = flops_lu(m_core) + flops_solve(m_core, 2 * m_this)  # G1 \ [P1 U1]
    total += 2.0 * flops_mm(m_this, m_core, m_this)             # G2 @ (...)
    total += flops_lu(m_this) + flops_solve(m_this, m_this)     # Y solve
    total += flops_lu(m_this) + flops_solve(m_this, m_this)     # Y-hat solve
    return total


def flops_final(m: int, n_rhs: int = 1) -> float:
    """Exterior system: build L - G_ext Ys, factor, solve for the incident field."""
    return flops_mm(m, m, m) + flops_lu(m) + flops_solve(m, n_rhs)


def flops_pmchwt(n_unknowns: int, n_rhs: int = 1) -> float:
    return flops_lu(n_unknowns) + flops_solve(n_unknowns, n_rhs)


@dataclass(frozen=True)
class LayerSolveRecord:
    """Condition numbers of every matrix inverted at one recursion depth."""

    depth: int
    boundary_id: str
    conditions: tuple[tuple[str, float], ...]
    flops: float

    def __post_init__(self):
        for label, c in self.conditions:
            if not (c >= 1.0) or not np.isfinite(c):
                raise ValueError(f"bad condition number for {label}: {c}")
        if self.flops <= 0:
            raise ValueError("flops must be positive")


@dataclass
class DiagnosticsReport:
    """Everything the CLI --diagnostics flag writes: per-depth conditions,
    final-system condition, unknown counts, and flop estimates."""

    records: list[LayerSolveRecord] = field(default_factory=list)
    final_label: str = ""
    final_condition: float = float("nan")
    unknowns: dict[str, int] = field(default_factory=dict)
    recursion_flops: float = 0.0
    final_flops: float = 0.0
    pmchwt_flops: float | None = None

    def __post_init__(self):
        depths = [rec.depth for rec in self.records]
        if any(b <= a for a, b in zip(depths, depths[1:])):
            raise ValueError("records must be one per depth, strictly increasing")

    @property
    def total_flops(self) -> float:
        return self.recursion_flops + self.final_flops

    def all_conditions(self) -> list[tuple[str, float]]:
        out = []
        for rec in self.records:
            out.extend(rec.conditions)
        if self.final_label:
            out.append((self.final_label, self.final_condition))
        return out

    def render(self) -> str:
        lines = ["inverted-matrix condition numbers", "=" * 48]
        lines.append(f"{'depth':>5}  {'matrix':<28}{'cond':>12}")
        for rec in self.records:
            for label, c in rec.conditions:
                lines.append(f"{rec.depth:>5}  {label:<28}{c:>12.2f}")
        if self.final_label:
            lines.append(f"{'final':>5}  {self.final_label:<28}{self.final_condition:>12.2f}")
        lines.append("")
        lines.append("unknown counts")
        lines.append("=" * 48)
        for name, n in self.unknowns.items():
            lines.append(f"  {name:<26}{n:>12d}")
        lines.append("")
        lines.append("flop estimates")
        lines.append("=" * 48)
        lines.append(f"  {'recursion (assembly)':<26}{self.recursion_flops:>12.4e}")
        lines.append(f"  {'final solve':<26}{self.final_flops:>12.4e}")
        lines.append(f"  {'total':<26}{self.total_flops:>12.4e}")
        if self.pmchwt_flops is not None:
            lines.append(f"  {'dense reference solve':<26}{self.pmchwt_flops:>12.4e}")
            lines.append(f"  {'ratio':<26}{self.total_flops / self.pmchwt_flops:>12.4f}")
        lines.append("")
        return "\n".join(lines)


def condition_number(a: np.ndarray) -> float:
    """2-norm condition number via SVD."""
    return float(np.linalg.cond(a))


def merge_same_depth(records: list[LayerSolveRecord]) -> list[LayerSolveRecord]:
    """Collapse records sharing a depth (parallel objects) into one record."""
    by_depth: dict[int, list[LayerSolveRecord]] = {}
    for rec in records:
        by_depth.setdefault(rec.depth, []).append(rec)
    out = []
    for depth in sorted(by_depth):
        group = by_depth[depth]
        if len(group) == 1:
            out.append(group[0])
            continue
        conds = tuple(c for rec in group for c in rec.conditions)
        out.append(
            LayerSolveRecord(
                depth=depth,
                boundary_id="+".join(rec.boundary_id for rec in group),
                conditions=conds,
                flops=sum(rec.flops for rec in group),
            )
        )
    return out


def flop_estimate(
    step_dims,
    final_dim: int | None = None,
    pmchwt_dim: int | None = None,
) -> DiagnosticsReport:
    """Analytic flop model from recursion dimensions alone.

    ``step_dims`` entries: ("sao", m) for an innermost boundary,
    ("step", m_prev, m_this) for a recursion step, ("pec", m_core, m_this)
    for a coated-conductor closure.
    """
    rec = 0.0
    for entry in step_dims:
        kind = entry[0]
        if kind == "sao":
            rec += flops_sao(entry[1])
        elif kind == "step":
            rec += flops_layer_step(entry[1], entry[2])
        elif kind == "pec":
            rec += flops_pec_coated(entry[1], entry[2])
        else:
            raise ValueError(f"unknown step kind {kind!r}")
    return DiagnosticsReport(
        recursion_flops=rec,
        final_flops=flops_final(final_dim) if final_dim else 0.0,
        pmchwt_flops=flops_pmchwt(pmchwt_dim) if pmchwt_dim else None,
    )
