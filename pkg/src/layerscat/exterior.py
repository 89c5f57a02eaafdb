"""Incident excitation, the exterior solve against Y_s, far fields and RCS.

With Y_s on the outermost boundary, the total tangential field there obeys
    (L - G_ext Y_s) E = E_inc_tested,
where G_ext is the current-radiation matrix of the background medium on that
boundary (so L - G_ext Y_s = L + P_hat Y_s).  The equivalent current J = Y_s E
then radiates the scattered field in the background.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .admittance import AdmittanceOperator
from .errors import SceneValidationError, SingularMatrixError
from .geometry import DiscretizedBoundary
from .operators import Kernel, _gauss

INCIDENT_GAUSS_ORDER = 6


@dataclass(frozen=True)
class Excitation:
    """Unit-amplitude-by-default plane wave travelling along phi_inc."""

    phi_inc: float = 0.0
    amplitude: complex = 1.0

    @property
    def direction(self):
        return np.array([math.cos(self.phi_inc), math.sin(self.phi_inc)])


@dataclass(frozen=True, eq=False)
class SolutionFields:
    """Pulse coefficients of the total trace E and equivalent current J."""

    boundary: DiscretizedBoundary
    e: np.ndarray
    j: np.ndarray


@dataclass(frozen=True, eq=False)
class RcsCurve:
    """Bistatic scattering width sigma(phi) on a strictly increasing grid."""

    angles: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "angles", np.asarray(self.angles, dtype=float))
        object.__setattr__(self, "sigma", np.asarray(self.sigma, dtype=float))
        if self.angles.shape != self.sigma.shape:
            raise ValueError("angles and sigma must have the same shape")
        if np.any(np.diff(self.angles) <= 0):
            raise ValueError("angle grid must be strictly increasing")
        if self.angles[0] < 0 or self.angles[-1] >= 2.0 * math.pi:
            raise ValueError("angles must lie in [0, 2 pi)")
        if np.any(self.sigma < 0) or not np.all(np.isfinite(self.sigma)):
            raise ValueError("sigma must be finite and non-negative")

    @property
    def sigma_db(self):
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(self.sigma)


def angle_grid(n: int) -> np.ndarray:
    """n uniformly spaced observation angles covering [0, 2 pi)."""
    if n < 1:
        raise ValueError("need at least one observation angle")
    return np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)


def _background_k(kern: Kernel) -> float:
    if abs(kern.k.imag) > 1e-12 * abs(kern.k):
        raise SceneValidationError("background medium must be lossless")
    return kern.k.real


def incident_vector(
    db: DiscretizedBoundary, exc: Excitation, kern0: Kernel
) -> np.ndarray:
    """Tested incident trace: int_seg E0 e^{-j k0 khat.r} dr per segment."""
    k0 = _background_k(kern0)
    x, w = _gauss(INCIDENT_GAUSS_ORDER)
    half = 0.5 * db.lengths[:, None] * db.tangents          # (N, 2)
    acc = np.zeros(db.segment_count, dtype=np.complex128)
    for xi, wi in zip(x, w):
        pts = db.midpoints + xi * half                      # (N, 2)
        acc += wi * np.exp(-1j * k0 * (pts @ exc.direction))
    return exc.amplitude * 0.5 * db.lengths * acc


def solve_exterior(
    ys: AdmittanceOperator,
    g_ext: np.ndarray,
    e_inc: np.ndarray,
    db: DiscretizedBoundary,
) -> tuple[SolutionFields, float]:
    """Solve (L - G_ext Y_s) E = E_inc_tested; returns fields and the final
    system's 2-norm condition number."""
    a = np.diag(db.lengths) - g_ext @ ys.matrix
    cond = float(np.linalg.cond(a))
    try:
        e = np.linalg.solve(a, e_inc)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"L-G_ext.Ys[{ys.boundary_id}]") from exc
    return SolutionFields(db, e, ys.matrix @ e), cond


def solve_pec_direct(
    p_hat: np.ndarray, e_inc: np.ndarray, db: DiscretizedBoundary
) -> tuple[SolutionFields, float]:
    """Bare PEC scatterer: the vanishing trace leaves P_hat J = E_inc_tested."""
    cond = float(np.linalg.cond(p_hat))
    try:
        j = np.linalg.solve(p_hat, e_inc)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"P_hat[{db.boundary_id}]") from exc
    return SolutionFields(db, np.zeros_like(j), j), cond


def segment_phase_integrals(
    db: DiscretizedBoundary, k0: float, angles: np.ndarray
) -> np.ndarray:
    """I_m(phi) = int_seg e^{+j k0 rhat.r'} dr', closed form, shape (A, M)."""
    rhat = np.column_stack([np.cos(angles), np.sin(angles)])    # (A, 2)
    phase = np.exp(1j * k0 * (rhat @ db.midpoints.T))           # (A, M)
    along = k0 * (rhat @ db.tangents.T) * db.lengths[None, :] / 2.0
    return db.lengths[None, :] * phase * np.sinc(along / math.pi)


def far_field_traces(
    db: DiscretizedBoundary,
    kern0: Kernel,
    angles: np.ndarray,
    h: np.ndarray | None = None,
    e: np.ndarray | None = None,
) -> np.ndarray:
    """Far-field pattern F(phi) with E_scat ~ sqrt(2/(pi k0 rho)) e^{-j k0 rho}
    e^{j pi/4} F(phi); h is a radiating surface current (single layer), e an
    optional double-layer trace."""
    k0 = _background_k(kern0)
    ints = segment_phase_integrals(db, k0, np.asarray(angles, dtype=float))
    f = np.zeros(ints.shape[0], dtype=np.complex128)
    if h is not None:
        f = f - 0.25 * kern0.omega * kern0.mu * (ints @ h)
    if e is not None:
        rhat = np.column_stack([np.cos(angles), np.sin(angles)])
        rn = rhat @ db.normals.T                                # (A, M)
        f = f + 0.25 * k0 * np.sum(rn * ints * e[None, :], axis=1)
    return f


def far_field(
    j: np.ndarray, db: DiscretizedBoundary, kern0: Kernel, angles: np.ndarray
) -> np.ndarray:
    """Pattern radiated by the equivalent current alone (single-source form)."""
    return far_field_traces(db, kern0, angles, h=j)


def rcs_curve(
    j: np.ndarray,
    db: DiscretizedBoundary,
    kern0: Kernel,
    angles: np.ndarray,
    amplitude: complex = 1.0,
) -> RcsCurve:
    """Bistatic scattering width sigma(phi) = (4/k0) |F(phi)/E0|^2."""
    k0 = _background_k(kern0)
    f = far_field(j, db, kern0, angles)
    return RcsCurve(angles, (4.0 / k0) * np.abs(f / amplitude) ** 2)


def relative_error(calc: RcsCurve, ref: RcsCurve) -> float:
    """Relative l2 error between two curves on the same angular grid."""
    if not np.allclose(calc.angles, ref.angles, atol=1e-12):
        raise ValueError("curves must share the angle grid")
    return float(np.linalg.norm(calc.sigma - ref.sigma) / np.linalg.norm(ref.sigma))


def total_scattering_width(curve: RcsCurve) -> float:
    """(1/2 pi) integral of sigma over the full circle (uniform-grid mean)."""
    return float(np.mean(curve.sigma))


def extinction_width(
    j: np.ndarray, db: DiscretizedBoundary, kern0: Kernel, exc: Excitation
) -> float:
    """Total width from the forward-scattering amplitude,
    sigma_t = -(4/k0) Re[F(phi_inc)/E0]; equals the scattered width for
    lossless scatterers."""
    k0 = _background_k(kern0)
    f = far_field(j, db, kern0, np.array([exc.phi_inc]))[0]
    return float(-(4.0 / k0) * (f / exc.amplitude).real)
