"""Reference solvers: an analytic series for concentric circular layers and a
dense direct two-trace boundary-element formulation for arbitrary scenes.

Both produce bistatic scattering-width curves on the same footing as the
admittance path, so cross-route comparisons never share solver code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp
from scipy.constants import mu_0

from .errors import SceneValidationError, SeriesConvergenceError
from .exterior import Excitation, RcsCurve, far_field_traces, incident_vector
from .geometry import Circle, Medium, Scene, SceneMesh, wavenumber
from .operators import DEFAULT_ORDER, Kernel, assemble_P, assemble_U
from .special import N_MAX

SERIES_TAIL_TOL = 1e-12


# ---------------------------------------------------------------------------
# Analytic series for concentric circular layers
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class RadialLayerStack:
    """Concentric circular layers: radii[i] encloses media[i] (annulus between
    radii[i-1] and radii[i]; media[0] is the core, ignored when core_pec)."""

    radii: tuple
    media: tuple
    background: Medium
    core_pec: bool = False

    def __post_init__(self):
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        object.__setattr__(self, "media", tuple(self.media))
        if len(self.radii) != len(self.media) or not self.radii:
            raise SceneValidationError("need one medium per radius")
        if any(b <= a for a, b in zip(self.radii, self.radii[1:])):
            raise SceneValidationError("radii must be strictly increasing")
        if self.radii[0] <= 0:
            raise SceneValidationError("radii must be positive")


def stack_from_scene(scene: Scene) -> RadialLayerStack:
    if not scene.is_circular_concentric:
        raise SceneValidationError(
            "analytic series needs concentric circular boundaries"
        )
    chain = scene.layer_chain
    return RadialLayerStack(
        radii=tuple(lay.boundary.radius for lay in chain),
        media=tuple(lay.medium for lay in chain),
        background=scene.background,
        core_pec=chain[0].pec,
    )


def _vals_and_derivs(fn, orders_plus_one, z):
    """fn(n, z) for n = 0..N and the z-derivatives via the 3-term recurrence
    (valid for any cylinder function, including exponentially scaled ones)."""
    n_all = np.arange(orders_plus_one + 1)
    vals = fn(n_all, z)
    der = np.empty(orders_plus_one, dtype=np.complex128)
    der[0] = -vals[1]
    der[1:] = 0.5 * (vals[:-2][: orders_plus_one - 1] - vals[2 : orders_plus_one + 1])
    return vals[:orders_plus_one], der


def _gamma(k, omega, mu_r):
    return k / (1j * omega * mu_0 * mu_r)


def _scattering_coefficients(stack: RadialLayerStack, freq: float, n_orders: int):
    """b_n, n = 0..N, of the outgoing-wave expansion outside the stack.

    The state [E, H_t] (H_t = dE/dr / (j w mu)) is continuous at interfaces;
    it is seeded at the core radius and carried outward through each annulus
    in an exponentially scaled outgoing/ingoing basis so lossy layers only
    ever underflow (never overflow), then matched to incident + scattered
    waves in the background.
    """
    omega = 2.0 * math.pi * freq
    kb = wavenumber(stack.background, freq)
    if abs(kb.imag) > 1e-12 * abs(kb):
        raise SceneValidationError("background medium must be lossless")
    k0 = kb.real
    np1 = n_orders + 1

    if stack.core_pec:
        state = np.zeros((np1, 2), dtype=np.complex128)
        state[:, 1] = 1.0
    else:
        med = stack.media[0]
        k = wavenumber(med, freq)
        z = k * stack.radii[0]
        vals, der = _vals_and_derivs(_sp.jve, np1, z)
        state = np.column_stack([vals, _gamma(k, omega, med.mu_r) * der])
    state /= np.max(np.abs(state), axis=1, keepdims=True)

    for i in range(1, len(stack.radii)):
        med = stack.media[i]
        k = wavenumber(med, freq)
        g = _gamma(k, omega, med.mu_r)
        za, zb = k * stack.radii[i - 1], k * stack.radii[i]

        def basis(z):
            v1, d1 = _vals_and_derivs(_sp.hankel1e, np1, z)
            v2, d2 = _vals_and_derivs(_sp.hankel2e, np1, z)
            m = np.empty((np1, 2, 2), dtype=np.complex128)
            m[:, 0, 0], m[:, 0, 1] = v1, v2
            m[:, 1, 0], m[:, 1, 1] = g * d1, g * d2
            return m

        ma, mb = basis(za), basis(zb)
        det = ma[:, 0, 0] * ma[:, 1, 1] - ma[:, 0, 1] * ma[:, 1, 0]
        coeff = np.empty_like(state)
        coeff[:, 0] = (ma[:, 1, 1] * state[:, 0] - ma[:, 0, 1] * state[:, 1]) / det
        coeff[:, 1] = (-ma[:, 1, 0] * state[:, 0] + ma[:, 0, 0] * state[:, 1]) / det
        # scaled-basis propagation picks up diag(1, e^{-2j k (r_b - r_a)});
        # Im(k) <= 0 makes the second factor decay (underflow is harmless)
        coeff[:, 1] *= np.exp(-2j * (zb - za))
        state = np.einsum("nij,nj->ni", mb, coeff)
        state /= np.max(np.abs(state), axis=1, keepdims=True)

    z0 = k0 * stack.radii[-1]
    g0 = _gamma(k0, omega, stack.background.mu_r)
    jv, jd = _vals_and_derivs(lambda n, z: _sp.jv(n, z), np1, z0)
    h2, h2d = _vals_and_derivs(lambda n, z: _sp.hankel2(n, z), np1, z0)
    e_s, h_s = state[:, 0], state[:, 1]
    return -(g0 * jd * e_s - jv * h_s) / (g0 * h2d * e_s - h2 * h_s)


def mie_coefficients(stack: RadialLayerStack, freq: float) -> np.ndarray:
    """Scattering coefficients grown until the series tail is negligible."""
    kb = wavenumber(stack.background, freq)
    n = int(math.ceil(abs(kb) * stack.radii[-1])) + 15
    while True:
        b = _scattering_coefficients(stack, freq, n)
        scale = np.max(np.abs(b))
        if scale == 0.0 or np.all(np.abs(b[-2:]) <= SERIES_TAIL_TOL * scale):
            return b
        n += 20
        if n > N_MAX:
            raise SeriesConvergenceError(
                f"series did not converge within {N_MAX} orders"
            )


def mie_far_field(
    stack: RadialLayerStack, freq: float, exc: Excitation, angles: np.ndarray
) -> np.ndarray:
    """F(phi) = E0 [b_0 + 2 sum b_n cos(n (phi - phi_inc))]."""
    b = mie_coefficients(stack, freq)
    dphi = np.asarray(angles, dtype=float) - exc.phi_inc
    n = np.arange(1, len(b))
    series = b[0] + 2.0 * np.cos(np.outer(dphi, n)) @ b[1:]
    return exc.amplitude * series


def mie_rcs(
    stack: RadialLayerStack, freq: float, exc: Excitation, angles: np.ndarray
) -> RcsCurve:
    k0 = wavenumber(stack.background, freq).real
    f = mie_far_field(stack, freq, exc, angles)
    return RcsCurve(angles, (4.0 / k0) * np.abs(f / exc.amplitude) ** 2)


# ---------------------------------------------------------------------------
# Dense direct reference (two traces per boundary, no admittance compression)
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class DirectSolution:
    curve: RcsCurve
    unknowns: int
    condition: float


def _physical_boundaries(scene: Scene, mesh: SceneMesh):
    """(key, db, pec) for every physical boundary, groups first then shared."""
    out = []
    for g_idx, g in enumerate(scene.groups):
        for d_idx, lay in enumerate(g.layers):
            out.append(((g_idx, d_idx), mesh.group_meshes[g_idx][d_idx], lay.pec))
    for s_idx in range(len(scene.shared_layers)):
        out.append((("s", s_idx), mesh.shared_meshes[s_idx], False))
    return out


def _regions(scene: Scene):
    """(medium, [(boundary key, sign)], is_exterior); sign +1 when the region
    lies inside that boundary, -1 when the boundary is an interior hole."""
    regions = []
    for g_idx, g in enumerate(scene.groups):
        for d_idx, lay in enumerate(g.layers):
            if lay.pec:
                continue
            bounds = [((g_idx, d_idx), +1)]
            if d_idx > 0:
                bounds.append(((g_idx, d_idx - 1), -1))
            regions.append((lay.medium, bounds, False))
    for s_idx, lay in enumerate(scene.shared_layers):
        bounds = [(("s", s_idx), +1)]
        if s_idx == 0:
            bounds += [((g_idx, len(g.layers) - 1), -1) for g_idx, g in enumerate(scene.groups)]
        else:
            bounds.append((("s", s_idx - 1), -1))
        regions.append((lay.medium, bounds, False))
    if scene.shared_layers:
        last = ("s", len(scene.shared_layers) - 1)
    else:
        last = (0, len(scene.groups[0].layers) - 1)
    regions.append((scene.background, [(last, -1)], True))
    return regions, last


def pmchwt_unknown_count(scene: Scene, mesh: SceneMesh) -> int:
    """Two traces per boundary, one on PEC boundaries."""
    return sum(
        (1 if pec else 2) * db.segment_count
        for _, db, pec in _physical_boundaries(scene, mesh)
    )


def pmchwt_solve(
    scene: Scene,
    mesh: SceneMesh,
    freq: float,
    exc: Excitation,
    angles: np.ndarray,
    order: int = DEFAULT_ORDER,
) -> DirectSolution:
    """Assemble and solve the coupled two-trace system region by region.

    For each homogeneous region R and each boundary gamma_p on its rim:
        1/2 L_p e_p = sum_b s_b [P_pb h_b + U_pb e_b] (+ tested incident
    trace in the exterior region), with kernels of R's medium.  Traces h, e
    are shared between the two regions touching each boundary; e vanishes on
    PEC boundaries.
    """
    bounds = _physical_boundaries(scene, mesh)
    index = {key: i for i, (key, _, _) in enumerate(bounds)}
    regions, last_key = _regions(scene)

    off_h, off_e = [], []
    off = 0
    for _, db, pec in bounds:
        m = db.segment_count
        off_h.append(off)
        off_e.append(None if pec else off + m)
        off += m if pec else 2 * m
    n_unknowns = off

    a = np.zeros((n_unknowns, n_unknowns), dtype=np.complex128)
    rhs = np.zeros(n_unknowns, dtype=np.complex128)
    row = 0
    for medium, rim, is_ext in regions:
        kern = Kernel.for_medium(medium, freq)
        for key_p, _ in rim:
            p = index[key_p]
            _, db_p, pec_p = bounds[p]
            m_p = db_p.segment_count
            rows = slice(row, row + m_p)
            row += m_p
            if not pec_p:
                o = off_e[p]
                a[rows, o : o + m_p] += np.diag(0.5 * db_p.lengths)
            for key_b, sign in rim:
                b = index[key_b]
                _, db_b, pec_b = bounds[b]
                m_b = db_b.segment_count
                o_h = off_h[b]
                a[rows, o_h : o_h + m_b] -= sign * assemble_P(db_p, db_b, kern, order=order)
                if not pec_b:
                    o_e = off_e[b]
                    a[rows, o_e : o_e + m_b] -= sign * assemble_U(db_p, db_b, kern, order=order)
            if is_ext:
                rhs[rows] = incident_vector(db_p, exc, kern)
    assert row == n_unknowns

    cond = float(np.linalg.cond(a))
    x = np.linalg.solve(a, rhs)

    i_last = index[last_key]
    _, db_n, pec_n = bounds[i_last]
    m_n = db_n.segment_count
    h_n = x[off_h[i_last] : off_h[i_last] + m_n]
    e_n = None if pec_n else x[off_e[i_last] : off_e[i_last] + m_n]
    kern0 = Kernel.for_medium(scene.background, freq)
    f = far_field_traces(db_n, kern0, np.asarray(angles, dtype=float), h=h_n, e=e_n)
    k0 = kern0.k.real
    curve = RcsCurve(angles, (4.0 / k0) * np.abs(f / exc.amplitude) ** 2)
    return DirectSolution(curve=curve, unknowns=n_unknowns, condition=cond)
