"""Dense boundary-operator assembly: L, U, P, G for test/source boundary pairs.

Kernels (e^{+jwt} convention, outgoing H^(2)):
    G(k, rho)  = -(j/4) H_0^(2)(k rho)
    G'(k, rho) = -(j/4) H_1^(2)(k rho)
    P[m,n] =  int_m int_n  j w mu G(k rho) dr' dr
    U[m,n] =  int_m int_n  k ((d.n')/|d|) G'(k rho) dr' dr,   d = r' - r
    G_mat  = -P(test, current_source)  entrywise (current radiation term)
    L      = diag(segment lengths)

Off-diagonal entries use tensor-product Gauss-Legendre quadrature; pairs
closer than a few segment lengths are refined by recursive bisection (grading
automatically toward shared vertices); coincident segments use an analytic
small-argument series for the logarithmic singularity, with a panelized tail
for skin-depth-scale wavenumbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as _sp
from scipy.constants import mu_0

from .geometry import DiscretizedBoundary, Medium, wavenumber

EULER_GAMMA = 0.5772156649015328606

DEFAULT_ORDER = 4
NEAR_RATIO = 2.0     # midpoint distance below NEAR_RATIO*(l_i + l_j): refine
SEP_RATIO = 2.0      # recursion stops once dist >= SEP_RATIO*(s_i + s_j)
MAX_DEPTH = 20
# |Im(k rho)| beyond which H^(2) is treated as exactly 0.  The true value is
# below 1e-260 there; AMOS itself returns garbage in a band around
# |Im z| ~ 665..700 before flushing to zero, so stay well clear of it.
UNDERFLOW_IM = 600.0


@dataclass(frozen=True)
class Kernel:
    """Wavenumber, permeability and angular frequency of one medium."""

    k: complex
    mu: float
    omega: float

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.k.imag > 1e-12 * abs(self.k):
            raise ValueError("Im(k) must be <= 0 under the e^{+jwt} convention")

    @classmethod
    def for_medium(cls, medium: Medium, freq: float) -> "Kernel":
        return cls(wavenumber(medium, freq), mu_0 * medium.mu_r, 2.0 * math.pi * freq)


@dataclass(frozen=True, eq=False)
class OperatorSet:
    """L, U, P (and optionally G) for one tested boundary at one kernel.

    ``row`` is the tested boundary; U/P columns live on ``col`` (the field
    boundary), G columns on ``cur`` (the current boundary).
    """

    L: np.ndarray
    U: np.ndarray
    P: np.ndarray
    G: np.ndarray | None
    row_id: str
    col_id: str
    kernel: Kernel


def green(k, rho):
    """Scalar 2D Helmholtz Green function -(j/4) H_0^(2)(k rho)."""
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(rho_arr <= 0):
        raise ValueError("rho must be positive")
    return -0.25j * _hankel2_of_distance(0, complex(k), rho_arr)


def _hankel2_of_distance(order, k, d):
    """H_order^(2)(k d) for positive real distances d, complex k.

    Real-k arguments route through the fast real-argument Bessel functions;
    strongly damped arguments are short-circuited to exact 0.
    """
    d = np.asarray(d, dtype=float)
    if k.imag == 0:
        x = k.real * d
        if order == 0:
            return _sp.j0(x) - 1j * _sp.y0(x)
        return _sp.j1(x) - 1j * _sp.y1(x)
    out = np.zeros(d.shape, dtype=np.complex128)
    live = (-k.imag) * d < UNDERFLOW_IM
    if np.any(live):
        out[live] = _sp.hankel2(order, k * d[live])
    return out


@lru_cache(maxsize=32)
def _gauss(q):
    x, w = np.polynomial.legendre.leggauss(q)
    return x, w


# ---------------------------------------------------------------------------
# Entry integrands (dimensionless node arrays -> kernel values)
# ---------------------------------------------------------------------------
def _p_integrand(kern, test_pts, src_pts, src_normal):
    d = src_pts - test_pts
    dist = np.sqrt(np.sum(d * d, axis=-1))
    # j w mu * (-(j/4)) H_0 = (w mu / 4) H_0
    return 0.25 * kern.omega * kern.mu * _hankel2_of_distance(0, kern.k, dist)


def _u_integrand(kern, test_pts, src_pts, src_normal):
    d = src_pts - test_pts
    dist = np.sqrt(np.sum(d * d, axis=-1))
    cosf = np.sum(d * src_normal, axis=-1) / dist
    return kern.k * cosf * (-0.25j) * _hankel2_of_distance(1, kern.k, dist)


# ---------------------------------------------------------------------------
# Adaptive pair quadrature
# ---------------------------------------------------------------------------
def _refine_pairs(test, src, kern, integrand, rows, cols, order):
    """Graded-bisection double integrals for a batch of near/touching pairs.

    Both segments of every active subpair are bisected until the subpair is
    well separated relative to its size (grading automatically concentrates
    around shared vertices); separated leaves are integrated with the tensor
    Gauss rule, whole levels at a time.
    """
    x, w = _gauss(order)
    ww = np.outer(w, w)
    a1, b1 = test.starts[rows], test.ends[rows]
    a2, b2 = src.starts[cols], src.ends[cols]
    nrm = src.normals[cols]
    pidx = np.arange(len(rows))
    out = np.zeros(len(rows), dtype=np.complex128)
    for depth in range(MAX_DEPTH + 1):
        if len(pidx) == 0:
            break
        h1, h2 = 0.5 * (b1 - a1), 0.5 * (b2 - a2)
        m1, m2 = a1 + h1, a2 + h2
        s1 = np.hypot(h1[:, 0], h1[:, 1]) * 2.0
        s2 = np.hypot(h2[:, 0], h2[:, 1]) * 2.0
        dist = np.hypot(*(m1 - m2).T)
        if depth < MAX_DEPTH:
            sep = dist >= SEP_RATIO * (s1 + s2)
        else:
            sep = np.ones(len(pidx), dtype=bool)
        if np.any(sep):
            t_pts = m1[sep, None, None, :] + x[None, :, None, None] * h1[sep, None, None, :]
            s_pts = m2[sep, None, None, :] + x[None, None, :, None] * h2[sep, None, None, :]
            vals = integrand(kern, t_pts, s_pts, nrm[sep, None, None, :])  # (L, q, q)
            contrib = np.einsum("lij,ij->l", vals, ww) * (0.25 * s1[sep] * s2[sep])
            np.add.at(out, pidx[sep], contrib)
        keep = ~sep
        if not np.any(keep):
            break
        a1k, b1k, m1k = a1[keep], b1[keep], m1[keep]
        a2k, b2k, m2k = a2[keep], b2[keep], m2[keep]
        a1 = np.concatenate([a1k, a1k, m1k, m1k])
        b1 = np.concatenate([m1k, m1k, b1k, b1k])
        a2 = np.concatenate([a2k, m2k, a2k, m2k])
        b2 = np.concatenate([m2k, b2k, m2k, b2k])
        nrm = np.tile(nrm[keep], (4, 1))
        pidx = np.tile(pidx[keep], 4)
    return out


# ---------------------------------------------------------------------------
# Coincident (singular) self entries
# ---------------------------------------------------------------------------
def _h0_series_coeffs(n_terms=40):
    """alpha_m, beta_m with H_0^(2)(w) = sum (alpha_m + beta_m ln w) w^{2m}."""
    m = np.arange(n_terms)
    log_fact = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, n_terms)))])
    c = (-1.0) ** m * np.exp(-2.0 * log_fact - m * np.log(4.0))
    harm = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, n_terms))])
    beta = -2j / math.pi * c
    alpha = c * (1.0 - 2j / math.pi * (EULER_GAMMA - math.log(2.0) - harm))
    return alpha, beta


_ALPHA, _BETA = _h0_series_coeffs()


def _series_F(Z):
    """F(Z) = int_0^Z (Z - w) H_0^(2)(w) dw, |Z| <~ 10 (power/log series)."""
    m = np.arange(len(_ALPHA))
    logZ = np.log(Z)
    Zp = Z ** (2 * m + 2)
    inv1 = 1.0 / (2 * m + 1)
    inv2 = 1.0 / (2 * m + 2)
    A = Zp * inv1 * inv2
    B = Zp * (logZ * (inv1 - inv2) - inv1 ** 2 + inv2 ** 2)
    return complex(np.sum(_ALPHA * A + _BETA * B))


def _series_C0(Z):
    """C0(Z) = int_0^Z H_0^(2)(w) dw, same validity range."""
    m = np.arange(len(_ALPHA))
    logZ = np.log(Z)
    Zp = Z ** (2 * m + 1)
    inv1 = 1.0 / (2 * m + 1)
    return complex(np.sum(_ALPHA * Zp * inv1 + _BETA * Zp * (logZ * inv1 - inv1 ** 2)))


@lru_cache(maxsize=4096)
def self_h0_double_integral(k, length):
    """int_0^l int_0^l H_0^(2)(k|t - s|) dt ds, complex k, Im(k) <= 0.

    Series in closed form for |k l| <= 8; otherwise a series head on
    [0, 8/|k|] plus a panelized Gauss tail (truncated where the lossy
    exponential decay underflows).
    """
    k = complex(k)
    kl = k * length
    if abs(kl) <= 8.0:
        return 2.0 * _series_F(kl) / (k * k)
    u0 = 8.0 / abs(k)
    Z0 = k * u0
    head = (length - u0) * _series_C0(Z0) / k + _series_F(Z0) / (k * k)
    # tail int_{u0}^{l} (l - u) H_0^(2)(k u) du, panels ~ one period long
    u_max = length
    if k.imag != 0:
        u_max = min(length, u0 + UNDERFLOW_IM / (-k.imag))
    panel = math.pi / abs(k)
    n_panels = max(1, math.ceil((u_max - u0) / panel))
    edges = np.linspace(u0, u_max, n_panels + 1)
    x, w = _gauss(8)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    u = mid[:, None] + half[:, None] * x[None, :]             # (panels, 8)
    vals = (length - u) * _hankel2_of_distance(0, k, u)
    acc = np.sum(half * (vals @ w))
    return 2.0 * (head + acc)


def p_self_entry(kern: Kernel, length: float) -> complex:
    """Diagonal P entry: (w mu / 4) * self_h0_double_integral."""
    return 0.25 * kern.omega * kern.mu * self_h0_double_integral(kern.k, length)


# ---------------------------------------------------------------------------
# Pair classification
# ---------------------------------------------------------------------------
def _pair_masks(test: DiscretizedBoundary, src: DiscretizedBoundary):
    """Boolean (M, N) masks: coincident segments, and near pairs to refine."""
    dmid = test.midpoints[:, None, :] - src.midpoints[None, :, :]
    dist = np.sqrt(np.sum(dmid * dmid, axis=-1))
    lsum = test.lengths[:, None] + src.lengths[None, :]
    scale = 1e-9 * lsum
    coincident = (dist < scale) & (
        np.abs(test.lengths[:, None] - src.lengths[None, :]) < scale
    )
    near = (dist < NEAR_RATIO * lsum) & ~coincident
    return coincident, near


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------
def _assemble(test, src, kern, integrand, order, diagonal):
    """Generic double-layer assembly; ``diagonal`` fills coincident entries."""
    M, N = test.segment_count, src.segment_count
    x, w = _gauss(order)
    t_half = 0.5 * test.lengths[:, None] * test.tangents       # (M, 2)
    s_half = 0.5 * src.lengths[:, None] * src.tangents         # (N, 2)
    out = np.zeros((M, N), dtype=np.complex128)
    # bulk tensor Gauss, accumulated one node pair at a time to bound memory;
    # coincident pairs produce NaN here and are overwritten below
    with np.errstate(invalid="ignore", divide="ignore"):
        for qi in range(order):
            t_pts = test.midpoints + x[qi] * t_half            # (M, 2)
            for qj in range(order):
                s_pts = src.midpoints + x[qj] * s_half         # (N, 2)
                vals = integrand(
                    kern, t_pts[:, None, :], s_pts[None, :, :], src.normals[None, :, :]
                )                                              # (M, N)
                out += (w[qi] * w[qj]) * vals
    out *= 0.25 * np.outer(test.lengths, src.lengths)
    coincident, near = _pair_masks(test, src)
    if np.any(near):
        rows, cols = np.nonzero(near)
        out[rows, cols] = _refine_pairs(test, src, kern, integrand, rows, cols, order)
    for i, j in zip(*np.nonzero(coincident)):
        out[i, j] = diagonal(i, j)
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("operator assembly produced non-finite entries")
    return out


def assemble_L(db: DiscretizedBoundary) -> np.ndarray:
    """Diagonal matrix of segment lengths."""
    return np.diag(db.lengths)


def assemble_P(test, src, kern: Kernel, order: int = DEFAULT_ORDER) -> np.ndarray:
    """P[m,n] = double integral of j w mu G(k rho); log-singular diagonal."""
    return _assemble(
        test, src, kern, _p_integrand, order,
        diagonal=lambda i, j: p_self_entry(kern, test.lengths[i]),
    )


def assemble_U(test, src, kern: Kernel, order: int = DEFAULT_ORDER) -> np.ndarray:
    """U[m,n] = double integral of k (d.n'/|d|) G'; PV diagonal = 0 (flat)."""
    return _assemble(
        test, src, kern, _u_integrand, order,
        diagonal=lambda i, j: 0.0,
    )


def assemble_G(test, current_src, kern: Kernel, order: int = DEFAULT_ORDER) -> np.ndarray:
    """Current radiation matrix: -P(test, current_source) entrywise."""
    return -assemble_P(test, current_src, kern, order=order)


def build_operator_set(
    test: DiscretizedBoundary,
    col: DiscretizedBoundary,
    kern: Kernel,
    current: DiscretizedBoundary | None = None,
    order: int = DEFAULT_ORDER,
) -> OperatorSet:
    """OperatorSet tested on ``test`` with U/P sources on ``col`` and the
    optional G current source on ``current``."""
    return OperatorSet(
        L=assemble_L(test),
        U=assemble_U(test, col, kern, order=order),
        P=assemble_P(test, col, kern, order=order),
        G=None if current is None else assemble_G(test, current, kern, order=order),
        row_id=test.boundary_id,
        col_id=col.boundary_id,
        kernel=kern,
    )
