"""Complex-argument cylinder functions used by the kernels and the Mie series.

Thin wrappers over scipy.special (AMOS) with the domain contract enforced:
arguments with Im(z) <= 0 (outgoing-wave half-plane under the e^{+jwt}
convention), orders 0..N_MAX.  Exponentially scaled variants are exposed for
the layered Mie transfer matrices, where unscaled values overflow in good
conductors (|Im(k r)| ~ 1e4 at 30 GHz in copper).

Scaling conventions (as in scipy):
    jve(n, z)      = J_n(z) * exp(-|Im z|)
    hankel1e(n, z) = H_n^(1)(z) * exp(-1j z)
    hankel2e(n, z) = H_n^(2)(z) * exp(+1j z)
"""

import numpy as np
from scipy import special as _sp

Z_MAX = 1e8
N_MAX = 50_000


def _check_domain(n, z, allow_zero=False):
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise ValueError("order must be non-negative")
    if np.any(n_arr > N_MAX):
        raise ValueError(f"order exceeds N_MAX = {N_MAX}")
    z_arr = np.asarray(z, dtype=np.complex128)
    if not allow_zero and np.any(z_arr == 0):
        raise ValueError("z = 0 is outside the domain (singular at origin)")
    if np.any(np.abs(z_arr) > Z_MAX):
        raise ValueError(f"|z| exceeds Z_MAX = {Z_MAX}")
    return z_arr


def bessel_j(n, z):
    """Bessel function of the first kind J_n(z), complex argument."""
    z = _check_domain(n, z, allow_zero=True)
    out = _sp.jv(n, z)
    if not np.all(np.isfinite(out)):
        raise OverflowError("J_n(z) overflowed; use the scaled variant")
    return out


def bessel_y(n, z):
    """Bessel function of the second kind Y_n(z), complex argument, z != 0."""
    z = _check_domain(n, z)
    out = _sp.yv(n, z)
    if not np.all(np.isfinite(out)):
        raise OverflowError("Y_n(z) overflowed; use the scaled variant")
    return out


def hankel2(n, z):
    """Hankel function of the second kind H_n^(2)(z) = J_n - j Y_n, z != 0.

    For Im(z) < 0 this is the decaying (outgoing, lossy) solution; AMOS
    evaluates it through the scaled form so no cancellation occurs.
    """
    z = _check_domain(n, z)
    out = _sp.hankel2(n, z)
    if not np.all(np.isfinite(out)):
        raise OverflowError("H_n^(2)(z) overflowed")
    return out


def hankel1e(n, z):
    """Scaled H_n^(1)(z) * exp(-1j z)."""
    z = _check_domain(n, z)
    return _sp.hankel1e(n, z)


def hankel2e(n, z):
    """Scaled H_n^(2)(z) * exp(+1j z)."""
    z = _check_domain(n, z)
    return _sp.hankel2e(n, z)


def bessel_je(n, z):
    """Scaled J_n(z) * exp(-|Im z|)."""
    z = _check_domain(n, z, allow_zero=True)
    return _sp.jve(n, z)


def deriv_from_recurrence(fn_nm1, fn_np1):
    """C_n'(z) = (C_{n-1}(z) - C_{n+1}(z)) / 2 for any cylinder function C.

    Valid for J, Y, H^(1), H^(2) and for their uniformly scaled versions
    (the common scale factor divides out of the recurrence).
    """
    return 0.5 * (fn_nm1 - fn_np1)
