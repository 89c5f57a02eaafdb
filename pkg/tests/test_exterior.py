"""Excitation, exterior solve, and far-field post-processing tests.

Oracles: the closed-form segment average of a plane wave (midpoint phase
times a sinc factor), scipy quadrature of the radiation integral, and two
physical invariants — mirror symmetry about the incidence axis and the
forward-scattering (optical) theorem.
"""

import numpy as np
import pytest
from scipy import integrate

import layerscat as ls
from layerscat.exterior import segment_phase_integrals
from layerscat.operators import Kernel, build_operator_set

FREQ = 300e6


def test_angle_grid_excludes_endpoint():
    g = ls.angle_grid(360)
    assert len(g) == 360
    assert g[0] == 0.0
    assert g[-1] < 2 * np.pi
    assert np.allclose(np.diff(g), 2 * np.pi / 360)


def test_incident_vector_matches_segment_average():
    # tested plane wave over a straight segment has the closed form
    # l * E0 * exp(-j k khat.mid) * sinc(k (khat.t) l / 2)
    kern = Kernel.for_medium(ls.VACUUM, FREQ)
    exc = ls.Excitation(phi_inc=0.7, amplitude=2.0)
    db = ls.discretize(ls.Circle((0.3, -0.2), 1.0), 0.12, "g")
    got = ls.incident_vector(db, exc, kern)
    khat = exc.direction
    k0 = kern.k.real
    phase = np.exp(-1j * k0 * (db.midpoints @ khat))
    arg = 0.5 * k0 * (db.tangents @ khat) * db.lengths
    expect = 2.0 * db.lengths * phase * np.sinc(arg / np.pi)
    assert np.max(np.abs(got - expect)) <= 1e-10 * np.max(np.abs(expect))


def test_incident_direction():
    exc = ls.Excitation(phi_inc=np.pi / 2)
    assert exc.direction == pytest.approx((0.0, 1.0), abs=1e-15)


def test_transparent_scene_reproduces_incident_field():
    # Y_s = 0: no current, and the solved boundary field is the tested
    # incident wave divided by the segment lengths
    kern = Kernel.for_medium(ls.VACUUM, FREQ)
    exc = ls.Excitation(phi_inc=0.3)
    db = ls.discretize(ls.Circle((0.0, 0.0), 1.0), 0.08, "g")
    n = db.segment_count
    ys = ls.AdmittanceOperator(np.zeros((n, n), complex), "g", 1)
    g_ext = ls.assemble_G(db, db, kern)
    e_inc = ls.incident_vector(db, exc, kern)
    fields, cond = ls.solve_exterior(ys, g_ext, e_inc, db)
    assert cond == pytest.approx(1.0, rel=1e-12)
    assert np.linalg.norm(fields.j) == 0.0
    assert np.max(np.abs(fields.e - e_inc / db.lengths)) <= 1e-12


def test_far_field_phase_integral_against_quad():
    kern = Kernel.for_medium(ls.VACUUM, FREQ)
    db = ls.discretize(ls.Circle((0.0, 0.0), 1.0), 0.25, "g")
    angles = np.array([0.0, 1.1, 2.9])
    ints = segment_phase_integrals(db, kern.k.real, angles)
    assert ints.shape == (len(angles), db.segment_count)
    m, ia = 4, 1
    rhat = np.array([np.cos(angles[ia]), np.sin(angles[ia])])
    k0 = kern.k.real

    def f(s, part):
        r = db.starts[m] + s * (db.ends[m] - db.starts[m])
        return part(np.exp(1j * k0 * (rhat @ r)))

    re, _ = integrate.quad(f, 0, 1, args=(np.real,), epsabs=1e-13)
    im, _ = integrate.quad(f, 0, 1, args=(np.imag,), epsabs=1e-13)
    ref = db.lengths[m] * (re + 1j * im)
    assert abs(ints[ia, m] - ref) <= 1e-12 * abs(ref)


def test_rcs_curve_validation():
    n = 8
    ang = ls.angle_grid(n)
    with pytest.raises(ValueError):
        ls.RcsCurve(ang, -np.ones(n))
    with pytest.raises(ValueError):
        ls.RcsCurve(ang[::-1].copy(), np.ones(n))
    curve = ls.RcsCurve(ang, np.ones(n))
    assert np.all(curve.sigma_db == 0.0)
    zero = ls.RcsCurve(ang, np.zeros(n))
    assert np.all(np.isneginf(zero.sigma_db))


def test_relative_error_requires_same_grid():
    a = ls.RcsCurve(ls.angle_grid(8), np.ones(8))
    b = ls.RcsCurve(ls.angle_grid(16), np.ones(16))
    with pytest.raises(ValueError):
        ls.relative_error(a, b)
    assert ls.relative_error(a, a) == 0.0


def solve_cylinder(eps_r, ppw, phi_inc=0.0):
    scene = ls.Scene.single(
        ls.VACUUM, (ls.Layer(ls.Circle((0.0, 0.0), 1.0), ls.Medium(eps_r)),)
    )
    mesh = ls.build_scene_mesh(scene, FREQ, ppw)
    exc = ls.Excitation(phi_inc=phi_inc)
    ang = ls.angle_grid(360)
    return ls.solve_scene_dsao(scene, mesh, FREQ, exc, ang)


def test_mirror_symmetry_about_incidence_axis():
    # scene symmetric about the x axis, incidence along x: sigma(phi) must
    # equal sigma(-phi) to solver precision
    curve = solve_cylinder(4.0, 10).curve
    sig = curve.sigma
    mirrored = np.concatenate([sig[:1], sig[:0:-1]])
    assert np.max(np.abs(sig - mirrored)) <= 1e-10 * np.max(sig)


def test_optical_theorem_lossless():
    # total scattering width equals the extinction width from the forward
    # amplitude when nothing absorbs
    result = solve_cylinder(4.0, 14, phi_inc=0.4)
    kern0 = Kernel.for_medium(ls.VACUUM, FREQ)
    total = ls.total_scattering_width(result.curve)
    ext = ls.extinction_width(
        result.fields.j, result.fields.boundary, kern0, ls.Excitation(phi_inc=0.4)
    )
    assert abs(total - ext) / ext < 1e-2


def test_total_width_is_mean_of_curve():
    ang = ls.angle_grid(12)
    rng = np.random.default_rng(5)
    sig = rng.uniform(0.1, 2.0, 12)
    assert ls.total_scattering_width(ls.RcsCurve(ang, sig)) == pytest.approx(
        np.mean(sig)
    )
