import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from negmass.errors import DomainError, SingularPointError, ValidationError
from negmass.lens import (LensGeometry, LensModel,
                          fermat_gradient, find_images, jacobian_det, lens_map,
                          light_curve, magnification_isolated, nondimensionalize,
                          solve_images_isolated, surface_potential, time_delay,
                          total_magnification_isolated)


def closed_form_images(y: complex, m: float):
    ynorm = abs(y)
    yhat = y / ynorm
    root = math.sqrt(ynorm ** 2 + 4 * m)
    return [0.5 * (ynorm + root) * yhat, 0.5 * (ynorm - root) * yhat]


# ---------------------------------------------------------------------------
# nondimensionalization

def test_nondimensionalize_unit_case():
    geo = LensGeometry(d_l=1.0, d_s=2.0, d_ls=1.0, mass=1.0)
    sigma_c, m = nondimensionalize(geo)
    assert sigma_c == pytest.approx(1.0 / math.pi, rel=1e-15)
    assert m == pytest.approx(1.0, rel=1e-15)


def test_nondimensionalize_zero_mass():
    geo = LensGeometry(d_l=3.0, d_s=7.0, d_ls=4.0, mass=0.0)
    assert nondimensionalize(geo)[1] == 0.0


def test_nondimensionalize_scaling_consistency():
    # doubling d_L at fixed M with d_S = d_L + d_LS, recomputed independently
    for d_l in (1.0, 2.0):
        geo = LensGeometry(d_l=d_l, d_s=d_l + 1.5, d_ls=1.5, mass=0.7)
        sigma_c, m = nondimensionalize(geo)
        sigma_direct = geo.d_s / (2 * math.pi * geo.d_l * geo.d_ls)
        m_direct = geo.mass / (math.pi * geo.d_l ** 2 * sigma_direct)
        assert sigma_c == pytest.approx(sigma_direct, rel=1e-15)
        assert m == pytest.approx(m_direct, rel=1e-15)


def test_geometry_rejects_nonpositive_distances():
    with pytest.raises(DomainError):
        LensGeometry(d_l=0.0, d_s=1.0, d_ls=1.0, mass=1.0)


# ---------------------------------------------------------------------------
# potential, map, Jacobian

def test_potential_point_mass_on_unit_circle():
    assert surface_potential(1j, LensModel(-1.0)) == pytest.approx(0.0, abs=1e-15)


def test_potential_pure_convergence():
    assert surface_potential(2.0 + 0j, LensModel(0.0, kappa=1.0)) == pytest.approx(2.0)


def test_potential_combined_value():
    model = LensModel(-1.0, kappa=0.2, gamma=0.2, theta=0.0)
    expected = -1.0 * 0.5 * math.log(2.0) + 0.1 * 2.0 - 0.1 * 0.0
    assert surface_potential(1 + 1j, model) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(-0.14657, abs=5e-6)


def test_potential_singular_at_origin():
    with pytest.raises(SingularPointError):
        surface_potential(0j, LensModel(-1.0))
    with pytest.raises(ValidationError):
        surface_potential(complex("nan"), LensModel(-1.0))


def test_lens_map_isolated():
    assert lens_map(2.0 + 0j, LensModel(-1.0)) == pytest.approx(2.5 + 0j)


def test_lens_map_pure_convergence():
    for z in (1 + 2j, -0.3 + 0.1j):
        assert lens_map(z, LensModel(0.0, kappa=0.25)) == pytest.approx(0.75 * z)


def test_lens_map_pure_shear():
    assert lens_map(1 + 1j, LensModel(0.0, gamma=0.5)) == pytest.approx(1.5 + 0.5j)


def test_lens_map_identity_without_parameters():
    assert lens_map(0.3 - 4j, LensModel(0.0)) == 0.3 - 4j


def test_jacobian_isolated_critical_circle():
    model = LensModel(-1.0)
    for ang in (0.0, 1.1, 3.0):
        z = cmath.exp(1j * ang)
        assert jacobian_det(z, model) == pytest.approx(0.0, abs=1e-14)
    assert jacobian_det(2 ** 0.25 * 1j, model) == pytest.approx(0.5, abs=1e-14)
    assert jacobian_det(2 ** 0.5 + 0j, model) == pytest.approx(0.75, abs=1e-14)


def test_jacobian_identity_map():
    assert jacobian_det(5 + 1j, LensModel(0.0)) == 1.0


# ---------------------------------------------------------------------------
# isolated images

def test_isolated_images_outside_caustic():
    result = solve_images_isolated(3.0 + 0j, -1.0)
    xs = sorted(im.position.real for im in result)
    expect = sorted(x.real for x in closed_form_images(3.0 + 0j, -1.0))
    assert xs == pytest.approx(expect, abs=1e-12)
    assert xs[0] == pytest.approx((3 - math.sqrt(5)) / 2, abs=1e-12)
    assert xs[1] == pytest.approx((3 + math.sqrt(5)) / 2, abs=1e-12)
    # both images sit on the source ray and map back onto the source
    for im in result:
        assert abs(im.position.imag) < 1e-14
        assert abs(lens_map(im.position, LensModel(-1.0)) - 3.0) < 1e-12
    # parities: outer image positive, inner negative
    assert result[0].parity == 1 and result[1].parity == -1


def test_isolated_images_inside_caustic():
    result = solve_images_isolated(1.0 + 0j, -1.0)
    assert len(result) == 0
    assert "inside-caustic" in result.flags


def test_isolated_images_degenerate():
    result = solve_images_isolated(2.0 + 0j, -1.0)
    assert len(result) == 1
    assert result[0].critical
    assert result[0].position == pytest.approx(1.0 + 0j, abs=1e-12)


def test_isolated_images_origin_is_inside():
    assert "inside-caustic" in solve_images_isolated(0j, -1.0).flags


def test_isolated_requires_negative_mass():
    with pytest.raises(DomainError):
        solve_images_isolated(3.0 + 0j, 1.0)


# ---------------------------------------------------------------------------
# general image finding

def test_find_images_matches_closed_form():
    rng = np.random.default_rng(7)
    model_m = rng.uniform(-4.0, -0.25, size=300)
    for m in model_m:
        caustic = 2 * math.sqrt(-m)
        ynorm = rng.uniform(caustic * 1.01, 10.0)
        ang = rng.uniform(0, 2 * math.pi)
        y = ynorm * cmath.exp(1j * ang)
        found = find_images(y, LensModel(m))
        expect = closed_form_images(y, m)
        assert len(found) == 2
        for ex in expect:
            assert min(abs(im.position - ex) for im in found) < 1e-10


def test_find_images_far_source_two_images():
    model = LensModel(-1.0, kappa=0.2, gamma=0.2)
    assert len(find_images(50.0 + 0j, model)) == 2


def test_find_images_four_inside_caustic():
    # eps = -1 regime (kappa = 2): four images around the origin
    model = LensModel(-1.0, kappa=2.0, gamma=0.2)
    result = find_images(0.05 + 0.02j, model)
    assert len(result) == 4
    for im in result:
        assert abs(lens_map(im.position, model) - (0.05 + 0.02j)) <= 1e-9


def test_find_images_gamma_star_above_one():
    # kappa = 0.9, gamma = 0.2: gamma* = 2, caustic loops off-origin
    model = LensModel(-1.0, kappa=0.9, gamma=0.2)
    from negmass.caustics import caustic_curve, reduce
    pts = [s.y_plus for s in caustic_curve(reduce(model), model, 512)]
    loop = [p for p in pts if p.real > 0]
    centroid = sum(loop) / len(loop)
    assert len(find_images(centroid, model)) == 4
    assert len(find_images(0j, model)) == 2


def test_find_images_degenerate_linear_part():
    model = LensModel(-1.0, kappa=1.0, gamma=0.0)
    y = 2.0 + 1.0j
    result = find_images(y, model)
    assert "degenerate-linear-part" in result.flags
    # eta = -m/conj(z), single image at conj(-m/y)
    expect = (-model.m / y).conjugate()
    assert len(result) == 1
    assert result[0].position == pytest.approx(expect, abs=1e-10)


def test_find_images_zero_mass_identity():
    result = find_images(1.5 - 0.5j, LensModel(0.0))
    assert len(result) == 1
    assert result[0].position == pytest.approx(1.5 - 0.5j)


def test_find_images_sorted_by_radius():
    result = find_images(3.0 + 0j, LensModel(-1.0))
    radii = [abs(im.position) for im in result]
    assert radii == sorted(radii, reverse=True)


def test_find_images_count_agreement_inside_and_out():
    # dual route: polynomial solver vs closed form, counts included
    rng = np.random.default_rng(23)
    for _ in range(200):
        m = rng.uniform(-4.0, -0.25)
        y = complex(rng.uniform(-6, 6), rng.uniform(-6, 6))
        if abs(abs(y) - 2 * math.sqrt(-m)) < 1e-3 or abs(y) < 1e-3:
            continue  # stay off the caustic and the axis point
        found = find_images(y, LensModel(m))
        closed = solve_images_isolated(y, m)
        assert len(found) == len(closed)
        for ex in closed:
            assert min((abs(im.position - ex.position) for im in found),
                       default=math.inf) < 1e-10


def test_jacobian_matches_numerical_determinant():
    # central-difference determinant of the full real lens map
    rng = np.random.default_rng(29)
    h = 1e-6
    for _ in range(40):
        model = LensModel(rng.uniform(-3, -0.3), rng.uniform(0, 1.8),
                          rng.uniform(0, 0.5), rng.uniform(0, 3.0))
        z = complex(rng.uniform(0.3, 3), rng.uniform(0.3, 3))
        f = lambda p: lens_map(p, model)
        dfx = (f(z + h) - f(z - h)) / (2 * h)
        dfy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
        det_fd = dfx.real * dfy.imag - dfy.real * dfx.imag
        assert jacobian_det(z, model) == pytest.approx(det_fd, abs=1e-7)


def test_deflection_is_potential_gradient():
    from negmass.lens import deflection
    rng = np.random.default_rng(31)
    h = 1e-6
    for _ in range(40):
        model = LensModel(rng.uniform(-3, -0.3), rng.uniform(0, 1.8),
                          rng.uniform(0, 0.5), rng.uniform(0, 3.0))
        z = complex(rng.uniform(0.3, 3), rng.uniform(0.3, 3))
        gx = (surface_potential(z + h, model) - surface_potential(z - h, model)) / (2 * h)
        gy = (surface_potential(z + 1j * h, model)
              - surface_potential(z - 1j * h, model)) / (2 * h)
        alpha = deflection(z, model)
        assert alpha.real == pytest.approx(gx, abs=1e-7)
        assert alpha.imag == pytest.approx(gy, abs=1e-7)


def test_round_trip_and_magnification_consistency():
    rng = np.random.default_rng(11)
    for _ in range(60):
        m = rng.uniform(-3.0, -0.3)
        kappa = rng.choice([0.0, 0.3, 1.6])
        gamma = rng.uniform(0.0, 0.4)
        model = LensModel(m, kappa, gamma)
        y = complex(rng.uniform(-6, 6), rng.uniform(-6, 6))
        for im in find_images(y, model):
            assert abs(lens_map(im.position, model) - y) <= 1e-9
            jac = jacobian_det(im.position, model)
            assert im.signed_magnification * jac == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.floats(-3.0, -0.3), st.floats(0.0, 0.45), st.floats(0.05, 3.0),
       st.floats(0.1, 5.0), st.floats(0.0, 6.2))
def test_theta_covariance(m, gamma, theta, r, ang):
    z = r * cmath.exp(1j * ang)
    tilted = LensModel(m, 0.2, gamma, theta)
    base = LensModel(m, 0.2, gamma, 0.0)
    rotated = cmath.exp(1j * tilted.theta) * lens_map(
        cmath.exp(-1j * tilted.theta) * z, base)
    assert abs(lens_map(z, tilted) - rotated) <= 1e-12 * max(1.0, abs(z))


def test_theta_normalization():
    assert LensModel(-1.0, theta=math.pi + 0.3).theta == pytest.approx(0.3)
    assert LensModel(-1.0, theta=-0.25).theta == pytest.approx(math.pi - 0.25)


def test_find_images_in_rotated_frame():
    # images of the tilted lens are the rotated images of the theta = 0 lens
    theta = 0.7
    base = LensModel(-1.0, 0.3, 0.25, 0.0)
    tilted = LensModel(-1.0, 0.3, 0.25, theta)
    y0 = 2.5 - 0.8j
    rot = cmath.exp(1j * theta)
    base_imgs = sorted(find_images(y0, base).positions(), key=abs)
    tilt_imgs = sorted(find_images(rot * y0, tilted).positions(), key=abs)
    assert len(base_imgs) == len(tilt_imgs) > 0
    for zb, zt in zip(base_imgs, tilt_imgs):
        assert zt == pytest.approx(rot * zb, abs=1e-10)
        assert abs(lens_map(zt, tilted) - rot * y0) <= 1e-9


# ---------------------------------------------------------------------------
# magnification

def test_total_magnification_example():
    mu = total_magnification_isolated(3.0, -1.0)
    assert mu == pytest.approx(7.0 / (3.0 * math.sqrt(5.0)), rel=1e-14)
    assert mu == pytest.approx(1.04350, abs=5e-6)


def test_total_magnification_unlensed_limit():
    assert total_magnification_isolated(1e3, -1.0) == pytest.approx(1.0, abs=1e-6)


def test_total_magnification_divergence_near_caustic():
    assert total_magnification_isolated(2.0001, -1.0) > 50.0


def test_total_magnification_domain_error():
    with pytest.raises(DomainError):
        total_magnification_isolated(1.9, -1.0)


def test_total_magnification_brute_force_identity():
    rng = np.random.default_rng(3)
    for _ in range(200):
        m = rng.uniform(-4.0, -0.25)
        y = rng.uniform(2 * math.sqrt(-m) * 1.001, 10.0)
        xp, xm = closed_form_images(y + 0j, m)
        brute = magnification_isolated(xp, m) - magnification_isolated(xm, m)
        assert total_magnification_isolated(y, m) == pytest.approx(brute, abs=1e-10)


# ---------------------------------------------------------------------------
# light curves

def test_light_curve_matches_total_magnification():
    samples = light_curve(-1.0, 3.0, [0.0])
    assert samples[0].magnification == pytest.approx(
        total_magnification_isolated(3.0, -1.0), rel=1e-14)


def test_light_curve_even_in_time():
    a, b = light_curve(-1.0, 3.0, [-4.0, 4.0])
    assert a.magnification == pytest.approx(b.magnification, rel=1e-15)


def test_light_curve_occulted_samples():
    # d = 1 < 2 sqrt(-m): samples near t = 0 are occulted
    samples = light_curve(-1.0, 1.0, [-2.0, 0.0, 2.0])
    assert samples[1].magnification is None
    assert samples[0].magnification is not None


def test_light_curve_positive_negative_degeneracy():
    rng = np.random.default_rng(5)
    for _ in range(50):
        m = rng.uniform(-2.0, -0.3)
        d = rng.uniform(2 * math.sqrt(-m) + 0.1, 6.0)
        ts = rng.uniform(-5, 5, size=7)
        twin_d = math.sqrt(d * d + 4 * m)
        neg = light_curve(m, d, ts)
        pos = light_curve(-m, twin_d, ts)
        for a, b in zip(neg, pos):
            assert a.magnification == pytest.approx(b.magnification, abs=1e-12)


# ---------------------------------------------------------------------------
# time delay

def test_time_delay_trivial():
    assert time_delay(1 + 1j, 1 + 1j, LensModel(0.0)).tau == 0.0


def test_time_delay_isolated_value():
    x = (3.0 + math.sqrt(5.0)) / 2.0
    tau = time_delay(x + 0j, 3.0 + 0j, LensModel(-1.0)).tau
    expected = 0.5 * (3.0 - x) ** 2 - (-1.0) * math.log(x)
    assert tau == pytest.approx(expected, rel=1e-14)
    # recomputed by direct substitution (the value 1.03528 sometimes quoted
    # for this configuration drops a digit; substitution gives 1.035373)
    assert tau == pytest.approx(1.0353727, abs=1e-6)


def test_time_delay_physical_prefactor():
    geo = LensGeometry(d_l=1.0, d_s=2.0, d_ls=1.0, mass=1.0, z_l=0.5)
    td = time_delay(2 + 0j, 3 + 0j, LensModel(-1.0), geo)
    assert td.physical == pytest.approx(td.tau * 1.5 * 2.0 / 1.0)


def test_fermat_stationarity_at_images():
    rng = np.random.default_rng(13)
    for _ in range(25):
        m = rng.uniform(-2.0, -0.4)
        model = LensModel(m, 0.3, 0.15)
        y = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        for im in find_images(y, model):
            gx, gy = fermat_gradient(im.position, y, model)
            assert math.hypot(gx, gy) < 1e-8
