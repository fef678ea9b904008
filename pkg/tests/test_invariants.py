import numpy as np
import pytest

from rosettefront import (FrontBranch, NearSingular, NotOnSlice, Rosette, SwallowtailPoint, WidthFunction,
                          support_function)
from rosettefront import invariants as inv
from rosettefront.rosette import unit_tangent
from rosettefront.verify import wigner_cusps

from conftest import circle, oval, two_rosette


def edge_thetas(b, n, rng, margin=0.02):
    sw = np.array(b.swallowtails())
    out = []
    while len(out) < n:
        t = rng.uniform(0, b.period)
        if np.min(np.abs(np.angle(np.exp(1j * (t - sw) * 2 * np.pi / b.period)))) * b.period / (2 * np.pi) > margin:
            out.append(t)
    return np.array(out)


@pytest.fixture(scope="module")
def ob():
    return FrontBranch(oval(), 1)


def test_circle_geodesic_curvature_on_boundary():
    b = FrontBranch(circle(), 1)
    assert np.allclose(np.abs(inv.geodesic_curvature(b, 1.0, np.linspace(0, 6, 7))), 2 / np.sqrt(5), rtol=1e-14)


def test_geodesic_curvature_two_routes(ob, rng):
    lam, theta = rng.uniform(0, 1, 200), rng.uniform(0, 2 * np.pi, 200)
    keep = np.abs(lam - ob.singular_lambda(theta)) > 0.05
    det = inv.geodesic_curvature(ob, lam[keep], theta[keep])
    closed = inv.geodesic_curvature_closed(ob, lam[keep], theta[keep])
    assert np.allclose(det, closed, rtol=1e-8)


def test_geodesic_curvature_guard(ob):
    with pytest.raises(NearSingular):
        inv.geodesic_curvature(ob, ob.singular_lambda(1.0), 1.0)


def test_geodesic_measure_is_width_measure_on_every_slice(ob):
    # offset grid: theta = 0 is a Wigner cusp, where f_theta vanishes on the half slice
    theta = np.linspace(0, 2 * np.pi, 101) + 0.013
    for lam in (0.0, 0.3, 0.5, 1.0):
        assert np.allclose(inv.geodesic_measure(ob, lam, theta), inv.width_measure(ob, theta), atol=1e-13)


def test_curve_measure_on_constant_loop_matches_slice(ob):
    theta = np.linspace(0, 2 * np.pi, 17)
    jet = [np.full_like(theta, 0.99), np.zeros_like(theta), np.zeros_like(theta)]
    assert np.allclose(inv.curve_geodesic_measure(ob, jet, theta), inv.geodesic_measure(ob, 0.99, theta))


def test_singular_curvature_against_oracle(ob, rng):
    orc = ob.oracle()
    for t in edge_thetas(ob, 10, rng):
        assert float(inv.singular_curvature(ob, t)) == pytest.approx(orc.singular_curvature(t), rel=1e-6)


def test_singular_curvature_orientation_independent(ob):
    # the same front parameterised with theta reversed
    from rosettefront.frontgeom import FrontOracle

    rev = FrontOracle(lambda u, v: ob.f(u, -v), lambda u, v: ob.normal(u, -v))
    fwd = ob.oracle()
    for t in (0.4, 1.9, 4.0):
        assert rev.singular_curvature(-t) == pytest.approx(fwd.singular_curvature(t), rel=1e-6)


def test_singular_curvature_measure_cancels_factors(ob, rng):
    theta = edge_thetas(ob, 20, rng)
    literal = inv.singular_curvature(ob, theta) * inv.singular_speed(ob, theta)
    assert np.allclose(literal, inv.singular_curvature_measure(ob, theta), rtol=1e-9)


def test_circle_has_no_cuspidal_edges():
    b = FrontBranch(circle(), 1)
    for fn in (inv.singular_curvature, inv.cuspidal_curvature, inv.cusp_directional_torsion):
        with pytest.raises(SwallowtailPoint):
            fn(b, 0.3)


@pytest.mark.parametrize("factory", [oval, two_rosette])
def test_limiting_normal_curvature_vanishes(factory, rng):
    b = FrontBranch(factory(), 1)
    theta = edge_thetas(b, 200, rng, margin=1e-3)
    assert np.max(np.abs(inv.limiting_normal_curvature(b, theta))) < 1e-8


def test_cuspidal_curvature_nonzero_and_against_oracle(ob, rng):
    theta = edge_thetas(ob, 200, rng, margin=1e-3)
    assert np.min(np.abs(inv.cuspidal_curvature(ob, theta))) > 0
    orc = ob.oracle()
    for t in theta[:20]:
        assert abs(orc.cuspidal_curvature(t)) == pytest.approx(float(inv.cuspidal_curvature(ob, t)), rel=1e-5)


def test_printed_cuspidal_variant_differs_by_curvature(ob, rng):
    theta = edge_thetas(ob, 10, rng)
    ratio = inv.cuspidal_curvature_printed(ob, theta) / inv.cuspidal_curvature(ob, theta)
    assert np.allclose(ratio, ob.parent.curvature(theta), rtol=1e-10)


def test_blow_up_at_swallowtails(ob):
    s = ob.swallowtails()[0]
    kc = [float(inv.cuspidal_curvature(ob, s + d)) for d in (1e-6, 1e-8)]
    kt = [float(inv.cusp_directional_torsion(ob, s + d)) for d in (1e-6, 1e-8)]
    # square-root and simple-pole growth
    assert kc[1] / kc[0] == pytest.approx(10, rel=1e-3)
    assert kt[1] / kt[0] == pytest.approx(100, rel=1e-3)
    assert abs(float(inv.cusp_directional_torsion(ob, s + 1e-12))) > 1e6
    with pytest.raises(SwallowtailPoint):
        inv.cuspidal_curvature(ob, s)


def test_cusp_torsion_against_oracle(ob, rng):
    orc = ob.oracle()
    for t in edge_thetas(ob, 8, rng):
        assert orc.cusp_directional_torsion(t) == pytest.approx(float(inv.cusp_directional_torsion(ob, t)), rel=1e-5)


def test_total_torsion_integer(ob):
    res = inv.total_torsion(ob)
    assert res.distance_to_integer < 1e-6
    assert abs(res.kappa_t_total) < 1e-6


def test_total_torsion_of_symmetric_rosette_is_zero():
    # p(theta) = p(-theta): the singular curve has a mirror symmetry that flips the torsion sign
    b = FrontBranch(Rosette(support_function(31, [(2, 2, 0), (5, 1, 0)])), 1)
    res = inv.total_torsion(b)
    assert res.n == 0 and abs(res.turns) < 1e-6


def test_total_torsion_of_circle_fails():
    from rosettefront import DegenerateZero

    with pytest.raises(DegenerateZero):
        inv.total_torsion(FrontBranch(circle(), 1))


def test_beta_chord_identities(ob, rng):
    theta = rng.uniform(0, 2 * np.pi, 50)
    r = ob.parent
    chord = r.point(theta + np.pi) - r.point(theta)
    cos_b = np.sum(unit_tangent(theta) * chord, -1) / np.linalg.norm(chord, axis=-1)
    assert np.allclose(np.cos(inv.beta(ob, theta, oriented=False)), cos_b, atol=1e-14)
    w, dw = ob.width(theta), ob.width(theta, 1)
    assert np.allclose(np.sum(chord * chord, -1), w * w + dw * dw, rtol=1e-13)


def test_alpha_plus_requires_half_slice(ob):
    grid = np.linspace(0, 2 * np.pi, 64)
    far = grid[np.argmax(np.abs(ob.singular_lambda(grid) - 0.5))]
    with pytest.raises(NotOnSlice):
        inv.alpha_plus(ob, far)


def test_constant_width_oval_alpha_plus_off_slice():
    r = Rosette(support_function(10, [(3, 0.3, 0.2)]))
    b = FrontBranch(r, 1)
    assert np.ptp(WidthFunction(r, 1)(np.linspace(0, 6, 40))) < 1e-12
    with pytest.raises(NotOnSlice):
        inv.alpha_plus(b, 0.1)


def test_alpha_plus_at_wigner_cusps_against_oracle(ob):
    cusps = wigner_cusps(ob)
    assert len(cusps) == 10
    for t in cusps:
        assert float(inv.alpha_plus(ob, t)) == pytest.approx(inv.sector_angle_oracle(ob, t, lam_slice=0.5), rel=1e-5)


def test_alpha_plus_pairs_sum_to_pi(ob):
    cusps = np.array(wigner_cusps(ob))
    a = inv.alpha_plus(ob, cusps)
    b = inv.alpha_plus(ob, cusps + np.pi)
    assert np.allclose(a + b, np.pi, atol=1e-10)


def test_width_function_odd_harmonics():
    w = WidthFunction(oval(), 1)
    theta = np.linspace(0, 2 * np.pi, 9)
    r = oval()
    assert np.allclose(w(theta), r.sf(theta) + r.sf(theta + np.pi))
    assert np.allclose(w(theta), 62 + 4 * np.cos(2 * theta))
    assert np.all(w.odd_coefficients() < 1e-14)
