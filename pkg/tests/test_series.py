import math

import numpy as np
import pytest

from bergman_cmcd.errors import NotYetAsymptotic, PointTooCloseToContour
from bergman_cmcd.moebius import enumerate_family
from bergman_cmcd.moments import orthogonality_residual, orthopoly
from bergman_cmcd.series import (ContourGrid, build_layers, default_radius, even_layer,
                                 layer_norm_report, odd_layer, series_orthopoly)


def _oracle(dom, n):
    P, kappa = orthopoly(dom, n)
    return P.to_numpy()[:-1], float(kappa)


def test_contour_grid_spectral_accuracy():
    f = lambda z: 1 / (2 - z)
    g = ContourGrid.from_function(f, 1.0, 64)
    z = np.array([0.5, -0.3 + 0.4j])
    assert np.max(np.abs(g.cauchy_eval(z) - f(z))) < 1e-15
    c = g.taylor()[:10]
    assert np.max(np.abs(c - 0.5 ** np.arange(1, 11))) < 1e-15
    assert g.spectral_error(0.5) < 1e-17


def test_annulus_first_odd_layer(annulus):
    fam = enumerate_family(annulus, 80)
    n, rho = 4, 1.0
    q = 0.25 ** (n + 1)
    odd = odd_layer(fam, None, n, rho, 64)
    z = odd.nodes
    assert np.max(np.abs(odd.samples - z ** (n + 1) * q / (1 - q))) < 1e-16
    assert abs(odd_layer(fam, None, n, rho, 64).samples[0] - q / (1 - q)) < 1e-16
    even = even_layer(odd, n)
    assert np.max(np.abs(even(np.array([0, 0.3, -0.5j])) + q / (1 - q))) < 1e-16


def test_annulus_odd_layer_vanishes_at_origin(annulus):
    fam = enumerate_family(annulus, 20)
    grid = ContourGrid.from_function(lambda z: np.zeros_like(z), 1.0, 32)
    assert abs(grid.cauchy_eval(0.0)) == 0
    odd = odd_layer(fam, None, 3, 1.0, 32)
    assert abs(odd.cauchy_eval(0.0)) < 1e-18


def test_even_layer_simple_inputs():
    n = 5
    zero = ContourGrid.from_function(lambda z: 0 * z, 1.2, 64)
    assert np.all(even_layer(zero, n)(np.array([0.1, 0.5j])) == 0)
    mono = ContourGrid.from_function(lambda z: z ** (n + 1), 1.2, 64)
    vals = even_layer(mono, n)(np.array([0.0, 0.3, -0.4 + 0.2j]))
    assert np.max(np.abs(vals + 1)) < 1e-14


def test_even_layer_guard():
    g = ContourGrid.from_function(lambda z: z ** 4, 1.0, 32)
    with pytest.raises(PointTooCloseToContour):
        even_layer(g, 3)(0.99)


def test_default_radius(ref, annulus):
    assert default_radius(annulus) == 1.0
    assert ref.rho_a < default_radius(ref) < 1 / ref.rho_a
    assert default_radius(ref) == pytest.approx((1 + 5 / 3) / 2)


def test_annulus_series_exact(annulus):
    fam = enumerate_family(annulus, 80)
    res = series_orthopoly(annulus, fam, 10)
    assert np.max(np.abs(res.polynomial.to_numpy()[:-1])) < 1e-12
    assert res.kappa == pytest.approx(math.sqrt(11 / (1 - 0.5 ** 22)), rel=1e-12)


@pytest.mark.parametrize("n", [20, 30])
def test_reference_series_matches_oracle(ref, ref_family, n):
    res = series_orthopoly(ref, ref_family, n, K=6, M=512)
    b, kappa = _oracle(ref, n)
    c = res.polynomial.to_numpy()
    assert c[-1] == 1
    assert np.max(np.abs(c[:-1] - b)) < 1e-8
    assert abs(res.kappa - kappa) / kappa < 1e-8
    assert orthogonality_residual(ref, list(c)) < 1e-6


def test_small_degree_refused(ref, ref_family):
    with pytest.raises(NotYetAsymptotic):
        series_orthopoly(ref, ref_family, 5)


def test_contour_radius_independence(ref, ref_family):
    a = series_orthopoly(ref, ref_family, 30, rho=1.1)
    b = series_orthopoly(ref, ref_family, 30, rho=1.4)
    diff = np.max(np.abs(a.polynomial.to_numpy() - b.polynomial.to_numpy()))
    assert diff <= a.error + b.error + 1e-14


def test_exterior_identity(ref, ref_family):
    n = 30
    stack = build_layers(ref, ref_family, n, rho=1.2, M=512)
    c = stack.calP_coefficients()
    z = np.array([1.5, 1.8j, -1.6 - 0.3j])
    direct = np.polynomial.polynomial.polyval(z, c)
    assert np.max(np.abs(stack.calP_exterior(z) - direct) / np.abs(direct)) < 1e-12


def test_layer_norms(ref, ref_family):
    stack = build_layers(ref, ref_family, 40, rho=1.1, M=512)
    report = layer_norm_report(stack)
    for row in report:
        assert row.odd_sup <= row.odd_bound
        if row.even_sup is not None:
            assert row.even_sup <= row.even_bound
    norms = [row.odd_sup for row in report]
    assert all(b / a <= stack.V_estimate * 1.1 for a, b in zip(norms, norms[1:]))
    assert all(b < a for a, b in zip(norms[1:], norms[2:]))
