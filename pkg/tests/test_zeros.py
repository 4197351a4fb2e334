import mpmath
import numpy as np
import pytest

from bergman_cmcd import zeros as Z
from bergman_cmcd.errors import NotTwoCircle
from bergman_cmcd.geometry import validate
from bergman_cmcd.moments import orthopoly
from bergman_cmcd.polynomial import MonicPolynomial


def test_quadratic():
    m = Z.roots(MonicPolynomial([-1, 0], 128))
    assert np.allclose(np.sort(m.roots.real), [-1, 1], atol=1e-15)
    assert np.all(np.abs(m.roots.imag) < 1e-15)


def test_annulus_zero_at_origin(annulus):
    P, _ = orthopoly(annulus, 12)
    m = Z.roots(P)
    assert m.exact_zero_multiplicity == 12
    u = Z.angular_uniformity(m, 0.0)
    assert u.degenerate


@pytest.mark.parametrize("n", [7, 16, 33])
def test_roots_of_unity_are_uniform(n):
    rho = 0.6
    P = MonicPolynomial([-(rho ** n)] + [0] * (n - 1), 128)
    m = Z.roots(P)
    assert np.allclose(np.abs(m.roots), rho, atol=1e-14)
    u = Z.angular_uniformity(m, rho)
    assert u.ks_distance <= 1 / n + 1e-12
    assert u.radial_spread < 1e-14


def test_from_roots_round_trip():
    rng = np.random.default_rng(3)
    r = rng.normal(size=9) + 1j * rng.normal(size=9)
    m = Z.roots(MonicPolynomial.from_roots(r, 256))
    found = sorted(m.roots, key=lambda v: (v.real, v.imag))
    assert np.allclose(found, sorted(r, key=lambda v: (v.real, v.imag)), atol=1e-12)


@pytest.mark.parametrize("n", [20, 40, 60])
def test_reference_zeros(ref, n):
    P, _ = orthopoly(ref, n)
    m = Z.roots(P)
    assert m.max_residual < 1e-10
    assert Z.exterior_clear(m, ref.rho_x)


def test_q_of_n():
    s2 = 0.3 ** 2
    assert Z.q_of_n(s2, 1) == 0
    assert Z.q_of_n(s2, 5) == pytest.approx(Z.q_of_n(s2, 5 / s2), abs=1e-12)
    assert 0 <= Z.q_of_n(s2, 123) < 1


def test_two_circle_limit_depends_only_on_q(ref):
    z = 0.1 + 0.15j
    a = Z.two_circle_limit(ref, 0.3, z)
    b = Z.two_circle_limit(ref, 0.3, z)
    assert a == b
    with pytest.raises(ValueError):
        Z.two_circle_limit(ref, 1.0, z)


def test_two_circle_refusals(annulus, two_disks):
    with pytest.raises(NotTwoCircle):
        Z.two_circle_limit(two_disks, 0.2, 0.1)
    with pytest.raises(NotTwoCircle):
        Z.two_circle_limit(annulus, 0.2, 0.1)


def _scaled(P, a, n, z):
    with mpmath.workprec(P.precision_bits):
        return complex(n * P(mpmath.mpc(z)) / mpmath.mpc(a) ** (n + 1))


def test_two_circle_convergence(ref):
    d = ref.disk(1)
    z = 0.1 + 0.15j
    prods = []
    for n in (40, 80, 160):
        P, _ = orthopoly(ref, n)
        lim = Z.two_circle_limit(ref, Z.q_of_n(d.sigma ** 2, n), z)
        prods.append(n * abs(_scaled(P, d.a, n, z) - lim))
    # error is O(1/n): n times the error stays bounded
    assert max(prods) < 5


def test_winding_matches_limit(ref):
    d = ref.disk(1)
    n = 80
    P, _ = orthopoly(ref, n)
    q = Z.q_of_n(d.sigma ** 2, n)
    r = 0.8 * ref.rho_a
    assert Z.winding_count(lambda z: _scaled(P, d.a, n, z), r) == \
        Z.winding_count(lambda z: Z.two_circle_limit(ref, q, z), r)
    assert Z.winding_count(lambda z: z ** 3 - 0.001, 0.5) == 3
