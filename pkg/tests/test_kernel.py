import numpy as np
import pytest

from bergman_cmcd.errors import PoleHit, TailTooLarge
from bergman_cmcd.kernel import (hole_pullback, kernel_eval, kernel_relation_check, m_kernel_eval,
                                 quadrature_rule, reproduce_check)
from bergman_cmcd.moebius import enumerate_family, identity_family
from bergman_cmcd.moments import moment


@pytest.fixture(scope="module")
def fam10(ref):
    return enumerate_family(ref, 10)


def test_quadrature_weights_and_exactness(ref, two_disks):
    for dom in (ref, two_disks):
        rule = quadrature_rule(dom)
        assert abs(rule.weights.sum() - (1 - sum(r * r for r in dom.radii))) < 1e-12
        z = rule.nodes
        for n in range(6):
            for m in range(6):
                q = rule.integrate(z ** n * np.conj(z) ** m)
                assert abs(q - complex(moment(dom, n, m))) < 1e-10


def test_annulus_kernel_closed_form(annulus):
    fam = enumerate_family(annulus, 80)
    r2 = 0.25
    assert kernel_eval(annulus, fam, 0, 0).value == pytest.approx(1 / (1 - r2), abs=1e-14)
    z, w = 0.3 + 0.2j, -0.5 + 0.1j
    v = r2 ** np.arange(81)
    exact = np.sum(v / (1 - v * z * np.conj(w)) ** 2)
    assert abs(kernel_eval(annulus, fam, z, w).value - exact) < 1e-14


def test_unit_disk_kernel(ref):
    fam = identity_family()
    z, w = 0.3 + 0.2j, -0.5 + 0.1j
    assert abs(kernel_eval(ref, fam, z, w).value - 1 / (1 - z * np.conj(w)) ** 2) < 1e-15


def test_kernel_hermitian_and_positive(two_disks):
    fam = enumerate_family(two_disks, 12, 1e-20)
    rng = np.random.default_rng(7)
    pts = 0.8 * np.sqrt(rng.random(40)) * np.exp(2j * np.pi * rng.random(40))
    z, w = pts[:20], pts[20:]
    k1 = kernel_eval(two_disks, fam, z, w).value
    k2 = kernel_eval(two_disks, fam, w, z).value
    assert np.max(np.abs(k1 - np.conj(k2))) < 1e-10
    p = pts[:5]
    K = kernel_eval(two_disks, fam, p[:, None] * np.ones(5), np.ones(5)[:, None] * p).value
    assert np.all(np.linalg.eigvalsh((K + K.conj().T) / 2) > 0)


def test_tail_too_large(ref):
    fam = enumerate_family(ref, 1)
    with pytest.raises(TailTooLarge):
        kernel_eval(ref, fam, 0.9, 0.9, tol=1e-12)


def test_m_kernel(ref, fam10, annulus):
    assert m_kernel_eval(ref, fam10, 0, 1.5) == 0
    fam = enumerate_family(annulus, 30)
    z, w = 0.4 + 0.1j, 1.3 - 0.2j
    v = 0.25 ** np.arange(31)
    # all tau(0) = 0, so each term reduces to v z / (w (w - v z))
    exact = np.sum(v * z / (w * (w - v * z)))
    assert abs(m_kernel_eval(annulus, fam, z, w) - exact) < 1e-15
    with pytest.raises(PoleHit):
        m_kernel_eval(ref, fam10, 0.2, fam10.evaluate(0.2)[1])


def test_kernel_relation(ref, fam10):
    for z, w in ((0.1 + 0.2j, 1.5 - 0.5j), (-0.3, 2j)):
        assert kernel_relation_check(ref, fam10, z, w) < 1e-6


def test_reproducing_property(ref, fam10, annulus):
    ann = enumerate_family(annulus, 80)
    assert reproduce_check(annulus, ann, lambda w: np.ones_like(w), 0.3) < 1e-8
    assert reproduce_check(ref, fam10, lambda w: w ** 3, -0.5) < 1e-6


def test_hole_pullback(ref, two_disks):
    for dom in (ref, two_disks):
        for j in range(1, dom.s + 1):
            lhs, rhs = hole_pullback(dom, j, lambda w: w ** 2, 0.3 - 0.4j)
            assert abs(lhs - rhs) < 1e-8
