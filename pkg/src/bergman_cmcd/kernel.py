"""Reproducing and meromorphic kernels as sums over the composition family."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PoleHit, TailTooLarge
from .geometry import CircularDomain, t_map, t_prime
from .moebius import CompositionFamily


@dataclass
class QuadratureRule:
    """Nodes and weights for ``int f dA`` over the domain (``dA = dx dy / pi``).

    Built as the unit-disk rule minus one scaled copy per hole, which is exact
    for integrands that extend smoothly into the holes.
    """

    nodes: np.ndarray
    weights: np.ndarray
    orders: tuple[int, int]

    def integrate(self, values) -> complex:
        return complex(np.sum(self.weights * np.asarray(values)))

    def __call__(self, f) -> complex:
        return self.integrate(f(self.nodes))


def disk_rule(center: complex, radius: float, radial: int, angular: int):
    """Gauss-Legendre in ``r`` times trapezoid in ``theta`` on ``D(center, radius)``."""
    x, w = np.polynomial.legendre.leggauss(radial)
    r = (x + 1) / 2
    wr = w / 2 * r
    theta = 2 * np.pi * (np.arange(angular) + 0.5) / angular
    nodes = center + radius * np.outer(r, np.exp(1j * theta)).ravel()
    weights = np.repeat(wr, angular) * (2.0 / angular) * radius ** 2
    return nodes, weights


def quadrature_rule(domain: CircularDomain, radial: int = 48, angular: int = 96) -> QuadratureRule:
    nodes, weights = disk_rule(0j, 1.0, radial, angular)
    nodes, weights = [nodes], [weights]
    for d in domain.disks:
        hn, hw = disk_rule(d.center, d.radius, radial, angular)
        nodes.append(hn)
        weights.append(-hw)
    return QuadratureRule(np.concatenate(nodes), np.concatenate(weights), (radial, angular))


@dataclass
class KernelValue:
    value: complex
    error: float


def kernel_tail(domain: CircularDomain, family: CompositionFamily, z, zeta) -> float:
    """Bound for the excluded words: ``|tau'(z)| <= |gamma|/(1-|z| rho_a)^2`` and ``|1 - tau(z) conj(zeta)| >= 1 - |zeta|``."""
    z, zeta = np.abs(z), np.abs(zeta)
    return float(family.tail_bound / ((1 - z * domain.rho_a) ** 2 * (1 - zeta) ** 2))


def kernel_eval(domain: CircularDomain, family: CompositionFamily, z, zeta,
                tol: float = 1e-8) -> KernelValue:
    """``sum_tau tau'(z) / (1 - tau(z) conj(zeta))^2``.

    ``z`` and ``zeta`` may be arrays of the same shape.
    """
    z = np.asarray(z, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(z) >= 1) or np.any(np.abs(zeta) >= 1):
        raise ValueError("kernel arguments must lie in the unit disk")
    err = kernel_tail(domain, family, np.max(np.abs(z)), np.max(np.abs(zeta)))
    if err > tol:
        raise TailTooLarge(f"kernel tail bound {err:.3g} exceeds {tol:.3g}")
    tz = family.evaluate(z)
    dz = family.derivative(z)
    val = np.sum(dz / (1 - tz * np.conj(zeta)) ** 2, axis=0)
    return KernelValue(val[()] if val.ndim == 0 else val, err)


def m_kernel_eval(domain: CircularDomain, family: CompositionFamily, z, zeta,
                  guard: float = 1e-14) -> complex:
    """``sum_tau (tau(z) - tau(0)) / ((zeta - tau(0)) (zeta - tau(z)))``."""
    z = complex(z)
    zeta = complex(zeta)
    tz = family.evaluate(z)
    t0 = family.evaluate(0j)
    if np.min(np.abs(zeta - tz)) < guard or np.min(np.abs(zeta - t0)) < guard:
        raise PoleHit(f"zeta = {zeta} coincides with an image point")
    return complex(np.sum((tz - t0) / ((zeta - t0) * (zeta - tz))))


def reproduce_check(domain: CircularDomain, family: CompositionFamily, f, z,
                    rule: QuadratureRule | None = None) -> float:
    """``|int f(zeta) K(z, zeta) dA(zeta) - f(z)|`` with a tensor quadrature rule.

    ``f`` is a vectorized callable (for example a numpy polynomial).
    """
    rule = rule or quadrature_rule(domain)
    z = complex(z)
    tz = family.evaluate(z)[:, None]
    dz = family.derivative(z)[:, None]
    K = np.sum(dz / (1 - tz * np.conj(rule.nodes)[None, :]) ** 2, axis=0)
    return abs(rule.integrate(f(rule.nodes) * K) - complex(f(z)))


def hole_pullback(domain: CircularDomain, j: int, f, z, radial: int = 48,
                  angular: int = 96) -> tuple[complex, complex]:
    """``(int_{hole j} f(zeta)/(1 - z conj(zeta))^2 dA, T_j'(z) f(T_j(z)))``."""
    d = domain.disk(j)
    nodes, weights = disk_rule(d.center, d.radius, radial, angular)
    lhs = complex(np.sum(weights * f(nodes) / (1 - z * np.conj(nodes)) ** 2))
    rhs = complex(t_prime(d, z) * f(t_map(d, z)))
    return lhs, rhs


def kernel_relation_check(domain: CircularDomain, family: CompositionFamily, z, zeta,
                          h: float = 1e-5) -> float:
    """Relative gap between a central difference of ``M`` in ``z`` and ``K(z, 1/conj(zeta)) / zeta^2``.

    ``zeta`` lies outside the closed unit disk here, so the kernel sum is
    written out directly instead of going through :func:`kernel_eval`.
    """
    z, zeta = complex(z), complex(zeta)
    fd = (m_kernel_eval(domain, family, z + h, zeta) - m_kernel_eval(domain, family, z - h, zeta)) / (2 * h)
    tz = family.evaluate(z)
    dz = family.derivative(z)
    exact = complex(np.sum(dz / (zeta - tz) ** 2))
    return abs(fd - exact) / abs(exact)
