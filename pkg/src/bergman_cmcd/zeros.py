"""Zeros of ``P_n`` and their empirical distribution."""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .asymptotics import ThetaFunction
from .errors import NonConvergence, NotTwoCircle
from .geometry import CircularDomain
from .polynomial import MonicPolynomial


def _aberth_np(coeffs: np.ndarray, z: np.ndarray, max_iter: int, tol: float):
    """Aberth-Ehrlich in double precision; ``coeffs`` ascending, monic."""
    p = np.polynomial.Polynomial(coeffs)
    dp = p.deriv()
    for it in range(max_iter):
        ratio = p(z) / dp(z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1)
        inv = 1 / diff
        np.fill_diagonal(inv, 0)
        w = ratio / (1 - ratio * inv.sum(axis=1))
        w = np.where(np.isfinite(w), w, 0)
        z = z - w
        if np.max(np.abs(w)) <= tol * max(1.0, np.max(np.abs(z))):
            return z, it + 1
    return z, max_iter


def _aberth_mp(P: MonicPolynomial, z: list, max_iter: int):
    """Aberth-Ehrlich at the polynomial's precision."""
    coeffs = P.all_coeffs()
    dcoeffs = P.derivative_coeffs()
    n = len(z)
    eps = mpmath.mpf(2) ** (-P.precision_bits + 8)
    for it in range(max_iter):
        ratios = []
        for zk in z:
            pv = mpmath.polyval(coeffs[::-1], zk)
            dv = mpmath.polyval(dcoeffs[::-1], zk)
            ratios.append(pv / dv if dv != 0 else mpmath.mpc(0))
        new, biggest = [], mpmath.mpf(0)
        for k in range(n):
            s = mpmath.fsum(1 / (z[k] - z[j]) for j in range(n) if j != k and z[k] != z[j])
            w = ratios[k] / (1 - ratios[k] * s)
            new.append(z[k] - w)
            biggest = max(biggest, abs(w))
        z = new
        if biggest <= eps * max(1, max(abs(v) for v in z)):
            return z, it + 1
    return z, max_iter


@dataclass
class EmpiricalZeroMeasure:
    roots: np.ndarray
    n: int
    residuals: np.ndarray
    iterations: int
    exact_zero_multiplicity: int = 0

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.roots)

    @property
    def radial_stats(self) -> dict:
        q = np.quantile(self.moduli, [0.0, 0.25, 0.5, 0.75, 1.0]) if self.n else np.zeros(5)
        return dict(zip(("min", "q25", "median", "q75", "max"), q))

    @property
    def angular_cdf(self) -> np.ndarray:
        """Sorted arguments in ``[0, 2 pi)``."""
        return np.sort(np.mod(np.angle(self.roots), 2 * np.pi))

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if self.n else 0.0


def _backward_error(P: MonicPolynomial, z) -> float:
    """``|P(z)| / sum |b_k| |z|^k``."""
    with mpmath.workprec(P.precision_bits):
        z = mpmath.mpc(z)
        num = abs(P(z))
        den = mpmath.fsum(abs(b) * abs(z) ** k for k, b in enumerate(P.all_coeffs()))
        return float(num / den)


def roots(P: MonicPolynomial, radius: float | None = None, max_iter: int = 200,
          polish: bool = True) -> EmpiricalZeroMeasure:
    """All zeros of ``P`` by simultaneous Aberth-Ehrlich iteration.

    Starting points sit on a circle of ``radius`` (by default the geometric
    mean modulus ``|b_0|^{1/n}``).  A double-precision pass is followed by
    polishing at the coefficient precision.  Exactly vanishing low-order
    coefficients give exact zeros at the origin, which are split off first.
    """
    n = P.degree
    if n < 1:
        raise ValueError("degree must be >= 1")
    coeffs = P.all_coeffs()
    mult = 0
    while mult < n and coeffs[mult] == 0:
        mult += 1
    if mult == n:
        return EmpiricalZeroMeasure(np.zeros(n, dtype=complex), n, np.zeros(n), 0, n)
    reduced = MonicPolynomial(coeffs[mult:-1], P.precision_bits)
    m = reduced.degree
    c = reduced.to_numpy()
    if radius is None:
        radius = abs(complex(c[0])) ** (1 / m) or 1.0
    start = radius * np.exp(2j * np.pi * (np.arange(m) + 0.25) / m)
    z, it = _aberth_np(c, start, max_iter, 1e-14)
    if polish and P.precision_bits > 53:
        with mpmath.workprec(P.precision_bits):
            zm, it2 = _aberth_mp(reduced, [mpmath.mpc(v) for v in z], max_iter)
        if it2 == max_iter:
            raise NonConvergence(f"Aberth iteration did not converge in {max_iter} steps")
        it += it2
        z = np.array([complex(v) for v in zm])
        res = np.array([_backward_error(reduced, v) for v in zm])
    else:
        if it == max_iter:
            raise NonConvergence(f"Aberth iteration did not converge in {max_iter} steps")
        res = np.array([_backward_error(reduced, v) for v in z])
    allz = np.concatenate([np.zeros(mult, dtype=complex), z])
    allr = np.concatenate([np.zeros(mult), res])
    return EmpiricalZeroMeasure(allz, n, allr, it, mult)


@dataclass
class Uniformity:
    ks_distance: float
    radial_spread: float
    degenerate: bool


def angular_uniformity(measure: EmpiricalZeroMeasure, rho: float) -> Uniformity:
    """KS distance of the arguments from the uniform law, and mean ``||z| - rho|``."""
    n = measure.n
    u = measure.angular_cdf / (2 * np.pi)
    i = np.arange(1, n + 1)
    ks = float(max(np.max(i / n - u), np.max(u - (i - 1) / n)))
    spread = float(np.mean(np.abs(measure.moduli - rho)))
    degenerate = bool(np.all(measure.moduli == 0))
    return Uniformity(ks, spread, degenerate)


def exterior_clear(measure: EmpiricalZeroMeasure, radius: float) -> bool:
    """No zero with ``|z| >= radius``."""
    return bool(np.all(measure.moduli < radius))


def q_of_n(sigma2: float, n: int) -> float:
    """Fractional part of ``log_{sigma^2} n``."""
    v = math.log(n) / math.log(sigma2)
    return v - math.floor(v)


def two_circle_limit(domain: CircularDomain, q: float, z) -> complex:
    """``(Phi'/Phi)(z) Theta_{sigma^2}(sigma^{2q} alpha Phi(z))`` for a one-hole domain."""
    if domain.s != 1 or domain.disk(1).concentric:
        raise NotTwoCircle("needs exactly one non-concentric hole")
    if not 0 <= q < 1:
        raise ValueError("q must lie in [0, 1)")
    d = domain.disk(1)
    z = complex(z)
    p = complex(d.phi(z))
    s2 = d.sigma ** 2
    return complex(d.phi_prime(z)) / p * ThetaFunction(s2)(s2 ** q * d.alpha * p)


def winding_count(f, radius: float, samples: int = 2048) -> int:
    """Zeros minus poles of ``f`` inside ``|z| = radius`` by the argument principle."""
    z = radius * np.exp(2j * np.pi * np.arange(samples + 1) / samples)
    vals = np.array([complex(f(v)) for v in z])
    if np.any(vals == 0):
        raise ValueError("f vanishes on the circle")
    steps = np.angle(vals[1:] / vals[:-1])
    return int(round(steps.sum() / (2 * np.pi)))
