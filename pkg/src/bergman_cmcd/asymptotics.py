"""Asymptotic formulas for ``kappa_n`` and ``P_n`` and the contour integrals behind them."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.special import binom

from .errors import (AtPole, BranchGuard, InsideRhoX, OnContour, OnExceptionalPoint,
                     ThetaDomainError, TooCloseToAj)
from .geometry import CircularDomain, Disk, t_map, t_prime
from .moebius import CompositionFamily, m_of_r
from .moments import orthopoly


# ---------------------------------------------------------------- R_j(w, z)

def _ratio(d: Disk) -> float:
    """``y/x`` (real, ``|y/x| > 1``) for a disk that does not pass through 0."""
    return ((abs(d.center) + d.radius) / (abs(d.center) - d.radius))


def _singularities(d: Disk, z: complex) -> list[complex]:
    """Points in the ``w`` plane where ``R(., z)`` stops being analytic."""
    u = 1 - z / d.x
    if d.through_origin:
        return [-u * u]
    Y = _ratio(d)
    den = 1 - 2 * z / (d.y + d.x)
    out = [complex(Y * Y - 1)]
    if den != 0:
        out.append(-u * u / den)
    return out


def guard_radius(d: Disk, z: complex) -> float:
    """Distance from ``w = 0`` to the nearest singularity of ``R(., z)``."""
    return min(abs(s) for s in _singularities(d, z))


def r_function(domain: CircularDomain, j: int, w, z, check: bool = True) -> complex:
    """``R_j(w, z)``; the special branch is used when the circle passes through 0.

    The square root is the principal one, positive at ``w = 0``.
    """
    d = domain.disk(j)
    if d.concentric:
        raise AtPole("R_j is undefined for a concentric disk")
    w, z = complex(w), complex(z)
    if z == d.x:
        raise AtPole(f"z = x_{j}")
    if check and abs(w) >= guard_radius(d, z):
        raise BranchGuard(f"|w| = {abs(w):.3g} outside the Maclaurin disk of R_{j}")
    x = d.x
    if d.through_origin:
        return -(1 - z / x + w * (1 + z / x)) / ((1 - z / x) ** 2 + w)
    y = d.y
    Y = _ratio(d)
    front = d.epsilon * (Y - 1) / cmath.sqrt(Y * Y - 1 - w)
    num = (1 - z / x + w * ((y - 2 * x) / (y - x) + (y * y + x * x) / (y * y - x * x) * z / x)
           - x * w * w / (y - x))
    den = (1 - z / x) ** 2 + w * (1 - 2 * z / (y + x))
    return front * num / den


def r_coefficients(domain: CircularDomain, j: int, z, K: int, points: int = 128) -> np.ndarray:
    """Maclaurin coefficients ``R_{j,0..K}(z)`` in ``w`` by a trapezoid rule on a small circle."""
    d = domain.disk(j)
    z = complex(z)
    if z == d.x:
        raise AtPole(f"z = x_{j}")
    if d.through_origin and z == 0:
        out = np.zeros(K + 1, dtype=complex)
        out[0] = -1
        return out
    rad = guard_radius(d, z) / 2
    points = max(points, 2 * (K + 1))
    w = rad * np.exp(2j * np.pi * np.arange(points) / points)
    vals = np.array([r_function(domain, j, wi, z, check=False) for wi in w])
    c = np.fft.fft(vals) / points
    return c[: K + 1] * rad ** -np.arange(K + 1, dtype=float)


def r_coefficients_at_zero(domain: CircularDomain, j: int, K: int) -> np.ndarray:
    """Closed-form ``R_{j,k}(0)``."""
    d = domain.disk(j)
    out = np.zeros(K + 1)
    if d.through_origin:
        out[0] = -1
        return out
    Y = _ratio(d)
    for k in range(K + 1):
        out[k] = (d.epsilon * (-1) ** k * binom(0.5, k) * (2 * k * Y + 1) * (Y - 1)
                  / (Y * Y - 1) ** (k + 0.5))
    return out


def c_coefficients(domain: CircularDomain, z, K: int) -> np.ndarray:
    """``C_k(z) = sum of R_{j,k}(z)`` over the disks with ``|x_j| = rho_x``."""
    out = np.zeros(K + 1, dtype=complex)
    for j in domain.dominant_x():
        if complex(z) == 0:
            out += r_coefficients_at_zero(domain, j, K)
        else:
            out += r_coefficients(domain, j, z, K)
    return out


# ---------------------------------------------------------------- expansions

def log_gamma_factor(n: int, k: int) -> float:
    """``log(Gamma(k+1/2) Gamma(n-k+3/2) / Gamma(n+2))``."""
    return math.lgamma(k + 0.5) + math.lgamma(n - k + 1.5) - math.lgamma(n + 2)


@dataclass
class ExpansionValue:
    """Terms of an asymptotic series truncated at its smallest term (or ``K``).

    ``base`` is the leading constant (1 for ``kappa``); the corrections are
    many orders of magnitude smaller, so they are kept and summed apart.
    """

    terms: list
    gamma_factors: list
    base: complex = 0.0
    truncation_index: int = 0
    degenerate: bool = False
    concentric_term: float = 0.0
    partial_sums: list = field(default_factory=list)

    def __post_init__(self):
        acc, self.partial_sums = 0j, []
        for t in self.terms:
            acc = acc + t
            self.partial_sums.append(acc)
        mags = [abs(t) for t in self.terms]
        # stop at the smallest term: an asymptotic series diverges past it
        self.truncation_index = int(np.argmin(mags)) if mags else -1

    @property
    def correction(self) -> complex:
        """Sum of the terms through the truncation index (without ``base``)."""
        return self.partial_sums[self.truncation_index] if self.terms else 0j

    @property
    def value(self) -> complex:
        return self.base + self.correction

    def partial(self, k: int) -> complex:
        """Sum of terms ``0..k`` (without ``base``)."""
        return self.partial_sums[k]


def _expansion(domain: CircularDomain, n: int, coeffs, base, prefactor_log: float, K: int):
    g = [log_gamma_factor(n, k) for k in range(K + 1)]
    terms = [complex(coeffs[k]) * math.exp(prefactor_log + g[k]) / (2 * math.pi)
             for k in range(K + 1)]
    degenerate = bool(domain.dominant_x()) and all(
        domain.disk(j).through_origin for j in domain.dominant_x())
    return ExpansionValue(terms, g, base, degenerate=degenerate)


def kappa_expansion(domain: CircularDomain, n: int, K: int = 3) -> ExpansionValue:
    """Expansion of ``(n+1) kappa_n^{-2}``.

    ``1 + rho_x^{-2n-2}/(2 pi) sum_k C_k(0) Gamma(k+1/2) Gamma(n-k+3/2)/Gamma(n+2)``.
    When the dominant circle passes through the origin only ``C_0 = -1``
    survives and the value is the explicit degenerate term.  Concentric disks
    contribute the exact ``-r^{2n+2}``, kept in ``concentric_term``.
    """
    if n < K:
        raise ValueError("need n >= K")
    conc = -domain.concentric_contribution(n)
    if domain.rho_x is None:
        return ExpansionValue([], [], 1.0, concentric_term=conc)
    ev = _expansion(domain, n, c_coefficients(domain, 0, K), 1.0,
                    (-2 * n - 2) * math.log(domain.rho_x), K)
    ev.concentric_term = conc
    return ev


def degenerate_kappa_term(domain: CircularDomain, n: int) -> float:
    """``-rho_x^{-2n-2} Gamma(n+3/2) / (2 sqrt(pi) Gamma(n+2))``."""
    return -math.exp((-2 * n - 2) * math.log(domain.rho_x) + math.lgamma(n + 1.5)
                     - math.lgamma(n + 2)) / (2 * math.sqrt(math.pi))


def exterior_expansion(domain: CircularDomain, n: int, z, K: int = 3) -> ExpansionValue:
    """Expansion of ``P_n(z)/z^n - 1`` for ``|z| > rho_x``."""
    z = complex(z)
    if domain.rho_x is None:
        return ExpansionValue([], [], 0.0)
    if not abs(z) > domain.rho_x:
        raise InsideRhoX(f"|z| = {abs(z):.6g} <= rho_x = {domain.rho_x:.6g}")
    return _expansion(domain, n, c_coefficients(domain, z, K), 0.0,
                      (-2 * n - 2) * math.log(domain.rho_x), K)


# ---------------------------------------------------------------- contour integrals

def _contour_size(n: int, ratio: float | None = None) -> int:
    M = max(2048, 8 * (n + 2))
    if ratio is not None and ratio != 1:
        M = max(M, int(40 / abs(math.log(ratio))) + 1)
    return 1 << int(math.ceil(math.log2(min(M, 1 << 18))))


@dataclass
class IntegralValue:
    numeric: complex
    expansion: ExpansionValue | None
    scaled: complex  # |x|^{2n+2} times the numeric value


def i_n_integral(domain: CircularDomain, j: int, n: int, z, K: int = 4,
                 M: int | None = None) -> IntegralValue:
    """``(1/2 pi i) int_{|zeta|=|x_j|} T_j'(zeta) (T_j(zeta)/zeta)^n / (zeta - z) dzeta``.

    Evaluated by the trapezoid rule after scaling by ``|x_j|^{2n}``, together
    with the expansion ``-|x_j|^{-2n-2}/(2 pi) sum_k R_{j,k}(z) Gamma-ratio``.
    """
    d = domain.disk(j)
    z = complex(z)
    X = abs(d.x)
    if abs(abs(z) - X) <= 1e-12 * X:
        raise OnContour(f"|z| = |x_{j}|")
    M = M or _contour_size(n, abs(z) / X if z != 0 else None)
    zeta = X * np.exp(2j * np.pi * np.arange(M) / M)
    u = X * X * t_map(d, zeta) / zeta
    vals = t_prime(d, zeta) * u ** n * zeta / (zeta - z)
    # u^n = |x|^{2n} (T/zeta)^n, so the mean is |x|^{2n} I_n
    scaled = complex(np.mean(vals)) * X * X
    exp = None
    if n >= K:
        if z == 0:
            coeffs = r_coefficients_at_zero(domain, j, K)
        else:
            coeffs = r_coefficients(domain, j, z, K)
        exp = _expansion(domain, n, -np.asarray(coeffs), 0.0, (-2 * n - 2) * math.log(X), K)
    return IntegralValue(scaled * X ** (-2 * n - 2), exp, scaled)


def chi_n(domain: CircularDomain, j: int, n: int, z, M: int | None = None) -> IntegralValue:
    """Difference-quotient integral around ``|zeta| = |x_j|``.

    ``(1/2 pi i) int T_j'(zeta) ((T_j(zeta)/zeta)^n - (T_j(z)/z)^n) / (zeta - z) dzeta``,
    with the quotient expanded as ``q(zeta, z) sum_k u^{n-1-k} v^k`` where
    ``q = ((T(zeta) - T(z))/(zeta - z) - T(z)/z)/zeta`` is exact for a Moebius map,
    so no removable singularity is ever evaluated.
    """
    d = domain.disk(j)
    z = complex(z)
    X = abs(d.x)
    if n == 0:
        return IntegralValue(0j, None, 0j)
    M = M or _contour_size(n)
    zeta = X * np.exp(2j * np.pi * np.arange(M) / M)
    if z == 0:
        raise ValueError("chi_n needs z != 0 (T(z)/z has a pole there)")
    c, r = d.center, d.radius
    tz = complex(t_map(d, z))
    # (T(zeta) - T(z))/(zeta - z) = det T / ((1 - conj(c) zeta)(1 - conj(c) z)), det T = r^2
    dq = r * r / ((1 - c.conjugate() * zeta) * (1 - c.conjugate() * z))
    q = (dq - tz / z) / zeta
    u = X * X * t_map(d, zeta) / zeta
    v = X * X * tz / z
    S = np.ones_like(zeta)
    vk = 1.0 + 0j
    for _ in range(n - 1):
        vk *= v
        S = S * u + vk
    # (u^n - v^n)/(zeta - z) = q * X^{-2(n-1)} * S  in unscaled variables
    vals = t_prime(d, zeta) * q * S * zeta
    mean = complex(np.mean(vals))
    scaled = mean * X ** 4  # |x|^{2n+2} * chi_n
    return IntegralValue(mean * X ** (-2 * n + 2), None, scaled)


# ---------------------------------------------------------------- Theta

class ThetaFunction:
    """``Theta_sigma(t) = t sum_v sigma^v exp(sigma^v t)`` for ``Re t < 0``."""

    def __init__(self, sigma: float, rel: float = 1e-18):
        if not 0 < sigma < 1:
            raise ValueError("sigma must lie in (0, 1)")
        self.sigma = float(sigma)
        self.rel = rel
        self._cache: dict = {}

    def __call__(self, t):
        t = complex(t)
        if not t.real < 0:
            raise ThetaDomainError(f"Re t = {t.real} >= 0")
        hit = self._cache.get(t)
        if hit is None:
            hit = self._cache[t] = self._eval(t)
        return hit

    def _eval(self, t: complex) -> complex:
        ls = math.log(self.sigma)
        v0 = int(round(-math.log(abs(t)) / ls))
        terms = []
        peak = 0.0
        # forward (v increasing): sigma^v -> 0, geometric decay
        v = v0
        while True:
            s = self.sigma ** v if v >= 0 else math.exp(v * ls)
            term = s * cmath.exp(s * t)
            terms.append(term)
            peak = max(peak, abs(term))
            if abs(term) < self.rel * peak and v > v0 + 2:
                break
            v += 1
        v = v0 - 1
        while True:
            e = v * ls
            if e + math.log(-t.real) > 800:
                break  # exp(s t) underflows to zero from here on
            s = math.exp(e)
            term = s * cmath.exp(s * t)
            terms.append(term)
            peak = max(peak, abs(term))
            if abs(term) < self.rel * peak and v < v0 - 2:
                break
            v -= 1
        return t * complex(math.fsum(x.real for x in terms), math.fsum(x.imag for x in terms))


def theta(sigma: float, t) -> complex:
    return ThetaFunction(sigma)(t)


# ---------------------------------------------------------------- interior behaviour

def _phi_log_derivative(d: Disk, z):
    return d.phi_prime(z) / d.phi(z)


@dataclass
class TailPair:
    direct: complex
    predicted: complex

    @property
    def gap(self) -> float:
        return abs(self.direct - self.predicted)


def tjv_tail_sum(domain: CircularDomain, j: int, n: int, z, rel: float = 1e-18,
                 guard: float = 1e-8) -> TailPair:
    """``sum_{v>=1} (T_j^v(z))^n (T_j^v)'(z)`` against its Theta prediction."""
    d = domain.disk(j)
    if d.a == 0:
        raise ValueError("needs a_j != 0")
    z = complex(z)
    if abs(z - d.a) < guard:
        raise TooCloseToAj(f"|z - a_{j}| < {guard}")
    p = complex(d.phi(z))
    dp = complex(d.phi_prime(z))
    total, peak, v = 0j, 0.0, 1
    while True:
        s = d.sigma ** (2 * v)
        w = complex(d.phi_inv(s * p))
        term = w ** n * s * dp / complex(d.phi_prime(w))
        total += term
        peak = max(peak, abs(term))
        if abs(term) <= rel * peak or v > 10_000:
            break
        v += 1
    pred = d.a ** (n + 1) / n * dp / p * ThetaFunction(d.sigma ** 2)(n * d.alpha * p)
    return TailPair(total, complex(pred))


@dataclass
class FValue:
    value: complex
    tail: float


def f_jn(domain: CircularDomain, family: CompositionFamily, j: int, n: int, z,
         guard: float = 1e-10) -> FValue:
    """``sum over tau not starting with T_j`` of ``(Phi_j'/Phi_j)(tau z) Theta(n alpha_j Phi_j(tau z)) tau'(z)``."""
    d = domain.disk(j)
    if d.a == 0:
        raise ValueError("needs a_j != 0")
    z = complex(z)
    fam = family.without_terminal(j)
    tz = fam.evaluate(z)
    dz = fam.derivative(z)
    if np.min(np.abs(tz - d.a)) < guard:
        raise OnExceptionalPoint(f"an image of z hits a_{j}")
    th = ThetaFunction(d.sigma ** 2)
    p = d.phi(tz)
    vals = np.array([th(n * d.alpha * pk) for pk in p])
    terms = d.phi_prime(tz) / p * vals * dz
    scale = float(np.max(np.abs(terms / dz)))
    return FValue(complex(np.sum(terms)), family.tail_bound * scale / (1 - abs(z) * domain.rho_a) ** 2)


def interior_prediction(domain: CircularDomain, family: CompositionFamily, n: int, z,
                        tol: float = 1e-12) -> complex:
    """``z^n + (1/n) sum_j a_j^{n+1} F_{j,n}(z)`` over ``|a_j| = rho_a``; ``a_j^n/(1-sigma_j^2)`` at ``a_j``."""
    z = complex(z)
    dom = domain.dominant_a()
    for j in dom:
        d = domain.disk(j)
        if abs(z - d.a) <= tol:
            return d.a ** n / (1 - d.sigma ** 2)
    total = z ** n
    for j in dom:
        d = domain.disk(j)
        total += d.a ** (n + 1) * f_jn(domain, family, j, n, z).value / n
    return total


# ---------------------------------------------------------------- rate fits

@dataclass
class RateFit:
    radius: float
    degrees: list
    errors: list
    slope: float
    predicted: float

    @property
    def relative_gap(self) -> float:
        return abs(self.slope - self.predicted) / abs(self.predicted)


def predicted_exterior_slope(domain: CircularDomain, r: float) -> float:
    """``log(m(r)/r)`` below ``rho_x`` and ``-2 log rho_x`` from ``rho_x`` on."""
    if domain.rho_x is None:
        raise ValueError("no exterior error for a concentric domain")
    if r >= domain.rho_x:
        return -2 * math.log(domain.rho_x)
    return math.log(m_of_r(domain, r) / r)


def exterior_errors(domain: CircularDomain, n: int, r: float, points: int = 128,
                    precision_bits: int = 256) -> float:
    """``max_{|z| = r} |P_n(z)/z^n - 1|`` with the oracle ``P_n`` at extended precision."""
    P, _ = orthopoly(domain, n, precision_bits)
    with mpmath.workprec(P.precision_bits):
        worst = mpmath.mpf(0)
        for k in range(points):
            z = mpmath.mpf(r) * mpmath.expjpi(mpmath.mpf(2 * k) / points)
            worst = max(worst, abs(P(z) / z ** n - 1))
        return float(worst)


def exterior_rate_fit(domain: CircularDomain, degrees, r: float, points: int = 128,
                      precision_bits: int = 256) -> RateFit:
    """Least-squares slope of ``log max_{|z|=r} |P_n(z)/z^n - 1|`` against ``n``."""
    degrees = sorted(degrees)
    errs = [exterior_errors(domain, n, r, points, precision_bits) for n in degrees]
    slope = float(np.polyfit(degrees, np.log(errs), 1)[0])
    return RateFit(float(r), degrees, errs, slope, predicted_exterior_slope(domain, r))
