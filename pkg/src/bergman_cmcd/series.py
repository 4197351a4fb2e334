"""Orthogonal polynomials from the alternating layer recursion.

Starting from ``f_0 = 1`` the odd layers are family sums

    f_{2k+1}(z) = sum_{tau != id} f_{2k}(tau z) (tau z)^{n+1} - f_{2k}(tau 0) (tau 0)^{n+1}

sampled on a circle ``|zeta| = rho``, and the even layers are their Cauchy
projections ``f_{2k+2}(z) = -(1/2 pi i) int f_{2k+1}(zeta) zeta^{-n-1} / (zeta - z)``.
With ``F_j`` the Taylor coefficients of the odd layer, the projection has
coefficients ``-F_{m+n+1}``, so both layers live on the same FFT.  Summing,

    calP_n(z) = z^{n+1} + sum_{j <= n} F^o_j z^j,   (n+1) kappa_n^{-2} = 1 - sum_k F^{(2k+1)}_{n+1},

where ``F^o`` are the coefficients of the sum of all odd layers, and
``P_n = calP_n' / (n+1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotYetAsymptotic, PointTooCloseToContour, TailTooLarge
from .geometry import CircularDomain
from .moebius import CompositionFamily, enumerate_family, m_iterate, m_of_r, mu_of_r
from .polynomial import MonicPolynomial


class ContourGrid:
    """Samples of an analytic function at ``rho * exp(2 pi i m / M)``."""

    def __init__(self, radius: float, samples):
        self.radius = float(radius)
        self.samples = np.asarray(samples, dtype=complex)

    @classmethod
    def nodes_for(cls, radius: float, M: int) -> np.ndarray:
        return radius * np.exp(2j * np.pi * np.arange(M) / M)

    @classmethod
    def from_function(cls, f, radius: float, M: int) -> "ContourGrid":
        return cls(radius, f(cls.nodes_for(radius, M)))

    @property
    def M(self) -> int:
        return len(self.samples)

    @property
    def nodes(self) -> np.ndarray:
        return self.nodes_for(self.radius, self.M)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def taylor(self) -> np.ndarray:
        """Taylor coefficients ``c_0..c_{M-1}`` (aliased beyond ``M``)."""
        scaled = np.fft.fft(self.samples) / self.M
        return scaled * self.radius ** -np.arange(self.M, dtype=float)

    def trapezoid(self, g=None) -> complex:
        """``(1/2 pi i) int h(zeta) d zeta`` with ``h = g(zeta, f(zeta))`` or ``h = f``."""
        z = self.nodes
        h = self.samples if g is None else g(z, self.samples)
        return complex(np.mean(h * z))

    def cauchy_eval(self, z):
        """Cauchy integral ``(1/2 pi i) int f(zeta) / (zeta - z) d zeta`` by the trapezoid rule."""
        z = np.asarray(z, dtype=complex)
        zeta = self.nodes.reshape((-1,) + (1,) * z.ndim)
        f = self.samples.reshape(zeta.shape)
        return np.mean(f * zeta / (zeta - z), axis=0)

    def spectral_error(self, z) -> float:
        """Size of the ``(|z|/rho)^M`` aliasing term for interior ``z``."""
        q = float(np.max(np.abs(z))) / self.radius
        return self.sup_norm() * q ** self.M / max(1 - q, 1e-300)


def _horner(coeffs: np.ndarray, w: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(w)
    for c in coeffs[::-1]:
        acc = acc * w + c
    return acc


@dataclass
class EvenLayer:
    """``f_{2k}`` as a Taylor polynomial valid inside ``|z| < rho``."""

    coeffs: np.ndarray
    radius: float
    error: float = 0.0

    def __call__(self, z, guard: bool = True):
        z = np.asarray(z, dtype=complex)
        if guard and np.any(np.abs(z) > 0.95 * self.radius):
            raise PointTooCloseToContour(f"|z| exceeds 0.95 rho = {0.95 * self.radius:.6g}")
        return _horner(self.coeffs, z)

    @property
    def at_zero(self) -> complex:
        return complex(self.coeffs[0]) if len(self.coeffs) else 0j


def _trim(coeffs: np.ndarray, reach: float, rel: float = 1e-20) -> np.ndarray:
    """Drop the tail whose contribution on ``|w| <= reach`` is below ``rel`` of the total."""
    mags = np.abs(coeffs) * reach ** np.arange(len(coeffs), dtype=float)
    total = mags.sum()
    if total == 0:
        return coeffs[:1]
    keep = np.nonzero(mags > rel * total)[0]
    return coeffs[: keep[-1] + 1]


def even_layer(odd: ContourGrid, n: int, reach: float | None = None) -> EvenLayer:
    """Cauchy projection ``-(1/2 pi i) int f(zeta) zeta^{-n-1} / (zeta - z) d zeta``.

    The coefficients are ``-F_{m+n+1}`` read off the FFT of ``odd``, which is
    the same trapezoid sum evaluated term by term.
    """
    F = odd.taylor()
    coeffs = -F[n + 1:]
    if reach is not None:
        coeffs = _trim(coeffs, reach)
    err = odd.sup_norm() * odd.radius ** (-n - 1) * 1e-16 * len(F)
    return EvenLayer(coeffs, odd.radius, err)


def odd_layer(family: CompositionFamily, even: EvenLayer | None, n: int,
              rho: float, M: int) -> ContourGrid:
    """Samples of ``f_{2k+1}`` on ``|zeta| = rho``; ``even = None`` stands for ``f_0 = 1``."""
    fam = family.star()
    z = ContourGrid.nodes_for(rho, M)
    tz = fam.evaluate(z)
    t0 = fam.evaluate(np.zeros(1))[:, 0]
    if even is None:
        g_z = np.ones_like(tz)
        g_0 = np.ones_like(t0)
    else:
        g_z = even(tz, guard=False)
        g_0 = even(t0, guard=False)
    vals = np.sum(g_z * tz ** (n + 1), axis=0) - np.sum(g_0 * t0 ** (n + 1))
    return ContourGrid(rho, vals)


def default_radius(domain: CircularDomain) -> float:
    """``(1 + rho_x)/2`` clamped into the admissible interval."""
    if domain.rho_a == 0:
        return 1.0
    lo, hi = domain.rho_a, 1 / domain.rho_a
    margin = 0.05 * (hi - lo)
    target = (1 + domain.rho_x) / 2 if domain.rho_x is not None else 1.0
    return min(max(target, lo + margin), hi - margin)


def v_bound(domain: CircularDomain, mu: float, r: float, n: int) -> float:
    """``r (2s + mu) (m(r)/r)^n / (r - m(r))``."""
    m = m_of_r(domain, r)
    return r * (2 * domain.s + mu) * (m / r) ** n / (r - m)


def index_condition(domain: CircularDomain, r: float, n: int) -> float:
    """``(n+1) (m^2(r)/m(r))^n``; the layer estimates need this below 1."""
    m1 = m_of_r(domain, r)
    return (n + 1) * (m_iterate(domain, r, 2) / m1) ** n


@dataclass
class LayerStack:
    n: int
    rho: float
    M: int
    odd: list[ContourGrid] = field(default_factory=list)
    even: list[EvenLayer] = field(default_factory=list)
    V_estimate: float = math.nan
    mu: float = math.nan
    m_rho: float = math.nan
    truncation_error: float = 0.0
    family_error: float = 0.0

    @property
    def K(self) -> int:
        return len(self.odd)

    def odd_coefficients(self) -> np.ndarray:
        """Taylor coefficients of the sum of all odd layers."""
        return sum(g.taylor() for g in self.odd)

    def f_even_at_zero(self) -> complex:
        """``sum_k f_{2k}(0)`` including ``f_0 = 1``."""
        return 1 + sum(e.at_zero for e in self.even)

    def calP_coefficients(self) -> np.ndarray:
        """Ascending coefficients of the degree ``n+1`` polynomial ``calP_n``."""
        c = np.zeros(self.n + 2, dtype=complex)
        c[: self.n + 1] = self.odd_coefficients()[: self.n + 1]
        c[self.n + 1] = 1
        return c

    def calP_exterior(self, z):
        """``z^{n+1} - z^{n+1} (1/2 pi i) int f_o zeta^{-n-1}/(zeta - z)`` for ``|z| > rho``."""
        z = np.asarray(z, dtype=complex)
        total = ContourGrid(self.rho, sum(g.samples for g in self.odd))
        zeta = total.nodes.reshape((-1,) + (1,) * z.ndim)
        f = total.samples.reshape(zeta.shape)
        integral = np.mean(f * zeta ** (-self.n) / (zeta - z), axis=0)
        return z ** (self.n + 1) * (1 - integral)

    def layer_ratios(self) -> list[float]:
        norms = [g.sup_norm() for g in self.odd]
        return [b / a for a, b in zip(norms, norms[1:]) if a > 0]


def _build_stack(domain, family, n, rho, M, K_max, tol, mu, m_rho, V):
    stack = LayerStack(n, rho, M, V_estimate=V, mu=mu, m_rho=m_rho)
    scale = max(1.0, rho ** (-n - 1))
    even = None
    for _ in range(K_max):
        odd = odd_layer(family, even, n, rho, M)
        stack.odd.append(odd)
        size = odd.sup_norm() * scale
        if size < tol or len(stack.odd) == K_max:
            break
        even = even_layer(odd, n, reach=m_rho)
        stack.even.append(even)
    ratios = stack.layer_ratios()
    last = stack.odd[-1].sup_norm() * scale
    if ratios and ratios[-1] < 1:
        stack.truncation_error = last * ratios[-1] / (1 - ratios[-1])
    elif len(stack.odd) > 1 or last >= tol:
        stack.truncation_error = math.inf if last >= tol else last
    # excluded words: every omitted difference is below (n+1) rho |gamma| m^n / (1 - rho rho_a)^2
    stack.family_error = ((n + 1) * rho * family.tail_bound * m_rho ** n
                          / (1 - rho * domain.rho_a) ** 2)
    return stack


def build_layers(domain: CircularDomain, family: CompositionFamily, n: int,
                 rho: float | None = None, K: int = 12, M: int = 256,
                 tol: float = 1e-17, check_regime: bool = True) -> LayerStack:
    """Assemble the layer stack for degree ``n`` on ``|zeta| = rho``.

    Raises
    ------
    NotYetAsymptotic
        when ``(n+1)(m^2(rho)/m(rho))^n >= 1``, or when ``V(rho, n) >= 1``
        and the computed layers do not decay.
    """
    rho = default_radius(domain) if rho is None else float(rho)
    if domain.rho_a > 0 and not domain.rho_a < rho < 1 / domain.rho_a:
        raise ValueError(f"rho = {rho} outside (rho_a, 1/rho_a)")
    M = max(M, 1 << int(math.ceil(math.log2(4 * (n + 2)))))
    m_rho = m_of_r(domain, rho)
    mu, _ = mu_of_r(domain, family, rho)
    V = v_bound(domain, mu, rho, n)
    if check_regime:
        idx = index_condition(domain, rho, n)
        if idx >= 1:
            raise NotYetAsymptotic(
                f"n = {n} below the certified range at rho = {rho:.6g} "
                f"((n+1)(m2/m)^n = {idx:.3g}); use a larger n or the moment oracle")
    stack = _build_stack(domain, family, n, rho, M, K, tol, mu, m_rho, V)
    if check_regime and V >= 1:
        ratios = stack.layer_ratios()
        if not ratios or max(ratios) >= 1:
            raise NotYetAsymptotic(
                f"V(rho, n) = {V:.3g} and the layers do not decay at n = {n}")
    return stack


@dataclass
class SeriesResult:
    polynomial: MonicPolynomial
    kappa: float
    stack: LayerStack
    M: int
    error: float


def _extract(stack: LayerStack):
    n = stack.n
    c = stack.calP_coefficients()
    b = c[1: n + 1] * np.arange(1, n + 1) / (n + 1)
    inv = (1 - sum(g.taylor()[n + 1] for g in stack.odd)).real / (n + 1)
    return b, inv


def series_orthopoly(domain: CircularDomain, family: CompositionFamily | None, n: int,
                     rho: float | None = None, K: int = 12, M: int | None = None,
                     M_max: int = 4096, agree: float = 1e-10, tail_tol: float = 1e-8,
                     check_regime: bool = True, M_init: int = 256) -> SeriesResult:
    """``P_n`` and ``kappa_n`` from the layer series.

    With ``M`` given the grid size is fixed; otherwise it starts at ``M_init`` and
    doubles until two consecutive assemblies agree to ``agree`` (cap
    ``M_max``).  ``family`` defaults to an enumeration with ``L = 14``.
    """
    if family is None:
        family = enumerate_family(domain, 14, 1e-30)
    if family.tail_bound > tail_tol:
        raise TailTooLarge(f"family tail {family.tail_bound:.3g} exceeds {tail_tol:.3g}")
    grid = M or M_init
    stack = build_layers(domain, family, n, rho, K, grid, check_regime=check_regime)
    b, inv = _extract(stack)
    diff = 0.0
    if M is None:
        while True:
            grid = 2 * stack.M
            if grid > M_max:
                break
            nxt = build_layers(domain, family, n, stack.rho, K, grid, check_regime=False)
            b2, inv2 = _extract(nxt)
            diff = max(float(np.max(np.abs(b2 - b), initial=0.0)), abs(inv2 - inv) / abs(inv))
            stack, b, inv = nxt, b2, inv2
            if diff <= agree:
                break
    poly = MonicPolynomial([complex(x) for x in b], 53)
    kappa = 1 / math.sqrt(inv)
    error = stack.truncation_error + stack.family_error + diff
    return SeriesResult(poly, kappa, stack, stack.M, error)


@dataclass
class LayerNorm:
    k: int
    odd_sup: float
    odd_bound: float
    even_sup: float | None
    even_bound: float | None


def layer_norm_report(stack: LayerStack, interior: float = 0.5) -> list[LayerNorm]:
    """Sup norms of ``f_{2k-1}`` on the contour and of ``f_{2k}`` on ``|z| = interior * rho``.

    Alongside each norm the corresponding a-priori bound is given:
    ``(r - m) r^n V^k`` for odd layers and ``(r - m) V^k / (r - |z|)`` for even ones.
    """
    r, n, V, m = stack.rho, stack.n, stack.V_estimate, stack.m_rho
    zs = ContourGrid.nodes_for(interior * r, 256)
    out = []
    for k, odd in enumerate(stack.odd, 1):
        even_sup = even_bound = None
        if k - 1 < len(stack.even):
            even_sup = float(np.max(np.abs(stack.even[k - 1](zs))))
            even_bound = (r - m) * V ** k / (r - interior * r)
        out.append(LayerNorm(k, odd.sup_norm(), (r - m) * r ** n * V ** k, even_sup, even_bound))
    return out
