"""Exact monomial moments over the domain and orthogonal polynomials from them.

The inner product is ``<f, g> = int f conj(g) dA`` with ``dA = dx dy / pi``,
so the unit disk has area 1 and ``<z^n, z^m> = delta_nm / (n+1)`` there.
Substituting ``z = c + r w`` in each hole reduces its moments to unit-disk
moments, which gives a closed form for every entry of the Gram matrix.
"""
from __future__ import annotations

import threading
from math import comb

import mpmath

from .errors import IllConditioned
from .geometry import CircularDomain
from .polynomial import MonicPolynomial

DEFAULT_BITS = 256
MAX_BITS = 4096

_cache: dict = {}
_lock = threading.Lock()


def _mp_disks(domain: CircularDomain):
    return [(mpmath.mpc(d.center), mpmath.mpf(d.radius)) for d in domain.disks]


def _moment(disks, n: int, m: int):
    total = mpmath.mpf(1) / (n + 1) if n == m else mpmath.mpf(0)
    for c, r in disks:
        cb = mpmath.conj(c)
        r2 = r * r
        acc = mpmath.mpc(0)
        for k in range(min(n, m) + 1):
            acc += comb(n, k) * comb(m, k) * c ** (n - k) * cb ** (m - k) * r2 ** k / (k + 1)
        total -= r2 * acc
    return mpmath.mpc(total)


def moment(domain: CircularDomain, n: int, m: int, precision_bits: int = DEFAULT_BITS):
    """``<z^n, z^m>`` over the domain as an ``mpc``."""
    if n < 0 or m < 0:
        raise ValueError("moment indices must be non-negative")
    with mpmath.workprec(precision_bits):
        return _moment(_mp_disks(domain), n, m)


def gram(domain: CircularDomain, N: int, precision_bits: int = DEFAULT_BITS) -> mpmath.matrix:
    """The ``(N+1) x (N+1)`` Gram matrix ``G[n, m] = <z^n, z^m>``."""
    with mpmath.workprec(precision_bits):
        rows = _gram_rows(domain, N)
        return mpmath.matrix(rows)


def _gram_rows(domain, N):
    disks = _mp_disks(domain)
    G = [[None] * (N + 1) for _ in range(N + 1)]
    for n in range(N + 1):
        for m in range(n, N + 1):
            G[n][m] = _moment(disks, n, m)
            G[m][n] = mpmath.conj(G[n][m])
    return G


def _cholesky(G):
    """Lower ``L`` with ``G = L L^H``; raises :class:`IllConditioned` on a non-positive pivot."""
    N = len(G)
    L = [[mpmath.mpc(0)] * N for _ in range(N)]
    for i in range(N):
        for j in range(i + 1):
            s = G[i][j] - mpmath.fsum(L[i][k] * mpmath.conj(L[j][k]) for k in range(j))
            if i == j:
                if not mpmath.re(s) > 0:
                    raise IllConditioned(f"Gram matrix not numerically positive definite at {i}")
                L[i][i] = mpmath.mpc(mpmath.sqrt(mpmath.re(s)))
            else:
                L[i][j] = s / L[j][j]
    return L


class _Factor:
    """Cached Gram matrix and its Cholesky factor for one domain and precision."""

    def __init__(self, domain, N, bits):
        self.N = N
        self.bits = bits
        with mpmath.workprec(bits):
            self.G = _gram_rows(domain, N)
            self.L = _cholesky(self.G)


def _factor(domain: CircularDomain, N: int, bits: int) -> _Factor:
    key = (tuple(domain.as_pairs()), bits)
    with _lock:
        f = _cache.get(key)
        if f is None or f.N < N:
            f = _Factor(domain, max(N, 8), bits)
            _cache[key] = f
        return f


def clear_cache():
    with _lock:
        _cache.clear()


def _monic_from_factor(f: _Factor, n: int):
    """Row ``n`` of ``L^{-1}`` rescaled to be monic, plus ``kappa_n = 1/L[n][n]``."""
    L = f.L
    # solve x^T L = e_n^T by back substitution
    x = [mpmath.mpc(0)] * (n + 1)
    x[n] = 1 / L[n][n]
    for i in range(n - 1, -1, -1):
        s = mpmath.fsum(x[k] * L[k][i] for k in range(i + 1, n + 1))
        x[i] = -s / L[i][i]
    lead = x[n]
    b = [xi / lead for xi in x[:n]]
    kappa = 1 / mpmath.re(L[n][n])
    return b, kappa


def orthogonality_residual(domain_or_factor, coeffs, precision_bits: int = DEFAULT_BITS):
    """``max_{m<n} |<P, z^m>| / ||P||`` for ascending monic coefficients ``coeffs`` (leading 1 last)."""
    n = len(coeffs) - 1
    f = domain_or_factor if isinstance(domain_or_factor, _Factor) else \
        _factor(domain_or_factor, n, precision_bits)
    with mpmath.workprec(f.bits):
        c = [mpmath.mpc(v) for v in coeffs]
        G = f.G
        res = [abs(mpmath.fsum(c[i] * G[i][m] for i in range(n + 1))) for m in range(n)]
        norm2 = mpmath.re(mpmath.fsum(c[i] * mpmath.conj(c[k]) * G[i][k]
                                      for i in range(n + 1) for k in range(n + 1)))
        return float(max(res, default=mpmath.mpf(0)) / mpmath.sqrt(norm2))


def norm_squared(domain: CircularDomain, coeffs, precision_bits: int = DEFAULT_BITS):
    """``||p||^2`` for a polynomial with ascending coefficients."""
    n = len(coeffs) - 1
    f = _factor(domain, n, precision_bits)
    with mpmath.workprec(f.bits):
        c = [mpmath.mpc(v) for v in coeffs]
        return mpmath.re(mpmath.fsum(c[i] * mpmath.conj(c[k]) * f.G[i][k]
                                     for i in range(n + 1) for k in range(n + 1)))


def orthopoly(domain: CircularDomain, n: int, precision_bits: int = DEFAULT_BITS,
              max_bits: int = MAX_BITS):
    """Monic orthogonal polynomial ``P_n`` and ``kappa_n = ||P_n||^{-1}``.

    Uses one Cholesky factorization of the Gram matrix shared by all degrees
    up to the cached size.  The orthogonality residual is checked against
    ``2^{-bits/2}``; on failure the precision is doubled up to ``max_bits``.

    Returns
    -------
    (MonicPolynomial, mpmath.mpf)
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    bits = precision_bits
    while True:
        try:
            f = _factor(domain, n, bits)
            with mpmath.workprec(bits):
                b, kappa = _monic_from_factor(f, n)
                res = orthogonality_residual(f, b + [mpmath.mpc(1)])
                if res > 2.0 ** (-bits / 2):
                    raise IllConditioned(f"orthogonality residual {res:.3e} at {bits} bits")
            return MonicPolynomial(b, bits), kappa
        except IllConditioned:
            bits *= 2
            if bits > max_bits:
                raise


def kappa_defect(domain: CircularDomain, n: int, precision_bits: int = DEFAULT_BITS):
    """``(n+1) kappa_n^{-2} - 1`` evaluated at working precision (it is far below double eps)."""
    P, kappa = orthopoly(domain, n, precision_bits)
    with mpmath.workprec(P.precision_bits):
        return (n + 1) / kappa ** 2 - 1
