"""Monic polynomials with extended-precision coefficients."""
from __future__ import annotations

import mpmath
import numpy as np


class MonicPolynomial:
    """``z^n + b_{n-1} z^{n-1} + ... + b_0``.

    Parameters
    ----------
    coeffs : sequence
        Lower coefficients ``b_0, ..., b_{n-1}`` in ascending order; anything
        ``mpmath.mpc`` accepts.
    precision_bits : int
        Working precision used by :meth:`__call__` and root polishing.
    """

    def __init__(self, coeffs, precision_bits: int = 53):
        self.precision_bits = int(precision_bits)
        with mpmath.workprec(self.precision_bits):
            self.coeffs = [mpmath.mpc(b) for b in coeffs]

    @classmethod
    def monomial(cls, n: int, precision_bits: int = 53) -> "MonicPolynomial":
        return cls([0] * n, precision_bits)

    @classmethod
    def from_roots(cls, roots, precision_bits: int = 53) -> "MonicPolynomial":
        with mpmath.workprec(precision_bits):
            c = [mpmath.mpc(1)]
            for r in roots:
                r = mpmath.mpc(r)
                c = [mpmath.mpc(0)] + c
                for i in range(len(c) - 1):
                    c[i] -= r * c[i + 1]
        return cls(c[:-1], precision_bits)

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def all_coeffs(self) -> list:
        """Ascending coefficients including the leading 1."""
        return self.coeffs + [mpmath.mpc(1)]

    def to_numpy(self) -> np.ndarray:
        """Ascending complex128 coefficients including the leading 1."""
        return np.array([complex(b) for b in self.all_coeffs()], dtype=complex)

    def __call__(self, z):
        with mpmath.workprec(self.precision_bits):
            z = mpmath.mpc(z)
            acc = mpmath.mpc(1)
            for b in reversed(self.coeffs):
                acc = acc * z + b
            return acc

    def eval_np(self, z):
        """Double-precision Horner evaluation, vectorized over ``z``."""
        z = np.asarray(z, dtype=complex)
        acc = np.ones_like(z)
        for b in self.to_numpy()[-2::-1]:
            acc = acc * z + b
        return acc

    def derivative_coeffs(self) -> list:
        """Ascending coefficients of ``P'`` (leading coefficient ``n``)."""
        with mpmath.workprec(self.precision_bits):
            return [k * b for k, b in enumerate(self.all_coeffs())][1:]

    def derivative(self, z):
        with mpmath.workprec(self.precision_bits):
            z = mpmath.mpc(z)
            acc = mpmath.mpc(0)
            for b in reversed(self.derivative_coeffs()):
                acc = acc * z + b
            return acc

    def max_coeff_diff(self, other: "MonicPolynomial") -> float:
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        with mpmath.workprec(max(self.precision_bits, other.precision_bits)):
            return float(max((abs(a - b) for a, b in zip(self.coeffs, other.coeffs)),
                             default=mpmath.mpf(0)))

    def __repr__(self):
        return f"MonicPolynomial(degree={self.degree}, precision_bits={self.precision_bits})"
