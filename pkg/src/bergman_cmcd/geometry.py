"""Disk configurations and their scalar invariants.

A domain is the open unit disk with finitely many disjoint closed disks
removed.  Each removed disk ``D(c, r)`` carries the attracting fixed point
``a`` and multiplier ``sigma**2`` of its contraction ``T``, the reflected
near/far intersection points ``x`` and ``y`` and the pole of ``T``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import CenterAtOrigin, DiskNotContained, DisksOverlap, InvalidDomain

# strict inequalities are enforced with this margin
MARGIN = 1e-12


class PointAtInfinity:
    """Tag for ``y = infinity`` (the circle passes through the origin)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (PointAtInfinity, ())


INFINITY = PointAtInfinity()


def _touches_origin(c: complex, r: float) -> bool:
    return math.isclose(r, abs(c), rel_tol=1e-13, abs_tol=0.0)


def derive_pair(c: complex, r: float) -> tuple[complex, float]:
    """Return ``(a, sigma)`` for the disk ``D(c, r)``.

    ``a`` is the fixed point of ``T(z) = ((r^2-|c|^2) z + c) / (1 - conj(c) z)``
    inside the unit disk.  Writing ``a = t c`` with ``t`` real, the fixed-point
    quadratic becomes ``|c|^2 t^2 - (1 + |c|^2 - r^2) t + 1 = 0``; the smaller
    root is taken in the cancellation-free form.  ``sigma = r / |1 - conj(c) a|``
    is the square root of the multiplier ``T'(a)``.
    """
    c = complex(c)
    r = float(r)
    if r <= 0 or abs(c) + r >= 1:
        raise InvalidDomain(f"disk ({c}, {r}) is not a proper subdisk of the unit disk")
    c2 = abs(c) ** 2
    b = 1.0 + c2 - r * r
    t = 2.0 / (b + math.sqrt(b * b - 4.0 * c2))
    a = c * t
    sigma = r / abs(1.0 - c.conjugate() * a)
    return a, sigma


def forward_relations(a: complex, sigma: float) -> tuple[complex, float]:
    """Map ``(a, sigma)`` back to the disk ``(c, r)``."""
    a2 = abs(a) ** 2
    den = 1.0 - a2 * sigma * sigma
    c = a * (1.0 - sigma * sigma) / den
    r = sigma * (1.0 - a2) / den
    return complex(c), float(r)


def critical_data(c: complex, r: float):
    """Return ``(x, y, epsilon, pole)`` for a disk with nonzero center.

    ``y`` is :data:`INFINITY` when the circle passes through the origin, in
    which case the pole reduces to ``2 x``.
    """
    c = complex(c)
    if c == 0:
        raise CenterAtOrigin("x and y are undefined for a disk centred at 0")
    u = c / abs(c)
    x = u / (abs(c) + r)
    if _touches_origin(c, r):
        y = INFINITY
        pole = 2 * x
    else:
        y = u / (abs(c) - r)
        pole = 2 * x * y / (y + x)
    epsilon = 1 if r >= abs(c) else -1
    return x, y, epsilon, pole


@dataclass(frozen=True)
class Disk:
    """One removed disk with every derived quantity attached."""

    center: complex
    radius: float
    a: complex
    sigma: float
    x: complex | None = None
    y: complex | PointAtInfinity | None = None
    epsilon: int | None = None
    pole: complex | None = None

    @classmethod
    def from_center_radius(cls, c, r) -> "Disk":
        c, r = complex(c), float(r)
        a, sigma = derive_pair(c, r)
        if c == 0:
            return cls(c, r, a, sigma)
        x, y, eps, pole = critical_data(c, r)
        return cls(c, r, a, sigma, x, y, eps, pole)

    @property
    def concentric(self) -> bool:
        return self.center == 0

    @property
    def through_origin(self) -> bool:
        """True when ``0`` lies on the boundary circle (``r = |c|``)."""
        return not self.concentric and self.y is INFINITY

    @property
    def alpha(self) -> float:
        return 1.0 / abs(self.a) - abs(self.a)

    # Disk automorphism sending this hole onto D(0, sigma).  Requires a != 0.
    def _unit(self) -> complex:
        if self.a == 0:
            raise CenterAtOrigin("Phi is undefined for a concentric disk")
        return self.a.conjugate() / abs(self.a)

    def phi(self, z):
        a = self.a
        return self._unit() * (z - a) / (1 - a.conjugate() * z)

    def phi_prime(self, z):
        a = self.a
        return self._unit() * (1 - abs(a) ** 2) / (1 - a.conjugate() * z) ** 2

    def phi_inv(self, t):
        u = self.a / abs(self.a)
        return u * (t + abs(self.a)) / (1 + abs(self.a) * t)


@dataclass(frozen=True)
class CircularDomain:
    """Unit disk minus the closures of ``disks``."""

    disks: tuple[Disk, ...]
    rho_a: float = field(init=False)
    rho_x: float | None = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "rho_a", max(abs(d.a) for d in self.disks))
        xs = [abs(d.x) for d in self.disks if not d.concentric]
        object.__setattr__(self, "rho_x", min(xs) if xs else None)

    @property
    def s(self) -> int:
        return len(self.disks)

    @property
    def centers(self) -> list[complex]:
        return [d.center for d in self.disks]

    @property
    def radii(self) -> list[float]:
        return [d.radius for d in self.disks]

    @property
    def is_annulus(self) -> bool:
        """All removed disks concentric (only possible for ``s = 1``)."""
        return all(d.concentric for d in self.disks)

    @property
    def area(self) -> float:
        """Area in units of ``pi`` (the measure ``dA = dx dy / pi``)."""
        return 1.0 - sum(d.radius ** 2 for d in self.disks)

    def disk(self, j: int) -> Disk:
        """Disk number ``j`` (operator indices start at 1; 0 is the identity)."""
        if not 1 <= j <= self.s:
            raise IndexError(f"operator index {j} outside 1..{self.s}")
        return self.disks[j - 1]

    def dominant_x(self, tol: float = 1e-10) -> list[int]:
        """Operator indices ``j`` with ``|x_j| = rho_x`` (ties within ``tol``)."""
        if self.rho_x is None:
            return []
        return [j for j, d in enumerate(self.disks, 1)
                if not d.concentric and abs(abs(d.x) - self.rho_x) <= tol * self.rho_x]

    def dominant_a(self, tol: float = 1e-12) -> list[int]:
        """Operator indices ``j`` with ``|a_j| = rho_a``."""
        return [j for j, d in enumerate(self.disks, 1)
                if self.rho_a > 0 and abs(abs(d.a) - self.rho_a) <= tol * self.rho_a]

    def concentric_contribution(self, n: int) -> float:
        """Size ``r^(2n+2)`` of the term contributed by a concentric disk, if any."""
        return sum(d.radius ** (2 * n + 2) for d in self.disks if d.concentric)

    def as_pairs(self) -> list[tuple[complex, float]]:
        return [(d.center, d.radius) for d in self.disks]


def validate(disks: Iterable[Sequence]) -> CircularDomain:
    """Build a :class:`CircularDomain` from ``(center, radius)`` pairs.

    Raises
    ------
    DiskNotContained
        some closed disk is not inside the open unit disk.
    DisksOverlap
        two closed disks intersect.
    """
    pairs = [(complex(c), float(r)) for c, r in disks]
    if not pairs:
        raise InvalidDomain("at least one disk is required")
    for j, (c, r) in enumerate(pairs):
        if not r > 0:
            raise InvalidDomain(f"disk {j + 1} has non-positive radius {r}", (j + 1,))
        if not abs(c) + r < 1 - MARGIN:
            raise DiskNotContained(f"closed disk {j + 1} is not inside the unit disk", (j + 1,))
    for j in range(len(pairs)):
        for k in range(j + 1, len(pairs)):
            (cj, rj), (ck, rk) = pairs[j], pairs[k]
            if not abs(cj - ck) > rj + rk + MARGIN:
                raise DisksOverlap(f"closed disks {j + 1} and {k + 1} intersect", (j + 1, k + 1))
    through = [j for j, (c, r) in enumerate(pairs) if c != 0 and _touches_origin(c, r)]
    # two circles through 0 would force the closed disks to meet at 0
    assert len(through) <= 1
    return CircularDomain(tuple(Disk.from_center_radius(c, r) for c, r in pairs))


def t_map(disk: Disk, z):
    """Evaluate ``T(z) = ((r^2-|c|^2) z + c) / (1 - conj(c) z)`` (numpy friendly)."""
    c, r = disk.center, disk.radius
    return ((r * r - abs(c) ** 2) * z + c) / (1 - c.conjugate() * z)


def t_prime(disk: Disk, z):
    c, r = disk.center, disk.radius
    return r * r / (1 - c.conjugate() * z) ** 2
