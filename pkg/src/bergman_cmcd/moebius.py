"""Fractional-linear maps, the composition family and contraction profiles.

Every element of the family is a word ``T_{j_l} ... T_{j_1}`` in the
contractions ``T_j`` attached to the removed disks.  Words are stored left to
right as written, so ``word[0]`` is the operator applied last (the terminal
operator) and ``word[-1]`` the one applied first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FamilyExplosion
from .geometry import CircularDomain

DEFAULT_CAP = 250_000


class MoebiusMap:
    """``z -> (alpha z + beta) / (gamma z + delta)`` with normalized coefficients."""

    __slots__ = ("coef",)

    def __init__(self, alpha, beta, gamma, delta):
        coef = np.array([alpha, beta, gamma, delta], dtype=complex)
        if abs(coef[0] * coef[3] - coef[1] * coef[2]) == 0:
            raise ValueError("singular Moebius map")
        self.coef = coef / coef[np.argmax(np.abs(coef))]

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def from_matrix(cls, m) -> "MoebiusMap":
        m = np.asarray(m)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def matrix(self) -> np.ndarray:
        return self.coef.reshape(2, 2)

    @property
    def det(self) -> complex:
        a, b, c, d = self.coef
        return a * d - b * c

    def __call__(self, z):
        a, b, c, d = self.coef
        return (a * z + b) / (c * z + d)

    def derivative(self, z):
        a, b, c, d = self.coef
        return self.det / (c * z + d) ** 2

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        """``self o other``."""
        return MoebiusMap.from_matrix(self.matrix @ other.matrix)

    __matmul__ = compose

    def inverse(self) -> "MoebiusMap":
        a, b, c, d = self.coef
        return MoebiusMap(d, -b, -c, a)

    @property
    def pole(self) -> complex | None:
        """Finite pole, or ``None`` for an affine map."""
        c, d = self.coef[2], self.coef[3]
        return None if c == 0 else complex(-d / c)

    @property
    def gamma(self) -> complex:
        """``gamma`` in ``tau'(z) = gamma / (1 - z/p)^2``; equals ``tau'(0)``."""
        return complex(self.det / self.coef[3] ** 2)

    def disk_image(self, center: complex, radius: float) -> tuple[complex, float]:
        """Image of the disk ``D(center, radius)``; the pole must lie outside its closure."""
        p = self.pole
        if p is None:
            w0 = complex(self(center))
        else:
            if abs(p - center) <= radius:
                raise ValueError("pole inside the disk")
            # the point symmetric to the pole maps to the image center
            w0 = complex(self(center + radius ** 2 / np.conj(p - center)))
        return w0, float(abs(self(center + radius) - w0))

    def same_as(self, other: "MoebiusMap", tol: float = 1e-12) -> bool:
        k = int(np.argmax(np.abs(self.coef)))
        if other.coef[k] == 0:
            return False
        return bool(np.max(np.abs(self.coef / self.coef[k] - other.coef / other.coef[k])) <= tol)

    def __repr__(self):
        return "MoebiusMap({:.6g}, {:.6g}, {:.6g}, {:.6g})".format(*self.coef)


def tj(domain: CircularDomain, j: int) -> MoebiusMap:
    """``T_j(z) = ((r^2 - |c|^2) z + c) / (1 - conj(c) z)``."""
    d = domain.disk(j)
    c, r = d.center, d.radius
    return MoebiusMap(r * r - abs(c) ** 2, c, -c.conjugate(), 1)


def tj_power(domain: CircularDomain, j: int, v: int) -> MoebiusMap:
    """``T_j^v`` for any integer ``v`` via the conjugation ``Phi^-1(sigma^2v Phi)``."""
    d = domain.disk(j)
    scale = d.sigma ** (2 * v)
    if d.a == 0:
        return MoebiusMap(scale, 0, 0, 1)
    a = d.a
    u = a.conjugate() / abs(a)
    phi = np.array([[u, -u * a], [-a.conjugate(), 1]])
    phi_inv = np.array([[1, u * a], [a.conjugate(), u]])
    return MoebiusMap.from_matrix(phi_inv @ np.diag([scale, 1]) @ phi)


def _normalize_rows(coef: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = np.argmax(np.abs(coef), axis=1)
    scale = coef[np.arange(len(coef)), k]
    return coef / scale[:, None], scale


@dataclass
class CompositionFamily:
    """Truncated enumeration of the composition family (identity included).

    ``coef`` holds one normalized coefficient row ``(alpha, beta, gamma, delta)``
    per element; rows are ordered breadth first by length, then
    lexicographically by word.  ``dets`` carries the determinant of each row
    through the products, because ``alpha delta - beta gamma`` cancels
    catastrophically for long words.
    """

    coef: np.ndarray
    words: list[tuple[int, ...]]
    max_len: int
    dets: np.ndarray | None = None
    prune_tol: float = 0.0
    tail_bound: float = 0.0
    tail_rigorous: bool = True
    level_sums: list[float] = field(default_factory=list)
    pruned_mass: float = 0.0

    def __post_init__(self):
        if self.dets is None:
            a, b, c, d = self.coef.T
            self.dets = a * d - b * c

    def __len__(self):
        return len(self.words)

    @property
    def includes_identity(self) -> bool:
        return bool(self.words) and self.words[0] == ()

    @property
    def lengths(self) -> np.ndarray:
        return np.array([len(w) for w in self.words], dtype=int)

    @property
    def terminal(self) -> np.ndarray:
        """Index of the operator applied last (0 for the identity)."""
        return np.array([w[0] if w else 0 for w in self.words], dtype=int)

    @property
    def initial(self) -> np.ndarray:
        """Index of the operator applied first (0 for the identity)."""
        return np.array([w[-1] if w else 0 for w in self.words], dtype=int)

    def maps(self) -> list[MoebiusMap]:
        """Individual maps (determinants recomputed, so only for short words)."""
        return [MoebiusMap(*row) for row in self.coef]

    def _bcast(self, z):
        z = np.asarray(z, dtype=complex)
        a, b, c, d = (self.coef[:, i].reshape((-1,) + (1,) * z.ndim) for i in range(4))
        return z, a, b, c, d

    def evaluate(self, z) -> np.ndarray:
        """Array of shape ``(len(self),) + shape(z)`` with every ``tau(z)``."""
        z, a, b, c, d = self._bcast(z)
        return (a * z + b) / (c * z + d)

    def derivative(self, z) -> np.ndarray:
        z, a, b, c, d = self._bcast(z)
        det = self.dets.reshape((-1,) + (1,) * z.ndim)
        return det / (c * z + d) ** 2

    @property
    def det(self) -> np.ndarray:
        return self.dets

    @property
    def gammas(self) -> np.ndarray:
        return self.det / self.coef[:, 3] ** 2

    @property
    def poles(self) -> np.ndarray:
        c, d = self.coef[:, 2], self.coef[:, 3]
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(c == 0, np.inf, -d / c)

    def gamma_sum(self) -> float:
        return float(np.sum(np.abs(self.gammas)))

    def subset(self, mask) -> "CompositionFamily":
        mask = np.asarray(mask, dtype=bool)
        return CompositionFamily(
            self.coef[mask], [w for w, keep in zip(self.words, mask) if keep],
            self.max_len, self.dets[mask], self.prune_tol, self.tail_bound,
            self.tail_rigorous, list(self.level_sums), self.pruned_mass)

    def star(self) -> "CompositionFamily":
        """The family without the identity."""
        return self.subset(self.lengths > 0)

    def without_terminal(self, j: int) -> "CompositionFamily":
        """Drop every word whose leftmost operator is ``T_j``."""
        return self.subset(self.terminal != j)


def _tail_estimate(q, level_sums, max_len, pruned_mass):
    if q < 1:
        return q ** (max_len + 1) / (1 - q) + pruned_mass / (1 - q), True
    sums = [x for x in level_sums if x > 0]
    if len(sums) < 4:
        return math.inf, False
    ratios = [sums[i] / sums[i - 1] for i in range(len(sums) - 3, len(sums))]
    ratio = max(ratios)
    if ratio >= 1:
        return math.inf, False
    return (sums[-1] * ratio + pruned_mass) / (1 - ratio), False


def radii_ratio(domain: CircularDomain) -> float:
    """``sum_j r_j^2 / (1 - |c_j| rho_a)^2``."""
    return sum(d.radius ** 2 / (1 - abs(d.center) * domain.rho_a) ** 2 for d in domain.disks)


def enumerate_family(domain: CircularDomain, max_len: int, prune_tol: float = 0.0,
                     cap: int = DEFAULT_CAP, level_tol: float | None = None) -> CompositionFamily:
    """All words of length ``<= max_len`` with ``|gamma_tau| >= prune_tol``.

    Children of pruned words are not generated.  With ``level_tol`` set, the
    enumeration stops early after the first level whose ``sum |gamma|`` falls
    below it; ``max_len`` of the result is the length actually reached.  The tail bound is the
    geometric estimate ``q^(L+1)/(1-q)`` when ``q = radii_ratio(domain) < 1``;
    otherwise it is extrapolated from the last level sums and flagged as
    heuristic.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    gens, gen_dets = [], []
    for j in range(1, domain.s + 1):
        d = domain.disk(j)
        gens.append(np.array([[d.radius ** 2 - abs(d.center) ** 2, d.center],
                              [-d.center.conjugate(), 1]]))
        gen_dets.append(d.radius ** 2)
    level_coef = np.array([[1, 0, 0, 1]], dtype=complex)
    level_det = np.ones(1, dtype=complex)
    level_words: list[tuple[int, ...]] = [()]
    coefs, dets = [level_coef], [level_det]
    words = list(level_words)
    level_sums = [1.0]
    pruned = 0.0
    for length in range(1, max_len + 1):
        mats = level_coef.reshape(-1, 2, 2)
        child_coef, child_det, child_words = [], [], []
        for j in range(domain.s):
            child_coef.append(np.einsum("ik,nkl->nil", gens[j], mats).reshape(-1, 4))
            child_det.append(gen_dets[j] * level_det)
            child_words.extend((j + 1,) + w for w in level_words)
        if not child_words:
            level_sums.append(0.0)
            continue
        child_coef, scale = _normalize_rows(np.concatenate(child_coef))
        child_det = np.concatenate(child_det) / scale ** 2
        g = np.abs(child_det / child_coef[:, 3] ** 2)
        keep = g >= prune_tol
        pruned += float(np.sum(g[~keep]))
        level_coef, level_det = child_coef[keep], child_det[keep]
        level_words = [w for w, k in zip(child_words, keep) if k]
        level_sums.append(float(np.sum(g[keep])))
        coefs.append(level_coef)
        dets.append(level_det)
        words.extend(level_words)
        if len(words) > cap:
            raise FamilyExplosion(f"family exceeds {cap} elements at length {length}")
        if level_tol is not None and level_sums[-1] < level_tol:
            max_len = length
            break
    tail, rigorous = _tail_estimate(radii_ratio(domain), level_sums, max_len, pruned)
    return CompositionFamily(np.concatenate(coefs), words, max_len, np.concatenate(dets),
                             prune_tol, tail, rigorous, level_sums, pruned)


def identity_family() -> CompositionFamily:
    """The family of a domain with no holes: only ``T_0``."""
    return CompositionFamily(np.array([[1, 0, 0, 1]], dtype=complex), [()], 0)


@dataclass
class AssumptionReport:
    condition_real_centers: bool
    condition_radii: tuple[bool, float]
    s_le_2: bool
    truncated_sum: float
    tail: float
    tail_rigorous: bool
    verdict: str

    @property
    def proven(self) -> bool:
        return self.verdict == "proven"


def check_assumption(domain: CircularDomain, max_len: int | None = None,
                     prune_tol: float = 1e-14, cap: int = DEFAULT_CAP,
                     level_tol: float | None = 1e-12) -> AssumptionReport:
    """Test the sufficient conditions for summability of ``sum |tau'|``.

    The verdict is ``proven`` when real centers, the radii inequality or
    ``s <= 2`` holds; otherwise ``empirical-converging`` when the level sums of
    the truncated series decay geometrically, else ``inconclusive``.
    """
    real = all(d.center.imag == 0 for d in domain.disks)
    q = radii_ratio(domain)
    small = domain.s <= 2
    if max_len is None:
        max_len = 200
    for _ in range(4):
        try:
            fam = enumerate_family(domain, max_len, prune_tol, cap, level_tol)
            break
        except FamilyExplosion:
            prune_tol *= 100
    else:
        raise FamilyExplosion("family too large even with coarse pruning")
    if real or q < 1 or small:
        verdict = "proven"
    elif fam.tail_bound < math.inf:
        verdict = "empirical-converging"
    else:
        verdict = "inconclusive"
    return AssumptionReport(real, (q < 1, q), small, fam.gamma_sum(), fam.tail_bound,
                            fam.tail_rigorous, verdict)


def _check_r(domain: CircularDomain, r: float):
    top = math.inf if domain.rho_a == 0 else 1 / domain.rho_a
    if not 0 <= r <= top * (1 + 1e-12):
        raise ValueError(f"r = {r} outside [0, 1/rho_a]")


def m_j(disk, r: float) -> float:
    """``max_{|z|=r} |T_j(z)| = r_j^2 r / (1 - |c_j| r) + |c_j|``."""
    c = abs(disk.center)
    return disk.radius ** 2 * r / (1 - c * r) + c


def m_of_r(domain: CircularDomain, r: float) -> float:
    _check_r(domain, r)
    return max(m_j(d, r) for d in domain.disks)


def m_iterate(domain: CircularDomain, r: float, v: int) -> float:
    for _ in range(v):
        r = m_of_r(domain, r)
    return r


def v_rho(domain: CircularDomain, rho: float) -> float:
    """``max m_j(rho)/rho`` over the disks with ``|x_j| > rho_x`` (0 if none)."""
    vals = [m_j(d, rho) / rho for d in domain.disks
            if not d.concentric and abs(d.x) > domain.rho_x * (1 + 1e-10)]
    return max(vals, default=0.0)


def derivative_sum(family: CompositionFamily, z) -> np.ndarray:
    """``sum_tau |tau'(z)|`` over the family."""
    return np.sum(np.abs(family.derivative(z)), axis=0)


def mu_of_r(domain: CircularDomain, family: CompositionFamily, r: float,
            samples: int = 720, refine: int = 4) -> tuple[float, float]:
    """Sup of ``sum |tau'|`` over the closed disk of radius ``r``.

    The sum is subharmonic, so the sup is taken on the circle ``|z| = r``:
    ``samples`` equispaced points, then a grid ``refine`` times finer around
    the best one.  The returned tail is the family tail bound carried through
    the upper half of the derivative sandwich.
    """
    if domain.rho_a > 0 and not r * domain.rho_a < 1:
        raise ValueError("r must be below 1/rho_a")
    theta = 2 * np.pi * np.arange(samples) / samples
    vals = derivative_sum(family, r * np.exp(1j * theta))
    k = int(np.argmax(vals))
    h = 2 * np.pi / samples
    fine = theta[k] + h * np.linspace(-1, 1, 2 * refine + 1)
    best = max(float(vals[k]), float(np.max(derivative_sum(family, r * np.exp(1j * fine)))))
    tail = family.tail_bound / (1 - r * domain.rho_a) ** 2
    return best, tail
