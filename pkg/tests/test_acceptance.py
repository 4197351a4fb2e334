"""Acceptance criteria 1 to 11; each test records one PASS/FAIL line shown in the summary."""
import math
import time

import mpmath
import numpy as np

from bergman_cmcd import asymptotics as asy
from bergman_cmcd.errors import CMCDError
from bergman_cmcd.geometry import t_map, validate
from bergman_cmcd.kernel import kernel_relation_check, quadrature_rule, reproduce_check
from bergman_cmcd.moebius import check_assumption, enumerate_family, m_of_r, mu_of_r
from bergman_cmcd.moments import kappa_defect, orthopoly
from bergman_cmcd.series import series_orthopoly
from bergman_cmcd.zeros import angular_uniformity, exterior_clear, roots

from conftest import ANNULUS, REFERENCE, THREE_REAL, THREE_SMALL, TWO_DISKS


def _mp_eval(P, z):
    with mpmath.workprec(P.precision_bits):
        return P(mpmath.mpc(z))


def test_criterion_01_annulus_exact(verdict):
    t0 = time.perf_counter()
    dom = validate(ANNULUS)
    fam = enumerate_family(dom, 60)
    worst_c, worst_k = 0.0, 0.0
    for n in range(1, 31):
        exact = math.sqrt((n + 1) / (1 - 0.5 ** (2 * n + 2)))
        P, kappa = orthopoly(dom, n)
        worst_c = max(worst_c, max((float(abs(b)) for b in P.coeffs), default=0.0))
        worst_k = max(worst_k, abs(float(kappa) - exact) / exact)
        S = series_orthopoly(dom, fam, n, check_regime=False)
        worst_c = max(worst_c, float(np.max(np.abs(S.polynomial.to_numpy()[:-1]), initial=0.0)))
        worst_k = max(worst_k, abs(S.kappa - exact) / exact)
    dt = time.perf_counter() - t0
    ok = worst_c <= 1e-12 and worst_k <= 1e-12 and dt < 10
    verdict(1, ok, f"annulus n=1..30 max|b_k|={worst_c:.2e} kappa rel={worst_k:.2e} time={dt:.1f}s")


def test_criterion_02_route_equivalence(verdict):
    t0 = time.perf_counter()
    dom = validate(REFERENCE)
    fam = enumerate_family(dom, 14, 1e-30)
    worst, Ms = 0.0, []
    for n in (15, 20, 30):
        P, _ = orthopoly(dom, n, 256)
        # n = 15 is below the certified regime for the default contour; run it anyway
        S = series_orthopoly(dom, fam, n, M_max=2048, check_regime=n > 15)
        Ms.append(S.M)
        oracle = np.array([complex(b) for b in P.coeffs])
        worst = max(worst, float(np.max(np.abs(oracle - S.polynomial.to_numpy()[:-1]))))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and max(Ms) <= 2048 and dt < 300
    verdict(2, ok, f"n=15,20,30 max disagreement={worst:.2e} M={Ms} time={dt:.1f}s")


def test_criterion_03_curious_identity(verdict):
    worst = 0.0
    for disks in (REFERENCE, TWO_DISKS, THREE_REAL):
        dom = validate(disks)
        for n in range(1, 41):
            P, _ = orthopoly(dom, n)
            with mpmath.workprec(P.precision_bits):
                lhs = P(mpmath.mpc(0))
                terms = [mpmath.mpf(r) ** 2 * P(mpmath.mpc(c)) for c, r in dom.as_pairs()]
                scale = max(abs(lhs), mpmath.fsum(abs(t) for t in terms))
                worst = max(worst, float(abs(lhs - mpmath.fsum(terms)) / scale))
    verdict(3, worst <= 1e-12, f"1,2,3 disks n<=40 max rel gap={worst:.2e}")


def test_criterion_04_kappa_expansion(verdict):
    dom = validate(REFERENCE)
    rel = {}
    for n in (40, 60):
        d = float(kappa_defect(dom, n))
        first = asy.kappa_expansion(dom, n, K=3).partial(0).real
        rel[n] = abs(d - first) / abs(d)
    deg = validate([(0.25, 0.25)])
    d40 = float(kappa_defect(deg, 40))
    explicit = asy.degenerate_kappa_term(deg, 40)
    deg_rel = abs(d40 - explicit) / abs(d40)
    ok = rel[40] <= 0.2 and rel[60] < rel[40] and deg_rel < 5e-4
    verdict(4, ok, f"first-term rel n=40 {rel[40]:.4f}, n=60 {rel[60]:.4f}; degenerate rel={deg_rel:.1e}")


def test_criterion_05_exterior_rates(verdict):
    dom = validate(REFERENCE)
    degrees = range(20, 61, 5)
    gaps = {}
    for r in (1.2, 2 * dom.rho_x):
        fit = asy.exterior_rate_fit(dom, degrees, r)
        gaps[r] = fit.relative_gap
    ok = all(g <= 0.07 for g in gaps.values())
    verdict(5, ok, "slope gaps " + ", ".join(f"r={r:.4g}: {g:.2%}" for r, g in gaps.items()))


def test_criterion_06_interior_theta(verdict):
    dom = validate(REFERENCE)
    d = dom.disk(1)
    a = abs(d.a)
    scaled = [asy.tjv_tail_sum(dom, 1, n, 0).gap * n * n / a ** n for n in (25, 50, 100, 200)]
    variation = max(scaled) / min(scaled)
    P, _ = orthopoly(dom, 80)
    with mpmath.workprec(P.precision_bits):
        at_a = complex(P(mpmath.mpc(d.a)) * (1 - mpmath.mpf(d.sigma) ** 2) / mpmath.mpc(d.a) ** 80)
    ok = variation < 3 and 0.9 <= at_a.real <= 1.1 and abs(at_a.imag) < 1e-12
    verdict(6, ok, f"scaled tail gap {['%.3g' % s for s in scaled]} variation={variation:.1f}x; "
                   f"P_80(a)(1-sigma^2)/a^80={at_a.real:.4f}")


def test_criterion_07_chi(verdict):
    dom = validate(REFERENCE)
    x = dom.disk(1).x
    X = abs(x)
    lim = asy.chi_n(dom, 1, 200, x).scaled
    pts = X * np.exp(2j * np.pi * (np.arange(64) + 0.5) / 64)
    sups = [max(abs(asy.chi_n(dom, 1, n, z).scaled) / X ** 2 for z in pts) for n in (10, 20, 40, 80)]
    ok = abs(lim + 0.5) < 0.05 and max(sups) < 1 and max(sups) / min(sups) < 2
    verdict(7, ok, f"|x|^(2n+2) chi_200(x)={lim.real:.4f}; sup |x|^2n|chi_n| over n=10..80: "
                   f"{min(sups):.3f}..{max(sups):.3f}")


def test_criterion_08_kernel(verdict):
    dom = validate(REFERENCE)
    fam = enumerate_family(dom, 10)
    rule = quadrature_rule(dom)
    res = max(reproduce_check(dom, fam, lambda w, k=k: w ** k, z, rule)
              for k in range(6) for z in (-0.5, 0.3j))
    rel = max(kernel_relation_check(dom, fam, z, zeta) for z, zeta in ((0.1 + 0.2j, 1.5), (-0.3, 2j)))
    ok = res < 1e-6 and rel < 1e-6
    verdict(8, ok, f"reproduce residual={res:.2e}; kernel relation rel={rel:.2e}")


def test_criterion_09_m_mu(verdict):
    dom = validate(TWO_DISKS)
    ref = validate(REFERENCE)
    fixed = max(abs(t_map(d, p) - p) for D in (dom, ref) for d in D.disks for p in (d.a, 1 / d.a.conjugate()))
    extremal = abs(m_of_r(dom, dom.rho_x) / dom.rho_x - dom.rho_x ** -2)
    r = np.linspace(dom.rho_a, 1 / dom.rho_a, 1000)
    m = np.array([m_of_r(dom, v) for v in r])
    increasing = bool(np.all(np.diff(m) > 0))
    at_rho_x = abs(r[int(np.argmin(m / r))] - dom.rho_x) <= r[1] - r[0]
    fam = enumerate_family(dom, 12, 1e-20)
    s = fam.gamma_sum()
    sandwich = True
    for rad in (0.5, 1.0, 1.5):
        value, _ = mu_of_r(dom, fam, rad)
        sandwich &= s / (1 + rad * dom.rho_a) ** 2 <= value <= s / (1 - rad * dom.rho_a) ** 2
    ok = fixed < 1e-12 and extremal < 1e-9 and increasing and at_rho_x and sandwich
    verdict(9, ok, f"fixed points {fixed:.1e}, m(rho_x)/rho_x gap {extremal:.1e}, increasing={increasing}, "
                   f"argmin at rho_x={at_rho_x}, sandwich={sandwich}")


def test_criterion_10_zeros(verdict):
    t0 = time.perf_counter()
    dom = validate(REFERENCE)
    P, _ = orthopoly(dom, 80)
    u = angular_uniformity(roots(P), dom.rho_a)
    clear = all(exterior_clear(roots(orthopoly(dom, n)[0]), dom.rho_x + 0.1) for n in (30, 40, 60))
    dt = time.perf_counter() - t0
    ok = u.ks_distance < 0.1 and u.radial_spread < 0.1 and clear and dt < 120
    verdict(10, ok, f"n=80 KS={u.ks_distance:.4f} spread={u.radial_spread:.4f}; "
                    f"exterior clear n=30,40,60: {clear}; time={dt:.1f}s")


def test_criterion_11_assumption(verdict):
    real = check_assumption(validate(THREE_REAL))
    small = check_assumption(validate(THREE_SMALL))
    two = check_assumption(validate(REFERENCE))
    drift = 0.0
    for disks in (THREE_REAL, THREE_SMALL):
        dom = validate(disks)
        a = enumerate_family(dom, 8, 1e-14).gamma_sum()
        b = enumerate_family(dom, 12, 1e-14).gamma_sum()
        drift = max(drift, abs(a - b))
    ok = (real.proven and real.condition_real_centers
          and small.proven and small.condition_radii[0] and not small.condition_real_centers
          and two.proven and two.s_le_2 and drift < 1e-10)
    verdict(11, ok, f"real centers {real.verdict}, small radii {small.verdict} (q={small.condition_radii[1]:.3f}), "
                    f"s<=2 {two.verdict}; sum|gamma| drift L=8->12: {drift:.1e}")
