"""Command line driver.

    bergman-cmcd <validate|orthopoly|asymptotics|zeros|kernel-check> --config PATH
                 [--out DIR] [--svg] [--precision-bits N] [--max-len L]

Exit codes: 0 success, 2 invalid domain, 3 unreadable or malformed config,
1 when a command produced no successful row at all.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import csv
import io
import json
import math
import multiprocessing
import os
import sys
import tempfile

import mpmath
import numpy as np

from . import asymptotics as asy
from .config import RunConfig, load
from .errors import CMCDError, ConfigError, InvalidDomain
from .kernel import kernel_relation_check, quadrature_rule, reproduce_check
from .moebius import check_assumption, enumerate_family
from .moments import kappa_defect, orthopoly
from .series import series_orthopoly
from .zeros import angular_uniformity, exterior_clear, roots

EXIT_OK, EXIT_FAIL, EXIT_DOMAIN, EXIT_CONFIG = 0, 1, 2, 3
THREADS_ENV = "BERGMAN_CMCD_THREADS"


# ---------------------------------------------------------------- formatting

def fmt(v) -> str:
    """Shortest round-trip text for doubles, 30 digits for mpmath values."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (mpmath.mpf, mpmath.mpc)):
        return mpmath.nstr(v, 30)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows, config_hash: str) -> None:
    """RFC-4180 CSV with a ``config_hash`` column, written via temp file and rename."""
    buf = io.StringIO(newline="")
    w = csv.writer(buf)
    w.writerow(["config_hash", *header])
    for row in rows:
        w.writerow([config_hash, *(fmt(v) for v in row)])
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def write_json(path, doc) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(suffix=".json", dir=directory)
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return max(1, value)


def pmap(func, items, workers: int) -> list:
    """Ordered map, in worker processes when more than one is allowed.

    Processes rather than threads: mpmath keeps its precision in a global context.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    ctx = multiprocessing.get_context("spawn")
    with concurrent.futures.ProcessPoolExecutor(min(workers, len(items)), mp_context=ctx) as ex:
        return list(ex.map(func, items))


class Run:
    """Parsed config plus overrides, resolved domain and output directory."""

    def __init__(self, cfg: RunConfig, out: str | None, svg: bool):
        self.cfg = cfg
        self.domain = cfg.build_domain()
        self.out = out or cfg.outputs["directory"]
        self.svg = svg or "svg" in cfg.outputs["formats"]
        self.hash = cfg.hash
        self.workers = threads()
        os.makedirs(self.out, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.out, name)

    def csv(self, name, header, rows):
        write_csv(self.path(name), header, rows, self.hash)

    def family(self):
        f = self.cfg.family
        return enumerate_family(self.domain, f["max_len"], self.cfg.prune_tol, f["cap"])


# ---------------------------------------------------------------- validate

def cmd_validate(run: Run) -> int:
    d = run.domain
    report = check_assumption(d)
    disks = []
    for j, disk in enumerate(d.disks, 1):
        disks.append({
            "index": j, "center": repr(disk.center), "radius": repr(disk.radius),
            "a": repr(disk.a), "sigma": repr(disk.sigma),
            "x": None if disk.x is None else repr(disk.x),
            "y": None if disk.y is None else str(disk.y),
            "epsilon": disk.epsilon,
            "pole": None if disk.pole is None else repr(disk.pole),
        })
    doc = {
        "config_hash": run.hash,
        "valid": True,
        "s": d.s,
        "rho_a": d.rho_a,
        "rho_x": d.rho_x,
        "area": d.area,
        "disks": disks,
        "assumption": {
            "verdict": report.verdict,
            "proven": report.proven,
            "condition_real_centers": report.condition_real_centers,
            "condition_radii": bool(report.condition_radii[0]),
            "radii_q": report.condition_radii[1],
            "s_le_2": report.s_le_2,
            "truncated_sum": report.truncated_sum,
            "tail": report.tail,
            "tail_rigorous": report.tail_rigorous,
        },
    }
    write_json(run.path("validate.json"), doc)
    run.csv("validate.csv", ["disk [index]", "center_re [1]", "center_im [1]", "radius [1]",
                             "a_re [1]", "a_im [1]", "sigma [1]", "epsilon [sign]"],
            [(j, disk.center.real, disk.center.imag, disk.radius, complex(disk.a).real,
              complex(disk.a).imag, disk.sigma, disk.epsilon) for j, disk in enumerate(d.disks, 1)])
    print(f"valid domain with s = {d.s}")
    print(f"rho_a = {d.rho_a:.10g}")
    print(f"rho_x = {'inf' if d.rho_x is None else format(d.rho_x, '.10g')}")
    print(f"assumption: {report.verdict} (sum |gamma| = {report.truncated_sum:.6g}, tail = {report.tail:.3g})")
    return EXIT_OK


# ---------------------------------------------------------------- orthopoly

def _orthopoly_job(args):
    domain, family, n, bits, contour, family_status = args
    row = {"n": n}
    try:
        P, kappa = orthopoly(domain, n, bits)
        row["oracle"] = [complex(b) for b in P.coeffs]
        row["oracle_mp"] = list(P.coeffs)
        row["kappa_oracle"] = kappa
    except CMCDError as e:
        row["oracle_error"] = type(e).__name__
    if family is None:
        row["series_status"] = family_status
        return row
    try:
        res = series_orthopoly(domain, family, n, rho=contour["radius"], M_init=contour["M_init"],
                               M_max=contour["M_max"])
        row["series"] = [complex(b) for b in res.polynomial.coeffs]
        row["kappa_series"] = res.kappa
        row["M"] = res.M
        row["series_error"] = res.error
    except CMCDError as e:
        row["series_status"] = type(e).__name__
    return row


def cmd_orthopoly(run: Run) -> int:
    cfg = run.cfg
    family = None
    family_status = ""
    try:
        family = run.family()
    except CMCDError as e:
        family_status = type(e).__name__
    contour = {"radius": cfg.contour_radius, "M_init": cfg.contour["M_init"],
               "M_max": cfg.contour["M_max"]}
    jobs = [(run.domain, family, n, cfg.precision_bits, contour, family_status) for n in cfg.degrees]
    results = pmap(_orthopoly_job, jobs, run.workers)

    coef_rows, kappa_rows, ok = [], [], False
    disagreements = {}
    for r in results:
        n = r["n"]
        oracle, series = r.get("oracle"), r.get("series")
        status = r.get("series_status", "ok")
        ok = ok or oracle is not None or series is not None
        worst = None
        for k in range(n):
            o = oracle[k] if oracle else None
            s = series[k] if series else None
            dis = abs(o - s) if (o is not None and s is not None) else None
            if dis is not None:
                worst = dis if worst is None else max(worst, dis)
            coef_rows.append((n, k,
                              r["oracle_mp"][k].real if oracle else None,
                              r["oracle_mp"][k].imag if oracle else None,
                              s.real if s is not None else None, s.imag if s is not None else None,
                              dis, r.get("oracle_error", "ok"), status))
        ko, ks = r.get("kappa_oracle"), r.get("kappa_series")
        kdis = abs(float(ko) - ks) / float(ko) if (ko is not None and ks is not None) else None
        kappa_rows.append((n, ko, ks, kdis, worst, r.get("M"), r.get("series_error"),
                           r.get("oracle_error", "ok"), status))
        if worst is not None:
            disagreements[n] = worst

    run.csv("orthopoly_coefficients.csv",
            ["n [degree]", "k [index]", "oracle_re [1]", "oracle_im [1]", "series_re [1]",
             "series_im [1]", "disagreement [abs]", "oracle_status", "series_status"], coef_rows)
    run.csv("orthopoly_kappa.csv",
            ["n [degree]", "kappa_oracle [1]", "kappa_series [1]", "kappa_disagreement [rel]",
             "max_coefficient_disagreement [abs]", "series_M [points]", "series_error_estimate [abs]",
             "oracle_status", "series_status"], kappa_rows)
    if run.svg and disagreements:
        from .plotting import trace_figure
        ns = sorted(disagreements)
        trace_figure(run.path("orthopoly_disagreement.svg"), ns,
                     {"max |oracle - series|": [max(disagreements[n], 1e-300) for n in ns]},
                     "degree n", "coefficient disagreement", logy=True)
    print(f"orthopoly: {len(cfg.degrees)} degrees written to {run.out}")
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- asymptotics

def _kappa_job(args):
    domain, n, bits, K = args
    defect = kappa_defect(domain, n, bits)
    row = {"n": n, "defect": defect}
    if n >= K:
        ev = asy.kappa_expansion(domain, n, K)
        row["has_terms"] = bool(ev.terms)
        row["first"] = ev.partial(0).real if ev.terms else 0.0
        row["full"] = float(ev.correction.real) if ev.terms else 0.0
        row["concentric"] = float(ev.concentric_term)
        row["degenerate"] = ev.degenerate
    return row


def _interior_job(args):
    domain, family, n, bits = args
    P, _ = orthopoly(domain, n, bits)
    out = {"n": n, "rows": []}
    for j in domain.dominant_a():
        d = domain.disk(j)
        a = complex(d.a)
        with mpmath.workprec(P.precision_bits):
            at_a = complex(P(mpmath.mpc(a)) * (1 - mpmath.mpf(d.sigma) ** 2) / mpmath.mpc(a) ** n)
        for z in (0j, 0.5 * a, 0.5 * a * 1j):
            try:
                pred = asy.interior_prediction(domain, family, n, z)
            except CMCDError as e:
                out["rows"].append((j, z, None, None, None, at_a, type(e).__name__))
                continue
            with mpmath.workprec(P.precision_bits):
                val = complex(P(mpmath.mpc(z)))
            gap = abs(val - pred)
            out["rows"].append((j, z, val, pred, gap * n * n / abs(a) ** n, at_a, "ok"))
    return out


def _slope(xs, ys):
    ys = np.asarray(ys, dtype=float)
    good = np.isfinite(ys) & (ys > 0)
    if good.sum() < 2:
        return None
    return float(np.polyfit(np.asarray(xs, dtype=float)[good], np.log(ys[good]), 1)[0])


def cmd_asymptotics(run: Run) -> int:
    cfg, d = run.cfg, run.domain
    degrees = sorted(cfg.degrees)
    K = cfg.expansion["K"]
    bits = cfg.precision_bits
    fits = []
    figures = {}

    # leading coefficient
    krows = pmap(_kappa_job, [(d, n, bits, K) for n in degrees], run.workers)
    rows = []
    for r in krows:
        defect = r["defect"]
        first, full = r.get("first"), r.get("full")
        corr = (defect - r["concentric"]) if r.get("has_terms") else None
        rel1 = relK = None
        if corr is not None and corr != 0:
            rel1 = float(abs(corr - first) / abs(corr))
            relK = float(abs(corr - full) / abs(corr))
        rows.append((r["n"], defect, first, full, r.get("concentric"), rel1, relK, r.get("degenerate")))
    run.csv("asymptotics_kappa.csv",
            ["n [degree]", "defect (n+1)kappa^-2-1 [1]", "first_term [1]", f"expansion_K{K} [1]",
             "concentric_term [1]", "rel_err_first [rel]", f"rel_err_K{K} [rel]", "degenerate"], rows)
    with_terms = [r for r in krows if r.get("has_terms")]
    if len(with_terms) >= 2:
        ns = [r["n"] for r in with_terms]
        fitted = _slope(ns, [abs(float(r["defect"] - r["concentric"])) for r in with_terms])
        predicted = _slope(ns, [abs(r["first"]) for r in with_terms])
        fits.append(("leading_coefficient", None, fitted, predicted))
        figures["kappa"] = (ns, {"|(n+1)kappa^-2 - 1|": [abs(float(r["defect"] - r["concentric"])) for r in with_terms],
                                 "first term": [abs(r["first"]) for r in with_terms]})

    # exterior
    ext_rows = []
    if d.rho_x is not None:
        rho_x = d.rho_x
        r_mid = (1 + rho_x) / 2 if rho_x > 1 else (d.rho_a + rho_x) / 2
        curves = {}
        for r in (r_mid, 2 * rho_x):
            fit = asy.exterior_rate_fit(d, degrees, r, precision_bits=bits)
            regime = "below_rho_x" if r < rho_x else "beyond_rho_x"
            for n, e in zip(fit.degrees, fit.errors):
                ext_rows.append((r, regime, n, e))
            fits.append((f"exterior_{regime}", r, fit.slope, fit.predicted))
            curves[f"|z| = {r:.4g}"] = fit.errors
        figures["exterior"] = (degrees, curves)
    else:
        for n in degrees:
            ext_rows.append((None, "concentric", n, 0.0))
    run.csv("asymptotics_exterior.csv",
            ["radius [1]", "regime", "n [degree]", "max_error |P_n/z^n-1| [1]"], ext_rows)

    # interior and Theta comparison
    int_rows = []
    if d.rho_a > 0:
        family = run.family()
        res = pmap(_interior_job, [(d, family, n, bits) for n in degrees], run.workers)
        for r in res:
            for j, z, val, pred, scaled, at_a, status in r["rows"]:
                int_rows.append((r["n"], j, z.real, z.imag, val, pred, scaled, at_a, status))
        gaps = [max((abs(row[4] - row[5]) for row in int_rows if row[0] == n and row[4] is not None),
                    default=float("nan")) for n in degrees]
        fits.append(("interior", None, _slope(degrees, gaps), math.log(d.rho_a)))
    run.csv("asymptotics_interior.csv",
            ["n [degree]", "disk [index]", "z_re [1]", "z_im [1]", "P_n(z) [1]", "prediction [1]",
             "gap*n^2/|a|^n [1]", "P_n(a)(1-sigma^2)/a^n [1]", "status"],
            [(n, j, zr, zi, _c(v), _c(p), s, _c(a), st) for n, j, zr, zi, v, p, s, a, st in int_rows])

    # chi trace
    chi_rows = []
    if d.rho_x is not None:
        for j in d.dominant_x():
            x = complex(d.disk(j).x)
            for n in degrees:
                val = asy.chi_n(d, j, n, x).scaled
                chi_rows.append((n, j, val.real, val.imag, abs(val - (-0.5))))
        figures["chi"] = ([r[0] for r in chi_rows if r[1] == d.dominant_x()[0]],
                          {"|x|^(2n+2) chi_n(x)": [r[2] for r in chi_rows if r[1] == d.dominant_x()[0]]})
    run.csv("asymptotics_chi.csv",
            ["n [degree]", "disk [index]", "scaled_re [1]", "scaled_im [1]", "distance_to_-1/2 [abs]"],
            chi_rows)

    fit_rows = []
    for claim, radius, fitted, predicted in fits:
        rel = abs(fitted - predicted) / abs(predicted) if (fitted is not None and predicted) else None
        fit_rows.append((claim, radius, fitted, predicted, rel, rel is not None and rel <= 0.07))
    run.csv("asymptotics_fits.csv",
            ["claim", "radius [1]", "fitted_slope [1/degree]", "predicted_slope [1/degree]",
             "relative_gap [rel]", "pass"], fit_rows)

    if run.svg:
        from .plotting import trace_figure
        if "kappa" in figures:
            ns, c = figures["kappa"]
            trace_figure(run.path("asymptotics_kappa.svg"), ns, c, "degree n", "size", logy=True)
        if "exterior" in figures:
            ns, c = figures["exterior"]
            trace_figure(run.path("asymptotics_exterior.svg"), ns, c, "degree n",
                         r"$\max_{|z|=r} |P_n(z)/z^n - 1|$", logy=True)
        if "chi" in figures:
            ns, c = figures["chi"]
            trace_figure(run.path("asymptotics_chi.svg"), ns, c, "degree n", "scaled value",
                         reference=-0.5)
    print(f"asymptotics: {len(fit_rows)} fits written to {run.out}")
    return EXIT_OK


def _c(v):
    return None if v is None else fmt(complex(v))


# ---------------------------------------------------------------- zeros

def _zeros_job(args):
    domain, n, bits = args
    P, _ = orthopoly(domain, n, bits)
    radius = domain.rho_a if domain.rho_a > 0 else None
    try:
        return n, roots(P, radius=radius), None
    except CMCDError as e:
        return n, None, type(e).__name__


def cmd_zeros(run: Run) -> int:
    cfg, d = run.cfg, run.domain
    res = pmap(_zeros_job, [(d, n, cfg.precision_bits) for n in cfg.degrees], run.workers)
    root_rows, summary, measures = [], [], {}
    clear_radius = (d.rho_x + 0.1) if d.rho_x is not None else math.inf
    for n, m, err in res:
        if m is None:
            summary.append((n, None, None, None, None, None, None, err))
            continue
        measures[n] = m
        for k, (z, r) in enumerate(zip(m.roots, m.residuals)):
            root_rows.append((n, k, z.real, z.imag, abs(z), r))
        u = angular_uniformity(m, d.rho_a)
        summary.append((n, u.ks_distance, u.radial_spread, u.degenerate,
                        exterior_clear(m, clear_radius), None if u.degenerate else u.ks_distance < 0.1,
                        m.max_residual, "ok"))
    run.csv("zeros.csv", ["n [degree]", "k [index]", "re [1]", "im [1]", "modulus [1]",
                          "backward_error [rel]"], root_rows)
    run.csv("zeros_summary.csv",
            ["n [degree]", "ks_distance [1]", "radial_spread [1]", "degenerate",
             "exterior_clear", "ks_pass", "max_backward_error [rel]", "status"], summary)
    if run.svg and measures:
        from .plotting import zeros_figure
        zeros_figure(run.path("zeros.svg"), d, measures)
    print(f"zeros: {len(measures)} polynomials written to {run.out}")
    return EXIT_OK if measures else EXIT_FAIL


# ---------------------------------------------------------------- kernel-check

def cmd_kernel_check(run: Run) -> int:
    d = run.domain
    family = run.family()
    rule = quadrature_rule(d)
    rows = []
    for z in (-0.5 + 0j, 0.3j):
        for k in range(6):
            res = reproduce_check(d, family, lambda w, k=k: w ** k, z, rule)
            rows.append(("reproduce", z.real, z.imag, None, None, k, res, res < 1e-6))
    for z, zeta in ((0.1 + 0.2j, 1.5 - 0.5j), (-0.3 + 0j, 2j)):
        try:
            rel = kernel_relation_check(d, family, z, zeta)
            rows.append(("kernel_relation", z.real, z.imag, zeta.real, zeta.imag, None, rel, rel < 1e-6))
        except CMCDError as e:
            rows.append((f"kernel_relation:{type(e).__name__}", z.real, z.imag, zeta.real, zeta.imag,
                          None, None, False))
    run.csv("kernel_check.csv",
            ["check", "z_re [1]", "z_im [1]", "zeta_re [1]", "zeta_im [1]", "k [power]",
             "residual [abs or rel]", "pass"], rows)
    passed = sum(1 for r in rows if r[-1])
    print(f"kernel-check: {passed}/{len(rows)} checks pass")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "orthopoly": cmd_orthopoly,
    "asymptotics": cmd_asymptotics,
    "zeros": cmd_zeros,
    "kernel-check": cmd_kernel_check,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bergman-cmcd",
                                description="Bergman orthogonal polynomials on circular multiply connected domains")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", help="output directory (overrides outputs.directory)")
    p.add_argument("--svg", action="store_true", help="also write SVG figures")
    p.add_argument("--precision-bits", type=int, help="override precision_bits")
    p.add_argument("--max-len", type=int, help="override family.max_len")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load(args.config)
        doc = cfg.to_dict()
        if args.precision_bits is not None:
            doc["precision_bits"] = args.precision_bits
        if args.max_len is not None:
            doc["family"]["max_len"] = args.max_len
        cfg = RunConfig.from_dict(doc)
        run = Run(cfg, args.out, args.svg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidDomain as e:
        print(f"invalid domain: {e} (disks {list(e.indices)})", file=sys.stderr)
        return EXIT_DOMAIN
    return COMMANDS[args.command](run)


if __name__ == "__main__":
    sys.exit(main())
