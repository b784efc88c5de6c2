"""Work units behind the command-line subcommands.

Each ``*_tasks`` function expands a config tree into independent tasks
``(function, kwargs)``; each ``*_merge`` function folds the task results, in
task order, into :class:`~thingap.reports.Report` objects.  Tasks only take
plain data so they can run in worker processes.
"""
from __future__ import annotations

from math import log, pi, sqrt

import numpy as np

from . import dynamics as dyn
from . import estimates as est
from .config import quadrature_config
from .fields import (CutoffSpec, RigidField, RigidMotion, divergence_residual, example4,
                     example4b)
from .geometry import DomainSpec, GapGeometry, GapState
from .identities import taylor_moment_integrals, verify_flux_identity
from .quadrature import box_gradient_norm, l2_hessian_norm, lp_gradient_integral
from .reports import Report

LN10 = log(10.0)

# component -> (field factory, (a, b) amplitudes)
COMPONENT_FIELDS = {"u3": ("example4", (1.0, 0.0)), "om3": ("example4", (0.0, 1.0)),
                    "utau": ("example4b", (1.0, 0.0)), "omtau": ("example4b", (0.0, 1.0))}


def _h_grid(sweep):
    return np.logspace(np.log10(sweep["h_min"]), np.log10(sweep["h_max"]), sweep["n_h"])


def _geometry(tree, alpha=None):
    g = tree["geometry"]
    a = g["alpha"] if alpha is None else alpha
    return GapGeometry.power_law(g["k"], a, sigma0=g["sigma0"])


def _field(tree, kind, amps, geom, state, sigma):
    fc = tree["field"]
    cut = CutoffSpec(max(fc["cutoff_rho"], 1.2 * sigma), fc["cutoff_H"], fc["q"])
    make = example4 if kind == "example4" else example4b
    return make(amps[0], amps[1], geom, state, cut)


def _sigma(tree, h, alpha, regime="weak"):
    g = tree["geometry"]
    return est.sigma_h(h, alpha, g["sigma0"], g["H"], regime)


def run_tasks(tasks):
    """Serial execution, used by tests and by ``--jobs 1``."""
    return [fn(**kw) for fn, kw in tasks]


# ---------------------------------------------------------------------------
# flux identities
# ---------------------------------------------------------------------------

IDENTITY_FAMILIES = (("flat", {"annulus": True}, 1e-8), ("flat", {"annulus": False}, 1e-8),
                     ("phi", {}, 1e-8), ("cup", {"alpha": 1.0}, 1e-8),
                     ("cup", {"alpha": 0.5}, 1e-6), ("cup", {"alpha": 0.3}, 1e-6))


def flux_case(tree, family, params, u_p, omega, tol):
    m = RigidMotion.at_contact(u_p, omega, params["h"])
    rep = verify_flux_identity(family, params, m, quadrature_config(tree))
    row = {"family": family, "alpha": params.get("alpha", 1.0),
           "annulus": params.get("annulus", False), "rho": params["rho"],
           "gamma": params["gamma"], "k": params["k"], "tanPhi": params.get("tan_phi", 0.0)}
    row.update({"closedForm": rep.closed_form, "quadrature": rep.quadrature,
                "relError": rep.rel_error, "tol": tol, "pass": rep.rel_error <= tol})
    return row


def identity_tasks(tree):
    rng = np.random.default_rng(tree["sweep"]["seed"])
    tasks = []
    for family, extra, tol in IDENTITY_FAMILIES:
        for _ in range(tree["sweep"]["n_cases"]):
            params = {"rho": float(rng.uniform(0.05, 1.0)),
                      "gamma": float(rng.uniform(0.0, 2 * pi)),
                      "k": float(rng.uniform(0.2, 2.0)), "h": float(rng.uniform(1e-3, 0.1)),
                      **extra}
            u_p = rng.uniform(-1, 1, 3)
            omega = rng.uniform(-1, 1, 3)
            if family == "phi":
                params["tan_phi"] = float(rng.uniform(-0.5, 0.5))
                omega[0] = 0.0
            tasks.append((flux_case, dict(tree=tree, family=family, params=params,
                                          u_p=u_p.tolist(), omega=omega.tolist(), tol=tol)))
    return tasks


def identity_merge(tree, results):
    worst = {}
    for row in results:
        key = f"{row['family']}{'-annulus' if row['annulus'] else ''}-alpha{row['alpha']:g}"
        worst[key] = max(worst.get(key, 0.0), row["relError"])
    ok = all(r["pass"] for r in results)
    return [Report("identities", "flux-identities", {"worstRelError": worst,
                                                     "cases": len(results)}, results, ok)]


# ---------------------------------------------------------------------------
# weak estimates: exponent algebra
# ---------------------------------------------------------------------------

REFERENCE_TABLES = (((1.0, 2.0, 3), (0.5, 0.0, 0.0, -0.5)),
                    ((1.0, 2.0, 2), (0.75, 0.25, 0.25)),
                    ((1.0 / 3.0, 2.0, 3), None))


def weak_tasks(tree):
    return [(weak_case, dict(tree=tree))]


def weak_case(tree):
    rows = []
    tables_ok = True
    for (a, p, dim), expect in REFERENCE_TABLES:
        t = est.weak_exponents(a, p, dim).as_tuple()
        ok = True if expect is None else all(abs(x - y) <= 1e-15 for x, y in zip(t, expect))
        if expect is None:  # (1/3, 2): normal velocity exponent vanishes
            ok = abs(t[0]) <= 1e-15
        tables_ok &= ok
        rows.append({"check": "table", "alpha": a, "p": p, "dim": dim,
                     "exponents": list(t), "pass": ok})
    rng = np.random.default_rng(tree["sweep"]["seed"] + 1)
    g = tree["geometry"]
    hs = _h_grid(tree["sweep"])
    worst = 0.0
    for _ in range(20):
        a, p = float(rng.uniform(0.05, 1.0)), float(rng.uniform(1.0, 6.0))
        for dim, names in ((3, est.COMPONENTS_3D), (2, est.COMPONENTS_2D)):
            table = est.weak_exponents(a, p, dim)
            for comp in names:
                vals = [est.weak_rhs_sigma(comp, est.sigma_h(h, a, g["sigma0"], g["H"]), h,
                                           g["k"], a, p, 1.0, dim=dim) for h in hs]
                fit = est.fit_scaling(list(zip(hs, vals)), table[comp], 1e-6)
                worst = max(worst, abs(fit.slope - table[comp]))
                rows.append({"check": "fit", "alpha": a, "p": p, "dim": dim,
                             "component": comp, "slope": fit.slope,
                             "expectedSlope": table[comp], "pass": fit.passed})
    fits_ok = all(r["pass"] for r in rows if r["check"] == "fit")
    return {"rows": rows, "tablesOk": tables_ok, "fitsOk": fits_ok, "worstSlopeError": worst}


def weak_merge(tree, results):
    r = results[0]
    return [Report("weak", "exponent-tables",
                   {"tablesOk": r["tablesOk"], "fitsOk": r["fitsOk"],
                    "worstSlopeError": r["worstSlopeError"]}, r["rows"],
                   r["tablesOk"] and r["fitsOk"])]


# ---------------------------------------------------------------------------
# gap-norm scaling and optimality
# ---------------------------------------------------------------------------

def gap_norm_point(tree, alpha, h, component):
    kind, amps = COMPONENT_FIELDS[component]
    geom = _geometry(tree, alpha)
    state = GapState(h, tree["geometry"]["H"])
    sigma = _sigma(tree, h, alpha)
    f = _field(tree, kind, amps, geom, state, sigma)
    res = lp_gradient_integral(f, DomainSpec.full_cylinder(geom, state, sigma), 2.0,
                               quadrature_config(tree), restrict_to_fluid=True)
    return {"alpha": alpha, "component": component, "h": float(h), "sigma": sigma,
            "gradSquare": res.value, "errorEstimate": res.error_estimate,
            "amplitude": max(amps)}


def _components(tree):
    comp = tree["sweep"]["component"]
    if comp == "all":
        return ("u3", "om3")
    if comp not in COMPONENT_FIELDS:
        raise ValueError(f"unknown component {comp!r}")
    return (comp,)


def scaling_tasks(tree):
    return [(gap_norm_point, dict(tree=tree, alpha=a, h=float(h), component=c))
            for a in tree["sweep"]["alphas"] for c in _components(tree)
            for h in _h_grid(tree["sweep"])]


def scaling_merge(tree, results):
    tol = tree["sweep"]["slope_tol"]
    groups = {}
    for row in results:
        groups.setdefault((row["alpha"], row["component"]), []).append(row)
    reports = []
    for (a, comp), rows in groups.items():
        e = est.weak_exponents(a, tree["sweep"]["p"])[comp]
        hs = [r["h"] for r in rows]
        sq = [r["gradSquare"] for r in rows]
        fit_sq = est.fit_scaling(list(zip(hs, sq)), -2.0 * e, tol)
        ratio_vals = [r["amplitude"] / sqrt(v) for r, v in zip(rows, sq)]
        fit_ratio = est.fit_scaling(list(zip(hs, ratio_vals)), e, tol / 2)
        sup, inf = est.empirical_constant([r["amplitude"] for r in rows],
                                          [h ** e * sqrt(v) for h, v in zip(hs, sq)])
        table = [{"h": r["h"], "sigma": r["sigma"], "lhs": r["amplitude"],
                  "rhs": h ** e * sqrt(v), "ratio": r["amplitude"] / (h ** e * sqrt(v)),
                  "gradSquare": v} for r, h, v in zip(rows, hs, sq)]
        summary = {"alpha": a, "component": comp, "gradSquareFit": fit_sq.as_dict(),
                   "ratioFit": fit_ratio.as_dict(), "supRatio": sup, "infRatio": inf,
                   "spread": sup / inf, "spreadPass": sup / inf <= 10.0}
        reports.append(Report("scaling", f"scaling-{comp}-alpha{a:g}", summary, table,
                              fit_sq.passed and sup / inf <= 10.0))
    return reports


# ---------------------------------------------------------------------------
# fluid-only cylinder comparison
# ---------------------------------------------------------------------------

LEMMA_FIELDS = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0))


def lemma_point(tree, alpha, h, amps):
    geom = _geometry(tree, alpha)
    state = GapState(h, tree["geometry"]["H"])
    sigma = _sigma(tree, h, alpha)
    f = _field(tree, "example4", amps, geom, state, sigma)
    cfg = quadrature_config(tree)
    dom = DomainSpec.full_cylinder(geom, state, sigma)
    full = lp_gradient_integral(f, dom, 2.0, cfg, restrict_to_fluid=False).value
    fluid = lp_gradient_integral(f, dom, 2.0, cfg, restrict_to_fluid=True).value
    g = tree["geometry"]
    gn = sqrt(fluid)
    ratios = []
    if amps[0]:
        ratios.append(amps[0] / est.weak_rhs_sigma("u3", sigma, h, g["k"], alpha, 2.0, gn))
    if amps[1]:
        ratios.append(amps[1] / est.weak_rhs_sigma("om3", sigma, h, g["k"], alpha, 2.0, gn))
    return {"alpha": alpha, "h": h, "hdot": amps[0], "omega3": amps[1], "sigma": sigma,
            "lhs": full, "fluid": fluid, "cwRatio": max(ratios)}


def lemma_tasks(tree):
    return [(lemma_point, dict(tree=tree, alpha=a, h=h, amps=amps))
            for a in tree["sweep"]["alphas"] for h in tree["sweep"]["lemma_h"]
            for amps in LEMMA_FIELDS]


def lemma_merge(tree, results):
    g = tree["geometry"]
    measured = max(r["cwRatio"] for r in results)
    c_w = tree["sweep"]["c_w"] if tree["sweep"]["c_w"] is not None else measured
    rows, ledgers = [], []
    for a in tree["sweep"]["alphas"]:
        led = est.ConstantsLedger(a, g["k"], g["sigma0"], g["H"], 2.0, c_w, measured)
        ledgers.append(led.as_dict())
        for r in (r for r in results if r["alpha"] == a):
            lo, hi = led.window(r["h"])
            in_window = lo * (1 - 1e-12) <= r["sigma"] <= hi * (1 + 1e-12)
            ok = r["lhs"] <= 2.0 * r["fluid"] * (1 + 1e-3)
            rows.append({"alpha": a, "h": r["h"], "hdot": r["hdot"], "omega3": r["omega3"],
                         "sigma": r["sigma"], "lhs": r["lhs"], "rhs": 2.0 * r["fluid"],
                         "ratio": r["lhs"] / (2.0 * r["fluid"]), "sigmaStar": hi,
                         "inWindow": in_window, "pass": bool(ok and in_window)})
    summary = {"cwMeasured": measured, "cwUsed": c_w, "ledgers": ledgers}
    return [Report("lemma", "cylinder-lemma", summary, rows, all(r["pass"] for r in rows))]


# ---------------------------------------------------------------------------
# strong estimate and Taylor moments
# ---------------------------------------------------------------------------

def strong_point(tree, h):
    geom = _geometry(tree, 1.0)
    state = GapState(h, tree["geometry"]["H"])
    sigma = _sigma(tree, h, 1.0, "strong")
    f = _field(tree, "example4", (1.0, 0.0), geom, state, sigma)
    cfg = quadrature_config(tree)
    dom = DomainSpec.full_cylinder(geom, state, sigma)
    hess, res = l2_hessian_norm(f, dom, cfg, full=True)
    grad = sqrt(lp_gradient_integral(f, dom, 2.0, cfg, True).value)
    rhs_h = est.strong_rhs_h(h, hess, grad)
    rhs_s = est.strong_rhs_sigma(sigma, h, geom.big_k, hess, radial_symmetric=True)
    return {"h": h, "sigma": sigma, "hessNorm": hess, "gradNorm": grad, "defect": res.defect,
            "lhs": 1.0, "rhs": rhs_h, "ratio": 1.0 / rhs_h, "rhsSigma": rhs_s,
            "ratioSigma": 1.0 / rhs_s}


def taylor_case(tree, quad, cubic, sigma0):
    geom = GapGeometry.polynomial(tuple(quad), tuple(cubic), sigma0=sigma0)
    rows = []
    for rho in (0.1, 0.05, 0.025):
        i1, i2, i3 = taylor_moment_integrals(geom, rho)
        rows.append({"rho": rho, "I1": i1.tolist(), "I2": i2.tolist(), "I3": i3.tolist(),
                     "I1OverRho4": float(np.linalg.norm(i1) / rho ** 4)})
    return {"quad": list(quad), "cubic": list(cubic), "rows": rows}


def strong_tasks(tree):
    tasks = [(strong_point, dict(tree=tree, h=float(h))) for h in _h_grid(tree["sweep"])]
    rng = np.random.default_rng(tree["sweep"]["seed"] + 2)
    for _ in range(10):
        tasks.append((taylor_case, dict(tree=tree, quad=rng.uniform(0.1, 1.0, 3).tolist(),
                                        cubic=rng.uniform(-1.0, 1.0, 4).tolist(), sigma0=0.5)))
    tasks.append((taylor_case, dict(tree=tree, quad=[0.5, 0.0, 0.5],
                                    cubic=[1.0, 0.0, 0.0, 0.0], sigma0=0.5)))
    return tasks


def strong_merge(tree, results):
    pts = [r for r in results if "hessNorm" in r]
    caps = [r for r in results if "rows" in r]
    sup, inf = est.empirical_constant([r["lhs"] for r in pts], [r["rhs"] for r in pts])
    strong = Report("strong", "strong-estimate",
                    {"supRatio": sup, "infRatio": inf, "spread": sup / inf,
                     "maxDefect": max(r["defect"] for r in pts)}, pts, sup / inf <= 10.0)
    worst_i3 = max(abs(x) for c in caps for row in c["rows"] for x in row["I3"])
    worst_i23 = max(abs(row["I2"][2]) for c in caps for row in c["rows"])
    scaled = [row["I1OverRho4"] for row in caps[-1]["rows"]]
    spread = max(scaled) / min(scaled) - 1.0
    rows = [{"quad": c["quad"], "cubic": c["cubic"], **row} for c in caps for row in c["rows"]]
    taylor = Report("taylor", "taylor-moments",
                    {"maxI3": worst_i3, "maxI2Third": worst_i23, "i1Rho4Spread": spread},
                    rows, worst_i3 == 0.0 and worst_i23 <= 1e-10 and spread <= 0.2)
    return [strong, taylor]


# ---------------------------------------------------------------------------
# field hygiene
# ---------------------------------------------------------------------------

def hygiene_case(tree, h):
    g = tree["geometry"]
    geom = _geometry(tree, 1.0)
    state = GapState(h, g["H"])
    f = _field(tree, "example4", (1.0, 1.0), geom, state, 0.0)
    rng = np.random.default_rng(tree["sweep"]["seed"] + 3)
    reach = 2.0 * f.cutoff.rho
    r = reach * np.sqrt(rng.uniform(0.0, 1.0, 100))
    t = rng.uniform(0.0, 2 * pi, 100)
    z = rng.uniform(-0.1, 2.0 * f.cutoff.big_h, 100)
    pts = np.column_stack([r * np.cos(t), r * np.sin(t), z])
    div = np.abs(divergence_residual(f, pts, 1e-4))
    rows = [{"check": "divergence", "x": p.tolist(), "residual": float(d), "tol": 1e-6,
             "pass": bool(d <= 1e-6)} for p, d in zip(pts, div)]
    cfg = quadrature_config(tree)
    for _ in range(10):
        omega = rng.uniform(-1, 1, 3)
        m = RigidMotion(rng.uniform(-1, 1, 3), omega, rng.uniform(-1, 1, 3))
        lo = rng.uniform(-1, 0, 3)
        hi = lo + rng.uniform(0.1, 1.0, 3)
        vol = float(np.prod(hi - lo))
        got = box_gradient_norm(RigidField(m), lo, hi, 2.0, cfg)
        want = sqrt(2.0) * float(np.linalg.norm(omega)) * sqrt(vol)
        rel = abs(got - want) / want
        rows.append({"check": "rigidBox", "lo": lo.tolist(), "hi": hi.tolist(),
                     "residual": rel, "tol": 1e-10, "pass": bool(rel <= 1e-10)})
    return rows


def hygiene_tasks(tree):
    return [(hygiene_case, dict(tree=tree, h=float(tree["sweep"]["h_max"])))]


def hygiene_merge(tree, results):
    rows = results[0]
    div = max(r["residual"] for r in rows if r["check"] == "divergence")
    box = max(r["residual"] for r in rows if r["check"] == "rigidBox")
    return [Report("hygiene", "field-hygiene", {"maxDivergenceResidual": div,
                                                "maxRigidBoxRelError": box},
                   rows, all(r["pass"] for r in rows))]


# ---------------------------------------------------------------------------
# collision family
# ---------------------------------------------------------------------------

def _family(tree):
    c = tree["collide"]
    return dyn.CollisionFamily(c["theta"], c["T"], c["alpha"], c["omega3"])


def trajectory_point(tree, t):
    fam = _family(tree)
    a = fam.alpha
    h = float(fam.h(t))
    hdot, spin = float(fam.hdot(t)), float(fam.spin(t))
    geom = _geometry(tree, a)
    state = GapState(h, tree["geometry"]["H"])
    cfg = quadrature_config(tree)
    sigma = _sigma(tree, h, a)
    f = _field(tree, "example4", (hdot, spin), geom, state, sigma)
    grad = sqrt(lp_gradient_integral(f, DomainSpec.full_cylinder(geom, state, sigma), 2.0,
                                     cfg, True).value)
    e = est.weak_exponents(a, 2.0).e_u3
    out = {"t": t, "h": h, "hdot": hdot, "omega3": spin, "gradNorm": grad,
           "bound": h ** e * grad, "hessNorm": None}
    if a == 1.0:
        s_str = _sigma(tree, h, a, "strong")
        f_str = _field(tree, "example4", (hdot, spin), geom, state, s_str)
        out["hessNorm"] = l2_hessian_norm(f_str, DomainSpec.full_cylinder(geom, state, s_str),
                                          cfg)
    return out


def collide_times(tree):
    c = tree["collide"]
    lo = max(c["T"] - tree["geometry"]["H"] ** (1.0 / c["theta"]), 0.0)
    # gaps from about H/3 down to 1e-3 (in units of T), log-spaced towards contact
    dist = np.logspace(np.log10(c["T"] - lo) - 0.5, -3.0, c["grid"])
    return (c["T"] - dist).tolist()


def collide_tasks(tree):
    return [(trajectory_point, dict(tree=tree, t=t)) for t in collide_times(tree)]


def _hess_interp(ts, hs):
    ts, lh = np.asarray(ts), np.log(hs)

    def fn(t):
        return float(np.exp(np.interp(t, ts, lh)))
    return fn


def blowup_synthetic(big_t=1.0):
    """Model checks of the blow-up functional with closed-form answers."""
    h2 = lambda t: (big_t - t) ** 2
    times = [big_t - 10.0 ** -k for k in range(1, 6)]
    grow = dyn.blowup_partials(h2, lambda t: 1.0 / h2(t), times)
    exact = [log(big_t / (big_t - t)) for t in times]
    finite = dyn.blowup_functional(lambda t: big_t - t, lambda t: 1.0, big_t)
    monotone = bool(np.all(np.diff(grow) > 0))
    rows = [{"case": "hess=1/h, h=(T-t)^2", "t": t, "partial": p, "exact": x}
            for t, p, x in zip(times, grow, exact)]
    rows.append({"case": "hess=1, h=T-t", "t": big_t, "partial": finite,
                 "exact": 2.0 / 3.0 * big_t ** 1.5})
    ok = monotone and grow[-1] > 10.0 and abs(finite - 2.0 / 3.0 * big_t ** 1.5) <= 1e-6
    return rows, ok


def collide_merge(tree, results):
    fam = _family(tree)
    adm = dyn.energy_class_check(fam)
    if adm.grad_square_integrable:
        consistent = adm.cauchy
    elif abs(adm.exponent + 1.0) < 1e-12:
        consistent = all(g >= 0.5 * LN10 for g in adm.growth_per_decade)
    else:
        consistent = all(d1 > d0 for d0, d1 in zip(adm.differences, adm.differences[1:]))
    ts = [r["t"] for r in results]
    partials = []
    if all(r["hessNorm"] for r in results):
        hn = _hess_interp(ts, [r["hessNorm"] for r in results])
        partials = dyn.blowup_partials(lambda t: float(fam.h(t)), hn, ts, ts[0]).tolist()
    dyn.TrajectoryReport(np.array(ts), np.array([r["h"] for r in results]),
                         np.array([r["bound"] for r in results]), np.array(partials), adm)
    rows = [dict(r, blowupPartial=(partials[i] if partials else None))
            for i, r in enumerate(results)]
    summary = {"alpha": fam.alpha, "theta": fam.theta, "T": fam.big_t,
               "admissibility": adm.as_dict(), "admissible": adm.admissible,
               "numericConsistent": bool(consistent)}
    syn_rows, syn_ok = blowup_synthetic(fam.big_t)
    return [Report("collide", "collision-family", summary, rows, bool(consistent)),
            Report("blowup", "blowup-functional", {}, syn_rows, syn_ok)]


SUBCOMMANDS = {
    "verify-identities": (identity_tasks, identity_merge),
    "verify-weak": (weak_tasks, weak_merge),
    "scaling": (scaling_tasks, scaling_merge),
    "lemma-cyl": (lemma_tasks, lemma_merge),
    "verify-strong": (strong_tasks, strong_merge),
    "example4": (hygiene_tasks, hygiene_merge),
    "collide": (collide_tasks, collide_merge),
}
