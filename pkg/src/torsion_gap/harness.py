"""Sweep driver, convergence-rate fitting, report emission and the named
verification suites."""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import exact
from .asymptotics import (AsymptoticInputs, predict_capacity, predict_gradient,
                          predict_hessian, predict_limit_lambda_max, predict_u,
                          predict_xeps, theorem_a_rhs)
from .geometry import Disk, Domain, Ellipse, PuncturedDomain
from .mfs import DEFAULT_CONFIG, MfsConfig, capacity_numeric, green_numeric
from .torsion import (TorsionSolution, find_critical_points, l_epsilon_numeric,
                      select_maximum, solve_torsion, solve_torsion_punctured,
                      spectral_report)

__all__ = [
    "SweepConfig",
    "SweepRow",
    "CSV_HEADER",
    "parse_eps_ladder",
    "format_eps_ladder",
    "sweep",
    "fit_rate",
    "extrapolate_log_limit",
    "emit",
    "parse_rows",
    "verify",
    "SUITES",
]

CSV_HEADER = ("eps,xeps_x,xeps_y,lambda1,lambda2,lambda_max,pred_lambda_limit,"
              "pred_xeps_radius,boundary_residual,gradient_residual,diam_inrad")

_COLUMNS = CSV_HEADER.split(",")


def parse_eps_ladder(text: str) -> tuple[float, ...]:
    """Parse an epsilon list: either comma-separated values or a geometric
    ladder 'start..stop/k' (k points per decade, e.g. '1e-2..1e-8/2' or
    '1e-2..1e-8/2-per-decade')."""
    text = text.strip()
    if ".." in text:
        rng, _, per = text.partition("/")
        start_s, _, stop_s = rng.partition("..")
        start, stop = float(start_s), float(stop_s)
        per = per.removesuffix("-per-decade") or "1"
        k = int(per)
        if not (start > stop > 0 and k >= 1):
            raise ValueError(f"malformed epsilon ladder: {text!r}")
        n = int(round((np.log10(start) - np.log10(stop)) * k)) + 1
        values = 10.0 ** np.linspace(np.log10(start), np.log10(stop), n)
        return tuple(float(v) for v in values)
    return tuple(float(v) for v in text.split(","))


def format_eps_ladder(values) -> str:
    return ",".join(repr(float(v)) for v in values)


@dataclass(frozen=True)
class SweepConfig:
    domain: Domain
    hole_center: np.ndarray
    eps_values: tuple
    mfs: MfsConfig = DEFAULT_CONFIG

    def __post_init__(self):
        object.__setattr__(self, "hole_center", np.asarray(self.hole_center, dtype=float))
        object.__setattr__(self, "eps_values", tuple(float(v) for v in self.eps_values))
        eps = self.eps_values
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("epsilon values must be strictly decreasing")
        upper = 0.2 * self.domain.inradius()
        if eps and (eps[-1] < 1e-9 or eps[0] > upper):
            raise ValueError(f"epsilon values must lie within [1e-9, {upper:g}]")


@dataclass(frozen=True)
class SweepRow:
    eps: float
    xeps_x: float
    xeps_y: float
    lambda1: float
    lambda2: float
    lambda_max: float
    pred_lambda_limit: float
    pred_xeps_radius: float
    boundary_residual: float
    gradient_residual: float
    diam_inrad: float
    flagged: bool = field(default=False, compare=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("flagged")
        return d


def base_asymptotic_inputs(domain: Domain, hole_center, eps: float,
                           cfg: MfsConfig = DEFAULT_CONFIG,
                           u0: TorsionSolution | None = None) -> tuple[AsymptoticInputs, TorsionSolution]:
    """Assemble the asymptotic inputs of the unpunctured problem: maximum
    point y0 of u0, its Hessian eigenpairs, and the regular part of the
    Green's function at the hole center."""
    hole_center = np.asarray(hole_center, dtype=float)
    if u0 is None:
        u0 = solve_torsion(domain, cfg)
    top = select_maximum(find_critical_points(u0))
    lam1, lam2 = float(top.eigenvalues[0]), float(top.eigenvalues[1])
    if isinstance(domain, Disk) and np.allclose(domain.center, hole_center):
        h00 = exact.disk_green_regular(domain.radius,
                                       hole_center - domain.center,
                                       hole_center - domain.center)
    else:
        h00 = green_numeric(domain, hole_center, cfg).regular.value(hole_center)
    inputs = AsymptoticInputs(
        u0_at_x0=u0.value(hole_center),
        lambda1=lam1, lambda2=lam2,
        v1=top.eigenvectors[:, 0], v2=top.eigenvectors[:, 1],
        x0=hole_center, y0=top.location, eps=eps,
        H_x0x0=float(h00), diam=domain.diameter())
    return inputs, u0


def _compute_row(cfg: SweepConfig, eps: float, u0: TorsionSolution,
                 inputs_proto: AsymptoticInputs) -> SweepRow:
    inputs = replace(inputs_proto, eps=eps)
    pred_limit = predict_limit_lambda_max(inputs)
    if inputs.hole_at_maximum:
        pred_radius = predict_xeps(inputs).radius
    else:
        pred_radius = float("nan")
    try:
        pd = PuncturedDomain(cfg.domain, cfg.hole_center, eps)
        u_eps = solve_torsion_punctured(pd, cfg.mfs)
        rep = spectral_report(u_eps, pred_limit, pred_radius)
    except Exception:
        return SweepRow(eps=eps, xeps_x=float("nan"), xeps_y=float("nan"),
                        lambda1=float("nan"), lambda2=float("nan"),
                        lambda_max=float("nan"), pred_lambda_limit=pred_limit,
                        pred_xeps_radius=pred_radius,
                        boundary_residual=float("nan"),
                        gradient_residual=float("nan"),
                        diam_inrad=float("nan"), flagged=True)
    return SweepRow(
        eps=eps,
        xeps_x=float(rep.x_eps[0]), xeps_y=float(rep.x_eps[1]),
        lambda1=float(rep.eigenvalues[0]), lambda2=float(rep.eigenvalues[1]),
        lambda_max=rep.lambda_max,
        pred_lambda_limit=pred_limit,
        pred_xeps_radius=pred_radius,
        boundary_residual=rep.boundary_residual,
        gradient_residual=rep.gradient_residual,
        diam_inrad=rep.diam_inrad_ratio,
        flagged=(u_eps.status != "converged"),
    )


def _n_workers() -> int:
    env = os.environ.get("TORSION_GAP_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def sweep(cfg: SweepConfig) -> list[SweepRow]:
    """One row per epsilon, computed independently (worker pool, results
    re-collected in input order).  Failed solves produce flagged rows."""
    inputs_proto, u0 = base_asymptotic_inputs(
        cfg.domain, cfg.hole_center, cfg.eps_values[0], cfg.mfs)
    with ThreadPoolExecutor(max_workers=_n_workers()) as pool:
        rows = list(pool.map(
            lambda e: _compute_row(cfg, e, u0, inputs_proto), cfg.eps_values))
    return rows


def fit_rate(pairs) -> tuple[float, float]:
    """Fit err ~ C / |log eps|^p by least squares on log err vs log|log eps|.
    Returns (p, C).  Nonpositive errors are filtered; at least two surviving
    pairs are required."""
    survivors = [(e, r) for e, r in pairs if r > 0.0]
    if len(survivors) < 2:
        raise ValueError("need at least two pairs with positive error")
    L = np.array([abs(np.log(e)) for e, _ in survivors])
    y = np.log([r for _, r in survivors])
    A = np.stack([np.ones(len(L)), -np.log(L)], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[1]), float(np.exp(coef[0]))


def extrapolate_log_limit(eps_values, values, n: int = 4) -> float:
    """Fit v = L + a/|log eps| over the n smallest epsilons; return L."""
    order = np.argsort(eps_values)
    eps = np.asarray(eps_values, dtype=float)[order][:n]
    v = np.asarray(values, dtype=float)[order][:n]
    L = np.abs(np.log(eps))
    A = np.stack([np.ones(len(L)), 1.0 / L], axis=1)
    coef, *_ = np.linalg.lstsq(A, v, rcond=None)
    return float(coef[0])


# -- emission ------------------------------------------------------------------

def emit(rows, fmt: str, path) -> None:
    """Write sweep rows as CSV (fixed header, shortest round-trip floats,
    input order) or as a JSON array of objects with identical keys."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unsupported format: {fmt!r}")
    if fmt == "csv":
        lines = [CSV_HEADER]
        for row in rows:
            d = row.to_dict()
            lines.append(",".join(repr(float(d[c])) for c in _COLUMNS))
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps([row.to_dict() for row in rows], indent=2) + "\n"
    with open(path, "w") as fh:
        fh.write(text)


def parse_rows(path) -> list[SweepRow]:
    """Read rows back from a CSV or JSON file produced by emit."""
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("["):
        return [SweepRow(**d) for d in json.loads(text)]
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if lines[0] != CSV_HEADER:
        raise ValueError("unexpected CSV header")
    rows = []
    for ln in lines[1:]:
        vals = [float(v) for v in ln.split(",")]
        rows.append(SweepRow(**dict(zip(_COLUMNS, vals))))
    return rows


# -- verification suites -------------------------------------------------------

@dataclass(frozen=True)
class Criterion:
    name: str
    measured: float
    threshold: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _interior_points_disk(rng, n, radius=1.0, margin=0.02):
    r = radius * np.sqrt(rng.uniform(0, (1 - margin) ** 2, n))
    th = rng.uniform(0, 2 * np.pi, n)
    return np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)


def _interior_points_ellipse(rng, n, a=2.0, b=1.0, margin=0.02):
    r = np.sqrt(rng.uniform(0, (1 - margin) ** 2, n))
    th = rng.uniform(0, 2 * np.pi, n)
    return np.stack([a * r * np.cos(th), b * r * np.sin(th)], axis=-1)


def _suite_oracles(mfs: MfsConfig) -> list[Criterion]:
    rng = np.random.default_rng(20240817)
    out = []
    disk = Disk(center=(0, 0), radius=1.0)
    u = solve_torsion(disk, mfs)
    pts = _interior_points_disk(rng, 100)
    err = max(abs(u.value(p) - exact.disk_torsion(1.0, p)) for p in pts)
    out.append(Criterion("oracle-disk-torsion", err, 1e-10, err <= 1e-10))

    ell = Ellipse(center=(0, 0), a=2.0, b=1.0)
    ue = solve_torsion(ell, mfs)
    pts = _interior_points_ellipse(rng, 100)
    err = max(abs(ue.value(p) - exact.ellipse_torsion(2.0, 1.0, p)) for p in pts)
    out.append(Criterion("oracle-ellipse-torsion", err, 1e-9, err <= 1e-9))

    for eps in (1e-1, 1e-2, 1e-4, 1e-6):
        pd = PuncturedDomain(disk, (0.0, 0.0), eps)
        ua = solve_torsion_punctured(pd, mfs)
        rr = np.exp(rng.uniform(np.log(eps * 1.01), np.log(0.99), 100))
        th = rng.uniform(0, 2 * np.pi, 100)
        err = max(abs(ua.value(np.array([r * np.cos(t), r * np.sin(t)]))
                      - float(exact.annulus_torsion(eps, r)))
                  for r, t in zip(rr, th))
        out.append(Criterion(f"oracle-annulus-torsion-eps={eps:g}", err, 1e-9, err <= 1e-9))
    return out


def _suite_annulus(mfs: MfsConfig) -> list[Criterion]:
    out = []
    disk = Disk(center=(0, 0), radius=1.0)
    for eps in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
        pd = PuncturedDomain(disk, (0.0, 0.0), eps)
        u = solve_torsion_punctured(pd, mfs)
        top = select_maximum(find_critical_points(u))
        lam_max = float(top.eigenvalues[0])
        out.append(Criterion(f"annulus-lambda-max-eps={eps:g}", abs(lam_max),
                             1e-7, abs(lam_max) <= 1e-7))
        r = float(np.hypot(*top.location))
        gap = abs(r - exact.annulus_max_radius(eps))
        out.append(Criterion(f"annulus-max-radius-eps={eps:g}", gap, 1e-8, gap <= 1e-8))
    return out


def _centered_ellipse_rows(mfs: MfsConfig, eps_values):
    ell = Ellipse(center=(0, 0), a=2.0, b=1.0)
    cfg = SweepConfig(domain=ell, hole_center=(0.0, 0.0),
                      eps_values=eps_values, mfs=mfs)
    return sweep(cfg)


def _suite_ellipse_centered(mfs: MfsConfig) -> list[Criterion]:
    eps_values = tuple(10.0 ** -k for k in range(2, 9))
    rows = _centered_ellipse_rows(mfs, eps_values)
    out = []
    last4 = rows[-4:]
    lam = [r.lambda_max for r in last4]
    monotone = all(b > a for a, b in zip(lam, lam[1:]))
    out.append(Criterion("ellipse-centered-lambda-max-monotone",
                         float(monotone), 1.0, monotone,
                         detail=f"last4={lam}"))
    lam_lim = extrapolate_log_limit([r.eps for r in rows], [r.lambda_max for r in rows])
    out.append(Criterion("ellipse-centered-lambda-limit", lam_lim, 0.02,
                         abs(lam_lim - (-0.2)) <= 0.02,
                         detail="target -0.2 (stated limit)"))
    final = rows[-1]
    gap = max(abs(final.lambda1 - (-0.2)), abs(final.lambda2 - (-0.6)))
    out.append(Criterion("ellipse-centered-eigenpair-at-1e-8", gap, 0.05,
                         gap <= 0.05,
                         detail=f"measured=({final.lambda1}, {final.lambda2}), "
                                f"predicted=(-0.2, -0.6)"))
    # maximizer-radius scaling and axis alignment
    scaled = [np.hypot(r.xeps_x, r.xeps_y) * np.sqrt(abs(np.log(r.eps))) for r in rows]
    lim = extrapolate_log_limit([r.eps for r in rows], scaled)
    out.append(Criterion("ellipse-centered-xeps-scaling", lim, 0.1 * np.sqrt(2.0),
                         abs(lim - np.sqrt(2.0)) <= 0.1 * np.sqrt(2.0),
                         detail="target sqrt(2)"))
    worst = max(abs(r.xeps_y) for r in rows if r.eps <= 1e-4)
    out.append(Criterion("ellipse-centered-xeps-axis-alignment", worst, 1e-5,
                         worst <= 1e-5))
    return out


def _suite_offcenter(mfs: MfsConfig) -> list[Criterion]:
    ell = Ellipse(center=(0, 0), a=2.0, b=1.0)
    eps_values = parse_eps_ladder("1e-2..1e-8/2")
    cfg = SweepConfig(domain=ell, hole_center=(0.5, 0.0),
                      eps_values=eps_values, mfs=mfs)
    rows = sweep(cfg)
    out = []
    dist = [np.hypot(r.xeps_x, r.xeps_y) for r in rows]
    decreasing = all(b < a for a, b in zip(dist, dist[1:]))
    out.append(Criterion("offcenter-xeps-decreasing", float(decreasing), 1.0,
                         decreasing, detail=f"|x_eps|={dist}"))
    lam_lim = extrapolate_log_limit([r.eps for r in rows], [r.lambda_max for r in rows])
    out.append(Criterion("offcenter-lambda-limit", lam_lim, 0.02,
                         abs(lam_lim - (-0.2)) <= 0.02, detail="target -0.2"))
    return out


def _suite_capacity(mfs: MfsConfig) -> list[Criterion]:
    disk = Disk(center=(0, 0), radius=1.0)
    x0 = np.array([0.3, 0.0])
    h00 = exact.disk_green_regular(1.0, x0, x0)
    inputs = AsymptoticInputs(
        u0_at_x0=exact.disk_torsion(1.0, x0), lambda1=-0.5, lambda2=-0.5,
        v1=(1, 0), v2=(0, 1), x0=x0, y0=(0, 0), eps=1e-2,
        H_x0x0=h00, diam=2.0)

    class _ExactGreen:
        def value(self, x):
            return exact.disk_green(1.0, x, x0)

    green = _ExactGreen()
    ring = [x0 + 0.3 * np.array([np.cos(t), np.sin(t)])
            for t in 2 * np.pi * np.arange(16) / 16]
    pairs = []
    for eps in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
        pd = PuncturedDomain(disk, x0, eps)
        v = capacity_numeric(pd, mfs)
        inp = replace(inputs, eps=eps)
        err = max(abs(v.value(p) - predict_capacity(inp, green, p)) for p in ring)
        pairs.append((eps, err))
    p, _ = fit_rate(pairs)
    return [Criterion("capacity-expansion-rate", p, 1.7, p >= 1.7,
                      detail=f"pairs={pairs}")]


def _suite_expansions(mfs: MfsConfig) -> list[Criterion]:
    out = []
    disk = Disk(center=(0, 0), radius=1.0)
    ell = Ellipse(center=(0, 0), a=2.0, b=1.0)
    angles = 2 * np.pi * np.arange(8) / 8
    ring = np.stack([np.cos(angles), np.sin(angles)], axis=-1)

    for name, dom, u0_at_x0 in (("annulus", disk, 0.25), ("ellipse", ell, 0.4)):
        inputs0, u0 = base_asymptotic_inputs(dom, (0.0, 0.0), 1e-4, mfs)
        errs = []
        for eps in (1e-4, 1e-6, 1e-8):
            pd = PuncturedDomain(dom, (0.0, 0.0), eps)
            ue = solve_torsion_punctured(pd, mfs)
            inp = replace(inputs0, eps=eps)
            r = np.sqrt(eps)
            errs.append(max(abs(ue.value(r * q) - predict_u(inp, u0, r * q))
                            for q in ring))
        decreasing = all(b < a for a, b in zip(errs, errs[1:]))
        final_ok = errs[-1] <= 0.02 * u0_at_x0
        out.append(Criterion(f"predict-u-{name}-decreasing", float(decreasing),
                             1.0, decreasing, detail=f"errs={errs}"))
        out.append(Criterion(f"predict-u-{name}-final", errs[-1],
                             0.02 * u0_at_x0, final_ok))

    # remainder profile: L_eps |log eps| / ln|w| -> u0(x0) for the annulus
    eps = 1e-6
    pd = PuncturedDomain(disk, (0.0, 0.0), eps)
    ue = solve_torsion_punctured(pd, mfs)
    u0d = solve_torsion(disk, mfs)
    w = np.array([1.0 / np.sqrt(eps), 0.0])
    val = l_epsilon_numeric(ue, u0d, (0.0, 0.0), eps, w)
    scaled = val * abs(np.log(eps)) / np.log(np.hypot(*w))
    out.append(Criterion("l-eps-profile-annulus", scaled, 0.02 * 0.25,
                         abs(scaled - 0.25) <= 0.02 * 0.25, detail="target 0.25"))

    # gradient/Hessian predictors vs the closed-form annulus
    eps, r = 1e-3, 0.05
    inputs = AsymptoticInputs(u0_at_x0=0.25, lambda1=-0.5, lambda2=-0.5,
                              v1=(1, 0), v2=(0, 1), x0=(0, 0), y0=(0, 0),
                              eps=eps, H_x0x0=0.0, diam=2.0)
    x = np.array([r, 0.0])
    g_pred = predict_gradient(
        inputs, lambda q: np.array([-q[0] / 2, -q[1] / 2]), x)
    g_exact = float(exact.annulus_torsion_d1(eps, r))
    g_gap = abs(g_pred[0] - g_exact)
    out.append(Criterion("predict-gradient-annulus", g_gap, 1e-3, g_gap <= 1e-3))
    h_pred = predict_hessian(inputs, lambda q: np.diag([-0.5, -0.5]), x)
    h_exact = np.diag([float(exact.annulus_torsion_d2(eps, r)),
                       float(-0.5 + exact.annulus_log_coefficient(eps) / (r * r))])
    h_gap = float(np.max(np.abs(h_pred - h_exact)))
    out.append(Criterion("predict-hessian-annulus", h_gap, 1e-3, h_gap <= 1e-3))

    # near-hole gradient lower bound at |x - x0| = 1.5 eps
    for name, dom, u0_at_x0 in (("annulus", disk, 0.25), ("ellipse", ell, 0.4)):
        worst_margin = np.inf
        for eps in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8):
            bound = u0_at_x0 / (8.0 * eps * abs(np.log(eps)))
            if name == "annulus":
                gn = abs(float(exact.annulus_torsion_d1(eps, 1.5 * eps)))
            else:
                pd = PuncturedDomain(dom, (0.0, 0.0), eps)
                ue = solve_torsion_punctured(pd, mfs)
                gn = min(float(np.hypot(*ue.gradient(1.5 * eps * q))) for q in ring)
            worst_margin = min(worst_margin, gn / bound)
        out.append(Criterion(f"near-hole-gradient-bound-{name}", worst_margin,
                             1.0, worst_margin >= 1.0,
                             detail="min |grad u|/bound over the ladder"))
    return out


def _suite_counterexample(mfs: MfsConfig, c1: float = 1.0, c2: float = 1.0) -> list[Criterion]:
    disk = Disk(center=(0, 0), radius=1.0)
    witness = []
    ok_ratio, ok_lambda, ok_violation = True, True, True
    for eps in (0.02, 0.01, 0.005, 0.002, 0.001):
        pd = PuncturedDomain(disk, (0.0, 0.0), eps)
        u = solve_torsion_punctured(pd, mfs)
        top = select_maximum(find_critical_points(u))
        lam_max = float(top.eigenvalues[0])
        ratio = pd.diameter() / pd.inradius()
        bound = theorem_a_rhs(c1, c2, pd)
        violated = bool(lam_max > bound) and bound < 0.0
        witness.append({"eps": eps, "diam_inrad": ratio, "lambda_max": lam_max,
                        "bound": bound, "violated": violated})
        ok_ratio &= ratio <= 4.1
        ok_lambda &= abs(lam_max) <= 1e-7
        ok_violation &= violated
    out = [
        Criterion("counterexample-ratio-bounded",
                  max(w["diam_inrad"] for w in witness), 4.1, ok_ratio),
        Criterion("counterexample-lambda-max-zero",
                  max(abs(w["lambda_max"]) for w in witness), 1e-7, ok_lambda),
        Criterion("counterexample-bound-violated", float(ok_violation), 1.0,
                  ok_violation, detail=json.dumps(witness)),
    ]
    return out


SUITES = {
    "oracles": _suite_oracles,
    "annulus": _suite_annulus,
    "ellipse-centered": _suite_ellipse_centered,
    "offcenter": _suite_offcenter,
    "capacity": _suite_capacity,
    "expansions": _suite_expansions,
    "counterexample": _suite_counterexample,
}


def verify(suite: str, mfs: MfsConfig = DEFAULT_CONFIG,
           c1: float = 1.0, c2: float = 1.0) -> dict:
    """Run a named verification suite (or 'all'); returns a JSON-ready report
    with each criterion's measured value, threshold and verdict."""
    if suite == "all":
        names = list(SUITES)
    elif suite in SUITES:
        names = [suite]
    else:
        raise ValueError(f"unknown suite {suite!r};"
                         f" choose from {sorted(SUITES)} or 'all'")
    criteria = []
    for name in names:
        fn = SUITES[name]
        got = fn(mfs, c1, c2) if name == "counterexample" else fn(mfs)
        criteria.extend(got)
    return {
        "suite": suite,
        "criteria": [c.to_dict() for c in criteria],
        "passed": all(c.passed for c in criteria),
    }
