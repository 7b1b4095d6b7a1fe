"""Torsion solves (-Delta u = 1, u = 0 on the boundary), critical-point
location by damped Newton iteration on the analytic gradient, Hessian
spectra at the maximum, and the exterior-kernel / remainder decomposition
of the punctured-domain solution.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Domain, PuncturedDomain
from .mfs import DEFAULT_CONFIG, HarmonicSolution, MfsConfig, solve_dirichlet

__all__ = [
    "TorsionSolution",
    "CriticalPoint",
    "SpectralReport",
    "EpsilonGuardrailError",
    "MaximumNotFound",
    "solve_torsion",
    "solve_torsion_punctured",
    "find_critical_points",
    "spectral_report",
    "k_epsilon",
    "k_epsilon_gradient",
    "l_epsilon_numeric",
]

EPS_GUARDRAIL = 1e-9


class EpsilonGuardrailError(ValueError):
    """Hole radius below the double-precision honesty guardrail."""


class MaximumNotFound(RuntimeError):
    def __init__(self, message, best_candidate=None, residual=None):
        super().__init__(message)
        self.best_candidate = best_candidate
        self.residual = residual


@dataclass(frozen=True)
class TorsionSolution:
    """u(x) = -|x - center|^2 / 4 + h(x) with h harmonic; -Delta u = 1
    holds structurally and u = 0 on the boundary up to the certificate."""

    domain: Domain | PuncturedDomain
    center: np.ndarray
    harmonic: HarmonicSolution

    @property
    def certificate(self) -> float:
        return self.harmonic.certificate

    @property
    def status(self) -> str:
        return self.harmonic.status

    def value(self, x) -> float:
        d = np.asarray(x, dtype=float) - self.center
        return float(-(d @ d) / 4.0 + self.harmonic.value(x))

    def gradient(self, x) -> np.ndarray:
        d = np.asarray(x, dtype=float) - self.center
        return -d / 2.0 + self.harmonic.gradient(x)

    def hessian(self, x) -> np.ndarray:
        return np.diag([-0.5, -0.5]) + self.harmonic.hessian(x)


@dataclass(frozen=True)
class CriticalPoint:
    location: np.ndarray
    kind: str  # maximum | saddle | minimum | degenerate
    gradient_norm: float
    hessian: np.ndarray
    eigenvalues: np.ndarray    # descending: lambda1 >= lambda2
    eigenvectors: np.ndarray   # columns matching eigenvalues
    value: float
    degenerate: bool


@dataclass(frozen=True)
class SpectralReport:
    eps: float
    x_eps: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    lambda_max: float
    predicted_lambda_limit: float
    predicted_xeps_radius: float
    lambda_discrepancy: float
    xeps_radius_discrepancy: float
    diam_inrad_ratio: float
    boundary_residual: float
    gradient_residual: float
    maxima_count: int


def solve_torsion(d: Domain, cfg: MfsConfig = DEFAULT_CONFIG) -> TorsionSolution:
    """u = -|x - xc|^2/4 + h, with h fitted to |x - xc|^2/4 on the boundary;
    xc is the domain centroid."""
    xc = d.centroid()

    def data(p):
        dp = p - xc
        return float((dp @ dp) / 4.0)

    return TorsionSolution(domain=d, center=xc, harmonic=solve_dirichlet(d, data, cfg))


def solve_torsion_punctured(pd: PuncturedDomain, cfg: MfsConfig = DEFAULT_CONFIG) -> TorsionSolution:
    if pd.hole_radius < EPS_GUARDRAIL:
        raise EpsilonGuardrailError(
            f"hole radius {pd.hole_radius:g} below guardrail {EPS_GUARDRAIL:g}")
    xc = pd.centroid()

    def data(p):
        dp = p - xc
        return float((dp @ dp) / 4.0)

    return TorsionSolution(domain=pd, center=xc,
                           harmonic=solve_dirichlet(pd, data, cfg))


# -- critical point search ----------------------------------------------------

_DEG_TOL = 1e-6


def _newton(u: TorsionSolution, x0, tol, max_iter=50):
    x = np.asarray(x0, dtype=float).copy()
    d = u.domain
    g = u.gradient(x)
    gn = float(np.hypot(*g))
    for _ in range(max_iter):
        if gn <= tol:
            return x, gn
        H = u.hessian(x)
        try:
            step = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, -g, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            return None
        # damp: keep inside the domain and do not let |grad| grow
        for _halving in range(30):
            x_new = x + step
            if d.contains(x_new):
                g_new = u.gradient(x_new)
                gn_new = float(np.hypot(*g_new))
                if gn_new < gn or gn_new <= tol:
                    x, g, gn = x_new, g_new, gn_new
                    break
            step = 0.5 * step
        else:
            return None
    return (x, gn) if gn <= tol else None


def _start_points(u: TorsionSolution):
    d = u.domain
    base = d.base if isinstance(d, PuncturedDomain) else d
    inrad = base.inradius()
    diam = base.diameter()
    c = base.centroid()
    pitch = inrad / 10.0
    half = 0.5 * diam
    n = int(np.ceil(2 * half / pitch)) + 1
    ax = c[0] + np.linspace(-half, half, n)
    ay = c[1] + np.linspace(-half, half, n)
    starts = []
    for x in ax:
        for y in ay:
            p = np.array([x, y])
            if d.contains(p):
                starts.append(p)
    if isinstance(d, PuncturedDomain):
        eps = d.hole_radius
        radii = [2.0 * eps, float(np.sqrt(eps * diam))]
        # the maxima of the punctured problem live at scale 1/sqrt(|log eps|)
        radii.append(min(0.75 * inrad, 1.0 / np.sqrt(abs(np.log(eps)))))
        for r in radii:
            for phi in 2.0 * np.pi * np.arange(16) / 16:
                p = d.hole_center + r * np.array([np.cos(phi), np.sin(phi)])
                if d.contains(p):
                    starts.append(p)
    return starts


def _classify(eigvals) -> tuple[str, bool]:
    lam1, lam2 = eigvals  # descending
    degenerate = bool(np.any(np.abs(eigvals) < _DEG_TOL))
    if abs(lam1) < _DEG_TOL and abs(lam2) < _DEG_TOL:
        return "degenerate", True
    if lam1 < _DEG_TOL and lam2 < _DEG_TOL:
        return "maximum", degenerate
    if lam1 > -_DEG_TOL and lam2 > -_DEG_TOL:
        return "minimum", degenerate
    return "saddle", degenerate


def find_critical_points(u: TorsionSolution, tol_factor: float = 1e-11,
                         max_iter: int = 50) -> list[CriticalPoint]:
    """Multi-start damped Newton on grad u = 0 with analytic derivatives.

    Starts on a grid of pitch inradius/10 plus, for punctured domains, rings
    around the hole at radii {2 eps, sqrt(eps diam), ~1/sqrt(|log eps|)}.
    Converged points are deduplicated at distance 1e-7 * diam and classified
    by the Hessian eigenvalue signs (|lambda| < 1e-6 counts as degenerate).
    """
    d = u.domain
    starts = _start_points(u)
    if not starts:
        raise MaximumNotFound("no admissible start points")
    u_scale = max(abs(u.value(p)) for p in starts)
    tol = tol_factor * max(u_scale, 1e-3)
    found = []
    best, best_res = None, np.inf
    for p in starts:
        result = _newton(u, p, tol, max_iter)
        if result is None:
            continue
        x, gn = result
        if not d.contains(x):
            continue
        if gn < best_res:
            best, best_res = x, gn
        found.append((x, gn))
    # deterministic dedup: sort, then cluster
    found.sort(key=lambda t: (round(t[0][0], 12), round(t[0][1], 12)))
    dedup_tol = 1e-7 * (d.diameter() if hasattr(d, "diameter") else 1.0)
    reps: list[tuple[np.ndarray, float]] = []
    for x, gn in found:
        if any(np.hypot(*(x - r[0])) < dedup_tol for r in reps):
            continue
        reps.append((x, gn))
    points = []
    for x, gn in reps:
        H = u.hessian(x)
        H = 0.5 * (H + H.T)
        vals, vecs = np.linalg.eigh(H)
        order = np.argsort(vals)[::-1]
        vals, vecs = vals[order], vecs[:, order]
        kind, degenerate = _classify(vals)
        points.append(CriticalPoint(
            location=x, kind=kind, gradient_norm=gn, hessian=H,
            eigenvalues=vals, eigenvectors=vecs, value=u.value(x),
            degenerate=degenerate))
    if not any(p.kind == "maximum" for p in points):
        raise MaximumNotFound("maximum not found",
                              best_candidate=best, residual=best_res)
    return points


def select_maximum(points: list[CriticalPoint]) -> CriticalPoint:
    """Largest u value, ties (within float noise) broken lexicographically."""
    maxima = [p for p in points if p.kind == "maximum"]
    if not maxima:
        raise MaximumNotFound("no maximum among critical points")
    v_best = max(p.value for p in maxima)
    tied = [p for p in maxima if p.value >= v_best - 1e-12 * max(abs(v_best), 1.0)]
    tied.sort(key=lambda p: (p.location[0], p.location[1]))
    return tied[0]


def spectral_report(u: TorsionSolution, predicted_lambda_limit: float,
                    predicted_xeps_radius: float,
                    points: list[CriticalPoint] | None = None) -> SpectralReport:
    """Assemble the Hessian spectrum at the chosen maximum of u together
    with the asymptotic predictions and their discrepancies."""
    pd = u.domain
    if not isinstance(pd, PuncturedDomain):
        raise TypeError("spectral_report expects a punctured-domain solution")
    if points is None:
        points = find_critical_points(u)
    top = select_maximum(points)
    lam_max = float(top.eigenvalues[0])
    radius = float(np.hypot(*(top.location - pd.hole_center)))
    return SpectralReport(
        eps=pd.hole_radius,
        x_eps=top.location,
        eigenvalues=top.eigenvalues,
        eigenvectors=top.eigenvectors,
        lambda_max=lam_max,
        predicted_lambda_limit=predicted_lambda_limit,
        predicted_xeps_radius=predicted_xeps_radius,
        lambda_discrepancy=lam_max - predicted_lambda_limit,
        xeps_radius_discrepancy=radius - predicted_xeps_radius,
        diam_inrad_ratio=pd.diameter() / pd.inradius(),
        boundary_residual=u.certificate,
        gradient_residual=top.gradient_norm,
        maxima_count=sum(1 for p in points if p.kind == "maximum"),
    )


# -- exterior-kernel decomposition --------------------------------------------

def k_epsilon(u0, x0, eps: float, w) -> float:
    """Exterior-disk kernel contribution at the rescaled point w, |w| >= 1:
    -u0(x0 + eps w / |w|^2) + (eps^2 / 2)(1 - 1/|w|^2).

    u0 is the unpunctured torsion solution (anything with .value) or a
    plain callable."""
    w = np.asarray(w, dtype=float)
    w2 = float(w @ w)
    if w2 < 1.0 - 1e-12:
        raise ValueError("k_epsilon requires |w| >= 1")
    x0 = np.asarray(x0, dtype=float)
    u0_val = u0.value if hasattr(u0, "value") else u0
    return float(-u0_val(x0 + eps * w / w2) + 0.5 * eps * eps * (1.0 - 1.0 / w2))


def k_epsilon_gradient(u0, x0, eps: float, w) -> np.ndarray:
    """Exact w-gradient of k_epsilon (chain rule through the inversion)."""
    w = np.asarray(w, dtype=float)
    w2 = float(w @ w)
    if w2 < 1.0 - 1e-12:
        raise ValueError("k_epsilon requires |w| >= 1")
    x0 = np.asarray(x0, dtype=float)
    grad_u0 = u0.gradient if hasattr(u0, "gradient") else u0
    g = np.asarray(grad_u0(x0 + eps * w / w2), dtype=float)
    # d/dw_i of eps w/|w|^2 = (eps/|w|^2)(delta - 2 w w^T/|w|^2)
    jac = (eps / w2) * (np.eye(2) - 2.0 * np.outer(w, w) / w2)
    return -jac.T @ g + eps * eps * w / (w2 * w2)


def l_epsilon_numeric(u_eps, u0, x0, eps: float, w) -> float:
    """Remainder of the decomposition u_eps = u0 + K_eps + L_eps, computed
    as the residual at x = x0 + eps w."""
    w = np.asarray(w, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    x = x0 + eps * w
    ue = u_eps.value if hasattr(u_eps, "value") else u_eps
    u0_val = u0.value if hasattr(u0, "value") else u0
    return float(ue(x) - u0_val(x) - k_epsilon(u0, x0, eps, w))
