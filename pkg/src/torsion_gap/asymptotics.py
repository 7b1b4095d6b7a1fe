"""Leading-order asymptotic predictors for the small-hole torsion problem.

Every predictor evaluates a displayed formula with all o(1)/O(.) remainders
dropped; discrepancies against solver output quantify those remainders.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "AsymptoticInputs",
    "XepsPrediction",
    "predict_capacity",
    "predict_u",
    "predict_gradient",
    "predict_hessian",
    "predict_xeps",
    "predict_limit_lambda_max",
    "predict_hessian_at_max",
    "theorem_a_rhs",
]

_COINCIDENCE_RTOL = 1e-9
_DEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class AsymptoticInputs:
    """Data of the unpunctured problem entering the predictors: value of u0
    at the hole center, Hessian eigenpairs of u0 at its maximum y0
    (lambda1 >= lambda2), the geometry x0 / y0 / eps, the regular part of
    the Green's function at the hole center, and the domain diameter."""

    u0_at_x0: float
    lambda1: float
    lambda2: float
    v1: np.ndarray
    v2: np.ndarray
    x0: np.ndarray
    y0: np.ndarray
    eps: float
    H_x0x0: float
    diam: float

    def __post_init__(self):
        object.__setattr__(self, "v1", np.asarray(self.v1, dtype=float))
        object.__setattr__(self, "v2", np.asarray(self.v2, dtype=float))
        object.__setattr__(self, "x0", np.asarray(self.x0, dtype=float))
        object.__setattr__(self, "y0", np.asarray(self.y0, dtype=float))
        if abs(self.lambda1 + self.lambda2 + 1.0) > 1e-8:
            raise ValueError("eigenvalues must sum to -1 (trace identity)")
        if abs(np.hypot(*self.v1) - 1.0) > 1e-10 or abs(np.hypot(*self.v2) - 1.0) > 1e-10:
            raise ValueError("eigenvectors must be unit vectors")
        if abs(float(self.v1 @ self.v2)) > 1e-10:
            raise ValueError("eigenvectors must be orthogonal")
        if self.lambda1 < self.lambda2:
            raise ValueError("eigenvalues must be ordered lambda1 >= lambda2")

    @property
    def hole_at_maximum(self) -> bool:
        return bool(np.hypot(*(self.x0 - self.y0)) <= _COINCIDENCE_RTOL * self.diam)

    @property
    def log_eps_abs(self) -> float:
        return float(abs(np.log(self.eps)))


def predict_capacity(inputs: AsymptoticInputs, green, x) -> float:
    """Two-term capacity expansion
    -(2 pi / log eps)(1 - 2 pi H(x0,x0)/log eps) G(x, x0)."""
    log_eps = float(np.log(inputs.eps))
    g = green.value(x) if hasattr(green, "value") else green(x)
    return float(-(2.0 * np.pi / log_eps)
                 * (1.0 - 2.0 * np.pi * inputs.H_x0x0 / log_eps) * g)


def predict_u(inputs: AsymptoticInputs, u0, x) -> float:
    """u0(x) + (log|x - x0| / |log eps|) u0(x0)."""
    x = np.asarray(x, dtype=float)
    r = float(np.hypot(*(x - inputs.x0)))
    u0_val = u0.value if hasattr(u0, "value") else u0
    return float(u0_val(x) + np.log(r) / inputs.log_eps_abs * inputs.u0_at_x0)


def _check_validity_annulus(inputs: AsymptoticInputs, x) -> tuple[np.ndarray, float]:
    x = np.asarray(x, dtype=float)
    r = float(np.hypot(*(x - inputs.x0)))
    if r < 10.0 * inputs.eps or r > 0.2 * inputs.diam:
        raise ValueError(
            f"point at distance {r:g} outside the validity annulus "
            f"[{10 * inputs.eps:g}, {0.2 * inputs.diam:g}]")
    return x, r


def predict_gradient(inputs: AsymptoticInputs, grad_u0, x) -> np.ndarray:
    """grad u0(x) + u0(x0) (x - x0) / (|log eps| |x - x0|^2), valid for
    10 eps <= |x - x0| <= 0.2 diam."""
    x, r = _check_validity_annulus(inputs, x)
    g0 = np.asarray(grad_u0(x), dtype=float)
    d = x - inputs.x0
    return g0 + inputs.u0_at_x0 * d / (inputs.log_eps_abs * r * r)


def predict_hessian(inputs: AsymptoticInputs, hess_u0, x) -> np.ndarray:
    """Hessian of u0 plus the trace-free log-profile correction
    u0(x0)/(|log eps| r^2) (I - 2 rhat rhat^T); the predicted trace is -1
    exactly."""
    x, r = _check_validity_annulus(inputs, x)
    h0 = np.asarray(hess_u0(x), dtype=float)
    d = (x - inputs.x0) / r
    corr = (np.eye(2) - 2.0 * np.outer(d, d)) * (
        inputs.u0_at_x0 / (inputs.log_eps_abs * r * r))
    return h0 + corr


@dataclass(frozen=True)
class XepsPrediction:
    points: list          # candidate maximizer locations (empty if degenerate ring)
    radius: float         # common distance |x_eps - x0|
    degenerate_ring: bool


def predict_xeps(inputs: AsymptoticInputs) -> XepsPrediction:
    """Maximizer location for the coincident case x0 = y0:
    x0 +- sqrt(-u0(x0)/lambda1) / sqrt(|log eps|) v1.  For lambda1 = lambda2
    the direction is arbitrary and a ring radius is returned."""
    if not inputs.hole_at_maximum:
        raise ValueError("predict_xeps applies to the coincident case x0 = y0")
    radius = float(np.sqrt(-inputs.u0_at_x0 / inputs.lambda1) / np.sqrt(inputs.log_eps_abs))
    if abs(inputs.lambda1 - inputs.lambda2) <= _DEGENERACY_TOL:
        return XepsPrediction(points=[], radius=radius, degenerate_ring=True)
    return XepsPrediction(
        points=[inputs.x0 + radius * inputs.v1, inputs.x0 - radius * inputs.v1],
        radius=radius,
        degenerate_ring=False,
    )


def predict_limit_lambda_max(inputs: AsymptoticInputs) -> float:
    """Stated limit of lambda_max(D^2 u_eps(x_eps)):
    max{lambda1, lambda2} if x0 != y0, else
    max{lambda1, lambda2, -|lambda2 - lambda1|}."""
    lam1, lam2 = inputs.lambda1, inputs.lambda2
    if inputs.hole_at_maximum:
        return max(lam1, lam2, -abs(lam2 - lam1))
    return max(lam1, lam2)


def predict_hessian_at_max(inputs: AsymptoticInputs):
    """Predicted eigenpair (lambda1, lambda2 - lambda1) of the Hessian at the
    maximizer, in the eigenframe (v1, v2), for the coincident case."""
    if not inputs.hole_at_maximum:
        raise ValueError("predict_hessian_at_max applies to the coincident case")
    return (inputs.lambda1, inputs.lambda2 - inputs.lambda1), (inputs.v1, inputs.v2)


def theorem_a_rhs(c1: float, c2: float, d) -> float:
    """Reporting utility -c1 exp(-c2 diam/inrad) for the convex-domain
    spectral-gap bound; the universal constants are caller-supplied."""
    if not (c1 > 0 and c2 > 0):
        raise ValueError("c1 and c2 must be positive")
    ratio = d.diameter() / d.inradius()
    return float(-c1 * np.exp(-c2 * ratio))
