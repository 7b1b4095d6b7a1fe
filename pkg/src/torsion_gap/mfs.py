"""Dirichlet solver for Laplace's equation by fundamental-solution
collocation (method of fundamental solutions).

The solution is a superposition of point-source log kernels placed on an
inflated copy of the outer boundary, a constant, and, for punctured
domains, an explicit log monopole at the hole center plus zero-net-charge
source pairs on a deflated circle inside the hole.  The least-squares
collocation system is column-scaled and solved by truncated SVD; boundary
accuracy is certified on a finer check grid disjoint from the collocation
points.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .geometry import Domain, PuncturedDomain, boundary_sample

__all__ = [
    "MfsConfig",
    "HarmonicSolution",
    "GreenFunction",
    "IllPosedConfiguration",
    "SingularEvaluation",
    "solve_dirichlet",
    "green_numeric",
    "capacity_numeric",
    "DEFAULT_CONFIG",
]

_INV2PI = 1.0 / (2.0 * np.pi)


class IllPosedConfiguration(RuntimeError):
    """Effective rank of the collocation system fell below 8."""


class SingularEvaluation(ValueError):
    """Evaluation point coincides with a source point."""


@dataclass(frozen=True)
class MfsConfig:
    n_outer_sources: int = 128
    n_hole_sources: int = 16
    outer_source_inflation: float = 1.8
    hole_source_deflation: float = 0.5
    oversampling: float = 2.0
    svd_cutoff: float = 1e-12

    def __post_init__(self):
        if self.n_outer_sources < 8 or self.n_hole_sources < 8:
            raise ValueError("source counts must be at least 8")
        if not 1.05 <= self.outer_source_inflation <= 3.0:
            raise ValueError("outer_source_inflation must lie in [1.05, 3]")
        if not 0.2 <= self.hole_source_deflation <= 0.8:
            raise ValueError("hole_source_deflation must lie in [0.2, 0.8]")
        if self.oversampling < 2.0:
            raise ValueError("oversampling must be at least 2")
        if not 1e-14 <= self.svd_cutoff <= 1e-8:
            raise ValueError("svd_cutoff must lie in [1e-14, 1e-8]")


DEFAULT_CONFIG = MfsConfig()


@dataclass(frozen=True)
class HarmonicSolution:
    """Harmonic function sum_k c_k (-1/2pi) ln|x - q_k|
    + m (-1/2pi) ln|x - x0| + const, with a boundary-residual certificate."""

    sources: np.ndarray        # (M, 2) source points q_k
    strengths: np.ndarray      # (M,) strengths c_k
    constant: float
    monopole: float = 0.0      # m; nonzero only for punctured domains
    monopole_center: np.ndarray | None = None
    certificate: float = np.inf
    status: str = "unconverged"

    def _diffs(self, x):
        x = np.asarray(x, dtype=float)
        d = x - self.sources
        r2 = np.sum(d * d, axis=-1)
        if np.any(r2 < 1e-24):
            raise SingularEvaluation("evaluation point coincides with a source")
        if self.monopole != 0.0:
            dm = x - self.monopole_center
            rm2 = float(dm @ dm)
            if rm2 < 1e-24:
                raise SingularEvaluation("evaluation point coincides with the monopole")
            return d, r2, dm, rm2
        return d, r2, None, None

    def value(self, x) -> float:
        d, r2, dm, rm2 = self._diffs(x)
        v = -_INV2PI * 0.5 * float(self.strengths @ np.log(r2)) + self.constant
        if dm is not None:
            v += -_INV2PI * 0.5 * self.monopole * np.log(rm2)
        return float(v)

    def gradient(self, x) -> np.ndarray:
        d, r2, dm, rm2 = self._diffs(x)
        g = -_INV2PI * (self.strengths / r2) @ d
        if dm is not None:
            g = g + (-_INV2PI) * self.monopole * dm / rm2
        return g

    def hessian(self, x) -> np.ndarray:
        d, r2, dm, rm2 = self._diffs(x)
        eye = np.eye(2)
        h = np.einsum(
            "k,kij->ij",
            -_INV2PI * self.strengths / (r2 * r2),
            eye[None, :, :] * r2[:, None, None] - 2.0 * d[:, :, None] * d[:, None, :],
        )
        if dm is not None:
            h = h + (-_INV2PI) * self.monopole * (eye * rm2 - 2.0 * np.outer(dm, dm)) / (rm2 * rm2)
        return h


def _outer_sources(base: Domain, n: int, inflation: float) -> np.ndarray:
    t = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    pts = base.boundary_point(t)
    c = base.centroid()
    return c + inflation * (pts - c)


def _check_points(d, n_outer: int, n_hole: int, phase: float = 0.37):
    """Boundary points offset in parameter from the collocation grid."""
    if isinstance(d, PuncturedDomain):
        outer_pts, outer_mask = _check_points(d.base, n_outer, 0, phase)
        phi = 2.0 * np.pi * (np.arange(n_hole) + phase) / n_hole
        ring = d.hole_center + d.hole_radius * np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        return (np.vstack([outer_pts, ring]),
                np.concatenate([outer_mask, np.ones(n_hole, dtype=int)]))
    t = 2.0 * np.pi * (np.arange(n_outer) + phase) / n_outer
    return d.boundary_point(t), np.zeros(n_outer, dtype=int)


def _boundary_values(g, points: np.ndarray, component: np.ndarray) -> np.ndarray:
    """g is a callable point -> value, or an (outer, hole) pair of them."""
    if isinstance(g, tuple):
        g_outer, g_hole = g
        vals = np.empty(len(points))
        for i, (p, comp) in enumerate(zip(points, component)):
            vals[i] = g_hole(p) if comp else g_outer(p)
        return vals
    return np.array([g(p) for p in points])


def _design_matrix(points, sources, x0, n_hole_src):
    """Columns: outer kernels, hole pair kernels, monopole (if punctured),
    constant.  Hole columns are paired against the monopole location so the
    explicit monopole carries all net charge of the hole component."""
    d = points[:, None, :] - sources[None, :, :]
    logs = -_INV2PI * 0.5 * np.log(np.sum(d * d, axis=-1))
    cols = [logs]
    if x0 is not None:
        dm = points - x0
        mono = -_INV2PI * 0.5 * np.log(np.sum(dm * dm, axis=-1))
        cols[0] = logs.copy()
        cols[0][:, -n_hole_src:] -= mono[:, None]  # zero-net-charge pairs
        cols.append(mono[:, None])
    cols.append(np.ones((len(points), 1)))
    return np.hstack(cols)


def solve_dirichlet(d, g, cfg: MfsConfig = DEFAULT_CONFIG, tol: float | None = None) -> HarmonicSolution:
    """Least-squares collocation fit of the Dirichlet data g on d.

    g is a callable point -> value or a pair (g_outer, g_hole) for punctured
    domains.  The returned certificate is max |h - g| on a check grid of 4x
    the collocation density, offset from the collocation points.
    """
    punctured = isinstance(d, PuncturedDomain)
    base = d.base if punctured else d
    n_src = cfg.n_outer_sources
    sources = _outer_sources(base, n_src, cfg.outer_source_inflation)
    x0 = None
    n_hole_src = 0
    if punctured:
        x0 = d.hole_center
        n_hole_src = cfg.n_hole_sources
        phi = 2.0 * np.pi * np.arange(n_hole_src) / n_hole_src
        ring = x0 + cfg.hole_source_deflation * d.hole_radius * np.stack(
            [np.cos(phi), np.sin(phi)], axis=-1)
        sources = np.vstack([sources, ring])

    n_coll_outer = int(round(cfg.oversampling * n_src))
    n_coll_hole = int(round(cfg.oversampling * n_hole_src)) if punctured else 0
    sample = boundary_sample(d, n_coll_outer, n_coll_hole)
    A = _design_matrix(sample.points, sources, x0, n_hole_src)
    b = _boundary_values(g, sample.points, sample.component)

    scale = np.linalg.norm(A, axis=0)
    scale[scale == 0] = 1.0
    U, S, Vt = np.linalg.svd(A / scale, full_matrices=False)
    keep = S > cfg.svd_cutoff * S[0]
    if int(np.count_nonzero(keep)) < 8:
        raise IllPosedConfiguration(
            f"effective rank {int(np.count_nonzero(keep))} below 8")
    coeff = (Vt[keep].T @ ((U[:, keep].T @ b) / S[keep])) / scale

    # unpack: outer+hole-pair strengths, optional monopole, constant
    strengths = coeff[: n_src + n_hole_src].copy()
    monopole = 0.0
    if punctured:
        # fold the pair counter-charges into the monopole
        monopole = float(coeff[n_src + n_hole_src]) - float(
            np.sum(strengths[n_src:]))
        constant = float(coeff[-1])
    else:
        constant = float(coeff[-1])

    sol = HarmonicSolution(
        sources=sources,
        strengths=strengths,
        constant=constant,
        monopole=monopole,
        monopole_center=x0 if punctured else None,
    )
    check_pts, check_comp = _check_points(d, 4 * n_coll_outer, max(4 * n_coll_hole, 8))
    g_check = _boundary_values(g, check_pts, check_comp)
    resid = np.array([sol.value(p) for p in check_pts]) - g_check
    certificate = float(np.max(np.abs(resid)))
    g_scale = float(np.max(np.abs(b))) if len(b) else 1.0
    tolerance = tol if tol is not None else max(1e-8 * g_scale, 1e-12)
    status = "converged" if certificate <= tolerance else "unconverged"
    return replace(sol, certificate=certificate, status=status)


@dataclass(frozen=True)
class GreenFunction:
    """Numerical Dirichlet Green's function G(., y) = free-space log part
    minus a harmonic regular part fitted to the boundary."""

    pole: np.ndarray
    regular: HarmonicSolution

    def value(self, x) -> float:
        d = np.asarray(x, dtype=float) - self.pole
        r2 = float(d @ d)
        if r2 < 1e-24:
            raise SingularEvaluation("Green's function is singular at its pole")
        return float(-_INV2PI * 0.5 * np.log(r2) - self.regular.value(x))

    def gradient(self, x) -> np.ndarray:
        d = np.asarray(x, dtype=float) - self.pole
        r2 = float(d @ d)
        if r2 < 1e-24:
            raise SingularEvaluation("Green's function is singular at its pole")
        return -_INV2PI * d / r2 - self.regular.gradient(x)

    def regular_part(self, x) -> float:
        return self.regular.value(x)


def green_numeric(d, y, cfg: MfsConfig = DEFAULT_CONFIG) -> GreenFunction:
    """Green's function of d with pole y: the regular part solves the
    Dirichlet problem with data -(1/2pi) log|. - y| on every component."""
    y = np.asarray(y, dtype=float)
    inside = d.contains(y)
    if not inside:
        raise ValueError("pole must lie strictly inside the domain")

    def data(p):
        return float(-_INV2PI * np.log(np.hypot(*(p - y))))

    regular = solve_dirichlet(d, data, cfg)
    return GreenFunction(pole=y, regular=regular)


def capacity_numeric(pd: PuncturedDomain, cfg: MfsConfig = DEFAULT_CONFIG) -> HarmonicSolution:
    """Harmonic capacity function: 0 on the outer boundary, 1 on the hole."""
    return solve_dirichlet(pd, (lambda p: 0.0, lambda p: 1.0), cfg)
