"""Planar domains and their geometric functionals.

Supported bases are the disk, the ellipse and star-shaped domains whose
boundary radius is a trigonometric polynomial.  A PuncturedDomain removes a
closed disk B(x0, eps) from a base domain.  All geometric objects are
immutable after construction and their operations are pure.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

__all__ = [
    "Domain",
    "Disk",
    "Ellipse",
    "StarDomain",
    "PuncturedDomain",
    "BoundarySample",
    "boundary_sample",
    "parse_domain",
    "format_domain",
    "parse_hole",
    "format_hole",
]

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class BoundarySample:
    """Quadrature sample of a boundary: points, unit outward normals,
    arc-length weights, and the boundary component of each point
    (0 = outer curve, 1 = hole circle)."""

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    component: np.ndarray


class Domain:
    """Base class for smooth planar domains bounded by a Jordan curve."""

    center: np.ndarray

    # parametrization ------------------------------------------------------
    def boundary_point(self, t):
        raise NotImplementedError

    def boundary_normal(self, t):
        raise NotImplementedError

    def boundary_speed(self, t):
        """|p'(t)| of the parametrization, for arc-length quadrature."""
        raise NotImplementedError

    # predicates and functionals ------------------------------------------
    def contains(self, x) -> bool:
        raise NotImplementedError

    def diameter(self) -> float:
        raise NotImplementedError

    def inradius(self) -> float:
        raise NotImplementedError

    def distance_to_boundary(self, x) -> float:
        """Distance from x to the boundary curve (unsigned)."""
        t = np.linspace(0.0, _TWO_PI, 512, endpoint=False)
        pts = self.boundary_point(t)
        d = np.hypot(*(np.asarray(x) - pts).T)
        i = int(np.argmin(d))
        h = _TWO_PI / 512
        res = minimize_scalar(
            lambda s: float(np.hypot(*(np.asarray(x) - self.boundary_point(s)))),
            bounds=(t[i] - h, t[i] + h),
            method="bounded",
            options={"xatol": 1e-12},
        )
        return float(res.fun)

    def centroid(self):
        return self.center


@dataclass(frozen=True)
class Disk(Domain):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not self.radius > 0:
            raise ValueError("disk radius must be positive")

    def boundary_point(self, t):
        t = np.asarray(t, dtype=float)
        return self.center + self.radius * np.stack([np.cos(t), np.sin(t)], axis=-1)

    def boundary_normal(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.cos(t), np.sin(t)], axis=-1)

    def boundary_speed(self, t):
        return np.full(np.shape(t), self.radius, dtype=float)

    def contains(self, x) -> bool:
        return float(np.hypot(*(np.asarray(x) - self.center))) < self.radius

    def diameter(self) -> float:
        return 2.0 * self.radius

    def inradius(self) -> float:
        return self.radius

    def distance_to_boundary(self, x) -> float:
        return abs(self.radius - float(np.hypot(*(np.asarray(x) - self.center))))


@dataclass(frozen=True)
class Ellipse(Domain):
    center: np.ndarray
    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not (self.a >= self.b > 0):
            raise ValueError("ellipse requires a >= b > 0")

    def boundary_point(self, t):
        t = np.asarray(t, dtype=float)
        return self.center + np.stack([self.a * np.cos(t), self.b * np.sin(t)], axis=-1)

    def boundary_normal(self, t):
        t = np.asarray(t, dtype=float)
        n = np.stack([self.b * np.cos(t), self.a * np.sin(t)], axis=-1)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)

    def boundary_speed(self, t):
        t = np.asarray(t, dtype=float)
        return np.hypot(self.a * np.sin(t), self.b * np.cos(t))

    def contains(self, x) -> bool:
        d = np.asarray(x) - self.center
        return float((d[0] / self.a) ** 2 + (d[1] / self.b) ** 2) < 1.0

    def diameter(self) -> float:
        return 2.0 * self.a

    def inradius(self) -> float:
        return self.b


@dataclass(frozen=True)
class StarDomain(Domain):
    """Domain star-shaped about its center with radius
    rho(t) = c0 + sum_k ck cos(kt) + sk sin(kt) > 0."""

    center: np.ndarray
    cos_coeffs: tuple  # (c0, c1, ...)
    sin_coeffs: tuple = ()  # (s1, s2, ...)

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "cos_coeffs", tuple(float(c) for c in self.cos_coeffs))
        object.__setattr__(self, "sin_coeffs", tuple(float(s) for s in self.sin_coeffs))
        t = np.linspace(0.0, _TWO_PI, 4096, endpoint=False)
        if np.min(self.radius_at(t)) <= 0:
            raise ValueError("star radius function must be positive")

    def radius_at(self, t):
        t = np.asarray(t, dtype=float)
        r = np.full(np.shape(t), self.cos_coeffs[0], dtype=float)
        for k, c in enumerate(self.cos_coeffs[1:], start=1):
            r += c * np.cos(k * t)
        for k, s in enumerate(self.sin_coeffs, start=1):
            r += s * np.sin(k * t)
        return r

    def _radius_prime(self, t):
        t = np.asarray(t, dtype=float)
        r = np.zeros(np.shape(t), dtype=float)
        for k, c in enumerate(self.cos_coeffs[1:], start=1):
            r -= k * c * np.sin(k * t)
        for k, s in enumerate(self.sin_coeffs, start=1):
            r += k * s * np.cos(k * t)
        return r

    def _radius_second(self, t):
        t = np.asarray(t, dtype=float)
        r = np.zeros(np.shape(t), dtype=float)
        for k, c in enumerate(self.cos_coeffs[1:], start=1):
            r -= k * k * c * np.cos(k * t)
        for k, s in enumerate(self.sin_coeffs, start=1):
            r -= k * k * s * np.sin(k * t)
        return r

    def boundary_point(self, t):
        t = np.asarray(t, dtype=float)
        rho = self.radius_at(t)
        return self.center + np.stack([rho * np.cos(t), rho * np.sin(t)], axis=-1)

    def _tangent(self, t):
        t = np.asarray(t, dtype=float)
        rho, drho = self.radius_at(t), self._radius_prime(t)
        tx = drho * np.cos(t) - rho * np.sin(t)
        ty = drho * np.sin(t) + rho * np.cos(t)
        return np.stack([tx, ty], axis=-1)

    def boundary_normal(self, t):
        tan = self._tangent(t)
        n = np.stack([tan[..., 1], -tan[..., 0]], axis=-1)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)

    def boundary_speed(self, t):
        return np.linalg.norm(self._tangent(t), axis=-1)

    def contains(self, x) -> bool:
        d = np.asarray(x) - self.center
        r = float(np.hypot(d[0], d[1]))
        return r < float(self.radius_at(np.arctan2(d[1], d[0])))

    def diameter(self) -> float:
        t = np.linspace(0.0, _TWO_PI, 2048, endpoint=False)
        pts = self.boundary_point(t)
        d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
        return float(np.sqrt(d2.max()))

    def inradius(self) -> float:
        return _inradius_by_optimization(self)

    def is_convex(self, n: int = 2048) -> bool:
        """Sign of the boundary curvature on a dense grid."""
        t = np.linspace(0.0, _TWO_PI, n, endpoint=False)
        rho = self.radius_at(t)
        dr = self._radius_prime(t)
        ddr = self._radius_second(t)
        # curvature numerator of a polar curve
        kappa_num = rho * rho + 2.0 * dr * dr - rho * ddr
        return bool(np.all(kappa_num >= 0.0))


@dataclass(frozen=True)
class PuncturedDomain:
    """base domain minus the closed disk B(hole_center, hole_radius)."""

    base: Domain
    hole_center: np.ndarray
    hole_radius: float
    _inradius_cache: list = field(default_factory=list, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "hole_center", np.asarray(self.hole_center, dtype=float))
        if not self.hole_radius > 0:
            raise ValueError("hole radius must be positive")
        if not self.base.contains(self.hole_center):
            raise ValueError("hole center must lie inside the base domain")
        if self.base.distance_to_boundary(self.hole_center) <= self.hole_radius:
            raise ValueError("hole disk must be strictly inside the base domain")

    def contains(self, x) -> bool:
        return (
            self.base.contains(x)
            and float(np.hypot(*(np.asarray(x) - self.hole_center))) > self.hole_radius
        )

    def diameter(self) -> float:
        return self.base.diameter()

    def inradius(self) -> float:
        if not self._inradius_cache:
            self._inradius_cache.append(_inradius_by_optimization(self))
        return self._inradius_cache[0]

    def distance_to_boundary(self, x) -> float:
        d_hole = abs(float(np.hypot(*(np.asarray(x) - self.hole_center))) - self.hole_radius)
        return min(self.base.distance_to_boundary(x), d_hole)

    def centroid(self):
        return self.base.centroid()


def _interior_clearance(d, c) -> float:
    """min distance from c to any boundary component; -inf outside."""
    if isinstance(d, PuncturedDomain):
        if not d.base.contains(c):
            return -np.inf
        hole = float(np.hypot(*(np.asarray(c) - d.hole_center))) - d.hole_radius
        if hole <= 0:
            return -np.inf
        return min(d.base.distance_to_boundary(c), hole)
    if not d.contains(c):
        return -np.inf
    return d.distance_to_boundary(c)


def _clearance_grid(d, pts: np.ndarray) -> np.ndarray:
    """Vectorized approximate clearance of many candidate centers, using a
    dense boundary polyline; exact enough to rank grid candidates."""
    base = d.base if isinstance(d, PuncturedDomain) else d
    t = np.linspace(0.0, _TWO_PI, 4096, endpoint=False)
    bnd = base.boundary_point(t)
    vals = np.empty(len(pts))
    for lo in range(0, len(pts), 2048):
        chunk = pts[lo:lo + 2048]
        diff = chunk[:, None, :] - bnd[None, :, :]
        vals[lo:lo + 2048] = np.sqrt(np.min(np.sum(diff * diff, axis=-1), axis=1))
    inside = np.array([base.contains(p) for p in pts])
    vals[~inside] = -np.inf
    if isinstance(d, PuncturedDomain):
        hole = np.hypot(*(pts - d.hole_center).T) - d.hole_radius
        vals = np.minimum(vals, hole)
        vals[hole <= 0] = -np.inf
    return vals


def _inradius_by_optimization(d) -> float:
    """Largest inscribed disk radius via candidate grid + local refinement."""
    base = d.base if isinstance(d, PuncturedDomain) else d
    c0 = base.centroid()
    half = 0.5 * base.diameter()
    # coarse estimate to set the grid pitch
    est = max(_interior_clearance(d, c0), 0.05 * half)
    pitch = max(est / 50.0, 1e-4 * half)
    n = min(int(np.ceil(2 * half / pitch)), 201)
    xs = np.linspace(c0[0] - half, c0[0] + half, n)
    ys = np.linspace(c0[1] - half, c0[1] + half, n)
    grid = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)
    vals = _clearance_grid(d, grid)
    order = np.argsort(vals)[::-1][:5]
    r_best = float(vals[order[0]])
    for k in order:
        res = minimize(
            lambda c: -_interior_clearance(d, c),
            grid[k],
            method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": 1e-10, "maxiter": 2000},
        )
        r_best = max(r_best, -float(res.fun))
    return r_best


def boundary_sample(d, n_outer: int, n_hole: int = 0) -> BoundarySample:
    """Equally-spaced-in-parameter boundary quadrature sample.

    For a PuncturedDomain the hole circle contributes a second component
    whose outward normals (w.r.t. the punctured domain) point toward the
    hole center.
    """
    if n_outer < 16:
        raise ValueError("n_outer must be at least 16")
    if isinstance(d, PuncturedDomain):
        if n_hole < 8:
            raise ValueError("n_hole must be at least 8 for a punctured domain")
        outer = boundary_sample(d.base, n_outer)
        phi = _TWO_PI * np.arange(n_hole) / n_hole
        ring = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        pts = d.hole_center + d.hole_radius * ring
        normals = -ring
        weights = np.full(n_hole, _TWO_PI * d.hole_radius / n_hole)
        return BoundarySample(
            points=np.vstack([outer.points, pts]),
            normals=np.vstack([outer.normals, normals]),
            weights=np.concatenate([outer.weights, weights]),
            component=np.concatenate([outer.component, np.ones(n_hole, dtype=int)]),
        )
    t = _TWO_PI * np.arange(n_outer) / n_outer
    return BoundarySample(
        points=d.boundary_point(t),
        normals=d.boundary_normal(t),
        weights=d.boundary_speed(t) * (_TWO_PI / n_outer),
        component=np.zeros(n_outer, dtype=int),
    )


# ---------------------------------------------------------------------------
# domain literal syntax: disk:R=1  ellipse:a=2,b=1  star:c0=1,c2=0.1,s3=0.05
# hole literal syntax:   x=0,y=0,eps=1e-4  (an optional "hole:" prefix is ok)
# ---------------------------------------------------------------------------

def _parse_kv(body: str) -> dict:
    out = {}
    for item in body.split(","):
        item = item.strip()
        if not item:
            continue
        key, _, val = item.partition("=")
        if not _:
            raise ValueError(f"malformed key=value pair: {item!r}")
        out[key.strip()] = float(val)
    return out


def parse_domain(text: str) -> Domain:
    kind, sep, body = text.strip().partition(":")
    if not sep:
        raise ValueError(f"malformed domain literal: {text!r}")
    kv = _parse_kv(body)
    kind = kind.strip().lower()
    if kind == "disk":
        return Disk(center=np.zeros(2), radius=kv.pop("R", kv.pop("r", None)))
    if kind == "ellipse":
        return Ellipse(center=np.zeros(2), a=kv["a"], b=kv["b"])
    if kind == "star":
        n_cos = 1 + max([int(k[1:]) for k in kv if k.startswith("c") and k != "c0"] or [0])
        n_sin = max([int(k[1:]) for k in kv if k.startswith("s")] or [0])
        cos_coeffs = [kv.get(f"c{k}", 0.0) for k in range(n_cos)]
        sin_coeffs = [kv.get(f"s{k}", 0.0) for k in range(1, n_sin + 1)]
        return StarDomain(center=np.zeros(2), cos_coeffs=tuple(cos_coeffs),
                          sin_coeffs=tuple(sin_coeffs))
    raise ValueError(f"unknown domain kind: {kind!r}")


def format_domain(d: Domain) -> str:
    if isinstance(d, Disk):
        return f"disk:R={d.radius!r}"
    if isinstance(d, Ellipse):
        return f"ellipse:a={d.a!r},b={d.b!r}"
    if isinstance(d, StarDomain):
        parts = [f"c{k}={c!r}" for k, c in enumerate(d.cos_coeffs) if c != 0.0 or k == 0]
        parts += [f"s{k}={s!r}" for k, s in enumerate(d.sin_coeffs, start=1) if s != 0.0]
        return "star:" + ",".join(parts)
    raise TypeError(f"unsupported domain type: {type(d)!r}")


def parse_hole(text: str):
    """Return (center, eps) from a hole literal."""
    body = text.strip()
    if body.startswith("hole:"):
        body = body[len("hole:"):]
    kv = _parse_kv(body)
    return np.array([kv.get("x", 0.0), kv.get("y", 0.0)]), kv["eps"]


def format_hole(center, eps) -> str:
    return f"x={float(center[0])!r},y={float(center[1])!r},eps={float(eps)!r}"
