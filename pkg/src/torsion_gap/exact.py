"""Closed-form oracles: torsion functions on the disk, ellipse and
concentric annulus, the disk Green's function and its regular part, the
exterior-disk kernel, the concentric capacity function, and a Poisson
integral reconstruction on the unit disk.

All formulas are centered at the origin; callers translate coordinates.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "disk_torsion",
    "disk_torsion_gradient",
    "disk_torsion_hessian",
    "ellipse_torsion",
    "ellipse_torsion_gradient",
    "ellipse_torsion_hessian",
    "annulus_log_coefficient",
    "annulus_torsion",
    "annulus_torsion_d1",
    "annulus_torsion_d2",
    "annulus_max_radius",
    "disk_green",
    "disk_green_regular",
    "g0",
    "g0_normal_derivative",
    "capacity_concentric",
    "disk_poisson_reconstruct",
]


# -- torsion closed forms ----------------------------------------------------

def disk_torsion(R: float, x) -> float:
    """(R^2 - |x|^2) / 4 on the disk of radius R centered at 0."""
    x = np.asarray(x, dtype=float)
    return float((R * R - x @ x) / 4.0)


def disk_torsion_gradient(R: float, x) -> np.ndarray:
    return -np.asarray(x, dtype=float) / 2.0


def disk_torsion_hessian(R: float, x) -> np.ndarray:
    return np.diag([-0.5, -0.5])


def ellipse_torsion(a: float, b: float, x) -> float:
    """a^2 b^2 / (2(a^2+b^2)) * (1 - x1^2/a^2 - x2^2/b^2)."""
    x = np.asarray(x, dtype=float)
    c = a * a * b * b / (2.0 * (a * a + b * b))
    return float(c * (1.0 - (x[0] / a) ** 2 - (x[1] / b) ** 2))


def ellipse_torsion_gradient(a: float, b: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    c = a * a * b * b / (2.0 * (a * a + b * b))
    return np.array([-2.0 * c * x[0] / (a * a), -2.0 * c * x[1] / (b * b)])


def ellipse_torsion_hessian(a: float, b: float, x) -> np.ndarray:
    c = a * a * b * b / (2.0 * (a * a + b * b))
    return np.diag([-2.0 * c / (a * a), -2.0 * c / (b * b)])


def annulus_log_coefficient(eps: float) -> float:
    """Coefficient A of the log term of the annulus torsion function,
    A = (eps^2 - 1) / (4 ln eps) > 0 for 0 < eps < 1."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    return (eps * eps - 1.0) / (4.0 * np.log(eps))


def _check_annulus_r(eps: float, r, tol: float = 1e-12):
    r = np.asarray(r, dtype=float)
    if np.any(r < eps * (1 - tol) - tol) or np.any(r > 1.0 + tol):
        raise ValueError("radial coordinate outside [eps, 1]")
    return r


def annulus_torsion(eps: float, r):
    """u(r) = (1 - r^2)/4 + A ln r on the annulus eps <= r <= 1."""
    r = _check_annulus_r(eps, r)
    A = annulus_log_coefficient(eps)
    return (1.0 - r * r) / 4.0 + A * np.log(r)


def annulus_torsion_d1(eps: float, r):
    r = _check_annulus_r(eps, r)
    return -r / 2.0 + annulus_log_coefficient(eps) / r


def annulus_torsion_d2(eps: float, r):
    r = _check_annulus_r(eps, r)
    return -0.5 - annulus_log_coefficient(eps) / (r * r)


def annulus_max_radius(eps: float) -> float:
    """Radius of the ring of maxima, sqrt(2A) = sqrt((1-eps^2)/(2|log eps|))."""
    return float(np.sqrt(2.0 * annulus_log_coefficient(eps)))


# -- Green's function of the disk (method of images) -------------------------

def disk_green(R: float, x, y) -> float:
    """Dirichlet Green's function of the disk B(0, R)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = float(np.hypot(*(x - y)))
    if d < 1e-300:
        raise ValueError("Green's function is singular at x = y")
    return -np.log(d) / (2.0 * np.pi) - disk_green_regular(R, x, y)


def disk_green_regular(R: float, x, y) -> float:
    """Regular part H with G = -(1/2pi) log|x-y| - H; H(x, 0) = 0 for R = 1."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ry = float(np.hypot(*y))
    if ry == 0.0:
        return float(-np.log(R) / (2.0 * np.pi))
    y_star = (R * R / (ry * ry)) * y
    return float(-np.log((ry / R) * np.hypot(*(x - y_star))) / (2.0 * np.pi))


# -- exterior-disk kernel -----------------------------------------------------

def g0(w, s) -> float:
    """Green's function of the exterior of the unit disk,
    -(1/2pi)(log|w-s| - log||w|s - w/|w||); zero when either argument is on
    the unit circle and symmetric in its arguments."""
    w = np.asarray(w, dtype=float)
    s = np.asarray(s, dtype=float)
    d = float(np.hypot(*(w - s)))
    if d < 1e-300:
        raise ValueError("g0 is singular at w = s")
    rw = float(np.hypot(*w))
    image = float(np.hypot(*(rw * s - w / rw)))
    return -(np.log(d) - np.log(image)) / (2.0 * np.pi)


def g0_normal_derivative(w, s) -> float:
    """d g0(w, s)/d nu_s for |s| = 1 with nu_s = -s:
    (1 - |w|^2) / (2 pi |w-s|^2)."""
    w = np.asarray(w, dtype=float)
    s = np.asarray(s, dtype=float)
    rw2 = float(w @ w)
    d2 = float((w - s) @ (w - s))
    return (1.0 - rw2) / (2.0 * np.pi * d2)


# -- concentric capacity ------------------------------------------------------

def capacity_concentric(eps: float, x) -> float:
    """ln|x| / ln eps: harmonic, 1 on |x| = eps, 0 on |x| = 1."""
    r = float(np.hypot(*np.asarray(x, dtype=float)))
    return float(np.log(r) / np.log(eps))


# -- Poisson reconstruction on the unit disk ----------------------------------

def disk_poisson_reconstruct(phi, s, n_quad: int = 256, lap_phi=None) -> float:
    """Reconstruct phi(s), |s| < 1, from the Poisson boundary integral plus
    the area integral of its Laplacian against the exterior-disk kernel.

    phi maps a point (2,) to a value; lap_phi, if given, maps a point to the
    Laplacian of phi (omit it for harmonic phi).  The boundary term uses the
    composite trapezoid rule (spectrally accurate for periodic integrands);
    the area term uses a Gauss-Legendre x trapezoid polar grid with the log
    singularity at y = s subtracted and integrated in closed form.
    """
    s = np.asarray(s, dtype=float)
    rs2 = float(s @ s)
    if rs2 >= 1.0:
        raise ValueError("s must be strictly inside the unit disk")
    theta = 2.0 * np.pi * np.arange(n_quad) / n_quad
    y = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    phi_b = np.array([phi(p) for p in y])
    kern = (1.0 - rs2) / np.sum((s - y) ** 2, axis=-1)
    value = float(np.sum(kern * phi_b)) / n_quad  # (1/2pi) * (2pi/n) sum

    if lap_phi is None:
        return value

    # area term: - int_B lap_phi(y) G0(s, y) dy with
    # G0(s, y) = -(1/2pi) log|s-y| + (1/2pi) log||s|y - s/|s||
    nodes, wts = np.polynomial.legendre.leggauss(n_quad)
    r = 0.5 * (nodes + 1.0)
    wr = 0.5 * wts
    R, T = np.meshgrid(r, theta, indexing="ij")
    W = np.outer(wr * r, np.full(n_quad, 2.0 * np.pi / n_quad))
    Y = np.stack([R * np.cos(T), R * np.sin(T)], axis=-1)
    lap = np.array([[lap_phi(Y[i, j]) for j in range(n_quad)] for i in range(n_quad)])
    lap_s = float(lap_phi(s))

    diff = Y - s
    dist = np.hypot(diff[..., 0], diff[..., 1])
    dist = np.maximum(dist, 1e-300)
    rs = np.sqrt(rs2)
    if rs == 0.0:
        # ||s|y - s/|s|| -> 1 as s -> 0, so the image term vanishes
        log_image = np.zeros_like(dist)
    else:
        im = rs * Y - s / rs
        log_image = np.log(np.maximum(np.hypot(im[..., 0], im[..., 1]), 1e-300))

    # smooth parts by quadrature
    smooth = np.sum(W * (lap * log_image / (2.0 * np.pi)
                         - (lap - lap_s) * np.log(dist) / (2.0 * np.pi)))
    # singular part in closed form: int_B log|s-y| dy = pi (|s|^2 - 1) / 2
    singular = lap_s * np.pi * (rs2 - 1.0) / (2.0 * 2.0 * np.pi)
    # int lap * G0 = smooth - singular; phi(s) = boundary - int lap * G0
    return value - float(smooth) + float(singular)
