"""Randomized structural properties: harmonicity, interior gradient bound,
Green symmetry, trace identity, maximum principle, analytic-vs-FD
derivatives.  Seed fixed for reproducibility."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsion_gap.asymptotics import (AsymptoticInputs,
                                     predict_hessian_at_max,
                                     predict_limit_lambda_max, predict_u)
from torsion_gap.geometry import Disk, Ellipse, PuncturedDomain
from torsion_gap.mfs import green_numeric, solve_dirichlet
from torsion_gap.torsion import solve_torsion, solve_torsion_punctured

SEED = 20240817

ELL = Ellipse(center=(0, 0), a=2.0, b=1.0)


def _random_harmonic_data(rng):
    # random low-order harmonic polynomial plus a shifted log source outside
    a, b, c = rng.uniform(-1, 1, 3)
    q = np.array([3.0, 2.5]) + rng.uniform(0, 0.5, 2)

    def g(p):
        return (a * p[0] + b * (p[0] ** 2 - p[1] ** 2) + c * p[0] * p[1]
                + np.log(np.hypot(*(np.asarray(p) - q))))
    return g


def _interior_points(rng, n):
    r = np.sqrt(rng.uniform(0, 0.9, n))
    t = rng.uniform(0, 2 * np.pi, n)
    return np.stack([2.0 * r * np.cos(t), r * np.sin(t)], axis=-1)


def test_harmonicity_zero_hessian_trace():
    rng = np.random.default_rng(SEED)
    sol = solve_dirichlet(ELL, _random_harmonic_data(rng))
    for p in _interior_points(rng, 25):
        assert abs(np.trace(sol.hessian(p))) <= 1e-12


def test_interior_gradient_bound():
    rng = np.random.default_rng(SEED)
    # harmonic h on B(x, r): |grad h(x)| <= (2/r) sup_{B(x,r)} |h|
    sol = solve_dirichlet(ELL, _random_harmonic_data(rng))
    circle = np.stack([np.cos(np.linspace(0, 2 * np.pi, 64, endpoint=False)),
                       np.sin(np.linspace(0, 2 * np.pi, 64, endpoint=False))], axis=-1)
    for p in _interior_points(rng, 10):
        r = 0.5 * ELL.distance_to_boundary(p)
        if r < 1e-3:
            continue
        sup = max(abs(sol.value(p + r * q)) for q in circle)
        sup = max(sup, abs(sol.value(p)))
        assert np.hypot(*sol.gradient(p)) <= (2.0 / r) * sup * (1 + 1e-9)


def test_green_symmetry():
    rng = np.random.default_rng(SEED)
    pts = _interior_points(rng, 4)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            x, y = pts[i], pts[j]
            if np.hypot(*(x - y)) < 0.1:
                continue
            gxy = green_numeric(ELL, y).value(x)
            gyx = green_numeric(ELL, x).value(y)
            assert abs(gxy - gyx) <= 1e-8


def test_trace_identity():
    rng = np.random.default_rng(SEED)
    u = solve_torsion(ELL)
    pd = PuncturedDomain(Disk(center=(0, 0), radius=1.0), (0.2, 0.1), 1e-3)
    u_eps = solve_torsion_punctured(pd)
    for p in _interior_points(rng, 20):
        assert abs(np.trace(u.hessian(p)) + 1.0) <= 1e-6
        q = p / 2.5
        if pd.contains(q) and np.hypot(*(q - [0.2, 0.1])) > 5e-3:
            assert abs(np.trace(u_eps.hessian(q)) + 1.0) <= 1e-6


def test_maximum_principle():
    rng = np.random.default_rng(SEED)
    g = _random_harmonic_data(rng)
    sol = solve_dirichlet(ELL, g)
    bvals = [g(ELL.boundary_point(t)) for t in np.linspace(0, 2 * np.pi, 256)]
    lo, hi = min(bvals), max(bvals)
    slack = 1e-9 * max(1.0, abs(lo), abs(hi))
    for p in _interior_points(rng, 40):
        assert lo - slack <= sol.value(p) <= hi + slack


def test_torsion_positive_inside():
    rng = np.random.default_rng(SEED)
    u = solve_torsion(ELL)
    for p in _interior_points(rng, 40):
        assert u.value(p) > 0


def test_analytic_vs_fd_derivatives():
    rng = np.random.default_rng(SEED)
    u = solve_torsion(ELL)
    h = 1e-5
    ex, ey = np.array([h, 0.0]), np.array([0.0, h])
    for p in _interior_points(rng, 10):
        g = u.gradient(p)
        fd_g = np.array([(u.value(p + ex) - u.value(p - ex)) / (2 * h),
                         (u.value(p + ey) - u.value(p - ey)) / (2 * h)])
        assert np.max(np.abs(g - fd_g)) <= 1e-7
        H = u.hessian(p)
        fd_H = np.array([
            (u.gradient(p + ex) - u.gradient(p - ex)) / (2 * h),
            (u.gradient(p + ey) - u.gradient(p - ey)) / (2 * h)])
        assert np.max(np.abs(H - fd_H.T)) <= 1e-7


# ---- hypothesis properties of the predictors ------------------------------

@st.composite
def coincident_inputs(draw):
    lam1 = draw(st.floats(min_value=-0.5, max_value=-1e-3))
    lam2 = -1.0 - lam1
    eps = draw(st.floats(min_value=1e-8, max_value=1e-2))
    u0 = draw(st.floats(min_value=0.05, max_value=1.0))
    return AsymptoticInputs(u0_at_x0=u0, lambda1=lam1, lambda2=lam2,
                            v1=(1.0, 0.0), v2=(0.0, 1.0), x0=(0.0, 0.0),
                            y0=(0.0, 0.0), eps=eps, H_x0x0=0.0, diam=4.0)


@given(coincident_inputs())
@settings(max_examples=200, deadline=None)
def test_limit_equals_top_of_predicted_eigenpair(inputs):
    # max{l1, l2, -|l2-l1|} is exactly the top of the predicted pair
    # (l1, l2-l1) when l1 >= l2
    pair, _ = predict_hessian_at_max(inputs)
    assert predict_limit_lambda_max(inputs) == pytest.approx(max(pair), abs=1e-15)


@given(coincident_inputs(), st.floats(min_value=0.01, max_value=0.2),
       st.floats(min_value=0.0, max_value=2 * np.pi))
@settings(max_examples=100, deadline=None)
def test_predict_u_continuity(inputs, r, theta):
    x = r * np.array([np.cos(theta), np.sin(theta)])
    u0 = lambda q: inputs.u0_at_x0 * (1.0 - float(q @ q))
    v = predict_u(inputs, u0, x)
    v2 = predict_u(inputs, u0, x * (1 + 1e-9))
    assert abs(v - v2) <= 1e-6 * max(1.0, abs(v))
