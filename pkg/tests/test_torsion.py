import numpy as np
import pytest

from torsion_gap import exact
from torsion_gap.geometry import Disk, Ellipse, PuncturedDomain
from torsion_gap.torsion import (EPS_GUARDRAIL, EpsilonGuardrailError,
                                 find_critical_points, k_epsilon,
                                 k_epsilon_gradient, l_epsilon_numeric,
                                 select_maximum, solve_torsion,
                                 solve_torsion_punctured, spectral_report)


def test_disk_torsion_solution():
    u = solve_torsion(Disk(center=(0, 0), radius=1.0))
    assert u.status == "converged"
    for p in ((0.0, 0.0), (0.3, -0.2), (0.7, 0.1)):
        assert u.value(np.asarray(p)) == pytest.approx(
            exact.disk_torsion(1.0, p), abs=1e-12)
    assert np.trace(u.hessian((0.2, 0.2))) == pytest.approx(-1.0, abs=1e-12)


def test_ellipse_maximum_at_center():
    u = solve_torsion(Ellipse(center=(0, 0), a=2.0, b=1.0))
    top = select_maximum(find_critical_points(u))
    assert np.allclose(top.location, [0.0, 0.0], atol=1e-9)
    assert top.value == pytest.approx(0.4, abs=1e-10)
    assert np.allclose(top.eigenvalues, [-0.2, -0.8], atol=1e-9)
    assert top.kind == "maximum"


def test_annulus_degenerate_ring_counts_as_maximum():
    eps = 1e-2
    pd = PuncturedDomain(Disk(center=(0, 0), radius=1.0), (0.0, 0.0), eps)
    u = solve_torsion_punctured(pd)
    top = select_maximum(find_critical_points(u))
    r_star = exact.annulus_max_radius(eps)
    assert np.hypot(*top.location) == pytest.approx(r_star, abs=1e-10)
    assert top.degenerate
    # eigenvalues (0, -1) up to solver noise
    assert abs(top.eigenvalues[0]) < 1e-9
    assert top.eigenvalues[1] == pytest.approx(-1.0, abs=1e-9)


def test_punctured_ellipse_two_maxima_symmetric():
    pd = PuncturedDomain(Ellipse(center=(0, 0), a=2.0, b=1.0), (0.0, 0.0), 1e-3)
    u = solve_torsion_punctured(pd)
    pts = find_critical_points(u)
    maxima = [p for p in pts if p.kind == "maximum"]
    assert len(maxima) == 2
    xs = sorted(p.location[0] for p in maxima)
    assert xs[0] == pytest.approx(-xs[1], abs=1e-8)
    top = select_maximum(pts)
    assert top.location[0] < 0  # lexicographic tie-break picks the left one


def test_epsilon_guardrail():
    pd = PuncturedDomain(Disk(center=(0, 0), radius=1.0), (0.0, 0.0), EPS_GUARDRAIL / 2)
    with pytest.raises(EpsilonGuardrailError):
        solve_torsion_punctured(pd)


def test_spectral_report_fields():
    eps = 1e-3
    pd = PuncturedDomain(Ellipse(center=(0, 0), a=2.0, b=1.0), (0.0, 0.0), eps)
    u = solve_torsion_punctured(pd)
    rep = spectral_report(u, -0.2, 0.5)
    assert rep.eps == eps
    assert rep.lambda_max == pytest.approx(rep.eigenvalues[0])
    assert rep.maxima_count == 2
    assert rep.boundary_residual < 1e-9
    assert rep.gradient_residual < 1e-9
    assert rep.lambda_discrepancy == pytest.approx(rep.lambda_max - (-0.2))
    assert rep.diam_inrad_ratio > 4.0


def test_k_epsilon_value():
    # [DERIVED] unit disk, x0 = 0, eps = 0.1, w = (2, 0):
    # -u0(0.05, 0) + (eps^2/2)(1 - 1/4) = -0.249375 + 0.00375
    u0 = lambda x: exact.disk_torsion(1.0, x)
    assert k_epsilon(u0, (0.0, 0.0), 0.1, (2.0, 0.0)) == pytest.approx(-0.245625)
    with pytest.raises(ValueError):
        k_epsilon(u0, (0.0, 0.0), 0.1, (0.5, 0.0))


def test_k_epsilon_gradient_matches_fd():
    u0 = solve_torsion(Disk(center=(0, 0), radius=1.0))
    x0, eps = np.array([0.2, 0.1]), 0.05
    w = np.array([3.0, -1.5])
    g = k_epsilon_gradient(u0, x0, eps, w)
    for i, e in enumerate(np.eye(2) * 1e-6):
        fd = (k_epsilon(u0, x0, eps, w + e) - k_epsilon(u0, x0, eps, w - e)) / 2e-6
        assert g[i] == pytest.approx(fd, abs=1e-8)


def test_l_epsilon_annulus_profile():
    # [DERIVED] remainder at eps = 0.01, |w| = 10 is 0.12496...,
    # close to the limiting profile u0(x0) ln|w| / |log eps| = 0.125
    eps = 0.01
    disk = Disk(center=(0, 0), radius=1.0)
    u_eps = solve_torsion_punctured(PuncturedDomain(disk, (0.0, 0.0), eps))
    u0 = solve_torsion(disk)
    val = l_epsilon_numeric(u_eps, u0, (0.0, 0.0), eps, (10.0, 0.0))
    assert val == pytest.approx(0.1249599, abs=1e-5)
    assert val == pytest.approx(0.25 * np.log(10.0) / abs(np.log(eps)), abs=2e-4)
