import numpy as np
import pytest

from torsion_gap.geometry import (Disk, Ellipse, PuncturedDomain, StarDomain,
                                  boundary_sample, format_domain, format_hole,
                                  parse_domain, parse_hole)


def test_disk_basics():
    d = Disk(center=(0.5, 0.0), radius=2.0)
    assert d.diameter() == pytest.approx(4.0)
    assert d.inradius() == pytest.approx(2.0, abs=1e-7)
    assert d.contains((0.5, 1.9))
    assert not d.contains((0.5, 2.1))
    assert d.distance_to_boundary((0.5, 0.0)) == pytest.approx(2.0, abs=1e-7)


def test_ellipse_basics():
    e = Ellipse(center=(0, 0), a=2.0, b=1.0)
    assert e.diameter() == pytest.approx(4.0, abs=1e-6)
    assert e.inradius() == pytest.approx(1.0, abs=1e-6)
    assert e.contains((1.9, 0.0)) and not e.contains((0.0, 1.1))
    # boundary parametrization traces x^2/a^2 + y^2/b^2 = 1
    for t in np.linspace(0, 2 * np.pi, 17):
        p = e.boundary_point(t)
        assert p[0] ** 2 / 4 + p[1] ** 2 == pytest.approx(1.0)
        n = e.boundary_normal(t)
        assert np.hypot(*n) == pytest.approx(1.0)


def test_boundary_normal_is_outward():
    e = Ellipse(center=(0, 0), a=2.0, b=1.0)
    for t in np.linspace(0.1, 6.0, 9):
        p, n = e.boundary_point(t), e.boundary_normal(t)
        assert not e.contains(p + 1e-6 * n)
        assert e.contains(p - 1e-6 * n)


def test_star_domain_convexity_flag():
    circleish = StarDomain(center=(0, 0), cos_coeffs=(1.0, 0.0, 0.05), sin_coeffs=(0.0, 0.0))
    assert circleish.is_convex()  # near-circle stays convex
    spiky = StarDomain(center=(0, 0), cos_coeffs=(1.0, 0.0, 0.4), sin_coeffs=(0.0, 0.0))
    assert not spiky.is_convex()


def test_punctured_domain_validation():
    d = Disk(center=(0, 0), radius=1.0)
    pd = PuncturedDomain(d, (0.3, 0.0), 0.05)
    assert pd.contains((0.5, 0.0))
    assert not pd.contains((0.31, 0.0))       # inside the hole
    assert not pd.contains((1.1, 0.0))        # outside the base domain
    with pytest.raises(ValueError):
        PuncturedDomain(d, (0.99, 0.0), 0.05)  # hole touches the outer boundary


def test_punctured_inradius_and_diameter():
    d = Disk(center=(0, 0), radius=1.0)
    pd = PuncturedDomain(d, (0.0, 0.0), 0.1)
    assert pd.diameter() == pytest.approx(2.0)
    # largest inscribed disk is centered at radius (1+eps)/2
    assert pd.inradius() == pytest.approx(0.45, abs=1e-6)


def test_boundary_sample_counts_and_weights():
    d = Disk(center=(0, 0), radius=1.0)
    pd = PuncturedDomain(d, (0.0, 0.0), 0.1)
    s = boundary_sample(pd, 64, 16)
    assert len(s.points) == 80
    assert set(np.unique(s.component)) == {0, 1}
    # weights integrate arclength: 2 pi (outer) + 2 pi 0.1 (hole)
    assert s.weights.sum() == pytest.approx(2 * np.pi * 1.1, rel=1e-3)
    # hole normals point toward the hole center
    hole = s.component == 1
    for p, n in zip(s.points[hole], s.normals[hole]):
        assert np.dot(n, np.zeros(2) - p) > 0


def test_parse_format_domain_roundtrip():
    for text in ("disk:R=1.5", "ellipse:a=2,b=1", "star:c0=1.0,c2=0.05,s3=0.02"):
        d = parse_domain(text)
        again = parse_domain(format_domain(d))
        assert type(again) is type(d)
        for t in np.linspace(0, 6, 7):
            assert np.allclose(d.boundary_point(t), again.boundary_point(t))


def test_parse_hole_roundtrip():
    center, eps = parse_hole("x=0.3,y=-0.1,eps=1e-4")
    assert np.allclose(center, [0.3, -0.1]) and eps == 1e-4
    center2, eps2 = parse_hole(format_hole(center, eps))
    assert np.allclose(center, center2) and eps == eps2


def test_parse_domain_rejects_garbage():
    with pytest.raises(ValueError):
        parse_domain("just-a-name")
