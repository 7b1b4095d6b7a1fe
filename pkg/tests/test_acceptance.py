"""Acceptance gate: one test per stated criterion, each printing a single
PASS/FAIL line per sub-check at the stated tolerance.  Suites are computed
once and shared across criteria."""
import time

import pytest

from torsion_gap.harness import SUITES
from torsion_gap.mfs import DEFAULT_CONFIG

_CACHE: dict = {}


def _suite(name):
    if name not in _CACHE:
        t0 = time.perf_counter()
        criteria = SUITES[name](DEFAULT_CONFIG)
        _CACHE[name] = (criteria, time.perf_counter() - t0)
    return _CACHE[name]


def _check(criteria):
    failed = []
    for c in criteria:
        verdict = "PASS" if c.passed else "FAIL"
        print(f"{verdict}  {c.name}: measured={c.measured:.6g} "
              f"threshold={c.threshold:.6g}")
        if not c.passed:
            failed.append(c)
    assert not failed, "; ".join(
        f"{c.name} measured={c.measured:.6g} threshold={c.threshold:.6g} "
        f"{c.detail}" for c in failed)


def test_criterion_01_oracle_fidelity():
    criteria, elapsed = _suite("oracles")
    runtime_ok = elapsed < 30.0
    print(f"{'PASS' if runtime_ok else 'FAIL'}  oracle-runtime: "
          f"measured={elapsed:.3g}s threshold=30s")
    _check(criteria)
    assert runtime_ok


def test_criterion_02_annulus_degenerate_limit():
    criteria, _ = _suite("annulus")
    _check(criteria)


def test_criterion_03_centered_hole_distinct_eigenvalues():
    criteria, _ = _suite("ellipse-centered")
    wanted = ("ellipse-centered-lambda-max-monotone",
              "ellipse-centered-lambda-limit",
              "ellipse-centered-eigenpair-at-1e-8")
    _check([c for c in criteria if c.name in wanted])


def test_criterion_04_offcenter_hole():
    criteria, _ = _suite("offcenter")
    _check(criteria)


def test_criterion_05_maximizer_scaling():
    criteria, _ = _suite("ellipse-centered")
    wanted = ("ellipse-centered-xeps-scaling",
              "ellipse-centered-xeps-axis-alignment")
    _check([c for c in criteria if c.name in wanted])


def test_criterion_06_capacity_expansion_rate():
    criteria, _ = _suite("capacity")
    _check(criteria)


def test_criterion_07_near_hole_expansion():
    criteria, _ = _suite("expansions")
    wanted = ("predict-u-annulus-decreasing", "predict-u-annulus-final",
              "predict-u-ellipse-decreasing", "predict-u-ellipse-final",
              "l-eps-profile-annulus")
    _check([c for c in criteria if c.name in wanted])


def test_criterion_08_gradient_hessian_predictions():
    criteria, _ = _suite("expansions")
    wanted = ("predict-gradient-annulus", "predict-hessian-annulus",
              "near-hole-gradient-bound-annulus",
              "near-hole-gradient-bound-ellipse")
    _check([c for c in criteria if c.name in wanted])


def test_criterion_09_counterexample_report():
    criteria, _ = _suite("counterexample")
    _check(criteria)


def test_criterion_10_property_suites():
    import test_properties as props

    checks = (
        props.test_harmonicity_zero_hessian_trace,
        props.test_interior_gradient_bound,
        props.test_green_symmetry,
        props.test_trace_identity,
        props.test_maximum_principle,
        props.test_analytic_vs_fd_derivatives,
    )
    failed = []
    for fn in checks:
        try:
            fn()
            print(f"PASS  property-{fn.__name__}")
        except AssertionError as e:
            print(f"FAIL  property-{fn.__name__}: {e}")
            failed.append(fn.__name__)
    assert not failed
