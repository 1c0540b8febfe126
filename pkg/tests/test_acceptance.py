"""Acceptance gate: every criterion from the build contract, one test
each, printing a pass/fail line with the measured error."""

import pytest

from gmfkit.selftest import CRITERIA


def _check(index):
    name, fn = CRITERIA[index - 1]
    ok, detail = fn(0)
    status = "PASS" if ok else "FAIL"
    print(f"criterion {index:02d} {name}: {status} ({detail})")
    assert ok, f"criterion {index:02d} {name}: {detail}"


def test_criterion_01_gmf_closed_form_vs_oracle():
    _check(1)


def test_criterion_02_scalar_gmf_special_case():
    _check(2)


def test_criterion_03_improper_infimal_projection():
    _check(3)


def test_criterion_04_domain_examples():
    _check(4)


def test_criterion_05_weighted_nuclear_norm():
    _check(5)


def test_criterion_06_zero_duality_gap():
    _check(6)


def test_criterion_07_indicator_conjugate_vs_grid():
    _check(7)


def test_criterion_08_vgf_suite():
    _check(8)


def test_criterion_09_squared_gauge_representation():
    _check(9)


def test_criterion_10_ky_fan_bridge():
    _check(10)


def test_criterion_11_gradient_check():
    _check(11)


def test_criterion_12_smoothing_solver():
    _check(12)


def test_criterion_13_cq_implication_chain():
    _check(13)
