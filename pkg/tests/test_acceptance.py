"""Acceptance gate: every shipped verification case at its stated tolerance.

Each test prints one PASS/FAIL line with the measured numbers, so a plain
``pytest -s tests/test_acceptance.py`` doubles as the acceptance report.
The same cases run through ``magtb reproduce-all suite/acceptance.json``.
"""

import json

import pytest

from magtb import acceptance


def _run(name, **params):
    res = acceptance.run_case(name, params or None)
    shown = {k: v for k, v in res.details.items() if not k.startswith("_")}
    print()
    print(res.line())
    print(" ", json.dumps(shown, default=str))
    assert res.passed, f"{name} failed: {shown}"
    return res


def test_criterion_1_landau_oracle():
    res = _run("landau_oracle", lam=10.0, n_grid=4000)
    assert res.seconds < 5.0
    assert res.details["energy_rel_err"] < 1e-6
    assert res.details["profile_l2_err"] < 1e-6


def test_criterion_2_hopping_bounds():
    res = _run("hopping_bounds", lams=(6.0, 8.0, 10.0, 12.0, 14.0), v_min=-4.0, r0=1.0)
    assert res.seconds < 120.0
    assert res.details["r2"] > 0.99
    assert res.details["max_im_ratio"] < 1e-8


def test_criterion_3_gramian_decay():
    res = _run("gramian_decay", lams=(8.0, 10.0, 12.0))
    assert res.seconds < 120.0
    assert res.details["rate_fit"] > 0
    assert res.details["mgm_resid"] < 1e-10


def test_criterion_4_matrix_element_convergence():
    res = _run("matrix_element_convergence")
    assert res.seconds < 600.0
    devs = res.details["nn_deviations"]
    assert devs[-1] < devs[0]
    assert res.details["nnn_over_rho"][-1] < 0.1


def test_criterion_5_bulk_chern():
    res = _run("bulk_chern", size=40)
    assert res.seconds < 180.0
    assert abs(res.details["kubo"] - res.details["oracle"]) <= 0.1


def test_criterion_6_edge_bulk_correspondence():
    res = _run("edge_bulk_correspondence", strip=(60, 30), bulk_size=40)
    assert res.seconds < 300.0
    assert abs(res.details["edge"] - res.details["bulk"]) <= 0.1


def test_criterion_7_edge_defect_decay():
    res = _run("edge_defect_decay", strip=(60, 30))
    assert res.seconds < 120.0
    assert res.details["kappa_fit"] > 0


def test_criterion_8_continuum_reduction_trend():
    res = _run("continuum_reduction_trend")
    assert res.seconds < 1200.0
    ratios = res.details["ratios"]
    assert 0.5 <= ratios[-1] <= 2.0
    devs = res.details["patch_deviations"]
    assert devs[-1] < devs[0]


def test_criterion_9_property_suite():
    res = _run("property_suite", size=40)
    assert res.details["kubo_shift_change"] < 0.02
    assert res.details["beta_antisymmetry"] < 0.02
    assert abs(res.details["band_chern_sum"]) < 0.3
