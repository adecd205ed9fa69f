import numpy as np
import pytest

from magtb.atomic import (
    AtomicWell,
    check_sector_minimum,
    gaussian_decay_certificate,
    landau_profile,
    sector_lowest,
    solve_radial_ground_state,
)
from magtb.errors import PreconditionError


def test_well_validation():
    with pytest.raises(ValueError):
        AtomicWell(v_min=1.0, r0=1.0)
    with pytest.raises(ValueError):
        AtomicWell(v_min=-1.0, r0=0.0)
    w = AtomicWell(v_min=-4.0, r0=1.0)
    r = np.linspace(0, 2, 50)
    v = w(r)
    assert np.all(v <= 0)
    assert np.all(v[r >= 1.0] == 0)
    assert v[0] == pytest.approx(-4.0)


def test_landau_oracle_energy_and_profile():
    gs = solve_radial_ground_state(AtomicWell(0.0, 1.0), 10.0, n_grid=4000)
    assert abs(gs.e0_raw - 10.0) / 10.0 < 1e-6
    exact = landau_profile(10.0, gs.grid)
    h = gs.grid[1] - gs.grid[0]
    l2 = np.sqrt(np.sum((gs.values - exact) ** 2 * 2 * np.pi * gs.grid) * h)
    assert l2 < 1e-6


def test_ground_state_invariants(deep_gs8):
    assert deep_gs8.norm_l2() == pytest.approx(1.0, abs=1e-8)
    assert deep_gs8.gap > 0
    assert np.all(deep_gs8.values > 0)


def test_norm_preserved_under_refinement(deep_well):
    for n in (1600, 3200):
        gs = solve_radial_ground_state(deep_well, 8.0, n_grid=n)
        assert gs.norm_l2() == pytest.approx(1.0, abs=1e-8)


def test_deep_well_binds_quadratically(deep_well):
    for lam in (8.0, 10.0):
        gs = solve_radial_ground_state(deep_well, lam)
        assert gs.e0_raw <= -2.0 * lam**2


def test_gap_uniform_in_coupling(deep_well):
    gaps = [solve_radial_ground_state(deep_well, lam).gap for lam in (6.0, 8.0, 10.0)]
    assert all(g >= 20.0 for g in gaps)


def test_energy_monotone_in_depth():
    e0s = [solve_radial_ground_state(AtomicWell(v, 1.0), 8.0).e0_raw for v in (-2.0, -3.0, -4.0)]
    assert e0s[0] >= e0s[1] >= e0s[2]


def test_sector_minimum_landau():
    assert check_sector_minimum(AtomicWell(0.0, 1.0), 10.0, range(-2, 3))


def test_sector_minimum_deep(deep_well):
    assert check_sector_minimum(deep_well, 10.0, range(-3, 4))


def test_sector_minimum_requires_zero(deep_well):
    with pytest.raises(PreconditionError):
        check_sector_minimum(deep_well, 8.0, [1, 2])


def test_sector_minimum_ring_recorded():
    # a shallow ring-shaped well may prefer a nonzero angular momentum; the
    # outcome is recorded, not asserted
    well = AtomicWell(-1.0, 1.5, profile="ring")
    outcome = check_sector_minimum(well, 8.0, range(-2, 3))
    lows = {m: sector_lowest(well, 8.0, m) for m in range(-2, 3)}
    assert isinstance(outcome, bool)
    assert min(lows.values()) <= lows[0]


def test_decay_certificate_landau():
    gs = solve_radial_ground_state(AtomicWell(0.0, 1.0), 10.0, n_grid=3000)
    cert = gaussian_decay_certificate(gs)
    assert cert.passes
    assert cert.rate_fit == pytest.approx(10.0 / 4.0, rel=1e-3)


def test_decay_certificate_deep(deep_gs10):
    cert = gaussian_decay_certificate(deep_gs10)
    assert cert.passes
    assert np.isfinite(cert.C_fit)
    # deep wells decay faster than the free-field bound
    assert cert.rate_fit > 10.0 / 4.0


def test_solver_preconditions(deep_well):
    with pytest.raises(PreconditionError):
        solve_radial_ground_state(deep_well, 8.0, r_max=0.5)  # below r0 + 8/sqrt(lam)
    with pytest.raises(PreconditionError):
        solve_radial_ground_state(deep_well, 8.0, n_grid=50)
    with pytest.raises(PreconditionError):
        solve_radial_ground_state(deep_well, -1.0)


def test_evaluate_off_grid(deep_gs8):
    r = np.array([0.0, 0.5, 1.7, deep_gs8.r_max + 1.0])
    v = deep_gs8.evaluate(r)
    assert v[-1] == 0.0
    assert np.all(v[:-1] > 0)
    on_grid = deep_gs8.evaluate(deep_gs8.grid[100])
    assert on_grid == pytest.approx(deep_gs8.values[100], rel=1e-12)
