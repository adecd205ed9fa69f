import numpy as np
import pytest

from magtb.atomic import AtomicWell, solve_radial_ground_state
from magtb.continuum import (
    ContinuumGrid,
    build_continuum_hamiltonian,
    double_well_splitting,
    lowest_eigenvalues,
    plaquette_flux_check,
    scaled_spectrum_compare,
)
from magtb.errors import PreconditionError, ResolutionError
from magtb.geometry import build_square_lattice, from_points
from magtb.overlaps import hopping
from magtb.tbmodel import admissible_lambda


@pytest.fixture(scope="module")
def free_well():
    return AtomicWell(0.0, 1.0)


@pytest.fixture(scope="module")
def soft_well():
    return AtomicWell(-0.5, 1.0)


def test_landau_level(free_well):
    lam = 6.0
    grid = ContinuumGrid.covering(None, lam, a_scale=2.0, margin=2.5)
    ch = build_continuum_hamiltonian(None, free_well, lam, grid, e0=0.0)
    assert plaquette_flux_check(ch) < 1e-12
    evs = lowest_eigenvalues(ch, 3, sigma=0.5 * lam)
    assert abs(evs[0] - lam) / lam < 5e-3


def test_landau_level_wall_contamination_negligible(free_well):
    # beyond the design margin 6/sqrt(lam) the Dirichlet wall moves the
    # level by far less than the grid error (same h, so that cancels)
    lam = 6.0
    vals = []
    for margin in (6.0 / np.sqrt(lam), 6.0 / np.sqrt(lam) + 0.8):
        grid = ContinuumGrid.covering(None, lam, a_scale=2.0, margin=margin)
        ch = build_continuum_hamiltonian(None, free_well, lam, grid, e0=0.0)
        vals.append(lowest_eigenvalues(ch, 1, sigma=0.5 * lam)[0])
    assert abs(vals[1] - vals[0]) < 1e-5


def test_single_well_sits_at_zero(soft_well):
    lam = 6.0
    one = from_points([[0.0, 0.0]])
    grid = ContinuumGrid.covering(one, lam, a_scale=2.5)
    ch = build_continuum_hamiltonian(one, soft_well, lam, grid)
    evs = lowest_eigenvalues(ch, 1, sigma=-0.5)
    assert abs(evs[0]) < 1e-3 * lam**2


def test_double_well_split_symmetrically(soft_well):
    lam = 5.0
    a = 2.2
    pair = from_points([[0.0, 0.0], [a, 0.0]])
    grid = ContinuumGrid.covering(pair, lam, a)
    gs = solve_radial_ground_state(soft_well, lam, r_max=a + 1.0 + 8.0 / np.sqrt(lam))
    ch = build_continuum_hamiltonian(pair, soft_well, lam, grid, e0=gs.e0_raw)
    evs = lowest_eigenvalues(ch, 2, sigma=-0.1)
    assert np.abs(evs).max() < 0.05
    assert evs[0] < evs[1]


def test_hermiticity_and_flux(soft_well):
    lam = 5.0
    one = from_points([[0.0, 0.0]])
    grid = ContinuumGrid.covering(one, lam, a_scale=2.2)
    ch = build_continuum_hamiltonian(one, soft_well, lam, grid)
    dev = np.abs(ch.operator - ch.operator.conj().T)
    assert dev.max() <= 1e-12
    assert plaquette_flux_check(ch) < 1e-12


def test_lambda_ceiling(soft_well):
    pair = from_points([[0.0, 0.0], [2.2, 0.0]])
    grid = ContinuumGrid.covering(pair, 8.0, 2.2)
    with pytest.raises(PreconditionError):
        build_continuum_hamiltonian(pair, soft_well, 11.0, grid)
    with pytest.raises(PreconditionError):
        double_well_splitting(soft_well, 11.0, 2.2)
    with pytest.raises(PreconditionError):
        double_well_splitting(soft_well, 3.0, 2.2)


def test_overlap_and_margin_preconditions(soft_well):
    with pytest.raises(PreconditionError):
        double_well_splitting(soft_well, 5.0, 1.9)  # a <= 2 r0
    pair = from_points([[0.0, 0.0], [2.2, 0.0]])
    tight = ContinuumGrid(-1.0, -1.0, 0.04, 60, 50)  # domain too small for margins
    with pytest.raises(PreconditionError):
        build_continuum_hamiltonian(pair, soft_well, 5.0, tight)


def test_resolution_gate(soft_well):
    pair = from_points([[0.0, 0.0], [2.2, 0.0]])
    coarse = ContinuumGrid(-5.0, -5.0, 0.2, 70, 60)
    with pytest.raises(ResolutionError):
        build_continuum_hamiltonian(pair, soft_well, 5.0, coarse)


def test_splitting_ratio_example():
    # the deep-well single point: lam=4, a = 2 r0 + 1.5
    rep = double_well_splitting(AtomicWell(-4.0, 1.0), 4.0, 3.5)
    assert 0.5 <= rep.ratio <= 2.0


def test_splitting_refinement_gate(soft_well):
    rep = double_well_splitting(soft_well, 4.0, 2.2)
    assert rep.refinement_change is not None
    assert rep.refinement_change < 0.02


def test_cluster_scale(soft_well):
    # low-lying spectrum after the shift is within a few hoppings of zero
    lam, a = 4.0, 2.2
    pair = from_points([[0.0, 0.0], [a, 0.0]])
    grid = ContinuumGrid.covering(pair, lam, a)
    gs = solve_radial_ground_state(soft_well, lam, r_max=a + 1.0 + 8.0 / np.sqrt(lam))
    ch = build_continuum_hamiltonian(pair, soft_well, lam, grid, e0=gs.e0_raw)
    rho = abs(hopping(gs, np.array([a, 0.0])).value)
    evs = lowest_eigenvalues(ch, 2, sigma=-6.0 * rho)
    assert np.abs(evs).max() <= 6.0 * rho


def test_scaled_spectrum_single_well(soft_well):
    one = from_points([[0.0, 0.0]])
    one = from_points([[0.0, 0.0]], label="single")
    rep = scaled_spectrum_compare(one, soft_well, 5.0, 0.0, extrapolate=False)
    assert rep.max_deviation == pytest.approx(0.0, abs=1e-12)  # both centered spectra are {0}
    assert abs(rep.cluster_shift) < 0.05


def test_scaled_spectrum_pair(soft_well):
    a = 2.2
    lam = admissible_lambda(0.0, a, 2)
    pair = from_points([[0.0, 0.0], [a, 0.0]])
    rep = scaled_spectrum_compare(pair, soft_well, lam, 0.0)
    assert np.allclose(rep.tb_eigenvalues, [-1.0, 1.0])
    assert rep.max_deviation < 0.05


def test_scaled_spectrum_size_gate(soft_well):
    big = build_square_lattice(2.2, 4, 4)
    with pytest.raises(PreconditionError):
        scaled_spectrum_compare(big, soft_well, 5.0, 0.0)
