import pytest

from magtb.atomic import AtomicWell, solve_radial_ground_state
from magtb.geometry import build_square_lattice
from magtb.spectral import eig_hermitian, nth_bulk_gap, spectral_projection
from magtb.tbmodel import FluxParameter, build_tb


@pytest.fixture(scope="session")
def deep_well():
    return AtomicWell(v_min=-4.0, r0=1.0)


@pytest.fixture(scope="session")
def shallow_well():
    return AtomicWell(v_min=-1.0, r0=1.0)


@pytest.fixture(scope="session")
def deep_gs8(deep_well):
    # reach covers hopping/Gramian integrals on patches with a = 3
    return solve_radial_ground_state(deep_well, 8.0, n_grid=2500, r_max=15.0)


@pytest.fixture(scope="session")
def deep_gs10(deep_well):
    return solve_radial_ground_state(deep_well, 10.0, n_grid=2500, r_max=15.0)


@pytest.fixture(scope="session")
def shallow_gs10(shallow_well):
    return solve_radial_ground_state(shallow_well, 10.0, n_grid=2500, r_max=12.0)


@pytest.fixture(scope="session")
def harper_third():
    """24x24 sample at flux 2 pi/3 with its spectrum, first gap, Fermi projection."""
    ps = build_square_lattice(1.0, 24, 24)
    beta = FluxParameter.from_flux(1, 3).beta
    h = build_tb(ps, beta)
    spec = eig_hermitian(h)
    gap = nth_bulk_gap(spec, ps, 3, 1)
    proj = spectral_projection(spec, (spec.eigenvalues[0] - 1.0, 0.5 * (gap[0] + gap[1])))
    return {"ps": ps, "beta": beta, "h": h, "spec": spec, "gap": gap, "proj": proj}


@pytest.fixture(scope="session")
def harper_strip():
    """40x20 strip at flux 2 pi/3 with its full eigendecomposition."""
    ps = build_square_lattice(1.0, 40, 20)
    beta = FluxParameter.from_flux(1, 3).beta
    h = build_tb(ps, beta)
    spec = eig_hermitian(h)
    return {"ps": ps, "beta": beta, "h": h, "spec": spec}
