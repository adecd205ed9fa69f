import numpy as np
import pytest
import scipy.sparse as sp

from magtb.errors import GapError, SizeError, SolverError
from magtb.geometry import build_square_lattice
from magtb.spectral import (
    SmoothStep,
    butterfly,
    bulk_projected_gaps,
    eig_hermitian,
    farey_fluxes,
    nth_bulk_gap,
    smooth_function_of,
    spectral_projection,
    unitary_exp_step,
)
from magtb.tbmodel import build_tb


def test_eig_scalar():
    spec = eig_hermitian(np.array([[3.25]]))
    assert spec.eigenvalues[0] == pytest.approx(3.25)


def test_eig_pauli_x():
    spec = eig_hermitian(np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex))
    assert spec.eigenvalues.tolist() == pytest.approx([-1.0, 1.0])


def test_eig_grid_graph_closed_form():
    # 10x10 sample at zero flux: eigenvalues 2 cos(k pi/11) + 2 cos(l pi/11)
    h = build_tb(build_square_lattice(1.0, 10, 10), 0.0)
    spec = eig_hermitian(h)
    k = np.arange(1, 11)
    exact = np.sort((2 * np.cos(k * np.pi / 11))[:, None] + (2 * np.cos(k * np.pi / 11))[None, :], axis=None)
    assert np.abs(spec.eigenvalues - exact).max() < 1e-10


def test_eig_rejects_non_hermitian():
    with pytest.raises(SolverError):
        eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eig_size_refusal():
    big = sp.eye(4001, format="csr", dtype=complex)
    with pytest.raises(SizeError):
        eig_hermitian(big)


def test_parseval(harper_third):
    spec = harper_third["spec"]
    h = harper_third["h"].dense()
    n = h.shape[0]
    assert abs(spec.eigenvalues.sum() - np.trace(h).real) <= 1e-8 * spec.norm_bound * n


def test_projection_trivial_windows(harper_third):
    spec = harper_third["spec"]
    lo = spec.eigenvalues[0]
    hi = spec.eigenvalues[-1]
    p0 = spectral_projection(spec, (lo - 3.0, lo - 2.0))
    assert p0.count == 0 and np.allclose(p0.projector, 0.0)
    pid = spectral_projection(spec, (lo - 1.0, hi + 1.0))
    assert pid.count == len(spec.eigenvalues)
    assert np.allclose(pid.projector, np.eye(len(spec.eigenvalues)), atol=1e-10)


def test_projection_band_count(harper_third):
    spec, ps, gap = harper_third["spec"], harper_third["ps"], harper_third["gap"]
    p = spectral_projection(spec, (spec.eigenvalues[0] - 1.0, 0.5 * (gap[0] + gap[1])))
    # lowest of three magnetic bands plus a handful of edge states
    assert abs(p.trace - len(ps) / 3) <= 0.05 * len(ps)


def test_projection_idempotent_commutes(harper_third):
    p = harper_third["proj"].projector
    h = harper_third["h"].dense()
    assert np.abs(p @ p - p).max() <= 1e-10
    assert np.abs(p @ h - h @ p).max() <= 1e-9 * harper_third["spec"].norm_bound


def test_projection_endpoint_collision(harper_third):
    spec = harper_third["spec"]
    with pytest.raises(GapError):
        spectral_projection(spec, (spec.eigenvalues[0] - 1.0, float(spec.eigenvalues[5])))


def test_smooth_step_shape():
    g = SmoothStep((-1.0, 1.0))
    e = np.linspace(-3, 3, 601)
    v = g.value(e)
    assert np.all(v[e <= -1.0] == 1.0)
    assert np.all(v[e >= 1.0] == 0.0)
    assert np.all(np.diff(v) <= 1e-12)
    d = g.derivative(e)
    assert np.all(d[np.abs(e) >= 1.0] == 0.0)
    assert np.all(d[np.abs(e) < 0.99] < 0.0)


def test_smooth_step_all_ones(harper_third):
    spec = harper_third["spec"]
    g = SmoothStep((spec.eigenvalues[-1] + 1.0, spec.eigenvalues[-1] + 2.0))
    out = smooth_function_of(spec, g)
    assert np.allclose(out, np.eye(out.shape[0]), atol=1e-12)
    w = unitary_exp_step(spec, g)
    assert np.allclose(w, np.eye(w.shape[0]), atol=1e-10)


def test_sharp_step_matches_projection(harper_third):
    spec, gap = harper_third["spec"], harper_third["gap"]
    mu = 0.5 * (gap[0] + gap[1])
    g = SmoothStep((mu - 0.01, mu + 0.01), kind="sharp")
    out = smooth_function_of(spec, g)
    p = spectral_projection(spec, (spec.eigenvalues[0] - 1.0, mu))
    assert np.abs(out - p.projector).max() <= 1e-10


def test_step_in_empty_window_gives_exact_projection(harper_third):
    # no eigenvalues inside the transition window: g(H)^2 - g(H) = 0 exactly
    spec, gap = harper_third["spec"], harper_third["gap"]
    evs = spec.eigenvalues
    inside = evs[(evs > gap[0]) & (evs < gap[1])]
    lo = gap[0] if inside.size == 0 else np.max(inside[inside < 0.5 * (gap[0] + gap[1])], initial=gap[0])
    hi = gap[1] if inside.size == 0 else np.min(inside[inside > 0.5 * (gap[0] + gap[1])], initial=gap[1])
    g = SmoothStep((lo + 1e-6, hi - 1e-6))
    gh = smooth_function_of(spec, g)
    assert np.abs(gh @ gh - gh).max() < 1e-10
    w = unitary_exp_step(spec, g)
    assert np.abs(w @ w.conj().T - np.eye(w.shape[0])).max() <= 1e-10


def test_farey_enumeration():
    fl = farey_fluxes(4)
    assert fl == [(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4)]


def test_butterfly_zero_flux_column():
    data = butterfly(extent=10, q_max=3)
    zero = [e for e in data.entries if e[0] == 0][0]
    assert zero[3].min() >= -4.0 - 1e-12 and zero[3].max() <= 4.0 + 1e-12


def test_butterfly_half_flux_chiral():
    # E and -E both present at half flux, and the zero-energy gap is a
    # finite-size artifact closing like 1/extent (Dirac points)
    mins = []
    for extent in (10, 20):
        data = butterfly(extent=extent, q_max=2)
        half = [e for e in data.entries if (e[0], e[1]) == (1, 2)][0][3]
        assert np.abs(half + half[::-1]).max() < 1e-10
        mins.append(np.abs(half).min())
        assert mins[-1] <= 6.0 / extent
    assert mins[1] < mins[0]


def test_butterfly_row_count():
    data = butterfly(extent=20, q_max=12)
    assert sum(len(e[3]) for e in data.entries) >= 1000


def test_butterfly_validates_qmax():
    with pytest.raises(ValueError):
        butterfly(extent=8, q_max=1)


def _bloch_bands_third(nk=24):
    """Magnetic-cell Bloch bands of the flux-2pi/3 model (independent oracle)."""
    q, p = 3, 1
    phi = p / q
    bands = []
    for k1 in np.linspace(0, 2 * np.pi / q, nk, endpoint=False):
        for k2 in np.linspace(0, 2 * np.pi, nk, endpoint=False):
            h = np.zeros((q, q), complex)
            for j in range(q - 1):
                h[j, j + 1] += 1.0
                h[j + 1, j] += 1.0
            h[q - 1, 0] += np.exp(1j * q * k1)
            h[0, q - 1] += np.exp(-1j * q * k1)
            h += np.diag(2 * np.cos(k2 - 2 * np.pi * phi * np.arange(q)))
            bands.append(np.linalg.eigvalsh(h))
    return np.asarray(bands)


def test_three_bands_at_third_flux(harper_third):
    # bulk-weighted spectrum of the finite sample confined to the Bloch bands
    bands = _bloch_bands_third()
    ranges = [(bands[:, b].min() - 0.05, bands[:, b].max() + 0.05) for b in range(3)]
    spec, ps = harper_third["spec"], harper_third["ps"]
    # each detected bulk gap's center falls inside a true Bloch gap
    bloch_gaps = [(ranges[0][1], ranges[1][0]), (ranges[1][1], ranges[2][0])]
    for lo, hi in sorted(bulk_projected_gaps(spec, ps)[:2], key=lambda g: g[0]):
        mid = 0.5 * (lo + hi)
        assert any(glo < mid < ghi for glo, ghi in bloch_gaps)
    pts = ps.points
    inner = np.all((pts >= 6) & (pts <= 17), axis=1)
    mass = np.sum(np.abs(spec.eigenvectors[inner, :]) ** 2, axis=0)
    bulk_evs = spec.eigenvalues[mass >= 0.25 * mass.max()]
    in_band = np.zeros(len(bulk_evs), dtype=bool)
    for lo, hi in ranges:
        in_band |= (bulk_evs >= lo) & (bulk_evs <= hi)
    assert np.all(in_band)


def test_nth_bulk_gap_bounds(harper_third):
    spec, ps = harper_third["spec"], harper_third["ps"]
    with pytest.raises(GapError):
        nth_bulk_gap(spec, ps, 3, 5)
