"""Acceptance checks: one callable per shipped verification case.

Each case returns a CaseResult with a pass flag and the measured numbers, so
the same implementations back both the test suite and the ``reproduce-all``
command.  Tolerances are pinned here, not in the callers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .atomic import AtomicWell, landau_profile, solve_radial_ground_state
from .continuum import double_well_splitting, scaled_spectrum_compare
from .geometry import build_square_lattice
from .overlaps import gramian, hopping, inverse_sqrt, reduced_hamiltonian
from .spectral import SmoothStep, eig_hermitian, nth_bulk_gap, spectral_projection
from .tbmodel import FluxParameter, admissible_lambda, build_tb
from .topology import (
    FluxInsertionUnitary,
    SwitchFunction,
    edge_conductance,
    edge_projection_defect,
    edge_index_unitary,
    flux_insertion_index,
    kubo_chern,
)
from .util import linear_fit, wedge


@dataclass
class CaseResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} ({self.seconds:.1f}s)"


def _timed(fn):
    def wrapper(**kwargs):
        t0 = time.time()
        res = fn(**kwargs)
        res.seconds = time.time() - t0
        return res

    return wrapper


@_timed
def landau_oracle(lam: float = 10.0, n_grid: int = 4000) -> CaseResult:
    """Free-field solver against the exact magnetic ground state."""
    well = AtomicWell(v_min=0.0, r0=1.0)
    gs = solve_radial_ground_state(well, lam, n_grid=n_grid)
    rel = abs(gs.e0_raw - lam) / lam
    exact = landau_profile(lam, gs.grid)
    h = gs.grid[1] - gs.grid[0]
    l2 = float(np.sqrt(np.sum((gs.values - exact) ** 2 * 2 * np.pi * gs.grid) * h))
    passed = rel < 1e-6 and l2 < 1e-6
    return CaseResult("landau_oracle", passed, {"energy_rel_err": rel, "profile_l2_err": l2})


@_timed
def hopping_bounds(lams=(6.0, 8.0, 10.0, 12.0, 14.0), v_min: float = -4.0, r0: float = 1.0) -> CaseResult:
    """Exponential decay of the hopping amplitude within the two-sided bracket."""
    a = 2 * r0 + 1.0
    vals, im_ratio = [], 0.0
    for lam in lams:
        gs = solve_radial_ground_state(AtomicWell(v_min, r0), lam, r_max=a + r0 + 8.0 / np.sqrt(lam))
        hv = hopping(gs, np.array([a, 0.0]))
        vals.append(abs(hv.value))
        im_ratio = max(im_ratio, abs(hv.value.imag) / abs(hv.value))
    slope, _, r2 = linear_fit(np.asarray(lams), np.log(vals))
    upper_rate = -((a - r0) ** 2 - r0**2) / 4.0
    gamma0_fit = max(0.0, -4.0 * slope - a**2 - 4.0 * np.sqrt(abs(v_min)) * a)
    lower_rate = -(a**2 + 4.0 * np.sqrt(abs(v_min)) * a + gamma0_fit) / 4.0
    passed = r2 > 0.99 and lower_rate - 1e-12 <= slope <= upper_rate and im_ratio < 1e-8
    return CaseResult(
        "hopping_bounds",
        passed,
        {
            "slope": slope,
            "r2": r2,
            "bracket": [lower_rate, upper_rate],
            "gamma0_fit": gamma0_fit,
            "max_im_ratio": im_ratio,
        },
    )


@_timed
def gramian_decay(lams=(8.0, 10.0, 12.0), a: float = 3.0, v_min: float = -4.0) -> CaseResult:
    """||G - Id|| shrinking exponentially in the coupling; M G M = Id."""
    ps = build_square_lattice(a, 4, 4)
    devs, resid = [], 0.0
    for lam in lams:
        gs = solve_radial_ground_state(AtomicWell(v_min, 1.0), lam, r_max=5 * a)
        g = gramian(ps, gs)
        m = inverse_sqrt(g)
        devs.append(g.deviation_norm)
        resid = max(resid, float(np.abs(m.matrix @ g.matrix @ m.matrix - np.eye(len(ps))).max()))
    c_fit, _, _ = linear_fit(np.asarray(lams), np.log(devs))
    passed = c_fit < 0 and resid < 1e-10 and all(d1 > d2 for d1, d2 in zip(devs, devs[1:]))
    return CaseResult(
        "gramian_decay", passed, {"deviation_norms": devs, "rate_fit": -c_fit, "mgm_resid": resid}
    )


@_timed
def matrix_element_convergence(
    a: float = 2.5, v_min: float = -1.0, rs=(3, 4), flux=(1, 3)
) -> CaseResult:
    """Hopping-normalized elements against the scale-free phases at matched couplings."""
    beta = FluxParameter.from_flux(flux[0], flux[1], a).beta
    ps = build_square_lattice(a, 3, 3)
    pts = ps.points
    nn_devs, nnn_maxes = [], []
    for r in rs:
        lam = admissible_lambda(beta, a, r)
        gs = solve_radial_ground_state(AtomicWell(v_min, 1.0), lam, n_grid=3000, r_max=4 * a)
        red = reduced_hamiltonian(ps, gs)
        nn, nnn = [], []
        for i in range(len(ps)):
            for j in range(len(ps)):
                d = float(np.hypot(*(pts[j] - pts[i])))
                if abs(d - a) < 1e-9 * a:
                    target = np.exp(1j * beta * wedge(pts[j], pts[i]))
                    nn.append(abs(red.matrix[i, j] - target))
                elif abs(d - a * np.sqrt(2)) < 1e-9 * a:
                    nnn.append(abs(red.matrix[i, j]))
        nn_devs.append(max(nn))
        nnn_maxes.append(max(nnn))
    passed = nn_devs[-1] < nn_devs[0] and nnn_maxes[-1] < 0.1
    return CaseResult(
        "matrix_element_convergence",
        passed,
        {"nn_deviations": nn_devs, "nnn_over_rho": nnn_maxes, "couplings": [admissible_lambda(beta, a, r) for r in rs]},
    )


def _bulk_setup(p: int, q: int, size: int, gap_index: int):
    ps = build_square_lattice(1.0, size, size)
    beta = FluxParameter.from_flux(p, q).beta
    h = build_tb(ps, beta)
    spec = eig_hermitian(h)
    gap = nth_bulk_gap(spec, ps, q, gap_index)
    mu = 0.5 * (gap[0] + gap[1])
    proj = spectral_projection(spec, (spec.eigenvalues[0] - 1.0, mu))
    return ps, h, spec, gap, proj


def diophantine_chern(p: int, q: int, r: int) -> int:
    """TKNN integer for gap r at flux 2 pi p/q: r = p*t mod q, |t| <= q/2."""
    for t in range(-(q // 2), q // 2 + 1):
        if (p * t - r) % q == 0:
            return t
    raise ValueError(f"no Diophantine solution for p={p}, q={q}, r={r}")


@_timed
def bulk_chern(size: int = 40, p: int = 1, q: int = 3, gap_index: int = 1) -> CaseResult:
    """Kubo trace within 0.1 of the Diophantine integer; flux insertion agrees."""
    ps, h, spec, gap, proj = _bulk_setup(p, q, size, gap_index)
    c = np.floor((size - 1) / 2.0) + 0.5
    rk = kubo_chern(proj, ps, SwitchFunction(1, c), SwitchFunction(2, c))
    rf = flux_insertion_index(proj, ps, FluxInsertionUnitary.at(ps, np.array([c, c])))
    oracle = diophantine_chern(p, q, gap_index)
    passed = abs(rk.value - oracle) <= 0.1 and rf.nearest_integer == rk.nearest_integer
    return CaseResult(
        "bulk_chern",
        passed,
        {"kubo": rk.value, "flux_insertion": rf.value, "oracle": oracle, "gap": list(gap)},
    )


@_timed
def edge_bulk_correspondence(
    strip=(60, 30), bulk_size: int = 40, p: int = 1, q: int = 3, gap_index: int = 1
) -> CaseResult:
    """Edge conductance within 0.1 of the bulk value; step-profile invariance."""
    ps, h, spec, gap, proj = _bulk_setup(p, q, bulk_size, gap_index)
    c = np.floor((bulk_size - 1) / 2.0) + 0.5
    rk = kubo_chern(proj, ps, SwitchFunction(1, c), SwitchFunction(2, c))
    nx, ny = strip
    eps_ = build_square_lattice(1.0, nx, ny)
    eh = build_tb(eps_, FluxParameter.from_flux(p, q).beta)
    espec = eig_hermitian(eh)
    width = gap[1] - gap[0]
    delta = (gap[0] + 0.2 * width, gap[1] - 0.2 * width)
    l1 = SwitchFunction(1, np.floor((nx - 1) / 2.0) + 0.5)
    re1 = edge_conductance(eh, espec, SmoothStep(delta), l1, bulk_gap=gap)
    re2 = edge_conductance(eh, espec, SmoothStep(delta, width=(delta[1] - delta[0]) / 16.0), l1, bulk_gap=gap)
    passed = (
        abs(re1.value - rk.value) <= 0.1
        and re1.nearest_integer == rk.nearest_integer
        and re2.nearest_integer == re1.nearest_integer
    )
    return CaseResult(
        "edge_bulk_correspondence",
        passed,
        {"edge": re1.value, "edge_alt_profile": re2.value, "bulk": rk.value},
    )


@_timed
def edge_defect_decay(strip=(60, 30), p: int = 1, q: int = 3, gap_index: int = 1, bulk_size: int = 24) -> CaseResult:
    """Positive fitted decay rate for g(H)^2 - g(H) into the bulk."""
    ps = build_square_lattice(1.0, bulk_size, bulk_size)
    beta = FluxParameter.from_flux(p, q).beta
    spec = eig_hermitian(build_tb(ps, beta))
    gap = nth_bulk_gap(spec, ps, q, gap_index)
    width = gap[1] - gap[0]
    delta = (gap[0] + 0.2 * width, gap[1] - 0.2 * width)
    nx, ny = strip
    eps_ = build_square_lattice(1.0, nx, ny)
    eh = build_tb(eps_, beta)
    espec = eig_hermitian(eh)
    prof = edge_projection_defect(eh, espec, SmoothStep(delta))
    return CaseResult(
        "edge_defect_decay", prof.passes, {"kappa_fit": prof.kappa_fit, "profile_head": prof.max_defect[:6].tolist()}
    )


@_timed
def continuum_reduction_trend(
    v_min: float = -0.5, a: float = 2.2, lams=(4.0, 5.0, 6.0), patch_rs=(2, 3), flux=(1, 3)
) -> CaseResult:
    """Double-well splitting against 2|rho| and patch spectra along matched couplings."""
    well = AtomicWell(v_min, 1.0)
    splits = [double_well_splitting(well, lam, a) for lam in lams]
    ratios = [s.ratio for s in splits]
    trend_ok = all(abs(ratios[i] - 1.0) > abs(ratios[i + 1] - 1.0) for i in range(len(ratios) - 1))
    in_range = 0.5 <= ratios[-1] <= 2.0
    beta = FluxParameter.from_flux(flux[0], flux[1], a).beta
    patch = build_square_lattice(a, 2, 2)
    compares = [
        scaled_spectrum_compare(patch, well, admissible_lambda(beta, a, r), beta) for r in patch_rs
    ]
    patch_devs = [c.max_deviation for c in compares]
    patch_ok = patch_devs[-1] < patch_devs[0]
    passed = in_range and trend_ok and patch_ok
    eigen_rows = [row for c in compares for row in c.eigen_csv_rows()]
    return CaseResult(
        "continuum_reduction_trend",
        passed,
        {
            "ratios": ratios,
            "patch_deviations": patch_devs,
            "grid_h": [s.grid_h for s in splits],
            "_csv": {"continuum_eigen": (["lambda", "index", "E", "E_over_rho"], eigen_rows)},
        },
    )


@_timed
def property_suite(size: int = 40, p: int = 1, q: int = 3) -> CaseResult:
    """Hermiticity, gauge covariance, plaquette flux, Kubo robustness, band sum."""
    details = {}
    ok = True

    ps = build_square_lattice(1.0, 12, 12)
    beta = 0.4
    h = build_tb(ps, beta).dense()
    details["hermiticity"] = float(np.abs(h - h.conj().T).max())
    ok &= details["hermiticity"] <= 1e-12

    rng = np.random.default_rng(7)
    chi = np.exp(1j * rng.uniform(0, 2 * np.pi, len(ps)))
    hg = (chi[:, None] * h) * np.conj(chi)[None, :]
    ev = np.linalg.eigvalsh(h)
    evg = np.linalg.eigvalsh(hg)
    details["gauge_spectrum_dev"] = float(np.abs(ev - evg).max())
    ok &= details["gauge_spectrum_dev"] <= 1e-10

    target = np.exp(2j * beta)
    worst = 0.0
    for jy in range(11):
        for jx in range(11):
            i00 = jy * 12 + jx
            loop = [i00, i00 + 1, i00 + 13, i00 + 12]
            prod = 1.0 + 0.0j
            for s, d in zip(loop, loop[1:] + loop[:1]):
                prod *= h[d, s]
            worst = max(worst, abs(prod - target))
    details["plaquette_dev"] = worst
    ok &= worst <= 1e-12

    ps, hh, spec, gap, proj = _bulk_setup(p, q, size, 1)
    c = np.floor((size - 1) / 2.0) + 0.5
    base = kubo_chern(proj, ps, SwitchFunction(1, c), SwitchFunction(2, c)).value
    shifted = kubo_chern(proj, ps, SwitchFunction(1, c + 1.0), SwitchFunction(2, c)).value
    details["kubo_shift_change"] = abs(base - shifted)
    ok &= details["kubo_shift_change"] < 0.02

    beta_flux = FluxParameter.from_flux(p, q).beta
    hm = build_tb(build_square_lattice(1.0, size, size), -beta_flux)
    spec_m = eig_hermitian(hm)
    gap_m = nth_bulk_gap(spec_m, ps, q, 1)
    proj_m = spectral_projection(spec_m, (spec_m.eigenvalues[0] - 1.0, 0.5 * (gap_m[0] + gap_m[1])))
    mirrored = kubo_chern(proj_m, ps, SwitchFunction(1, c), SwitchFunction(2, c)).value
    details["beta_antisymmetry"] = abs(base + mirrored)
    ok &= details["beta_antisymmetry"] < 0.02

    gap2 = nth_bulk_gap(spec, ps, q, 2)
    edges = [spec.eigenvalues[0] - 1.0, 0.5 * (gap[0] + gap[1]), 0.5 * (gap2[0] + gap2[1]), spec.eigenvalues[-1] + 1.0]
    band_sum = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        pk = spectral_projection(spec, (lo, hi))
        band_sum += kubo_chern(pk, ps, SwitchFunction(1, c), SwitchFunction(2, c)).value
    details["band_chern_sum"] = band_sum
    ok &= abs(band_sum) < 0.3

    return CaseResult("property_suite", bool(ok), details)


CRITERIA = {
    "landau_oracle": landau_oracle,
    "hopping_bounds": hopping_bounds,
    "gramian_decay": gramian_decay,
    "matrix_element_convergence": matrix_element_convergence,
    "bulk_chern": bulk_chern,
    "edge_bulk_correspondence": edge_bulk_correspondence,
    "edge_defect_decay": edge_defect_decay,
    "continuum_reduction_trend": continuum_reduction_trend,
    "property_suite": property_suite,
}


def run_case(name: str, params: dict | None = None) -> CaseResult:
    if name not in CRITERIA:
        raise KeyError(f"unknown acceptance case {name!r}; choices: {sorted(CRITERIA)}")
    return CRITERIA[name](**(params or {}))
