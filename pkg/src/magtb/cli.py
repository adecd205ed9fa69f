"""Command-line surface.

Commands: validate, atomic, hopping, gramian, tb, butterfly, chern, edge,
bec, reduce, reproduce-all.  Every command writes CSV/JSON artifacts with a
metadata header (command, config hash, timestamp) into --out.  Exit codes:
0 success, 2 a validation or acceptance check failed, 1 error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import acceptance, artifacts
from .atomic import AtomicWell, gaussian_decay_certificate, solve_radial_ground_state
from .geometry import (
    DisplacementSeed,
    bonds_csv_rows,
    build_honeycomb,
    build_square_lattice,
    neighbor_graph,
    random_displacement,
    validate_assumptions,
)
from .overlaps import gramian, hopping, inverse_sqrt, reduced_hamiltonian
from .spectral import SmoothStep, butterfly, eig_hermitian, nth_bulk_gap, spectral_projection
from .tbmodel import FluxParameter, admissible_lambda, build_random_hopping, build_tb
from .topology import (
    FluxInsertionUnitary,
    SwitchFunction,
    bec_check,
    edge_conductance,
    edge_projection_defect,
    flux_insertion_index,
    kubo_chern,
)
from .util import wedge


def _flux(text: str) -> tuple[int, int]:
    frac = Fraction(text)
    return frac.numerator, frac.denominator


def _build_lattice(args) -> "PointSet":
    if args.lattice == "square":
        ps = build_square_lattice(args.a, args.nx, args.ny)
    elif args.lattice == "honeycomb":
        ps = build_honeycomb(args.a, args.nx, args.ny)
    else:
        raise ValueError(f"unknown lattice {args.lattice!r}")
    if args.displace:
        ps = random_displacement(ps, args.displace, DisplacementSeed(args.seed))
    return ps


def _beta(args, a: float) -> float:
    if args.flux is not None:
        p, q = args.flux
        return FluxParameter.from_flux(p, q, a).beta
    return args.beta


def cmd_validate(args) -> int:
    ps = _build_lattice(args)
    report = validate_assumptions(ps)
    cfg = {"lattice": args.lattice, "a": args.a, "nx": args.nx, "ny": args.ny, "seed": args.seed}
    artifacts.write_json(Path(args.out) / "validation.json", "validate", cfg, report.as_dict())
    artifacts.write_csv(
        Path(args.out) / "bonds.csv",
        "validate",
        cfg,
        ["i", "j", "xi", "yi", "xj", "yj", "dist", "kind"],
        bonds_csv_rows(ps),
    )
    print(json.dumps(report.as_dict(), indent=2))
    return 0 if report.passed else 2


def cmd_atomic(args) -> int:
    well = AtomicWell(args.vmin, args.r0)
    gs = solve_radial_ground_state(well, args.lam, n_grid=args.ngrid, r_max=args.rmax)
    cert = gaussian_decay_certificate(gs)
    cfg = {"lambda": args.lam, "vmin": args.vmin, "r0": args.r0, "ngrid": args.ngrid}
    artifacts.write_csv(
        Path(args.out) / "ground_state.csv", "atomic", cfg, ["r", "phi"], zip(gs.grid, gs.values)
    )
    payload = {
        "lambda": gs.lam,
        "e0_raw": gs.e0_raw,
        "gap": gs.gap,
        "angular_sector_check": gs.angular_sector_check,
        "decay_C_fit": cert.C_fit,
        "decay_rate_fit": cert.rate_fit,
        "decay_passes": cert.passes,
    }
    artifacts.write_json(Path(args.out) / "ground_state.json", "atomic", cfg, payload)
    print(json.dumps(payload, indent=2))
    return 0


def cmd_hopping(args) -> int:
    well = AtomicWell(args.vmin, args.r0)
    a = args.a
    cfg = {"lambdas": args.lambdas, "a": a, "vmin": args.vmin, "r0": args.r0}
    rows = []
    for lam in args.lambdas:
        gs = solve_radial_ground_state(well, lam, r_max=a + args.r0 + 8.0 / np.sqrt(lam))
        hv = hopping(gs, np.array([a, 0.0]))
        lo = np.exp(-0.25 * lam * (a**2 + 4 * np.sqrt(abs(args.vmin)) * a))
        hi = lam**2.5 * np.exp(-0.25 * lam * ((a - args.r0) ** 2 - args.r0**2))
        rows.append((lam, abs(hv.value), lo, hi))
    artifacts.write_csv(
        Path(args.out) / "hopping.csv", "hopping", cfg, ["lambda", "abs_rho", "bound_lo", "bound_hi"], rows
    )
    for row in rows:
        print(f"lambda={row[0]}: |rho|={row[1]:.6e}")
    return 0


def cmd_gramian(args) -> int:
    ps = _build_lattice(args)
    well = AtomicWell(args.vmin, args.r0)
    diag = float(np.linalg.norm(ps.points.max(axis=0) - ps.points.min(axis=0)))
    gs = solve_radial_ground_state(well, args.lam, r_max=diag / 2 + args.r0 + 8.0 / np.sqrt(args.lam))
    g = gramian(ps, gs)
    m = inverse_sqrt(g)
    cfg = {"lattice": args.lattice, "a": args.a, "nx": args.nx, "ny": args.ny, "lambda": args.lam, "vmin": args.vmin}
    artifacts.write_json(
        Path(args.out) / "gramian.json",
        "gramian",
        cfg,
        {
            "deviation_norm": g.deviation_norm,
            "min_eigenvalue": g.min_eigenvalue,
            "gramian": artifacts.complex_matrix_payload(g.matrix),
            "orthonormalizer": artifacts.complex_matrix_payload(m.matrix),
        },
    )
    print(f"||G-Id|| = {g.deviation_norm:.6e}, min eig = {g.min_eigenvalue:.6f}")
    return 0


def cmd_tb(args) -> int:
    ps = _build_lattice(args)
    beta = _beta(args, ps.a)
    if args.displace:
        tbh = build_random_hopping(ps, beta, args.disorder_c)
    else:
        tbh = build_tb(ps, beta)
    cfg = {
        "lattice": args.lattice, "a": args.a, "nx": args.nx, "ny": args.ny,
        "beta": beta, "seed": args.seed, "displace": args.displace,
    }
    coo = tbh.matrix().tocoo()
    artifacts.write_csv(
        Path(args.out) / "tb.csv",
        "tb",
        cfg,
        ["row", "col", "re", "im"],
        zip(coo.row, coo.col, coo.data.real, coo.data.imag),
    )
    artifacts.write_json(
        Path(args.out) / "tb_meta.json",
        "tb",
        cfg,
        {"beta": beta, "a": ps.a, "label": ps.label, "seed": args.seed, "n_sites": len(ps)},
    )
    print(f"wrote {coo.nnz} entries over {len(ps)} sites")
    return 0


def cmd_butterfly(args) -> int:
    data = butterfly(extent=args.size, q_max=args.qmax)
    cfg = {"size": args.size, "qmax": args.qmax}
    artifacts.write_csv(Path(args.out) / "butterfly.csv", "butterfly", cfg, ["flux", "energy"], data.csv_rows())
    n = sum(len(e[3]) for e in data.entries)
    print(f"wrote {n} (flux, energy) rows for {len(data.entries)} flux values")
    return 0


def _bulk_gap_setup(args):
    p, q = args.flux
    ps = build_square_lattice(1.0, args.size, args.size)
    beta = FluxParameter.from_flux(p, q).beta
    h = build_tb(ps, beta)
    spec = eig_hermitian(h)
    gap = nth_bulk_gap(spec, ps, q, args.gap)
    return ps, beta, h, spec, gap


def cmd_chern(args) -> int:
    ps, beta, h, spec, gap = _bulk_gap_setup(args)
    mu = 0.5 * (gap[0] + gap[1])
    proj = spectral_projection(spec, (spec.eigenvalues[0] - 1.0, mu))
    c = np.floor((args.size - 1) / 2.0) + 0.5
    rk = kubo_chern(proj, ps, SwitchFunction(1, c), SwitchFunction(2, c))
    rf = flux_insertion_index(proj, ps, FluxInsertionUnitary.at(ps, np.array([c, c])))
    cfg = {"flux": f"{args.flux[0]}/{args.flux[1]}", "size": args.size, "gap": args.gap}
    payload = {"kubo": rk.as_dict(), "flux_insertion": rf.as_dict(), "gap_window": list(gap)}
    artifacts.write_json(Path(args.out) / "chern.json", "chern", cfg, payload)
    print(json.dumps({"kubo": rk.value, "nearest_integer": rk.nearest_integer,
                      "flux_insertion": rf.value}, indent=2))
    return 0


def cmd_edge(args) -> int:
    p, q = args.flux
    bulk_args = argparse.Namespace(flux=args.flux, size=args.bulk_size, gap=args.gap)
    _, beta, _, bulk_spec, gap = _bulk_gap_setup(bulk_args)
    nx, ny = args.nx, args.ny
    eps_ = build_square_lattice(1.0, nx, ny)
    eh = build_tb(eps_, beta)
    espec = eig_hermitian(eh)
    width = gap[1] - gap[0]
    g = SmoothStep((gap[0] + 0.2 * width, gap[1] - 0.2 * width))
    l1 = SwitchFunction(1, np.floor((nx - 1) / 2.0) + 0.5)
    rep = edge_conductance(eh, espec, g, l1, bulk_gap=gap)
    prof = edge_projection_defect(eh, espec, g)
    cfg = {"flux": f"{p}/{q}", "nx": nx, "ny": ny, "gap": args.gap}
    artifacts.write_json(
        Path(args.out) / "edge.json", "edge", cfg,
        {"edge_conductance": rep.as_dict(), "defect_kappa": prof.kappa_fit, "defect_passes": prof.passes},
    )
    artifacts.write_csv(Path(args.out) / "defect.csv", "edge", cfg, ["depth", "max_defect"], prof.csv_rows())
    print(json.dumps({"edge_conductance": rep.value, "kappa_fit": prof.kappa_fit}, indent=2))
    return 0


def cmd_bec(args) -> int:
    ps, beta, h, spec, gap = _bulk_gap_setup(args)
    nx, ny = 3 * args.size // 2, args.size * 3 // 4
    eps_ = build_square_lattice(1.0, nx, ny)
    eh = build_tb(eps_, beta)
    espec = eig_hermitian(eh)
    width = gap[1] - gap[0]
    g = SmoothStep((gap[0] + 0.2 * width, gap[1] - 0.2 * width))
    report = bec_check(h, spec, eh, espec, gap, g)
    cfg = {"flux": f"{args.flux[0]}/{args.flux[1]}", "size": args.size, "gap": args.gap}
    artifacts.write_json(Path(args.out) / "bec.json", "bec", cfg, report.as_dict())
    print(json.dumps({k: v.value for k, v in report.reports().items()}, indent=2))
    print(f"max nearest-integer disagreement: {report.max_disagreement}")
    return 0 if report.max_disagreement == 0 else 2


def cmd_reduce(args) -> int:
    a = args.a
    p, q = args.flux
    beta = FluxParameter.from_flux(p, q, a).beta
    well = AtomicWell(args.vmin, args.r0)
    ps = build_square_lattice(a, args.nx, args.ny)
    pts = ps.points
    rows = []
    last_red = None
    for r in args.rs:
        lam = admissible_lambda(beta, a, r)
        gs = solve_radial_ground_state(well, lam, n_grid=3000, r_max=4 * a)
        red = reduced_hamiltonian(ps, gs)
        last_red = (lam, red)
        nn_dev, nnn_mag = 0.0, 0.0
        for i in range(len(ps)):
            for j in range(len(ps)):
                d = float(np.hypot(*(pts[j] - pts[i])))
                if abs(d - a) < 1e-9 * a:
                    target = np.exp(1j * beta * wedge(pts[j], pts[i]))
                    nn_dev = max(nn_dev, abs(red.matrix[i, j] - target))
                elif abs(d - a * np.sqrt(2)) < 1e-9 * a:
                    nnn_mag = max(nnn_mag, abs(red.matrix[i, j]))
        rows.append((r, lam, red.normalization, nn_dev, nnn_mag))
    cfg = {"flux": f"{p}/{q}", "a": a, "vmin": args.vmin, "r0": args.r0, "nx": args.nx, "ny": args.ny}
    artifacts.write_csv(
        Path(args.out) / "reduce.csv", "reduce", cfg,
        ["r", "lambda", "rho", "max_nn_deviation", "max_nnn_over_rho"], rows,
    )
    artifacts.write_json(
        Path(args.out) / "reduced_hamiltonian.json", "reduce", cfg,
        {
            "lambda": last_red[0],
            "rho": last_red[1].normalization,
            "orthonormalized": last_red[1].orthonormalized,
            "matrix": artifacts.complex_matrix_payload(last_red[1].matrix),
        },
    )
    for row in rows:
        print(f"r={row[0]} lambda={row[1]:.4f}: NN dev={row[3]:.3e}, NNN/rho={row[4]:.3e}")
    decreasing = all(r1[3] >= r2[3] for r1, r2 in zip(rows, rows[1:]))
    return 0 if decreasing else 2


def cmd_reproduce_all(args) -> int:
    suite = json.loads(Path(args.suite).read_text())
    results, errors = [], 0
    cfg = {"suite": str(args.suite)}
    for case in suite:
        name = case["case"]
        try:
            res = acceptance.run_case(name, case.get("params"))
        except Exception as exc:  # keep running the remaining cases
            errors += 1
            print(f"ERROR {name}: {exc}", file=sys.stderr)
            continue
        for csv_name, (header, rows) in res.details.pop("_csv", {}).items():
            artifacts.write_csv(Path(args.out) / f"{csv_name}.csv", "reproduce-all", cfg, header, rows)
        results.append(res)
        print(res.line())
    artifacts.write_json(
        Path(args.out) / "reproduce_all.json",
        "reproduce-all",
        cfg,
        {"results": [{"name": r.name, "passed": r.passed, "seconds": r.seconds, "details": r.details} for r in results]},
    )
    if errors:
        return 1
    return 0 if all(r.passed for r in results) else 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="magtb", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, lattice=False, lam=False, well=False, flux=False):
        p.add_argument("--out", default="out", help="artifact directory")
        p.add_argument("--seed", type=int, default=0)
        if lattice:
            p.add_argument("--lattice", default="square", choices=["square", "honeycomb"])
            p.add_argument("--a", type=float, default=1.0)
            p.add_argument("--nx", type=int, default=10)
            p.add_argument("--ny", type=int, default=10)
            p.add_argument("--displace", type=float, default=0.0,
                           help="random-displacement coupling (> 4 enables disorder)")
            p.add_argument("--disorder-c", type=float, default=0.5)
        if lam:
            p.add_argument("--lambda", dest="lam", type=float, required=True)
        if well:
            p.add_argument("--vmin", type=float, default=-4.0)
            p.add_argument("--r0", type=float, default=1.0)
        if flux:
            grp = p.add_mutually_exclusive_group()
            grp.add_argument("--flux", type=_flux, default=None, help="plaquette flux as p/q of 2 pi")
            grp.add_argument("--beta", type=float, default=0.0)

    p = sub.add_parser("validate", help="build a lattice and check the spacing assumptions")
    common(p, lattice=True)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("atomic", help="solve the single-well radial ground state")
    common(p, lam=True, well=True)
    p.add_argument("--ngrid", type=int, default=2000)
    p.add_argument("--rmax", type=float, default=None)
    p.set_defaults(fn=cmd_atomic)

    p = sub.add_parser("hopping", help="hopping amplitude over a coupling sweep")
    common(p, well=True)
    p.add_argument("--lambdas", type=float, nargs="+", required=True)
    p.add_argument("--a", type=float, default=3.0)
    p.set_defaults(fn=cmd_hopping)

    p = sub.add_parser("gramian", help="orbital Gramian and orthonormalizer on a patch")
    common(p, lattice=True, lam=True, well=True)
    p.set_defaults(fn=cmd_gramian)

    p = sub.add_parser("tb", help="export the magnetic hopping matrix")
    common(p, lattice=True, flux=True)
    p.set_defaults(fn=cmd_tb)

    p = sub.add_parser("butterfly", help="spectrum over all rational fluxes q <= qmax")
    common(p)
    p.add_argument("--qmax", type=int, default=20)
    p.add_argument("--size", type=int, default=24)
    p.set_defaults(fn=cmd_butterfly)

    p = sub.add_parser("chern", help="bulk Hall index at rational flux")
    common(p)
    p.add_argument("--flux", type=_flux, required=True)
    p.add_argument("--size", type=int, default=40)
    p.add_argument("--gap", type=int, default=1, help="bulk gap index (1-based, by energy)")
    p.set_defaults(fn=cmd_chern)

    p = sub.add_parser("edge", help="edge conductance and defect decay on a strip")
    common(p)
    p.add_argument("--flux", type=_flux, required=True)
    p.add_argument("--nx", type=int, default=60)
    p.add_argument("--ny", type=int, default=30)
    p.add_argument("--bulk-size", type=int, default=24)
    p.add_argument("--gap", type=int, default=1)
    p.set_defaults(fn=cmd_edge)

    p = sub.add_parser("bec", help="bulk and edge indices for the same gap")
    common(p)
    p.add_argument("--flux", type=_flux, required=True)
    p.add_argument("--size", type=int, default=40)
    p.add_argument("--gap", type=int, default=1)
    p.set_defaults(fn=cmd_bec)

    p = sub.add_parser("reduce", help="matrix elements vs scale-free phases at matched couplings")
    common(p, well=True)
    p.add_argument("--flux", type=_flux, required=True)
    p.add_argument("--a", type=float, default=2.5)
    p.add_argument("--nx", type=int, default=3)
    p.add_argument("--ny", type=int, default=3)
    p.add_argument("--rs", type=int, nargs="+", default=[3, 4])
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("reproduce-all", help="run every acceptance case in a suite file")
    p.add_argument("suite")
    p.add_argument("--out", default="out")
    p.set_defaults(fn=cmd_reproduce_all)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
