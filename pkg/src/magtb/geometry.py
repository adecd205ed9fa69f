"""Discrete atomic-center sets and their neighbor structure.

A crystal here is a finite set of points in the plane with a strictly
positive minimal spacing ``a`` and a next-nearest spacing ``b_nnn`` bounded
away from ``a``.  Builders cover the square lattice, the honeycomb lattice,
half-plane truncations (edge geometries) and randomly displaced lattices.
Everything is immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import EmptySetError, PreconditionError

# Relative tolerance used to classify two distances as equal when splitting
# bonds into nearest / beyond-nearest; floating point needs a tie rule.
DIST_RTOL = 1e-9

# Hopping beyond this multiple of the minimal spacing is numerically zero at
# every coupling of interest, so neighbor scans stop there.
BEYOND_NN_CUTOFF = 3.0


@dataclass(frozen=True)
class PointSet:
    """Finite set of atomic centers with its spacing data.

    points : (N, 2) array, row per site, insertion order is the site index.
    a      : minimal pairwise spacing.
    b_nnn  : smallest pairwise distance strictly greater than ``a`` (inf when
             every pair sits at the minimal distance).
    label  : free-form provenance string.
    meta   : extra builder payload (sublattice tags, displacement data, ...).
    """

    points: np.ndarray
    a: float
    b_nnn: float
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must be an (N, 2) array")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def translate(self, shift) -> "PointSet":
        shifted = self.points + np.asarray(shift, dtype=float)
        return PointSet(shifted, self.a, self.b_nnn, self.label, dict(self.meta))

    def to_json(self) -> str:
        return json.dumps({"a": self.a, "points": self.points.tolist(), "label": self.label})

    @staticmethod
    def from_json(text: str) -> "PointSet":
        data = json.loads(text)
        return from_points(np.asarray(data["points"], dtype=float), label=data.get("label", ""))


@dataclass(frozen=True)
class NeighborGraph:
    """Unordered site-index pairs split into nearest and beyond-nearest bonds."""

    pairs: tuple
    beyond: tuple
    cutoff: float


@dataclass(frozen=True)
class DisplacementSeed:
    """Reproducible per-site random draws for the displaced-lattice builder."""

    rng_seed: int
    t_amplitudes: np.ndarray | None = None
    angles: np.ndarray | None = None

    def draw(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        if self.t_amplitudes is not None and self.angles is not None:
            if len(self.t_amplitudes) != n or len(self.angles) != n:
                raise ValueError("stored draws do not match the point count")
            return np.asarray(self.t_amplitudes, float), np.asarray(self.angles, float)
        rng = np.random.default_rng(self.rng_seed)
        t = rng.uniform(0.0, 1.0, size=n)
        theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
        return t, theta


@dataclass(frozen=True)
class ValidationReport:
    n_points: int
    a: float | None
    b_nnn: float | None
    spacing_positive: bool
    nnn_separated: bool
    gaussian_sup: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "n_points": self.n_points,
            "a": self.a,
            "b_nnn": self.b_nnn,
            "spacing_positive": self.spacing_positive,
            "nnn_separated": self.nnn_separated,
            "gaussian_sup": self.gaussian_sup,
            "passed": self.passed,
        }


def _spacings(pts: np.ndarray) -> tuple[float, float]:
    """Minimal spacing and next-distinct spacing of a point array."""
    d = pdist(pts)
    a = float(d.min())
    beyond = d[d > a * (1.0 + DIST_RTOL)]
    b = float(beyond.min()) if beyond.size else np.inf
    return a, b


def from_points(points, label: str = "", meta: dict | None = None) -> PointSet:
    """Wrap an (N, 2) array, computing spacings.  Singletons get a=inf."""
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise EmptySetError("cannot build a PointSet from zero points")
    if pts.ndim != 2:
        pts = pts.reshape(-1, 2)
    if len(pts) == 1:
        return PointSet(pts, np.inf, np.inf, label, meta or {})
    a, b = _spacings(pts)
    if a <= 0.0:
        raise ValueError("points are not distinct (minimal spacing is zero)")
    return PointSet(pts, a, b, label, meta or {})


def build_square_lattice(a: float, nx: int, ny: int) -> PointSet:
    """nx*ny points at a*(i, j), 0 <= i < nx, 0 <= j < ny.

    Site index is j*nx + i (rows of constant j are contiguous).
    """
    if a <= 0:
        raise ValueError(f"lattice spacing must be positive, got {a}")
    if nx < 1 or ny < 1:
        raise ValueError(f"lattice dimensions must be >= 1, got {nx}x{ny}")
    jj, ii = np.meshgrid(np.arange(ny), np.arange(nx), indexing="ij")
    pts = a * np.column_stack([ii.ravel(), jj.ravel()]).astype(float)
    if nx * ny == 1:
        return PointSet(pts, np.inf, np.inf, f"square {nx}x{ny} a={a}")
    a_min, b = _spacings(pts)
    return PointSet(pts, a_min, b, f"square {nx}x{ny} a={a}", {"lattice": "square", "nx": nx, "ny": ny})


def build_honeycomb(a: float, n1: int, n2: int) -> PointSet:
    """Honeycomb patch: two triangular sublattices, 2*n1*n2 points.

    Lattice vectors a*(sqrt3/2, +-1/2); the second sublattice sits at the
    centroid of the cell triangle, offset a*(1/sqrt3, 0), which makes every
    interior site 3-coordinated with hexagon edge a/sqrt3.  The stored
    minimal spacing is that edge length.
    """
    if a <= 0:
        raise ValueError(f"lattice constant must be positive, got {a}")
    if n1 < 1 or n2 < 1:
        raise ValueError(f"cell counts must be >= 1, got {n1}x{n2}")
    v1 = a * np.array([np.sqrt(3.0) / 2.0, 0.5])
    v2 = a * np.array([np.sqrt(3.0) / 2.0, -0.5])
    v_b = a * np.array([1.0 / np.sqrt(3.0), 0.0])
    pts = []
    tags = []
    for i in range(n1):
        for j in range(n2):
            cell = i * v1 + j * v2
            pts.append(cell)
            tags.append(0)
            pts.append(cell + v_b)
            tags.append(1)
    pts = np.asarray(pts)
    if len(pts) == 2:
        ps = PointSet(pts, float(a / np.sqrt(3.0)), np.inf, f"honeycomb {n1}x{n2} a={a}")
    else:
        a_min, b = _spacings(pts)
        ps = PointSet(pts, a_min, b, f"honeycomb {n1}x{n2} a={a}")
    ps.meta.update({"lattice": "honeycomb", "sublattice": np.asarray(tags), "n1": n1, "n2": n2})
    return ps


def truncate_half_plane(ps: PointSet, axis: int, threshold: float) -> PointSet:
    """Keep points whose coordinate along ``axis`` (1 or 2) is >= threshold."""
    if axis not in (1, 2):
        raise ValueError(f"axis must be 1 or 2, got {axis}")
    keep = ps.points[:, axis - 1] >= threshold
    if not np.any(keep):
        raise EmptySetError("half-plane truncation removed every point")
    meta = {k: v for k, v in ps.meta.items() if not isinstance(v, np.ndarray) and k != "epsilon"}
    sub = ps.meta.get("sublattice")
    if isinstance(sub, np.ndarray):
        meta["sublattice"] = sub[keep]
    return from_points(ps.points[keep], label=ps.label + f" | x{axis}>={threshold}", meta=meta)


def neighbor_graph(ps: PointSet, cutoff: float | None = None) -> NeighborGraph:
    """Classify bonds: distance == a (within DIST_RTOL) vs (a, cutoff]."""
    if len(ps) < 2:
        return NeighborGraph((), (), cutoff or 0.0)
    cut = cutoff if cutoff is not None else BEYOND_NN_CUTOFF * ps.a
    dm = squareform(pdist(ps.points))
    iu, ju = np.triu_indices(len(ps), k=1)
    d = dm[iu, ju]
    nn_mask = np.abs(d - ps.a) <= DIST_RTOL * ps.a
    beyond_mask = (~nn_mask) & (d <= cut)
    pairs = tuple(zip(iu[nn_mask].tolist(), ju[nn_mask].tolist()))
    beyond = tuple(zip(iu[beyond_mask].tolist(), ju[beyond_mask].tolist()))
    return NeighborGraph(pairs, beyond, cut)


def random_displacement(ps: PointSet, lam: float, seed: DisplacementSeed) -> PointSet:
    """Displace each site n by (a/lam) * t_n (cos th_n, sin th_n).

    Requires lam > 4 so the perturbed minimal spacing stays positive.  The
    result records, per nearest-neighbor bond (i, j) of the undisplaced
    reference graph with i < j, the disorder variable
    eps_ij = 2 (t_i cos th_i - t_j cos th_j), which drives the disordered
    hopping weights downstream.  Same seed, same output, bit for bit.
    """
    if lam <= 4.0:
        raise PreconditionError(f"displacement amplitude requires lam > 4, got {lam}")
    n = len(ps)
    t, theta = seed.draw(n)
    if np.any(t < 0) or np.any(t > 1):
        raise PreconditionError("displacement amplitudes must lie in [0, 1]")
    shift = (ps.a / lam) * t[:, None] * np.column_stack([np.cos(theta), np.sin(theta)])
    displaced = ps.points + shift
    graph = neighbor_graph(ps)
    ct = t * np.cos(theta)
    eps = {(i, j): 2.0 * (ct[i] - ct[j]) for (i, j) in graph.pairs}
    meta = dict(ps.meta)
    meta.update(
        {
            "reference_points": ps.points,
            "reference_a": ps.a,
            "reference_pairs": graph.pairs,
            "epsilon": eps,
            "rng_seed": seed.rng_seed,
            "t_amplitudes": t,
            "angles": theta,
        }
    )
    return from_points(displaced, label=ps.label + f" | displaced lam={lam}", meta=meta)


def validate_assumptions(ps: PointSet, lam: float = 1.0) -> ValidationReport:
    """Check a > 0 and b_nnn > a, and report the Gaussian-sum supremum.

    Probes for the supremum are the sites themselves plus midpoints of NN
    bonds (the worst points sit between atoms).  A singleton set gets its
    neighbor fields marked undefined (None) and passes vacuously.
    """
    if len(ps) < 1:
        raise EmptySetError("empty point set")
    if len(ps) == 1:
        return ValidationReport(1, None, None, True, True, 1.0, True)
    a, b = ps.a, ps.b_nnn
    spacing_ok = bool(a > 0 and np.isfinite(a))
    nnn_ok = bool((not np.isfinite(b)) or b > a * (1.0 + DIST_RTOL))
    graph = neighbor_graph(ps)
    probes = [ps.points]
    if graph.pairs:
        ij = np.asarray(graph.pairs)
        probes.append(0.5 * (ps.points[ij[:, 0]] + ps.points[ij[:, 1]]))
    sup = gaussian_sum_sup(ps, lam, np.vstack(probes))
    return ValidationReport(len(ps), a, b, spacing_ok, nnn_ok, sup, spacing_ok and nnn_ok)


def gaussian_sum_sup(ps: PointSet, lam: float, probes) -> float:
    """max over probe points x of sum_m exp(-lam |x - m|^2) over sites m."""
    if lam < 1.0:
        raise PreconditionError(f"gaussian_sum_sup requires lam >= 1, got {lam}")
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    diff = probes[:, None, :] - ps.points[None, :, :]
    sums = np.exp(-lam * np.sum(diff**2, axis=2)).sum(axis=1)
    return float(sums.max())


def bonds_csv_rows(ps: PointSet, graph: NeighborGraph | None = None):
    """Rows (i, j, xi, yi, xj, yj, dist, kind) for CSV export of the bond list."""
    graph = graph or neighbor_graph(ps)
    rows = []
    for kind, pairs in (("nn", graph.pairs), ("beyond", graph.beyond)):
        for i, j in pairs:
            pi, pj = ps.points[i], ps.points[j]
            rows.append((i, j, pi[0], pi[1], pj[0], pj[1], float(np.hypot(*(pj - pi))), kind))
    return rows
