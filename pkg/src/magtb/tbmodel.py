"""Scale-free magnetic tight-binding Hamiltonians.

Entries live on nearest-neighbor bonds only.  The entry at (row m, col n) is
exp(i beta n^m) times the bond weight, with n^m the wedge product of the two
site positions; this is the symmetric-gauge convention in which hopping along
+e1 from site n carries phase exp(+i beta a n_2).  The flux through a square
plaquette of side a is 2 beta a^2 (counterclockwise loop product equals
exp(2 i beta a^2)), so a target flux of 2 pi p/q per plaquette means
beta = pi p / (q a^2).

Couplings lam with exp(i lam/2 n^m) = exp(i beta n^m) exactly on (a Z)^2 are
produced by ``admissible_lambda``; along them the continuum reduction's phase
factors match the scale-free model with no phase error at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateGraphError, StructureError
from .geometry import PointSet, neighbor_graph
from .util import wedge


@dataclass(frozen=True)
class FluxParameter:
    """Magnetic phase density beta (radians per area) on a lattice of spacing a."""

    beta: float
    a: float

    @property
    def plaquette_flux(self) -> float:
        """Gauge-invariant flux through one square plaquette: 2 beta a^2."""
        return 2.0 * self.beta * self.a**2

    @staticmethod
    def from_flux(p: int, q: int, a: float = 1.0) -> "FluxParameter":
        """beta realizing plaquette flux 2 pi p / q."""
        if q <= 0:
            raise ValueError(f"flux denominator must be positive, got {q}")
        return FluxParameter(np.pi * p / (q * a**2), a)


@dataclass(frozen=True)
class TBHamiltonian:
    """Nearest-neighbor magnetic hopping matrix over the sites of a PointSet.

    Only the strict lower triangle is stored; the full matrix is
    reconstructed as L + L^dagger, so Hermiticity is exact by construction.
    """

    ps: PointSet
    beta: float
    lower: sp.csr_matrix = field(repr=False)
    hopping_weights: dict = field(default_factory=dict, repr=False)

    def matrix(self) -> sp.csr_matrix:
        return (self.lower + self.lower.conj().T).tocsr()

    def dense(self) -> np.ndarray:
        return self.matrix().toarray()

    @property
    def n_sites(self) -> int:
        return len(self.ps)


def magnetic_phase(n, m, beta: float) -> complex:
    """Unit-modulus phase exp(i beta (n1 m2 - n2 m1))."""
    return complex(np.exp(1j * beta * wedge(n, m)))


def _assemble(ps: PointSet, beta: float, pairs, weights: dict) -> TBHamiltonian:
    if not pairs:
        raise DegenerateGraphError("point set has no nearest-neighbor bonds")
    pts = ps.points
    rows, cols, vals = [], [], []
    for i, j in pairs:  # i < j; store the lower-triangle entry H[j, i]
        w = weights.get((i, j), 1.0)
        if w <= 0:
            raise ValueError(f"hopping weight for bond ({i},{j}) must be positive, got {w}")
        rows.append(j)
        cols.append(i)
        vals.append(w * magnetic_phase(pts[i], pts[j], beta))
    n = len(ps)
    lower = sp.csr_matrix((vals, (rows, cols)), shape=(n, n), dtype=complex)
    tbh = TBHamiltonian(ps, beta, lower, dict(weights))
    # Gershgorin bound doubles as the coordination <= 4 spectrum assertion
    if _max_row_weight(tbh) > 4.0 + 1e-9 and ps.meta.get("lattice") == "square":
        raise AssertionError("square-lattice hopping matrix exceeds the coordination bound")
    return tbh


def _max_row_weight(tbh: TBHamiltonian) -> float:
    m = tbh.matrix()
    return float(np.abs(m).sum(axis=1).max()) if m.nnz else 0.0


def build_tb(ps: PointSet, beta: float) -> TBHamiltonian:
    """Unit-weight magnetic hopping matrix on the NN bonds of ``ps``."""
    graph = neighbor_graph(ps)
    return _assemble(ps, beta, graph.pairs, {})


def build_honeycomb_tb(ps: PointSet, beta: float) -> TBHamiltonian:
    """Magnetic hopping on a honeycomb patch; bonds must join A to B sites."""
    tags = ps.meta.get("sublattice")
    if tags is None:
        raise StructureError("point set carries no sublattice tags; build it with build_honeycomb")
    graph = neighbor_graph(ps)
    for i, j in graph.pairs:
        if tags[i] == tags[j]:
            raise StructureError(f"bond ({i},{j}) joins two sites of the same sublattice")
    return _assemble(ps, beta, graph.pairs, {})


def build_random_hopping(ps: PointSet, beta: float, c: float) -> TBHamiltonian:
    """Disordered hopping weights exp(-c eps_ij a^2) on the reference NN graph.

    ``ps`` must come from random_displacement: phases and bonds use the
    undisplaced reference lattice, only the weights carry the disorder.  The
    per-bond eps is evaluated in canonical site order i < j, which keeps the
    matrix Hermitian (eps flips sign under exchanging the two sites).
    """
    eps = ps.meta.get("epsilon")
    ref = ps.meta.get("reference_points")
    if eps is None or ref is None:
        raise ValueError("point set carries no displacement data; run random_displacement first")
    ref_ps = PointSet(ref, ps.meta["reference_a"], np.inf, ps.label + " | reference")
    pairs = ps.meta["reference_pairs"]
    a = ps.meta["reference_a"]
    weights = {(i, j): float(np.exp(-c * eps[(i, j)] * a**2)) for i, j in pairs}
    return _assemble(ref_ps, beta, pairs, weights)


def admissible_lambda(beta: float, a: float, r: int) -> float:
    """Coupling lam = 2 beta + 4 pi r / a^2.

    On any subset of (a Z)^2 the wedge products n^m are integer multiples of
    a^2, so exp(i lam/2 n^m) = exp(i beta n^m) exactly at these couplings and
    the phase of the continuum reduction matches the scale-free model with no
    error.  Larger r gives deeper wells with the same flux.
    """
    if r < 1:
        raise ValueError(f"index r must be >= 1, got {r}")
    return 2.0 * beta + 4.0 * np.pi * r / a**2


def plaquette_phase_product(tbh: TBHamiltonian, loop_indices) -> complex:
    """Product of hopping entries around a closed loop of site indices.

    The loop is traversed in the given order; for a counterclockwise loop the
    result is exp(2 i beta * enclosed area) when all weights are 1.
    """
    h = tbh.matrix()
    loop = list(loop_indices)
    prod = 1.0 + 0.0j
    for src, dst in zip(loop, loop[1:] + loop[:1]):
        entry = h[dst, src]
        if entry == 0:
            raise ValueError(f"loop step {src}->{dst} is not a bond")
        prod *= entry
    return complex(prod)
