"""magtb: magnetic tight-binding laboratory.

Builds nearest-neighbor magnetic hopping models from continuum single-well
data (radial magnetic ground states, oscillatory overlap integrals, orbital
Gramians), computes their spectra and real-space Hall indices, and checks
the reduction against direct finite-difference solves of the underlying
magnetic Schrodinger operator.
"""

__version__ = "0.1.0"
