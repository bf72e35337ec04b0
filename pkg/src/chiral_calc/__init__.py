"""Exact computations with free-field vertex superalgebras: topological currents,
chiral critical loci of polynomial potentials, their cohomology and characters."""

__version__ = "0.1.0"
