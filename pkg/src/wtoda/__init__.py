"""Whittaker transforms and the quantum non-periodic Toda lattice for SL(n)/GL(n).

Evaluates class-one Whittaker functions, the Harish-Chandra c-function and
Plancherel density, the Whittaker transform with its inverse and Parseval
identity, plus quadrature oracles and property suites that verify the
underlying identities at ranks 1 and 2.
"""

from wtoda.core_algebra import RootSystem, SpectralParam, build_root_system

__all__ = [
    "RootSystem",
    "SpectralParam",
    "build_root_system",
]

__version__ = "0.1.0"
