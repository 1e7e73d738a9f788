"""Thermal effective subsystem Hamiltonians of gapped Dirac fermions.

A lower-dimensional slice of a gapped Dirac ground state has a reduced
density matrix that is exactly thermal with respect to an effective
Dirac Hamiltonian.  The package computes that Hamiltonian, its
momentum-dependent temperature, the corresponding correlation matrices
and fluctuations, and the topological invariants of the descendants.
"""
from ._backend import BACKEND, available_backends
from .clifford import CliffordRep, build_gammas, check_symmetry, classify
from .corrfluct import (CorrelationMatrix, corr_momentum, particle_variance, realspace_corr,
                        segment_corr, strip_corr, thermal_corr, time_corr)
from .entmap import EshResult, SubsystemSpec, constant_temperature, esh, esh_4d_descendants, esh_grid
from .errors import (AmbiguousFillingError, ConfigError, ConvergenceError, DecoupledLimitWarning,
                     GaplessError, NotHermitianError, PreconditionError)
from .models import DiracModel, LatticeGeometry, make_model, qh4d, qwz, wti
from .numerics import BzGrid, hermitian_eigh
from .topo import inheritance_check, esh_invariant, gap_scan, invariant_nu, weak_indices

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "available_backends", "CliffordRep", "build_gammas", "check_symmetry", "classify",
    "CorrelationMatrix", "corr_momentum", "particle_variance", "realspace_corr", "segment_corr",
    "strip_corr", "thermal_corr", "time_corr", "EshResult", "SubsystemSpec", "constant_temperature",
    "esh", "esh_4d_descendants", "esh_grid", "AmbiguousFillingError", "ConfigError",
    "ConvergenceError", "DecoupledLimitWarning", "GaplessError", "NotHermitianError",
    "PreconditionError", "DiracModel", "LatticeGeometry", "make_model", "qh4d", "qwz", "wti",
    "BzGrid", "hermitian_eigh", "inheritance_check", "esh_invariant", "gap_scan", "invariant_nu",
    "weak_indices", "__version__",
]
