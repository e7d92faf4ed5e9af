"""Finite-volume checks of symmetry-breaking Ward identities and
generalized Wigner-Eckart relations for a two-component Bose gas."""

from .errors import (
    CapacityError,
    ChannelAbsentError,
    ConfigError,
    InputError,
    SolverError,
)
from .fock_model import ModelParams, build_basis, build_hamiltonian

__all__ = [
    "CapacityError",
    "ChannelAbsentError",
    "ConfigError",
    "InputError",
    "SolverError",
    "ModelParams",
    "build_basis",
    "build_hamiltonian",
]

__version__ = "0.1.0"
