"""Truncated Fock-space realization of the two-component Bose model."""

from .basis import FockBasis, basis_dimension, build_basis, enumerate_occupations
from .charges import (
    LocalChargeProfile,
    charge_density,
    charge_locality_scan,
    charge_operator,
    charge_poly,
    current_density,
)
from .dynamics import exact_ground_state, fix_phase, sector_levels, time_evolved_charge_commutator
from .hamiltonian import (
    Order,
    build_hamiltonian,
    hamiltonian_poly,
    shifted_poly,
    substituted_poly,
    unshifted_poly,
)
from .operators import (
    NormalOrderedPoly,
    SparseOperator,
    annihilator,
    commutator,
    condensate_shift,
    creator,
    delta_a,
    field_at_point,
    identity,
    mode_field,
    number_operator,
    restrict,
)
from .params import ModeGrid, ModelParams

__all__ = [
    "FockBasis",
    "LocalChargeProfile",
    "ModeGrid",
    "ModelParams",
    "NormalOrderedPoly",
    "Order",
    "SparseOperator",
    "annihilator",
    "basis_dimension",
    "build_basis",
    "build_hamiltonian",
    "charge_density",
    "charge_locality_scan",
    "charge_operator",
    "charge_poly",
    "commutator",
    "condensate_shift",
    "creator",
    "current_density",
    "delta_a",
    "enumerate_occupations",
    "exact_ground_state",
    "field_at_point",
    "fix_phase",
    "hamiltonian_poly",
    "identity",
    "mode_field",
    "number_operator",
    "restrict",
    "sector_levels",
    "shifted_poly",
    "substituted_poly",
    "time_evolved_charge_commutator",
    "unshifted_poly",
]
