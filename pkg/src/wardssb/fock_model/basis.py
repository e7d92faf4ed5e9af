"""Occupation-number basis for two boson species with a total cutoff."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from ..errors import CapacityError, InputError
from .params import ModeGrid, ModelParams

DEFAULT_DIMENSION_LIMIT = 200_000
N_SPECIES = 2

# fixed seed: keys must be reproducible across runs
_KEY_SEED = 0x5EED_F0C5


def basis_dimension(n_orbitals: int, n_max: int) -> int:
    """Number of multisets of size <= n_max drawn from n_orbitals."""
    return comb(n_orbitals + n_max, n_max)


@dataclass
class FockBasis:
    """All occupation vectors with total occupation ``<= n_max``.

    Orbital ``o = (species - 1) * n_modes + mode``.  States are listed in
    graded lexicographic order: by total occupation, then in descending
    lexicographic order of the occupation vector, which puts the vacuum at
    index 0 and every cutoff-safe subspace as a prefix.
    """

    occupations: np.ndarray
    n_modes: int
    n_max: int
    grid: ModeGrid | None = None

    def __post_init__(self):
        self.occupations = np.ascontiguousarray(self.occupations, dtype=np.int16)
        rng = np.random.default_rng(_KEY_SEED)
        self._weights = rng.integers(1, 2**63, size=self.n_orbitals, dtype=np.uint64)
        keys = self._keys(self.occupations)
        order = np.argsort(keys, kind="stable")
        sorted_keys = keys[order]
        if np.any(sorted_keys[1:] == sorted_keys[:-1]):
            raise RuntimeError("occupation key collision; change _KEY_SEED")
        self.keys = keys
        self._order = order
        self._sorted_keys = sorted_keys
        self.totals = self.occupations.sum(axis=1)

    @property
    def n_orbitals(self) -> int:
        return N_SPECIES * self.n_modes

    @property
    def dim(self) -> int:
        return len(self.occupations)

    def __len__(self):
        return self.dim

    def orbital(self, species: int, mode: int) -> int:
        if species not in (1, 2):
            raise InputError(f"species must be 1 or 2, got {species}")
        if not 0 <= mode < self.n_modes:
            raise InputError(f"mode {mode} outside 0..{self.n_modes - 1}")
        return (species - 1) * self.n_modes + mode

    def _keys(self, occ: np.ndarray) -> np.ndarray:
        # wraps modulo 2**64 by design
        return (occ.astype(np.uint64) * self._weights).sum(axis=1, dtype=np.uint64)

    def key_weight(self, orbital: int) -> np.uint64:
        return self._weights[orbital]

    def lookup_keys(self, keys: np.ndarray) -> np.ndarray:
        """Indices of states with the given keys (all must be present)."""
        pos = np.searchsorted(self._sorted_keys, keys)
        pos = np.minimum(pos, len(self._sorted_keys) - 1)
        if not np.all(self._sorted_keys[pos] == keys):
            raise InputError("occupation vector not in basis")
        return self._order[pos]

    def index(self, occupation) -> int:
        occ = np.asarray(occupation, dtype=np.int16).reshape(1, -1)
        if occ.shape[1] != self.n_orbitals:
            raise InputError(f"occupation vector must have {self.n_orbitals} entries")
        return int(self.lookup_keys(self._keys(occ))[0])

    def species_number(self, species: int) -> np.ndarray:
        lo = (species - 1) * self.n_modes
        return self.occupations[:, lo : lo + self.n_modes].sum(axis=1)

    def vacuum(self) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=complex)
        vec[0] = 1.0
        return vec

    def safe_mask(self, margin: int) -> np.ndarray:
        """States whose total occupation leaves ``margin`` quanta of headroom."""
        return self.totals <= self.n_max - margin


def enumerate_occupations(n_orbitals: int, n_max: int) -> np.ndarray:
    rows = []
    for total in range(n_max + 1):
        for combo in itertools.combinations_with_replacement(range(n_orbitals), total):
            occ = np.zeros(n_orbitals, dtype=np.int16)
            for o in combo:
                occ[o] += 1
            rows.append(occ)
    return np.array(rows, dtype=np.int16).reshape(-1, n_orbitals)


def build_basis(
    params: ModelParams,
    n_max: int | None = None,
    limit: int = DEFAULT_DIMENSION_LIMIT,
) -> FockBasis:
    """Enumerate the truncated Fock basis for ``params``.

    Raises
    ------
    CapacityError
        If the dimension exceeds ``limit``; the check runs before any
        allocation.
    """
    grid = ModeGrid.from_params(params)
    n_max = params.n_max if n_max is None else n_max
    n_orbitals = N_SPECIES * len(grid)
    dim = basis_dimension(n_orbitals, n_max)
    if dim > limit:
        raise CapacityError(
            f"Fock dimension {dim} exceeds limit {limit} "
            f"(dim={params.dim}, modes_per_axis={params.modes_per_axis}, n_max={n_max})"
        )
    occ = enumerate_occupations(n_orbitals, n_max)
    return FockBasis(occ, len(grid), n_max, grid)
