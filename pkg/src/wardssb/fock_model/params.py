"""Physical constants and the periodic momentum grid."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..errors import InputError


@dataclass(frozen=True)
class ModelParams:
    """Constants of the two-component model on a periodic box (hbar = 1).

    ``lam`` is the quartic coupling (``lambda`` in configs), ``v`` the
    condensate value ``<psi_1>``, ``mu`` the coefficient of the explicit
    breaking density ``mu psi_2^* psi_2``.
    """

    m: float = 1.0
    lam: float = 1.0
    v: float = 1.0
    mu: float = 0.0
    box_length: float = 1.0
    dim: int = 3
    modes_per_axis: int = 1
    n_max: int = 4

    def __post_init__(self):
        if not self.m > 0:
            raise InputError(f"m must be > 0, got {self.m}")
        for name in ("lam", "v", "mu"):
            if getattr(self, name) < 0:
                raise InputError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not self.box_length > 0:
            raise InputError(f"box_length must be > 0, got {self.box_length}")
        if self.dim not in (1, 2, 3):
            raise InputError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.modes_per_axis < 1 or self.modes_per_axis % 2 == 0:
            raise InputError(f"modes_per_axis must be odd and positive, got {self.modes_per_axis}")
        if self.n_max < 1:
            raise InputError(f"n_max must be >= 1, got {self.n_max}")

    @property
    def volume(self) -> float:
        return self.box_length**self.dim

    @property
    def n_modes(self) -> int:
        return self.modes_per_axis**self.dim


@dataclass(frozen=True)
class ModeGrid:
    """Wave vectors ``k = 2 pi n / L`` with ``|n_i| <= (M - 1) / 2``.

    Modes are ordered as ``itertools.product`` over ascending integer labels,
    so the zero mode sits in the middle.
    """

    box_length: float
    dim: int
    modes_per_axis: int
    labels: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        half = (self.modes_per_axis - 1) // 2
        axis = range(-half, half + 1)
        labels = np.array(list(itertools.product(axis, repeat=self.dim)), dtype=int)
        object.__setattr__(self, "labels", labels.reshape(-1, self.dim))

    @classmethod
    def from_params(cls, params: ModelParams) -> "ModeGrid":
        return cls(params.box_length, params.dim, params.modes_per_axis)

    def __len__(self):
        return len(self.labels)

    @property
    def volume(self) -> float:
        return self.box_length**self.dim

    @cached_property
    def momenta(self) -> np.ndarray:
        return 2 * np.pi * self.labels / self.box_length

    @cached_property
    def _lookup(self) -> dict:
        return {tuple(n): i for i, n in enumerate(self.labels)}

    def index(self, label) -> int | None:
        """Mode index of an integer label, or ``None`` if outside the grid."""
        return self._lookup.get(tuple(int(x) for x in label))

    @cached_property
    def zero(self) -> int:
        return self._lookup[(0,) * self.dim]

    @cached_property
    def negated(self) -> np.ndarray:
        return np.array([self._lookup[tuple(-n)] for n in self.labels])

    @cached_property
    def k_squared(self) -> np.ndarray:
        return np.sum(self.momenta**2, axis=1)

    def sum_index(self, i: int, j: int, sign: int = 1) -> int | None:
        """Index of ``k_i + sign * k_j`` if it lies on the grid."""
        return self.index(self.labels[i] + sign * self.labels[j])

    @cached_property
    def lattice_points(self) -> np.ndarray:
        """Real-space sample points ``x = n L / M`` centred on the origin."""
        return self.labels * (self.box_length / self.modes_per_axis)

    @property
    def cell_volume(self) -> float:
        return (self.box_length / self.modes_per_axis) ** self.dim
