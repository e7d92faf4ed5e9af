"""SU(2) charge densities, currents and locally cut-off charges."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from ..lie_rep import PAULI
from .basis import FockBasis, build_basis
from .operators import NormalOrderedPoly, SparseOperator, condensate_shift
from .params import ModelParams


def _check_generator(a: int):
    if a not in (1, 2, 3):
        raise InputError(f"SU(2) generator index must be 1, 2 or 3, got {a}")


def _linear_form(basis: FockBasis, params: ModelParams, species: int, x, shifted: bool,
                 derivative: int | None = None):
    """``psi_j(x)`` as (constant, {orbital: coefficient})."""
    grid = basis.grid
    phases = np.exp(1j * grid.momenta @ np.asarray(x, dtype=float)) / np.sqrt(grid.volume)
    if derivative is not None:
        phases = phases * 1j * grid.momenta[:, derivative]
    const = params.v if (shifted and species == 1 and derivative is None) else 0.0
    return const, {basis.orbital(species, k): c for k, c in enumerate(phases)}


def _bilinear(poly, coef, left, right):
    """Add ``coef * left^* right`` for two linear forms (already normal ordered)."""
    c_l, lin_l = left
    c_r, lin_r = right
    poly.add(coef * np.conj(c_l) * c_r)
    for o, c in lin_r.items():
        poly.add(coef * np.conj(c_l) * c, (), (o,))
    for o, c in lin_l.items():
        poly.add(coef * np.conj(c) * c_r, (o,), ())
        for p, d in lin_r.items():
            poly.add(coef * np.conj(c) * d, (o,), (p,))


def charge_density_poly(basis: FockBasis, params: ModelParams, a: int, x, shifted: bool = True) -> NormalOrderedPoly:
    """``j^a_0(x) = -(1/2) psi^*_i sigma^a_{ij} psi_j`` at a point."""
    _check_generator(a)
    sigma = PAULI[a - 1]
    forms = [_linear_form(basis, params, s, x, shifted) for s in (1, 2)]
    poly = NormalOrderedPoly()
    for i in range(2):
        for j in range(2):
            if sigma[i, j] != 0:
                _bilinear(poly, -0.5 * sigma[i, j], forms[i], forms[j])
    return poly


def current_density_poly(basis: FockBasis, params: ModelParams, a: int, axis: int, x,
                         shifted: bool = True) -> NormalOrderedPoly:
    """Spatial current ``j^a_l = (i/4m)(psi^* sigma d_l psi - d_l psi^* sigma psi)``.

    This is the current whose divergence balances ``d_t j^a_0`` under the
    kinetic term; the potential is locally SU(2) invariant and adds nothing.
    """
    _check_generator(a)
    sigma = PAULI[a - 1]
    f = [_linear_form(basis, params, s, x, shifted) for s in (1, 2)]
    df = [_linear_form(basis, params, s, x, shifted, derivative=axis) for s in (1, 2)]
    pref = 1j / (4 * params.m)
    poly = NormalOrderedPoly()
    for i in range(2):
        for j in range(2):
            if sigma[i, j] != 0:
                _bilinear(poly, pref * sigma[i, j], f[i], df[j])
                _bilinear(poly, -pref * sigma[i, j], df[i], f[j])
    return poly


def smooth_step(t):
    """C-infinity step from 0 (t <= 0) to 1 (t >= 1)."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        f0 = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        f1 = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return f0 / (f0 + f1)


@dataclass(frozen=True)
class LocalChargeProfile:
    """Spatial cutoff ``f(|x| / R)``: 1 inside ``R``, 0 beyond ``(1 + eps) R``."""

    radius: float
    shoulder: float = 0.0

    def __post_init__(self):
        if not self.radius > 0:
            raise InputError(f"radius must be > 0, got {self.radius}")
        if self.shoulder < 0:
            raise InputError(f"shoulder must be >= 0, got {self.shoulder}")

    def values(self, points: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(np.atleast_2d(points), axis=1)
        if self.shoulder == 0:
            return (r < self.radius).astype(float)
        t = (r - self.radius) / (self.shoulder * self.radius)
        return 1.0 - smooth_step(t)


def charge_poly(basis: FockBasis, params: ModelParams, a: int,
                profile: LocalChargeProfile | None = None, shifted: bool = True) -> NormalOrderedPoly:
    """``Q^a_R = sum_x w f_R(x) j^a_0(x)`` on the real-space lattice.

    ``profile=None`` gives the whole-box charge, built directly in momentum
    space as ``-(1/2) sum_k a^+ sigma^a a`` with the zero mode of species 1
    displaced by ``v sqrt(V)`` when ``shifted``.
    """
    _check_generator(a)
    grid = basis.grid
    if profile is None:
        sigma = PAULI[a - 1]
        poly = NormalOrderedPoly()
        for k in range(len(grid)):
            for i in range(2):
                for j in range(2):
                    if sigma[i, j] != 0:
                        poly.add(-0.5 * sigma[i, j], (basis.orbital(i + 1, k),), (basis.orbital(j + 1, k),))
        if shifted:
            poly = poly.shift(basis.orbital(1, grid.zero), condensate_shift(params))
        return poly
    weights = profile.values(grid.lattice_points) * grid.cell_volume
    poly = NormalOrderedPoly()
    for x, w in zip(grid.lattice_points, weights):
        if w != 0:
            poly = poly + charge_density_poly(basis, params, a, x, shifted) * w
    return poly


def charge_operator(basis: FockBasis, params: ModelParams, a: int,
                    profile: LocalChargeProfile | None = None, shifted: bool = True) -> SparseOperator:
    poly = charge_poly(basis, params, a, profile, shifted)
    return poly.to_operator(basis, hermitian=True, label=f"Q{a}" + ("" if profile is None else f"_R={profile.radius}"))


def charge_density(basis: FockBasis, params: ModelParams, a: int, x=None, shifted: bool = True) -> SparseOperator:
    x = np.zeros(basis.grid.dim) if x is None else x
    return charge_density_poly(basis, params, a, x, shifted).to_operator(basis, hermitian=True, label=f"j{a}_0")


def current_density(basis: FockBasis, params: ModelParams, a: int, axis: int, x=None,
                    shifted: bool = True) -> SparseOperator:
    x = np.zeros(basis.grid.dim) if x is None else x
    poly = current_density_poly(basis, params, a, axis, x, shifted)
    return poly.to_operator(basis, hermitian=True, label=f"j{a}_{axis}")


def charge_locality_scan(params: ModelParams, a: int, A: SparseOperator, radii,
                         shoulder: float = 0.0, basis: FockBasis | None = None):
    """Variation ``i <[Q^a_R, A]>`` on the tree vacuum for each radius.

    Returns a list of ``(R, value)``; ``A`` must live on ``basis`` (built
    from ``params`` when omitted).
    """
    radii = [float(r) for r in radii]
    if any(r2 < r1 for r1, r2 in zip(radii, radii[1:])):
        raise InputError("radii must be sorted ascending")
    basis = build_basis(params) if basis is None else basis
    vac = basis.vacuum()
    out = []
    for R in radii:
        Q = charge_operator(basis, params, a, LocalChargeProfile(R, shoulder))
        comm = Q.matrix @ A.matrix - A.matrix @ Q.matrix
        out.append((R, complex(1j * np.vdot(vac, comm @ vac))))
    return out
