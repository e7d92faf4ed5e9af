"""Momentum-space Hamiltonians of the two-component model.

Energy density ``(1/2m)|grad psi_j|^2 + (lam/2)(psi_j^* psi_j - v^2)^2``
with optional explicit breaking ``mu psi_2^* psi_2``, normal ordered.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .basis import FockBasis
from .operators import NormalOrderedPoly, SparseOperator, condensate_shift, hermiticity_defect
from .params import ModeGrid, ModelParams


class Order(str, Enum):
    QUADRATIC = "quadratic"
    TREE = "tree"
    FULL = "full"

    @property
    def max_degree(self) -> int:
        return {"quadratic": 2, "tree": 3, "full": 4}[self.value]


def _orb(grid: ModeGrid, species: int, mode: int) -> int:
    return (species - 1) * len(grid) + mode


def _kinetic(poly: NormalOrderedPoly, grid: ModeGrid, params: ModelParams, include_mu: bool):
    eps = grid.k_squared / (2 * params.m)
    for k in range(len(grid)):
        for s in (1, 2):
            poly.add(eps[k], (_orb(grid, s, k),), (_orb(grid, s, k),))
        if include_mu:
            poly.add(params.mu, (_orb(grid, 2, k),), (_orb(grid, 2, k),))


def _quartic(poly: NormalOrderedPoly, grid: ModeGrid, params: ModelParams):
    coef = params.lam / (2 * grid.volume)
    if coef == 0:
        return
    n = len(grid)
    for k1 in range(n):
        for k2 in range(n):
            for k3 in range(n):
                k4 = grid.index(grid.labels[k1] + grid.labels[k2] - grid.labels[k3])
                if k4 is None:
                    continue
                for i in (1, 2):
                    for j in (1, 2):
                        poly.add(
                            coef,
                            (_orb(grid, i, k1), _orb(grid, j, k2)),
                            (_orb(grid, j, k3), _orb(grid, i, k4)),
                        )


def unshifted_poly(params: ModelParams, include_mu: bool = True, max_degree: int = 4) -> NormalOrderedPoly:
    """Hamiltonian in the original fields, vacuum constant kept."""
    grid = ModeGrid.from_params(params)
    poly = NormalOrderedPoly()
    _kinetic(poly, grid, params, include_mu)
    for k in range(len(grid)):
        for s in (1, 2):
            poly.add(-params.lam * params.v**2, (_orb(grid, s, k),), (_orb(grid, s, k),))
    if max_degree >= 4:
        _quartic(poly, grid, params)
    poly.add(params.lam * params.v**4 * grid.volume / 2)
    return poly


def substituted_poly(params: ModelParams, include_mu: bool = True) -> NormalOrderedPoly:
    """Unshifted Hamiltonian with ``a_{1,0} -> b_{1,0} + v sqrt(V)`` applied."""
    grid = ModeGrid.from_params(params)
    return unshifted_poly(params, include_mu).shift(_orb(grid, 1, grid.zero), condensate_shift(params))


def shifted_poly(params: ModelParams, include_mu: bool = True, max_degree: int = 4) -> NormalOrderedPoly:
    """Hamiltonian expanded around ``psi_1 = v + phi_1``, built term by term.

    ``(lam/2)[v^2 (phi_1 + phi_1^*)^2 + 2v (phi_1 + phi_1^*) phi^* phi
    + (phi^* phi)^2]`` plus kinetic and breaking terms; the constant is zero
    because the expansion point is a minimum of the potential.
    """
    grid = ModeGrid.from_params(params)
    lam, v, V = params.lam, params.v, grid.volume
    n = len(grid)
    poly = NormalOrderedPoly()
    _kinetic(poly, grid, params, include_mu)
    for k in range(n):
        b1k, b1mk = _orb(grid, 1, k), _orb(grid, 1, grid.negated[k])
        poly.add(lam * v**2, (b1k,), (b1k,))
        poly.add(lam * v**2 / 2, (), (b1k, b1mk))
        poly.add(lam * v**2 / 2, (b1k, b1mk), ())
    if max_degree >= 3 and lam * v != 0:
        g3 = lam * v / np.sqrt(V)
        for k1 in range(n):
            for k2 in range(n):
                k3 = grid.sum_index(k1, k2)
                if k3 is None:
                    continue
                for j in (1, 2):
                    cre = (_orb(grid, 1, k1), _orb(grid, j, k2))
                    ann = (_orb(grid, j, k3),)
                    poly.add(g3, cre, ann)
                    poly.add(g3, ann, cre)
    if max_degree >= 4:
        _quartic(poly, grid, params)
    return poly


def hamiltonian_poly(
    params: ModelParams,
    order: Order | str = Order.FULL,
    shifted: bool = True,
    include_mu: bool = True,
) -> NormalOrderedPoly:
    """Normal-ordered Hamiltonian truncated at ``order``, vacuum constant removed."""
    order = Order(order)
    if shifted:
        poly = shifted_poly(params, include_mu, order.max_degree)
    else:
        poly = unshifted_poly(params, include_mu, order.max_degree)
    return poly.truncate(order.max_degree).without_constant()


def build_hamiltonian(
    basis: FockBasis,
    params: ModelParams,
    order: Order | str = Order.TREE,
    shifted: bool = True,
    include_mu: bool = True,
) -> SparseOperator:
    """Sparse Hamiltonian on ``basis``.

    With ``shifted`` the basis quanta are the fluctuations ``phi_j`` around
    ``<psi_1> = v``; ``order`` keeps monomials up to degree 2, 3 or 4.
    """
    order = Order(order)
    poly = hamiltonian_poly(params, order, shifted, include_mu)
    op = poly.to_operator(basis, label=f"H[{order.value}{', shifted' if shifted else ''}]")
    dev = hermiticity_defect(op.matrix)
    if dev >= 1e-12:
        raise RuntimeError(f"internal error: Hamiltonian not hermitian (defect {dev:.3e})")
    op.hermitian = True
    return op
