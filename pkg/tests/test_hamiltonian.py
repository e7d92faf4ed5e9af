import numpy as np
import pytest

from wardssb.fock_model import (
    ModelParams,
    Order,
    build_basis,
    build_hamiltonian,
    creator,
    hamiltonian_poly,
    mode_field,
    shifted_poly,
    substituted_poly,
    unshifted_poly,
)
from wardssb.fock_model.operators import hermiticity_defect
from wardssb.ward_engine import vev


def splitting(params, order=Order.TREE):
    b = build_basis(params, n_max=2)
    H = build_hamiltonian(b, params, order)
    z = b.grid.zero
    vac = b.vacuum()
    p1, p2 = mode_field(b, params, 1, z), mode_field(b, params, 2, z)
    return (vev(vac, p1, H, p1.dag()) - vev(vac, p2, H, p2.dag())).real


def poly_diff(p, q):
    keys = set(p.terms) | set(q.terms)
    return max((abs(p.terms.get(k, 0) - q.terms.get(k, 0)) for k in keys), default=0.0)


@pytest.mark.parametrize(
    "params",
    [
        ModelParams(dim=1, modes_per_axis=1, lam=0.7, v=1.3, mu=0.2),
        ModelParams(dim=1, modes_per_axis=3, lam=1.0, v=0.5, box_length=2.0),
        ModelParams(dim=2, modes_per_axis=3, lam=2.0, v=1.0, mu=0.1),
    ],
)
def test_shift_consistency_symbolic(params):
    """Direct expansion around the condensate agrees with substitution."""
    direct = shifted_poly(params)
    substituted = substituted_poly(params).without_constant()
    assert poly_diff(direct, substituted) < 1e-12


def test_shift_constant_vanishes():
    p = ModelParams(dim=1, lam=1.3, v=0.8)
    assert abs(substituted_poly(p).constant) < 1e-12
    assert unshifted_poly(p).constant == pytest.approx(p.lam * p.v**4 * p.volume / 2)


def test_shift_consistency_entrywise():
    """On a one-mode basis, compare matrices of both constructions."""
    p = ModelParams(dim=1, modes_per_axis=1, n_max=5, lam=0.9, v=1.1, mu=0.4)
    b = build_basis(p)
    direct = shifted_poly(p).to_operator(b).toarray()
    subst = substituted_poly(p).without_constant().to_operator(b).toarray()
    np.testing.assert_allclose(direct, subst, atol=1e-12)


@pytest.mark.parametrize("n_max", [3, 5])
def test_unshifted_one_mode_closed_form(n_max):
    p = ModelParams(dim=1, modes_per_axis=1, n_max=n_max, lam=0.6, v=0.9, mu=0.25, box_length=1.7)
    b = build_basis(p)
    H = build_hamiltonian(b, p, Order.FULL, shifted=False).toarray()
    N = b.totals.astype(float)
    n2 = b.species_number(2)
    expected = p.lam / (2 * p.volume) * N * (N - 1) - p.lam * p.v**2 * N + p.mu * n2
    np.testing.assert_allclose(H, np.diag(expected), atol=1e-12)


def test_order_degrees():
    p = ModelParams(dim=1, modes_per_axis=3)
    for order, deg in [(Order.QUADRATIC, 2), (Order.TREE, 3), (Order.FULL, 4)]:
        poly = hamiltonian_poly(p, order)
        degrees = {len(c) + len(a) for c, a in poly.pruned()}
        assert max(degrees) == deg


def test_goldstone_coefficient_is_kinetic():
    p = ModelParams(dim=1, modes_per_axis=3, box_length=2.0, mu=0.0)
    poly = hamiltonian_poly(p, Order.TREE)
    grid = build_basis(p, n_max=1).grid
    for k in range(len(grid)):
        o = len(grid) + k
        assert poly.terms.get(((o,), (o,)), 0) == pytest.approx(grid.k_squared[k] / (2 * p.m))


def test_cubic_vertex_coefficient():
    p = ModelParams(dim=1, modes_per_axis=1, lam=1.5, v=0.4, box_length=3.0)
    poly = hamiltonian_poly(p, Order.TREE)
    # lam v phi_1^+ phi_2^+ phi_2 on the single mode, orbitals 0 and 1
    assert poly.terms[((0, 1), (1,))] == pytest.approx(p.lam * p.v / np.sqrt(p.volume))
    assert poly.terms[((1,), (0, 1))] == pytest.approx(p.lam * p.v / np.sqrt(p.volume))


@pytest.mark.parametrize(
    "lam, v, mu, expected",
    [(1.0, 1.0, 0.0, 1.0), (2.0, 0.5, 0.0, 0.5), (1.0, 1.0, 0.3, 0.7), (0.5, 2.0, 0.1, 1.9)],
)
def test_zero_momentum_splitting(lam, v, mu, expected):
    assert splitting(ModelParams(lam=lam, v=v, mu=mu)) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("mu", [0.0, 0.1, 0.3, 1.0])
def test_phi2_gap(mu):
    p = ModelParams(mu=mu)
    b = build_basis(p, n_max=1)
    H = build_hamiltonian(b, p)
    state = creator(b, 2, b.grid.zero) @ b.vacuum()
    assert H.expect(state) == mu


@pytest.mark.parametrize("dim", [1, 3])
def test_volume_independence(dim):
    vals = [splitting(ModelParams(dim=dim, box_length=L, lam=1.2, v=0.7, mu=0.2)) for L in (1.0, 2.0, 5.0)]
    np.testing.assert_allclose(vals, vals[0], atol=1e-10)


@pytest.mark.parametrize("order", list(Order))
@pytest.mark.parametrize("shifted", [True, False])
def test_hermitian(order, shifted):
    p = ModelParams(dim=1, modes_per_axis=3, n_max=3, mu=0.3)
    H = build_hamiltonian(build_basis(p), p, order, shifted=shifted)
    assert H.hermitian
    assert hermiticity_defect(H.matrix) < 1e-12


def test_free_theory_vacuum():
    p = ModelParams(dim=1, modes_per_axis=3, n_max=3, lam=0.0, mu=0.0)
    H = build_hamiltonian(build_basis(p), p, Order.FULL)
    assert np.all(H.toarray().diagonal().real >= 0)
    assert H.expect(build_basis(p).vacuum()) == 0


def test_momentum_conservation():
    p = ModelParams(dim=1, modes_per_axis=3, n_max=3, box_length=1.0)
    b = build_basis(p)
    H = build_hamiltonian(b, p, Order.FULL).matrix.tocoo()
    labels = b.grid.labels[:, 0]
    n = b.n_modes
    occ = b.occupations
    P = occ[:, :n] @ labels + occ[:, n:] @ labels
    nz = np.abs(H.data) > 1e-14
    assert np.all(P[H.row[nz]] == P[H.col[nz]])
