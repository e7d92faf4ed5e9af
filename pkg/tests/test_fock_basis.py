from math import comb

import numpy as np
import pytest

from wardssb.errors import CapacityError, InputError
from wardssb.fock_model import ModeGrid, ModelParams, basis_dimension, build_basis, enumerate_occupations


def brute_force_states(n_orbitals, n_max):
    """Occupation tuples built orbital by orbital with a running budget."""
    if n_orbitals == 0:
        return {()}
    return {(n,) + rest for n in range(n_max + 1) for rest in brute_force_states(n_orbitals - 1, n_max - n)}


@pytest.mark.parametrize("n_max, expected", [(1, 3), (2, 6)])
def test_single_mode_counts(n_max, expected):
    basis = build_basis(ModelParams(dim=1, modes_per_axis=1, n_max=n_max))
    assert basis.dim == expected


def test_single_quantum_states():
    basis = build_basis(ModelParams(dim=1, modes_per_axis=1, n_max=1))
    assert [tuple(o) for o in basis.occupations] == [(0, 0), (1, 0), (0, 1)]


@pytest.mark.parametrize("dim, M, n_max", [(1, 3, 3), (1, 3, 4), (2, 3, 2), (1, 1, 6)])
def test_matches_brute_force(dim, M, n_max):
    basis = build_basis(ModelParams(dim=dim, modes_per_axis=M, n_max=n_max))
    states = {tuple(int(x) for x in o) for o in basis.occupations}
    oracle = brute_force_states(2 * M**dim, n_max)
    assert states == oracle
    assert basis.dim == len(oracle) == basis_dimension(2 * M**dim, n_max)


def test_three_modes_three_quanta():
    # 6 orbitals, up to 3 quanta
    assert basis_dimension(6, 3) == comb(9, 3) == 84
    assert len(brute_force_states(6, 3)) == 84


def test_order_is_deterministic_and_graded():
    p = ModelParams(dim=1, modes_per_axis=3, n_max=3)
    a, b = build_basis(p), build_basis(p)
    np.testing.assert_array_equal(a.occupations, b.occupations)
    assert np.all(np.diff(a.totals) >= 0)
    assert not a.occupations[0].any()


def test_index_roundtrip():
    basis = build_basis(ModelParams(dim=1, modes_per_axis=3, n_max=3))
    for i, occ in enumerate(basis.occupations):
        assert basis.index(occ) == i


def test_missing_state_raises():
    basis = build_basis(ModelParams(dim=1, modes_per_axis=1, n_max=2))
    with pytest.raises(InputError):
        basis.index([3, 0])
    with pytest.raises(InputError):
        basis.index([1, 0, 0])


def test_capacity_error_names_parameters():
    with pytest.raises(CapacityError, match="modes_per_axis=3"):
        build_basis(ModelParams(dim=3, modes_per_axis=3, n_max=4))


def test_capacity_limit_is_configurable():
    p = ModelParams(dim=1, modes_per_axis=3, n_max=3)
    with pytest.raises(CapacityError):
        build_basis(p, limit=50)


def test_safe_mask_is_prefix():
    basis = build_basis(ModelParams(dim=1, modes_per_axis=1, n_max=4))
    mask = basis.safe_mask(2)
    k = mask.sum()
    assert mask[:k].all() and not mask[k:].any()
    assert basis.totals[mask].max() == 2


def test_species_number():
    basis = build_basis(ModelParams(dim=1, modes_per_axis=3, n_max=2))
    assert np.all(basis.species_number(1) + basis.species_number(2) == basis.totals)


def test_enumerate_empty_cutoff():
    occ = enumerate_occupations(4, 0)
    assert occ.shape == (1, 4)


class TestModeGrid:
    def test_closed_under_negation(self):
        g = ModeGrid(2.0, 2, 3)
        np.testing.assert_allclose(g.momenta[g.negated], -g.momenta)

    def test_zero_mode(self):
        g = ModeGrid(1.0, 3, 3)
        assert not g.momenta[g.zero].any()
        assert len(g) == 27

    def test_momentum_spacing(self):
        g = ModeGrid(5.0, 1, 5)
        np.testing.assert_allclose(np.sort(g.momenta[:, 0]), 2 * np.pi * np.arange(-2, 3) / 5.0)

    def test_sum_index(self):
        g = ModeGrid(1.0, 1, 3)
        plus, minus = g.index([1]), g.index([-1])
        assert g.sum_index(plus, minus) == g.zero
        assert g.sum_index(plus, plus) is None

    def test_lattice(self):
        g = ModeGrid(3.0, 2, 3)
        assert g.cell_volume * len(g) == pytest.approx(g.volume)


@pytest.mark.parametrize(
    "kwargs",
    [dict(m=0), dict(lam=-1), dict(v=-0.1), dict(mu=-1), dict(box_length=0), dict(dim=4),
     dict(modes_per_axis=2), dict(n_max=0)],
)
def test_params_validation(kwargs):
    with pytest.raises(InputError):
        ModelParams(**kwargs)
