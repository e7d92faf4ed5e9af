import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wardssb.errors import ChannelAbsentError, InputError
from wardssb.fock_model import (
    ModelParams,
    Order,
    build_basis,
    build_hamiltonian,
    charge_operator,
    field_at_point,
    mode_field,
)
from wardssb.lie_rep import su2_adjoint, su2_fundamental, trivial_rep, we_residual
from wardssb.ward_engine import (
    conjugate_channel,
    cpt_channel_consistency,
    generalized_we_check,
    goldstone_overlaps,
    multiplet_elements,
    multiplet_ssb_terms,
    oracle_splitting,
    pseudo_goldstone_gap,
    random_operator_triples,
    symmetric_channel_terms,
    selection_rule_check,
    smallest_nonzero_mode,
    splitting_via_ward,
    tadpole_channels,
    tadpole_term,
    vev,
)

GRID3 = dict(dim=3, modes_per_axis=3)


def example_triple(params, basis, p=None, q=None, shifted=True):
    z = basis.grid.zero
    B = mode_field(basis, params, 1, z if p is None else p, shifted=shifted)
    C = mode_field(basis, params, 2, z if q is None else q, shifted=shifted).dag()
    return B, C


class TestGeneralizedCheck:
    def test_example_triple_broken(self):
        p = ModelParams()
        b = build_basis(p)
        H = build_hamiltonian(b, p)
        B, C = example_triple(p, b)
        rep = generalized_we_check(B, H, C, charge_operator(b, p, 1), b.vacuum(), a=1)
        assert rep.residual_algebraic < 1e-10
        assert abs(rep.ssb_term) > 0.1
        assert rep.metadata["a"] == 1

    def test_unbroken_triple_has_no_ssb(self):
        p = ModelParams(v=0.0)
        b = build_basis(p)
        H = build_hamiltonian(b, p, Order.FULL)
        B, C = example_triple(p, b)
        for a in (1, 2, 3):
            rep = generalized_we_check(B, H, C, charge_operator(b, p, a), b.vacuum(), a=a)
            assert abs(rep.ssb_term) < 1e-12
            assert rep.residual_algebraic < 1e-10

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.floats(0.0, 2.0))
    def test_random_triples(self, seed, a, v):
        p = ModelParams(dim=1, modes_per_axis=1, n_max=4, v=v)
        b = build_basis(p)
        (B, A, C), = random_operator_triples(b, 1, np.random.default_rng(seed))
        rep = generalized_we_check(B, A, C, charge_operator(b, p, a), b.vacuum(), a=a)
        scale = max(1.0, abs(rep.lhs), abs(rep.symmetric_rhs))
        assert rep.residual_algebraic < 1e-10 * scale

    def test_dimension_mismatch(self):
        b1 = build_basis(ModelParams(dim=1, n_max=2))
        b2 = build_basis(ModelParams(dim=1, n_max=3))
        p = ModelParams(dim=1)
        Q = charge_operator(b1, p, 1)
        op2 = charge_operator(b2, p, 1)
        with pytest.raises(InputError):
            generalized_we_check(Q, op2, Q, Q, b1.vacuum())

    def test_tadpole_residual_reported(self):
        p = ModelParams()
        res = splitting_via_ward(p)
        assert res.ssb_term == pytest.approx(res.tadpole_term, abs=1e-12)


class TestMultiplets:
    @pytest.fixture(params=[0.0, 1.0], ids=["unbroken", "broken"])
    def data(self, request):
        p = ModelParams(dim=1, modes_per_axis=1, n_max=6, v=request.param)
        b = build_basis(p)
        H = build_hamiltonian(b, p, Order.FULL, include_mu=False)
        Bs = [field_at_point(b, p, s, [0.0], shifted=True) for s in (1, 2)]
        Cs = [B.dag() for B in Bs]
        Qs = [charge_operator(b, p, a) for a in (1, 2, 3)]
        return p, b, H, Bs, Cs, Qs

    @pytest.mark.parametrize("family", ["H", "Q"])
    @pytest.mark.parametrize("a", [1, 2, 3])
    def test_residual_equals_ssb(self, data, family, a):
        p, b, H, Bs, Cs, Qs = data
        As, rep_op = ([H], trivial_rep()) if family == "H" else (Qs, su2_adjoint())
        d = su2_fundamental().conjugate()
        elems = multiplet_elements(Bs, As, Cs, b.vacuum(), d, rep_op, d)
        R = we_residual(elems, a)
        ssb = multiplet_ssb_terms(Bs, As, Cs, Qs[a - 1], b.vacuum())
        np.testing.assert_allclose(R, ssb, atol=1e-10)
        if p.v == 0:
            assert np.abs(R).max() < 1e-10
            assert np.abs(ssb).max() < 1e-12

    def test_broken_relation_fails(self):
        p = ModelParams(dim=1, modes_per_axis=1, n_max=6)
        b = build_basis(p)
        H = build_hamiltonian(b, p, Order.FULL, include_mu=False)
        Bs = [field_at_point(b, p, s, [0.0], shifted=True) for s in (1, 2)]
        Cs = [B.dag() for B in Bs]
        d = su2_fundamental().conjugate()
        elems = multiplet_elements(Bs, [H], Cs, b.vacuum(), d, trivial_rep(), d)
        assert np.abs(we_residual(elems, 1)).max() > 0.1


class TestGoldstoneOverlaps:
    @pytest.mark.parametrize("v", [0.5, 1.0, 2.0])
    def test_tree_F(self, v):
        ov = goldstone_overlaps(ModelParams(v=v, **GRID3))
        np.testing.assert_allclose(ov.F, -0.5j * v, atol=1e-10)

    @pytest.mark.parametrize("m, v", [(1.0, 1.0), (0.5, 2.0)])
    def test_tree_G(self, m, v):
        ov = goldstone_overlaps(ModelParams(m=m, v=v, **GRID3))
        nz = ~np.isnan(ov.G)
        np.testing.assert_allclose(ov.G[nz], -1j * v / (4 * m), atol=1e-12)

    @pytest.mark.parametrize("L, m", [(1.0, 1.0), (2.5, 0.7)])
    def test_current_conservation(self, L, m):
        ov = goldstone_overlaps(ModelParams(box_length=L, m=m, **GRID3))
        assert ov.current_conservation_residuals().max() < 1e-10

    def test_k0_is_tree_dispersion(self):
        p = ModelParams(m=0.8, **GRID3)
        ov = goldstone_overlaps(p)
        np.testing.assert_allclose(ov.k0, np.sum(ov.momenta**2, axis=1) / (2 * p.m), atol=1e-12)

    def test_channel_absent_at_v0(self):
        with pytest.raises(ChannelAbsentError):
            goldstone_overlaps(ModelParams(v=0.0))

    def test_a3_has_no_phi2_channel(self):
        with pytest.raises(ChannelAbsentError):
            goldstone_overlaps(ModelParams(), a=3)

    @pytest.mark.parametrize("a", [1, 2])
    def test_cpt_consistency(self, a):
        ov = goldstone_overlaps(ModelParams(**GRID3), a=a)
        assert cpt_channel_consistency(ov) < 1e-10
        assert np.abs(ov.j0_direct).max() > 0.1

    def test_conjugate_channel_is_antiunitary(self):
        b = build_basis(ModelParams(dim=1, modes_per_axis=3, n_max=2))
        rng = np.random.default_rng(1)
        x, y = rng.normal(size=(2, b.dim)) + 1j * rng.normal(size=(2, b.dim))
        lhs = np.vdot(conjugate_channel(b, 1, x), conjugate_channel(b, 1, y))
        assert lhs == pytest.approx(np.conj(np.vdot(x, y)))


TADPOLE_P = ModelParams(dim=1, modes_per_axis=3, n_max=3, lam=0.7, v=1.3, box_length=3.0)


@pytest.fixture(scope="module")
def tadpole_setup():
    b = build_basis(TADPOLE_P)
    return b, build_hamiltonian(b, TADPOLE_P), goldstone_overlaps(TADPOLE_P, b)


class TestTadpole:
    P = TADPOLE_P

    @pytest.fixture
    def setup(self, tadpole_setup):
        return tadpole_setup

    def test_channels_of_example_triple(self, setup):
        b, H, ov = setup
        grid = b.grid
        for pm in range(3):
            for qm in range(3):
                B, C = example_triple(self.P, b, pm, qm, shifted=False)
                for k in range(3):
                    direct, conj = tadpole_channels(B @ H @ C, ov, k)
                    assert abs(conj) < 1e-12
                    hit = grid.sum_index(pm, k) == qm
                    expected = self.P.lam * self.P.v / np.sqrt(grid.volume) if hit else 0.0
                    assert direct == pytest.approx(expected, abs=1e-12)

    def test_assembled_splitting(self, setup):
        b, H, ov = setup
        B, C = example_triple(self.P, b, shifted=False)
        tad = tadpole_term(B @ H @ C, ov)
        assert (2j * tad).real == pytest.approx(self.P.lam * self.P.v**2, abs=1e-12)

    def test_momentum_independent_tadpole(self):
        p = ModelParams(dim=1, modes_per_axis=3, n_max=4, v=0.6)
        res = splitting_via_ward(p)
        assert res.tadpole_smallest_k == pytest.approx(res.tadpole_term, abs=1e-12)

    def test_invariant_order_parameter_channels(self, setup):
        """``i(psi_2 - psi_2^+)`` is invariant under the conjugation, so both
        channel terms coincide and the reduced form gives ``<delta A>``."""
        b, H, ov = setup
        f = mode_field(b, self.P, 2, b.grid.zero)
        A = (f - f.dag()) * 1j
        direct, conj, simple = symmetric_channel_terms(ov, A)
        assert abs(direct) > 0.1
        assert direct == pytest.approx(conj, abs=1e-12)
        Q = charge_operator(b, self.P, 1)
        delta = vev(b.vacuum(), (Q @ A - A @ Q) * 1j)
        assert simple == pytest.approx(delta, abs=1e-12)

    def test_channels_differ_without_invariance(self, setup):
        b, H, ov = setup
        direct, conj, _ = symmetric_channel_terms(ov, mode_field(b, self.P, 2, b.grid.zero))
        assert abs(direct - conj) > 0.5

    def test_channel_absent_mode(self, setup):
        b, H, ov = setup
        F = ov.F.copy()
        F[0] = 0
        with pytest.raises(ChannelAbsentError):
            tadpole_term(H, dataclasses.replace(ov, F=F), 0)

    def test_smallest_mode(self, setup):
        b, _, _ = setup
        k = smallest_nonzero_mode(b.grid)
        assert b.grid.k_squared[k] == pytest.approx((2 * np.pi / self.P.box_length) ** 2)
        assert smallest_nonzero_mode(build_basis(ModelParams(), n_max=1).grid) is None


class TestSplitting:
    @pytest.mark.parametrize(
        "lam, v, mu, expected",
        [(1.0, 1.0, 0.0, 1.0), (2.0, 0.5, 0.0, 0.5), (1.0, 1.0, 0.3, 0.7), (1.0, 0.0, 0.2, -0.2)],
    )
    def test_examples(self, lam, v, mu, expected):
        lhs, rhs, residual = splitting_via_ward(ModelParams(lam=lam, v=v, mu=mu))
        assert lhs == pytest.approx(expected, abs=1e-10)
        assert rhs == pytest.approx(expected, abs=1e-10)
        assert residual < 1e-10

    def test_without_mu_term(self):
        res = splitting_via_ward(ModelParams(mu=0.3), include_mu=False)
        assert res.lhs == pytest.approx(1.0) and res.expected == 1.0

    def test_explicit_piece(self):
        res = splitting_via_ward(ModelParams(mu=0.3))
        assert res.explicit_term == pytest.approx(-0.3, abs=1e-12)

    @pytest.mark.parametrize("v", [0.1, 0.01, 0.001])
    def test_unbroken_continuity(self, v):
        res = splitting_via_ward(ModelParams(v=v))
        assert res.ssb_term / v**2 == pytest.approx(-0.5j, abs=1e-12)
        assert res.tadpole_term / v**2 == pytest.approx(-0.5j, abs=1e-12)

    def test_corrupted_hamiltonian_detected(self):
        p = ModelParams()
        b = build_basis(p)
        z = b.grid.zero
        phi1 = mode_field(b, p, 1, z)
        H = build_hamiltonian(b, p) + (phi1.dag() @ phi1) * 0.01
        res = splitting_via_ward(p, b, hamiltonian=H)
        assert abs(res.lhs - res.expected) > 1e-3


class TestSpectrum:
    @pytest.mark.parametrize("mu", [0.0, 0.1, 0.3, 1.0])
    def test_gap_law(self, mu):
        assert pseudo_goldstone_gap(ModelParams(mu=mu, **GRID3)).gap("phi2") == mu

    def test_dispersion_shape(self):
        p = ModelParams(m=0.5, mu=0.3, dim=1, modes_per_axis=5, box_length=2.0)
        table = pseudo_goldstone_gap(p)
        k = table.momenta("phi2")[:, 0]
        np.testing.assert_allclose(table.omega("phi2") - table.gap("phi2"), k**2 / (2 * p.m), atol=1e-12)
        np.testing.assert_allclose(table.omega("phi1"), k**2 / (2 * p.m) + p.lam * p.v**2, atol=1e-12)

    def test_unknown_channel(self):
        with pytest.raises(KeyError):
            pseudo_goldstone_gap(ModelParams()).gap("chi")


class TestSelectionRules:
    def test_rules(self):
        rows, grading = selection_rule_check(ModelParams(dim=1, modes_per_axis=3, n_max=4))
        assert grading == {0}
        forbidden = [abs(v) for _, q, v in rows if q != 0]
        assert max(forbidden) < 1e-12
        named = {lbl: v for lbl, _, v in rows}
        assert abs(named["<psi1[1] H psi2+[1]>"]) < 1e-12
        assert abs(named["<1 H phi2+phi2+>"]) < 1e-12

    def test_allowed_element_nonzero(self):
        rows, _ = selection_rule_check(ModelParams(dim=1, modes_per_axis=3, n_max=4, mu=0.2))
        named = {lbl: v for lbl, _, v in rows}
        assert abs(named["<psi2[1] H psi2+[1]>"]) == pytest.approx(0.2)


def test_oracle_result_fields():
    res = oracle_splitting(ModelParams(dim=1, modes_per_axis=1, n_max=6, lam=1.0, v=0.05))
    assert res.bound == pytest.approx(10 * 0.05**2)
    assert res.deviation < 1e-12
