"""Both sides of the symmetry-breaking Ward identities on the tree vacuum.

Finite-volume conventions: box modes carry Kronecker deltas, and a
continuum improper state ``|k>`` corresponds to ``(L/2pi)^{d/2} |k>_box``.
With these, ``F_a = i sqrt(V) <Omega| j^a_0(0) |k, a>_box`` and the
tadpole prefactor ``(2pi)^{d/2}`` becomes ``sqrt(V)`` once the volume
factors of the overlaps are absorbed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ChannelAbsentError, InputError
from .fock_model import (
    FockBasis,
    ModelParams,
    NormalOrderedPoly,
    Order,
    SparseOperator,
    build_basis,
    build_hamiltonian,
    charge_density,
    charge_operator,
    creator,
    current_density,
    delta_a,
    identity,
    mode_field,
    sector_levels,
)
from .fock_model.params import ModeGrid
from .lie_rep import LieAlgebraRep, MultipletMatrixElements

GOLDSTONE_SPECIES = 2
CHANNEL_TOL = 1e-13


@dataclass
class WardReport:
    lhs: complex
    symmetric_rhs: complex
    ssb_term: complex
    tadpole_term: complex | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def residual_algebraic(self) -> float:
        return abs(self.lhs - self.symmetric_rhs - self.ssb_term)

    @property
    def residual_tadpole(self) -> float | None:
        if self.tadpole_term is None:
            return None
        return abs(self.ssb_term - self.tadpole_term)


def _chain(vec, *ops):
    """Apply ``ops`` right to left: ``_chain(v, A, B) = A B v``."""
    for op in reversed(ops):
        vec = op.matrix @ vec
    return vec


def vev(vacuum, *ops) -> complex:
    return complex(np.vdot(vacuum, _chain(vacuum, *ops)))


def generalized_we_check(B: SparseOperator, A: SparseOperator, C: SparseOperator,
                         charge: SparseOperator, vacuum: np.ndarray, a: int | None = None,
                         tadpole: complex | None = None) -> WardReport:
    """Evaluate ``<B* O, dA C O> = -<dB* O, A C O> - <B* O, A dC O> + <d(BAC)>``.

    Every variation is ``i [charge, .]`` evaluated with the same truncated
    matrices, so ``residual_algebraic`` tests the Leibniz structure alone.
    """
    dims = {B.shape, A.shape, C.shape, charge.shape}
    if len(dims) != 1 or vacuum.shape != (B.shape[0],):
        raise InputError("operators and vacuum must share one basis")
    dB, dA, dC = (delta_a(op, charge) for op in (B, A, C))
    lhs = vev(vacuum, B, dA, C)
    sym = -vev(vacuum, dB, A, C) - vev(vacuum, B, A, dC)
    X = B @ A @ C
    ssb = vev(vacuum, delta_a(X, charge))
    return WardReport(lhs, sym, ssb, tadpole, {"a": a, "ops": (B.label, A.label, C.label)})


def multiplet_elements(Bs, As, Cs, vacuum, rep_bra: LieAlgebraRep, rep_op: LieAlgebraRep,
                       rep_ket: LieAlgebraRep) -> MultipletMatrixElements:
    """``M[j, m, k] = <Omega| B_j A_m C_k |Omega>``.

    ``rep_bra`` must describe the states ``B_j^* Omega``; for ``B_j = psi_j``
    that is the conjugate doublet.
    """
    M = np.empty((len(Bs), len(As), len(Cs)), dtype=complex)
    for j, Bj in enumerate(Bs):
        for m, Am in enumerate(As):
            for k, Ck in enumerate(Cs):
                M[j, m, k] = vev(vacuum, Bj, Am, Ck)
    return MultipletMatrixElements(M, rep_bra, rep_op, rep_ket)


def multiplet_ssb_terms(Bs, As, Cs, charge: SparseOperator, vacuum) -> np.ndarray:
    out = np.empty((len(Bs), len(As), len(Cs)), dtype=complex)
    for j, Bj in enumerate(Bs):
        for m, Am in enumerate(As):
            for k, Ck in enumerate(Cs):
                out[j, m, k] = vev(vacuum, delta_a(Bj @ Am @ Ck, charge))
    return out


def random_operator(basis: FockBasis, rng: np.random.Generator, max_degree: int = 2,
                    n_terms: int = 5) -> SparseOperator:
    """Random normal-ordered polynomial with complex Gaussian coefficients."""
    poly = NormalOrderedPoly()
    for _ in range(n_terms):
        n_cre = int(rng.integers(0, max_degree + 1))
        n_ann = int(rng.integers(0, max_degree - n_cre + 1))
        cre = rng.integers(0, basis.n_orbitals, n_cre)
        ann = rng.integers(0, basis.n_orbitals, n_ann)
        poly.add(complex(rng.normal(), rng.normal()), cre.tolist(), ann.tolist())
    return poly.to_operator(basis, label="rand")


def random_operator_triples(basis: FockBasis, n: int, rng: np.random.Generator, max_degree: int = 2):
    """``n`` triples ``(B, A, C)`` of :func:`random_operator` without symmetry structure."""
    return [tuple(random_operator(basis, rng, max_degree) for _ in range(3)) for _ in range(n)]


# --------------------------------------------------------------------------
# Goldstone channel


def conjugation_phase(a: int) -> float:
    """Residual-rotation angle ``alpha`` making ``R(alpha) K`` reverse ``j^a_0``.

    ``K`` (complex conjugation in the occupation basis) is antiunitary,
    fixes the vacuum and the real-coefficient density ``j^1_0(0)``, and
    flips ``j^2_0(0)``.  Composing with ``psi_2 -> e^{i alpha} psi_2`` rotates
    the pair ``(j^1, j^2)`` by ``alpha``.
    """
    return {1: np.pi, 2: 0.0}[a]


def conjugate_channel(basis: FockBasis, a: int, vec: np.ndarray) -> np.ndarray:
    """Antiunitary conjugate ``R K |vec>`` of a state, used for the bar-a channel."""
    phase = np.exp(1j * conjugation_phase(a) * basis.species_number(GOLDSTONE_SPECIES))
    return phase * np.conj(vec)


@dataclass
class GoldstoneOverlaps:
    """Per-mode overlaps of ``j^a`` with the one-Goldstone states.

    ``F`` and ``G`` are sampled at every grid momentum; ``G`` is ``nan`` at
    the zero mode, where it is undefined.
    """

    a: int
    momenta: np.ndarray
    k0: np.ndarray
    F: np.ndarray
    G: np.ndarray
    j0_direct: np.ndarray
    j0_conjugate: np.ndarray
    direct_states: np.ndarray
    conjugate_states: np.ndarray
    vacuum: np.ndarray
    volume: float
    negated: np.ndarray
    zero: int

    def current_conservation_residuals(self) -> np.ndarray:
        """``| |k|^2 G - k0 F |`` at each nonzero momentum."""
        ksq = np.sum(self.momenta**2, axis=1)
        nz = ksq > 0
        return np.abs(ksq[nz] * self.G[nz] - self.k0[nz] * self.F[nz])


def _dispersion_k0(basis: FockBasis, params: ModelParams, species: int, H: SparseOperator | None = None):
    H = build_hamiltonian(basis, params, Order.TREE, shifted=True) if H is None else H
    vac = basis.vacuum()
    out = np.empty(basis.n_modes)
    for k in range(basis.n_modes):
        state = creator(basis, species, k) @ vac
        out[k] = H.expect(state).real
    return out


def goldstone_overlaps(params: ModelParams, basis: FockBasis | None = None, a: int = 1) -> GoldstoneOverlaps:
    """Extract ``F_a`` and ``G_a`` from Fock matrix elements on the tree vacuum.

    The direct channel at momentum ``k`` is ``phi_2^+(k)|Omega>``; its
    conjugate is :func:`conjugate_channel` of it.  Only one-quantum
    overlaps enter, so a one-quantum basis suffices and is the default.

    Raises
    ------
    ChannelAbsentError
        If ``j^a_0(0)|Omega>`` has no component along the Goldstone states.
    """
    if a not in (1, 2, 3):
        raise InputError(f"SU(2) generator index must be 1, 2 or 3, got {a}")
    basis = build_basis(params, n_max=1) if basis is None else basis
    grid: ModeGrid = basis.grid
    vac = basis.vacuum()
    states = np.column_stack([creator(basis, GOLDSTONE_SPECIES, k) @ vac for k in range(len(grid))])
    j0 = charge_density(basis, params, a)
    candidate = states.conj().T @ (j0.matrix @ vac)
    if np.linalg.norm(candidate) < CHANNEL_TOL:
        raise ChannelAbsentError(
            f"j^{a}_0 does not couple the vacuum to phi_2 quanta (v={params.v})"
        )
    conj_states = np.column_stack([conjugate_channel(basis, a, states[:, k]) for k in range(len(grid))])
    direct = np.array([np.vdot(vac, j0.matrix @ states[:, k]) for k in range(len(grid))])
    conjugate = np.array([np.vdot(conj_states[:, k], j0.matrix @ vac) for k in range(len(grid))])
    sqrtV = np.sqrt(grid.volume)
    F = 1j * sqrtV * direct

    ji = [current_density(basis, params, a, axis) for axis in range(grid.dim)]
    G = np.full(len(grid), np.nan, dtype=complex)
    for k in range(len(grid)):
        kvec = grid.momenta[k]
        ksq = kvec @ kvec
        if ksq == 0:
            continue
        amps = np.array([np.vdot(vac, j.matrix @ states[:, k]) for j in ji])
        # <j_l|k> = -i (2pi)^{-d/2} k_l G, projected on k
        G[k] = 1j * sqrtV * (kvec @ amps) / ksq

    return GoldstoneOverlaps(
        a=a,
        momenta=grid.momenta,
        k0=_dispersion_k0(basis, params, GOLDSTONE_SPECIES),
        F=F,
        G=G,
        j0_direct=direct,
        j0_conjugate=conjugate,
        direct_states=states,
        conjugate_states=conj_states,
        vacuum=vac,
        volume=grid.volume,
        negated=grid.negated,
        zero=grid.zero,
    )


def cpt_channel_consistency(overlaps: GoldstoneOverlaps) -> float:
    """Max over modes of ``|<j0|k, a> + <k, bar a|j0>|``."""
    return float(np.max(np.abs(overlaps.j0_direct + overlaps.j0_conjugate)))


def tadpole_term(X: SparseOperator, overlaps: GoldstoneOverlaps, k: int | None = None) -> complex:
    """``sqrt(V) F_a(k) (<k, a|X Omega> + <Omega|X|-k, bar a>)`` for one mode.

    ``X`` is the product ``B A C`` on the basis of ``overlaps``; ``k``
    defaults to the zero mode.
    """
    k = overlaps.zero if k is None else k
    vac = overlaps.vacuum
    if X.shape[0] != vac.shape[0]:
        raise InputError("operator and overlaps live on different bases")
    if abs(overlaps.F[k]) < CHANNEL_TOL:
        raise ChannelAbsentError(f"no Goldstone overlap at mode {k}")
    direct = np.vdot(overlaps.direct_states[:, k], X.matrix @ vac)
    conj = np.vdot(vac, X.matrix @ overlaps.conjugate_states[:, overlaps.negated[k]])
    return complex(np.sqrt(overlaps.volume) * overlaps.F[k] * (direct + conj))


def tadpole_channels(X: SparseOperator, overlaps: GoldstoneOverlaps, k: int | None = None):
    """The two matrix elements entering :func:`tadpole_term`, separately."""
    k = overlaps.zero if k is None else k
    vac = overlaps.vacuum
    direct = np.vdot(overlaps.direct_states[:, k], X.matrix @ vac)
    conj = np.vdot(vac, X.matrix @ overlaps.conjugate_states[:, overlaps.negated[k]])
    return complex(direct), complex(conj)


def smallest_nonzero_mode(grid: ModeGrid) -> int | None:
    ksq = grid.k_squared
    nz = np.flatnonzero(ksq > 0)
    if nz.size == 0:
        return None
    return int(nz[np.argmin(ksq[nz])])


# --------------------------------------------------------------------------
# The two-component example


@dataclass
class SplittingResult:
    lhs: float
    rhs: float
    residual: float
    expected: float
    ssb_term: complex
    tadpole_term: complex
    explicit_term: complex
    tadpole_smallest_k: complex | None = None

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.residual))


def splitting_via_ward(params: ModelParams, basis: FockBasis | None = None, include_mu: bool = True,
                       hamiltonian: SparseOperator | None = None) -> SplittingResult:
    """Zero-momentum splitting ``<phi_1 H phi_1^+> - <phi_2 H phi_2^+>`` both ways.

    The right side is ``2i`` times the tadpole evaluation of
    ``<delta^1(phi_1 H phi_2^+)>`` minus ``2i <phi_1 (delta^1 H) phi_2^+>``;
    the second piece is the explicit-breaking contribution and vanishes for
    ``mu = 0``.  ``phi_1`` rather than ``psi_1 = v sqrt(V) + phi_1`` keeps the
    condensate constant out of the Goldstone channel; the two differ only by
    terms that cancel between tadpole and explicit pieces.  Unpacks as
    ``(lhs, rhs, residual)``.
    """
    if basis is None:
        basis = build_basis(params, n_max=max(params.n_max, 4))
    H = build_hamiltonian(basis, params, Order.TREE, shifted=True, include_mu=include_mu) \
        if hamiltonian is None else hamiltonian
    grid = basis.grid
    vac = basis.vacuum()
    z = grid.zero
    phi1, phi2 = mode_field(basis, params, 1, z), mode_field(basis, params, 2, z)
    lhs = vev(vac, phi1, H, phi1.dag()) - vev(vac, phi2, H, phi2.dag())

    B = phi1
    C = phi2.dag()
    X = B @ H @ C
    Q1 = charge_operator(basis, params, 1)
    ssb = vev(vac, delta_a(X, Q1))
    explicit = -2j * vev(vac, B, delta_a(H, Q1), C)
    kmin = smallest_nonzero_mode(grid)
    try:
        overlaps = goldstone_overlaps(params, basis, a=1)
    except ChannelAbsentError:
        # symmetric vacuum: no Goldstone channel, so no tadpole
        overlaps = None
    tad, tad_k = 0j, None
    if overlaps is not None:
        tad = tadpole_term(X, overlaps, z)
        if kmin is not None:
            Ck = mode_field(basis, params, 2, kmin).dag()
            tad_k = tadpole_term(B @ H @ Ck, overlaps, kmin)
    rhs = 2j * tad + explicit

    expected = params.lam * params.v**2 - (params.mu if include_mu else 0.0)
    return SplittingResult(
        lhs=float(lhs.real),
        rhs=float(rhs.real),
        residual=float(abs(lhs - rhs)),
        expected=expected,
        ssb_term=ssb,
        tadpole_term=tad,
        explicit_term=explicit,
        tadpole_smallest_k=tad_k,
    )


@dataclass
class DispersionTable:
    """Rows ``(channel, k, omega)`` with ``omega = <k|H|k>`` on one-quantum states."""

    rows: list = field(default_factory=list)

    def omega(self, channel: str) -> np.ndarray:
        return np.array([w for c, _, w in self.rows if c == channel])

    def momenta(self, channel: str) -> np.ndarray:
        return np.array([k for c, k, _ in self.rows if c == channel])

    def gap(self, channel: str = "phi2") -> float:
        for c, k, w in self.rows:
            if c == channel and not np.any(k):
                return w
        raise KeyError(channel)


def pseudo_goldstone_gap(params: ModelParams) -> DispersionTable:
    """Tree matrix-element dispersion of both species; ``phi2`` at ``k=0`` is the gap."""
    basis = build_basis(params, n_max=1)
    H = build_hamiltonian(basis, params, Order.TREE, shifted=True)
    vac = basis.vacuum()
    table = DispersionTable()
    for species in (1, 2):
        for k in range(basis.n_modes):
            state = creator(basis, species, k) @ vac
            val = H.expect(state)
            if abs(val.imag) > 1e-12:
                raise RuntimeError(f"complex matrix-element energy {val}")
            table.rows.append((f"phi{species}", basis.grid.momenta[k].copy(), float(val.real)))
    return table


def selection_rule_check(params: ModelParams, basis: FockBasis | None = None):
    """Matrix elements ``<Omega| B H C |Omega>`` tagged by residual charge.

    Returns ``(rows, grading)``: rows are ``(label, charge, value)`` where
    ``charge`` is the net ``phi_2`` number change of ``B C`` (nonzero means
    forbidden), and ``grading`` is the set of net ``phi_2`` changes over all
    Hamiltonian monomials, which must be ``{0}``.
    """
    from .fock_model import hamiltonian_poly

    if basis is None:
        basis = build_basis(params, n_max=max(params.n_max, 4))
    H = build_hamiltonian(basis, params, Order.FULL, shifted=True)
    vac = basis.vacuum()
    grid = basis.grid
    ops = {}
    for k in range(len(grid)):
        for s in (1, 2):
            f = mode_field(basis, params, s, k, shifted=True)
            q = 1 if s == 2 else 0
            ops[f"psi{s}[{k}]"] = (f, -q)
            ops[f"psi{s}+[{k}]"] = (f.dag(), q)
    z = grid.zero
    p2 = mode_field(basis, params, 2, z).dag()
    p1 = mode_field(basis, params, 1, z).dag()
    ops["phi2+phi2+"] = (p2 @ p2, 2)
    ops["phi2 phi2"] = ((p2 @ p2).dag(), -2)
    ops["phi1+phi2+"] = (p1 @ p2, 1)
    ops["1"] = (identity(basis), 0)

    rows = []
    names = list(ops)
    for bn in names:
        Bop, qb = ops[bn]
        for cn in names:
            Cop, qc = ops[cn]
            rows.append((f"<{bn} H {cn}>", qb + qc, vev(vac, Bop, H, Cop)))
    poly = hamiltonian_poly(params, Order.FULL, shifted=True)
    grading = poly.residual_charge([basis.orbital(2, k) for k in range(len(grid))])
    return rows, grading


def symmetric_channel_terms(overlaps: GoldstoneOverlaps, A: SparseOperator, k: int | None = None):
    """``(<k,a|A Omega>, <Omega|A|-k, bar a>, <delta A> via 2 sqrt(V) F <k|A>)``."""
    k = overlaps.zero if k is None else k
    direct, conj = tadpole_channels(A, overlaps, k)
    simple = 2 * np.sqrt(overlaps.volume) * overlaps.F[k] * direct
    return direct, conj, complex(simple)


# --------------------------------------------------------------------------
# Exact-diagonalization oracle


@dataclass
class OracleResult:
    exact: float
    tree: float
    deviation: float
    bound: float

    @property
    def within_bound(self) -> bool:
        return self.deviation <= self.bound


def oracle_splitting(params: ModelParams) -> OracleResult:
    """Compare the tree splitting with exact levels of the full Hamiltonian.

    Uses the residual-U(1) sectors: the ``phi_2``-like level is the lowest
    state with one ``phi_2`` quantum, the ``phi_1``-like level the first
    excitation without one, both measured from the ground energy.  The bound
    ``10 (lam v)^2`` is an empirical scale, not a proven estimate.

    On a single mode with ``mu = 0`` the Hamiltonian is ``lam`` times a fixed
    operator, so the deviation is exactly linear in ``lam``.  It is set by
    the condensate occupation ``v^2 V`` relative to ``n_max``: a truncation
    effect of the occupation cutoff rather than a perturbative correction.
    """
    basis = build_basis(params)
    e0 = sector_levels(basis, params, 0, 2)
    e2 = sector_levels(basis, params, 1, 1)
    exact = float((e0[1] - e0[0]) - (e2[0] - e0[0]))
    tree = params.lam * params.v**2 - params.mu
    return OracleResult(exact, tree, abs(exact - tree), 10 * (params.lam * params.v) ** 2)


def with_params(params: ModelParams, **changes) -> ModelParams:
    return replace(params, **changes)
