"""Exact diagonalization and real-time evolution on the truncated space."""

from __future__ import annotations

import numpy as np
import scipy.linalg as la
import scipy.sparse.linalg as sla

from ..errors import CapacityError, SolverError
from .basis import FockBasis
from .charges import charge_operator
from .hamiltonian import Order, build_hamiltonian
from .operators import SparseOperator
from .params import ModelParams

DENSE_LIMIT = 4000
EVOLUTION_LIMIT = 2000
DEGENERACY_TOL = 1e-10


def fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate so the largest-magnitude component is real and positive."""
    i = int(np.argmax(np.abs(vec)))
    return vec * (abs(vec[i]) / vec[i])


def _lowest(H: SparseOperator, n_states: int, dense_limit: int):
    dim = H.shape[0]
    if dim <= dense_limit:
        w, U = la.eigh(H.toarray())
        return w[:n_states], U[:, :n_states]
    k = min(n_states, dim - 2)
    try:
        w, U = sla.eigsh(H.matrix, k=k, which="SA", tol=1e-12, maxiter=50 * dim)
    except sla.ArpackNoConvergence as exc:
        raise SolverError(
            f"Lanczos did not converge for dim={dim}: {len(exc.eigenvalues)} of {k} eigenpairs"
        ) from exc
    order = np.argsort(w)
    return w[order], U[:, order]


def exact_ground_state(basis: FockBasis, params: ModelParams, dense_limit: int = DENSE_LIMIT,
                       order: Order | str = Order.FULL):
    """Lowest eigenpair of the shifted Hamiltonian.

    Inside a degenerate ground space the returned vector is the normalized
    projection of the Fock vacuum when that projection is nonzero; the phase
    convention of :func:`fix_phase` is then applied.
    """
    H = build_hamiltonian(basis, params, order, shifted=True)
    n_probe = min(basis.dim, 8)
    w, U = _lowest(H, n_probe, dense_limit)
    if basis.dim > dense_limit and not np.all(np.isfinite(w)):
        raise SolverError("eigensolver returned non-finite eigenvalues")
    ground = np.abs(w - w[0]) < DEGENERACY_TOL
    space = U[:, ground]
    proj = space @ space[0].conj()
    if np.linalg.norm(proj) > 1e-8:
        vec = proj / np.linalg.norm(proj)
    else:
        vec = space[:, 0]
    return float(w[0]), fix_phase(vec)


def sector_levels(basis: FockBasis, params: ModelParams, n2: int, n_levels: int = 4,
                  order: Order | str = Order.FULL) -> np.ndarray:
    """Lowest levels of the shifted Hamiltonian at fixed ``phi_2`` number.

    The residual phase rotation of ``psi_2`` commutes with every Hamiltonian
    order, so the sectors decouple exactly.
    """
    H = build_hamiltonian(basis, params, order, shifted=True)
    idx = np.flatnonzero(basis.species_number(2) == n2)
    if idx.size == 0:
        return np.array([])
    block = H.matrix[idx][:, idx]
    if idx.size > DENSE_LIMIT:
        raise CapacityError(f"sector dimension {idx.size} exceeds dense limit {DENSE_LIMIT}")
    return la.eigvalsh(block.toarray())[:n_levels]


def time_evolved_charge_commutator(basis: FockBasis, params: ModelParams, a: int, A: SparseOperator,
                                   t: float, order: Order | str = Order.QUADRATIC,
                                   limit: int = EVOLUTION_LIMIT, Q: SparseOperator | None = None) -> complex:
    """``<Omega| [e^{iHt} Q^a e^{-iHt}, A] |Omega>`` on the tree vacuum.

    ``H`` is the shifted Hamiltonian at ``order`` including the breaking
    term; ``Q`` defaults to the whole-box charge.
    """
    if basis.dim > limit:
        raise CapacityError(f"time evolution needs dim <= {limit}, got {basis.dim}")
    H = build_hamiltonian(basis, params, order, shifted=True)
    Q = charge_operator(basis, params, a) if Q is None else Q
    w, U = la.eigh(H.toarray())

    def evolve(vec):
        return U @ (np.exp(-1j * w * t) * (U.conj().T @ vec))

    vac = basis.vacuum()
    u = evolve(vac)
    first = np.vdot(u, Q.matrix @ evolve(A.matrix @ vac))
    second = np.vdot(evolve(A.matrix.conj().T @ vac), Q.matrix @ u)
    return complex(first - second)
