"""Representation data for compact symmetry groups and the classical
Wigner-Eckart residual.

Group indices ``a`` are 1-based throughout, so ``a=1`` is the generator
built from the first Pauli matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

CLOSURE_TOL = 1e-12


def levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for a, b, c in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        eps[a, b, c] = 1.0
        eps[b, a, c] = -1.0
    return eps


@dataclass(frozen=True)
class LieAlgebraRep:
    """Matrices ``d^a`` with ``i Q^a Psi_j = d^a_{jk} Psi_k`` on one multiplet.

    ``structure_constants[a, b, c]`` satisfies
    ``[T^a, T^b] = sum_c f^{abc} T^c`` for the stored matrices.
    """

    generators: tuple[np.ndarray, ...]
    structure_constants: np.ndarray
    label: str = ""

    def __post_init__(self):
        gens = tuple(np.asarray(g, dtype=complex) for g in self.generators)
        if not gens:
            raise InputError("a representation needs at least one generator")
        dim = gens[0].shape[0]
        for g in gens:
            if g.shape != (dim, dim):
                raise InputError(f"generator shape {g.shape} != ({dim}, {dim})")
        f = np.asarray(self.structure_constants, dtype=float)
        n = len(gens)
        if f.shape != (n, n, n):
            raise InputError(f"structure constants shape {f.shape} != {(n, n, n)}")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "structure_constants", f)

    @property
    def n_generators(self) -> int:
        return len(self.generators)

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0]

    def matrix(self, a: int) -> np.ndarray:
        if not 1 <= a <= self.n_generators:
            raise InputError(f"group index {a} outside 1..{self.n_generators}")
        return self.generators[a - 1]

    def closure_residual(self) -> float:
        """Largest entry of ``[T^a, T^b] - f^{abc} T^c`` over all pairs."""
        worst = 0.0
        T = np.array(self.generators)
        for a in range(self.n_generators):
            for b in range(self.n_generators):
                comm = T[a] @ T[b] - T[b] @ T[a]
                rhs = np.tensordot(self.structure_constants[a, b], T, axes=1)
                worst = max(worst, float(np.max(np.abs(comm - rhs), initial=0.0)))
        return worst

    def hermiticity_residual(self) -> float:
        """Largest entry of ``iT - (iT)^dagger``; zero for a unitary action."""
        worst = 0.0
        for g in self.generators:
            h = 1j * g
            worst = max(worst, float(np.max(np.abs(h - h.conj().T))))
        return worst

    def conjugate(self, label: str | None = None) -> "LieAlgebraRep":
        """Entrywise conjugate representation (acts on adjoint operators)."""
        return LieAlgebraRep(
            tuple(g.conj() for g in self.generators),
            self.structure_constants,
            label if label is not None else f"{self.label}*",
        )


def su2_fundamental() -> LieAlgebraRep:
    """Doublet with ``d^a = (i/2) sigma^a``.

    With this normalization ``[d^1, d^2] = -d^3``, so the stored structure
    constants are ``-epsilon^{abc}``.
    """
    gens = tuple(0.5j * s for s in PAULI)
    return LieAlgebraRep(gens, -levi_civita(), "su2-doublet")


def su2_adjoint() -> LieAlgebraRep:
    """Triplet carried by the charges themselves: ``delta^a Q^b = eps^{abc} Q^c``."""
    eps = levi_civita()
    gens = tuple(eps[a].astype(complex) for a in range(3))
    return LieAlgebraRep(gens, -eps, "su2-triplet")


def trivial_rep(n_generators: int = 3, label: str = "singlet") -> LieAlgebraRep:
    gens = tuple(np.zeros((1, 1), dtype=complex) for _ in range(n_generators))
    return LieAlgebraRep(gens, np.zeros((n_generators,) * 3), label)


def u1_rep(charge: float, label: str = "u1") -> LieAlgebraRep:
    """One-dimensional rep ``d = i * charge`` of an abelian phase rotation."""
    return LieAlgebraRep((np.array([[1j * charge]]),), np.zeros((1, 1, 1)), label)


def infinitesimal_action(rep: LieAlgebraRep, a: int, components) -> np.ndarray:
    """Apply ``d^a`` to a component vector of the multiplet."""
    vec = np.asarray(components, dtype=complex)
    if vec.shape != (rep.dim,):
        raise InputError(f"expected {rep.dim} components, got shape {vec.shape}")
    return rep.matrix(a) @ vec


@dataclass
class MultipletMatrixElements:
    """``values[j, m, k] = <Psi_j, A_m Phi_k>`` for three multiplets.

    ``rep_bra`` acts on the bra states ``Psi_j`` (not on whatever operator
    may have produced them).
    """

    values: np.ndarray
    rep_bra: LieAlgebraRep
    rep_op: LieAlgebraRep
    rep_ket: LieAlgebraRep
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        expected = (self.rep_bra.dim, self.rep_op.dim, self.rep_ket.dim)
        if self.values.shape != expected:
            raise InputError(f"matrix elements shape {self.values.shape} != {expected}")


def we_residual(elems: MultipletMatrixElements, a: int) -> np.ndarray:
    """Residual of the classical Wigner-Eckart relation for generator ``a``.

    Returns ``R[j, m, k] = D^a_{mn} M[j,n,k] + conj(d^a)_{jl} M[l,m,k]
    + f^a_{kl} M[j,m,l]``, which vanishes identically when the symmetry
    is unitarily implemented and leaves the vacuum invariant.
    """
    M = elems.values
    d = elems.rep_bra.matrix(a)
    D = elems.rep_op.matrix(a)
    f = elems.rep_ket.matrix(a)
    return (
        np.einsum("mn,jnk->jmk", D, M)
        + np.einsum("jl,lmk->jmk", d.conj(), M)
        + np.einsum("kl,jml->jmk", f, M)
    )
