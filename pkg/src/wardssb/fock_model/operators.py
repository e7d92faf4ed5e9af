"""Normal-ordered polynomials in mode operators and their sparse matrices."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from math import comb

import numpy as np
import scipy.sparse as sp

from ..errors import InputError
from .basis import FockBasis
from .params import ModelParams

HERMITIAN_TOL = 1e-12


@dataclass
class SparseOperator:
    """A complex sparse matrix on a :class:`FockBasis`.

    When ``hermitian`` is set the matrix is checked on construction.
    """

    matrix: sp.csr_matrix
    hermitian: bool = False
    label: str = ""

    def __post_init__(self):
        self.matrix = sp.csr_matrix(self.matrix, dtype=complex)
        if self.hermitian:
            dev = hermiticity_defect(self.matrix)
            if dev >= HERMITIAN_TOL:
                raise ValueError(f"operator {self.label!r} flagged hermitian but |O - O^+| = {dev:.3e}")

    @property
    def shape(self):
        return self.matrix.shape

    def dag(self) -> "SparseOperator":
        return SparseOperator(self.matrix.conj().T.tocsr(), self.hermitian, f"({self.label})^+")

    def __matmul__(self, other):
        if isinstance(other, SparseOperator):
            return SparseOperator(self.matrix @ other.matrix, label=f"{self.label} {other.label}")
        return self.matrix @ other

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        return SparseOperator(self.matrix + other.matrix, label=f"{self.label} + {other.label}")

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        return SparseOperator(self.matrix - other.matrix, label=f"{self.label} - {other.label}")

    def __mul__(self, scalar) -> "SparseOperator":
        return SparseOperator(self.matrix * scalar, label=self.label)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def expect(self, bra: np.ndarray, ket: np.ndarray | None = None) -> complex:
        """``<bra| O |ket>`` with ``ket`` defaulting to ``bra``."""
        ket = bra if ket is None else ket
        return complex(np.vdot(bra, self.matrix @ ket))

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def hermiticity_defect(mat) -> float:
    diff = mat - mat.conj().T
    if sp.issparse(diff):
        return float(abs(diff).max()) if diff.nnz else 0.0
    return float(np.max(np.abs(diff), initial=0.0))


def commutator(a: SparseOperator, b: SparseOperator) -> SparseOperator:
    return SparseOperator(a.matrix @ b.matrix - b.matrix @ a.matrix, label=f"[{a.label}, {b.label}]")


def delta_a(op: SparseOperator, Q: SparseOperator) -> SparseOperator:
    """Infinitesimal symmetry variation ``i [Q, op]``."""
    return SparseOperator(1j * (Q.matrix @ op.matrix - op.matrix @ Q.matrix), label=f"delta({op.label})")


def identity(basis: FockBasis) -> SparseOperator:
    return SparseOperator(sp.identity(basis.dim, dtype=complex, format="csr"), True, "1")


def restrict(op: SparseOperator, mask: np.ndarray) -> np.ndarray:
    """Dense block of ``op`` on the states selected by ``mask``."""
    idx = np.flatnonzero(mask)
    return op.matrix[idx][:, idx].toarray()


Monomial = tuple[tuple[int, ...], tuple[int, ...]]


class NormalOrderedPoly:
    """Sum of normal-ordered monomials ``c * b^+_{o1} ... b_{p1} ...``.

    Keys are ``(creators, annihilators)`` with each tuple sorted, so equal
    monomials accumulate.  The empty key is the constant term.
    """

    def __init__(self, terms: dict | None = None):
        self.terms: dict[Monomial, complex] = defaultdict(complex)
        if terms:
            for key, c in terms.items():
                self.terms[key] += c

    def add(self, coef, creators=(), annihilators=()) -> "NormalOrderedPoly":
        if coef != 0:
            self.terms[(tuple(sorted(creators)), tuple(sorted(annihilators)))] += coef
        return self

    def copy(self) -> "NormalOrderedPoly":
        return NormalOrderedPoly(self.terms)

    def __add__(self, other: "NormalOrderedPoly") -> "NormalOrderedPoly":
        out = self.copy()
        for key, c in other.terms.items():
            out.terms[key] += c
        return out

    def __sub__(self, other: "NormalOrderedPoly") -> "NormalOrderedPoly":
        return self + other * -1

    def __mul__(self, scalar) -> "NormalOrderedPoly":
        return NormalOrderedPoly({k: c * scalar for k, c in self.terms.items()})

    __rmul__ = __mul__

    def adjoint(self) -> "NormalOrderedPoly":
        return NormalOrderedPoly({(a, c): np.conj(v) for (c, a), v in self.terms.items()})

    @property
    def constant(self) -> complex:
        return self.terms.get(((), ()), 0j)

    def without_constant(self) -> "NormalOrderedPoly":
        return NormalOrderedPoly({k: c for k, c in self.terms.items() if k != ((), ())})

    def truncate(self, max_degree: int) -> "NormalOrderedPoly":
        return NormalOrderedPoly(
            {k: c for k, c in self.terms.items() if len(k[0]) + len(k[1]) <= max_degree}
        )

    def pruned(self, tol: float = 1e-14) -> dict:
        return {k: c for k, c in self.terms.items() if abs(c) > tol}

    def max_raise(self) -> int:
        """Largest net number of quanta any monomial adds."""
        return max((len(c) - len(a) for (c, a) in self.terms), default=0)

    def shift(self, orbital: int, value: complex) -> "NormalOrderedPoly":
        """Substitute ``b_o -> b_o + value`` (and the adjoint) symbolically.

        A c-number shift keeps normal order, so each occurrence expands
        binomially into monomials that are again normal ordered.
        """
        out = NormalOrderedPoly()
        for (cre, ann), coef in self.terms.items():
            nc, na = cre.count(orbital), ann.count(orbital)
            cre_rest = tuple(o for o in cre if o != orbital)
            ann_rest = tuple(o for o in ann if o != orbital)
            for i in range(nc + 1):
                ci = comb(nc, i) * np.conj(value) ** (nc - i)
                for j in range(na + 1):
                    cj = comb(na, j) * value ** (na - j)
                    out.add(coef * ci * cj, cre_rest + (orbital,) * i, ann_rest + (orbital,) * j)
        return out

    def residual_charge(self, orbitals) -> set[int]:
        """Set of net quanta changes of the listed orbitals over all terms."""
        orbitals = set(orbitals)
        return {
            sum(o in orbitals for o in c) - sum(o in orbitals for o in a)
            for (c, a), v in self.terms.items()
            if v != 0
        }

    def to_operator(self, basis: FockBasis, hermitian: bool = False, label: str = "") -> SparseOperator:
        rows, cols, vals = [], [], []
        for (cre, ann), coef in self.terms.items():
            if coef == 0:
                continue
            r, c, v = apply_monomial(basis, cre, ann)
            rows.append(r)
            cols.append(c)
            vals.append(coef * v)
        if rows:
            mat = sp.coo_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                shape=(basis.dim, basis.dim),
            ).tocsr()
            mat.sum_duplicates()
        else:
            mat = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
        return SparseOperator(mat, hermitian, label)


def apply_monomial(basis: FockBasis, creators, annihilators):
    """Matrix entries of one normal-ordered monomial, truncated to the basis.

    Returns ``(rows, cols, amplitudes)``.
    """
    occ = basis.occupations
    n_ann, n_cre = Counter(annihilators), Counter(creators)
    amp = np.ones(basis.dim)
    valid = basis.totals - len(annihilators) + len(creators) <= basis.n_max
    shift_key = 0
    for o in set(n_ann) | set(n_cre):
        n = occ[:, o].astype(float)
        r, c = n_ann[o], n_cre[o]
        valid &= n >= r
        for s in range(r):
            amp *= np.sqrt(np.clip(n - s, 0, None))
        rest = n - r
        for s in range(1, c + 1):
            amp *= np.sqrt(np.clip(rest + s, 0, None))
        shift_key += (c - r) * int(basis.key_weight(o))
    cols = np.flatnonzero(valid)
    if cols.size == 0:
        return cols, cols, np.zeros(0)
    target = basis.keys[cols] + np.uint64(shift_key % 2**64)
    rows = basis.lookup_keys(target)
    return rows, cols, amp[cols]


def annihilator(basis: FockBasis, species: int, mode: int) -> SparseOperator:
    o = basis.orbital(species, mode)
    return NormalOrderedPoly().add(1.0, (), (o,)).to_operator(basis, label=f"b{species}[{mode}]")


def creator(basis: FockBasis, species: int, mode: int) -> SparseOperator:
    return annihilator(basis, species, mode).dag()


def number_operator(basis: FockBasis, species: int) -> SparseOperator:
    n = basis.species_number(species).astype(complex)
    return SparseOperator(sp.diags(n, format="csr"), True, f"N{species}")


def condensate_shift(params: ModelParams) -> complex:
    """Zero-mode displacement ``v sqrt(V)`` of species 1 in the broken vacuum."""
    return params.v * np.sqrt(params.volume)


def field_poly(basis: FockBasis, params: ModelParams, species: int, x, shifted: bool = False,
               derivative: int | None = None) -> NormalOrderedPoly:
    """``psi_j(x) = V^{-1/2} sum_k e^{ikx} b_{j,k}`` (optionally ``d/dx_l``).

    With ``shifted`` the condensate ``v`` is added to species 1.
    """
    grid = basis.grid
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (grid.dim,):
        raise InputError(f"position must have {grid.dim} components")
    phases = np.exp(1j * grid.momenta @ x) / np.sqrt(grid.volume)
    if derivative is not None:
        phases = phases * 1j * grid.momenta[:, derivative]
    poly = NormalOrderedPoly()
    for k, c in enumerate(phases):
        poly.add(c, (), (basis.orbital(species, k),))
    if shifted and species == 1 and derivative is None:
        poly.add(params.v)
    return poly


def field_at_point(basis: FockBasis, params: ModelParams, species: int, x, shifted: bool = False) -> SparseOperator:
    return field_poly(basis, params, species, x, shifted).to_operator(basis, label=f"psi{species}(x)")


def mode_field(basis: FockBasis, params: ModelParams, species: int, mode: int, shifted: bool = False) -> SparseOperator:
    """Box-normalized momentum field ``psi_j(p)``; adds ``v sqrt(V)`` to the
    species-1 zero mode when ``shifted``."""
    poly = NormalOrderedPoly().add(1.0, (), (basis.orbital(species, mode),))
    if shifted and species == 1 and mode == basis.grid.zero:
        poly.add(condensate_shift(params))
    return poly.to_operator(basis, label=f"psi{species}[{mode}]")
