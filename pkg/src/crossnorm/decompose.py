"""Schmidt decomposition, matrix realignment, and operator Schmidt form.

The realignment of a bipartite operator is the index permutation sending
entry <i (x) k| rho |j (x) l> to row (i, j), column (k, l); its singular
values drive both the lower bound on the greatest cross norm and the
starting point of the upper-bound search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import InvalidInputError
from .states import DensityOperator, PureState
from .tolerances import SUPPORT_CUTOFF


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Diagonal bi-orthonormal form of a bipartite pure state.

    ``coeffs`` are the Schmidt coefficients p_i (descending, summing to
    one); rows of ``left_basis``/``right_basis`` are the paired
    orthonormal vectors, so psi = sum_i sqrt(p_i) a_i (x) b_i.
    """

    coeffs: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray

    def reconstruct(self) -> np.ndarray:
        amps = np.einsum("i,ia,ib->ab", np.sqrt(self.coeffs),
                         self.left_basis, self.right_basis)
        return amps.reshape(-1)


@dataclass(frozen=True)
class RealignedMatrix:
    """Realigned arrangement of a bipartite operator's entries."""

    matrix: np.ndarray
    source_dims: tuple[int, int]

    def nuclear_norm(self) -> float:
        return float(linalg.singular_values(self.matrix).sum())

    def to_operator(self) -> np.ndarray:
        """Invert the realignment; exact (a pure index permutation)."""
        d1, d2 = self.source_dims
        t = self.matrix.reshape(d1, d1, d2, d2).transpose(0, 2, 1, 3)
        return np.ascontiguousarray(t).reshape(d1 * d2, d1 * d2)


@dataclass(frozen=True)
class OperatorSchmidt:
    """Expansion rho = sum_k s_k E_k (x) F_k with HS-orthonormal factors."""

    values: np.ndarray
    left_ops: np.ndarray
    right_ops: np.ndarray

    def reconstruct(self) -> np.ndarray:
        total = 0
        for s, e, f in zip(self.values, self.left_ops, self.right_ops):
            total = total + s * np.kron(e, f)
        return total


def _bipartite_dims(dims) -> tuple[int, int]:
    if len(dims) != 2:
        raise InvalidInputError(
            f"operation requires exactly two tensor factors, got {len(dims)}")
    return int(dims[0]), int(dims[1])


def schmidt_decompose(psi: PureState) -> SchmidtDecomposition:
    """Schmidt decomposition of a bipartite pure state.

    Coefficients are the squared singular values of the amplitude matrix.
    """
    d1, d2 = _bipartite_dims(psi.dims)
    amp = psi.amplitudes.reshape(d1, d2)
    s, u, vh = linalg.svd(amp)
    coeffs = s**2
    # np.linalg.svd sorts descending already; normalize away rounding.
    return SchmidtDecomposition(
        coeffs=_freeze(coeffs / coeffs.sum()),
        left_basis=_freeze(np.ascontiguousarray(u.T)),
        right_basis=_freeze(np.ascontiguousarray(vh)),
    )


def realign_matrix(mat: np.ndarray, d1: int, d2: int) -> np.ndarray:
    """Realign an arbitrary operator on a (d1, d2) product space."""
    mat = linalg.as_matrix(mat)
    if mat.shape != (d1 * d2, d1 * d2):
        raise InvalidInputError(
            f"matrix shape {mat.shape} does not match dims ({d1}, {d2})")
    t = mat.reshape(d1, d2, d1, d2).transpose(0, 2, 1, 3)
    return np.ascontiguousarray(t).reshape(d1 * d1, d2 * d2)


def realign(rho: DensityOperator) -> RealignedMatrix:
    """Realignment of a bipartite density operator."""
    d1, d2 = _bipartite_dims(rho.dims)
    return RealignedMatrix(
        matrix=_freeze(realign_matrix(rho.matrix, d1, d2)),
        source_dims=(d1, d2),
    )


def _canonical_phases(vecs: np.ndarray) -> np.ndarray:
    """Phase factors making each row's largest-magnitude entry real positive."""
    lead = vecs[np.arange(vecs.shape[0]), np.abs(vecs).argmax(axis=1)]
    mag = np.abs(lead)
    safe = np.where(mag > 0, mag, 1.0)
    return np.where(mag > 0, lead.conj() / safe, 1.0)


def operator_schmidt_matrix(mat: np.ndarray, d1: int, d2: int) -> OperatorSchmidt:
    """Operator Schmidt form of an arbitrary operator on (d1, d2).

    Terms with singular value below the support cutoff are dropped; the
    factor pairs are phase-fixed so the expansion is deterministic up to
    exact singular-value degeneracies.
    """
    r = realign_matrix(mat, d1, d2)
    s, u, vh = linalg.svd(r)
    keep = s > SUPPORT_CUTOFF
    s = s[keep]
    left = np.ascontiguousarray(u.T[keep]).reshape(-1, d1, d1)
    right = np.ascontiguousarray(vh[keep]).reshape(-1, d2, d2)
    n = s.size
    phases = _canonical_phases(left.reshape(n, -1))
    left = left * phases[:, None, None]
    right = right * phases.conj()[:, None, None]
    return OperatorSchmidt(_freeze(s), _freeze(left), _freeze(right))


def operator_schmidt(rho: DensityOperator) -> OperatorSchmidt:
    """Operator Schmidt decomposition of a bipartite density operator."""
    d1, d2 = _bipartite_dims(rho.dims)
    return operator_schmidt_matrix(rho.matrix, d1, d2)
