"""Dense complex-matrix kernel: factorizations, norms, tensor algebra.

All functions are pure; inputs are never modified.  Matrices are NumPy
arrays of complex128, factor dimensions are tuples of positive ints whose
product must match the matrix dimension.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError, InvalidStateError, NumericalFailureError
from .tolerances import (
    ATOL_HERMITIAN,
    ATOL_PSD,
    SUPPORT_CUTOFF,
)


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite complex128 2-D array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise InvalidInputError(f"expected a matrix, got ndim={a.ndim}")
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise InvalidInputError("matrix contains non-finite entries")
    return a


def check_factor_dims(dims: Sequence[int], size: int) -> tuple[int, ...]:
    """Validate factor dimensions against a total matrix dimension."""
    dims = tuple(int(d) for d in dims)
    if len(dims) == 0 or any(d < 1 for d in dims):
        raise InvalidInputError(f"factor dims must be positive, got {dims}")
    if int(np.prod(dims)) != size:
        raise InvalidInputError(
            f"factor dims {dims} do not multiply to the matrix dimension {size}")
    return dims


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Singular value decomposition m = u @ diag(s) @ vh (reduced form).

    Returns (s, u, vh) with s sorted descending and exactly len(s)
    columns in u / rows in vh.
    """
    a = as_matrix(m)
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"SVD did not converge: {exc}") from exc
    return s, u, vh


def singular_values(m) -> np.ndarray:
    """Singular values only, descending."""
    a = as_matrix(m)
    try:
        return np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"SVD did not converge: {exc}") from exc


def is_hermitian(m, atol: float = ATOL_HERMITIAN) -> bool:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    return float(np.abs(a - a.conj().T).max(initial=0.0)) <= atol * scale


def eigh_hermitian(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, eigenvector columns v) with
    m = v @ diag(w) @ v†.  Rejects non-Hermitian input.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError("eigh requires a square matrix")
    if not is_hermitian(a):
        raise InvalidInputError("matrix is not Hermitian within tolerance")
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigh did not converge: {exc}") from exc
    return w, v


def trace_norm(m) -> float:
    """Trace norm (nuclear norm): sum of singular values."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError("trace norm is defined for square matrices")
    return float(singular_values(a).sum())


def hs_norm(m) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.linalg.norm(np.asarray(m, dtype=np.complex128)))


def kron(a, b) -> np.ndarray:
    """Kronecker product of two matrices."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(factors: Iterable[np.ndarray]) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left to right."""
    factors = list(factors)
    if not factors:
        raise InvalidInputError("need at least one factor")
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = np.kron(out, as_matrix(f))
    return out


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out all tensor factors not listed in ``keep``.

    Parameters
    ----------
    m : matrix on the full product space, composite index i1*d2*...*dn + ...
    dims : factor dimensions (d1, ..., dn)
    keep : indices of the factors to retain, in their original order

    Returns the reduced matrix; with ``keep`` empty this is the 1x1 matrix
    holding the ordinary trace.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError("partial trace requires a square matrix")
    dims = check_factor_dims(dims, a.shape[0])
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise InvalidInputError(f"keep indices {keep} out of range for {n} factors")
    t = a.reshape(dims + dims)
    # Contract ket/bra axes of each traced factor, back to front so the
    # remaining axis numbers stay valid.
    traced = [k for k in range(n) if k not in keep]
    remaining = n
    for k in reversed(traced):
        t = np.trace(t, axis1=k, axis2=k + remaining)
        remaining -= 1
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return np.asarray(t).reshape(d_keep, d_keep)


def permute_factors(m, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors of an operator; ``order[i]`` names the old
    factor placed at slot i."""
    a = as_matrix(m)
    dims = check_factor_dims(dims, a.shape[0])
    n = len(dims)
    order = tuple(int(i) for i in order)
    if sorted(order) != list(range(n)):
        raise InvalidInputError(f"order {order} is not a permutation of {n} factors")
    t = a.reshape(dims + dims)
    axes = order + tuple(i + n for i in order)
    new_dim = a.shape[0]
    return np.ascontiguousarray(t.transpose(axes)).reshape(new_dim, new_dim)


def matrix_log(m) -> np.ndarray:
    """Spectral logarithm of a PSD Hermitian matrix on its support.

    Eigenvalues below the support cutoff are excluded (callers rely on the
    0*ln(0) = 0 convention); eigenvalues below -ATOL_PSD are rejected.
    """
    w, v = eigh_hermitian(m)
    if w.min(initial=0.0) < -ATOL_PSD:
        raise InvalidInputError(
            f"matrix_log requires PSD input; min eigenvalue {w.min():.3e}")
    support = w > SUPPORT_CUTOFF
    vs = v[:, support]
    return (vs * np.log(w[support])) @ vs.conj().T


def check_density_matrix(m, dims: Sequence[int]) -> tuple[np.ndarray, tuple[int, ...]]:
    """Validate (Hermitian, PSD, trace one) and return the possibly
    clamped matrix together with normalized dims.

    Eigenvalues in [-ATOL_PSD, 0) are clamped to zero; the state is then
    renormalized only when clamping moved the trace by less than
    ATOL_PSD, and rejected otherwise.  Matrices that already pass are
    returned unmodified so valid inputs stay bit-identical.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise InvalidStateError("not a density operator: matrix is not square")
    dims = check_factor_dims(dims, a.shape[0])
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    if float(np.abs(a - a.conj().T).max(initial=0.0)) > ATOL_HERMITIAN * scale:
        raise InvalidStateError("not a density operator: matrix is not Hermitian")
    w = np.linalg.eigvalsh(a)
    if w.min() < -ATOL_PSD:
        raise InvalidStateError(
            f"not a density operator: negative eigenvalue {w.min():.3e}")
    tr = float(a.trace().real)
    if abs(tr - 1.0) > ATOL_HERMITIAN:
        raise InvalidStateError(
            f"not a density operator: trace {tr!r} differs from one")
    if w.min() < 0.0:
        drift = float(-w[w < 0.0].sum())
        if drift >= ATOL_PSD:
            raise InvalidStateError(
                f"not a density operator: clamping negatives would move the "
                f"trace by {drift:.3e}")
        w_clamped, v = np.linalg.eigh(a)
        w_clamped = np.maximum(w_clamped, 0.0)
        a = (v * w_clamped) @ v.conj().T
        a = a / float(a.trace().real)
    return a, dims
