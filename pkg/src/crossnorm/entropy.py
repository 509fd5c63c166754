"""Reduced von Neumann entropy and the quantum relative entropy.

Everything is in nats.  The relative entropy returns infinity when the
first argument's support leaks outside the second's; full minimization
over separable states is out of scope, only candidate-based upper bounds
are provided.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .errors import InvalidInputError
from .states import DensityOperator
from .tolerances import SUPPORT_CUTOFF, WITNESS_RESIDUAL


@dataclass(frozen=True)
class EntropyReport:
    """Entropy of a reduced state plus the spectrum it came from."""

    value: float
    traced_factor: int
    spectrum: np.ndarray


def svn_entropy(sigma: DensityOperator, traced_factor: int = 1) -> EntropyReport:
    """Entropy of the state reduced by tracing out one factor.

    For pure states both choices of ``traced_factor`` agree (the Schmidt
    spectrum); for mixed states they generally differ, so the report
    records which side was used.
    """
    if len(sigma.dims) != 2:
        raise InvalidInputError("reduced entropy requires a bipartite state")
    if traced_factor not in (0, 1):
        raise InvalidInputError("traced_factor must be 0 or 1")
    keep = 1 - traced_factor
    reduced = linalg.partial_trace(sigma.matrix, sigma.dims, (keep,))
    spectrum = np.linalg.eigvalsh(reduced)
    support = spectrum > SUPPORT_CUTOFF
    value = float(-(spectrum[support] * np.log(spectrum[support])).sum())
    spectrum = spectrum[::-1].copy()
    spectrum.setflags(write=False)
    return EntropyReport(value=max(value, 0.0), traced_factor=traced_factor,
                         spectrum=spectrum)


def relative_entropy(sigma: DensityOperator, rho: DensityOperator) -> float:
    """Tr(sigma ln sigma - sigma ln rho) on the supports.

    Returns ``inf`` when the support of sigma is not contained in the
    support of rho; infinity is a value here, not an error.
    """
    if sigma.dims != rho.dims:
        raise InvalidInputError(
            f"states act on different dims: {sigma.dims} vs {rho.dims}")
    ws, vs = np.linalg.eigh(sigma.matrix)
    wr, vr = np.linalg.eigh(rho.matrix)
    sup_s = ws > SUPPORT_CUTOFF
    sup_r = wr > SUPPORT_CUTOFF

    # Support containment: sigma must place no weight on ker(rho).
    kernel = vr[:, ~sup_r]
    if kernel.shape[1]:
        leak = float(np.real(np.einsum(
            "ij,ik,kj->", kernel.conj(), sigma.matrix, kernel)))
        if leak > SUPPORT_CUTOFF:
            return float("inf")

    term_s = float((ws[sup_s] * np.log(ws[sup_s])).sum())
    # Tr(sigma ln rho) = sum_j ln(mu_j) <v_j| sigma |v_j> over supp(rho).
    overlaps = np.real(np.einsum(
        "ij,ik,kj->j", vr[:, sup_r].conj(), sigma.matrix, vr[:, sup_r]))
    term_r = float((np.log(wr[sup_r]) * overlaps).sum())
    value = term_s - term_r
    # Provably non-negative; clear rounding dust so equal states give 0.
    if -SUPPORT_CUTOFF < value < 0.0:
        return 0.0
    return value


def relative_entropy_upper(sigma: DensityOperator,
                           candidates: Sequence[DensityOperator]) -> float:
    """Certified upper bound on the separable-relative-entropy measure:
    the minimum over supplied separable candidates.

    Every candidate must carry a witness that re-verifies as a product
    decomposition; the result is only an upper bound, candidates say
    nothing about how close it is to the infimum.
    """
    if not candidates:
        raise InvalidInputError("need at least one separable candidate")
    best = float("inf")
    for cand in candidates:
        if cand.witness is None:
            raise InvalidInputError(
                "candidate carries no separability witness")
        cand.witness.verify(cand.matrix, tol=WITNESS_RESIDUAL)
        best = min(best, relative_entropy(sigma, cand))
    return best
