"""Explicit tensor decompositions used as upper-bound certificates.

A decomposition is a finite list of factor-operator tuples whose Kronecker
sum reconstructs a target operator.  Its cost (sum over terms of the
product of factor trace norms) certifies an upper bound on the greatest
cross norm of the target; a decomposition that fails the reconstruction
residual check is not a valid certificate and is rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .errors import InvalidInputError, NumericalFailureError
from .tolerances import WITNESS_RESIDUAL


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TensorDecomposition:
    """Finite decomposition of an operator into elementary tensors.

    ``terms[i]`` holds one square matrix per tensor factor;
    ``term_costs[i]`` is the product of their trace norms and ``cost``
    their sum.  ``cost`` is stored rather than recomputed so convex
    combinations can keep exact affine cost arithmetic.
    """

    dims: tuple[int, ...]
    terms: tuple[tuple[np.ndarray, ...], ...]
    term_costs: tuple[float, ...] = field(repr=False)
    cost: float

    def __len__(self) -> int:
        return len(self.terms)

    def reconstruct(self) -> np.ndarray:
        total = np.zeros((int(np.prod(self.dims)),) * 2, dtype=np.complex128)
        for factors in self.terms:
            total += linalg.kron_all(factors)
        return total

    def residual(self, target) -> float:
        """Hilbert-Schmidt distance between the reconstruction and target."""
        return linalg.hs_norm(self.reconstruct() - np.asarray(target))

    def verify(self, target, tol: float = WITNESS_RESIDUAL) -> float:
        """Assert the decomposition certifies ``target``; returns the residual."""
        res = self.residual(target)
        if not res <= tol:
            raise NumericalFailureError(
                f"decomposition does not reconstruct its target "
                f"(residual {res:.3e} > {tol:.0e})")
        return res

    def scaled(self, weight: float) -> "TensorDecomposition":
        """Scale the decomposition by a non-negative weight.

        The weight multiplies the first factor of every term, so the
        reconstruction and the cost both scale exactly by ``weight``.
        """
        if weight < 0:
            raise InvalidInputError("weight must be non-negative")
        terms = tuple((weight * f[0],) + tuple(f[1:]) for f in self.terms)
        return TensorDecomposition(
            dims=self.dims,
            terms=terms,
            term_costs=tuple(weight * c for c in self.term_costs),
            cost=weight * self.cost,
        )


def tensor_decomposition(terms: Sequence[Sequence[np.ndarray]],
                         dims: Sequence[int],
                         cost: float | None = None) -> TensorDecomposition:
    """Build a decomposition, computing per-term costs from trace norms.

    ``cost`` overrides the summed cost when exact affine arithmetic is
    required (convex mixing); it may only exceed the computed sum by
    rounding, never undercut it.
    """
    dims = tuple(int(d) for d in dims)
    if not terms:
        raise InvalidInputError("a decomposition needs at least one term")
    frozen_terms = []
    term_costs = []
    for factors in terms:
        factors = tuple(_freeze(f) for f in factors)
        if len(factors) != len(dims):
            raise InvalidInputError(
                f"term has {len(factors)} factors, expected {len(dims)}")
        for f, d in zip(factors, dims):
            if f.shape != (d, d):
                raise InvalidInputError(
                    f"factor shape {f.shape} does not match dim {d}")
        c = 1.0
        for f in factors:
            c *= linalg.trace_norm(f)
        frozen_terms.append(factors)
        term_costs.append(c)
    summed = float(sum(term_costs))
    if cost is None:
        cost = summed
    elif cost < summed - 1e-9 * max(1.0, summed):
        raise InvalidInputError(
            f"declared cost {cost} undercuts the computed cost {summed}")
    return TensorDecomposition(
        dims=dims,
        terms=tuple(frozen_terms),
        term_costs=tuple(term_costs),
        cost=float(cost),
    )


def convex_combination(decomps: Sequence[TensorDecomposition],
                       weights: Sequence[float]) -> TensorDecomposition:
    """Concatenate weighted decompositions; cost is exactly sum(w_i * cost_i)."""
    if len(decomps) != len(weights) or not decomps:
        raise InvalidInputError("need matching, non-empty decompositions and weights")
    dims = decomps[0].dims
    if any(d.dims != dims for d in decomps):
        raise InvalidInputError("decompositions act on different factor dims")
    if any(w < 0 for w in weights):
        raise InvalidInputError("weights must be non-negative")
    terms: list[tuple[np.ndarray, ...]] = []
    term_costs: list[float] = []
    for d, w in zip(decomps, weights):
        if w == 0.0:
            continue
        scaled = d.scaled(float(w))
        terms.extend(scaled.terms)
        term_costs.extend(scaled.term_costs)
    cost = float(sum(w * d.cost for d, w in zip(decomps, weights)))
    return TensorDecomposition(dims=dims, terms=tuple(terms),
                               term_costs=tuple(term_costs), cost=cost)


def mix_decompositions(d1: TensorDecomposition, d2: TensorDecomposition,
                       lam: float) -> TensorDecomposition:
    """Witness for the convex mixture lam*target1 + (1-lam)*target2.

    The boundary weights return the corresponding input unchanged, cost
    included; otherwise the cost is exactly lam*d1.cost + (1-lam)*d2.cost.
    """
    if not 0.0 <= lam <= 1.0:
        raise InvalidInputError(f"mixing weight {lam} outside [0, 1]")
    if d1.dims != d2.dims:
        raise InvalidInputError(
            f"decomposition dims differ: {d1.dims} vs {d2.dims}")
    if lam == 1.0:
        return d1
    if lam == 0.0:
        return d2
    return convex_combination([d1, d2], [lam, 1.0 - lam])


def _matrix_to_json(a: np.ndarray) -> list[list[float]]:
    flat = np.asarray(a, dtype=np.complex128).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def _matrix_from_json(data, dim: int) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] != dim * dim:
        raise InvalidInputError(
            f"matrix entry list has shape {arr.shape}, expected ({dim * dim}, 2)")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("matrix entries must be finite")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(dim, dim)


def write_witness(decomp: TensorDecomposition, path) -> None:
    """Serialize a decomposition so third parties can re-verify the bound."""
    doc = {
        "dims": list(decomp.dims),
        "terms": [
            {"factors": [_matrix_to_json(f) for f in factors]}
            for factors in decomp.terms
        ],
        "cost": decomp.cost,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def read_witness(path) -> TensorDecomposition:
    """Load a decomposition written by :func:`write_witness`."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        dims = [int(d) for d in doc["dims"]]
        raw_terms = doc["terms"]
        cost = float(doc["cost"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed witness file: {exc}") from exc
    terms = []
    for entry in raw_terms:
        factors = entry.get("factors") if isinstance(entry, dict) else None
        if factors is None or len(factors) != len(dims):
            raise InvalidInputError("witness term does not match dims")
        terms.append([_matrix_from_json(f, d) for f, d in zip(factors, dims)])
    # The stored cost is advisory; costs are recomputed from the factors so
    # a tampered file cannot understate the bound.
    decomp = tensor_decomposition(terms, dims)
    if decomp.cost > cost + 1e-6 * max(1.0, decomp.cost):
        raise InvalidInputError(
            f"witness file declares cost {cost} but factors cost {decomp.cost}")
    return decomp
