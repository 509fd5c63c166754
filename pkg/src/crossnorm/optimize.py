"""Seeded derivative-free search for cheap tensor decompositions.

The search keeps the reconstruction constraint exact by construction:
terms are linear recombinations x_j = sum_k A[j,k] sqrt(s_k) E_k,
y_j = sum_k B[j,k] sqrt(s_k) F_k of an operator Schmidt expansion, with
A^T B = I so that sum_j x_j (x) y_j always equals the target.  Only the
cost sum_j ||x_j||_1 ||y_j||_1 is optimized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels

# Proposals shrinking the step below this floor cannot change the cost
# above rounding noise, so a restart stops there.
_SCALE_FLOOR = 1e-9


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for the decomposition search (all defaults spec-level)."""

    seed: int = 0
    restarts: int = 16
    max_iter: int = 500
    tol: float = 1e-8
    perturbation: float = 0.1


@dataclass
class SearchResult:
    left_terms: np.ndarray   # (m, d1, d1)
    right_terms: np.ndarray  # (m, d2, d2)
    cost: float
    iterations: int
    restarts: int


def _assemble(coeffs: np.ndarray, ops: np.ndarray) -> np.ndarray:
    return np.einsum("jk,kab->jab", coeffs, ops)


def _dual_coeffs(a: np.ndarray) -> np.ndarray:
    """B with A^T B = I, via B = conj(A (A^dagger A)^{-1})."""
    gram = a.conj().T @ a
    return np.linalg.solve(gram, a.conj().T).T


def _evaluate(a: np.ndarray, scaled_left: np.ndarray,
              scaled_right: np.ndarray) -> tuple[float, np.ndarray]:
    b = _dual_coeffs(a)
    x = _assemble(a, scaled_left)
    y = _assemble(b, scaled_right)
    return kernels.pair_cost(x, y), b


def search_decomposition(values: np.ndarray, left_ops: np.ndarray,
                         right_ops: np.ndarray,
                         cfg: OptimizerConfig) -> SearchResult:
    """Minimize the decomposition cost over recombinations of an operator
    Schmidt expansion; returns the best terms found.

    Deterministic for fixed inputs and config: restart r draws from
    default_rng((seed, r)).
    """
    r = values.size
    sqrt_s = np.sqrt(values)
    scaled_left = sqrt_s[:, None, None] * left_ops
    scaled_right = sqrt_s[:, None, None] * right_ops
    eye = np.eye(r, dtype=np.complex128)

    best_a = eye
    best_b = eye
    best_cost, _ = _evaluate(eye, scaled_left, scaled_right)
    total_iters = 0

    scale_floor = max(_SCALE_FLOOR, cfg.tol * 0.1)
    for restart in range(cfg.restarts):
        rng = np.random.default_rng((cfg.seed, restart))
        if restart == 0:
            a = eye.copy()
        else:
            noise = rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))
            a = eye + 0.3 * noise
        try:
            cost, b = _evaluate(a, scaled_left, scaled_right)
        except np.linalg.LinAlgError:
            continue
        scale = cfg.perturbation
        for _ in range(cfg.max_iter):
            total_iters += 1
            delta = rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))
            candidate = a + scale * delta
            try:
                cand_cost, cand_b = _evaluate(candidate, scaled_left,
                                              scaled_right)
            except np.linalg.LinAlgError:
                cand_cost = np.inf
                cand_b = None
            if cand_cost < cost:
                a, b, cost = candidate, cand_b, cand_cost
            else:
                scale *= 0.5
                if scale < scale_floor:
                    break
        if cost < best_cost:
            best_cost, best_a, best_b = cost, a, b

    return SearchResult(
        left_terms=_assemble(best_a, scaled_left),
        right_terms=_assemble(best_b, scaled_right),
        cost=float(best_cost),
        iterations=total_iters,
        restarts=cfg.restarts,
    )
