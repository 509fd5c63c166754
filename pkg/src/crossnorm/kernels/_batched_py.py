"""NumPy fallback for the batched nuclear-norm kernel."""

import numpy as np

BACKEND = "python"


def nuclear_norms(stack):
    """Nuclear norm of every matrix in a (n, r, c) complex stack."""
    stack = np.ascontiguousarray(stack, dtype=np.complex128)
    if stack.ndim != 3:
        raise ValueError("expected a stack of matrices with shape (n, r, c)")
    if stack.shape[0] == 0:
        return np.zeros(0)
    if stack.shape[1:] == (2, 2):
        # s1 + s2 = sqrt(|A|_F^2 + 2 |det A|): no factorization needed.
        frob2 = np.abs(stack).reshape(len(stack), -1).__pow__(2).sum(axis=1)
        det = stack[:, 0, 0] * stack[:, 1, 1] - stack[:, 0, 1] * stack[:, 1, 0]
        return np.sqrt(frob2 + 2.0 * np.abs(det))
    return np.linalg.svd(stack, compute_uv=False).sum(axis=-1)


def pair_cost(left_stack, right_stack):
    """Sum over terms of ||X_i||_1 * ||Y_i||_1 for two matched stacks."""
    nx = nuclear_norms(left_stack)
    ny = nuclear_norms(right_stack)
    if nx.shape != ny.shape:
        raise ValueError("stacks must contain the same number of terms")
    return float(nx @ ny)
