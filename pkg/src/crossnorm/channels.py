"""Quantum operations: Kraus channels, effects, projective measurements.

Convention used throughout: a channel acts as T(sigma) = sum_k A_k† sigma A_k
with Kraus matrices of shape (dim_in, dim_out) subject to
sum_k A_k A_k† <= 1 on the input space.  This is the transpose of the
more common A sigma A† form; the two are related by relabeling
A_k <-> A_k†, and the built-in generators are written for this one.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .errors import (
    DegenerateBranchError,
    InternalError,
    InvalidChannelError,
    InvalidInputError,
)
from .states import DensityOperator, random_unitary, validate_density
from .tolerances import ATOL_HERMITIAN, SUPPORT_CUTOFF
from .witness import TensorDecomposition, tensor_decomposition

# Choi eigenvalues in [-CHOI_WARN, -ATOL_HERMITIAN) only warn: families
# that passed the Kraus checks are completely positive by construction,
# so mild negativity is rounding, deep negativity is corrupt input.
_CHOI_WARN = 1e-7


@dataclass(frozen=True)
class KrausChannel:
    """Operation in Kraus form; build through :func:`validate_channel`."""

    kraus_ops: tuple[np.ndarray, ...]
    dim_in: int
    dim_out: int
    trace_preserving: bool
    trace_nonincreasing: bool = True

    def __len__(self) -> int:
        return len(self.kraus_ops)


@dataclass(frozen=True)
class LudersOperation:
    """Complete family of mutually orthogonal projectors."""

    projectors: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def to_channel(self) -> KrausChannel:
        return validate_channel(self.projectors)


@dataclass(frozen=True)
class MeasurementOutcome:
    """Branches of a two-sided projective measurement."""

    labels: tuple[tuple[int, int], ...]
    probabilities: np.ndarray
    post_states: tuple[DensityOperator, ...]


def _stack_ops(ops: Sequence) -> np.ndarray:
    if not ops:
        raise InvalidInputError("a channel needs at least one Kraus operator")
    arrs = [linalg.as_matrix(a) for a in ops]
    shape = arrs[0].shape
    if any(a.shape != shape for a in arrs):
        raise InvalidInputError("Kraus operators must share one shape")
    return np.stack(arrs)


def validate_channel(ops: Sequence) -> KrausChannel:
    """Check the trace-non-increase condition and complete positivity.

    Raises InvalidChannelError when sum_k A_k A_k† exceeds the identity
    or the Choi matrix is substantially non-PSD.
    """
    stack = _stack_ops(ops)
    dim_in, dim_out = stack.shape[1], stack.shape[2]
    effect = np.einsum("kab,kcb->ac", stack, stack.conj())
    w = np.linalg.eigvalsh(effect)
    if w.max() > 1.0 + ATOL_HERMITIAN:
        raise InvalidChannelError(
            f"sum A_k A_k† exceeds the identity (max eigenvalue {w.max():.6f})")
    trace_preserving = bool(np.abs(w - 1.0).max() <= ATOL_HERMITIAN)

    # Choi matrix of the channel; PSD up to rounding for any Kraus family.
    vecs = stack.conj().reshape(len(stack), -1)
    choi = vecs.T @ vecs.conj()
    cmin = float(np.linalg.eigvalsh(choi).min())
    if cmin < -_CHOI_WARN:
        raise InvalidChannelError(
            f"Choi matrix strongly non-PSD (min eigenvalue {cmin:.3e})")
    if cmin < -ATOL_HERMITIAN:
        warnings.warn(
            f"Choi matrix slightly non-PSD (min eigenvalue {cmin:.3e})",
            RuntimeWarning, stacklevel=2)

    frozen = []
    for a in stack:
        a = np.array(a)
        a.setflags(write=False)
        frozen.append(a)
    return KrausChannel(tuple(frozen), dim_in, dim_out, trace_preserving)


def effect_of(channel: KrausChannel) -> np.ndarray:
    """The effect E = sum_k A_k A_k†; satisfies 0 <= E <= 1."""
    stack = np.stack(channel.kraus_ops)
    effect = np.einsum("kab,kcb->ac", stack, stack.conj())
    w = np.linalg.eigvalsh(effect)
    if w.min() < -ATOL_HERMITIAN or w.max() > 1.0 + ATOL_HERMITIAN:
        raise InternalError(f"effect spectrum [{w.min()}, {w.max()}] out of range")
    return effect


def apply_channel(channel: KrausChannel, sigma) -> np.ndarray:
    """T(sigma) = sum_k A_k† sigma A_k as a plain matrix."""
    is_density = isinstance(sigma, DensityOperator)
    mat = sigma.matrix if is_density else linalg.as_matrix(sigma)
    if mat.shape != (channel.dim_in, channel.dim_in):
        raise InvalidInputError(
            f"state dimension {mat.shape[0]} does not match channel input "
            f"dimension {channel.dim_in}")
    stack = np.stack(channel.kraus_ops)
    out = np.einsum("kia,ij,kjb->ab", stack.conj(), mat, stack)
    if is_density and out.trace().real > mat.trace().real + 1e-10:
        raise InternalError("trace increased under a validated channel")
    return out


def apply_local(t1: KrausChannel, t2: KrausChannel,
                sigma: DensityOperator):
    """Apply the product channel T1 (x) T2 (Kraus family {A_i (x) B_j}).

    Returns a validated density operator when both channels preserve the
    trace, otherwise the raw output matrix.
    """
    if len(sigma.dims) != 2:
        raise InvalidInputError("local application requires a bipartite state")
    d1, d2 = sigma.dims
    if t1.dim_in != d1 or t2.dim_in != d2:
        raise InvalidInputError(
            f"channel input dims ({t1.dim_in}, {t2.dim_in}) do not match "
            f"state dims {sigma.dims}")
    a = np.stack(t1.kraus_ops)
    b = np.stack(t2.kraus_ops)
    s4 = sigma.matrix.reshape(d1, d2, d1, d2)
    out4 = np.einsum("kia,lxc,ixjy,kjb,lyd->acbd",
                     a.conj(), b.conj(), s4, a, b, optimize=True)
    out = out4.reshape(t1.dim_out * t2.dim_out, t1.dim_out * t2.dim_out)
    if t1.trace_preserving and t2.trace_preserving:
        return validate_density(out, (t1.dim_out, t2.dim_out))
    return out


def pushforward_decomposition(t1: KrausChannel, t2: KrausChannel,
                              decomp: TensorDecomposition) -> TensorDecomposition:
    """Image decomposition {(T1(x_i), T2(y_i))} of a bipartite witness.

    Its cost never exceeds the input cost because trace-non-increasing
    operations are trace-norm contractive; this is the constructive form
    of monotonicity under local operations.
    """
    if len(decomp.dims) != 2:
        raise InvalidInputError("pushforward is defined for bipartite witnesses")
    if decomp.dims != (t1.dim_in, t2.dim_in):
        raise InvalidInputError(
            f"witness dims {decomp.dims} do not match channel inputs "
            f"({t1.dim_in}, {t2.dim_in})")
    terms = [(apply_channel(t1, x), apply_channel(t2, y))
             for x, y in decomp.terms]
    pushed = tensor_decomposition(terms, (t1.dim_out, t2.dim_out))
    if pushed.cost > decomp.cost + 1e-10:
        raise InternalError(
            f"pushforward cost {pushed.cost} exceeds input cost {decomp.cost}")
    return pushed


def validate_luders(projectors: Sequence) -> LudersOperation:
    """Check idempotence, mutual orthogonality and completeness."""
    projs = [linalg.as_matrix(p) for p in projectors]
    if not projs:
        raise InvalidInputError("need at least one projector")
    dim = projs[0].shape[0]
    for p in projs:
        if p.shape != (dim, dim):
            raise InvalidInputError("projectors must be square and same-dimensional")
        if np.abs(p - p.conj().T).max() > ATOL_HERMITIAN:
            raise InvalidInputError("projector is not Hermitian")
        if np.abs(p @ p - p).max() > ATOL_HERMITIAN:
            raise InvalidInputError("projector is not idempotent")
    for i in range(len(projs)):
        for j in range(i + 1, len(projs)):
            if np.abs(projs[i] @ projs[j]).max() > ATOL_HERMITIAN:
                raise InvalidInputError(f"projectors {i} and {j} are not orthogonal")
    if np.abs(sum(projs) - np.eye(dim)).max() > ATOL_HERMITIAN:
        raise InvalidInputError("projector family does not sum to the identity")
    frozen = []
    for p in projs:
        p = np.array(p)
        p.setflags(write=False)
        frozen.append(p)
    return LudersOperation(tuple(frozen))


def luders_outcomes(l1: LudersOperation, l2: LudersOperation,
                    sigma: DensityOperator) -> MeasurementOutcome:
    """All branches (P_i (x) Q_j) sigma (P_i (x) Q_j) with probabilities.

    Branches below the probability cutoff are omitted; the remaining
    probabilities sum to one within tolerance.
    """
    if len(sigma.dims) != 2:
        raise InvalidInputError("two projector families need a bipartite state")
    d1, d2 = sigma.dims
    if l1.dim != d1 or l2.dim != d2:
        raise InvalidInputError("projector dimensions do not match the state")
    labels = []
    probs = []
    states = []
    total = 0.0
    for i, p in enumerate(l1.projectors):
        for j, q in enumerate(l2.projectors):
            k = np.kron(p, q)
            branch = k @ sigma.matrix @ k
            prob = float(branch.trace().real)
            total += prob
            if prob < SUPPORT_CUTOFF:
                continue
            labels.append((i, j))
            probs.append(prob)
            states.append(validate_density(branch / prob, sigma.dims))
    if abs(total - 1.0) > ATOL_HERMITIAN:
        raise InternalError(f"branch probabilities sum to {total}, not 1")
    return MeasurementOutcome(tuple(labels), np.asarray(probs), tuple(states))


def post_select(channel: KrausChannel, sigma: DensityOperator) -> DensityOperator:
    """Normalize T(sigma) to unit trace.

    Post-selection is not one of the operations entanglement measures
    must be monotone under; the renormalization can increase every bound.
    """
    out = apply_channel(channel, sigma)
    prob = float(out.trace().real)
    if prob <= SUPPORT_CUTOFF:
        raise DegenerateBranchError(
            f"selected branch has probability {prob:.3e}")
    if channel.dim_out == sigma.dim:
        dims = sigma.dims
    else:
        dims = (channel.dim_out,)
    return validate_density(out / prob, dims)


# ---------------------------------------------------------------------------
# Generators.


def unitary_channel(u) -> KrausChannel:
    u = linalg.as_matrix(u)
    if np.abs(u @ u.conj().T - np.eye(u.shape[0])).max() > ATOL_HERMITIAN:
        raise InvalidInputError("matrix is not unitary")
    return validate_channel([u])


def depolarizing_channel(dim: int, p: float = 1.0) -> KrausChannel:
    """Mixes the state with the maximally mixed one: (1-p) sigma + p I/d."""
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"depolarizing weight {p} outside [0, 1]")
    ops = []
    if p < 1.0:
        ops.append(np.sqrt(1.0 - p) * np.eye(dim, dtype=np.complex128))
    eye = np.eye(dim, dtype=np.complex128)
    for i in range(dim):
        for j in range(dim):
            ops.append(np.sqrt(p / dim) * np.outer(eye[i], eye[j]))
    return validate_channel(ops)


def dephasing_channel(dim: int) -> KrausChannel:
    """Pinching onto the computational basis."""
    eye = np.eye(dim, dtype=np.complex128)
    return validate_channel([np.outer(eye[i], eye[i]) for i in range(dim)])


def random_channel(dim_in: int, dim_out: int, kraus_count: int, seed,
                   trace_preserving: bool = True) -> KrausChannel:
    """Random channel; non-trace-preserving draws scale the family down."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((kraus_count, dim_in, dim_out)) \
        + 1j * rng.standard_normal((kraus_count, dim_in, dim_out))
    s = np.einsum("kab,kcb->ac", g, g.conj())
    w, v = np.linalg.eigh(s)
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    ops = np.einsum("ab,kbc->kac", inv_sqrt, g)
    if not trace_preserving:
        ops = ops * np.sqrt(rng.uniform(0.3, 0.95))
    return validate_channel(list(ops))


def random_luders(dim: int, seed, blocks: int | None = None) -> LudersOperation:
    """Random complete projector family from a Haar-ish unitary."""
    rng = np.random.default_rng(seed)
    u = random_unitary(dim, rng)
    if blocks is None:
        blocks = int(rng.integers(2, dim + 1)) if dim > 1 else 1
    cuts = sorted(rng.choice(np.arange(1, dim), size=blocks - 1, replace=False)) \
        if blocks > 1 else []
    bounds = [0] + list(int(c) for c in cuts) + [dim]
    projs = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        cols = u[:, lo:hi]
        projs.append(cols @ cols.conj().T)
    return validate_luders(projs)


# ---------------------------------------------------------------------------
# File formats.


def _matrix_to_json(a: np.ndarray) -> list[list[float]]:
    flat = np.asarray(a, dtype=np.complex128).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def _matrix_from_json(data, rows: int, cols: int) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape != (rows * cols, 2):
        raise InvalidInputError(
            f"matrix entry list has shape {arr.shape}, expected ({rows * cols}, 2)")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("matrix entries must be finite")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(rows, cols)


def write_channel(channel: KrausChannel, path) -> None:
    doc = {
        "kraus": [_matrix_to_json(a) for a in channel.kraus_ops],
        "dims_in": channel.dim_in,
        "dims_out": channel.dim_out,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def read_channel(path) -> KrausChannel:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        din = int(doc["dims_in"])
        dout = int(doc["dims_out"])
        raw = doc["kraus"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed channel file: {exc}") from exc
    return validate_channel([_matrix_from_json(a, din, dout) for a in raw])


def write_luders(op: LudersOperation, path) -> None:
    doc = {"projectors": [_matrix_to_json(p) for p in op.projectors]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def read_luders(path) -> LudersOperation:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    raw = doc.get("projectors") if isinstance(doc, dict) else None
    if not raw:
        raise InvalidInputError("Lüders file needs a non-empty projectors list")
    dim = int(round(np.sqrt(len(raw[0]))))
    return validate_luders([_matrix_from_json(p, dim, dim) for p in raw])
