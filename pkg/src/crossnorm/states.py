"""Pure states and density operators: constructors, generators, file I/O.

Random generators take a mandatory seed; there is no ambient randomness
anywhere in the package.  Generators that know a product decomposition of
their output attach it as a witness so downstream bounds can reuse it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .errors import InvalidInputError, InvalidStateError
from .tolerances import ATOL_UNIT_NORM, SUPPORT_CUTOFF
from .witness import TensorDecomposition, convex_combination, tensor_decomposition


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PureState:
    """Unit vector on a tensor product of finite-dimensional spaces."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def to_density(self) -> "DensityOperator":
        """Rank-one projector onto this state."""
        mat = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityOperator(self.dims, _freeze(mat))


@dataclass(frozen=True)
class DensityOperator:
    """Validated density operator with factor-dimension metadata.

    ``witness`` optionally records a known tensor decomposition of the
    operator (for example the generating mixture of a separable state).
    """

    dims: tuple[int, ...]
    matrix: np.ndarray
    witness: Optional[TensorDecomposition] = None

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def with_witness(self, witness: TensorDecomposition) -> "DensityOperator":
        return DensityOperator(self.dims, self.matrix, witness)


@dataclass(frozen=True)
class CoeffMatrix:
    """Coefficient matrix a with orthonormal vector families.

    Encodes the operator sum_ij a[i,j] |phi_i><phi_j| (x) |chi_i><chi_j|;
    rows of ``basis1``/``basis2`` are the vectors phi_i / chi_i.
    """

    a: np.ndarray
    basis1: np.ndarray
    basis2: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.complex128)
        b1 = np.asarray(self.basis1, dtype=np.complex128)
        b2 = np.asarray(self.basis2, dtype=np.complex128)
        r = a.shape[0]
        if a.shape != (r, r):
            raise InvalidInputError("coefficient matrix must be square")
        if b1.shape[0] != r or b2.shape[0] != r:
            raise InvalidInputError("need one basis vector per coefficient row")
        for name, b in (("basis1", b1), ("basis2", b2)):
            gram = b.conj() @ b.T
            if np.abs(gram - np.eye(r)).max() > ATOL_UNIT_NORM * 10:
                raise InvalidStateError(f"{name} is not orthonormal")
        object.__setattr__(self, "a", _freeze(a))
        object.__setattr__(self, "basis1", _freeze(b1))
        object.__setattr__(self, "basis2", _freeze(b2))

    @property
    def dims(self) -> tuple[int, int]:
        return (self.basis1.shape[1], self.basis2.shape[1])

    def to_density(self) -> DensityOperator:
        """Induced operator, carrying its defining expansion as witness."""
        r = self.a.shape[0]
        d1, d2 = self.dims
        vecs = np.stack([np.kron(self.basis1[i], self.basis2[i]) for i in range(r)])
        mat = vecs.T @ self.a @ vecs.conj()
        state = validate_density(mat, self.dims)
        terms = []
        for i in range(r):
            for j in range(r):
                if abs(self.a[i, j]) <= SUPPORT_CUTOFF:
                    continue
                left = self.a[i, j] * np.outer(self.basis1[i], self.basis1[j].conj())
                right = np.outer(self.basis2[i], self.basis2[j].conj())
                terms.append((left, right))
        return state.with_witness(tensor_decomposition(terms, self.dims))


def validate_density(matrix, dims: Sequence[int]) -> DensityOperator:
    """Check Hermiticity, positivity and normalization; returns the
    annotated operator.  Raises InvalidStateError naming the violated
    property otherwise."""
    mat, dims = linalg.check_density_matrix(matrix, dims)
    return DensityOperator(dims, _freeze(np.array(mat)))


def validate_pure(amplitudes, dims: Sequence[int]) -> PureState:
    """Check unit norm and dims; returns the annotated pure state."""
    amp = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    if not (np.all(np.isfinite(amp.real)) and np.all(np.isfinite(amp.imag))):
        raise InvalidInputError("amplitudes contain non-finite entries")
    dims = linalg.check_factor_dims(dims, amp.size)
    norm = float(np.linalg.norm(amp))
    if abs(norm - 1.0) > ATOL_UNIT_NORM:
        raise InvalidStateError(f"pure state norm {norm!r} differs from one")
    return PureState(dims, _freeze(np.array(amp)))


def random_density(dims: Sequence[int], seed, rank: int | None = None) -> DensityOperator:
    """Random density operator G G† / Tr(G G†) with Gaussian G."""
    dims = tuple(int(d) for d in dims)
    dim = int(np.prod(dims))
    rng = np.random.default_rng(seed)
    cols = dim if rank is None else int(rank)
    g = rng.standard_normal((dim, cols)) + 1j * rng.standard_normal((dim, cols))
    mat = g @ g.conj().T
    mat /= mat.trace().real
    return validate_density(mat, dims)


def random_unitary(dim: int, rng) -> np.ndarray:
    """Haar-ish unitary from the QR of a complex Gaussian matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    # Fix the QR phase ambiguity so the draw is determined by g alone.
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _bell(d: int) -> PureState:
    amp = np.zeros(d * d, dtype=np.complex128)
    for i in range(d):
        amp[i * d + i] = 1.0 / np.sqrt(d)
    return validate_pure(amp, (d, d))


def _ghz(factors: int, d: int) -> PureState:
    if factors < 2:
        raise InvalidInputError("need at least two factors")
    amp = np.zeros(d**factors, dtype=np.complex128)
    step = (d**factors - 1) // (d - 1) if d > 1 else 1
    for i in range(d):
        amp[i * step] = 1.0 / np.sqrt(d)
    return validate_pure(amp, (d,) * factors)


def _rho_eps(epsilon: float) -> DensityOperator:
    if not 0.0 <= epsilon <= 1.0:
        raise InvalidInputError(f"epsilon {epsilon} outside [0, 1]")
    # Two orthogonal blocks on a pair of 3-level systems: |00><00| with
    # weight 1-eps and the antisymmetric projector on {|12>, |21>} with
    # weight eps.  Composite index convention is i*3 + j.
    dim = 9
    mat = np.zeros((dim, dim), dtype=np.complex128)
    mat[0, 0] = 1.0 - epsilon
    anti = np.zeros(dim, dtype=np.complex128)
    anti[1 * 3 + 2] = 1.0 / np.sqrt(2.0)
    anti[2 * 3 + 1] = -1.0 / np.sqrt(2.0)
    mat += epsilon * np.outer(anti, anti.conj())
    state = validate_density(mat, (3, 3))

    # Generator-known decomposition: the product block plus the four-term
    # expansion of the antisymmetric projector; costs (1-eps) and 2*eps.
    e = np.eye(3, dtype=np.complex128)
    proj = lambda u, v: np.outer(u, v.conj())
    left_vecs = [e[1], e[2]]
    right_vecs = [e[2], -e[1]]
    terms = [((1.0 - epsilon) * proj(e[0], e[0]), proj(e[0], e[0]))]
    for i in range(2):
        for j in range(2):
            terms.append((
                epsilon * 0.5 * proj(left_vecs[i], left_vecs[j]),
                proj(right_vecs[i], right_vecs[j]),
            ))
    return state.with_witness(tensor_decomposition(terms, (3, 3)))


def _product(factors: Sequence) -> PureState | DensityOperator:
    if not factors or len(factors) < 2:
        raise InvalidInputError("product states need at least two factors")
    arrays = [np.asarray(f, dtype=np.complex128) for f in factors]
    if all(a.ndim == 1 for a in arrays):
        amp = arrays[0]
        for a in arrays[1:]:
            amp = np.kron(amp, a)
        return validate_pure(amp, tuple(a.size for a in arrays))
    if all(a.ndim == 2 for a in arrays):
        dims = tuple(a.shape[0] for a in arrays)
        parts = [linalg.check_density_matrix(a, (a.shape[0],))[0] for a in arrays]
        state = validate_density(linalg.kron_all(parts), dims)
        return state.with_witness(tensor_decomposition([parts], dims))
    raise InvalidInputError("factors must be all vectors or all matrices")


def _random_pure(dims: Sequence[int], rng) -> PureState:
    dim = int(np.prod(tuple(int(d) for d in dims)))
    amp = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    amp /= np.linalg.norm(amp)
    return validate_pure(amp, dims)


def _random_separable(dims: Sequence[int], terms: int, rng) -> DensityOperator:
    dims = tuple(int(d) for d in dims)
    if len(dims) < 2:
        raise InvalidInputError("separable states need at least two factors")
    if terms < 1:
        raise InvalidInputError("need at least one mixture term")
    weights = rng.uniform(0.2, 1.0, size=terms)
    weights /= weights.sum()
    decomp_terms = []
    total = np.zeros((int(np.prod(dims)),) * 2, dtype=np.complex128)
    for w in weights:
        parts = []
        for d in dims:
            g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            rho = g @ g.conj().T
            rho /= rho.trace().real
            parts.append(rho)
        decomp_terms.append((w * parts[0],) + tuple(parts[1:]))
        total += linalg.kron_all(decomp_terms[-1])
    state = validate_density(total, dims)
    return state.with_witness(tensor_decomposition(decomp_terms, dims))


def _mixture(states: Sequence[DensityOperator],
             weights: Sequence[float]) -> DensityOperator:
    if len(states) != len(weights) or not states:
        raise InvalidInputError("need matching, non-empty states and weights")
    weights = [float(w) for w in weights]
    if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-9:
        raise InvalidInputError("weights must be non-negative and sum to one")
    dims = states[0].dims
    if any(s.dims != dims for s in states):
        raise InvalidInputError("mixture components act on different dims")
    mat = sum(w * s.matrix for s, w in zip(states, weights))
    out = validate_density(mat, dims)
    if all(s.witness is not None for s in states):
        out = out.with_witness(
            convex_combination([s.witness for s in states], weights))
    return out


def make_state(kind: str, **params) -> PureState | DensityOperator:
    """Build one of the named states.

    Kinds: ``bell`` (d), ``ghz`` (factors, d), ``product`` (factors),
    ``rho-eps`` (epsilon), ``coeff`` (coeff), ``random-pure`` (dims, seed),
    ``random-separable`` (dims, terms, seed), ``werner-like`` (states,
    weights).  Random kinds require an explicit seed.
    """
    try:
        if kind == "bell":
            return _bell(int(params.pop("d", 2)))
        if kind == "ghz":
            return _ghz(int(params.pop("factors", 3)), int(params.pop("d", 2)))
        if kind == "product":
            return _product(params.pop("factors"))
        if kind == "rho-eps":
            return _rho_eps(float(params.pop("epsilon")))
        if kind == "coeff":
            coeff = params.pop("coeff")
            if not isinstance(coeff, CoeffMatrix):
                raise InvalidInputError("coeff kind expects a CoeffMatrix")
            return coeff.to_density()
        if kind == "random-pure":
            rng = np.random.default_rng(_require_seed(params))
            return _random_pure(params.pop("dims"), rng)
        if kind == "random-separable":
            rng = np.random.default_rng(_require_seed(params))
            return _random_separable(params.pop("dims"),
                                     int(params.pop("terms", 3)), rng)
        if kind == "werner-like":
            return _mixture(params.pop("states"), params.pop("weights"))
    except KeyError as exc:
        raise InvalidInputError(f"missing parameter {exc} for kind {kind!r}") from exc
    raise InvalidInputError(f"unknown state kind {kind!r}")


def _require_seed(params: dict):
    if "seed" not in params:
        raise InvalidInputError("random generators require an explicit seed")
    return params.pop("seed")


def embed_state(state: PureState | DensityOperator,
                new_dims: Sequence[int]) -> PureState | DensityOperator:
    """Zero-pad each tensor factor into a larger space.

    Trace, spectrum, and (downstream) both cross-norm bounds are
    unchanged; shrinking any factor is rejected.
    """
    new_dims = tuple(int(d) for d in new_dims)
    old_dims = state.dims
    if len(new_dims) != len(old_dims):
        raise InvalidInputError(
            f"embedding must keep the factor count ({len(old_dims)})")
    if any(n < o for n, o in zip(new_dims, old_dims)):
        raise InvalidInputError("embedding cannot shrink a factor")
    if new_dims == old_dims:
        return state
    pad = [(0, n - o) for n, o in zip(new_dims, old_dims)]
    if isinstance(state, PureState):
        amp = np.pad(state.amplitudes.reshape(old_dims), pad).reshape(-1)
        return PureState(new_dims, _freeze(amp))
    mat = np.pad(state.matrix.reshape(old_dims + old_dims), pad + pad)
    dim = int(np.prod(new_dims))
    out = DensityOperator(new_dims, _freeze(mat.reshape(dim, dim)))
    if state.witness is not None:
        terms = [
            tuple(np.pad(f, [p]) for f, p in zip(factors, pad))
            for factors in state.witness.terms
        ]
        out = out.with_witness(
            TensorDecomposition(new_dims, tuple(tuple(_freeze(f) for f in t)
                                                for t in terms),
                                state.witness.term_costs, state.witness.cost))
    return out


def write_state(state: PureState | DensityOperator, path) -> None:
    """Write a state as JSON: {"kind", "dims", "data"} with [re, im] pairs."""
    if isinstance(state, PureState):
        kind, flat = "pure", state.amplitudes
    else:
        kind, flat = "density", state.matrix.reshape(-1)
    doc = {
        "kind": kind,
        "dims": list(state.dims),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def read_state(path) -> PureState | DensityOperator:
    """Read a state file; validation failures propagate."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise InvalidInputError("state file must hold a JSON object")
    kind = doc.get("kind")
    dims = doc.get("dims")
    data = doc.get("data")
    if kind not in ("pure", "density") or dims is None or data is None:
        raise InvalidInputError("state file needs kind, dims and data fields")
    dims = tuple(int(d) for d in dims)
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"data entries are not numeric: {exc}") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidInputError("data must be a list of [re, im] pairs")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("state file contains non-finite entries")
    flat = arr[:, 0] + 1j * arr[:, 1]
    dim = int(np.prod(dims))
    if kind == "pure":
        if flat.size != dim:
            raise InvalidInputError(
                f"amplitude count {flat.size} does not match dims {dims}")
        return validate_pure(flat, dims)
    if flat.size != dim * dim:
        raise InvalidInputError(
            f"entry count {flat.size} does not match dims {dims}")
    return validate_density(flat.reshape(dim, dim), dims)
