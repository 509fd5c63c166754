import numpy as np
import pytest

from crossnorm.errors import InvalidInputError, NumericalFailureError
from crossnorm.linalg import trace_norm
from crossnorm.states import make_state
from crossnorm.witness import (
    mix_decompositions,
    read_witness,
    tensor_decomposition,
    write_witness,
)


def bell_witness():
    e = np.eye(2, dtype=complex)
    proj = lambda u, v: np.outer(u, v.conj())
    terms = [(0.5 * proj(e[i], e[j]), proj(e[i], e[j]))
             for i in range(2) for j in range(2)]
    return tensor_decomposition(terms, (2, 2))


def product_witness():
    return tensor_decomposition([(np.eye(2, dtype=complex) / 2,
                                  np.eye(2, dtype=complex) / 2)], (2, 2))


def test_reconstruction_and_cost():
    w = bell_witness()
    bell = make_state("bell").to_density()
    assert w.residual(bell.matrix) < 1e-12
    assert w.cost == pytest.approx(2.0)


def test_cost_majorizes_trace_norm():
    sep = make_state("random-separable", dims=(2, 3), terms=4, seed=0)
    assert sep.witness.cost >= trace_norm(sep.matrix) - 1e-9


def test_verify_raises_on_wrong_target():
    w = product_witness()
    bell = make_state("bell").to_density()
    with pytest.raises(NumericalFailureError):
        w.verify(bell.matrix)


def test_term_shape_validation():
    with pytest.raises(InvalidInputError):
        tensor_decomposition([(np.eye(2), np.eye(3))], (2, 2))
    with pytest.raises(InvalidInputError):
        tensor_decomposition([(np.eye(2),)], (2, 2))


def test_mix_boundary_weights_return_inputs():
    d1, d2 = bell_witness(), product_witness()
    assert mix_decompositions(d1, d2, 1.0) is d1
    assert mix_decompositions(d1, d2, 0.0) is d2


def test_mix_two_product_witnesses():
    e = np.eye(2, dtype=complex)
    w1 = tensor_decomposition([(np.outer(e[0], e[0]), np.outer(e[0], e[0]))], (2, 2))
    w2 = tensor_decomposition([(np.outer(e[1], e[1]), np.outer(e[1], e[1]))], (2, 2))
    mixed = mix_decompositions(w1, w2, 0.5)
    assert len(mixed) == 2
    assert mixed.cost == pytest.approx(1.0)


def test_mix_cost_is_exactly_affine():
    d1, d2 = bell_witness(), product_witness()
    lam = 0.3
    mixed = mix_decompositions(d1, d2, lam)
    assert mixed.cost == lam * d1.cost + (1.0 - lam) * d2.cost
    assert mixed.cost == pytest.approx(1.3)


def test_mix_rejects_dim_mismatch():
    d1 = bell_witness()
    d3 = tensor_decomposition([(np.eye(3, dtype=complex) / 3,
                                np.eye(2, dtype=complex) / 2)], (3, 2))
    with pytest.raises(InvalidInputError):
        mix_decompositions(d1, d3, 0.5)


def test_mix_rejects_bad_weight():
    d1, d2 = bell_witness(), product_witness()
    with pytest.raises(InvalidInputError):
        mix_decompositions(d1, d2, 1.5)


def test_scaled_decomposition():
    w = bell_witness()
    half = w.scaled(0.5)
    assert half.cost == pytest.approx(1.0)
    bell = make_state("bell").to_density()
    assert np.abs(half.reconstruct() - 0.5 * bell.matrix).max() < 1e-12


def test_witness_file_roundtrip(tmp_path):
    w = bell_witness()
    path = tmp_path / "bell.witness.json"
    write_witness(w, path)
    back = read_witness(path)
    assert back.dims == w.dims
    assert back.cost == pytest.approx(w.cost, abs=1e-12)
    bell = make_state("bell").to_density()
    assert back.residual(bell.matrix) < 1e-12


def test_witness_file_reverifies_multipartite(tmp_path):
    sep = make_state("random-separable", dims=(2, 2, 2), terms=3, seed=1)
    path = tmp_path / "sep.witness.json"
    write_witness(sep.witness, path)
    back = read_witness(path)
    assert back.residual(sep.matrix) < 1e-10


def test_witness_file_rejects_understated_cost(tmp_path):
    import json

    w = product_witness()
    path = tmp_path / "w.json"
    write_witness(w, path)
    doc = json.loads(path.read_text())
    doc["cost"] = 0.1
    path.write_text(json.dumps(doc))
    with pytest.raises(InvalidInputError, match="cost"):
        read_witness(path)


def test_declared_cost_cannot_undercut():
    with pytest.raises(InvalidInputError):
        tensor_decomposition(
            [(np.eye(2, dtype=complex), np.eye(2, dtype=complex))],
            (2, 2), cost=0.5)
