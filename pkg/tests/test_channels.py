import numpy as np
import pytest

from crossnorm.channels import (
    apply_channel,
    apply_local,
    dephasing_channel,
    depolarizing_channel,
    effect_of,
    luders_outcomes,
    post_select,
    pushforward_decomposition,
    random_channel,
    random_luders,
    read_channel,
    read_luders,
    unitary_channel,
    validate_channel,
    validate_luders,
    write_channel,
    write_luders,
)
from crossnorm.errors import (
    DegenerateBranchError,
    InvalidChannelError,
    InvalidInputError,
)
from crossnorm.gamma import OptimizerConfig, gamma_bracket, gamma_lower, gamma_upper
from crossnorm.states import DensityOperator, make_state, random_density, random_unitary

QUICK = OptimizerConfig(restarts=0)


def test_unitary_channel_is_trace_preserving():
    rng = np.random.default_rng(0)
    c = unitary_channel(random_unitary(3, rng))
    assert c.trace_preserving


def test_projector_pair_channel():
    p = np.diag([1.0, 0.0]).astype(complex)
    c = validate_channel([p, np.eye(2) - p])
    assert c.trace_preserving


def test_validate_channel_rejects_oversized_effect():
    with pytest.raises(InvalidChannelError):
        validate_channel([np.sqrt(1.5) * np.eye(2)])


def test_effect_of_complete_luders_is_identity():
    l = validate_luders([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    assert np.abs(effect_of(l.to_channel()) - np.eye(2)).max() < 1e-12


def test_effect_of_single_projector():
    p = np.diag([1.0, 0.0]).astype(complex)
    c = validate_channel([p])
    assert np.abs(effect_of(c) - p).max() < 1e-12
    assert not c.trace_preserving


def test_effect_spectrum_in_range():
    c = random_channel(3, 3, 4, seed=1, trace_preserving=False)
    w = np.linalg.eigvalsh(effect_of(c))
    assert w.min() >= -1e-9
    assert w.max() <= 1.0 + 1e-9


def test_effect_independent_of_kraus_mixing():
    # Rotating the Kraus family by an isometry in the index space leaves
    # the effect unchanged.
    c = random_channel(2, 2, 3, seed=2)
    rng = np.random.default_rng(3)
    v = random_unitary(3, rng)
    mixed = [sum(v[j, k] * c.kraus_ops[k] for k in range(3)) for j in range(3)]
    c2 = validate_channel(mixed)
    assert np.abs(effect_of(c2) - effect_of(c)).max() < 1e-10


def test_apply_unitary_preserves_spectrum():
    rng = np.random.default_rng(4)
    rho = random_density((2, 2), seed=5)
    c = unitary_channel(random_unitary(4, rng))
    out = apply_channel(c, rho)
    w0 = np.sort(np.linalg.eigvalsh(rho.matrix))
    w1 = np.sort(np.linalg.eigvalsh(out))
    assert np.abs(w0 - w1).max() < 1e-10


def test_complete_luders_preserves_trace():
    rho = random_density((3,), seed=6)
    l = random_luders(3, seed=7)
    out = apply_channel(l.to_channel(), rho)
    assert abs(out.trace().real - 1.0) < 1e-12


def test_fully_depolarizing_sends_to_maximally_mixed():
    rho = random_density((3,), seed=8)
    out = apply_channel(depolarizing_channel(3), rho)
    # Direct-summation oracle over the Kraus family |i><j|/sqrt(d).
    eye = np.eye(3, dtype=complex)
    expected = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            a = np.outer(eye[i], eye[j]) / np.sqrt(3)
            expected += a.conj().T @ rho.matrix @ a
    assert np.abs(out - expected).max() < 1e-12
    assert np.abs(out - np.eye(3) / 3).max() < 1e-10


def test_dephasing_kills_coherences():
    rho = random_density((2,), seed=9)
    out = apply_channel(dephasing_channel(2), rho)
    assert abs(out[0, 1]) < 1e-12
    assert out[0, 0] == pytest.approx(rho.matrix[0, 0].real)


def test_apply_local_identities():
    rho = random_density((2, 3), seed=10)
    ident = lambda d: unitary_channel(np.eye(d))
    out = apply_local(ident(2), ident(3), rho)
    assert isinstance(out, DensityOperator)
    assert np.abs(out.matrix - rho.matrix).max() < 1e-12


def test_depolarize_one_side_of_bell():
    bell = make_state("bell").to_density()
    out = apply_local(depolarizing_channel(2), unitary_channel(np.eye(2)), bell)
    assert np.abs(out.matrix - np.eye(4) / 4).max() < 1e-10
    b = gamma_bracket(out, QUICK)
    assert b.lower == pytest.approx(1.0, abs=1e-9)
    assert b.upper == pytest.approx(1.0, abs=1e-6)


def test_local_unitaries_preserve_lower_bound():
    rng = np.random.default_rng(11)
    rho = random_density((2, 2), seed=12)
    out = apply_local(unitary_channel(random_unitary(2, rng)),
                      unitary_channel(random_unitary(2, rng)), rho)
    assert abs(gamma_lower(out) - gamma_lower(rho)) < 1e-9


def test_pushforward_identity_channels():
    sep = make_state("random-separable", dims=(2, 2), terms=2, seed=13)
    ident = unitary_channel(np.eye(2))
    pushed = pushforward_decomposition(ident, ident, sep.witness)
    assert pushed.cost == pytest.approx(sep.witness.cost, abs=1e-12)


def test_pushforward_depolarized_bell_witness():
    bell = make_state("bell").to_density()
    witness = gamma_upper(bell, QUICK).witness
    assert witness.cost == pytest.approx(2.0, abs=1e-9)
    pushed = pushforward_decomposition(
        depolarizing_channel(2), unitary_channel(np.eye(2)), witness)
    assert pushed.cost <= 1.0 + 1e-9
    assert pushed.residual(np.eye(4) / 4) < 1e-10


def test_pushforward_cost_never_increases():
    for seed in range(6):
        rho = random_density((2, 3), seed=100 + seed)
        witness = gamma_upper(rho, QUICK).witness
        t1 = random_channel(2, 2, 2, seed=200 + seed, trace_preserving=False)
        t2 = random_channel(3, 3, 3, seed=300 + seed, trace_preserving=False)
        pushed = pushforward_decomposition(t1, t2, witness)
        assert pushed.cost <= witness.cost + 1e-10


def test_pushforward_rejects_dim_mismatch():
    sep = make_state("random-separable", dims=(2, 2), terms=2, seed=14)
    with pytest.raises(InvalidInputError):
        pushforward_decomposition(unitary_channel(np.eye(3)),
                                  unitary_channel(np.eye(2)), sep.witness)


def test_luders_outcomes_on_bell():
    bell = make_state("bell").to_density()
    basis = validate_luders([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    outcome = luders_outcomes(basis, basis, bell)
    assert outcome.labels == ((0, 0), (1, 1))
    assert np.abs(outcome.probabilities - 0.5).max() < 1e-12
    e00 = np.zeros((4, 4)); e00[0, 0] = 1.0
    e11 = np.zeros((4, 4)); e11[3, 3] = 1.0
    assert np.abs(outcome.post_states[0].matrix - e00).max() < 1e-12
    assert np.abs(outcome.post_states[1].matrix - e11).max() < 1e-12
    # Averaged lower bounds sit below the whole-state value.
    avg = sum(p * (gamma_lower(s) - 1.0)
              for p, s in zip(outcome.probabilities, outcome.post_states))
    assert avg <= (2.0 - 1.0) + 1e-9


def test_luders_trivial_families():
    rho = random_density((2, 2), seed=15)
    triv2 = validate_luders([np.eye(2)])
    outcome = luders_outcomes(triv2, triv2, rho)
    assert outcome.labels == ((0, 0),)
    assert outcome.probabilities[0] == pytest.approx(1.0)
    assert np.abs(outcome.post_states[0].matrix - rho.matrix).max() < 1e-12


def test_luders_branches_reconstruct():
    rho = random_density((3, 3), seed=16)
    l1 = random_luders(3, seed=17)
    l2 = random_luders(3, seed=18)
    outcome = luders_outcomes(l1, l2, rho)
    assert abs(outcome.probabilities.sum() - 1.0) < 1e-9
    for (i, j), p, s in zip(outcome.labels, outcome.probabilities,
                            outcome.post_states):
        k = np.kron(l1.projectors[i], l2.projectors[j])
        branch = k @ rho.matrix @ k
        assert np.abs(p * s.matrix - branch).max() < 1e-10


def test_luders_requires_complete_families():
    with pytest.raises(InvalidInputError, match="identity"):
        validate_luders([np.diag([1.0, 0.0])])


def test_luders_rejects_non_orthogonal():
    p = np.array([[0.5, 0.5], [0.5, 0.5]])
    with pytest.raises(InvalidInputError, match="orthogonal"):
        validate_luders([p, np.diag([1.0, 0.0])])


def test_post_select_rho_eps_gives_antisymmetric_state():
    rho = make_state("rho-eps", epsilon=0.01)
    keep = np.eye(9, dtype=complex)
    keep[0, 0] = 0.0
    out = post_select(validate_channel([keep]), rho)
    anti = np.zeros(9, dtype=complex)
    anti[5] = 1 / np.sqrt(2)
    anti[7] = -1 / np.sqrt(2)
    assert np.abs(out.matrix - np.outer(anti, anti.conj())).max() < 1e-10


def test_post_select_trace_preserving_channel_is_identity():
    rho = random_density((2, 2), seed=19)
    l = random_luders(4, seed=20)
    out = post_select(l.to_channel(), rho)
    pinched = apply_channel(l.to_channel(), rho)
    assert np.abs(out.matrix - pinched).max() < 1e-12


def test_post_select_zero_branch_fails():
    rho = make_state("product",
                     factors=[np.diag([1.0, 0.0]), np.diag([1.0, 0.0])])
    sel = np.zeros((4, 4), dtype=complex)
    sel[3, 3] = 1.0
    with pytest.raises(DegenerateBranchError):
        post_select(validate_channel([sel]), rho)


def test_channel_file_roundtrip(tmp_path):
    c = random_channel(2, 3, 2, seed=21, trace_preserving=False)
    path = tmp_path / "chan.json"
    write_channel(c, path)
    back = read_channel(path)
    assert back.dim_in == 2 and back.dim_out == 3
    for a, b in zip(c.kraus_ops, back.kraus_ops):
        assert np.abs(a - b).max() < 1e-15


def test_luders_file_roundtrip(tmp_path):
    l = random_luders(3, seed=22)
    path = tmp_path / "luders.json"
    write_luders(l, path)
    back = read_luders(path)
    for p, q in zip(l.projectors, back.projectors):
        assert np.abs(p - q).max() < 1e-15
