"""Acceptance suite: one test per release criterion.

Each test prints a single [PASS]/[FAIL] line (visible with `pytest -s`);
tolerances are pinned in the assertions, not configurable.
"""

import functools
import time

import numpy as np
import pytest

from crossnorm.channels import (
    pushforward_decomposition,
    random_channel,
    random_luders,
    luders_outcomes,
    validate_channel,
)
from crossnorm.decompose import schmidt_decompose
from crossnorm.entropy import relative_entropy, svn_entropy
from crossnorm.gamma import (
    MeasureSpec,
    OptimizerConfig,
    gamma_bracket,
    gamma_bracket_multi,
    gamma_coeff,
    gamma_lower,
    gamma_pure,
    gamma_upper,
    measure_value,
    mix_decompositions,
)
from crossnorm.states import (
    CoeffMatrix,
    embed_state,
    make_state,
    random_density,
    random_unitary,
    validate_density,
    validate_pure,
)
from crossnorm.verify import run_suite

NO_SEARCH = OptimizerConfig(restarts=0)


def criterion(num, description):
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            try:
                fn()
            except BaseException:
                print(f"[FAIL] criterion {num:02d}: {description}")
                raise
            print(f"[PASS] criterion {num:02d}: {description}")
        return run
    return wrap


@criterion(1, "pure-state bounds collapse onto the Schmidt formula "
              "(200 states, d in {2,3,4}, <60s)")
def test_criterion_01_pure_state_tightness():
    start = time.time()
    dims_cycle = [(a, b) for a in (2, 3, 4) for b in (2, 3, 4)]
    for k in range(200):
        dims = dims_cycle[k % len(dims_cycle)]
        psi = make_state("random-pure", dims=dims, seed=(1, k))
        exact = float(np.sqrt(schmidt_decompose(psi).coeffs).sum() ** 2)
        bracket = gamma_bracket(psi.to_density(), OptimizerConfig(seed=k))
        assert abs(bracket.lower - exact) <= 1e-8
        assert bracket.upper - bracket.lower <= 1e-4 * bracket.lower
    assert time.time() - start <= 60.0


@criterion(2, "coefficient-matrix states: exact value, lower and upper "
              "coincide (50 states, 1e-6)")
def test_criterion_02_coeff_consistency():
    for k in range(50):
        rng = np.random.default_rng((2, k))
        d1, d2 = ((2, 2), (3, 3), (2, 3))[k % 3]
        r = min(d1, d2)
        a = np.asarray(random_density((r,), seed=(2, k, 1)).matrix)
        coeff = CoeffMatrix(a=a, basis1=random_unitary(d1, rng).T[:r],
                            basis2=random_unitary(d2, rng).T[:r])
        exact = gamma_coeff(coeff)
        bracket = gamma_bracket(coeff.to_density(), OptimizerConfig(seed=k))
        assert abs(bracket.lower - exact) <= 1e-6
        assert abs(bracket.upper - exact) <= 1e-6
        assert abs(gamma_coeff(coeff) - exact) <= 1e-6


@criterion(3, "witnessed separable states bracket one "
              "(100 states on (2,2)/(3,3))")
def test_criterion_03_separable_direction():
    for k in range(100):
        dims = (2, 2) if k % 2 == 0 else (3, 3)
        sep = make_state("random-separable", dims=dims, terms=3, seed=(3, k))
        bracket = gamma_bracket(sep, OptimizerConfig(seed=k))
        assert bracket.lower >= 1.0 - 1e-9
        assert bracket.upper <= 1.0 + 1e-6
        assert bracket.lower - 1e-6 <= 1.0 <= bracket.upper + 1e-6


@criterion(4, "maximally entangled pair: bracket [2, 2], measures "
              "2 ln 2 and 1")
def test_criterion_04_bell_values():
    bracket = gamma_bracket(make_state("bell").to_density())
    assert abs(bracket.lower - 2.0) <= 1e-6
    assert abs(bracket.upper - 2.0) <= 1e-6
    e_gamma = measure_value(bracket.upper, MeasureSpec("egamma"))
    assert abs(e_gamma - 1.386294) <= 1e-6
    assert abs(e_gamma - 2.0 * np.log(2.0)) <= 1e-6
    f1 = measure_value(bracket.upper, MeasureSpec("f1"))
    assert abs(f1 - 1.0) <= 1e-6


@criterion(5, "cross-norm measure and reduced entropy split on the "
              "alpha^2 = 0.9 pure state")
def test_criterion_05_measure_entropy_gap():
    amp = np.zeros(4, dtype=complex)
    amp[0] = np.sqrt(0.9)
    amp[3] = np.sqrt(0.1)
    psi = validate_pure(amp, (2, 2))
    e_gamma = measure_value(gamma_pure(psi), MeasureSpec("egamma"))
    s_vn = svn_entropy(psi.to_density()).value
    assert abs(e_gamma - 1.6 * np.log(1.6)) <= 1e-9
    assert abs(e_gamma - 0.752006) <= 1e-6
    assert abs(s_vn - 0.325083) <= 1e-6
    assert abs(e_gamma - s_vn) > 0.4


@criterion(6, "two-qutrit epsilon family: relative-entropy bound, upper "
              "bound 1+eps, post-selected bracket [2, 2]")
def test_criterion_06_epsilon_family():
    eps = 0.01
    rho_eps = make_state("rho-eps", epsilon=eps)
    e = np.eye(3, dtype=complex)
    candidate = make_state(
        "werner-like",
        states=[
            make_state("product", factors=[np.outer(e[0], e[0]),
                                           np.outer(e[0], e[0])]),
            make_state("product", factors=[np.outer(e[1], e[1]),
                                           np.outer(e[2], e[2])]),
            make_state("product", factors=[np.outer(e[2], e[2]),
                                           np.outer(e[1], e[1])]),
        ],
        weights=[1.0 - eps, eps / 2, eps / 2],
    )
    assert abs(relative_entropy(rho_eps, candidate) - eps * np.log(2)) <= 1e-10

    upper = gamma_upper(rho_eps, lower_hint=gamma_lower(rho_eps))
    assert upper.cost <= 1.0 + eps + 1e-9

    keep = np.eye(9, dtype=complex)
    keep[0, 0] = 0.0
    from crossnorm.channels import post_select

    post = post_select(validate_channel([keep]), rho_eps)
    post_bracket = gamma_bracket(post)
    assert abs(post_bracket.lower - 2.0) <= 1e-6
    assert abs(post_bracket.upper - 2.0) <= 1e-6


@criterion(7, "pushing witnesses through local trace-non-increasing "
              "channels never raises the cost (100 cases)")
def test_criterion_07_pushforward_monotonicity():
    failures = 0
    for k in range(100):
        dims = ((2, 2), (2, 3), (3, 3))[k % 3]
        rho = random_density(dims, seed=(7, k))
        witness = gamma_upper(rho, NO_SEARCH).witness
        t1 = random_channel(dims[0], dims[0], 2, seed=(7, k, 1),
                            trace_preserving=bool(k % 2))
        t2 = random_channel(dims[1], dims[1], 2, seed=(7, k, 2),
                            trace_preserving=bool((k // 2) % 2))
        pushed = pushforward_decomposition(t1, t2, witness)
        if pushed.cost > witness.cost + 1e-10:
            failures += 1
    assert failures == 0


@criterion(8, "averaged branch lower bounds stay below the whole-state "
              "upper bound (100 projective pairs)")
def test_criterion_08_luders_average():
    failures = 0
    for k in range(100):
        dims = (2, 2) if k % 2 == 0 else (3, 3)
        sigma = random_density(dims, seed=(8, k))
        l1 = random_luders(dims[0], seed=(8, k, 1))
        l2 = random_luders(dims[1], seed=(8, k, 2))
        outcome = luders_outcomes(l1, l2, sigma)
        avg = sum(p * (gamma_lower(s) - 1.0)
                  for p, s in zip(outcome.probabilities, outcome.post_states))
        upper = gamma_upper(sigma, NO_SEARCH).cost
        if avg > upper - 1.0 + 1e-8:
            failures += 1
    assert failures == 0


@criterion(9, "local unitaries leave the lower bound (100 cases); "
              "embeddings leave both bounds (50 cases)")
def test_criterion_09_invariances():
    for k in range(100):
        dims = ((2, 2), (2, 3), (3, 3))[k % 3]
        rho = random_density(dims, seed=(9, k))
        rng = np.random.default_rng((9, k, 1))
        u = np.kron(random_unitary(dims[0], rng), random_unitary(dims[1], rng))
        rotated = validate_density(u @ rho.matrix @ u.conj().T, dims)
        assert abs(gamma_lower(rotated) - gamma_lower(rho)) <= 1e-9

    for k in range(50):
        kind = k % 3
        dims = ((2, 2), (2, 3), (3, 3))[k % 3]
        if kind == 0:
            state = make_state("random-pure", dims=dims, seed=(9, k, 2)).to_density()
        elif kind == 1:
            state = make_state("random-separable", dims=dims, terms=3,
                               seed=(9, k, 2))
        else:
            state = random_density(dims, seed=(9, k, 2))
        grown = embed_state(state, tuple(d + 1 for d in dims))
        b0 = gamma_bracket(state, NO_SEARCH)
        b1 = gamma_bracket(grown, NO_SEARCH)
        assert abs(b0.lower - b1.lower) <= 1e-10
        assert abs(b0.upper - b1.upper) <= 1e-10


@criterion(10, "upper bounds are convex under mixing (100 mixtures)")
def test_criterion_10_mixing_convexity():
    for k in range(100):
        dims = (2, 2) if k % 2 == 0 else (3, 3)
        sigma = random_density(dims, seed=(10, k, 1))
        tau = random_density(dims, seed=(10, k, 2))
        lam = float(np.random.default_rng((10, k)).uniform())
        us = gamma_upper(sigma, NO_SEARCH)
        ut = gamma_upper(tau, NO_SEARCH)
        mixture = validate_density(
            lam * sigma.matrix + (1.0 - lam) * tau.matrix, dims)
        mixed = mix_decompositions(us.witness, ut.witness, lam)
        um = gamma_upper(mixture, NO_SEARCH, extra_witnesses=[mixed])
        assert um.cost <= lam * us.cost + (1.0 - lam) * ut.cost + 1e-10


@criterion(11, "three-factor bounds: GHZ bracket, product states at one, "
               "50 separable states")
def test_criterion_11_multipartite():
    ghz = make_state("ghz").to_density()
    b = gamma_bracket_multi(ghz)
    assert 2.0 - 1e-6 <= b.lower
    assert b.upper <= 2.0 + 1e-4

    for k in range(10):
        rng = np.random.default_rng((11, k))

        def dm(d):
            g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            m = g @ g.conj().T
            return m / m.trace().real

        state = make_state("product", factors=[dm(2), dm(2), dm(2)])
        bp = gamma_bracket_multi(state)
        assert abs(bp.lower - 1.0) <= 1e-9
        assert abs(bp.upper - 1.0) <= 1e-9

    for k in range(50):
        sep = make_state("random-separable", dims=(2, 2, 2), terms=3,
                         seed=(11, k, 1))
        bs = gamma_bracket_multi(sep)
        assert bs.upper <= 1.0 + 1e-6
        assert bs.lower <= 1.0 + 1e-9


@criterion(12, "full verification suite, 100 trials per property, "
               "zero failures in under 120s")
def test_criterion_12_full_suite():
    start = time.time()
    reports = run_suite(trials=100, seed=0)
    elapsed = time.time() - start
    for r in reports:
        assert r.failures == 0, (
            f"{r.property_id}: {r.failures} failures, "
            f"worst margin {r.worst_margin}, subseeds {r.failure_subseeds[:3]}")
    assert elapsed < 120.0, f"suite took {elapsed:.1f}s"
