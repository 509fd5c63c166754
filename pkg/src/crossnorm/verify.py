"""Seeded property suites for the measure axioms and exact-value checks.

Each property is a deterministic function of (master seed, property index,
trial index); a report records the failure count, the worst margin seen
(margin > 0 means violation), and the sub-seed of every failing trial so
single cases can be replayed.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .channels import (
    apply_local,
    luders_outcomes,
    pushforward_decomposition,
    random_channel,
    random_luders,
)
from .entropy import svn_entropy
from .errors import InvalidInputError
from .gamma import (
    MeasureSpec,
    OptimizerConfig,
    gamma_bracket,
    gamma_coeff,
    gamma_lower,
    gamma_pure,
    gamma_upper,
    measure_value,
    mix_decompositions,
)
from .states import (
    CoeffMatrix,
    DensityOperator,
    embed_state,
    make_state,
    random_density,
    random_unitary,
    validate_density,
    validate_pure,
)
from .tolerances import VERDICT_MARGIN

_MEASURES = (MeasureSpec("egamma"), MeasureSpec("f1"), MeasureSpec("f2"),
             MeasureSpec("f3", a=1.0))

# Suite default: few restarts and short descents keep 100-trial runs fast;
# every inequality tested holds for any certified upper bound.
_SUITE_CONFIG = OptimizerConfig(restarts=2, max_iter=80)

_BIPARTITE_DIMS = ((2, 2), (2, 3), (3, 3))


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of one property over a batch of seeded trials."""

    property_id: str
    trials: int
    failures: int
    worst_margin: float
    seed: int
    failure_subseeds: tuple[tuple[int, int, int], ...]

    def to_dict(self) -> dict:
        return {
            "property": self.property_id,
            "trials": self.trials,
            "failures": self.failures,
            "worst_margin": self.worst_margin,
            "seed": self.seed,
            "failure_subseeds": [list(s) for s in self.failure_subseeds],
        }


def _seed_int(rng) -> int:
    return int(rng.integers(2**62))


def _trial_cfg(rng, cfg: OptimizerConfig) -> OptimizerConfig:
    return dataclasses.replace(cfg, seed=_seed_int(rng))


def _pick_dims(rng) -> tuple[int, int]:
    return _BIPARTITE_DIMS[int(rng.integers(len(_BIPARTITE_DIMS)))]


def _random_state(rng, kind: int) -> DensityOperator:
    dims = _pick_dims(rng)
    if kind == 0:
        return make_state("random-pure", dims=dims, seed=_seed_int(rng)).to_density()
    if kind == 1:
        return make_state("random-separable", dims=dims, terms=3,
                          seed=_seed_int(rng))
    return random_density(dims, _seed_int(rng))


def _check_e0(rng, cfg) -> float:
    """Zero-padding the factors must move neither bound.

    The upper bound is compared without the stochastic refinement: the
    deterministic certificates are functions of the operator alone,
    whereas a search trajectory may branch on rounding noise (changing
    only tightness, never validity).
    """
    state = _random_state(rng, int(rng.integers(3)))
    grown = embed_state(state, tuple(d + 1 for d in state.dims))
    cfg = dataclasses.replace(_trial_cfg(rng, cfg), restarts=0)
    b0 = gamma_bracket(state, cfg)
    b1 = gamma_bracket(grown, cfg)
    drift = max(abs(b0.lower - b1.lower), abs(b0.upper - b1.upper))
    return drift - 1e-10


def _check_e1(rng, cfg) -> float:
    """Witnessed separable states: every measure in the family is zero."""
    state = make_state("random-separable", dims=_pick_dims(rng), terms=3,
                       seed=_seed_int(rng))
    upper = gamma_upper(state, _trial_cfg(rng, cfg), lower_hint=1.0).cost
    worst = -np.inf
    for spec in _MEASURES:
        bound = measure_value(1.0 + VERDICT_MARGIN, spec)
        worst = max(worst, measure_value(max(upper, 1.0), spec) - bound)
    return float(worst)


def _check_e2(rng, cfg) -> float:
    """Local unitary conjugation leaves the lower bound in place."""
    del cfg
    state = _random_state(rng, int(rng.integers(2)))
    u1 = random_unitary(state.dims[0], rng)
    u2 = random_unitary(state.dims[1], rng)
    u = np.kron(u1, u2)
    rotated = validate_density(u @ state.matrix @ u.conj().T, state.dims)
    return abs(gamma_lower(rotated) - gamma_lower(state)) - 1e-9


def _check_e3(rng, cfg) -> float:
    """Pushing a witness through local operations cannot raise its cost."""
    state = _random_state(rng, int(rng.integers(3)))
    quick = dataclasses.replace(_trial_cfg(rng, cfg), restarts=0)
    witness = gamma_upper(state, quick).witness
    t1 = random_channel(state.dims[0], state.dims[0], 2, _seed_int(rng),
                        trace_preserving=bool(rng.integers(2)))
    t2 = random_channel(state.dims[1], state.dims[1], 2, _seed_int(rng),
                        trace_preserving=bool(rng.integers(2)))
    pushed = pushforward_decomposition(t1, t2, witness)
    image = apply_local(t1, t2, state)
    image_mat = image.matrix if isinstance(image, DensityOperator) else image
    cost_margin = pushed.cost - witness.cost - 1e-10
    residual_margin = pushed.residual(image_mat) - 1e-8
    return max(cost_margin, residual_margin)


def _check_e4(rng, cfg) -> float:
    """Upper bounds are convex under mixing, witnessed constructively."""
    dims = _pick_dims(rng)
    sigma = random_density(dims, _seed_int(rng))
    tau = random_density(dims, _seed_int(rng))
    lam = float(rng.uniform())
    cfg = _trial_cfg(rng, cfg)
    us = gamma_upper(sigma, cfg)
    ut = gamma_upper(tau, cfg)
    mixture = validate_density(
        lam * sigma.matrix + (1.0 - lam) * tau.matrix, dims)
    mixed_witness = mix_decompositions(us.witness, ut.witness, lam)
    um = gamma_upper(mixture, cfg, extra_witnesses=[mixed_witness])
    return um.cost - (lam * us.cost + (1.0 - lam) * ut.cost) - 1e-10


def _check_prop8(rng, cfg) -> float:
    """Averaged lower bounds over projective branches stay below the
    whole state's upper bound (both sides shifted by one)."""
    dims = (2, 2) if rng.integers(2) else (3, 3)
    sigma = random_density(dims, _seed_int(rng))
    l1 = random_luders(dims[0], _seed_int(rng))
    l2 = random_luders(dims[1], _seed_int(rng))
    outcome = luders_outcomes(l1, l2, sigma)
    avg = sum(p * (gamma_lower(s) - 1.0)
              for p, s in zip(outcome.probabilities, outcome.post_states))
    upper = gamma_upper(sigma, _trial_cfg(rng, cfg)).cost
    return float(avg - (upper - 1.0) - 1e-8)


def _check_thm6(rng, cfg) -> float:
    """Witnessed separable states bracket one and get the right verdict."""
    state = make_state("random-separable", dims=_pick_dims(rng), terms=3,
                       seed=_seed_int(rng))
    bracket = gamma_bracket(state, _trial_cfg(rng, cfg))
    margins = (
        bracket.lower - (1.0 + 1e-9),
        (1.0 - 1e-9) - bracket.lower,
        bracket.upper - (1.0 + VERDICT_MARGIN),
        -1.0 if bracket.verdict == "separable-consistent" else 1.0,
    )
    return float(max(margins))


def _check_prop4(rng, cfg) -> float:
    """For pure states both bounds collapse onto the exact value."""
    psi = make_state("random-pure", dims=_pick_dims(rng), seed=_seed_int(rng))
    exact = gamma_pure(psi)
    bracket = gamma_bracket(psi.to_density(), _trial_cfg(rng, cfg))
    return float(max(abs(bracket.lower - exact) - 1e-8,
                     (bracket.upper - bracket.lower) - 1e-4 * bracket.lower))


def _check_cor5(rng, cfg) -> float:
    """Coefficient-matrix states: exact value, lower and upper coincide."""
    d1, d2 = _pick_dims(rng)
    r = min(d1, d2)
    a = np.asarray(random_density((r,), _seed_int(rng)).matrix)
    coeff = CoeffMatrix(a=a,
                        basis1=random_unitary(d1, rng).T[:r],
                        basis2=random_unitary(d2, rng).T[:r])
    exact = gamma_coeff(coeff)
    bracket = gamma_bracket(coeff.to_density(), _trial_cfg(rng, cfg))
    return float(max(abs(bracket.lower - exact), abs(bracket.upper - exact)) - 1e-6)


def _check_prop17(rng, cfg) -> float:
    """The cross-norm measure separates from the reduced entropy on the
    two-level pure family."""
    del cfg
    p = float(rng.uniform(0.5, 0.95))
    amp = np.zeros(4, dtype=np.complex128)
    amp[0] = np.sqrt(p)
    amp[3] = np.sqrt(1.0 - p)
    psi = validate_pure(amp, (2, 2))
    e_gamma = measure_value(gamma_pure(psi), MeasureSpec("egamma"))
    s_vn = svn_entropy(psi.to_density()).value
    return 1e-6 - (e_gamma - s_vn)


_PROPERTIES = {
    "E0": _check_e0,
    "E1": _check_e1,
    "E2": _check_e2,
    "E3-pushforward": _check_e3,
    "E4": _check_e4,
    "Prop8": _check_prop8,
    "Thm6-separable": _check_thm6,
    "Prop4-tightness": _check_prop4,
    "Cor5-consistency": _check_cor5,
    "Prop17-gap": _check_prop17,
}

PROPERTY_IDS = tuple(_PROPERTIES)


def run_suite(ids=None, trials: int = 100, seed: int = 0,
              cfg: OptimizerConfig | None = None) -> list[PropertyReport]:
    """Run the requested property suites; deterministic in all arguments."""
    if trials < 1:
        raise InvalidInputError("need at least one trial")
    ids = list(PROPERTY_IDS) if ids is None else list(ids)
    for prop in ids:
        if prop not in _PROPERTIES:
            raise InvalidInputError(f"unknown property id {prop!r}")
    cfg = cfg or _SUITE_CONFIG
    reports = []
    order = {p: i for i, p in enumerate(PROPERTY_IDS)}
    for prop in ids:
        check = _PROPERTIES[prop]
        failures = 0
        worst = -np.inf
        failed: list[tuple[int, int, int]] = []
        for trial in range(trials):
            subseed = (seed, order[prop], trial)
            margin = float(check(np.random.default_rng(subseed), cfg))
            worst = max(worst, margin)
            if margin > 0.0:
                failures += 1
                failed.append(subseed)
        reports.append(PropertyReport(
            property_id=prop, trials=trials, failures=failures,
            worst_margin=float(worst), seed=seed,
            failure_subseeds=tuple(failed)))
    return reports
