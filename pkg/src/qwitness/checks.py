"""Randomized verification suites behind the ``check`` subcommand.

Each suite sweeps seeded random scenarios and reports the worst margin seen,
where a margin is (allowed value) - (observed value): non-negative margins
everywhere mean the suite passes. All randomness is derived from one master
seed through order-independent per-case seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .optimize import (
    case_seeds,
    haar_state,
    random_basis_partition,
    random_kraus_channel,
    random_scenario,
)
from .witness import (
    Channel,
    DensityMatrix,
    MeasurementSet,
    WitnessScenario,
    blind_measure,
    linear_entropy,
    simulated_witness,
    theoretical_bound,
    trace_distance,
    witness_value,
)

TOL = 1e-12
DEFAULT_COUNTS = {
    "bound": 1000,
    "contractivity": 200,
    "convexity": 200,
    "idempotence": 200,
    "entropy": 100,
}
SUITE_NAMES = tuple(DEFAULT_COUNTS)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    count: int
    worst_margin: float
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "pass": self.passed,
            "count": self.count,
            "worst_margin": self.worst_margin,
            "detail": self.detail,
        }


def _dims_cycle(rng: np.random.Generator, dims=(2, 3, 4, 5, 6, 7, 8)) -> tuple[int, int]:
    n = int(rng.choice(dims))
    m = int(rng.integers(2, n + 1))
    return n, m


def bound_suite(count: int, seed: int) -> SuiteResult:
    """W never exceeds 1 - 1/M (+1e-12) over random scenarios."""
    worst = math.inf
    for case_seed in case_seeds(seed, count):
        rng = np.random.default_rng(case_seed)
        n, m = _dims_cycle(rng)
        scenario = random_scenario(n, m, int(case_seed) + 1)
        margin = theoretical_bound(m) + TOL - simulated_witness(scenario)
        worst = min(worst, margin)
    return SuiteResult(
        name="bound",
        passed=worst >= 0.0,
        count=count,
        worst_margin=worst,
        detail="margin = 1 - 1/M + 1e-12 - W",
    )


def contractivity_suite(
    count: int, seed: int, distance_scale: float = 1.0
) -> SuiteResult:
    """W <= D(Phi rho, Phi sigma) <= D(rho, sigma) + 1e-12.

    Half the cases keep the scenario's Haar unitary channel, half replace it
    with a random operator-sum channel. ``distance_scale`` multiplies the
    computed time-t distance and exists purely so the self-test of this
    suite can inject a deliberate bug; leave it at 1.0 for real checks.
    """
    worst = math.inf
    seeds = case_seeds(seed, 2 * count)
    for k in range(count):
        rng = np.random.default_rng(seeds[2 * k])
        n, m = _dims_cycle(rng)
        scenario = random_scenario(n, m, int(seeds[2 * k]) + 1)
        if k % 2 == 1:
            scenario = WitnessScenario(
                initial=scenario.initial,
                blind=scenario.blind,
                channel=random_kraus_channel(n, int(seeds[2 * k + 1])),
                final_projector=scenario.final_projector,
            )
        sigma = blind_measure(scenario.initial, scenario.blind)
        d0 = trace_distance(scenario.initial, sigma)
        dt = distance_scale * trace_distance(
            scenario.channel.apply(scenario.initial.matrix),
            scenario.channel.apply(sigma.matrix),
        )
        w = simulated_witness(scenario)
        worst = min(worst, dt - w, d0 + TOL - dt)
    return SuiteResult(
        name="contractivity",
        passed=worst >= 0.0,
        count=count,
        worst_margin=worst,
        detail="margin = min(D_t - W, D_0 + 1e-12 - D_t)",
    )


def convexity_suite(count: int, seed: int) -> SuiteResult:
    """D(sum p_k rho_k, sum p_k sigma_k) <= sum p_k D(rho_k, sigma_k) + 1e-12."""
    worst = math.inf
    for case_seed in case_seeds(seed, count):
        rng = np.random.default_rng(case_seed)
        n, m = _dims_cycle(rng, dims=(2, 3, 4, 5, 6))
        terms = int(rng.integers(2, 5))
        weights = rng.dirichlet(np.ones(terms))
        blind = MeasurementSet.from_basis_partition(
            n, random_basis_partition(n, m, rng)
        )
        mix = np.zeros((n, n), dtype=complex)
        mixed_sigma = np.zeros((n, n), dtype=complex)
        rhs = 0.0
        for p in weights:
            psi = haar_state(n, rng)
            pure = np.outer(psi, psi.conj())
            sig = blind.dephase(pure)
            mix += p * pure
            mixed_sigma += p * sig
            rhs += p * trace_distance(pure, sig)
        lhs = trace_distance(mix, mixed_sigma)
        worst = min(worst, rhs + TOL - lhs)
    return SuiteResult(
        name="convexity",
        passed=worst >= 0.0,
        count=count,
        worst_margin=worst,
        detail="margin = sum_k p_k D_k + 1e-12 - D(mixture)",
    )


def idempotence_suite(count: int, seed: int) -> SuiteResult:
    """Blind measurement is idempotent, trace preserving, and positive."""
    worst = math.inf
    for case_seed in case_seeds(seed, count):
        rng = np.random.default_rng(case_seed)
        n, m = _dims_cycle(rng)
        scenario = random_scenario(n, m, int(case_seed) + 3)
        sigma = blind_measure(scenario.initial, scenario.blind)
        twice = blind_measure(sigma, scenario.blind)
        dev = float(np.abs(twice.matrix - sigma.matrix).max())
        trace_dev = abs(float(np.trace(sigma.matrix).real) - 1.0)
        min_eig = float(np.linalg.eigvalsh(sigma.matrix)[0])
        worst = min(worst, TOL - dev, TOL - trace_dev, min_eig + 1e-10)
    return SuiteResult(
        name="idempotence",
        passed=worst >= 0.0,
        count=count,
        worst_margin=worst,
        detail="margin over idempotence, trace preservation, positivity",
    )


def entropy_identity_suite(count: int, seed: int) -> SuiteResult:
    """For pure rho, identity channel, final projector rho: W = S_L(sigma)."""
    worst = math.inf
    for case_seed in case_seeds(seed, count):
        rng = np.random.default_rng(case_seed)
        n, m = _dims_cycle(rng)
        psi = haar_state(n, rng)
        rho = DensityMatrix.from_state_vector(psi)
        blind = MeasurementSet.from_basis_partition(
            n, random_basis_partition(n, m, rng)
        )
        scenario = WitnessScenario(
            initial=rho,
            blind=blind,
            channel=Channel.identity(n),
            final_projector=np.outer(psi, psi.conj()),
        )
        report = witness_value(scenario)
        deviation = abs(report.w - linear_entropy(blind_measure(rho, blind)))
        worst = min(worst, TOL - deviation)
    return SuiteResult(
        name="entropy",
        passed=worst >= 0.0,
        count=count,
        worst_margin=worst,
        detail="margin = 1e-12 - |W - S_L(sigma)|",
    )


def run_suites(
    suites=SUITE_NAMES, count: int | None = None, seed: int = 7,
    distance_scale: float = 1.0
) -> dict:
    """Run the named suites and return a JSON-ready report."""
    runners = {
        "bound": lambda n, s: bound_suite(n, s),
        "contractivity": lambda n, s: contractivity_suite(
            n, s, distance_scale=distance_scale
        ),
        "convexity": lambda n, s: convexity_suite(n, s),
        "idempotence": lambda n, s: idempotence_suite(n, s),
        "entropy": lambda n, s: entropy_identity_suite(n, s),
    }
    report = {"seed": seed, "suites": {}, "all_pass": True}
    for offset, name in enumerate(suites):
        if name not in runners:
            raise ValueError(
                f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}"
            )
        n_cases = count if count is not None else DEFAULT_COUNTS[name]
        result = runners[name](n_cases, seed + 1000 * offset)
        report["suites"][name] = result.as_dict()
        report["all_pass"] = report["all_pass"] and result.passed
    return report
