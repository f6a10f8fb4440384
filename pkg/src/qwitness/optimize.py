"""Witness maximization: grid scans, seeded random scenarios, local search.

The searches here are evidence-grade tools: the simplex search is a plain
Nelder-Mead on the negated evaluator with box constraints, restarted from
seeded random points when a wider sweep is wanted. Nothing in this module
certifies global optimality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qcore
from .witness import (
    Channel,
    DensityMatrix,
    MeasurementSet,
    WitnessScenario,
    simulated_witness,
)

GRID_SIZE_GUARD = 10**8


@dataclass(frozen=True)
class ParamSpace:
    """Named box of search parameters with optional periodic wrapping."""

    names: tuple
    bounds: tuple
    periodic: tuple = ()

    def __post_init__(self):
        if not self.names:
            raise ValueError("parameter space must not be empty")
        if len(self.bounds) != len(self.names):
            raise ValueError("one (lo, hi) pair required per parameter")
        for name, (lo, hi) in zip(self.names, self.bounds):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValueError(f"bad bounds for {name}: ({lo!r}, {hi!r})")
        periodic = tuple(self.periodic) or (False,) * len(self.names)
        if len(periodic) != len(self.names):
            raise ValueError("one periodic flag required per parameter")
        object.__setattr__(self, "periodic", periodic)

    @property
    def ndim(self) -> int:
        return len(self.names)

    def contains(self, x) -> bool:
        return all(lo <= xi <= hi for xi, (lo, hi) in zip(x, self.bounds))

    def confine(self, x: np.ndarray) -> np.ndarray:
        """Wrap periodic coordinates, clip the rest to the box.

        In-bounds coordinates pass through untouched.
        """
        out = np.array(x, dtype=float)
        for i, (lo, hi) in enumerate(self.bounds):
            if lo <= out[i] <= hi:
                continue
            if self.periodic[i] and hi > lo:
                out[i] = lo + (out[i] - lo) % (hi - lo)
            else:
                out[i] = min(hi, max(lo, out[i]))
        return out


@dataclass(frozen=True)
class OptResult:
    """Best point found, its value, and the improvement history."""

    best_params: np.ndarray
    best_w: float
    evaluations: int
    trace: tuple = ()


def grid_scan(evaluator, space: ParamSpace, steps):
    """Evaluate on a full rectangular grid; returns (rows, argmax).

    ``steps`` is the number of points per dimension (one int for all, or a
    sequence). Rows come out in lexicographic parameter order and ties for
    the maximum are broken toward the lexicographically smallest vector.
    """
    if isinstance(steps, int):
        steps = (steps,) * space.ndim
    steps = tuple(int(k) for k in steps)
    if len(steps) != space.ndim:
        raise ValueError("one step count per dimension required")
    if any(k < 2 for k in steps):
        raise ValueError(f"each dimension needs at least 2 points, got {steps}")
    total = math.prod(steps)
    if total > GRID_SIZE_GUARD:
        raise ValueError(f"grid of {total} points exceeds guard {GRID_SIZE_GUARD}")
    axes = [
        np.linspace(lo, hi, k) for (lo, hi), k in zip(space.bounds, steps)
    ]
    rows = []
    best_params = None
    best_w = -math.inf
    index = np.zeros(space.ndim, dtype=int)
    while True:
        params = tuple(axes[d][index[d]] for d in range(space.ndim))
        w = float(evaluator(params))
        rows.append((params, w))
        if w > best_w:
            best_w = w
            best_params = params
        # odometer increment, last dimension fastest
        d = space.ndim - 1
        while d >= 0:
            index[d] += 1
            if index[d] < steps[d]:
                break
            index[d] = 0
            d -= 1
        if d < 0:
            break
    return rows, (best_params, best_w)


def local_search(evaluator, space: ParamSpace, start, tol: float = 1e-10,
                 max_iter: int = 2000) -> OptResult:
    """Nelder-Mead ascent of the evaluator inside the box.

    Deterministic given the start point; stops when the simplex diameter
    drops below ``tol`` or after ``max_iter`` iterations. Out-of-box trial
    points are wrapped (periodic coordinates) or clipped.
    """
    start = np.asarray(start, dtype=float)
    if start.shape != (space.ndim,):
        raise ValueError(f"start must have {space.ndim} coordinates")
    if not space.contains(start):
        raise ValueError(f"start {start.tolist()} is outside the bounds")

    evaluations = 0

    def score(x):
        nonlocal evaluations
        evaluations += 1
        return -float(evaluator(tuple(x)))

    # initial simplex: start plus a 5%-of-range step along each axis,
    # flipped when it would leave the box
    simplex = [space.confine(start)]
    for i, (lo, hi) in enumerate(space.bounds):
        step = 0.05 * (hi - lo) if hi > lo else 0.05
        vertex = np.array(start)
        vertex[i] = vertex[i] + step if vertex[i] + step <= hi else vertex[i] - step
        simplex.append(space.confine(vertex))
    values = [score(v) for v in simplex]

    trace = []
    best_so_far = math.inf
    alpha, gamma, beta, delta = 1.0, 2.0, 0.5, 0.5
    for _ in range(max_iter):
        order = np.argsort(values, kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        if values[0] < best_so_far:
            best_so_far = values[0]
            trace.append((tuple(simplex[0]), -values[0]))
        diameter = max(
            np.linalg.norm(simplex[i] - simplex[0]) for i in range(1, len(simplex))
        )
        if diameter < tol:
            break
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        reflected = space.confine(centroid + alpha * (centroid - worst))
        r_val = score(reflected)
        if values[0] <= r_val < values[-2]:
            simplex[-1], values[-1] = reflected, r_val
            continue
        if r_val < values[0]:
            expanded = space.confine(centroid + gamma * (centroid - worst))
            e_val = score(expanded)
            if e_val < r_val:
                simplex[-1], values[-1] = expanded, e_val
            else:
                simplex[-1], values[-1] = reflected, r_val
            continue
        contracted = space.confine(centroid + beta * (worst - centroid))
        c_val = score(contracted)
        if c_val < values[-1]:
            simplex[-1], values[-1] = contracted, c_val
            continue
        best = simplex[0]
        simplex = [best] + [
            space.confine(best + delta * (v - best)) for v in simplex[1:]
        ]
        values = [values[0]] + [score(v) for v in simplex[1:]]

    order = np.argsort(values, kind="stable")
    best_x = simplex[order[0]]
    best_v = -values[order[0]]
    return OptResult(
        best_params=np.array(best_x),
        best_w=best_v,
        evaluations=evaluations,
        trace=tuple(trace),
    )


# ---------------------------------------------------------------------------
# Seeded random scenarios
# ---------------------------------------------------------------------------


def haar_state(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed pure state vector."""
    vec = rng.normal(size=n) + 1j * rng.normal(size=n)
    return vec / np.linalg.norm(vec)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix.

    The phases of R's diagonal are folded into Q, which is what makes the
    distribution Haar rather than merely unitary.
    """
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_basis_partition(n: int, m: int, rng: np.random.Generator) -> list:
    """Shuffle the basis indices and cut them into m nonempty groups."""
    perm = rng.permutation(n)
    cuts = np.sort(rng.choice(np.arange(1, n), size=m - 1, replace=False)) if m > 1 else []
    pieces = np.split(perm, cuts)
    return [sorted(int(i) for i in piece) for piece in pieces]


def case_seeds(seed: int, count: int) -> np.ndarray:
    """Per-case 64-bit seeds derived from one master seed.

    Order-independent, so serial and parallel sweeps see identical streams.
    """
    return np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)


def random_scenario(n: int, m: int, seed: int) -> WitnessScenario:
    """Fully seeded random scenario: Haar state and channel, random blind
    partition into m outcomes, Haar rank-1 final projector."""
    if not 2 <= m <= n:
        raise ValueError(f"need 2 <= m <= n, got m={m}, n={n}")
    rng = np.random.default_rng(int(seed))
    initial = DensityMatrix.from_state_vector(haar_state(n, rng))
    blind = MeasurementSet.from_basis_partition(
        n, random_basis_partition(n, m, rng)
    )
    channel = Channel.unitary(haar_unitary(n, rng))
    fin = haar_state(n, rng)
    return WitnessScenario(
        initial=initial,
        blind=blind,
        channel=channel,
        final_projector=np.outer(fin, fin.conj()),
    )


def random_kraus_channel(n: int, seed: int) -> Channel:
    """Random two-operator channel: a contraction completed to trace preservation."""
    rng = np.random.default_rng(int(seed))
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    k1 = z / (np.linalg.norm(z, 2) * (1.0 + rng.uniform(0.05, 1.0)))
    gram = np.eye(n) - k1.conj().T @ k1
    w, v = np.linalg.eigh(gram)
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    k2 = haar_unitary(n, rng) @ root
    return Channel.kraus((k1, k2))


# ---------------------------------------------------------------------------
# Spin-1 ceiling search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CeilingSearchReport:
    """Outcome of the multi-restart search over the spin-1 family.

    ``evidence_grade`` is always True: a finite restart count can support
    but never prove that the ceiling is unbeatable.
    """

    ceiling: float
    best_w: float
    best_params: tuple
    restarts: int
    evaluations: int
    within_tol: bool
    evidence_grade: bool = True


def _spin1_family_witness(params) -> float:
    """Witness of the j=1 spin with a tiltable field and free segment ratio.

    Parameters: field polar angle (from the x axis toward z), field azimuth
    (introducing a Jy component), the first segment angle omega*tau, and the
    ratio of second to first segment duration.
    """
    theta, psi, omega_tau, ratio = params
    jx, jy, jz = qcore.spin_operators(1.0)
    h = (
        math.cos(theta) * math.cos(psi) * jx
        + math.cos(theta) * math.sin(psi) * jy
        + math.sin(theta) * jz
    )
    u1 = qcore.unitary_evolution(h, omega_tau)
    u2 = qcore.unitary_evolution(h, ratio * omega_tau)
    ground = np.zeros(3, dtype=complex)
    ground[2] = 1.0
    scenario = WitnessScenario(
        initial=DensityMatrix.from_state_vector(u1 @ ground),
        blind=MeasurementSet.computational_basis(3),
        channel=Channel.unitary(u2),
        final_projector=np.outer(ground, ground.conj()),
    )
    return simulated_witness(scenario)


SPIN1_SPACE = ParamSpace(
    names=("theta", "psi", "omega_tau", "ratio"),
    bounds=((-math.pi / 2, math.pi / 2), (-math.pi, math.pi), (0.0, 2 * math.pi), (0.1, 3.0)),
    periodic=(False, True, True, False),
)

SPIN1_CEILING = 5.0 / 8.0


def verify_spin1_ceiling(
    restarts: int = 50, tol: float = 1e-6, seed: int = 20240, starts=None
) -> CeilingSearchReport:
    """Search the spin-1 family (Jy tilt and segment ratio included) for
    witness values above 5/8.

    With zero restarts and no explicit starts the report is vacuous. This
    is a stochastic search, reported as evidence, not a proof.
    """
    points = [np.asarray(s, dtype=float) for s in (starts or [])]
    rng = np.random.default_rng(int(seed))
    for _ in range(restarts):
        points.append(
            np.array([rng.uniform(lo, hi) for lo, hi in SPIN1_SPACE.bounds])
        )
    best = None
    total_evals = 0
    for start in points:
        result = local_search(
            _spin1_family_witness, SPIN1_SPACE, start, tol=1e-9, max_iter=600
        )
        total_evals += result.evaluations
        if best is None or result.best_w > best.best_w:
            best = result
    if best is None:
        return CeilingSearchReport(
            ceiling=SPIN1_CEILING,
            best_w=0.0,
            best_params=(),
            restarts=0,
            evaluations=0,
            within_tol=True,
        )
    # polish the winner so the reported optimum is tight
    polished = local_search(
        _spin1_family_witness, SPIN1_SPACE, best.best_params, tol=1e-12, max_iter=1200
    )
    total_evals += polished.evaluations
    if polished.best_w >= best.best_w:
        best = polished
    return CeilingSearchReport(
        ceiling=SPIN1_CEILING,
        best_w=best.best_w,
        best_params=tuple(float(x) for x in best.best_params),
        restarts=len(points),
        evaluations=total_evals,
        within_tol=best.best_w <= SPIN1_CEILING + tol,
    )
