"""Quantum-witness machinery: states, blind measurements, channels, scenarios.

The witness W compares the probability of one outcome of a final projective
measurement with and without an intermediate measurement whose result is
discarded (a "blind" measurement). Classically the blind measurement changes
nothing and W = 0; quantum mechanically the blind measurement dephases the
state in its measurement basis and W can reach 1 - 1/M, where M is the
number of blind-measurement outcomes. This module provides the domain types
(density matrices, complete projector families, trace-preserving channels,
scenarios) and the operations on them: witness evaluation, trace distance,
the distance-maximizing projector, entropies, and the dimension bound.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import qcore

HERM_ATOL = 1e-12
TRACE_ATOL = 1e-12
PROJECTOR_ATOL = 1e-12
UNITARY_ATOL = 1e-12
# Channel application rounds eigenvalues; slightly negative values down to
# this floor are accepted as zero.
PSD_EIG_FLOOR = -1e-10
CHAIN_SLACK = 1e-12
# Relative nudge applied before the ceiling in dimension_bound, so an exact
# bound overshot by a few ulp does not inflate the inferred dimension.
DIMENSION_GUARD = 1e-9


class InvariantViolation(ValueError):
    """A physical invariant failed to hold; ``invariant`` names which one."""

    def __init__(self, invariant: str, message: str):
        super().__init__(message)
        self.invariant = invariant


def _frozen(mat: np.ndarray) -> np.ndarray:
    out = np.array(mat, dtype=complex)
    out.setflags(write=False)
    return out


def _require_square_finite(mat: np.ndarray, name: str) -> np.ndarray:
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvariantViolation(
            "shape", f"{name} must be square, got shape {mat.shape}"
        )
    if not np.all(np.isfinite(mat.real)) or not np.all(np.isfinite(mat.imag)):
        raise InvariantViolation("finiteness", f"{name} contains non-finite entries")
    return mat


def _require_hermitian(mat: np.ndarray, name: str) -> None:
    dev = qcore.hermiticity_deviation(mat)
    if dev > HERM_ATOL:
        raise InvariantViolation(
            "hermiticity", f"{name} is not Hermitian: max deviation {dev:.3e}"
        )


def _require_same_dim(a: int, b: int, what: str) -> None:
    if a != b:
        raise InvariantViolation(
            "dimension_match", f"dimension mismatch in {what}: {a} vs {b}"
        )


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Unit-trace, positive-semidefinite Hermitian matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = _require_square_finite(self.matrix, "density matrix")
        _require_hermitian(mat, "density matrix")
        tr = np.trace(mat)
        if abs(tr - 1.0) > TRACE_ATOL:
            raise InvariantViolation(
                "unit_trace", f"density matrix trace is {tr:.15g}, expected 1"
            )
        lo = float(np.linalg.eigvalsh(mat)[0])
        if lo < PSD_EIG_FLOOR:
            raise InvariantViolation(
                "positivity", f"density matrix has eigenvalue {lo:.3e} below 0"
            )
        object.__setattr__(self, "matrix", _frozen(mat))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_state_vector(cls, vec: np.ndarray) -> "DensityMatrix":
        """Pure state |v><v| from a nonzero vector (normalized here).

        The outer product of a normalized vector is Hermitian, unit trace,
        and rank-1 positive by construction, so the eigenvalue check of the
        general constructor is skipped.
        """
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        norm = np.linalg.norm(vec)
        if not math.isfinite(norm) or norm == 0.0:
            raise InvariantViolation(
                "normalization", "state vector must be finite and nonzero"
            )
        vec = vec / norm
        return _trusted_density(np.outer(vec, vec.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return _trusted_density(np.eye(dim, dtype=complex) / dim)


def _trusted_density(mat: np.ndarray) -> DensityMatrix:
    # Construction sites that guarantee the invariants exactly skip the
    # O(N^3) eigenvalue check of the public constructor.
    dm = object.__new__(DensityMatrix)
    object.__setattr__(dm, "matrix", _frozen(mat))
    return dm


def validate_projector(mat: np.ndarray, name: str = "projector") -> tuple[np.ndarray, int]:
    """Check P = P^dagger = P^2 and return (read-only copy, rank)."""
    mat = _require_square_finite(mat, name)
    _require_hermitian(mat, name)
    dev = float(np.abs(mat @ mat - mat).max())
    if dev > PROJECTOR_ATOL:
        raise InvariantViolation(
            "idempotency", f"{name} is not idempotent: max |P^2 - P| = {dev:.3e}"
        )
    tr = float(np.trace(mat).real)
    rank = round(tr)
    if abs(tr - rank) > 1e-9:
        raise InvariantViolation(
            "projector_rank", f"{name} trace {tr:.15g} is not an integer rank"
        )
    return _frozen(mat), rank


def basis_projector(dim: int, indices) -> np.ndarray:
    """Projector onto the span of the given computational basis indices."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        raise InvariantViolation("projector_rank", f"repeated basis indices {idx}")
    p = np.zeros((dim, dim), dtype=complex)
    for i in idx:
        if not 0 <= i < dim:
            raise InvariantViolation(
                "dimension_match", f"basis index {i} outside [0, {dim})"
            )
        p[i, i] = 1.0
    return p


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """Complete family of 2 <= M <= N mutually orthogonal projectors."""

    projectors: tuple
    labels: tuple = ()

    def __post_init__(self):
        projs = tuple(self.projectors)
        m = len(projs)
        if m < 2:
            raise InvariantViolation(
                "outcome_count", f"need at least 2 projectors, got {m}"
            )
        checked = []
        dim = None
        for k, p in enumerate(projs):
            p, rank = validate_projector(p, f"projector {k}")
            if rank < 1:
                raise InvariantViolation(
                    "projector_rank", f"projector {k} has rank 0"
                )
            if dim is None:
                dim = p.shape[0]
            _require_same_dim(p.shape[0], dim, "measurement set")
            checked.append(p)
        if m > dim:
            raise InvariantViolation(
                "outcome_count", f"{m} outcomes exceed dimension {dim}"
            )
        stack = np.stack(checked)
        for i in range(m):
            cross = np.abs(np.matmul(stack[i], stack[i + 1 :])).max() if i + 1 < m else 0.0
            if cross > PROJECTOR_ATOL:
                raise InvariantViolation(
                    "orthogonality",
                    f"projectors are not mutually orthogonal (max |P_i P_j| = {cross:.3e})",
                )
        dev = float(np.abs(stack.sum(axis=0) - np.eye(dim)).max())
        if dev > PROJECTOR_ATOL:
            raise InvariantViolation(
                "completeness", f"projectors do not sum to identity (deviation {dev:.3e})"
            )
        labels = tuple(self.labels) or tuple(f"a{k}" for k in range(m))
        if len(labels) != m:
            raise InvariantViolation(
                "labels", f"{len(labels)} labels for {m} projectors"
            )
        object.__setattr__(self, "projectors", tuple(checked))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_stack", stack)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    @property
    def size(self) -> int:
        return len(self.projectors)

    def dephase(self, mat: np.ndarray) -> np.ndarray:
        """sum_i P_i mat P_i on a raw matrix."""
        stack = self._stack
        return np.matmul(np.matmul(stack, mat), stack).sum(axis=0)

    @classmethod
    def from_basis_partition(cls, dim: int, groups, labels=()) -> "MeasurementSet":
        """Projectors onto disjoint groups of computational basis indices.

        The groups must partition range(dim); given that, the projectors are
        exactly idempotent, orthogonal, and complete (0/1 entries), so the
        floating-point checks of the general constructor are skipped.
        """
        groups = [list(g) for g in groups]
        if any(not g for g in groups):
            raise InvariantViolation(
                "projector_rank", "every outcome group needs at least one basis index"
            )
        seen = []
        for g in groups:
            seen.extend(g)
        if sorted(seen) != list(range(dim)):
            raise InvariantViolation(
                "completeness",
                f"groups {groups} do not partition the {dim} basis indices",
            )
        if len(groups) < 2:
            raise InvariantViolation(
                "outcome_count", f"need at least 2 projectors, got {len(groups)}"
            )
        projs = tuple(_frozen(basis_projector(dim, g)) for g in groups)
        labels = tuple(labels) or tuple(f"a{k}" for k in range(len(groups)))
        if len(labels) != len(groups):
            raise InvariantViolation(
                "labels", f"{len(labels)} labels for {len(groups)} projectors"
            )
        ms = object.__new__(cls)
        object.__setattr__(ms, "projectors", projs)
        object.__setattr__(ms, "labels", labels)
        object.__setattr__(ms, "_stack", np.stack(projs))
        return ms

    @classmethod
    @functools.lru_cache(maxsize=64)
    def computational_basis(cls, dim: int) -> "MeasurementSet":
        """Full rank-1 measurement in the computational basis (M = N).

        Instances are immutable, so repeated requests share one object.
        """
        return cls.from_basis_partition(dim, [[i] for i in range(dim)])


@dataclass(frozen=True, eq=False)
class Channel:
    """Trace-preserving completely positive map.

    One of: identity, a fixed unitary, evolution under a Hermitian generator
    for a fixed time, or a general operator-sum (Kraus) form.
    """

    kind: str
    dim: int
    operators: tuple = ()
    generator: np.ndarray | None = None
    time: float | None = None

    @classmethod
    def identity(cls, dim: int) -> "Channel":
        return cls(kind="identity", dim=dim)

    @classmethod
    def unitary(cls, u: np.ndarray) -> "Channel":
        u = _require_square_finite(u, "unitary")
        dev = float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())
        if dev > UNITARY_ATOL:
            raise InvariantViolation(
                "unitarity", f"matrix is not unitary: max |U^dagger U - 1| = {dev:.3e}"
            )
        return cls(kind="unitary", dim=u.shape[0], operators=(_frozen(u),))

    @classmethod
    def hamiltonian(cls, h: np.ndarray, t: float) -> "Channel":
        h = _require_square_finite(h, "hamiltonian")
        _require_hermitian(h, "hamiltonian")
        u = qcore.unitary_evolution(h, t)
        return cls(
            kind="hamiltonian",
            dim=h.shape[0],
            operators=(_frozen(u),),
            generator=_frozen(h),
            time=float(t),
        )

    @classmethod
    def kraus(cls, mats) -> "Channel":
        ops = [_require_square_finite(k, f"Kraus operator {i}") for i, k in enumerate(mats)]
        if not ops:
            raise InvariantViolation("trace_preservation", "empty Kraus list")
        dim = ops[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for k in ops:
            _require_same_dim(k.shape[0], dim, "Kraus list")
            total += k.conj().T @ k
        dev = float(np.abs(total - np.eye(dim)).max())
        if dev > UNITARY_ATOL:
            raise InvariantViolation(
                "trace_preservation",
                f"Kraus operators violate sum K^dagger K = 1 by {dev:.3e}",
            )
        return cls(kind="kraus", dim=dim, operators=tuple(_frozen(k) for k in ops))

    def apply(self, mat: np.ndarray) -> np.ndarray:
        if self.kind == "identity":
            return np.array(mat)
        if self.kind in ("unitary", "hamiltonian"):
            u = self.operators[0]
            return u @ mat @ u.conj().T
        out = np.zeros_like(np.asarray(mat, dtype=complex))
        for k in self.operators:
            out += k @ mat @ k.conj().T
        return out


@dataclass(frozen=True, eq=False)
class WitnessScenario:
    """Initial state, blind measurement, channel, and final projector."""

    initial: DensityMatrix
    blind: MeasurementSet
    channel: Channel
    final_projector: np.ndarray

    def __post_init__(self):
        dim = self.initial.dim
        _require_same_dim(self.blind.dim, dim, "scenario blind measurement")
        _require_same_dim(self.channel.dim, dim, "scenario channel")
        proj, rank = validate_projector(self.final_projector, "final projector")
        if not 1 <= rank <= dim - 1:
            raise InvariantViolation(
                "projector_rank",
                f"final projector rank {rank} outside [1, {dim - 1}]",
            )
        object.__setattr__(self, "final_projector", proj)

    @property
    def dim(self) -> int:
        return self.initial.dim


@dataclass(frozen=True)
class WitnessReport:
    """Witness value with its bound, trace distances, and entropy context."""

    w: float
    bound_m: float
    trace_distance_t0: float
    trace_distance_t: float
    linear_entropy_sigma: float
    dimension_bound: int
    warnings: tuple = ()

    def __post_init__(self):
        if not 0.0 <= self.w <= 1.0:
            raise InvariantViolation("witness_range", f"W = {self.w!r} outside [0, 1]")
        if self.w > self.bound_m + CHAIN_SLACK:
            raise InvariantViolation(
                "witness_bound",
                f"W = {self.w:.15g} exceeds 1 - 1/M = {self.bound_m:.15g}",
            )
        if self.w > self.trace_distance_t + CHAIN_SLACK:
            raise InvariantViolation(
                "witness_chain",
                f"W = {self.w:.15g} exceeds trace distance {self.trace_distance_t:.15g}",
            )
        if self.trace_distance_t > self.trace_distance_t0 + CHAIN_SLACK:
            raise InvariantViolation(
                "contractivity",
                f"trace distance grew under the channel: "
                f"{self.trace_distance_t:.15g} > {self.trace_distance_t0:.15g}",
            )

    def as_dict(self) -> dict:
        return {
            "W": self.w,
            "bound_M": self.bound_m,
            "trace_distance_t0": self.trace_distance_t0,
            "trace_distance_t": self.trace_distance_t,
            "linear_entropy_sigma": self.linear_entropy_sigma,
            "dimension_bound": self.dimension_bound,
            "warnings": list(self.warnings),
        }


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def blind_measure(rho: DensityMatrix, a: MeasurementSet) -> DensityMatrix:
    """State after measuring ``a`` and discarding the outcome.

    Returns sum_i P_i rho P_i, which kills coherences between projector
    ranges, commutes with every P_i, and is idempotent under repetition.
    """
    _require_same_dim(rho.dim, a.dim, "blind_measure")
    return DensityMatrix(a.dephase(rho.matrix))


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def outcome_probability(rho: DensityMatrix, phi: Channel, pb: np.ndarray) -> float:
    """tr(P_b Phi[rho]), clamped to [0, 1]."""
    _require_same_dim(rho.dim, phi.dim, "outcome_probability")
    proj, _ = validate_projector(pb, "outcome projector")
    _require_same_dim(proj.shape[0], rho.dim, "outcome_probability")
    return _clamp01(float(np.trace(proj @ phi.apply(rho.matrix)).real))


def witness_probabilities(s: WitnessScenario) -> tuple[float, float]:
    """Final-outcome probability without and with the blind measurement."""
    rho = s.initial.matrix
    pb = s.final_projector
    p_direct = _clamp01(float(np.trace(pb @ s.channel.apply(rho)).real))
    sigma = s.blind.dephase(rho)
    p_blind = _clamp01(float(np.trace(pb @ s.channel.apply(sigma)).real))
    return p_direct, p_blind


def simulated_witness(s: WitnessScenario) -> float:
    """|P(b) - P'(b)| alone, without the full report."""
    p_direct, p_blind = witness_probabilities(s)
    return abs(p_direct - p_blind)


def _trace_distance_raw(a: np.ndarray, b: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.linalg.eigvalsh(a - b)).sum())


def _as_state_matrix(x) -> np.ndarray:
    if isinstance(x, DensityMatrix):
        return x.matrix
    mat = _require_square_finite(x, "state")
    _require_hermitian(mat, "state")
    return mat


def trace_distance(rho, sigma) -> float:
    """Trace distance D = (1/2) sum_i |lambda_i(rho - sigma)|.

    Equals the largest value of tr(P (rho - sigma)) over all projectors P,
    i.e. the best single-measurement distinguishability of the two states.
    Accepts DensityMatrix instances or plain Hermitian arrays.
    """
    a = _as_state_matrix(rho)
    b = _as_state_matrix(sigma)
    _require_same_dim(a.shape[0], b.shape[0], "trace_distance")
    return _trace_distance_raw(a, b)


def optimal_final_projector(rho_t, sigma_t) -> tuple[np.ndarray, float]:
    """Projector maximizing tr(P (rho - sigma)) and the value it attains.

    The maximizer projects onto the positive-eigenvalue eigenspace of the
    difference, and the attained value equals the trace distance. When the
    states coincide there is no positive eigenspace; by convention a rank-1
    projector onto the leading eigenvector is returned with value 0.
    """
    a = _as_state_matrix(rho_t)
    b = _as_state_matrix(sigma_t)
    _require_same_dim(a.shape[0], b.shape[0], "optimal_final_projector")
    diff = a - b
    w, v = np.linalg.eigh(diff)
    positive = w > 0.0
    if not positive.any():
        top = v[:, -1]
        return np.outer(top, top.conj()), 0.0
    vp = v[:, positive]
    proj = vp @ vp.conj().T
    value = float(np.trace(proj @ diff).real)
    return proj, value


def linear_entropy(rho: DensityMatrix) -> float:
    """1 - tr(rho^2); zero for pure states, 1 - 1/N at maximal mixing."""
    mat = _as_state_matrix(rho)
    return max(0.0, 1.0 - float(np.trace(mat @ mat).real))


def _shannon(probs) -> float:
    total = 0.0
    for p in probs:
        if p > 0.0:
            total -= p * math.log(p)
    return total


def entropic_witness(
    rho: DensityMatrix, a: MeasurementSet, phi: Channel, b: MeasurementSet
) -> float:
    """|H'(B) - H(B)| in nats over the full final-measurement distribution.

    H is the Shannon entropy of the outcome probabilities of measurement
    ``b`` after the channel, H' the same with the blind measurement ``a``
    applied first. Zero-probability outcomes contribute nothing.
    """
    _require_same_dim(rho.dim, a.dim, "entropic_witness")
    _require_same_dim(rho.dim, b.dim, "entropic_witness")
    _require_same_dim(rho.dim, phi.dim, "entropic_witness")
    rho_t = phi.apply(rho.matrix)
    sigma_t = phi.apply(a.dephase(rho.matrix))
    direct = [_clamp01(float(np.trace(p @ rho_t).real)) for p in b.projectors]
    blind = [_clamp01(float(np.trace(p @ sigma_t).real)) for p in b.projectors]
    return abs(_shannon(blind) - _shannon(direct))


def theoretical_bound(m: int) -> float:
    """Largest witness value a blind measurement with m outcomes allows."""
    m = int(m)
    if m < 2:
        raise ValueError(f"outcome count must be at least 2, got {m}")
    return 1.0 - 1.0 / m


def dimension_bound(w: float) -> int:
    """Smallest Hilbert-space dimension consistent with witness value w.

    ceil(1/(1 - w)), with w first nudged down by a relative 1e-9 so that
    floating-point overshoot of an exact bound does not inflate the result.
    """
    w = float(w)
    if not 0.0 <= w < 1.0:
        raise ValueError(f"witness value must lie in [0, 1), got {w!r}")
    guarded = w * (1.0 - DIMENSION_GUARD)
    return math.ceil(1.0 / (1.0 - guarded))


def saturating_scenario(n: int, m: int) -> WitnessScenario:
    """Scenario attaining W = 1 - 1/m exactly in dimension n.

    The blind measurement partitions the basis into m projectors with ranks
    as equal as possible; the initial state spreads equal amplitude over one
    basis vector from each projector range; the channel is the identity and
    the final projector is the initial state itself.
    """
    n = int(n)
    m = int(m)
    if not 2 <= m <= n:
        raise ValueError(f"need 2 <= m <= n, got m={m}, n={n}")
    base = n // m
    sizes = [base + (1 if i < n % m else 0) for i in range(m)]
    groups = []
    start = 0
    for size in sizes:
        groups.append(list(range(start, start + size)))
        start += size
    anchors = [g[0] for g in groups]
    vec = np.zeros(n, dtype=complex)
    vec[anchors] = 1.0 / math.sqrt(m)
    initial = DensityMatrix.from_state_vector(vec)
    return WitnessScenario(
        initial=initial,
        blind=MeasurementSet.from_basis_partition(n, groups),
        channel=Channel.identity(n),
        final_projector=np.outer(vec, vec.conj()),
    )


def witness_value(s: WitnessScenario, extra_warnings: tuple = ()) -> WitnessReport:
    """Evaluate a scenario: witness, bound, trace distances, entropy, dimension."""
    p_direct, p_blind = witness_probabilities(s)
    w = abs(p_direct - p_blind)
    sigma = blind_measure(s.initial, s.blind)
    d0 = _trace_distance_raw(s.initial.matrix, sigma.matrix)
    rho_t = s.channel.apply(s.initial.matrix)
    sigma_t = s.channel.apply(sigma.matrix)
    dt = _trace_distance_raw(rho_t, sigma_t)
    return WitnessReport(
        w=w,
        bound_m=theoretical_bound(s.blind.size),
        trace_distance_t0=d0,
        trace_distance_t=dt,
        linear_entropy_sigma=linear_entropy(sigma),
        dimension_bound=dimension_bound(w),
        warnings=tuple(extra_warnings),
    )
