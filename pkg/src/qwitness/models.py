"""Three reference systems with matching closed forms.

Each system comes as a scenario builder (full simulation through the witness
machinery) plus an analytic expression for the same witness, so the two
routes can be cross-checked at machine precision:

* a spin of length j precessing in a tilted magnetic field, measured in the
  Jz basis;
* a three-level system with a freely chosen orthogonal evolution applied
  before the blind measurement and undone after it;
* a bosonic mode displaced out of the vacuum and displaced back, with a
  number-resolved blind measurement on a truncated Fock space.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import qcore
from .witness import Channel, DensityMatrix, MeasurementSet, WitnessScenario


@dataclass(frozen=True)
class PrecessingSpinParams:
    """Spin length j, field tilt angle, energy scale, and segment duration.

    The state evolves for ``tau`` before the blind measurement and for
    ``tau_after`` (default: ``tau`` again) after it. A negative
    ``tau_after`` runs the second segment backwards, which turns the
    protocol into an echo that returns the state exactly when no blind
    measurement intervenes.
    """

    j: float
    theta: float = 0.0
    omega: float = 1.0
    tau: float = 0.0
    tau_after: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.j):
            raise ValueError(f"spin length must be a half-integer, got {self.j!r}")
        two_j = round(2 * self.j)
        if abs(2 * self.j - two_j) > 1e-12 or two_j < 0:
            raise ValueError(f"spin length must be a half-integer, got {self.j!r}")
        for name in ("theta", "omega", "tau"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.tau_after is not None and not math.isfinite(self.tau_after):
            raise ValueError("tau_after must be finite")


def spin_hamiltonian(p: PrecessingSpinParams) -> np.ndarray:
    """omega (Jx cos(theta) + Jz sin(theta))."""
    jx, _, jz = qcore.spin_operators(p.j)
    return p.omega * (jx * math.cos(p.theta) + jz * math.sin(p.theta))


def _m_groups_to_indices(j: float, m_blind) -> list:
    """Translate groups of m quantum numbers into basis-index groups."""
    two_j = round(2 * j)
    groups = []
    for group in m_blind:
        idx = []
        for m in group:
            two_m = round(2 * m)
            if abs(2 * m - two_m) > 1e-9 or (two_j - two_m) % 2 != 0:
                raise ValueError(f"m = {m!r} is not a valid level for j = {j}")
            k = (two_j - two_m) // 2
            if not 0 <= k <= two_j:
                raise ValueError(f"m = {m!r} outside [-{j}, {j}]")
            idx.append(k)
        groups.append(idx)
    return groups


def precessing_spin_scenario(
    p: PrecessingSpinParams, m_blind=None
) -> WitnessScenario:
    """Precessing-spin witness scenario.

    Prepared in the lowest-weight state |-j>, evolved for ``tau``, blindly
    measured in the Jz basis (by default every level separately, optionally
    with levels grouped into coarser outcomes given as groups of m values),
    evolved again, and finally projected back onto |-j>.
    """
    h = spin_hamiltonian(p)
    dim = round(2 * p.j) + 1
    ground = np.zeros(dim, dtype=complex)
    ground[-1] = 1.0
    u_before = qcore.unitary_evolution(h, p.tau)
    tau_after = p.tau if p.tau_after is None else p.tau_after
    if m_blind is None:
        blind = MeasurementSet.computational_basis(dim)
    else:
        blind = MeasurementSet.from_basis_partition(
            dim, _m_groups_to_indices(p.j, m_blind)
        )
    return WitnessScenario(
        initial=DensityMatrix.from_state_vector(u_before @ ground),
        blind=blind,
        channel=Channel.hamiltonian(h, tau_after),
        final_projector=np.outer(ground, ground.conj()),
    )


def qubit_closed_form(omega: float, t: float) -> float:
    """Witness of the j = 1/2 spin at zero tilt: (1/2) sin^2(omega t)."""
    return 0.5 * math.sin(omega * t) ** 2


@dataclass(frozen=True)
class ControlledEvolutionParams:
    """The two angles parametrizing the freely chosen 3x3 orthogonal evolution."""

    theta: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError("angles must be finite")


def controlled_unitary(p: ControlledEvolutionParams) -> np.ndarray:
    """The 3x3 real orthogonal evolution operator for the controlled system."""
    ct, st = math.cos(p.theta), math.sin(p.theta)
    cp, sp = math.cos(p.phi), math.sin(p.phi)
    return np.array(
        [
            [ct, 0.0, st],
            [st * sp, cp, -ct * sp],
            [-st * cp, sp, ct * cp],
        ]
    )


def controlled_closed_form(p: ControlledEvolutionParams) -> float:
    """|1 - (1/4)(3 + cos(4 phi)) cos^4(theta) - sin^4(theta)|."""
    return abs(
        1.0
        - 0.25 * (3.0 + math.cos(4.0 * p.phi)) * math.cos(p.theta) ** 4
        - math.sin(p.theta) ** 4
    )


def controlled_scenario(p: ControlledEvolutionParams) -> WitnessScenario:
    """Echo scenario for the controlled three-level system.

    The evolution U is applied before the blind Jz-basis measurement and its
    inverse after it, so without the blind measurement the system returns to
    the initial state |-j> (the last basis vector) with certainty.
    """
    u = controlled_unitary(p)
    ground = np.zeros(3, dtype=complex)
    ground[2] = 1.0
    return WitnessScenario(
        initial=DensityMatrix.from_state_vector(u @ ground),
        blind=MeasurementSet.computational_basis(3),
        channel=Channel.unitary(u.conj().T),
        final_projector=np.outer(ground, ground.conj()),
    )


@dataclass(frozen=True)
class BosonicParams:
    """Displacement amplitude and Fock-space cutoff."""

    alpha: complex
    n_trunc: int = 64

    def __post_init__(self):
        if not (math.isfinite(self.alpha.real) and math.isfinite(self.alpha.imag)):
            raise ValueError("alpha must be finite")
        if self.n_trunc < 2:
            raise ValueError(f"Fock cutoff must be at least 2, got {self.n_trunc}")


def recommended_fock_cutoff(alpha: complex) -> int:
    """Deliberately generous cutoff, ceil(16 (1 + |alpha|^2))."""
    return math.ceil(16.0 * (1.0 + abs(alpha) ** 2))


def displacement_truncation_deficit(alpha: complex, n_trunc: int) -> float:
    """Weight of the ideal displaced vacuum lying beyond the cutoff.

    This is the tail of the Poisson distribution with mean |alpha|^2 from
    n_trunc upwards; it estimates how much the truncated simulation can
    deviate from the untruncated one.
    """
    lam = abs(alpha) ** 2
    term = math.exp(-lam)
    total = term
    for k in range(1, n_trunc):
        term *= lam / k
        total += term
    return max(0.0, 1.0 - total)


def bosonic_scenario(p: BosonicParams) -> WitnessScenario:
    """Displace the vacuum, blindly count photons, displace back.

    Warns (rather than failing) when the cutoff is below the recommended
    one; the truncated scenario is still a perfectly valid quantum system,
    it just approximates the untruncated mode less closely.
    """
    if p.n_trunc < recommended_fock_cutoff(p.alpha):
        deficit = displacement_truncation_deficit(p.alpha, p.n_trunc)
        warnings.warn(
            f"Fock cutoff {p.n_trunc} below recommended "
            f"{recommended_fock_cutoff(p.alpha)} for |alpha| = {abs(p.alpha):.3g} "
            f"(estimated truncation deficit {deficit:.3e})",
            stacklevel=2,
        )
    forward = qcore.displacement_operator(p.alpha, p.n_trunc)
    backward = qcore.displacement_operator(-p.alpha, p.n_trunc)
    vacuum_projector = np.zeros((p.n_trunc, p.n_trunc), dtype=complex)
    vacuum_projector[0, 0] = 1.0
    return WitnessScenario(
        initial=DensityMatrix.from_state_vector(forward[:, 0]),
        blind=MeasurementSet.computational_basis(p.n_trunc),
        channel=Channel.unitary(backward),
        final_projector=vacuum_projector,
    )


def bosonic_closed_form(alpha: complex) -> float:
    """1 - e^(-2|alpha|^2) I0(2|alpha|^2), computed overflow-free."""
    z = 2.0 * abs(alpha) ** 2
    return 1.0 - qcore.bessel_i0_scaled(z)


def bosonic_asymptotic(alpha: complex) -> float:
    """Large-displacement form 1 - 1/(2 sqrt(pi) |alpha|)."""
    mag = abs(alpha)
    if mag == 0.0:
        raise ValueError("asymptotic form is undefined at alpha = 0")
    return 1.0 - 1.0 / (2.0 * math.sqrt(math.pi) * mag)


def spin_to_boson_alpha(j: float, omega: float, t: float) -> float:
    """Displacement amplitude sqrt(j/2) omega t matching a large spin."""
    if not math.isfinite(j) or abs(2 * j - round(2 * j)) > 1e-12 or j < 0:
        raise ValueError(f"spin length must be a half-integer, got {j!r}")
    return math.sqrt(j / 2.0) * omega * t
