"""Dressed-state machinery: Bessel sidebands, Floquet and Mollow effective Hamiltonians.

A strong longitudinal drive at omega_rf with amplitude Omega_rf splits each
bare level into a ladder E_{0,m} = m*omega_rf, E_{1,m} = omega_s +
m*omega_rf; a transverse probe couples to the sideband Delta_m with
strength J_{Delta_m}(x) where x = Omega_rf / omega_rf is the modulation
index.  The Bessel evaluation is self-contained (Miller's downward
recurrence with series normalization) so its accuracy is fully under test
control.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import RotatingFrameHamiltonian

MAX_ORDER = 50
MAX_ARGUMENT = 50.0
SIDEBAND_TRUNCATION = 40  # J_k(x) negligible beyond |k| ~ x + 10 for x <= 50


class BesselRangeError(ValueError):
    """Order or argument outside the documented range."""


def _bessel_row(x: float, k_max: int) -> np.ndarray:
    """J_0..J_k_max at x via Miller's downward recurrence, series-normalized.

    Recurrence start well above both k_max and the turnover |k| ~ x; the
    run is normalized with the completeness sum J_0 + 2*sum J_{2m} = 1.
    """
    if x == 0.0:
        out = np.zeros(k_max + 1)
        out[0] = 1.0
        return out
    start = k_max + int(abs(x)) + 20 + int(15.0 * abs(x) ** 0.5)
    if start % 2 == 1:
        start += 1
    jj = np.zeros(start + 1)
    jp = 0.0
    j = 1e-30
    jj[start] = j
    for k in range(start, 0, -1):
        jm = (2.0 * k / x) * j - jp
        jp = j
        j = jm
        jj[k - 1] = j
        if abs(j) > 1e250:  # rescale mid-run to avoid overflow
            j *= 1e-250
            jp *= 1e-250
            jj *= 1e-250
    # completeness normalization: J_0(x) + 2 * sum_{m>=1} J_{2m}(x) = 1
    total = jj[0] + 2.0 * jj[2 : start + 1 : 2].sum()
    return jj[: k_max + 1] / total


def bessel_j(k: int, x: float) -> float:
    """First-kind Bessel J_k(x) for |k| <= 50, |x| <= 50.

    Uses J_{-k}(x) = (-1)^k J_k(x) and J_k(-x) = (-1)^k J_k(x) to reduce to
    non-negative order and argument.
    """
    if abs(k) > MAX_ORDER or abs(x) > MAX_ARGUMENT:
        raise BesselRangeError(
            f"bessel_j supports |k| <= {MAX_ORDER}, |x| <= {MAX_ARGUMENT}; "
            f"got k={k}, x={x}"
        )
    sign = 1.0
    if k < 0:
        k = -k
        if k % 2 == 1:
            sign = -sign
    if x < 0.0:
        x = -x
        if k % 2 == 1:
            sign = -sign
    return sign * float(_bessel_row(x, k)[k])


def bessel_j_derivative(k: int, x: float) -> float:
    """dJ_k/dx via the recurrence identity (J_{k-1} - J_{k+1}) / 2."""
    return 0.5 * (bessel_j(k - 1, x) - bessel_j(k + 1, x))


@dataclass(frozen=True)
class FloquetDressing:
    """Strong longitudinal RF dressing: omega_rf, Omega_rf in rad/s."""

    omega_rf: float
    amplitude_rf: float

    def __post_init__(self):
        if self.omega_rf <= 0.0:
            raise ValueError("omega_rf must be positive")
        if self.amplitude_rf < 0.0:
            raise ValueError("amplitude_rf must be non-negative")

    @property
    def modulation_index(self) -> float:
        return self.amplitude_rf / self.omega_rf

    def sideband_strength(self, k: int) -> float:
        """Transition strength J_k(x) of sideband k."""
        return bessel_j(k, self.modulation_index)


@dataclass(frozen=True)
class MollowDressing:
    """Mollow dressing: carrier drive G plus probe gamma at phase phi.

    detuning is the probe offset from the carrier; the second-rotating-frame
    detuning is Delta'' = (G - detuning) / 2 and the result is only valid
    for 2*detuning >> Delta''.
    """

    drive_amplitude: float
    detuning: float
    probe_amplitude: float
    probe_phase: float = 0.0
    validity_ratio: float = 10.0

    @property
    def second_frame_detuning(self) -> float:
        return 0.5 * (self.drive_amplitude - self.detuning)

    @property
    def is_valid(self) -> bool:
        d2 = abs(self.second_frame_detuning)
        if d2 == 0.0:
            return True
        return abs(2.0 * self.detuning) > self.validity_ratio * d2


def floquet_effective_hamiltonian(
    d: FloquetDressing,
    k: int,
    probe_amplitude: float,
    detuning: float,
    phi0: float = 0.0,
) -> RotatingFrameHamiltonian:
    """Effective two-level Hamiltonian of sideband k under a weak probe.

    detuning is Delta' = omega_mw - (omega_s + k * omega_rf); the drive rate
    is J_k(x) * probe_amplitude.  The rotating-wave reduction assumes
    probe_amplitude << omega_rf; a warning is emitted past ratio 0.1.
    """
    if probe_amplitude > 0.1 * d.omega_rf:
        warnings.warn(
            "probe amplitude exceeds 0.1 * omega_rf; single-sideband "
            "rotating-wave reduction degrades",
            stacklevel=2,
        )
    rate = d.sideband_strength(k) * probe_amplitude
    return RotatingFrameHamiltonian(
        detuning=detuning,
        drive_x=rate * math.cos(phi0),
        drive_y=rate * math.sin(phi0),
    )


# Basis mapping of the Mollow second rotating frame: the dressed energy axis
# is the lab-frame x axis.  We relabel cyclically, (x, y, z)_dressed =
# (y, z, x)_lab, so the returned RotatingFrameHamiltonian is expressed in a
# frame whose sigma_z is the lab sigma_x.
MOLLOW_BASIS_MAP = {"x_dressed": "y_lab", "y_dressed": "z_lab", "z_dressed": "x_lab"}


@dataclass(frozen=True)
class MollowResult:
    hamiltonian: RotatingFrameHamiltonian
    valid: bool
    basis_map: dict


def mollow_effective_hamiltonian(m: MollowDressing) -> MollowResult:
    """Second-rotating-frame Hamiltonian of the Mollow-dressed probe.

    In lab Pauli terms H'' = Delta'' sx + (gamma/4)(cos(phi) sz -
    sin(phi) sy); re-expressed in the dressed basis (MOLLOW_BASIS_MAP) it
    becomes an ordinary detuning-plus-drive Hamiltonian with detuning
    2*Delta'' and drive rate gamma/2 at phase (phi + pi/2).
    """
    valid = m.is_valid
    if not valid:
        warnings.warn(
            "Mollow validity condition 2*detuning >> Delta'' violated",
            stacklevel=2,
        )
    gamma = m.probe_amplitude
    # lab sz -> dressed sy, lab sy -> dressed sx (cyclic map above)
    h = RotatingFrameHamiltonian(
        detuning=2.0 * m.second_frame_detuning,
        drive_x=-0.5 * gamma * math.sin(m.probe_phase),
        drive_y=0.5 * gamma * math.cos(m.probe_phase),
    )
    return MollowResult(hamiltonian=h, valid=valid, basis_map=MOLLOW_BASIS_MAP)


def floquet_levels(d: FloquetDressing, omega_s: float, m_range) -> list:
    """Quasi-level list [(level, m, energy)] for m in m_range.

    level 0 has energy m*omega_rf, level 1 has omega_s + m*omega_rf.
    """
    out = []
    for m in m_range:
        out.append((0, int(m), m * d.omega_rf))
        out.append((1, int(m), omega_s + m * d.omega_rf))
    return out


def floquet_transition_frequencies(d: FloquetDressing, omega_s: float, dm_range) -> dict:
    """Sideband transition frequencies omega_s + dm * omega_rf keyed by dm."""
    return {int(dm): omega_s + dm * d.omega_rf for dm in dm_range}


def sideband_strength_sensitivity(d: FloquetDressing, k: int) -> float:
    """dJ_k/dOmega_rf at the operating point; vanishes at a Bessel extremum."""
    return bessel_j_derivative(k, d.modulation_index) / d.omega_rf


def sideband_table(d: FloquetDressing, omega_s: float, k_max: int = 5) -> list:
    """Rows (k, transition frequency, J_k(x), relative strength J_k^2)."""
    rows = []
    for k in range(-k_max, k_max + 1):
        jk = d.sideband_strength(k)
        rows.append((k, omega_s + k * d.omega_rf, jk, jk * jk))
    return rows
