"""Two-level sensor dynamics in lab and rotating frames.

Conventions used throughout the package
---------------------------------------
Basis ordering is (|0>, |-1>) with |0> at the top of the Bloch sphere,
so sigma_z |0> = +|0>.

A ``RotatingFrameHamiltonian`` with fields (detuning, drive_x, drive_y)
generates

    H = (detuning * sigma_z + drive_x * sigma_x + drive_y * sigma_y) / 2

i.e. the stored numbers are *physical rates*: a resonant drive with
drive_x = Omega flips the spin after Omega * t = pi, and the Bloch vector
precesses at the generalized Rabi frequency
Omega' = sqrt(detuning^2 + drive_x^2 + drive_y^2).

S_z is the symmetric spin-z operator sigma_z / 2 with expectation values
in [-1/2, +1/2] (|0> -> +1/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class SpinState:
    """Pure two-level state as the amplitude pair (c0, c1)."""

    c0: complex
    c1: complex

    @property
    def norm(self) -> float:
        return math.sqrt(abs(self.c0) ** 2 + abs(self.c1) ** 2)

    def normalized(self) -> "SpinState":
        n = self.norm
        return SpinState(self.c0 / n, self.c1 / n)

    def bloch(self) -> np.ndarray:
        """Bloch vector (rx, ry, rz) of the pure state."""
        c0, c1 = self.c0, self.c1
        cross = np.conj(c0) * c1
        return np.array(
            [2.0 * cross.real, 2.0 * cross.imag, abs(c0) ** 2 - abs(c1) ** 2]
        )


def superposition_state(phase: float) -> SpinState:
    """(|0> + exp(i*phase) |-1>) / sqrt(2), the reference-defined initial state."""
    return SpinState(1.0 / math.sqrt(2.0), np.exp(1j * phase) / math.sqrt(2.0))


STATE_ZERO = SpinState(1.0, 0.0)


@dataclass(frozen=True)
class RotatingFrameHamiltonian:
    """Static rotating-frame Hamiltonian: detuning plus transverse drive.

    All fields in rad/s.  See the module docstring for the factor
    conventions (physical-rate storage, halves applied in the propagator).
    """

    detuning: float
    drive_x: float
    drive_y: float

    @property
    def omega_prime(self) -> float:
        """Generalized Rabi frequency sqrt(detuning^2 + drive_x^2 + drive_y^2)."""
        return math.sqrt(self.detuning**2 + self.drive_x**2 + self.drive_y**2)

    @property
    def drive_amplitude(self) -> float:
        return math.hypot(self.drive_x, self.drive_y)


@dataclass(frozen=True)
class Propagator:
    """2x2 unitary time-evolution operator."""

    u: np.ndarray

    def unitarity_defect(self) -> float:
        return float(np.abs(self.u.conj().T @ self.u - IDENTITY).max())


@dataclass(frozen=True)
class DecayParams:
    """Phenomenological Bloch-damping lifetimes, all in seconds.

    The model is an exponential envelope: transverse components damp with
    t2_star (or t1_rho during decoupled sensing), the longitudinal
    component relaxes toward the unpolarized value with t1.
    """

    t1: float
    t2_star: float
    t2: float
    t1_rho: float
    enabled: bool = False

    def __post_init__(self):
        if self.enabled:
            if not (0.0 < self.t2_star <= self.t2 <= 2.0 * self.t1):
                raise ValueError(
                    "decay lifetimes must satisfy 0 < t2_star <= t2 <= 2*t1"
                )
            if self.t1_rho <= 0.0:
                raise ValueError("t1_rho must be positive")


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite Hamiltonian parameter: {v!r}")


def rotation_coefficients(detuning, drive_x, drive_y, t):
    """Half-angle propagator coefficients, vectorized over any broadcastable shape.

    Returns (cos_half, coeff) such that

        U = cos_half * 1 - i * coeff * (drive_x sx + drive_y sy + detuning sz)

    with coeff = sin(Omega' t / 2) / Omega', evaluated through its analytic
    limit t/2 as Omega' -> 0 (np.sinc handles the removable singularity).
    """
    omega_prime = np.sqrt(
        np.asarray(detuning) ** 2 + np.asarray(drive_x) ** 2 + np.asarray(drive_y) ** 2
    )
    half = 0.5 * np.asarray(t) * omega_prime
    cos_half = np.cos(half)
    coeff = 0.5 * np.asarray(t) * np.sinc(half / np.pi)
    return cos_half, coeff


def closed_form_propagator(h: RotatingFrameHamiltonian, t: float) -> Propagator:
    """Exact propagator exp(-i H t) for a static rotating-frame Hamiltonian."""
    _check_finite(h.detuning, h.drive_x, h.drive_y, t)
    if t < 0.0:
        raise ValueError("evolution time must be non-negative")
    c, s = rotation_coefficients(h.detuning, h.drive_x, h.drive_y, t)
    u = c * IDENTITY - 1j * s * (
        h.drive_x * SIGMA_X + h.drive_y * SIGMA_Y + h.detuning * SIGMA_Z
    )
    return Propagator(u)


def evolve(state: SpinState, u: Propagator) -> SpinState:
    """Apply a propagator to a state; the output stays normalized."""
    vec = u.u @ np.array([state.c0, state.c1])
    return SpinState(complex(vec[0]), complex(vec[1]))


def expect_sz(state: SpinState) -> float:
    """<S_z> with S_z = sigma_z / 2; |0> gives +1/2."""
    return 0.5 * (abs(state.c0) ** 2 - abs(state.c1) ** 2)


def phase_response(omega, detuning, phi0, phi_ref, t, small_angle: bool = False):
    """<S_z> after evolving the reference-defined superposition under a tone.

    Exact two-term result for drive amplitude ``omega`` at phase ``phi0``
    acting for time ``t`` on (|0> + e^{i phi_ref} |-1>)/sqrt(2):

        <S_z> = -(W/2W') sin(W' t) sin(phi0 - phi_ref)
                + (dW W / 2 W'^2) (1 - cos(W' t)) cos(phi0 - phi_ref)

    with W = omega, dW = detuning, W' = sqrt(W^2 + dW^2).  With
    ``small_angle=True`` the leading-order form -(omega*t/2) * sin(phi0 -
    phi_ref) is returned instead.  Note the amplitude is omega*t/2, not
    omega*t: the factor follows from the physical-rate convention pinned by
    the pi-pulse identity (see module docstring).
    """
    omega = np.asarray(omega, dtype=float)
    detuning = np.asarray(detuning, dtype=float)
    dphi = np.asarray(phi0) - np.asarray(phi_ref)
    if small_angle:
        return -0.5 * omega * np.asarray(t) * np.sin(dphi)
    omega_prime = np.sqrt(omega**2 + detuning**2)
    theta = omega_prime * np.asarray(t)
    with np.errstate(invalid="ignore", divide="ignore"):
        first = np.where(
            omega_prime > 0.0,
            -0.5 * omega / np.where(omega_prime > 0.0, omega_prime, 1.0) * np.sin(theta),
            0.0,
        )
        second = np.where(
            omega_prime > 0.0,
            0.5
            * detuning
            * omega
            / np.where(omega_prime > 0.0, omega_prime**2, 1.0)
            * (1.0 - np.cos(theta)),
            0.0,
        )
    out = first * np.sin(dphi) + second * np.cos(dphi)
    return out if out.shape else float(out)


class StepSizeError(ValueError):
    """Raised when a lab-frame integration step is too coarse."""


@dataclass(frozen=True)
class LabTone:
    """One lab-frame drive term amplitude*cos(frequency*t + phase)*axis_operator.

    axis is "x" for a transverse (sigma_x) drive or "z" for a longitudinal
    (sigma_z) drive; the operator coefficient is amplitude*cos(...)/1 on the
    bare Pauli for "x" and amplitude*cos(...)/2 * sigma_z... stored
    consistently with the rotating-frame rate convention:

        H_drive = amplitude * cos(frequency * t + phase) * sigma_axis / s

    where s = 1 for "x" (so the resonant rotating-frame Rabi rate equals
    ``amplitude``) and s = 2 for "z" (so the instantaneous frequency shift of
    the splitting equals ``amplitude * cos``).
    """

    amplitude: float
    frequency: float
    phase: float = 0.0
    axis: str = "x"


@dataclass(frozen=True)
class LabFrameParams:
    """Lab-frame description: splitting omega_s plus a list of drive tones."""

    omega_s: float
    tones: tuple

    def max_frequency(self) -> float:
        freqs = [abs(self.omega_s)] + [abs(t.frequency) for t in self.tones]
        freqs += [abs(t.amplitude) for t in self.tones]
        return max(freqs)


def _h_components(params: LabFrameParams, t):
    """(hz, hx, hy) rates of H = (hz sz + hx sx + hy sy)/2 at lab time t."""
    hz = np.full_like(np.asarray(t, dtype=float), params.omega_s)
    hx = np.zeros_like(hz)
    for tone in params.tones:
        osc = tone.amplitude * np.cos(tone.frequency * np.asarray(t) + tone.phase)
        if tone.axis == "x":
            hx = hx + 2.0 * osc  # bare sigma_x drive -> rate 2*osc in the /2 convention
        elif tone.axis == "z":
            hz = hz + osc
        else:
            raise ValueError(f"unknown drive axis {tone.axis!r}")
    return hz, hx, np.zeros_like(hz)


def lab_frame_integrate(
    params: LabFrameParams,
    dt: float,
    duration: float,
    state: SpinState = STATE_ZERO,
    record_sz: bool = False,
):
    """Integrate the time-dependent lab-frame Hamiltonian by midpoint stepping.

    Piecewise-constant propagators evaluated at interval midpoints; each
    step is exactly unitary.  Serves as the RWA-free oracle for the
    rotating-frame machinery.  Refuses steps coarser than 1/20 of the
    fastest period present.
    """
    w_max = params.max_frequency()
    if w_max > 0.0 and dt > (2.0 * math.pi / w_max) / 20.0:
        raise StepSizeError(
            f"dt={dt:g} too coarse for fastest frequency {w_max:g} rad/s; "
            f"need dt <= {(2.0 * math.pi / w_max) / 20.0:g}"
        )
    n_steps = max(1, int(round(duration / dt)))
    step = duration / n_steps
    mids = (np.arange(n_steps) + 0.5) * step
    hz, hx, hy = _h_components(params, mids)
    cos_half, coeff = rotation_coefficients(hz, hx, hy, step)
    c0 = complex(state.c0)
    c1 = complex(state.c1)
    sz_trace = np.empty(n_steps) if record_sz else None
    for i in range(n_steps):
        c, s = cos_half[i], coeff[i]
        m00 = c - 1j * s * hz[i]
        m11 = c + 1j * s * hz[i]
        m01 = -1j * s * (hx[i] - 1j * hy[i])
        m10 = -1j * s * (hx[i] + 1j * hy[i])
        c0, c1 = m00 * c0 + m01 * c1, m10 * c0 + m11 * c1
        if record_sz:
            sz_trace[i] = 0.5 * (abs(c0) ** 2 - abs(c1) ** 2)
    out = SpinState(c0, c1)
    if record_sz:
        return out, (np.arange(1, n_steps + 1) * step, sz_trace)
    return out


def apply_decay(state_or_bloch, decay: DecayParams, t: float, transverse: str = "t2_star"):
    """Damp a state (returned as a Bloch vector) or Bloch vector for time t.

    Transverse components shrink by exp(-t/T) with T selected by
    ``transverse`` ("t2_star" or "t1_rho"); the longitudinal component
    relaxes toward the unpolarized value 0 with t1.
    """
    if not decay.enabled:
        raise ValueError("apply_decay called with decay disabled")
    if t < 0.0:
        raise ValueError("decay time must be non-negative")
    if isinstance(state_or_bloch, SpinState):
        r = state_or_bloch.bloch()
    else:
        r = np.array(state_or_bloch, dtype=float)
    t_perp = decay.t2_star if transverse == "t2_star" else decay.t1_rho
    out = r.copy()
    out[..., 0] *= math.exp(-t / t_perp)
    out[..., 1] *= math.exp(-t / t_perp)
    out[..., 2] *= math.exp(-t / decay.t1)
    return out
