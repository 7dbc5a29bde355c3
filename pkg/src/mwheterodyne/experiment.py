"""Sequential shot-series simulation with coherent phase tracking, plus scan drivers.

The shot loop is vectorized over shot indices: every per-shot quantity is a
pure function of (configuration, shot index), shots are computed in fixed
chunks written to index-addressed slots, and the optional thread pool only
changes who computes a chunk, never what it contains.

Two evaluation strategies are used:

* direct: the plain free-evolution protocol is cheap per shot (a handful of
  piecewise-constant sub-steps), so all shots are propagated in parallel as
  numpy arrays;
* tabulated: for CPMG and Floquet sensing blocks the per-shot evolution is
  expensive but depends on the shot only through the signal's relative
  phase (and a small set of programmed RF phases).  The exact 2pi-periodic
  response is computed once on a uniform phase grid and evaluated per shot
  by trigonometric interpolation, which is exact below the grid's Nyquist
  harmonic.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import rng as crng
from .dynamics import DecayParams, SpinState, rotation_coefficients
from .recordio import MeasurementRecord
from .sequences import CpmgSpec, PulseSequence, ReferencePulse, RfDriveSpec
from .signals import (
    MultiToneDrive,
    ToneSpec,
    phase_step,
    relative_phase_at_shot,
    superpose,
    wrap_phase,
)

TWO_PI = 2.0 * math.pi
CHUNK = 1 << 16
PHASE_GRID = 512  # table resolution; exact for responses with < 256 harmonics
MAX_RF_PHASES = 64


@dataclass(frozen=True)
class ReadoutModel:
    """Stochastic photon readout: Poisson counts with a state-linear mean.

    Expected counts per shot are mean_photons * (1 + contrast * 2 <S_z>).
    mode "single_shot" instead records a projective 0/1 outcome
    (P(1) = <S_z> + 1/2), the idealized single-shot-readout alternative.
    """

    mean_photons: float = 0.1
    contrast: float = 0.3
    rng_seed: int = 0
    mode: str = "poisson"

    def __post_init__(self):
        if self.mean_photons < 0.0:
            raise ValueError("mean_photons must be non-negative")
        if not 0.0 <= self.contrast <= 1.0:
            raise ValueError("contrast must lie in [0, 1]")
        if self.mode not in ("poisson", "single_shot"):
            raise ValueError("mode must be 'poisson' or 'single_shot'")

    def mean_counts(self, sz):
        return self.mean_photons * (1.0 + self.contrast * 2.0 * np.asarray(sz))

    def sample(self, indices, sz) -> np.ndarray:
        if self.mode == "poisson":
            return crng.poisson_counts(self.rng_seed, indices, self.mean_counts(sz))
        return crng.bernoulli_outcomes(self.rng_seed, indices, np.asarray(sz) + 0.5)


def rotate_bloch(rx, ry, rz, hx, hy, hz, dt):
    """Rotate Bloch components about the field (hx, hy, hz) for time dt.

    Precession dr/dt = h x r; singularity-free Rodrigues form, vectorized
    over any broadcastable shape.
    """
    wx = np.asarray(hx) * dt
    wy = np.asarray(hy) * dt
    wz = np.asarray(hz) * dt
    theta = np.sqrt(wx**2 + wy**2 + wz**2)
    c = np.cos(theta)
    sin_over = np.sinc(theta / np.pi)  # sin(theta)/theta
    halfsinc = np.sinc(theta / (2.0 * np.pi))
    omc_over = 0.5 * halfsinc * halfsinc  # (1 - cos(theta))/theta^2
    cx = wy * rz - wz * ry
    cy = wz * rx - wx * rz
    cz = wx * ry - wy * rx
    dot = wx * rx + wy * ry + wz * rz
    return (
        rx * c + cx * sin_over + wx * dot * omc_over,
        ry * c + cy * sin_over + wy * dot * omc_over,
        rz * c + cz * sin_over + wz * dot * omc_over,
    )


def reference_state(pulse: ReferencePulse) -> SpinState:
    """State after the reference pulse acting on |0>."""
    half = 0.5 * pulse.angle
    return SpinState(math.cos(half), -1j * np.exp(1j * pulse.phase) * math.sin(half))


def _damp(rx, ry, rz, decay: Optional[DecayParams], t: float, transverse: str):
    if decay is None or not decay.enabled or t == 0.0:
        return rx, ry, rz
    t_perp = decay.t2_star if transverse == "t2_star" else decay.t1_rho
    f_perp = math.exp(-t / t_perp)
    f_long = math.exp(-t / decay.t1)
    return rx * f_perp, ry * f_perp, rz * f_long


# ---------------------------------------------------------------------------
# plain free-evolution protocol (direct strategy)
# ---------------------------------------------------------------------------

def plain_shot_response(
    tones,
    omega_s: float,
    sequence: PulseSequence,
    shot_indices,
    sampling_interval: float,
    decay: Optional[DecayParams] = None,
) -> np.ndarray:
    """True <S_z> after one plain-heterodyne shot, vectorized over shot indices.

    Works in the frame rotating at omega_s (the reference frame), where
    each tone is a transverse drive slowly rotating at its detuning.
    """
    sense = sequence.sense
    ref = sequence.reference
    init = reference_state(ref).bloch()
    n = np.asarray(shot_indices)
    if sense.duration == 0.0 or not sense.signals_active or not tones:
        rx, ry, rz = _damp(init[0], init[1], init[2], decay, sense.duration, "t2_star")
        return np.full(n.shape, 0.5 * rz)

    # per-tone relative phase at the start of the sensing window
    steps = [phase_step(t.frequency - omega_s, sampling_interval) for t in tones]
    thetas = [wrap_phase(t.initial_phase + n.astype(float) * s)
              for t, s in zip(tones, steps)]
    drive = MultiToneDrive(tones=tuple(tones), frame_frequency=omega_s,
                           shot_phases=tuple(thetas))
    rx = np.full(n.shape, init[0])
    ry = np.full(n.shape, init[1])
    rz = np.full(n.shape, init[2])
    dets = drive.detunings()
    if len(tones) == 1:
        # single tone: evolve in the tone's frame, where the Hamiltonian is
        # static (detuning omega_s - omega plus the drive at the shot phase).
        # <S_z> is invariant under the frame's z-rotation, so this is exact.
        tone = tones[0]
        hx = tone.rabi_amplitude * np.cos(thetas[0])
        hy = tone.rabi_amplitude * np.sin(thetas[0])
        rx, ry, rz = rotate_bloch(rx, ry, rz, hx, hy, dets[0], sense.duration)
        rx, ry, rz = _damp(rx, ry, rz, decay, sense.duration, "t2_star")
        return 0.5 * rz
    n_sub = drive.substep_count(sense.duration)
    dt = sense.duration / n_sub
    for j in range(n_sub):
        s_mid = (j + 0.5) * dt
        hx = 0.0
        hy = 0.0
        for tone, theta, det in zip(tones, thetas, dets):
            phase = theta - det * s_mid
            hx = hx + tone.rabi_amplitude * np.cos(phase)
            hy = hy + tone.rabi_amplitude * np.sin(phase)
        rx, ry, rz = rotate_bloch(rx, ry, rz, hx, hy, 0.0, dt)
    rx, ry, rz = _damp(rx, ry, rz, decay, sense.duration, "t2_star")
    return 0.5 * rz


# ---------------------------------------------------------------------------
# CPMG sensing block (tabulated strategy)
# ---------------------------------------------------------------------------

def cpmg_block_response(
    tone: ToneSpec,
    omega_s: float,
    cpmg: CpmgSpec,
    phases,
    ref: ReferencePulse,
    decay: Optional[DecayParams] = None,
    substeps_per_tau: int = 0,
    record_trace: bool = False,
):
    """<S_z> after the CPMG sensing block for signal phases ``phases``.

    phases are the tone's relative phase at the start of the block.
    Instantaneous pi-pulses along the cpmg phase convention axis toggle the
    sign of the accumulated transverse signal.  With ``record_trace`` the
    intra-block (times, bloch) trajectory is returned as well (single phase
    only), used for phase-pickup measurements.
    """
    phases = np.asarray(phases, dtype=float)
    det = omega_s - tone.frequency
    if substeps_per_tau <= 0:
        # resolve both the tone rotation and the drive angle within tau
        per_rotation = abs(det) * cpmg.tau / TWO_PI
        per_drive = tone.rabi_amplitude * cpmg.tau / TWO_PI
        substeps_per_tau = max(32, int(math.ceil(200.0 * max(per_rotation, per_drive))))
    dt = cpmg.tau / substeps_per_tau
    n_steps = cpmg.n_pulses * substeps_per_tau
    pulse_steps = {int(round(t / dt)) for t in cpmg.pulse_times()}

    init = reference_state(ref).bloch()
    rx = np.full(phases.shape, init[0])
    ry = np.full(phases.shape, init[1])
    rz = np.full(phases.shape, init[2])
    trace_t = []
    trace_r = []
    damp_perp = 1.0
    damp_long = 1.0
    if decay is not None and decay.enabled:
        damp_perp = math.exp(-dt / decay.t1_rho)
        damp_long = math.exp(-dt / decay.t1)
    for j in range(n_steps):
        if j in pulse_steps:
            if cpmg.pulse_phase_convention == "y":
                rx, rz = -rx, -rz
            else:
                ry, rz = -ry, -rz
        s_mid = (j + 0.5) * dt
        ang = phases - det * s_mid
        hx = tone.rabi_amplitude * np.cos(ang)
        hy = tone.rabi_amplitude * np.sin(ang)
        rx, ry, rz = rotate_bloch(rx, ry, rz, hx, hy, 0.0, dt)
        if damp_perp != 1.0:
            rx, ry, rz = rx * damp_perp, ry * damp_perp, rz * damp_long
        if record_trace:
            trace_t.append((j + 1) * dt)
            trace_r.append((float(rx[0]), float(ry[0]), float(rz[0])))
    if record_trace:
        return 0.5 * rz, (np.array(trace_t), np.array(trace_r))
    return 0.5 * rz


def echo_fidelity(cpmg: CpmgSpec, ref: ReferencePulse) -> float:
    """Fidelity of the zero-signal CPMG block against the initial state.

    With no signal the block reduces to the pi-pulse toggles alone; for an
    even pulse count the sequence is an identity on the reference state.
    """
    init = reference_state(ref).bloch()
    rx, ry, rz = init[0], init[1], init[2]
    for _ in range(cpmg.n_pulses):
        if cpmg.pulse_phase_convention == "y":
            rx, rz = -rx, -rz
        else:
            ry, rz = -ry, -rz
    dot = rx * init[0] + ry * init[1] + rz * init[2]
    return 0.5 * (1.0 + dot)


# ---------------------------------------------------------------------------
# Floquet (strong longitudinal RF) sensing block
# ---------------------------------------------------------------------------

def floquet_block_response(
    tone: ToneSpec,
    omega_s: float,
    rf: RfDriveSpec,
    sense_duration: float,
    phases,
    rf_phase: float,
    ref: ReferencePulse,
    decay: Optional[DecayParams] = None,
    dt_max: float = 0.0,
):
    """<S_z> after the RF-dressed sensing block, vectorized over signal phases.

    Frame rotating at omega_s; the longitudinal drive survives the frame
    transformation as (amplitude_rf/2) cos(omega_rf t + rf_phase) sigma_z,
    the signal is a transverse drive rotating at its detuning from omega_s.
    """
    phases = np.asarray(phases, dtype=float)
    det = tone.frequency - omega_s  # signal rotates at +det in this frame
    rates = [rf.omega_rf, rf.amplitude_rf, abs(det), tone.rabi_amplitude]
    fastest = max(r for r in rates if r > 0.0)
    dt = 0.05 / fastest  # at most 0.05 rad of the fastest rate per step
    if dt_max > 0.0:
        dt = min(dt, dt_max)
    n_steps = max(1, int(math.ceil(sense_duration / dt)))
    dt = sense_duration / n_steps
    init = reference_state(ref).bloch()
    rx = np.full(phases.shape, init[0])
    ry = np.full(phases.shape, init[1])
    rz = np.full(phases.shape, init[2])
    mids = (np.arange(n_steps) + 0.5) * dt
    hz_series = rf.amplitude_rf * np.cos(rf.omega_rf * mids + rf_phase)
    damp_perp = 1.0
    damp_long = 1.0
    if decay is not None and decay.enabled:
        damp_perp = math.exp(-dt / decay.t1_rho)
        damp_long = math.exp(-dt / decay.t1)
    for j in range(n_steps):
        ang = phases + det * mids[j]
        hx = tone.rabi_amplitude * np.cos(ang)
        hy = tone.rabi_amplitude * np.sin(ang)
        rx, ry, rz = rotate_bloch(rx, ry, rz, hx, hy, hz_series[j], dt)
        if damp_perp != 1.0:
            rx, ry, rz = rx * damp_perp, ry * damp_perp, rz * damp_long
    return 0.5 * rz


# ---------------------------------------------------------------------------
# tabulated evaluation
# ---------------------------------------------------------------------------

def periodic_interpolate(grid_values: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """Evaluate a function sampled on a uniform [0, 2pi) grid at arbitrary phases.

    Trigonometric interpolation through the rFFT coefficients; exact for
    2pi-periodic functions band-limited below N/2 harmonics.
    """
    n = grid_values.size
    coeff = np.fft.rfft(grid_values) / n
    z = np.exp(1j * np.asarray(phases, dtype=float))
    out = np.full(z.shape, coeff[0].real)
    zk = np.ones_like(z)
    for k in range(1, coeff.size):
        zk = zk * z
        if k == n // 2 and n % 2 == 0:
            out = out + (coeff[k] * zk).real
        else:
            out = out + 2.0 * (coeff[k] * zk).real
    return out


# ---------------------------------------------------------------------------
# series runner
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesConfig:
    """Everything needed to produce one measurement record."""

    protocol: str  # "plain" | "cpmg" | "floquet"
    omega_s: float
    tones: tuple
    sequence: PulseSequence
    sampling_interval: float
    shots: int
    seed: int
    readout: ReadoutModel
    decay: Optional[DecayParams] = None

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be at least 1")
        if self.sampling_interval < self.sequence.total_duration:
            raise ValueError(
                "sampling_interval must be at least the sequence duration"
            )
        if self.protocol not in ("plain", "cpmg", "floquet"):
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.protocol in ("cpmg", "floquet") and len(self.tones) != 1:
            raise ValueError(f"{self.protocol} protocol requires exactly one tone")


def _series_true_sz(cfg: SeriesConfig, indices: np.ndarray) -> np.ndarray:
    if cfg.protocol == "plain":
        return plain_shot_response(cfg.tones, cfg.omega_s, cfg.sequence,
                                   indices, cfg.sampling_interval, cfg.decay)
    tone = cfg.tones[0]
    ref = cfg.sequence.reference
    sense = cfg.sequence.sense
    phases = relative_phase_at_shot(tone, cfg.omega_s, indices, cfg.sampling_interval)
    grid = np.arange(PHASE_GRID) * (TWO_PI / PHASE_GRID)
    if cfg.protocol == "cpmg":
        table = cpmg_block_response(tone, cfg.omega_s, sense.cpmg, grid, ref, cfg.decay)
        return periodic_interpolate(table, phases)
    # floquet: one table row per programmed RF phase.  The per-shot step is
    # required to be a rational fraction p/q of 2pi (the hardware-realistic
    # case, e.g. 45 degrees); phases are then indexed exactly as n*p mod q,
    # avoiding floating-point drift at large shot numbers.
    rf = sense.rf
    frac = Fraction(rf.per_shot_phase_step / TWO_PI).limit_denominator(MAX_RF_PHASES)
    if abs(rf.per_shot_phase_step / TWO_PI - float(frac)) > 1e-9:
        raise ValueError(
            "per-shot RF phase step must be a fraction p/q of 2pi with "
            f"q <= {MAX_RF_PHASES}"
        )
    q = frac.denominator
    slots = (indices * (frac.numerator % q)) % q
    out = np.empty(indices.shape)
    for slot in range(q):
        mask = slots == slot
        if not mask.any():
            continue
        rf_phase = rf.phase + TWO_PI * slot / q
        table = floquet_block_response(tone, cfg.omega_s, rf, sense.duration,
                                       grid, rf_phase, ref, cfg.decay)
        out[mask] = periodic_interpolate(table, phases[mask])
    return out


def run_shot(cfg: SeriesConfig, shot_index: int):
    """(photon count, true <S_z>) of a single shot."""
    idx = np.array([shot_index])
    sz = _series_true_sz(cfg, idx)
    count = cfg.readout.sample(idx, sz)
    return int(count[0]), float(sz[0])


def run_series(cfg: SeriesConfig, threads: int = 1) -> MeasurementRecord:
    """Simulate the full shot series; deterministic given (config, seed).

    Shots are processed in fixed chunks of 2^16 indices; the thread count
    only distributes chunks across workers.
    """
    m = cfg.shots
    true_sz = np.empty(m)
    counts = np.empty(m, dtype=np.uint32)
    readout = ReadoutModel(cfg.readout.mean_photons, cfg.readout.contrast,
                           cfg.seed, cfg.readout.mode)

    if cfg.protocol != "plain":
        # tabulated strategy: table construction is shared, evaluation cheap
        indices = np.arange(m, dtype=np.int64)
        sz = _series_true_sz(cfg, indices)
        return MeasurementRecord(counts=readout.sample(indices, sz), true_sz=sz,
                                 sampling_interval=cfg.sampling_interval,
                                 seed=cfg.seed)

    spans = [(lo, min(lo + CHUNK, m)) for lo in range(0, m, CHUNK)]

    def work(span):
        lo, hi = span
        idx = np.arange(lo, hi, dtype=np.int64)
        sz = _series_true_sz(cfg, idx)
        true_sz[lo:hi] = sz
        counts[lo:hi] = readout.sample(idx, sz)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, spans))
    else:
        for span in spans:
            work(span)
    return MeasurementRecord(counts=counts, true_sz=true_sz,
                             sampling_interval=cfg.sampling_interval, seed=cfg.seed)


# ---------------------------------------------------------------------------
# scan drivers
# ---------------------------------------------------------------------------

def odmr_scan(
    probe_offsets,
    rf: Optional[RfDriveSpec],
    probe_duration: float,
    probe_amplitude: float,
    dt_max: float = 0.0,
) -> np.ndarray:
    """Population transferred out of |0> vs probe frequency offset from omega_s.

    Simultaneous strong RF dressing (if given) and a weak transverse probe,
    starting from the laser-initialized |0>; deterministic (no photon
    sampling).
    """
    offsets = np.asarray(probe_offsets, dtype=float)
    if offsets.ndim != 1 or np.any(np.diff(offsets) < 0.0):
        raise ValueError("probe_offsets must be a sorted 1-d grid")
    rates = [probe_amplitude, float(np.abs(offsets).max())]
    if rf is not None:
        rates += [rf.omega_rf, rf.amplitude_rf]
    fastest = max(r for r in rates if r > 0.0)
    dt = 0.05 / fastest
    if dt_max > 0.0:
        dt = min(dt, dt_max)
    n_steps = max(1, int(math.ceil(probe_duration / dt)))
    dt = probe_duration / n_steps
    rx = np.zeros(offsets.shape)
    ry = np.zeros(offsets.shape)
    rz = np.ones(offsets.shape)
    mids = (np.arange(n_steps) + 0.5) * dt
    if rf is not None:
        hz_series = rf.amplitude_rf * np.cos(rf.omega_rf * mids + rf.phase)
    else:
        hz_series = np.zeros(n_steps)
    for j in range(n_steps):
        ang = offsets * mids[j]
        hx = probe_amplitude * np.cos(ang)
        hy = probe_amplitude * np.sin(ang)
        rx, ry, rz = rotate_bloch(rx, ry, rz, hx, hy, hz_series[j], dt)
    return 0.5 * (1.0 - rz)  # population transferred out of |0>


def rabi_scan(
    durations,
    sideband: int,
    rf: RfDriveSpec,
    probe_amplitude: float,
    dt_max: float = 0.0,
):
    """|{-1}> population vs probe duration, probe resonant with one sideband.

    RF-resolved integration (no Bessel approximation); returns populations
    sampled at the requested durations.
    """
    durations = np.asarray(durations, dtype=float)
    if np.any(durations < 0.0):
        raise ValueError("durations must be non-negative")
    det = sideband * rf.omega_rf  # probe offset from omega_s
    rates = [rf.omega_rf, rf.amplitude_rf, abs(det), probe_amplitude]
    fastest = max(r for r in rates if r > 0.0)
    dt = 0.05 / fastest
    if dt_max > 0.0:
        dt = min(dt, dt_max)
    t_max = float(durations.max())
    n_steps = max(1, int(math.ceil(t_max / dt)))
    dt = t_max / n_steps
    rx, ry, rz = 0.0, 0.0, 1.0
    pops = np.empty(n_steps + 1)
    pops[0] = 0.0
    mids = (np.arange(n_steps) + 0.5) * dt
    hz_series = rf.amplitude_rf * np.cos(rf.omega_rf * mids + rf.phase)
    for j in range(n_steps):
        ang = det * mids[j]
        hx = probe_amplitude * math.cos(ang)
        hy = probe_amplitude * math.sin(ang)
        rx, ry, rz = rotate_bloch(rx, ry, rz, hx, hy, hz_series[j], dt)
        pops[j + 1] = 0.5 * (1.0 - rz)
    times = np.arange(n_steps + 1) * dt
    return np.interp(durations, times, pops)


def phase_sweep(
    phi_grid,
    tone: ToneSpec,
    omega_s: float,
    rf: RfDriveSpec,
    sense_duration: float,
    ref: ReferencePulse,
    readout: Optional[ReadoutModel] = None,
    shots_per_point: int = 0,
    decay: Optional[DecayParams] = None,
):
    """Sensor response vs the signal's initial phase in the Floquet block.

    Returns the noise-free <S_z> response; if a readout model and
    shots_per_point are given, additionally returns the mean photon counts
    per phase point sampled through the counter-based streams.
    """
    phi_grid = np.asarray(phi_grid, dtype=float)
    response = floquet_block_response(tone, omega_s, rf, sense_duration,
                                      phi_grid, rf.phase, ref, decay)
    if readout is None or shots_per_point <= 0:
        return response
    means = np.empty(phi_grid.shape)
    for i, sz in enumerate(response):
        idx = np.arange(shots_per_point, dtype=np.int64) + i * shots_per_point
        means[i] = readout.sample(idx, np.full(shots_per_point, sz)).mean()
    return response, means
