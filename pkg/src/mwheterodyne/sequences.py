"""Per-shot pulse programs for the three heterodyne protocols.

A shot is an ordered segment list: laser initialization, a reference pulse
that recreates the phase-defined superposition, exactly one sensing block
(optionally carrying a CPMG pulse train or a strong RF dressing drive),
and optical readout.  Builders are pure and the sequences immutable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

from .signals import ReferenceSpec


@dataclass(frozen=True)
class CpmgSpec:
    """CPMG pulse train: n_pulses pi-pulses spaced tau apart (tau/2 edges).

    The train creates detection sidebands at Omega = pi / tau; total
    sensing time is n_pulses * tau.  Pulses are along y relative to the
    initial (pi/2)_x reference pulse (standard CPMG phase convention).
    """

    tau: float
    n_pulses: int
    pulse_phase_convention: str = "y"

    def __post_init__(self):
        if self.tau <= 0.0:
            raise ValueError("tau must be positive")
        if self.n_pulses < 1:
            raise ValueError("n_pulses must be at least 1")
        if self.pulse_phase_convention not in ("y", "x"):
            raise ValueError("pulse_phase_convention must be 'y' or 'x'")

    @property
    def sideband_frequency(self) -> float:
        """Mollow sideband offset Omega = pi / tau in rad/s."""
        return math.pi / self.tau

    @property
    def total_sensing_time(self) -> float:
        return self.n_pulses * self.tau

    def pulse_times(self):
        """Pi-pulse instants within the sensing window (tau/2, 3tau/2, ...)."""
        return [(k + 0.5) * self.tau for k in range(self.n_pulses)]


@dataclass(frozen=True)
class RfDriveSpec:
    """Strong longitudinal RF drive applied during sensing.

    The per-shot phase of the RF waveform is phase + n * per_shot_phase_step
    (the waveform restarts each shot with the programmed phase).
    """

    omega_rf: float
    amplitude_rf: float
    phase: float = 0.0
    per_shot_phase_step: float = 0.0

    def __post_init__(self):
        if self.omega_rf <= 0.0:
            raise ValueError("omega_rf must be positive")
        if self.amplitude_rf < 0.0:
            raise ValueError("amplitude_rf must be non-negative")

    @property
    def strong_drive(self) -> bool:
        """Strong-driving regime flag Omega_rf >= omega_rf."""
        return self.amplitude_rf >= self.omega_rf

    def phase_at_shot(self, n: int) -> float:
        return self.phase + n * self.per_shot_phase_step


@dataclass(frozen=True)
class LaserInit:
    duration: float = 0.0


@dataclass(frozen=True)
class ReferencePulse:
    angle: float
    phase: float = 0.0
    duration: float = 0.0  # 0 means idealized instantaneous rotation


@dataclass(frozen=True)
class Sense:
    duration: float
    signals_active: bool = True
    cpmg: Optional[CpmgSpec] = None
    rf: Optional[RfDriveSpec] = None


@dataclass(frozen=True)
class Readout:
    duration: float = 0.0


_SEGMENT_NAMES = {LaserInit: "laser_init", ReferencePulse: "reference_pulse",
                  Sense: "sense", Readout: "readout"}


@dataclass(frozen=True)
class PulseSequence:
    """Validated, immutable segment list describing one shot."""

    segments: tuple

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs or not isinstance(segs[0], LaserInit):
            raise ValueError("sequence must start with LaserInit")
        if not isinstance(segs[-1], Readout):
            raise ValueError("sequence must end with Readout")
        n_sense = sum(isinstance(s, Sense) for s in segs)
        if n_sense != 1:
            raise ValueError(f"sequence must contain exactly one Sense segment, got {n_sense}")

    @property
    def sense(self) -> Sense:
        return next(s for s in self.segments if isinstance(s, Sense))

    @property
    def reference(self) -> Optional[ReferencePulse]:
        for s in self.segments:
            if isinstance(s, ReferencePulse):
                return s
        return None

    @property
    def total_duration(self) -> float:
        total = 0.0
        for s in self.segments:
            if isinstance(s, Sense):
                total += s.duration
            else:
                total += s.duration
        return total

    def sampling_interval(self, dead_time: float = 0.0) -> float:
        """Shot clock T = segment durations + configured dead time."""
        if dead_time < 0.0:
            raise ValueError("dead_time must be non-negative")
        return self.total_duration + dead_time

    def timeline(self) -> list:
        """[(name, start, duration, details)] for every segment."""
        rows = []
        t = 0.0
        for s in self.segments:
            name = _SEGMENT_NAMES[type(s)]
            details = {}
            if isinstance(s, ReferencePulse):
                details = {"angle_rad": s.angle, "phase_rad": s.phase}
            elif isinstance(s, Sense):
                details = {"signals_active": s.signals_active}
                if s.cpmg is not None:
                    details["cpmg"] = {
                        "tau_s": s.cpmg.tau,
                        "n_pulses": s.cpmg.n_pulses,
                        "sideband_rad_s": s.cpmg.sideband_frequency,
                    }
                if s.rf is not None:
                    details["rf"] = {
                        "omega_rf_rad_s": s.rf.omega_rf,
                        "amplitude_rf_rad_s": s.rf.amplitude_rf,
                        "per_shot_phase_step_rad": s.rf.per_shot_phase_step,
                    }
            rows.append((name, t, s.duration, details))
            t += s.duration
        return rows

    def describe(self, as_json: bool = False) -> str:
        rows = self.timeline()
        if as_json:
            return json.dumps(
                [
                    {"segment": n, "start_s": t0, "duration_s": d, **det}
                    for n, t0, d, det in rows
                ],
                indent=2,
            )
        lines = [f"{'segment':<16} {'start':>12} {'duration':>12}"]
        for n, t0, d, det in rows:
            extra = " ".join(f"{k}={v}" for k, v in det.items())
            lines.append(f"{n:<16} {t0:>12.4e} {d:>12.4e} {extra}")
        lines.append(f"{'total':<16} {'':>12} {self.total_duration:>12.4e}")
        return "\n".join(lines)


def build_plain_heterodyne(
    sense_duration: float,
    ref: ReferenceSpec,
    laser_duration: float = 0.0,
    readout_duration: float = 0.0,
) -> PulseSequence:
    """[LaserInit, (pi/2) reference pulse, Sense, Readout] for free-evolution heterodyne."""
    if sense_duration < 0.0:
        raise ValueError("sense_duration must be non-negative")
    return PulseSequence((
        LaserInit(laser_duration),
        ReferencePulse(angle=math.pi / 2.0, phase=ref.phase, duration=ref.pi_half_duration),
        Sense(duration=sense_duration, signals_active=sense_duration > 0.0),
        Readout(readout_duration),
    ))


def build_cpmg_heterodyne(
    cpmg: CpmgSpec,
    ref: ReferenceSpec,
    laser_duration: float = 0.0,
    readout_duration: float = 0.0,
) -> PulseSequence:
    """Heterodyne shot whose sensing block carries a CPMG pi-pulse train."""
    return PulseSequence((
        LaserInit(laser_duration),
        ReferencePulse(angle=math.pi / 2.0, phase=ref.phase, duration=ref.pi_half_duration),
        Sense(duration=cpmg.total_sensing_time, signals_active=True, cpmg=cpmg),
        Readout(readout_duration),
    ))


def build_floquet_heterodyne(
    rf: RfDriveSpec,
    sense_duration: float,
    ref: ReferenceSpec,
    laser_duration: float = 0.0,
    readout_duration: float = 0.0,
) -> PulseSequence:
    """Heterodyne shot with the strong RF dressing drive on during sensing."""
    if sense_duration <= 0.0:
        raise ValueError("sense_duration must be positive")
    return PulseSequence((
        LaserInit(laser_duration),
        ReferencePulse(angle=math.pi / 2.0, phase=ref.phase, duration=ref.pi_half_duration),
        Sense(duration=sense_duration, signals_active=True, rf=rf),
        Readout(readout_duration),
    ))
