"""JSON run configuration.

All dimensioned keys carry a unit suffix (``_hz``, ``_s``, ``_rad``);
frequencies and Rabi rates are given in Hz and converted to angular rates
at load time.  Unknown keys are rejected and every error message names the
offending key by its dotted path, so a typo like ``tones[0].rabi_mhz``
fails loudly instead of silently using a default.

Protocols fall into two families: record producers (``plain``, ``cpmg``,
``floquet``) resolve to a :class:`~.experiment.SeriesConfig`, scan drivers
(``odmr``, ``rabi``, ``phase_sweep``) resolve to a scan description
consumed by the CLI ``scan`` subcommand.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

from .dynamics import DecayParams
from .experiment import ReadoutModel, SeriesConfig
from .sequences import (
    CpmgSpec,
    RfDriveSpec,
    build_cpmg_heterodyne,
    build_floquet_heterodyne,
    build_plain_heterodyne,
)
from .signals import ReferenceSpec, ToneSpec

SCHEMA_VERSION = 1
TWO_PI = 2.0 * math.pi

SERIES_PROTOCOLS = ("plain", "cpmg", "floquet")
SCAN_PROTOCOLS = ("odmr", "rabi", "phase_sweep")


class ConfigError(ValueError):
    """Malformed run configuration; the message carries the dotted key path."""


class _Section:
    """One mapping level of the config with path-aware typed accessors."""

    def __init__(self, data: dict, path: str):
        if not isinstance(data, dict):
            raise ConfigError(f"{path or '<root>'}: expected an object")
        self._data = dict(data)
        self._path = path
        self._seen = set()

    def _sub(self, key: str) -> str:
        return f"{self._path}.{key}" if self._path else key

    def get(self, key: str, kind, required: bool = True, default=None):
        self._seen.add(key)
        if key not in self._data:
            if required:
                raise ConfigError(f"missing required key {self._sub(key)}")
            return default
        val = self._data[key]
        if kind is float:
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ConfigError(f"{self._sub(key)}: expected a number, got {val!r}")
            return float(val)
        if kind is int:
            if isinstance(val, bool) or not isinstance(val, int):
                raise ConfigError(f"{self._sub(key)}: expected an integer, got {val!r}")
            return val
        if kind is bool:
            if not isinstance(val, bool):
                raise ConfigError(f"{self._sub(key)}: expected a boolean, got {val!r}")
            return val
        if kind is str:
            if not isinstance(val, str):
                raise ConfigError(f"{self._sub(key)}: expected a string, got {val!r}")
            return val
        raise AssertionError(kind)

    def int_list(self, key: str, required: bool = True, default=()):
        self._seen.add(key)
        if key not in self._data:
            if required:
                raise ConfigError(f"missing required key {self._sub(key)}")
            return list(default)
        val = self._data[key]
        ok = isinstance(val, list) and all(
            isinstance(v, int) and not isinstance(v, bool) for v in val
        )
        if not ok:
            raise ConfigError(f"{self._sub(key)}: expected a list of integers")
        return list(val)

    def section(self, key: str, required: bool = True) -> Optional["_Section"]:
        self._seen.add(key)
        if key not in self._data:
            if required:
                raise ConfigError(f"missing required section {self._sub(key)}")
            return None
        return _Section(self._data[key], self._sub(key))

    def sections(self, key: str) -> list:
        self._seen.add(key)
        if key not in self._data:
            raise ConfigError(f"missing required list {self._sub(key)}")
        val = self._data[key]
        if not isinstance(val, list) or not val:
            raise ConfigError(f"{self._sub(key)}: expected a non-empty list")
        return [_Section(v, f"{self._sub(key)}[{i}]") for i, v in enumerate(val)]

    def finish(self) -> None:
        extra = sorted(set(self._data) - self._seen)
        if extra:
            raise ConfigError(
                f"unknown key {self._sub(extra[0])}"
                + (f" (and {len(extra) - 1} more)" if len(extra) > 1 else "")
            )


@dataclass(frozen=True)
class OdmrScan:
    omega_s: float
    rf: Optional[RfDriveSpec]
    offset_min: float  # rad/s relative to omega_s
    offset_max: float
    points: int
    probe_duration: float
    probe_amplitude: float


@dataclass(frozen=True)
class RabiScan:
    omega_s: float
    rf: RfDriveSpec
    sidebands: tuple
    duration_max: float
    points: int
    probe_amplitude: float


@dataclass(frozen=True)
class PhaseSweepScan:
    omega_s: float
    rf: RfDriveSpec
    tone: ToneSpec
    sense_duration: float
    reference: ReferenceSpec
    points: int
    shots_per_point: int
    readout: Optional[ReadoutModel]
    seed: int


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run: either a shot series or a scan, plus bookkeeping."""

    protocol: str
    series: Optional[SeriesConfig] = None
    scan: object = None
    reference: Optional[ReferenceSpec] = None
    label: str = ""


def _decay(sec: Optional[_Section]) -> Optional[DecayParams]:
    if sec is None:
        return None
    enabled = sec.get("enabled", bool, required=False, default=True)
    d = DecayParams(
        t1=sec.get("t1_s", float),
        t2_star=sec.get("t2_star_s", float),
        t2=sec.get("t2_s", float),
        t1_rho=sec.get("t1_rho_s", float),
        enabled=enabled,
    )
    sec.finish()
    return d


def _tone(sec: _Section) -> ToneSpec:
    t = ToneSpec(
        rabi_amplitude=TWO_PI * sec.get("rabi_hz", float),
        frequency=TWO_PI * sec.get("frequency_hz", float),
        initial_phase=sec.get("phase_rad", float, required=False, default=0.0),
    )
    sec.finish()
    return t


def _rf(sec: _Section) -> RfDriveSpec:
    rf = RfDriveSpec(
        omega_rf=TWO_PI * sec.get("frequency_hz", float),
        amplitude_rf=TWO_PI * sec.get("amplitude_hz", float),
        phase=sec.get("phase_rad", float, required=False, default=0.0),
        per_shot_phase_step=sec.get("per_shot_phase_step_rad", float,
                                    required=False, default=0.0),
    )
    sec.finish()
    return rf


def _reference(sec: _Section) -> ReferenceSpec:
    ref = ReferenceSpec(
        frequency=TWO_PI * sec.get("frequency_hz", float),
        phase=sec.get("phase_rad", float, required=False, default=0.0),
        pi_half_duration=sec.get("pi_half_duration_s", float,
                                 required=False, default=0.0),
    )
    sec.finish()
    return ref


def _readout(sec: Optional[_Section]) -> ReadoutModel:
    if sec is None:
        return ReadoutModel()
    model = ReadoutModel(
        mean_photons=sec.get("mean_photons", float, required=False, default=0.1),
        contrast=sec.get("contrast", float, required=False, default=0.3),
        mode=sec.get("mode", str, required=False, default="poisson"),
    )
    sec.finish()
    return model


def _parse_series(root: _Section, protocol: str, label: str,
                  omega_s: float, decay) -> RunConfig:
    ref = _reference(root.section("reference"))
    tones = tuple(_tone(s) for s in root.sections("tones"))

    seqsec = root.section("sequence")
    laser = seqsec.get("laser_duration_s", float, required=False, default=0.0)
    readout_dur = seqsec.get("readout_duration_s", float, required=False, default=0.0)
    dead = seqsec.get("dead_time_s", float, required=False, default=0.0)
    cpmg_sec = seqsec.section("cpmg", required=False)
    rf_sec = seqsec.section("rf", required=False)
    if protocol == "cpmg":
        if cpmg_sec is None:
            raise ConfigError("sequence.cpmg: required for the cpmg protocol")
        cpmg = CpmgSpec(
            tau=cpmg_sec.get("tau_s", float),
            n_pulses=cpmg_sec.get("n_pulses", int),
            pulse_phase_convention=cpmg_sec.get("pulse_phase_convention", str,
                                                required=False, default="y"),
        )
        cpmg_sec.finish()
        sequence = build_cpmg_heterodyne(cpmg, ref, laser, readout_dur)
    elif protocol == "floquet":
        if rf_sec is None:
            raise ConfigError("sequence.rf: required for the floquet protocol")
        rf = _rf(rf_sec)
        sense = seqsec.get("sense_duration_s", float)
        sequence = build_floquet_heterodyne(rf, sense, ref, laser, readout_dur)
    else:
        if cpmg_sec is not None or rf_sec is not None:
            raise ConfigError(
                "sequence.cpmg/sequence.rf: not allowed for the plain protocol"
            )
        sense = seqsec.get("sense_duration_s", float)
        sequence = build_plain_heterodyne(sense, ref, laser, readout_dur)
    seqsec.finish()

    runsec = root.section("run")
    shots = runsec.get("shots", int)
    seed = runsec.get("seed", int, required=False, default=0)
    interval = runsec.get("sampling_interval_s", float, required=False, default=0.0)
    runsec.finish()
    if interval == 0.0:
        interval = sequence.sampling_interval(dead)
    elif dead != 0.0:
        raise ConfigError(
            "run.sampling_interval_s and sequence.dead_time_s are exclusive"
        )

    readout = _readout(root.section("readout", required=False))
    root.finish()
    try:
        series = SeriesConfig(
            protocol=protocol, omega_s=omega_s, tones=tones, sequence=sequence,
            sampling_interval=interval, shots=shots, seed=seed,
            readout=readout, decay=decay,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(protocol=protocol, series=series, reference=ref, label=label)


def _parse_scan(root: _Section, protocol: str, label: str,
                omega_s: float) -> RunConfig:
    seqsec = root.section("sequence", required=False)
    rf = None
    sense = 0.0
    if seqsec is not None:
        rf_sec = seqsec.section("rf", required=False)
        rf = _rf(rf_sec) if rf_sec is not None else None
        sense = seqsec.get("sense_duration_s", float, required=False, default=0.0)
        seqsec.finish()
    scansec = root.section("scan")
    if protocol == "odmr":
        scan = OdmrScan(
            omega_s=omega_s,
            rf=rf,
            offset_min=TWO_PI * scansec.get("offset_min_hz", float),
            offset_max=TWO_PI * scansec.get("offset_max_hz", float),
            points=scansec.get("points", int),
            probe_duration=scansec.get("probe_duration_s", float),
            probe_amplitude=TWO_PI * scansec.get("probe_rabi_hz", float),
        )
        scansec.finish()
        root.finish()
        return RunConfig(protocol=protocol, scan=scan, label=label)
    if protocol == "rabi":
        if rf is None:
            raise ConfigError("sequence.rf: required for the rabi protocol")
        scan = RabiScan(
            omega_s=omega_s,
            rf=rf,
            sidebands=tuple(scansec.int_list("sidebands")),
            duration_max=scansec.get("duration_max_s", float),
            points=scansec.get("points", int),
            probe_amplitude=TWO_PI * scansec.get("probe_rabi_hz", float),
        )
        scansec.finish()
        root.finish()
        return RunConfig(protocol=protocol, scan=scan, label=label)
    # phase_sweep
    if rf is None:
        raise ConfigError("sequence.rf: required for the phase_sweep protocol")
    if sense <= 0.0:
        raise ConfigError("sequence.sense_duration_s: required for phase_sweep")
    ref = _reference(root.section("reference"))
    tones = tuple(_tone(s) for s in root.sections("tones"))
    if len(tones) != 1:
        raise ConfigError("tones: phase_sweep requires exactly one tone")
    shots_per_point = scansec.get("shots_per_point", int, required=False, default=0)
    scan = PhaseSweepScan(
        omega_s=omega_s,
        rf=rf,
        tone=tones[0],
        sense_duration=sense,
        reference=ref,
        points=scansec.get("points", int),
        shots_per_point=shots_per_point,
        readout=_readout(root.section("readout", required=False))
        if shots_per_point > 0 else None,
        seed=scansec.get("seed", int, required=False, default=0),
    )
    scansec.finish()
    root.finish()
    return RunConfig(protocol=protocol, scan=scan, reference=ref, label=label)


def parse_config(data: dict) -> RunConfig:
    """Validate a parsed JSON object and resolve it into a RunConfig."""
    root = _Section(data, "")
    version = root.get("schema_version", int)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version: unsupported version {version} (expected {SCHEMA_VERSION})"
        )
    label = root.get("label", str, required=False, default="")
    protocol = root.get("protocol", str)
    if protocol not in SERIES_PROTOCOLS + SCAN_PROTOCOLS:
        raise ConfigError(
            f"protocol: must be one of {SERIES_PROTOCOLS + SCAN_PROTOCOLS}, "
            f"got {protocol!r}"
        )
    sensor = root.section("sensor")
    omega_s = TWO_PI * sensor.get("splitting_hz", float)
    decay = _decay(sensor.section("decay", required=False))
    sensor.finish()
    if protocol in SERIES_PROTOCOLS:
        return _parse_series(root, protocol, label, omega_s, decay)
    if decay is not None and decay.enabled:
        raise ConfigError("sensor.decay: not supported for scan protocols")
    return _parse_scan(root, protocol, label, omega_s)


def load_config(path) -> RunConfig:
    """Read, parse and validate a JSON run-configuration file."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(data)
