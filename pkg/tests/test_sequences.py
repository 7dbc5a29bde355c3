"""Pulse-sequence construction and validation."""

import json
import math

import pytest

from mwheterodyne.sequences import (
    CpmgSpec,
    LaserInit,
    PulseSequence,
    Readout,
    ReferencePulse,
    RfDriveSpec,
    Sense,
    build_cpmg_heterodyne,
    build_floquet_heterodyne,
    build_plain_heterodyne,
)
from mwheterodyne.signals import ReferenceSpec

TWO_PI = 2.0 * math.pi


class TestCpmgSpec:
    def test_sideband_frequency(self):
        cp = CpmgSpec(tau=6.8e-6, n_pulses=10)
        assert cp.sideband_frequency == pytest.approx(math.pi / 6.8e-6)
        assert cp.total_sensing_time == pytest.approx(68e-6)

    def test_pulse_times_centered(self):
        cp = CpmgSpec(tau=2.0, n_pulses=3)
        assert cp.pulse_times() == [1.0, 3.0, 5.0]

    def test_validation(self):
        with pytest.raises(ValueError):
            CpmgSpec(tau=0.0, n_pulses=1)
        with pytest.raises(ValueError):
            CpmgSpec(tau=1.0, n_pulses=0)
        with pytest.raises(ValueError):
            CpmgSpec(tau=1.0, n_pulses=1, pulse_phase_convention="q")


class TestRfDriveSpec:
    def test_strong_drive_flag(self):
        assert RfDriveSpec(omega_rf=1.0, amplitude_rf=1.72).strong_drive
        assert not RfDriveSpec(omega_rf=1.0, amplitude_rf=0.5).strong_drive

    def test_phase_stepping(self):
        rf = RfDriveSpec(omega_rf=1.0, amplitude_rf=1.0, phase=0.1,
                         per_shot_phase_step=math.pi / 4.0)
        assert rf.phase_at_shot(8) == pytest.approx(0.1 + TWO_PI)


class TestPulseSequence:
    def test_must_start_with_laser(self):
        with pytest.raises(ValueError):
            PulseSequence((Sense(1.0), Readout()))

    def test_must_end_with_readout(self):
        with pytest.raises(ValueError):
            PulseSequence((LaserInit(), Sense(1.0)))

    def test_exactly_one_sense(self):
        with pytest.raises(ValueError):
            PulseSequence((LaserInit(), Sense(1.0), Sense(2.0), Readout()))

    def test_sampling_interval_adds_dead_time(self):
        seq = build_plain_heterodyne(1e-6, ReferenceSpec(frequency=1.0))
        assert seq.sampling_interval(0.824e-6) == pytest.approx(1.824e-6)
        with pytest.raises(ValueError):
            seq.sampling_interval(-1.0)

    def test_timeline_and_describe(self):
        cp = CpmgSpec(tau=6.8e-6, n_pulses=10)
        seq = build_cpmg_heterodyne(cp, ReferenceSpec(frequency=1.0))
        rows = seq.timeline()
        names = [r[0] for r in rows]
        assert names == ["laser_init", "reference_pulse", "sense", "readout"]
        text = seq.describe()
        assert "sense" in text
        data = json.loads(seq.describe(as_json=True))
        assert data[2]["segment"] == "sense"
        assert data[2]["cpmg"]["n_pulses"] == 10


class TestBuilders:
    def test_plain_layout(self):
        ref = ReferenceSpec(frequency=1.0, phase=0.3)
        seq = build_plain_heterodyne(34.2e-9, ref)
        assert isinstance(seq.segments[1], ReferencePulse)
        assert seq.segments[1].angle == pytest.approx(math.pi / 2.0)
        assert seq.segments[1].phase == pytest.approx(0.3)
        assert seq.sense.duration == pytest.approx(34.2e-9)
        assert seq.sense.signals_active

    def test_cpmg_sense_duration_derived(self):
        cp = CpmgSpec(tau=6.8e-6, n_pulses=10)
        seq = build_cpmg_heterodyne(cp, ReferenceSpec(frequency=1.0))
        assert seq.sense.duration == pytest.approx(68e-6)
        assert seq.sense.cpmg is cp

    def test_floquet_carries_rf(self):
        rf = RfDriveSpec(omega_rf=TWO_PI * 1.45e6, amplitude_rf=TWO_PI * 2.5e6)
        seq = build_floquet_heterodyne(rf, 8e-6, ReferenceSpec(frequency=1.0))
        assert seq.sense.rf is rf
        with pytest.raises(ValueError):
            build_floquet_heterodyne(rf, 0.0, ReferenceSpec(frequency=1.0))
