"""End-to-end command-line workflows on small configurations."""

import json
import math
import os

import numpy as np
import pytest

from mwheterodyne.cli import main
from mwheterodyne.recordio import MeasurementRecord


@pytest.fixture
def small_config(tmp_path):
    data = {
        "schema_version": 1,
        "protocol": "plain",
        "label": "smoke",
        "sensor": {"splitting_hz": 4.1394e9},
        "reference": {"frequency_hz": 4.1394e9},
        "tones": [{"rabi_hz": 3.6e6, "frequency_hz": 4.1394e9 - 50138.0}],
        "sequence": {"sense_duration_s": 34.2e-9, "dead_time_s": 1.7898e-6},
        "run": {"shots": 16384, "seed": 11},
        "readout": {"mean_photons": 0.5, "contrast": 0.3},
    }
    path = tmp_path / "smoke.json"
    path.write_text(json.dumps(data))
    return path


class TestSimulate:
    def test_writes_record(self, small_config, tmp_path, capsys):
        out = tmp_path / "out"
        rc = main(["simulate", "--config", str(small_config),
                   "--out-dir", str(out), "--csv"])
        assert rc == 0
        rec = MeasurementRecord.load(out / "smoke.rec")
        assert rec.shot_count == 16384
        assert (out / "smoke.csv").exists()
        text = capsys.readouterr().out
        assert "shots: 16384" in text

    def test_seed_override_changes_counts(self, small_config, tmp_path):
        main(["simulate", "--config", str(small_config), "--out-dir",
              str(tmp_path / "a")])
        main(["simulate", "--config", str(small_config), "--seed", "999",
              "--out-dir", str(tmp_path / "b")])
        a = MeasurementRecord.load(tmp_path / "a" / "smoke.rec")
        b = MeasurementRecord.load(tmp_path / "b" / "smoke.rec")
        assert not np.array_equal(a.counts, b.counts)
        assert np.array_equal(a.true_sz, b.true_sz)  # same physics

    def test_byte_identical_across_threads(self, small_config, tmp_path):
        for threads, name in ((1, "t1"), (4, "t4")):
            main(["simulate", "--config", str(small_config),
                  "--threads", str(threads), "--out-dir",
                  str(tmp_path / name)])
        assert (tmp_path / "t1" / "smoke.rec").read_bytes() == \
            (tmp_path / "t4" / "smoke.rec").read_bytes()

    def test_scan_config_rejected(self, tmp_path, capsys):
        data = {
            "schema_version": 1, "protocol": "odmr",
            "sensor": {"splitting_hz": 4.1394e9},
            "scan": {"offset_min_hz": -1e6, "offset_max_hz": 1e6,
                     "points": 11, "probe_duration_s": 1e-5,
                     "probe_rabi_hz": 5e4},
        }
        p = tmp_path / "scan.json"
        p.write_text(json.dumps(data))
        assert main(["simulate", "--config", str(p)]) == 2

    def test_bad_config_exit_code(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"schema_version": 1}')
        assert main(["simulate", "--config", str(p)]) == 2

    def test_missing_config_exit_code(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "nope.json")]) == 3


class TestAnalyze:
    def test_round_trip_finds_tone(self, small_config, tmp_path, capsys):
        out = tmp_path / "out"
        main(["simulate", "--config", str(small_config), "--out-dir", str(out)])
        capsys.readouterr()
        rc = main(["analyze", str(out / "smoke.rec"), "--out-dir", str(out),
                   "--peaks", "1", "--oracle-brute-force"])
        assert rc == 0
        text = capsys.readouterr().out
        assert "brute-force correlation check" in text
        line = next(ln for ln in text.splitlines() if ln.startswith("peak:"))
        freq = float(line.split()[1])
        # 16384 shots -> resolution ~33 Hz at the half-record correlation
        assert freq == pytest.approx(50138.0, abs=100.0)
        assert (out / "smoke_corr.csv").exists()
        assert (out / "smoke_spectrum.csv").exists()
        assert (out / "smoke_peaks.csv").exists()

    def test_true_sz_channel_and_lengths(self, small_config, tmp_path, capsys):
        out = tmp_path / "out"
        main(["simulate", "--config", str(small_config), "--out-dir", str(out)])
        capsys.readouterr()
        rc = main(["analyze", str(out / "smoke.rec"), "--out-dir", str(out),
                   "--channel", "true-sz", "--lengths", "1024,2048,4096,8192"])
        assert rc == 0
        text = capsys.readouterr().out
        assert "log-log slope:" in text
        slope = float(text.split("log-log slope:")[1].split()[0])
        assert slope == pytest.approx(-1.0, abs=0.1)
        assert (out / "smoke_scaling.csv").exists()

    def test_svg_outputs(self, small_config, tmp_path):
        out = tmp_path / "out"
        main(["simulate", "--config", str(small_config), "--out-dir", str(out)])
        rc = main(["analyze", str(out / "smoke.rec"), "--out-dir", str(out),
                   "--svg", "--lengths", "1024,4096"])
        assert rc == 0
        assert (out / "smoke_spectrum.svg").exists()
        assert (out / "smoke_scaling.svg").exists()

    def test_malformed_record_exit_code(self, tmp_path):
        p = tmp_path / "junk.rec"
        p.write_bytes(b"definitely not a record")
        assert main(["analyze", str(p)]) == 4

    def test_missing_record_exit_code(self, tmp_path):
        assert main(["analyze", str(tmp_path / "nope.rec")]) == 3


class TestScan:
    def _write(self, tmp_path, data):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(data))
        return p

    def test_odmr(self, tmp_path, capsys):
        p = self._write(tmp_path, {
            "schema_version": 1, "protocol": "odmr", "label": "odmr",
            "sensor": {"splitting_hz": 4.1394e9},
            "sequence": {"rf": {"frequency_hz": 1.45e6,
                                "amplitude_hz": 2.494e6}},
            "scan": {"offset_min_hz": -4e6, "offset_max_hz": 4e6,
                     "points": 201, "probe_duration_s": 1e-5,
                     "probe_rabi_hz": 5e4},
        })
        rc = main(["scan", "--config", str(p), "--out-dir", str(tmp_path),
                   "--svg"])
        assert rc == 0
        assert (tmp_path / "odmr.csv").exists()
        assert (tmp_path / "odmr.svg").exists()

    def test_rabi_reports_fits(self, tmp_path, capsys):
        p = self._write(tmp_path, {
            "schema_version": 1, "protocol": "rabi", "label": "rabi",
            "sensor": {"splitting_hz": 4.1394e9},
            "sequence": {"rf": {"frequency_hz": 1.45e6,
                                "amplitude_hz": 2.494e6}},
            "scan": {"sidebands": [1], "duration_max_s": 6e-5,
                     "points": 121, "probe_rabi_hz": 1.25e5},
        })
        rc = main(["scan", "--config", str(p), "--out-dir", str(tmp_path)])
        assert rc == 0
        text = capsys.readouterr().out
        fitted = float(text.split("frequency")[1].split()[0])
        # J_1(1.72) * 125 kHz = 72.4 kHz
        assert fitted == pytest.approx(72.36, rel=0.02)

    def test_phase_sweep(self, tmp_path, capsys):
        p = self._write(tmp_path, {
            "schema_version": 1, "protocol": "phase_sweep", "label": "ph",
            "sensor": {"splitting_hz": 4.1394e9},
            "sequence": {"sense_duration_s": 8e-6,
                         "rf": {"frequency_hz": 1.45e6,
                                "amplitude_hz": 2.494e6}},
            "reference": {"frequency_hz": 4.1394e9},
            "tones": [{"rabi_hz": 2e4, "frequency_hz": 4.1394e9 + 1.45e6}],
            "scan": {"points": 16},
        })
        rc = main(["scan", "--config", str(p), "--out-dir", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "ph.csv").exists()

    def test_series_config_rejected(self, small_config):
        assert main(["scan", "--config", str(small_config)]) == 2


class TestDescribe:
    def test_text_and_json(self, small_config, capsys):
        assert main(["describe", "--config", str(small_config)]) == 0
        text = capsys.readouterr().out
        assert "sense" in text
        assert main(["describe", "--config", str(small_config), "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert any(seg["segment"] == "sense" for seg in data)


class TestSidebands:
    def test_table(self, tmp_path, capsys):
        csv = tmp_path / "sb.csv"
        rc = main(["sidebands", "--rf-hz", "1.45e6", "--amplitude-hz",
                   "2.494e6", "--splitting-hz", "4.1394e9", "--k-max", "2",
                   "--csv", str(csv)])
        assert rc == 0
        text = capsys.readouterr().out
        assert "modulation index x = 1.7200" in text
        rows = [ln for ln in csv.read_text().splitlines()
                if not ln.startswith("#")]
        assert rows[0] == "k,frequency_hz,strength,relative_power"
        assert len(rows) == 6  # k = -2..2
