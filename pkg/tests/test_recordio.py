"""Record container and binary/CSV formats."""

import struct

import numpy as np
import pytest

from mwheterodyne.recordio import (
    MAGIC,
    MeasurementRecord,
    RecordFormatError,
)


def _record(m=100, seed=7):
    rng = np.random.default_rng(seed)
    return MeasurementRecord(
        counts=rng.integers(0, 5, size=m).astype(np.uint32),
        true_sz=rng.uniform(-0.5, 0.5, size=m),
        sampling_interval=1.824e-6,
        seed=seed,
    )


class TestContainer:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            MeasurementRecord(counts=np.zeros(3, dtype=np.uint32),
                              true_sz=np.zeros(4), sampling_interval=1.0, seed=0)

    def test_shot_count(self):
        assert _record(17).shot_count == 17


class TestBinaryRoundTrip:
    def test_round_trip(self, tmp_path):
        rec = _record(1000)
        path = tmp_path / "r.rec"
        rec.save(path)
        back = MeasurementRecord.load(path)
        assert np.array_equal(back.counts, rec.counts)
        assert np.array_equal(back.true_sz, rec.true_sz)
        assert back.sampling_interval == rec.sampling_interval
        assert back.seed == rec.seed

    def test_byte_identical_saves(self, tmp_path):
        rec = _record(64)
        p1, p2 = tmp_path / "a.rec", tmp_path / "b.rec"
        rec.save(p1)
        rec.save(p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.rec"
        path.write_bytes(b"NOTMYFMT" + b"\x00" * 64)
        with pytest.raises(RecordFormatError):
            MeasurementRecord.load(path)

    def test_unsupported_version(self, tmp_path):
        path = tmp_path / "v9.rec"
        path.write_bytes(struct.pack("<8sIdQQ", MAGIC, 9, 1.0, 0, 0))
        with pytest.raises(RecordFormatError):
            MeasurementRecord.load(path)

    def test_truncated_header(self, tmp_path):
        path = tmp_path / "short.rec"
        path.write_bytes(MAGIC)
        with pytest.raises(RecordFormatError):
            MeasurementRecord.load(path)

    def test_truncated_payload(self, tmp_path):
        rec = _record(100)
        path = tmp_path / "t.rec"
        rec.save(path)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) - 50])
        with pytest.raises(RecordFormatError):
            MeasurementRecord.load(path)


class TestCsv:
    def test_header_and_rows(self, tmp_path):
        rec = _record(5)
        path = tmp_path / "r.csv"
        rec.save_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# sampling_interval_s=")
        assert "shot,count,true_sz" in lines
        assert len([ln for ln in lines if not ln.startswith("#")]) == 6
