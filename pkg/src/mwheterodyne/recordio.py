"""Measurement-record container and file formats.

Binary layout (little-endian), documented in FORMATS.md:

    offset  size  field
    0       8     magic b"MWHETREC"
    8       4     format version (u32, currently 1)
    12      8     sampling interval T in seconds (f64)
    20      8     shot count M (u64)
    28      8     rng seed (u64)
    36      4*M   photon counts (u32)
    36+4M   8*M   true <S_z> per shot (f64)

CSV output carries the same header fields as '#' comment lines followed by
shot,count,true_sz rows.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"MWHETREC"
VERSION = 1
_HEADER = struct.Struct("<8sIdQQ")


class RecordFormatError(ValueError):
    """Malformed record file header or truncated payload."""


@dataclass(frozen=True)
class MeasurementRecord:
    """Per-shot photon counts plus the noise-free <S_z> ground truth."""

    counts: np.ndarray
    true_sz: np.ndarray
    sampling_interval: float
    seed: int

    def __post_init__(self):
        counts = np.ascontiguousarray(self.counts, dtype=np.uint32)
        true_sz = np.ascontiguousarray(self.true_sz, dtype=np.float64)
        if counts.shape != true_sz.shape or counts.ndim != 1:
            raise ValueError("counts and true_sz must be 1-d arrays of equal length")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "true_sz", true_sz)

    @property
    def shot_count(self) -> int:
        return int(self.counts.size)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, VERSION, self.sampling_interval,
                                  self.shot_count, self.seed))
            fh.write(self.counts.astype("<u4").tobytes())
            fh.write(self.true_sz.astype("<f8").tobytes())

    @classmethod
    def load(cls, path) -> "MeasurementRecord":
        with open(path, "rb") as fh:
            head = fh.read(_HEADER.size)
            if len(head) < _HEADER.size:
                raise RecordFormatError("record file shorter than header")
            magic, version, t, m, seed = _HEADER.unpack(head)
            if magic != MAGIC:
                raise RecordFormatError(f"bad magic {magic!r}")
            if version != VERSION:
                raise RecordFormatError(f"unsupported record version {version}")
            counts_raw = fh.read(4 * m)
            sz_raw = fh.read(8 * m)
        if len(counts_raw) != 4 * m or len(sz_raw) != 8 * m:
            raise RecordFormatError("record file truncated")
        counts = np.frombuffer(counts_raw, dtype="<u4")
        true_sz = np.frombuffer(sz_raw, dtype="<f8")
        return cls(counts=counts.copy(), true_sz=true_sz.copy(),
                   sampling_interval=t, seed=int(seed))

    def save_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(f"# sampling_interval_s={self.sampling_interval!r}\n")
            fh.write(f"# shot_count={self.shot_count}\n")
            fh.write(f"# seed={self.seed}\n")
            fh.write("shot,count,true_sz\n")
            for i in range(self.shot_count):
                fh.write(f"{i},{self.counts[i]},{self.true_sz[i]!r}\n")
