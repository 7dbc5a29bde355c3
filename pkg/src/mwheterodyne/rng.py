"""Counter-based per-shot random streams.

Each shot's randomness is a pure function of (seed, shot index, draw
index), so the shot loop can run in any order on any number of workers and
still produce bit-identical records.  The generator is the splitmix64
finalizer applied to a keyed counter; it vectorizes over shot indices as
plain uint64 numpy arithmetic.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _splitmix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def shot_uniforms(seed: int, indices, draw: int = 0) -> np.ndarray:
    """Uniform [0, 1) doubles, one per shot index, for draw stream ``draw``."""
    idx = np.asarray(indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
             + idx * _GOLDEN
             + np.uint64(draw) * np.uint64(0xD1B54A32D192ED03))
        bits = _splitmix64(_splitmix64(z))
    return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def poisson_counts(seed: int, indices, means: np.ndarray) -> np.ndarray:
    """Poisson draws with per-shot means by CDF inversion of one uniform each.

    Inversion keeps the count a deterministic function of the single
    per-shot uniform, which is what makes records independent of execution
    order.  Suitable for the photon-count regime (means up to a few tens).
    """
    means = np.asarray(means, dtype=float)
    if np.any(means < 0.0):
        raise ValueError("Poisson mean must be non-negative")
    u = shot_uniforms(seed, indices, draw=0)
    counts = np.zeros(means.shape, dtype=np.uint32)
    pmf = np.exp(-means)
    cdf = pmf.copy()
    pending = u >= cdf
    k = 0
    k_cap = int(np.ceil(10.0 * max(float(means.max(initial=0.0)), 1.0))) + 50
    while pending.any():
        k += 1
        if k > k_cap:
            counts[pending] = k_cap
            break
        pmf = pmf * (means / k)
        cdf = cdf + pmf
        counts[pending] = k
        pending = u >= cdf
    return counts


def bernoulli_outcomes(seed: int, indices, p_up: np.ndarray) -> np.ndarray:
    """Single-shot projective outcomes: 1 with probability p_up, else 0."""
    p_up = np.asarray(p_up, dtype=float)
    u = shot_uniforms(seed, indices, draw=1)
    return (u < p_up).astype(np.uint32)
