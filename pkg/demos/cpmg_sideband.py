"""Dynamically decoupled heterodyne sensing with a CPMG pulse train.

A train of pi pulses at spacing tau makes the sensor deaf to everything
except signals near the filter frequency pi/tau, while the per-shot
phase coherence still permits heterodyne demodulation.  A tone offset
600 Hz from the filter resonance aliases to a sharp audio-band line in
the record spectrum.

Run:  python3 demos/cpmg_sideband.py
"""

import math

import numpy as np

from mwheterodyne import (
    CpmgSpec,
    ReadoutModel,
    ReferenceSpec,
    SeriesConfig,
    ToneSpec,
    autocorrelate,
    build_cpmg_heterodyne,
    fit_peak,
    power_spectrum,
    run_series,
)

TWO_PI = 2.0 * math.pi

splitting = TWO_PI * 4.1394e9
cpmg = CpmgSpec(tau=6.8e-6, n_pulses=10)
f_filter = cpmg.sideband_frequency / TWO_PI
print(f"CPMG filter frequency pi/tau = {f_filter / 1e3:.2f} kHz, "
      f"sensing {cpmg.total_sensing_time * 1e6:.0f} us per shot")

offset = 600.0                      # detuning from the filter resonance
t_shot = 75e-6                      # 68 us sensing + 7 us dead time
config = SeriesConfig(
    protocol="cpmg",
    omega_s=splitting,
    tones=(ToneSpec(TWO_PI * 240e3,
                    splitting + TWO_PI * (f_filter + offset), 0.0),),
    sequence=build_cpmg_heterodyne(cpmg, ReferenceSpec(frequency=splitting)),
    sampling_interval=t_shot,
    shots=1 << 18,
    seed=5501812,
    readout=ReadoutModel(mean_photons=0.1, contrast=0.3),
)

record = run_series(config)

# the offset folds into the per-shot Nyquist band
cycles = (f_filter + offset) * t_shot
frac = cycles - math.floor(cycles)
f_alias = min(frac, 1.0 - frac) / t_shot
print(f"tone offset {f_filter + offset:.1f} Hz advances "
      f"{cycles:.4f} cycles/shot -> alias at {f_alias:.1f} Hz")

max_lag = config.shots // 2
corr = autocorrelate(record, max_lag=max_lag)
spectrum = power_spectrum(corr, pad_factor=4)
pk = fit_peak(spectrum, f_min=f_alias - 40.0, f_max=f_alias + 40.0)
print(f"demodulated peak {pk.frequency:.3f} Hz, fwhm {pk.fwhm:.3f} Hz "
      f"(Fourier limit {0.886 / (max_lag * t_shot):.3f} Hz)")
