"""Sideband structure of a strongly RF-modulated sensor: ODMR and Rabi.

A longitudinal RF drive of amplitude x*omega_rf splits the sensor
resonance into a comb at omega_s + k*omega_rf with strengths J_k(x).
The scan below reproduces both the comb positions and the Bessel-weighted
Rabi rates; at x = 2.405 (the first zero of J_0) the carrier vanishes.

Run:  python3 demos/floquet_sidebands.py
"""

import math

import numpy as np

from mwheterodyne import (
    FloquetDressing,
    RfDriveSpec,
    bessel_j,
    fit_sinusoid,
    odmr_scan,
    rabi_scan,
    sideband_table,
)

TWO_PI = 2.0 * math.pi

omega_rf = TWO_PI * 1.45e6
x = 1.72
dressing = FloquetDressing(omega_rf=omega_rf, amplitude_rf=x * omega_rf)
print(f"modulation index x = {dressing.modulation_index:.2f}")
print("expected comb (relative strengths):")
for k, freq, jk, jk2 in sideband_table(dressing, 0.0, k_max=2):
    print(f"  k={k:+d}: offset {freq / TWO_PI / 1e6:+.2f} MHz, "
          f"J_k = {jk:+.3f}")

# --- ODMR: probe transfer vs frequency offset --------------------------
rf = RfDriveSpec(omega_rf=omega_rf, amplitude_rf=x * omega_rf)
offsets = TWO_PI * np.linspace(-4e6, 4e6, 801)
transfer = odmr_scan(offsets, rf, probe_duration=1e-5,
                     probe_amplitude=TWO_PI * 5e4)
for k in range(-2, 3):
    window = np.abs(offsets - k * omega_rf) < 0.3 * omega_rf
    i = np.flatnonzero(window)[np.argmax(transfer[window])]
    print(f"ODMR sideband k={k:+d}: peak at "
          f"{offsets[i] / TWO_PI / 1e6:+.2f} MHz, transfer {transfer[i]:.3f}")

# --- carrier suppression at the first Bessel zero ----------------------
rf_null = RfDriveSpec(omega_rf=omega_rf, amplitude_rf=2.405 * omega_rf)
center = TWO_PI * np.linspace(-2e4, 2e4, 5)
depth = odmr_scan(center, rf_null, 1e-5, TWO_PI * 5e4).max()
print(f"carrier transfer at x = 2.405: {depth:.2e} (J_0 zero)")

# --- Rabi rates on the first three sidebands ---------------------------
durations = np.linspace(0.0, 6e-5, 241)
omega_probe = TWO_PI * 125e3
for k in (0, 1, 2):
    pops = rabi_scan(durations, k, rf, omega_probe)
    freq, _, _, _ = fit_sinusoid(durations, pops)
    print(f"Rabi on sideband k={k}: {freq / 1e3:5.1f} kHz "
          f"(J_{k}(x) * 125 kHz = {bessel_j(k, x) * 125:5.1f} kHz)")
