"""Command-line entry point.

Subcommands
-----------
simulate    run a configured shot series and write the record file
analyze     correlation / spectrum / peak fits / linewidth scaling of a record
scan        ODMR, Rabi or phase-sweep scan from a scan configuration
describe    print the compiled pulse-sequence timeline (text or JSON)
sidebands   tabulate sideband frequencies and Bessel strengths

Exit codes: 0 success, 2 configuration/schema error, 3 I/O failure,
4 malformed record file.  Stdout carries human-readable text; all
machine-readable data goes to files (CSV layouts documented in FORMATS.md).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from . import analysis
from .config import ConfigError, load_config
from .dressed import FloquetDressing, sideband_table
from .experiment import odmr_scan, phase_sweep, rabi_scan, run_series
from .recordio import MeasurementRecord, RecordFormatError

EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_RECORD = 4
TWO_PI = 2.0 * math.pi


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _out_path(args, name: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _load(args):
    try:
        return load_config(args.config)
    except ConfigError as exc:
        raise _CliError(EXIT_CONFIG, f"configuration error: {exc}")
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot read {args.config}: {exc}")


def _stem(args, cfg) -> str:
    if cfg.label:
        return cfg.label
    return os.path.splitext(os.path.basename(args.config))[0]


def _write_csv(path: str, header_lines, columns, rows) -> None:
    try:
        with open(path, "w") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(repr(v) if isinstance(v, float) else str(v)
                                  for v in row) + "\n")
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot write {path}: {exc}")


def cmd_simulate(args) -> int:
    cfg = _load(args)
    if cfg.series is None:
        raise _CliError(EXIT_CONFIG,
                        f"protocol {cfg.protocol!r} is a scan; use the scan subcommand")
    series = cfg.series
    if args.seed is not None:
        from dataclasses import replace

        series = replace(series, seed=args.seed)
    t0 = time.perf_counter()
    record = run_series(series, threads=args.threads)
    elapsed = time.perf_counter() - t0
    path = _out_path(args, _stem(args, cfg) + ".rec")
    try:
        record.save(path)
        if args.csv:
            record.save_csv(path[: -len(".rec")] + ".csv")
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot write {path}: {exc}")
    print(f"record: {path}")
    print(f"shots: {record.shot_count}")
    print(f"sampling interval: {record.sampling_interval:.6e} s")
    print(f"mean counts/shot: {record.counts.mean():.4f}")
    print(f"runtime: {elapsed:.2f} s")
    return 0


def _find_peaks(spectrum, n_peaks, f_min, f_max):
    """Up to n_peaks strongest peaks, masking each found line before the next."""
    power = spectrum.power.copy()
    import dataclasses

    work = spectrum
    found = []
    for _ in range(n_peaks):
        try:
            pk = analysis.fit_peak(work, f_min=f_min, f_max=f_max)
        except analysis.PeakNotFoundError:
            break
        found.append(pk)
        df = work.resolution
        half_width_bins = max(3, int(math.ceil(pk.fwhm / df)) + 2)
        lo = max(0, pk.index - half_width_bins)
        power[lo: pk.index + half_width_bins + 1] = 0.0
        work = dataclasses.replace(work, power=power)
    return found


def cmd_analyze(args) -> int:
    try:
        record = MeasurementRecord.load(args.record)
    except RecordFormatError as exc:
        raise _CliError(EXIT_RECORD, f"malformed record {args.record}: {exc}")
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot read {args.record}: {exc}")
    values = record.true_sz if args.channel == "true-sz" else \
        record.counts.astype(float)
    max_lag = args.max_lag if args.max_lag > 0 else record.shot_count // 2
    corr = analysis.autocorrelate(values, max_lag=max_lag,
                                  normalization=args.normalization,
                                  sampling_interval=record.sampling_interval)
    if args.oracle_brute_force:
        n_check = min(record.shot_count, 10_000)
        lag_check = min(max_lag, n_check - 1)
        sub = np.asarray(values[:n_check], dtype=float)
        y = sub - sub.mean()
        brute = np.array([np.dot(y[: n_check - k], y[k:]) / (n_check - k)
                          for k in range(lag_check + 1)])
        fast = analysis.autocorrelate(sub, max_lag=lag_check,
                                      sampling_interval=record.sampling_interval)
        err = float(np.abs(fast.values - brute).max())
        print(f"brute-force correlation check: max |diff| = {err:.3e}")
        if err > 1e-9:
            print("brute-force correlation check FAILED", file=sys.stderr)
            return 1
    spectrum = analysis.power_spectrum(corr, pad_factor=args.pad_factor)
    stem = os.path.splitext(os.path.basename(args.record))[0]
    _write_csv(_out_path(args, stem + "_corr.csv"),
               [f"sampling_interval_s={record.sampling_interval!r}",
                f"normalization={args.normalization}", f"channel={args.channel}"],
               ["lag", "lag_time_s", "value"],
               zip(corr.lags.tolist(), corr.lag_times.tolist(),
                   corr.values.tolist()))
    _write_csv(_out_path(args, stem + "_spectrum.csv"),
               [f"resolution_hz={spectrum.resolution!r}", f"window={spectrum.window}"],
               ["frequency_hz", "power"],
               zip(spectrum.frequencies.tolist(), spectrum.power.tolist()))
    f_min = args.f_min if args.f_min is not None \
        else 2.0 * args.pad_factor * spectrum.resolution
    f_max = args.f_max if args.f_max is not None else math.inf
    peaks = _find_peaks(spectrum, args.peaks, f_min, f_max)
    for pk in peaks:
        print(f"peak: {pk.frequency:.6f} Hz  fwhm {pk.fwhm:.6g} Hz  "
              f"height {pk.height:.6g}")
    if not peaks:
        print("no significant peak found")
    if peaks:
        _write_csv(_out_path(args, stem + "_peaks.csv"), [],
                   ["frequency_hz", "fwhm_hz", "height"],
                   [(pk.frequency, pk.fwhm, pk.height) for pk in peaks])
    if args.svg:
        from . import plots

        plots.save_spectrum_plot(spectrum, peaks,
                                 _out_path(args, stem + "_spectrum.svg"),
                                 f_min=args.f_min, f_max=args.f_max)
    if args.lengths:
        lengths = [int(v) for v in args.lengths.split(",")]
        rows = analysis.linewidth_scaling(values, lengths,
                                          sampling_interval=record.sampling_interval,
                                          normalization=args.normalization,
                                          pad_factor=args.pad_factor)
        slope = analysis.fit_log_slope([r[1] for r in rows], [r[3] for r in rows])
        _write_csv(_out_path(args, stem + "_scaling.csv"),
                   [f"log_log_slope={slope!r}"],
                   ["correlation_length", "duration_s", "frequency_hz", "fwhm_hz"],
                   rows)
        for n, dur, freq, fwhm in rows:
            print(f"N={n:>9d}  N*T={dur:.4g} s  peak {freq:.4f} Hz  "
                  f"fwhm {fwhm:.4g} Hz")
        print(f"log-log slope: {slope:.4f}")
        if args.svg:
            from . import plots

            plots.save_scaling_plot(rows, _out_path(args, stem + "_scaling.svg"))
    return 0


def cmd_scan(args) -> int:
    cfg = _load(args)
    stem = _stem(args, cfg)
    if cfg.protocol == "odmr":
        scan = cfg.scan
        offsets = np.linspace(scan.offset_min, scan.offset_max, scan.points)
        transfer = odmr_scan(offsets, scan.rf, scan.probe_duration,
                             scan.probe_amplitude)
        freqs_hz = (scan.omega_s + offsets) / TWO_PI
        _write_csv(_out_path(args, stem + ".csv"),
                   [f"protocol=odmr", f"splitting_hz={scan.omega_s / TWO_PI!r}"],
                   ["probe_frequency_hz", "offset_hz", "transfer"],
                   zip(freqs_hz.tolist(), (offsets / TWO_PI).tolist(),
                       transfer.tolist()))
        print(f"odmr scan: {scan.points} points, "
              f"max transfer {transfer.max():.4f}")
        if args.svg:
            from . import plots

            plots.save_scan_plot(offsets / TWO_PI / 1e6, transfer,
                                 _out_path(args, stem + ".svg"),
                                 "probe offset (MHz)", "population transfer")
    elif cfg.protocol == "rabi":
        scan = cfg.scan
        durations = np.linspace(0.0, scan.duration_max, scan.points)
        traces = []
        fits = []
        for k in scan.sidebands:
            pops = rabi_scan(durations, k, scan.rf, scan.probe_amplitude)
            traces.append(pops)
            freq, amp, _, _ = analysis.fit_sinusoid(durations, pops)
            fits.append((k, freq))
            print(f"sideband {k}: fitted Rabi frequency {freq / 1e3:.3f} kHz")
        cols = ["duration_s"] + [f"population_k{k}" for k in scan.sidebands]
        _write_csv(_out_path(args, stem + ".csv"),
                   ["protocol=rabi"]
                   + [f"fitted_rabi_hz_k{k}={f!r}" for k, f in fits],
                   cols,
                   zip(durations.tolist(), *[t.tolist() for t in traces]))
        if args.svg:
            from . import plots

            plots.save_scan_plot(durations * 1e6, traces,
                                 _out_path(args, stem + ".svg"),
                                 "probe duration (us)", "|-1> population",
                                 labels=[f"k={k}" for k in scan.sidebands])
    elif cfg.protocol == "phase_sweep":
        scan = cfg.scan
        phis = np.linspace(0.0, TWO_PI, scan.points, endpoint=False)
        from .sequences import ReferencePulse

        ref = ReferencePulse(angle=math.pi / 2.0, phase=scan.reference.phase,
                             duration=scan.reference.pi_half_duration)
        result = phase_sweep(phis, scan.tone, scan.omega_s, scan.rf,
                             scan.sense_duration, ref, readout=scan.readout,
                             shots_per_point=scan.shots_per_point)
        if scan.shots_per_point > 0:
            response, counts = result
            rows = zip(phis.tolist(), response.tolist(), counts.tolist())
            cols = ["phase_rad", "response_sz", "mean_counts"]
        else:
            response = result
            rows = zip(phis.tolist(), response.tolist())
            cols = ["phase_rad", "response_sz"]
        _write_csv(_out_path(args, stem + ".csv"), ["protocol=phase_sweep"],
                   cols, rows)
        print(f"phase sweep: {scan.points} points, response amplitude "
              f"{(response.max() - response.min()) / 2.0:.4f}")
        if args.svg:
            from . import plots

            plots.save_scan_plot(phis, response, _out_path(args, stem + ".svg"),
                                 "signal phase (rad)", "<S_z> response")
    else:
        raise _CliError(EXIT_CONFIG,
                        f"protocol {cfg.protocol!r} is a shot series; "
                        "use the simulate subcommand")
    return 0


def cmd_describe(args) -> int:
    cfg = _load(args)
    if cfg.series is None:
        raise _CliError(EXIT_CONFIG,
                        f"protocol {cfg.protocol!r} has no pulse sequence to describe")
    print(cfg.series.sequence.describe(as_json=args.json))
    return 0


def cmd_sidebands(args) -> int:
    d = FloquetDressing(omega_rf=TWO_PI * args.rf_hz,
                        amplitude_rf=TWO_PI * args.amplitude_hz)
    rows = sideband_table(d, TWO_PI * args.splitting_hz, k_max=args.k_max)
    print(f"modulation index x = {d.modulation_index:.4f}")
    print(f"{'k':>3} {'frequency (Hz)':>18} {'J_k(x)':>12} {'J_k^2':>12}")
    for k, freq, jk, jk2 in rows:
        print(f"{k:>3} {freq / TWO_PI:>18.3f} {jk:>12.6f} {jk2:>12.6f}")
    if args.csv:
        _write_csv(args.csv, [f"modulation_index={d.modulation_index!r}"],
                   ["k", "frequency_hz", "strength", "relative_power"],
                   [(k, f / TWO_PI, jk, jk2) for k, f, jk, jk2 in rows])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mwheterodyne",
        description="Heterodyne microwave sensing simulator for a single "
        "two-level solid-state sensor.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a shot series and write the record")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="override the configured seed")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--csv", action="store_true", help="also write a CSV copy")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="demodulate a record file")
    p.add_argument("record")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--channel", choices=("counts", "true-sz"), default="counts")
    p.add_argument("--max-lag", type=int, default=0,
                   help="correlation length (default: half the record)")
    p.add_argument("--normalization", choices=("unbiased", "raw"),
                   default="unbiased")
    p.add_argument("--pad-factor", type=int, default=4,
                   help="zero-padding factor for the spectrum (removes "
                   "scalloping bias in width estimates)")
    p.add_argument("--peaks", type=int, default=2,
                   help="number of peaks to search for")
    p.add_argument("--f-min", type=float, default=None)
    p.add_argument("--f-max", type=float, default=None)
    p.add_argument("--lengths", default="",
                   help="comma-separated correlation lengths for the "
                   "linewidth-scaling study")
    p.add_argument("--oracle-brute-force", action="store_true",
                   help="check the FFT correlation against the direct sum "
                   "on the first 10^4 shots")
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("scan", help="run an ODMR / Rabi / phase sweep scan")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("describe", help="print the compiled sequence timeline")
    p.add_argument("--config", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("sidebands", help="tabulate sideband strengths")
    p.add_argument("--rf-hz", type=float, required=True)
    p.add_argument("--amplitude-hz", type=float, required=True)
    p.add_argument("--splitting-hz", type=float, default=0.0)
    p.add_argument("--k-max", type=int, default=5)
    p.add_argument("--csv", default="", help="also write the table to this path")
    p.set_defaults(func=cmd_sidebands)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
