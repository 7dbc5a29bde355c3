"""Heterodyne microwave sensing with a single two-level quantum sensor.

Simulates sequential, phase-coherent measurement records from plain,
CPMG-decoupled and Floquet-dressed sensing protocols and demodulates them
to spectral resolutions far below the sensor's coherence limit.
"""

from .analysis import (
    Correlation,
    PeakFit,
    PeakNotFoundError,
    Spectrum,
    autocorrelate,
    fit_log_slope,
    fit_peak,
    fit_sinusoid,
    linewidth_scaling,
    power_spectrum,
)
from .config import ConfigError, RunConfig, load_config, parse_config
from .dressed import (
    BesselRangeError,
    FloquetDressing,
    MollowDressing,
    bessel_j,
    floquet_effective_hamiltonian,
    mollow_effective_hamiltonian,
    sideband_table,
)
from .dynamics import (
    DecayParams,
    LabFrameParams,
    LabTone,
    Propagator,
    RotatingFrameHamiltonian,
    SpinState,
    closed_form_propagator,
    expect_sz,
    lab_frame_integrate,
    phase_response,
    superposition_state,
)
from .experiment import (
    ReadoutModel,
    SeriesConfig,
    odmr_scan,
    phase_sweep,
    rabi_scan,
    run_series,
    run_shot,
)
from .recordio import MeasurementRecord, RecordFormatError
from .sequences import (
    CpmgSpec,
    PulseSequence,
    RfDriveSpec,
    build_cpmg_heterodyne,
    build_floquet_heterodyne,
    build_plain_heterodyne,
)
from .signals import FieldConversion, MultiToneDrive, ReferenceSpec, ToneSpec

__version__ = "0.1.0"
