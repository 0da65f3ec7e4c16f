"""Precision limits of single-probe thermometry plus speed-limit diagnostics.

The package is organized by task:

* :mod:`qtherm.spectra`   -- discrete energy spectra with degeneracy weights,
* :mod:`qtherm.thermal`   -- Gibbs populations and energy statistics,
* :mod:`qtherm.metrology` -- temperature QFI routes, optima, peaks, scaling,
* :mod:`qtherm.dynamics`  -- qubit thermalization (master equation and swap),
* :mod:`qtherm.qsl`       -- quantum-speed-limit functionals on trajectories,
* :mod:`qtherm.cli`       -- the ``qtherm`` command-line front end.
"""

from .spectra import (
    EnergySpectrum,
    SpectrumError,
    SpectrumFormatError,
    SpectrumSchemaError,
    TruncationError,
    degenerate_staircase,
    harmonic,
    oscillator_truncated,
    parse_spectrum,
    staircase_from_gaps,
    three_level,
)
from .thermal import ThermalState, energy_variance, gibbs_state, mean_energy
from .metrology import (
    OptimumReport,
    QfiScan,
    ScalingFit,
    cramer_rao_variance_bound,
    find_optimal_temperature,
    find_peaks,
    qfi_fidelity_oracle,
    qfi_harmonic_d_closed,
    qfi_oscillator_closed,
    qfi_population,
    qfi_qubit_closed,
    qfi_variance,
    scaling_study,
    scan_qfi,
)
from .dynamics import (
    MarkovParams,
    SwapParams,
    Trajectory,
    gibbs_qubit,
    ground_state,
    hermitian_eigendecomposition,
    integrate_master,
    markov_excited_population,
    markov_generator,
    markov_trajectory,
    partial_trace_env,
    swap_generator,
    swap_reduced_state,
    swap_trajectory,
)
from .qsl import (
    QslReport,
    bures_angle,
    e_tau,
    evaluate_qsl,
    fidelity_diagonal,
    generator_op_norm,
    tau_qsl,
    v_qsl,
    v_qsl_markov_closed,
)

__version__ = "0.1.0"
