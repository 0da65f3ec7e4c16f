"""Gibbs-state populations and energy statistics over discrete spectra.

All population work happens in the log domain with a max-shift, so block
weights g * exp(-E/T) never overflow and T -> 0+ degrades gracefully to
the ground-state point mass instead of producing NaNs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spectra import EnergySpectrum

__all__ = [
    "ThermalState",
    "AlignmentError",
    "gibbs_state",
    "log_populations",
    "mean_energy",
    "energy_variance",
]


class AlignmentError(ValueError):
    """A thermal state was paired with a spectrum it was not built from."""


def _check_temperature(temperature: float) -> float:
    t = float(temperature)
    if not math.isfinite(t) or t <= 0.0:
        raise ValueError(f"temperature must be positive and finite, got {temperature!r}")
    return t


def log_populations(spectrum: EnergySpectrum, temperature) -> tuple[np.ndarray, np.ndarray]:
    """Log block populations and log partition function, vectorized over T.

    Returns ``(log_p, log_z)`` where ``log_p[k, ...]`` is the log of the total
    probability of level block k (multiplicity times per-state Boltzmann
    weight) and ``log_z`` is ln Z for each temperature.
    """
    t = np.asarray(temperature, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t <= 0.0):
        raise ValueError("temperature must be positive and finite")
    e = spectrum.energies[:, np.newaxis] if t.ndim else spectrum.energies
    g = spectrum.multiplicities[:, np.newaxis] if t.ndim else spectrum.multiplicities
    w = np.log(g.astype(float)) - e / t
    shift = w.max(axis=0)
    log_z = shift + np.log(np.sum(np.exp(w - shift), axis=0))
    return w - log_z, log_z


@dataclass(frozen=True, eq=False)
class ThermalState:
    """Gibbs state of a spectrum at one temperature.

    ``populations[k]`` is the total probability of level block k, aligned
    with ``spectrum.energies``.
    """

    temperature: float
    populations: np.ndarray
    log_partition: float
    mean_energy: float
    energy_variance: float
    spectrum: EnergySpectrum = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.populations, dtype=float)
        p.flags.writeable = False
        object.__setattr__(self, "populations", p)


def gibbs_state(spectrum: EnergySpectrum, temperature: float) -> ThermalState:
    """Thermal equilibrium state exp(-H/T)/Z at the given temperature."""
    t = _check_temperature(temperature)
    log_p, log_z = log_populations(spectrum, t)
    p = np.exp(log_p)
    e = spectrum.energies
    mu = float(np.sum(p * e))
    var = float(np.sum(p * e**2) - mu**2)
    return ThermalState(
        temperature=t,
        populations=p,
        log_partition=float(log_z),
        mean_energy=mu,
        energy_variance=max(var, 0.0),
        spectrum=spectrum,
    )


def _check_alignment(state: ThermalState, spectrum: EnergySpectrum) -> None:
    if state.spectrum is spectrum:
        return
    if state.populations.shape != spectrum.energies.shape or not state.spectrum.same_levels(
        spectrum
    ):
        raise AlignmentError("thermal state and spectrum are misaligned")


def mean_energy(state: ThermalState, spectrum: EnergySpectrum) -> float:
    """Block-weighted mean energy sum_k p_k E_k."""
    _check_alignment(state, spectrum)
    return float(np.sum(state.populations * spectrum.energies))


def energy_variance(state: ThermalState, spectrum: EnergySpectrum) -> float:
    """Energy variance sum_k p_k E_k^2 - (sum_k p_k E_k)^2, clipped at zero."""
    _check_alignment(state, spectrum)
    e = spectrum.energies
    mu = np.sum(state.populations * e)
    var = float(np.sum(state.populations * e**2) - mu**2)
    return max(var, 0.0)
