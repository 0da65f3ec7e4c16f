"""Shared test utilities: independent root-finding and spectrum ensembles."""

from __future__ import annotations

import numpy as np

from qtherm.spectra import EnergySpectrum


def bisect_root(f, lo: float, hi: float, tol: float = 1e-14) -> float:
    """Plain bisection; the test-side oracle for stationarity conditions."""
    f_lo = f(lo)
    if f_lo * f(hi) > 0:
        raise ValueError("root not bracketed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f_lo * f(mid) <= 0:
            hi = mid
        else:
            lo, f_lo = mid, f(mid)
        if hi - lo < tol * max(1.0, abs(lo)):
            break
    return 0.5 * (lo + hi)


def random_spectra(seed: int, count: int) -> list[EnergySpectrum]:
    """Random block spectra: dimension <= 8, energies in [0, 10], multiplicities <= 5."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n_levels = int(rng.integers(2, 5))
        energies = np.sort(rng.uniform(0.0, 10.0, n_levels))
        energies -= energies[0]
        if np.any(np.diff(energies) < 1e-2):
            continue
        mults = []
        budget = 8
        for k in range(n_levels):
            cap = min(5, budget - (n_levels - 1 - k))
            g = int(rng.integers(1, cap + 1))
            mults.append(g)
            budget -= g
        out.append(EnergySpectrum(energies, np.array(mults, dtype=np.int64)))
    return out


def temperature_grid(count: int = 30, lo: float = 0.05, hi: float = 20.0) -> np.ndarray:
    return np.logspace(np.log10(lo), np.log10(hi), count)
