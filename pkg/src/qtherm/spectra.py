"""Discrete energy spectra for single quantum probes.

Spectra are stored as distinct energy levels with integer multiplicities,
so a million-fold degenerate level costs one entry instead of a million.
Units follow k_B = hbar = 1: energies and temperatures share one scale.

Conventions enforced on every spectrum:

* at least two distinct levels,
* strictly increasing energies,
* the ground level shifted to zero energy (thermometry only sees
  population derivatives, never the absolute energy offset),
* all multiplicities are positive integers.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "EnergySpectrum",
    "SpectrumError",
    "SpectrumFormatError",
    "SpectrumSchemaError",
    "TruncationError",
    "DuplicateLevelWarning",
    "harmonic",
    "oscillator_truncated",
    "three_level",
    "degenerate_staircase",
    "staircase_from_gaps",
    "parse_spectrum",
    "TRUNCATION_CAP",
]

#: Hard cap on the truncated-oscillator dimension.
TRUNCATION_CAP = 10**6


class SpectrumError(ValueError):
    """A spectrum violates the structural invariants."""


class SpectrumFormatError(SpectrumError):
    """Spectrum text is not valid JSON."""


class SpectrumSchemaError(SpectrumError):
    """Spectrum JSON parses but does not match the level schema."""


class TruncationError(SpectrumError):
    """Requested truncation tolerance needs more levels than the cap allows."""


class DuplicateLevelWarning(UserWarning):
    """Two input levels shared an energy and were merged."""


@dataclass(frozen=True, eq=False)
class EnergySpectrum:
    """Distinct energy levels with multiplicity weights.

    ``energies`` is strictly increasing with ``energies[0] == 0``;
    ``multiplicities[k]`` counts the eigenstates at ``energies[k]``.
    Instances are immutable and safe to share across workers.
    """

    energies: np.ndarray
    multiplicities: np.ndarray
    label: str = field(default="", compare=False)

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        g = np.asarray(self.multiplicities, dtype=np.int64)
        if e.ndim != 1 or g.shape != e.shape:
            raise SpectrumError("energies and multiplicities must be aligned 1-d arrays")
        if e.size < 2:
            raise SpectrumError("a spectrum needs at least 2 distinct levels")
        if not np.all(np.isfinite(e)):
            raise SpectrumError("energies must be finite")
        if e[0] != 0.0:
            raise SpectrumError("ground energy must be normalized to 0")
        if np.any(np.diff(e) <= 0):
            raise SpectrumError("energies must be strictly increasing")
        if np.any(g < 1):
            raise SpectrumError("multiplicities must be >= 1")
        e.flags.writeable = False
        g.flags.writeable = False
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "multiplicities", g)

    @property
    def num_levels(self) -> int:
        """Number of distinct energy levels."""
        return int(self.energies.size)

    @property
    def dimension(self) -> int:
        """Hilbert-space dimension (total multiplicity)."""
        return int(self.multiplicities.sum())

    @property
    def max_energy(self) -> float:
        return float(self.energies[-1])

    @property
    def first_gap(self) -> float:
        """Energy of the first excited level above the ground level."""
        return float(self.energies[1])

    def scaled(self, factor: float) -> "EnergySpectrum":
        """Spectrum with every energy multiplied by ``factor`` (> 0)."""
        if not factor > 0:
            raise SpectrumError("scale factor must be positive")
        return EnergySpectrum(self.energies * factor, self.multiplicities, self.label)

    def same_levels(self, other: "EnergySpectrum") -> bool:
        return (
            self.energies.shape == other.energies.shape
            and bool(np.all(self.energies == other.energies))
            and bool(np.all(self.multiplicities == other.multiplicities))
        )

    def to_json(self) -> str:
        """Serialize to the spectrum JSON schema."""
        levels = [
            {"energy": float(e), "g": int(g)}
            for e, g in zip(self.energies, self.multiplicities)
        ]
        return json.dumps({"levels": levels})

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        pairs = ", ".join(
            f"({e:g}, {g})" for e, g in zip(self.energies, self.multiplicities)
        )
        return f"EnergySpectrum([{pairs}])"


def _normalize(levels, *, warn_on_merge: bool, label: str = "") -> EnergySpectrum:
    """Sort, merge exact duplicates, shift the ground level to zero."""
    pairs = [(float(e), g) for e, g in levels]
    if len(pairs) < 2:
        raise SpectrumError("a spectrum needs at least 2 distinct levels")
    for e, g in pairs:
        if not math.isfinite(e):
            raise SpectrumError("energies must be finite")
        if int(g) != g or int(g) < 1:
            raise SpectrumError(f"multiplicity {g!r} is not a positive integer")
    pairs.sort(key=lambda p: p[0])
    merged: list[tuple[float, int]] = []
    duplicates = False
    for e, g in pairs:
        if merged and e == merged[-1][0]:
            merged[-1] = (e, merged[-1][1] + int(g))
            duplicates = True
        else:
            merged.append((e, int(g)))
    if duplicates and warn_on_merge:
        warnings.warn(
            "duplicate energies merged with summed multiplicity",
            DuplicateLevelWarning,
            stacklevel=3,
        )
    if len(merged) < 2:
        raise SpectrumError("a spectrum needs at least 2 distinct levels after merging")
    ground = merged[0][0]
    energies = np.array([e - ground for e, _ in merged], dtype=float)
    energies[0] = 0.0
    mults = np.array([g for _, g in merged], dtype=np.int64)
    return EnergySpectrum(energies, mults, label)


def harmonic(dimension: int, gap: float) -> EnergySpectrum:
    """Equally spaced ladder: levels k*gap for k = 0..dimension-1, all singly occupied."""
    if int(dimension) != dimension or dimension < 2:
        raise SpectrumError("dimension must be an integer >= 2")
    if not gap > 0:
        raise SpectrumError("gap must be positive")
    d = int(dimension)
    return EnergySpectrum(
        gap * np.arange(d, dtype=float),
        np.ones(d, dtype=np.int64),
        label=f"harmonic(d={d}, gap={gap:g})",
    )


def oscillator_truncated(gap: float, temp_max: float, tail_tol: float) -> EnergySpectrum:
    """Harmonic ladder truncated so the discarded Boltzmann tail is negligible.

    The dimension is the smallest d whose energy-weighted tail bound
    ``(1 + d*gap/temp_max)^2 * exp(-(d-1)*gap/temp_max)`` falls below
    ``tail_tol / e``.  The extra energy weighting (relative to the bare
    tail probability) is what makes the *relative* error of downstream
    quantities, in particular the temperature QFI at any T <= temp_max,
    stay below ``tail_tol``.
    """
    if not (gap > 0 and temp_max > 0):
        raise SpectrumError("gap and temp_max must be positive")
    if not (0.0 < tail_tol < 1.0):
        raise SpectrumError("tail_tol must lie in (0, 1)")
    x = gap / temp_max
    # exponential-only lower bound on d, then walk up to the first d that
    # satisfies the weighted bound (the weight only adds O(log log) levels)
    d = max(2, int((math.log(1.0 / tail_tol) + 1.0) / x))
    while (1 + d * x) ** 2 * math.exp(-(d - 1) * x) >= tail_tol / math.e:
        d += 1
        if d > TRUNCATION_CAP:
            raise TruncationError(
                f"truncation needs more than {TRUNCATION_CAP} levels "
                f"(gap={gap:g}, temp_max={temp_max:g}, tail_tol={tail_tol:g})"
            )
    if d > TRUNCATION_CAP:
        raise TruncationError(
            f"truncation needs more than {TRUNCATION_CAP} levels "
            f"(gap={gap:g}, temp_max={temp_max:g}, tail_tol={tail_tol:g})"
        )
    return EnergySpectrum(
        gap * np.arange(d, dtype=float),
        np.ones(d, dtype=np.int64),
        label=f"oscillator(gap={gap:g}, d={d})",
    )


def three_level(gap1: float, gap2: float) -> EnergySpectrum:
    """Three-level probe with excited energies gap1 <= gap2 above the ground state.

    When gap2 == gap1 the excited levels merge into one doubly degenerate level.
    """
    if not gap1 > 0:
        raise SpectrumError("gap1 must be positive")
    if gap2 < gap1:
        raise SpectrumError("gap2 must satisfy gap2 >= gap1")
    return _normalize(
        [(0.0, 1), (gap1, 1), (gap2, 1)],
        warn_on_merge=False,
        label=f"three_level({gap1:g}, {gap2:g})",
    )


def degenerate_staircase(levels) -> EnergySpectrum:
    """Spectrum from explicit (absolute energy, multiplicity) pairs.

    Energies are absolute values above the ground state, not successive
    gaps (see :func:`staircase_from_gaps` for the cumulative reading).
    The lowest energy must appear exactly once and be a single state.
    """
    pairs = [(float(e), g) for e, g in levels]
    if len(pairs) < 2:
        raise SpectrumError("a staircase needs at least 2 levels")
    if any(e < 0 for e, _ in pairs):
        raise SpectrumError("staircase energies must be non-negative")
    emin = min(e for e, _ in pairs)
    bottom = [(e, g) for e, g in pairs if e == emin]
    if len(bottom) != 1 or bottom[0][1] != 1:
        raise SpectrumError("the ground state must be unique (one level, multiplicity 1)")
    return _normalize(pairs, warn_on_merge=True, label="staircase")


def staircase_from_gaps(levels) -> EnergySpectrum:
    """Staircase where each entry's energy is the gap above the previous level.

    The first entry is the ground level and must carry energy 0; entry i > 0
    contributes energy ``sum(gap_1..gap_i)``.  Input order is significant.
    """
    pairs = [(float(e), g) for e, g in levels]
    if len(pairs) < 2:
        raise SpectrumError("a staircase needs at least 2 levels")
    if pairs[0][0] != 0.0:
        raise SpectrumError("the first entry must be the ground level with energy 0")
    if any(e <= 0 for e, _ in pairs[1:]):
        raise SpectrumError("gaps must be positive")
    energies = np.concatenate([[0.0], np.cumsum([e for e, _ in pairs[1:]])])
    return degenerate_staircase(zip(energies, (g for _, g in pairs)))


def parse_spectrum(text: str, *, gaps: bool = False) -> EnergySpectrum:
    """Parse the spectrum JSON schema into a validated spectrum.

    Schema: ``{"levels": [{"energy": <number>, "g": <positive integer>}, ...]}``.
    The level order is insignificant (energies are sorted and the ground
    level is shifted to zero) unless ``gaps`` is set, in which case each
    entry's energy is read as the gap above the previous entry.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpectrumFormatError(f"invalid spectrum JSON: {exc}") from exc
    if not isinstance(doc, dict) or "levels" not in doc:
        raise SpectrumSchemaError('spectrum JSON must be an object with a "levels" array')
    raw = doc["levels"]
    if not isinstance(raw, list) or len(raw) == 0:
        raise SpectrumSchemaError('"levels" must be a non-empty array')
    pairs = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict) or "energy" not in entry or "g" not in entry:
            raise SpectrumSchemaError(f'level {i} must be an object with "energy" and "g"')
        e, g = entry["energy"], entry["g"]
        if not isinstance(e, (int, float)) or isinstance(e, bool):
            raise SpectrumSchemaError(f"level {i}: energy must be a number")
        if not isinstance(g, int) or isinstance(g, bool) or g < 1:
            raise SpectrumSchemaError(f"level {i}: g must be a positive integer")
        pairs.append((float(e), g))
    if len(pairs) < 2:
        raise SpectrumSchemaError("a spectrum needs at least 2 levels")
    if gaps:
        return staircase_from_gaps(pairs)
    return _normalize(pairs, warn_on_merge=True, label="file")
