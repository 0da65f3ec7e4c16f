import math

import numpy as np
import pytest

from qtherm import spectra, thermal
from qtherm.metrology import qfi_population

QUBIT = spectra.harmonic(2, 1.0)


class TestGibbsState:
    def test_infinite_temperature_limit(self):
        state = thermal.gibbs_state(QUBIT, 1e9)
        assert state.populations == pytest.approx([0.5, 0.5], abs=1e-9)

    def test_qubit_at_unit_temperature(self):
        state = thermal.gibbs_state(QUBIT, 1.0)
        assert state.log_partition == pytest.approx(math.log1p(math.exp(-1.0)), rel=1e-14)
        # cross-check against the (1 -+ tanh(gap/2T))/2 form of the same state
        p_excited = (1.0 - math.tanh(0.5)) / 2.0
        assert state.populations[0] == pytest.approx(1.0 - p_excited, rel=1e-14)
        assert state.populations[1] == pytest.approx(p_excited, rel=1e-14)

    def test_degenerate_block_population(self):
        state = thermal.gibbs_state(spectra.three_level(1.0, 1.0), 1.0)
        z = 1.0 + 2.0 * math.exp(-1.0)
        assert state.populations[0] == pytest.approx(1.0 / z, rel=1e-14)
        assert state.populations[1] == pytest.approx(2.0 * math.exp(-1.0) / z, rel=1e-14)

    def test_cold_limit_is_ground_point_mass(self):
        state = thermal.gibbs_state(spectra.harmonic(5, 1.0), 1e-4)
        assert state.populations[0] == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.isfinite(state.populations))

    @pytest.mark.parametrize("temp", [0.0, -1.0, math.inf, math.nan])
    def test_invalid_temperature(self, temp):
        with pytest.raises(ValueError):
            thermal.gibbs_state(QUBIT, temp)


class TestEnergyStatistics:
    def test_mean_energy_uniform(self):
        state = thermal.gibbs_state(QUBIT, 1e9)
        assert thermal.mean_energy(state, QUBIT) == pytest.approx(0.5, abs=1e-9)

    def test_mean_energy_unit_temperature(self):
        state = thermal.gibbs_state(QUBIT, 1.0)
        expected = math.exp(-1.0) / (1.0 + math.exp(-1.0))
        assert thermal.mean_energy(state, QUBIT) == pytest.approx(expected, rel=1e-14)

    def test_mean_energy_cold_limit(self):
        ladder = spectra.harmonic(3, 1.0)
        state = thermal.gibbs_state(ladder, 1e-3)
        assert abs(thermal.mean_energy(state, ladder)) < 1e-12

    def test_variance_qubit(self):
        state = thermal.gibbs_state(QUBIT, 1.0)
        expected = (1.0 / math.cosh(0.5)) ** 2 / 4.0
        assert thermal.energy_variance(state, QUBIT) == pytest.approx(expected, rel=1e-13)

    def test_variance_hot_limit_symmetric_two_point(self):
        state = thermal.gibbs_state(spectra.harmonic(2, 3.0), 1e9)
        assert thermal.energy_variance(state, spectra.harmonic(2, 3.0)) == pytest.approx(
            9.0 / 4.0, abs=1e-8
        )

    def test_variance_truncated_oscillator(self):
        osc = spectra.oscillator_truncated(1.0, 1.0, 1e-14)
        state = thermal.gibbs_state(osc, 1.0)
        expected = (1.0 / math.sinh(0.5)) ** 2 / 4.0
        assert thermal.energy_variance(state, osc) == pytest.approx(expected, rel=1e-12)

    def test_alignment_is_enforced(self):
        state = thermal.gibbs_state(QUBIT, 1.0)
        other = spectra.harmonic(3, 1.0)
        with pytest.raises(thermal.AlignmentError):
            thermal.mean_energy(state, other)
        with pytest.raises(thermal.AlignmentError):
            thermal.energy_variance(state, other)

    def test_alignment_accepts_equal_levels(self):
        state = thermal.gibbs_state(QUBIT, 1.0)
        clone = spectra.harmonic(2, 1.0)
        assert thermal.mean_energy(state, clone) == state.mean_energy


class TestProperties:
    @pytest.mark.parametrize(
        "spectrum",
        [
            QUBIT,
            spectra.three_level(1.0, 3.0),
            spectra.degenerate_staircase([(0, 1), (1, 1), (5, 100), (25, 10**6)]),
        ],
    )
    def test_normalization_over_wide_grid(self, spectrum):
        for temp in np.logspace(-4, 6, 41):
            state = thermal.gibbs_state(spectrum, temp)
            assert abs(state.populations.sum() - 1.0) <= 1e-12

    def test_mean_energy_monotone_in_temperature(self):
        spectrum = spectra.degenerate_staircase([(0, 1), (1, 1), (5, 100), (25, 10**6)])
        temps = np.logspace(-2, 3, 200)
        means = [thermal.gibbs_state(spectrum, t).mean_energy for t in temps]
        assert np.all(np.diff(means) >= -1e-12)

    def test_variance_identity_matches_population_qfi(self):
        spectra_list = [
            QUBIT,
            spectra.three_level(1.0, 1.0),
            spectra.degenerate_staircase([(0, 1), (1, 1), (5, 100), (25, 10**6)]),
        ]
        for spectrum in spectra_list:
            for temp in np.logspace(np.log10(0.05), np.log10(20.0), 12):
                state = thermal.gibbs_state(spectrum, temp)
                variance_route = thermal.energy_variance(state, spectrum) / temp**4
                population_route = qfi_population(spectrum, temp)
                if population_route == 0.0:
                    assert variance_route == 0.0
                else:
                    assert abs(variance_route - population_route) / population_route < 1e-10

    def test_populations_are_immutable(self):
        state = thermal.gibbs_state(QUBIT, 1.0)
        with pytest.raises(ValueError):
            state.populations[0] = 0.9
