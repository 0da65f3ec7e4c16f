import json
import math

import numpy as np
import pytest

from qtherm import spectra
from qtherm.metrology import qfi_population
from qtherm.thermal import gibbs_state


class TestHarmonic:
    def test_two_level_ladder(self):
        s = spectra.harmonic(2, 1.0)
        assert s.energies.tolist() == [0.0, 1.0]
        assert s.multiplicities.tolist() == [1, 1]

    def test_arithmetic_ladder(self):
        s = spectra.harmonic(4, 0.5)
        assert s.energies.tolist() == [0.0, 0.5, 1.0, 1.5]
        assert s.multiplicities.tolist() == [1, 1, 1, 1]

    def test_dimension_and_max_energy(self):
        s = spectra.harmonic(3, 2.0)
        assert s.dimension == 3
        assert s.max_energy == 4.0

    @pytest.mark.parametrize("d,gap", [(1, 1.0), (2, 0.0), (2, -1.0)])
    def test_invalid_arguments(self, d, gap):
        with pytest.raises(spectra.SpectrumError):
            spectra.harmonic(d, gap)


class TestOscillatorTruncated:
    def test_unit_gap_tight_tolerance(self):
        # exp(-d * gap / T) < tol needs d ~ 37; the energy-weighted bound adds margin
        s = spectra.oscillator_truncated(1.0, 1.0, 1e-16)
        assert 37 <= s.dimension <= 55
        assert s.energies[1] == 1.0

    def test_cold_cutoff_is_tiny(self):
        s = spectra.oscillator_truncated(1.0, 0.01, 1e-12)
        assert 2 <= s.dimension <= 5

    def test_double_gap_halves_dimension(self):
        s = spectra.oscillator_truncated(2.0, 1.0, 1e-16)
        assert 19 <= s.dimension <= 28

    def test_truncation_cap(self):
        with pytest.raises(spectra.TruncationError):
            spectra.oscillator_truncated(1e-6, 1.0, 1e-16)

    @pytest.mark.parametrize("args", [(0.0, 1.0, 1e-6), (1.0, -1.0, 1e-6), (1.0, 1.0, 0.0), (1.0, 1.0, 1.5)])
    def test_invalid_arguments(self, args):
        with pytest.raises(spectra.SpectrumError):
            spectra.oscillator_truncated(*args)

    @pytest.mark.parametrize("tol", [1e-8, 1e-10, 1e-12])
    def test_qfi_error_guarantee(self, tol):
        # truncation must keep the relative QFI error below the tail tolerance
        s = spectra.oscillator_truncated(1.0, 1.0, tol)
        reference = spectra.harmonic(s.dimension + 400, 1.0)
        for temp in (0.3, 0.7, 1.0):
            got = qfi_population(s, temp)
            ref = qfi_population(reference, temp)
            assert abs(got - ref) / ref < tol


class TestThreeLevel:
    def test_equal_spacing_matches_harmonic(self):
        assert spectra.three_level(1.0, 2.0).same_levels(spectra.harmonic(3, 1.0))

    def test_degenerate_excited_level_merges(self):
        s = spectra.three_level(1.0, 1.0)
        assert s.energies.tolist() == [0.0, 1.0]
        assert s.multiplicities.tolist() == [1, 2]

    def test_wide_second_gap(self):
        s = spectra.three_level(1.0, 3.0)
        assert s.energies.tolist() == [0.0, 1.0, 3.0]
        assert s.multiplicities.tolist() == [1, 1, 1]

    def test_gap_ordering_enforced(self):
        with pytest.raises(spectra.SpectrumError):
            spectra.three_level(2.0, 1.0)


class TestDegenerateStaircase:
    def test_heavily_degenerate_block_spectrum(self):
        s = spectra.degenerate_staircase([(0, 1), (1, 1), (5, 100), (25, 10**6)])
        assert s.num_levels == 4
        assert s.dimension == 10**6 + 102

    def test_compressed_gaps_variant(self):
        s = spectra.degenerate_staircase([(0, 1), (1, 1), (4, 100), (15, 10**6)])
        assert s.energies.tolist() == [0.0, 1.0, 4.0, 15.0]

    def test_merge_equivalence_with_three_level(self):
        s = spectra.degenerate_staircase([(0, 1), (1, 2)])
        assert s.same_levels(spectra.three_level(1.0, 1.0))

    def test_duplicate_energies_merge_with_warning(self):
        with pytest.warns(spectra.DuplicateLevelWarning):
            s = spectra.degenerate_staircase([(0, 1), (1.0, 1), (1.0, 2)])
        assert s.energies.tolist() == [0.0, 1.0]
        assert s.multiplicities.tolist() == [1, 3]

    def test_negative_multiplicity_rejected(self):
        with pytest.raises(spectra.SpectrumError):
            spectra.degenerate_staircase([(0, 1), (1, -2)])

    def test_negative_energy_rejected(self):
        with pytest.raises(spectra.SpectrumError):
            spectra.degenerate_staircase([(-1, 1), (1, 1)])

    def test_degenerate_ground_rejected(self):
        with pytest.raises(spectra.SpectrumError):
            spectra.degenerate_staircase([(0, 2), (1, 1)])

    def test_gaps_reading_accumulates(self):
        s = spectra.staircase_from_gaps([(0, 1), (1, 1), (5, 100), (25, 10**6)])
        assert s.energies.tolist() == [0.0, 1.0, 6.0, 31.0]


class TestParseSpectrum:
    def test_qubit_roundtrip(self):
        s = spectra.parse_spectrum('{"levels":[{"energy":0,"g":1},{"energy":1,"g":1}]}')
        assert s.same_levels(spectra.harmonic(2, 1.0))

    def test_shift_normalization(self):
        s = spectra.parse_spectrum('{"levels":[{"energy":3,"g":1},{"energy":4,"g":2}]}')
        assert s.energies.tolist() == [0.0, 1.0]
        assert s.multiplicities.tolist() == [1, 2]

    def test_order_insensitive(self):
        a = spectra.parse_spectrum('{"levels":[{"energy":1,"g":2},{"energy":0,"g":1}]}')
        b = spectra.parse_spectrum('{"levels":[{"energy":0,"g":1},{"energy":1,"g":2}]}')
        assert a.same_levels(b)

    def test_empty_levels_is_schema_error(self):
        with pytest.raises(spectra.SpectrumSchemaError):
            spectra.parse_spectrum('{"levels":[]}')

    def test_malformed_json_is_format_error(self):
        with pytest.raises(spectra.SpectrumFormatError):
            spectra.parse_spectrum('{"levels": [')

    @pytest.mark.parametrize(
        "text",
        [
            '{"nope": 1}',
            '{"levels": [{"energy": 0}]}',
            '{"levels": [{"energy": 0, "g": 0}, {"energy": 1, "g": 1}]}',
            '{"levels": [{"energy": 0, "g": 1.5}, {"energy": 1, "g": 1}]}',
            '{"levels": [{"energy": "x", "g": 1}, {"energy": 1, "g": 1}]}',
        ],
    )
    def test_schema_violations(self, text):
        with pytest.raises(spectra.SpectrumSchemaError):
            spectra.parse_spectrum(text)

    def test_single_level_rejected(self):
        with pytest.raises(spectra.SpectrumError):
            spectra.parse_spectrum('{"levels":[{"energy":0,"g":3}]}')

    def test_json_roundtrip(self):
        s = spectra.three_level(1.0, 3.0)
        again = spectra.parse_spectrum(s.to_json())
        assert s.same_levels(again)
        assert json.loads(s.to_json())["levels"][0] == {"energy": 0.0, "g": 1}

    def test_gaps_flag(self):
        text = '{"levels":[{"energy":0,"g":1},{"energy":1,"g":1},{"energy":5,"g":100}]}'
        s = spectra.parse_spectrum(text, gaps=True)
        assert s.energies.tolist() == [0.0, 1.0, 6.0]


class TestInvariants:
    def test_arrays_are_immutable(self):
        s = spectra.harmonic(3, 1.0)
        with pytest.raises(ValueError):
            s.energies[0] = 5.0

    def test_shift_invariance_of_qfi(self):
        # constructing from shifted raw levels must not change the QFI
        base = spectra.parse_spectrum(
            '{"levels":[{"energy":0,"g":1},{"energy":1.5,"g":2},{"energy":4,"g":1}]}'
        )
        shifted = spectra.parse_spectrum(
            '{"levels":[{"energy":7,"g":1},{"energy":8.5,"g":2},{"energy":11,"g":1}]}'
        )
        for temp in (0.2, 1.0, 7.0):
            a = qfi_population(base, temp)
            b = qfi_population(shifted, temp)
            assert abs(a - b) / a < 1e-12

    def test_merge_equivalence_at_qfi_level(self):
        with pytest.warns(spectra.DuplicateLevelWarning):
            merged = spectra.degenerate_staircase([(0, 1), (2.0, 2), (2.0, 3)])
        direct = spectra.degenerate_staircase([(0, 1), (2.0, 5)])
        for temp in (0.5, 1.0, 3.0):
            assert qfi_population(merged, temp) == qfi_population(direct, temp)
            sa = gibbs_state(merged, temp)
            sb = gibbs_state(direct, temp)
            assert sa.populations.tolist() == sb.populations.tolist()

    def test_scaled_spectrum(self):
        s = spectra.three_level(1.0, 3.0)
        doubled = s.scaled(2.0)
        assert doubled.energies.tolist() == [0.0, 2.0, 6.0]
        assert math.isclose(doubled.first_gap, 2.0)
        with pytest.raises(spectra.SpectrumError):
            s.scaled(0.0)

    def test_ground_energy_always_zero(self):
        s = spectra.degenerate_staircase([(2.0, 1), (3.0, 4)])
        assert s.energies[0] == 0.0
        assert np.all(np.diff(s.energies) > 0)
