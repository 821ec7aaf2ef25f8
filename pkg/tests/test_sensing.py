import math

import numpy as np
import pytest

from rotorspin.errors import DivergenceError, InvalidArgumentError, RegimeError
from rotorspin.sensing import angle_uncertainty, resonant_field, resonant_omega


class TestResonantOmega:
    def test_upright(self):
        assert resonant_omega(0.0) == pytest.approx(1.0)

    def test_sixty_degrees(self):
        assert resonant_omega(math.pi / 3) == pytest.approx(2.0)

    def test_minus_branch_sign(self):
        assert resonant_omega(math.pi / 3, branch="minus") == pytest.approx(-2.0)

    def test_diverges_at_right_angle(self):
        with pytest.raises(DivergenceError):
            resonant_omega(math.pi / 2)

    def test_rejects_unknown_branch(self):
        with pytest.raises(InvalidArgumentError):
            resonant_omega(0.1, branch="both")


class TestResonantField:
    def test_upright_is_linear(self):
        sol = resonant_field(0.0, 0.2)
        assert sol.value == pytest.approx(0.8)
        assert sol.residual == 0.0

    def test_upright_minus_branch_out_of_range(self):
        with pytest.raises(RegimeError):
            resonant_field(0.0, 0.2, branch="minus")

    def test_small_angle_solution_without_refinement(self):
        sol = resonant_field(math.pi / 100, 0.2, refine=False)
        assert sol.value == pytest.approx(0.803, rel=5e-3)

    def test_refined_solution_and_residual(self):
        sol = resonant_field(math.pi / 100, 0.2)
        assert sol.value == pytest.approx(0.803, rel=5e-3)
        assert sol.residual <= 1e-6

    def test_consistency_with_zero_field_resonance(self):
        th = math.pi / 100
        sol = resonant_field(th, 1.0 / math.cos(th))
        assert abs(sol.value) <= 2e-3

    def test_large_tilt_rejected(self):
        with pytest.raises(RegimeError):
            resonant_field(1.0, 0.2)


class TestAngleUncertainty:
    def test_reference_value(self):
        assert angle_uncertainty(1.0, 0.0, 0.01) \
            == pytest.approx(0.01 / math.sqrt(2))

    def test_inverse_in_frequency(self):
        a = angle_uncertainty(1.0, 0.0, 0.01)
        b = angle_uncertainty(2.0, 0.0, 0.01)
        assert b == pytest.approx(a / 2)

    def test_sixty_degrees(self):
        assert angle_uncertainty(1.0, math.pi / 3, 0.01) \
            == pytest.approx(0.0141421, rel=1e-4)

    def test_monotone_in_tilt(self):
        thetas = np.linspace(0.0, math.pi / 2 - 0.01, 50)
        vals = [angle_uncertainty(1.0, float(t), 0.01) for t in thetas]
        assert np.all(np.diff(vals) >= 0)

    def test_diverges_at_right_angle(self):
        with pytest.raises(DivergenceError):
            angle_uncertainty(1.0, math.pi / 2, 0.01)

    def test_rejects_zero_frequency(self):
        with pytest.raises(InvalidArgumentError):
            angle_uncertainty(0.0, 0.1, 0.01)
