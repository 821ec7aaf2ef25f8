import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rotorspin.errors import InvalidArgumentError, NoCrossingError, TrackingError
from rotorspin.floquet import (
    LABELS,
    avoided_crossing,
    cubic_quasienergies,
    floquet_matrix,
    fold,
    physical_modes,
    quasienergies_zero_field,
    quasienergy_spectrum,
)
from rotorspin.model import RotorParams, h_interaction, static_part
from rotorspin.spin_algebra import hermitian_eigensystem, hermiticity_defect

RNG = np.random.default_rng(99)


def fold_dist(a, b, omega):
    w = abs(omega)
    d = (a - b) % w
    return min(d, w - d)


class TestCubic:
    def test_static_limit_roots(self):
        np.testing.assert_allclose(cubic_quasienergies(1.0, 0.0, 0.7),
                                   [0.0, 1.0, 1.0], atol=1e-12)

    def test_axis_aligned_roots(self):
        np.testing.assert_allclose(cubic_quasienergies(1.0, 0.4, 0.0),
                                   [0.0, 0.6, 1.4], atol=1e-12)

    def test_roots_match_eigensolver(self):
        p = RotorParams(omega=0.7, theta=1.1)
        roots = cubic_quasienergies(1.0, 0.7, 1.1)
        vals = hermitian_eigensystem(h_interaction(p)).values
        np.testing.assert_allclose(roots, vals, atol=1e-10)

    @settings(max_examples=200, deadline=None)
    @given(omega=st.floats(0.0, 3.0), theta=st.floats(0.0, math.pi))
    def test_vieta_identities(self, omega, theta):
        r = cubic_quasienergies(1.0, omega, theta)
        assert r.sum() == pytest.approx(2.0, abs=1e-10)
        pairwise = r[0] * r[1] + r[0] * r[2] + r[1] * r[2]
        assert pairwise == pytest.approx(1.0 - omega**2, abs=1e-10)
        assert r.prod() == pytest.approx(-omega**2 * math.sin(theta)**2,
                                         abs=1e-10)


class TestZeroFieldBranches:
    def test_labels_follow_spin_character(self):
        p = RotorParams(omega=0.3, theta=0.4)
        for lab, _, vec in quasienergies_zero_field(p):
            spin = {"m+1": 0, "m0": 1, "m-1": 2}[lab]
            assert np.abs(vec[spin])**2 > 0.5

    def test_rejects_field(self):
        with pytest.raises(InvalidArgumentError):
            quasienergies_zero_field(RotorParams(omega=0.3, theta=0.4, delta=0.1))

    def test_direction_reversal_swaps_side_branches(self):
        p = RotorParams(omega=0.6, theta=0.9)
        lam_fwd = {lab: v for lab, v, _ in quasienergies_zero_field(p)}
        lam_rev = {lab: v for lab, v, _ in
                   quasienergies_zero_field(p.with_(omega=-0.6))}
        assert lam_fwd["m+1"] == pytest.approx(lam_rev["m-1"], abs=1e-10)
        assert lam_fwd["m-1"] == pytest.approx(lam_rev["m+1"], abs=1e-10)
        assert lam_fwd["m0"] == pytest.approx(lam_rev["m0"], abs=1e-10)


class TestHarmonicMatrix:
    def test_hermitian(self):
        p = RotorParams(omega=0.5, theta=0.8, delta=0.3, phi0=0.4)
        assert hermiticity_defect(floquet_matrix(p, 6)) <= 1e-12

    def test_axis_aligned_block_diagonal_spectrum(self):
        p = RotorParams(omega=0.5, theta=0.0, delta=0.2)
        n = 3
        f = floquet_matrix(p, n)
        vals = np.sort(np.linalg.eigvalsh(f))
        a_vals = np.linalg.eigvalsh(static_part(p))
        expected = np.sort(np.concatenate(
            [a_vals + k * p.omega for k in range(-n, n + 1)]))
        np.testing.assert_allclose(vals, expected, atol=1e-10)

    def test_contains_folded_cubic_roots(self):
        p = RotorParams(omega=0.5, theta=math.pi / 4)
        roots = cubic_quasienergies(1.0, 0.5, math.pi / 4)
        quasi = physical_modes(p, 8).quasi
        for r in fold(roots, p.omega):
            assert min(fold_dist(r, q, p.omega) for q in quasi) <= 1e-9

    def test_rejects_zero_frequency(self):
        with pytest.raises(InvalidArgumentError):
            floquet_matrix(RotorParams(omega=0.0, theta=0.1), 4)


class TestSpectrumSweep:
    def test_axis_aligned_branches_linear(self):
        values = np.linspace(0.0, 1.2, 25)
        sp = quasienergy_spectrum(RotorParams(omega=0.0, theta=0.0), "omega",
                                  values)
        np.testing.assert_allclose(sp.branch("m0").quasienergy,
                                   np.zeros_like(values), atol=1e-10)
        np.testing.assert_allclose(sp.branch("m+1").quasienergy, 1.0 - values,
                                   atol=1e-10)
        np.testing.assert_allclose(sp.branch("m-1").quasienergy, 1.0 + values,
                                   atol=1e-10)

    def test_mode_norms_and_lengths(self):
        values = np.linspace(0.0, 1.0, 15)
        sp = quasienergy_spectrum(RotorParams(omega=0.0, theta=0.2), "omega",
                                  values)
        for lab in LABELS:
            b = sp.branch(lab)
            assert len(b.quasienergy) == len(values)
            norms = np.linalg.norm(b.mode0, axis=1)
            np.testing.assert_allclose(norms, 1.0, atol=1e-10)

    def test_field_sweep_crosses_near_design_point(self):
        # branches m0 and m+1 approach each other near the compensated
        # resonance frequency
        values = np.linspace(0.1, 0.3, 41)
        sp = quasienergy_spectrum(
            RotorParams(omega=0.1, theta=math.pi / 100, delta=0.803),
            "omega", values)
        gap = np.abs(sp.branch("m0").quasienergy - sp.branch("m+1").quasienergy)
        i = int(np.argmin(gap))
        assert 0 < i < len(values) - 1
        assert abs(values[i] - 0.2) < 0.02

    def test_rejects_unsorted_axis(self):
        with pytest.raises(InvalidArgumentError):
            quasienergy_spectrum(RotorParams(omega=0.0, theta=0.1), "omega",
                                 [0.5, 0.2])

    def test_start_inside_mixed_near_degeneracy_fails(self):
        # at a vanishing tilt the compensated crossing becomes nearly exact
        # while the states stay fully mixed, so labeling cannot start there
        p = RotorParams(omega=0.2, theta=1e-6, delta=0.8)
        with pytest.raises(TrackingError):
            quasienergy_spectrum(p, "omega", np.linspace(0.2, 0.21, 5),
                                 n_harmonics=12)


class TestAvoidedCrossing:
    def test_zero_field_resonance_location_and_gap(self):
        th = math.pi / 20
        rep = avoided_crossing(RotorParams(omega=1.0, theta=th),
                               ("m0", "m+1"), (0.9, 1.15))
        assert rep.omega_res == pytest.approx(1.0 / math.cos(th), rel=2e-2)
        assert rep.gap == pytest.approx(math.sqrt(2) * rep.omega_res
                                        * math.sin(th), rel=1e-2)

    def test_uncoupled_crossing_raises(self):
        with pytest.raises(NoCrossingError):
            avoided_crossing(RotorParams(omega=1.0, theta=0.0),
                             ("m0", "m+1"), (0.9, 1.1))

    def test_no_minimum_in_window_raises(self):
        with pytest.raises(NoCrossingError):
            avoided_crossing(RotorParams(omega=1.0, theta=math.pi / 20),
                             ("m0", "m+1"), (0.2, 0.5))

    def test_second_order_gap_on_tilt_axis(self):
        rep = avoided_crossing(RotorParams(omega=0.05, theta=math.pi / 2),
                               ("m+1", "m-1"),
                               (math.pi / 2 - 0.3, math.pi / 2 + 0.3),
                               axis="theta")
        assert rep.gap == pytest.approx(0.05**2, rel=0.1)


class TestFold:
    def test_window_membership(self):
        x = RNG.uniform(-10, 10, size=50)
        f = fold(x, 0.7)
        assert np.all(f >= -0.35) and np.all(f < 0.35)

    def test_folding_is_idempotent(self):
        x = RNG.uniform(-10, 10, size=50)
        np.testing.assert_allclose(fold(fold(x, 0.7), 0.7), fold(x, 0.7),
                                   atol=1e-12)

    def test_shift_by_frequency_invariant(self):
        x = RNG.uniform(-3, 3, size=20)
        np.testing.assert_allclose(fold(x + 0.7, 0.7), fold(x, 0.7), atol=1e-12)
