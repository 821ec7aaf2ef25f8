"""Resonance design and metrology formulas.

Closed-form resonance conditions give quick design answers; the field
solver backs them with a full-model refinement that relocates the actual
avoided-crossing center, since the small-angle condition is only accurate
to second order in the tilt angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DivergenceError,
    InvalidArgumentError,
    NoCrossingError,
    RegimeError,
)
from .floquet import _pair_state, auto_harmonics, avoided_crossing
from .model import RotorParams, derived_scales, small_angle_guard

__all__ = [
    "ResonanceSolution",
    "resonant_omega",
    "resonant_field",
    "angle_uncertainty",
]

_BRANCH_PAIR = {"plus": ("m0", "m+1"), "minus": ("m0", "m-1")}


@dataclass(frozen=True)
class ResonanceSolution:
    value: float       # solved parameter (field strength here)
    branch: str        # "plus" (0 <-> +1) or "minus" (0 <-> -1)
    residual: float    # full-model crossing-center mismatch after refinement


def _check_branch(branch: str) -> None:
    if branch not in _BRANCH_PAIR:
        raise InvalidArgumentError("branch must be 'plus' or 'minus'")


def resonant_omega(theta: float, branch: str = "plus", d: float = 1.0) -> float:
    """Rotation frequency that brings the tilted spin into resonance
    without a field: +d/cos(theta) for the 0 <-> +1 branch, the negative
    for 0 <-> -1. Diverges as the tilt approaches a right angle."""
    _check_branch(branch)
    if not 0.0 <= theta <= math.pi:
        raise InvalidArgumentError("theta must lie in [0, pi]")
    if theta >= math.pi / 2.0 - 1e-6:
        raise DivergenceError("resonant frequency diverges as theta -> pi/2")
    value = d / math.cos(theta)
    return value if branch == "plus" else -value


def _small_angle_residual(delta: float, theta: float, omega: float,
                          branch: str, d: float) -> float:
    sc = derived_scales(RotorParams(omega=omega, theta=theta, d=d, delta=delta))
    if branch == "plus":
        return sc.d_tilde - sc.delta_tilde - omega
    return sc.d_tilde + sc.delta_tilde + omega


def resonant_field(
    theta: float,
    omega: float,
    branch: str = "plus",
    d: float = 1.0,
    refine: bool = True,
) -> ResonanceSolution:
    """Axial field strength that compensates the detuning at a given
    rotation frequency.

    The second-order small-angle condition is solved first (lowest root in
    the field); the answer is then refined against the full driven model by
    relocating the avoided-crossing center to the requested frequency.
    """
    _check_branch(branch)
    if omega == 0:
        raise InvalidArgumentError("omega must be nonzero")

    if theta == 0:
        # exact: the tilde corrections vanish and the condition is linear
        value = d - omega if branch == "plus" else d + omega
        if not 0.0 < value < d:
            raise RegimeError(f"no resonant field in (0, {d:.3g}) at theta = 0")
        return ResonanceSolution(value=value, branch=branch, residual=0.0)

    grid = np.linspace(0.0, 0.98 * d, 2001)
    g = np.array([_small_angle_residual(x, theta, omega, branch, d) for x in grid])
    sign_change = np.nonzero(np.sign(g[:-1]) != np.sign(g[1:]))[0]
    if len(sign_change) > 0:
        i = int(sign_change[0])
        root = float(brentq(_small_angle_residual, grid[i], grid[i + 1],
                            args=(theta, omega, branch, d), xtol=1e-12 * d))
    elif abs(g[0]) < 1e-3 * d:
        # root sits at (or just below) the zero-field boundary
        slope = (g[1] - g[0]) / (grid[1] - grid[0])
        root = grid[0] - g[0] / slope if slope != 0 else grid[0]
        root = float(min(max(root, 0.0), 0.98 * d))
    else:
        raise RegimeError(
            f"no resonant field in (0, {d:.3g}) for theta = {theta:.4g}, "
            f"omega = {omega:.4g}"
        )
    if root > 1e-6 * d:
        small_angle_guard(d, root, theta)
    if not refine:
        return ResonanceSolution(value=root, branch=branch, residual=math.nan)

    pair = _BRANCH_PAIR[branch]
    p_ref = RotorParams(omega=omega, theta=theta, d=d, delta=root)
    nh = auto_harmonics(p_ref)[0]

    def center_mismatch(delta: float) -> float:
        p = p_ref.with_(delta=float(delta))
        rep = avoided_crossing(p, pair, (0.85 * omega, 1.15 * omega),
                               axis="omega", points=65, n_harmonics=nh)
        return rep.omega_res - omega

    # the crossing center moves roughly one-to-one with the field, so a
    # narrow bracket around the small-angle root keeps it inside the window
    lo = max(0.0, root - 0.02 * d)
    hi = min(0.995 * d, root + 0.02 * d)
    try:
        f_lo, f_hi = center_mismatch(lo), center_mismatch(hi)
        bracketed = f_lo * f_hi <= 0
    except NoCrossingError:
        bracketed = False
    if not bracketed:
        # the small-angle root is already the best available answer
        return ResonanceSolution(value=root, branch=branch,
                                 residual=abs(center_mismatch(root)))
    value = float(brentq(center_mismatch, lo, hi, xtol=1e-8 * d))
    return ResonanceSolution(value=value, branch=branch,
                             residual=abs(center_mismatch(value)))


def angle_uncertainty(omega: float, theta: float, delta_rabi: float) -> float:
    """Tilt-angle uncertainty propagated from an uncertainty of the
    measured coupling strength: delta_rabi / (sqrt(2) |omega| cos theta)."""
    if omega == 0:
        raise InvalidArgumentError("omega must be nonzero")
    if delta_rabi < 0:
        raise InvalidArgumentError("delta_rabi must be nonnegative")
    c = abs(math.cos(theta))
    if c < 1e-6:
        raise DivergenceError("angle uncertainty diverges as theta -> pi/2")
    return delta_rabi / (math.sqrt(2.0) * abs(omega) * c)
