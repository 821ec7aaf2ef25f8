"""Quasi-energy computation and branch bookkeeping.

Without a static field the three quasi-energies are the roots of a cubic
and come straight from the time-independent frame Hamiltonian. With a field
the periodic drive cannot be rotated away, so the spectrum comes from a
truncated harmonic (block-tridiagonal) matrix, folded into a window of
width |omega| and unfolded again for plotting via the slope rule that
connects each branch to its zero-rotation eigenvalue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize_scalar

from .errors import (
    InvalidArgumentError,
    NoCrossingError,
    NumericFailureError,
    TrackingError,
)
from .model import RotorParams, drive_amplitude, h_interaction, static_part
from .spin_algebra import hermitian_eigensystem

__all__ = [
    "LABELS",
    "SPIN_INDEX",
    "QuasiSpectrum",
    "SpectrumBranch",
    "CrossingReport",
    "cubic_quasienergies",
    "quasienergies_zero_field",
    "floquet_matrix",
    "auto_harmonics",
    "physical_modes",
    "quasienergy_spectrum",
    "avoided_crossing",
    "fold",
]

#: Branch labels in fixed output order.
LABELS = ("m-1", "m0", "m+1")

#: Spin component index (basis order (+1, 0, -1)) for each branch label.
SPIN_INDEX = {"m+1": 0, "m0": 1, "m-1": 2}

#: Unfolding slope rule: harmonic shift per unit omega attached to each branch.
SLOPE = {"m+1": -1.0, "m0": 0.0, "m-1": +1.0}


def fold(x, omega: float):
    """Reduce quasi-energies to the window [-|omega|/2, |omega|/2)."""
    w = abs(omega)
    return ((np.asarray(x) + w / 2.0) % w) - w / 2.0


def _circ_dist(a: float, b: float, omega: float) -> float:
    """Distance between two quasi-energies modulo the folding width."""
    w = abs(omega)
    d = (a - b) % w
    return min(d, w - d)


def cubic_quasienergies(d: float, omega: float, theta: float) -> np.ndarray:
    """Three real quasi-energies at zero field, ascending.

    Solves the characteristic cubic of the frame Hamiltonian with the
    trigonometric method for three real roots; near-degenerate cases fall
    back to the numeric eigensolver for robustness.
    """
    b = -2.0 * d
    c = -(omega * omega - d * d)
    e = omega * omega * d * math.sin(theta) ** 2
    p = c - b * b / 3.0
    q = e - b * c / 3.0 + 2.0 * b ** 3 / 27.0
    disc = -4.0 * p ** 3 - 27.0 * q * q
    scale = max(d, abs(omega)) ** 6
    if disc < 1e-13 * scale or p >= 0.0:
        # degenerate or marginal: diagonalize instead
        h = h_interaction(RotorParams(d=d, omega=omega, theta=theta))
        return hermitian_eigensystem(h).values
    m = 2.0 * math.sqrt(-p / 3.0)
    arg = 3.0 * q / (p * m)
    arg = min(1.0, max(-1.0, arg))
    phi = math.acos(arg) / 3.0
    roots = m * np.cos(phi - 2.0 * math.pi * np.arange(3) / 3.0) - b / 3.0
    return np.sort(roots)


def _assign_labels(weights: np.ndarray) -> dict[str, int]:
    """Map each branch label to a mode index by maximizing spin-character
    weight, as a one-to-one assignment."""
    cost = np.empty((3, 3))
    for li, lab in enumerate(LABELS):
        cost[li] = -weights[:, SPIN_INDEX[lab]]
    rows, cols = linear_sum_assignment(cost)
    return {LABELS[li]: int(cols[list(rows).index(li)]) for li in range(3)}


def quasienergies_zero_field(p: RotorParams):
    """Labeled (quasi-energy, frame eigenvector) triples at zero field.

    Quasi-energies come from the cubic; eigenvectors from the numeric
    diagonalization, matched root-to-eigenvalue. Labels follow the spin
    character so each branch connects to its slow-rotation parent level.
    """
    if p.delta != 0:
        raise InvalidArgumentError("quasienergies_zero_field requires delta = 0")
    h = h_interaction(p)
    es = hermitian_eigensystem(h)
    roots = cubic_quasienergies(p.d, p.omega, p.theta)
    # match each numeric eigenpair with its nearest analytic root
    order = np.argsort(np.abs(es.values[:, None] - roots[None, :]), axis=1)
    lams = roots[order[:, 0]]
    weights = np.abs(es.vectors.T) ** 2  # (mode, spin)
    idx = _assign_labels(weights)
    return [(lab, float(lams[idx[lab]]), es.vectors[:, idx[lab]].copy()) for lab in LABELS]


def floquet_matrix(p: RotorParams, n_harmonics: int) -> np.ndarray:
    """Block-tridiagonal harmonic-expansion matrix of the driven problem.

    Diagonal blocks are the static component shifted by n*omega for
    n = -N..N; off-diagonal blocks carry the single-harmonic drive.
    """
    if p.omega == 0:
        raise InvalidArgumentError("floquet_matrix requires omega != 0 (no period)")
    if n_harmonics < 1:
        raise InvalidArgumentError("n_harmonics must be >= 1")
    n = int(n_harmonics)
    a = static_part(p)
    b = drive_amplitude(p)
    bh = b.conj().T
    dim = 3 * (2 * n + 1)
    f = np.zeros((dim, dim), dtype=complex)
    for i, k in enumerate(range(-n, n + 1)):
        f[3 * i:3 * i + 3, 3 * i:3 * i + 3] = a + k * p.omega * np.eye(3)
        if i < 2 * n:
            f[3 * (i + 1):3 * (i + 1) + 3, 3 * i:3 * i + 3] = bh
            f[3 * i:3 * i + 3, 3 * (i + 1):3 * (i + 1) + 3] = b
    return f


@dataclass(frozen=True)
class ModeSet:
    """The three physical drive modes at one parameter point."""

    quasi: np.ndarray        # folded quasi-energies, one per mode
    fourier: np.ndarray      # (2N+1, 3, modes) harmonic coefficients
    weights: np.ndarray      # (modes, 3) time-averaged spin weights
    mode0: np.ndarray        # (3, modes) normalized state at t = 0
    n_harmonics: int


def physical_modes(p: RotorParams, n_harmonics: int) -> ModeSet:
    """Diagonalize the truncated harmonic matrix and pick the three modes
    carrying the most weight in the central harmonic block."""
    n = int(n_harmonics)
    f = floquet_matrix(p, n)
    vals, vecs = np.linalg.eigh(f)
    blocks = vecs.reshape(2 * n + 1, 3, -1)
    central = (np.abs(blocks[n]) ** 2).sum(axis=0)
    # greedy pick by central-harmonic weight, skipping harmonic copies of an
    # already chosen mode (copies share the same t = 0 state and a folded
    # quasi-energy, so they would shadow a genuine third mode)
    order = np.argsort(central)[::-1]
    states0 = blocks.sum(axis=0)
    norms0 = np.linalg.norm(states0, axis=0)
    pick = []
    for j in order:
        if norms0[j] < 1e-8:
            continue
        dup = False
        for i in pick:
            same_fold = abs(fold(vals[j] - vals[i], p.omega)) < 1e-6 * abs(p.omega)
            ov = abs(np.vdot(states0[:, i], states0[:, j])) / (norms0[i] * norms0[j])
            if same_fold and ov > 0.99:
                dup = True
                break
        if not dup:
            pick.append(int(j))
        if len(pick) == 3:
            break
    if len(pick) < 3:
        raise NumericFailureError(
            "could not isolate three distinct drive modes; raise the truncation"
        )
    pick = np.array(pick)
    quasi = fold(vals[pick], p.omega)
    fourier = blocks[:, :, pick]
    weights = (np.abs(fourier) ** 2).sum(axis=0).T  # (mode, spin)
    weights = weights / weights.sum(axis=1, keepdims=True)
    mode0 = fourier.sum(axis=0)
    mode0 = mode0 / np.linalg.norm(mode0, axis=0, keepdims=True)
    return ModeSet(quasi=quasi, fourier=fourier, weights=weights, mode0=mode0,
                   n_harmonics=n)


# Starting truncation is capped so that slow rotations (tiny omega) do not
# request enormous matrices; the doubling rule below still guarantees
# convergence of the tracked quasi-energies.
_N_START_CAP = 32
_N_MAX = 512


def auto_harmonics(p: RotorParams) -> tuple[int, float]:
    """Choose the harmonic truncation by doubling until the three tracked
    quasi-energies move less than 1e-9 * d. Returns (N, last movement)."""
    if p.omega == 0:
        raise InvalidArgumentError("auto_harmonics requires omega != 0")
    n = math.ceil(4.0 + 2.0 * max(abs(p.delta), p.d) / abs(p.omega))
    n = min(n, _N_START_CAP)
    prev = np.sort(physical_modes(p, n).quasi)
    while True:
        n2 = 2 * n
        if n2 > _N_MAX:
            raise NumericFailureError(
                f"harmonic truncation did not converge below N = {_N_MAX}"
            )
        cur = np.sort(physical_modes(p, n2).quasi)
        movement = max(
            _circ_dist(a, b, p.omega) for a, b in zip(prev, cur)
        )
        if movement < 1e-9 * p.d:
            return n2, movement
        n, prev = n2, cur


def _resolve_harmonics(p: RotorParams, n_harmonics) -> int:
    if n_harmonics == "auto" or n_harmonics is None:
        return auto_harmonics(p)[0]
    return int(n_harmonics)


@dataclass(frozen=True)
class SpectrumBranch:
    label: str
    quasienergy: np.ndarray   # unfolded slope-rule representative per point
    mode0: np.ndarray         # (points, 3) frame state at t = 0


@dataclass(frozen=True)
class QuasiSpectrum:
    axis_name: str
    axis_values: np.ndarray
    branches: tuple[SpectrumBranch, SpectrumBranch, SpectrumBranch]

    def branch(self, label: str) -> SpectrumBranch:
        for b in self.branches:
            if b.label == label:
                return b
        raise KeyError(label)


_AXIS_FIELDS = {"omega": "omega", "theta": "theta", "delta": "delta"}


def _point_modes(p: RotorParams, n_harmonics):
    """Folded quasi-energies, t=0 states and spin weights at one point.

    Returns (folded, mode0 (3, modes), weights (modes, 3), static_targets).
    """
    if p.delta == 0 and p.omega != 0:
        triples = quasienergies_zero_field(p)
        lams = np.array([t[1] for t in triples])
        mode0 = np.stack([t[2] for t in triples], axis=1)
        weights = (np.abs(mode0) ** 2).T
        return lams, mode0, weights, False
    if p.omega == 0:
        es = hermitian_eigensystem(static_part(p))
        weights = (np.abs(es.vectors) ** 2).T
        return es.values.copy(), es.vectors.copy(), weights, False
    ms = physical_modes(p, _resolve_harmonics(p, n_harmonics))
    return ms.quasi.copy(), ms.mode0.copy(), ms.weights.copy(), True


def _slope_targets(p: RotorParams) -> dict[str, float]:
    """Unfolded representative targets: static-level value plus the slope-rule
    harmonic shift for each branch."""
    es = hermitian_eigensystem(static_part(p))
    weights = (np.abs(es.vectors) ** 2).T
    idx = _assign_labels(weights)
    return {lab: float(es.values[idx[lab]] + SLOPE[lab] * p.omega) for lab in LABELS}


def _nearest_copy(folded: float, target: float, omega: float) -> float:
    w = abs(omega)
    k = round((target - folded) / w)
    return folded + k * w


def quasienergy_spectrum(
    p_template: RotorParams,
    axis: str,
    values,
    n_harmonics="auto",
) -> QuasiSpectrum:
    """Three continuously tracked quasi-energy branches along a sweep axis.

    Branches are tracked between adjacent points by maximal overlap of the
    t = 0 states, and reported as unfolded representatives chosen by the
    slope rule so the curves reproduce the familiar fan of levels emanating
    from the zero-rotation eigenvalues.
    """
    if axis not in _AXIS_FIELDS:
        raise InvalidArgumentError(f"unknown sweep axis {axis!r}")
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or len(values) < 2:
        raise InvalidArgumentError("sweep needs at least 2 axis values")
    if np.any(np.diff(values) <= 0):
        raise InvalidArgumentError("axis values must be strictly ascending")

    pts = [p_template.with_(**{_AXIS_FIELDS[axis]: float(v)}) for v in values]
    npts = len(pts)
    lam = np.empty((npts, 3))
    reps = np.empty((npts, 3))
    modes = np.empty((npts, 3, 3), dtype=complex)

    folded0, mode0, weights0, uses_fold = _point_modes(pts[0], n_harmonics)
    # refuse to start labeling inside an avoided crossing: branches must be
    # separable either by energy or by near-pure spin character
    gaps = [
        _circ_dist(folded0[i], folded0[j], pts[0].omega) if uses_fold
        else abs(folded0[i] - folded0[j])
        for i in range(3) for j in range(i + 1, 3)
    ] if pts[0].omega != 0 else [abs(folded0[i] - folded0[j])
                                 for i in range(3) for j in range(i + 1, 3)]
    if min(gaps) < 1e-6 * p_template.d and weights0.max(axis=1).min() < 0.99:
        raise TrackingError(
            "sweep starts inside a gap: branches not separable at the first point"
        )
    idx = _assign_labels(weights0)
    order = [idx[lab] for lab in LABELS]
    lam[0] = folded0[order]
    modes[0] = mode0[:, order].T

    for i in range(1, npts):
        folded, m0, _, _ = _point_modes(pts[i], n_harmonics)
        overlap = np.abs(modes[i - 1].conj() @ m0)  # (branch, mode)
        rows, cols = linear_sum_assignment(-overlap)
        perm = np.empty(3, dtype=int)
        perm[rows] = cols
        worst = overlap[np.arange(3), perm].min()
        if worst < 0.5:
            raise TrackingError(
                f"branch tracking lost between {axis} = {values[i-1]:.6g} and "
                f"{values[i]:.6g} (max overlap {worst:.3f}); use a finer grid"
            )
        lam[i] = folded[perm]
        modes[i] = m0[:, perm].T

    # unfold to slope-rule representatives
    targets = _slope_targets(pts[0]) if pts[0].omega != 0 else None
    for b, lab in enumerate(LABELS):
        if pts[0].omega == 0 or pts[0].delta == 0:
            reps[0, b] = lam[0, b]
        else:
            reps[0, b] = _nearest_copy(lam[0, b], targets[lab], pts[0].omega)
    for i in range(1, npts):
        for b in range(3):
            if pts[i].delta == 0 or pts[i].omega == 0:
                reps[i, b] = lam[i, b]
            else:
                reps[i, b] = _nearest_copy(lam[i, b], reps[i - 1, b], pts[i].omega)

    # continuity bound: movement per step limited by ~10x the local slope
    base_slope = {"omega": 1.5, "delta": 1.5,
                  "theta": (abs(p_template.omega) + p_template.d) / p_template.d}[axis]
    for i in range(2, npts):
        dx = values[i] - values[i - 1]
        slope = np.abs(reps[i - 1] - reps[i - 2]) / (values[i - 1] - values[i - 2])
        bound = 10.0 * dx * np.maximum(slope, base_slope * p_template.d)
        if np.any(np.abs(reps[i] - reps[i - 1]) > bound):
            raise TrackingError(
                f"branch continuity violated near {axis} = {values[i]:.6g}; "
                "use a finer grid"
            )

    branches = tuple(
        SpectrumBranch(label=lab, quasienergy=reps[:, b].copy(),
                       mode0=modes[:, b, :].copy())
        for b, lab in enumerate(LABELS)
    )
    return QuasiSpectrum(axis_name=axis, axis_values=values.copy(), branches=branches)


@dataclass(frozen=True)
class CrossingReport:
    omega_res: float
    gap: float
    branch_pair: tuple[str, str]


def _pair_state(p: RotorParams, pair: tuple[str, str], n_harmonics) -> tuple[float, float]:
    """(separation, mixing) of the branch pair at a single parameter point.

    The spectator branch is the one with dominant weight on the third spin
    component; the remaining two modes form the pair. Mixing is the larger
    of the pair modes' min(weight_i, weight_j) over the two pair spins, which
    peaks (with a corner) exactly at the crossing center.
    """
    folded, _, weights, uses_fold = _point_modes(p, n_harmonics)
    i, j = SPIN_INDEX[pair[0]], SPIN_INDEX[pair[1]]
    spec_spin = ({0, 1, 2} - {i, j}).pop()
    spectator = int(np.argmax(weights[:, spec_spin]))
    pm = [k for k in range(3) if k != spectator]
    if uses_fold:
        sep = _circ_dist(folded[pm[0]], folded[pm[1]], p.omega)
    else:
        sep = abs(folded[pm[0]] - folded[pm[1]])
    mixing = max(min(weights[k, i], weights[k, j]) for k in pm)
    return sep, mixing


def avoided_crossing(
    p_template: RotorParams,
    branch_pair: tuple[str, str],
    window: tuple[float, float],
    axis: str = "omega",
    points: int = 129,
    n_harmonics="auto",
) -> CrossingReport:
    """Locate an avoided crossing of two branches inside a parameter window.

    The window is scanned for an interior minimum of the pair separation;
    the crossing center is then refined as the point of maximal branch
    mixing, where the two states are equal superpositions of the crossing
    levels. The reported gap is the pair separation at that center.
    """
    if axis not in _AXIS_FIELDS:
        raise InvalidArgumentError(f"unknown crossing axis {axis!r}")
    for lab in branch_pair:
        if lab not in LABELS:
            raise InvalidArgumentError(f"unknown branch label {lab!r}")
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise InvalidArgumentError("window must satisfy lo < hi")

    xs = np.linspace(lo, hi, points)
    seps = np.empty(points)
    mix = np.empty(points)
    for k, x in enumerate(xs):
        p = p_template.with_(**{_AXIS_FIELDS[axis]: float(x)})
        seps[k], mix[k] = _pair_state(p, branch_pair, n_harmonics)
    imin = int(np.argmin(seps))
    if imin in (0, points - 1):
        raise NoCrossingError(
            f"no interior separation minimum of {branch_pair} in "
            f"[{lo:.6g}, {hi:.6g}]"
        )
    if mix.max() < 0.02:
        raise NoCrossingError(
            f"branches {branch_pair} do not mix in the window (exact crossing "
            "or no coupling)"
        )

    imix = int(np.argmax(mix))
    a = xs[max(0, imix - 3)]
    b = xs[min(points - 1, imix + 3)]

    def neg_mix(x: float) -> float:
        p = p_template.with_(**{_AXIS_FIELDS[axis]: float(x)})
        return -_pair_state(p, branch_pair, n_harmonics)[1]

    res = minimize_scalar(neg_mix, bounds=(a, b), method="bounded",
                          options={"xatol": 1e-8 * max(1.0, abs(xs[imix]))})
    center = float(res.x)
    p = p_template.with_(**{_AXIS_FIELDS[axis]: center})
    gap, _ = _pair_state(p, branch_pair, n_harmonics)
    return CrossingReport(omega_res=center, gap=float(gap),
                          branch_pair=(branch_pair[0], branch_pair[1]))
