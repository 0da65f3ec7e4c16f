"""Quantum-speed-limit functionals over probe trajectories.

The speed bound reads v_QSL = ||D(rho)||_op / (cos B sin B) with B the
Bures angle between the initial and current states, and the minimal
evolution time for a window [0, tau] is tau_QSL = sin^2(B(tau)) / (2 E_tau)
with E_tau the time-averaged generator norm.

Both protocols in :mod:`qtherm.dynamics` start from the probe ground state
and keep the probe diagonal, so fidelities reduce to the classical
Bhattacharyya overlap of the populations; the general Uhlmann fidelity is
deliberately not implemented.  For a ground start both protocols obey
sin^2 B = p_e(tau) and E_tau = p_e(tau)/tau (the swap model up to half a
swap period), which forces tau_QSL = tau/2 independent of every parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .dynamics import MarkovParams, Trajectory, hermitian_eigendecomposition

__all__ = [
    "QslReport",
    "UndefinedAtOriginError",
    "fidelity_diagonal",
    "bures_angle",
    "generator_op_norm",
    "v_qsl",
    "e_tau",
    "tau_qsl",
    "v_qsl_markov_closed",
    "evaluate_qsl",
]

_NORM_TOL = 1e-10
_CLAMP = 1e-15


class UndefinedAtOriginError(ValueError):
    """The speed bound is 0/0 at zero Bures angle (the initial instant)."""


def fidelity_diagonal(p, q) -> float:
    """Fidelity of two commuting (diagonal) states: sum_k sqrt(p_k q_k)."""
    pa = np.asarray(p, dtype=float)
    qa = np.asarray(q, dtype=float)
    if pa.shape != qa.shape or pa.ndim != 1:
        raise ValueError("population vectors must be aligned 1-d arrays")
    if np.any(pa < -_NORM_TOL) or np.any(qa < -_NORM_TOL):
        raise ValueError("populations must be non-negative")
    if abs(pa.sum() - 1.0) > _NORM_TOL or abs(qa.sum() - 1.0) > _NORM_TOL:
        raise ValueError("populations must be normalized to 1 within 1e-10")
    return float(np.sum(np.sqrt(np.clip(pa, 0.0, None) * np.clip(qa, 0.0, None))))


def bures_angle(fidelity: float) -> float:
    """Bures angle arccos(F), tolerating 1e-15 of rounding slop around [0, 1]."""
    f = float(fidelity)
    if f < -_CLAMP or f > 1.0 + _CLAMP:
        raise ValueError(f"fidelity {f!r} lies outside [0, 1]")
    return math.acos(min(max(f, 0.0), 1.0))


def generator_op_norm(generator) -> float:
    """Operator norm (largest absolute eigenvalue) of a Hermitian generator."""
    w, _ = hermitian_eigendecomposition(generator)
    return float(np.max(np.abs(w)))


def _op_norms_2x2(gens: np.ndarray) -> np.ndarray:
    """Vectorized operator norms of Hermitian 2x2 matrices (exact eigenvalues)."""
    a = gens[:, 0, 0].real
    d = gens[:, 1, 1].real
    b = gens[:, 0, 1]
    half_tr = 0.5 * (a + d)
    disc = np.sqrt((0.5 * (a - d)) ** 2 + np.abs(b) ** 2)
    return np.maximum(np.abs(half_tr + disc), np.abs(half_tr - disc))


def _bures_series(traj: Trajectory) -> np.ndarray:
    p0 = traj.states[0, [0, 1], [0, 1]].real
    pt = traj.states[:, [0, 1], [0, 1]].real
    fid = np.sum(np.sqrt(np.clip(p0[None, :] * pt, 0.0, None)), axis=1)
    return np.arccos(np.clip(fid, -1.0, 1.0))


def v_qsl(traj: Trajectory, index: int) -> float:
    """Speed bound at one trajectory point, measured from the trajectory start."""
    b = float(_bures_series(traj)[index])
    if b == 0.0:
        raise UndefinedAtOriginError("Bures angle is zero; the speed bound is 0/0 here")
    denom = math.cos(b) * math.sin(b)
    if denom == 0.0:
        raise ValueError("speed bound undefined at Bures angle pi/2")
    return generator_op_norm(traj.generators[index]) / denom


def _window_index(traj: Trajectory, tau: float) -> int:
    t = traj.times
    if t[0] != 0.0:
        raise ValueError("window evaluation needs a trajectory starting at t = 0")
    idx = int(np.argmin(np.abs(t - tau)))
    if abs(t[idx] - tau) > 1e-9 * max(abs(tau), 1.0):
        raise ValueError(f"tau = {tau!r} is not a trajectory grid point")
    if idx + 1 < 100:
        raise ValueError("window needs at least 100 trajectory points over [0, tau]")
    return idx


def e_tau(traj: Trajectory, tau: float) -> float:
    """Time-averaged generator norm over [0, tau] by composite Simpson integration."""
    idx = _window_index(traj, tau)
    norms = _op_norms_2x2(traj.generators[: idx + 1])
    return float(simpson(norms, x=traj.times[: idx + 1]) / traj.times[idx])


def tau_qsl(traj: Trajectory, tau: float) -> float:
    """Minimal evolution time sin^2(B(tau)) / (2 E_tau) for the window [0, tau]."""
    idx = _window_index(traj, tau)
    b = float(_bures_series(traj)[idx])
    return math.sin(b) ** 2 / (2.0 * e_tau(traj, tau))


def v_qsl_markov_closed(params: MarkovParams, t):
    """Analytic speed bound for the thermalizing qubit from the ground start.

    gamma n_bar exp(-Gamma t) / sqrt(p_e(t) (1 - p_e(t))); equals the
    trajectory-based evaluation to better than 1e-8 wherever both exist.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise ValueError("the closed-form speed needs t > 0")
    n_bar = params.n_bar
    rate = params.total_rate
    p_e = n_bar / (2.0 * n_bar + 1.0) * (-np.expm1(-rate * t_arr))
    out = params.coupling * n_bar * np.exp(-rate * t_arr) / np.sqrt(p_e * (1.0 - p_e))
    return out if t_arr.ndim else float(out)


@dataclass(frozen=True, eq=False)
class QslReport:
    """Speed-limit series plus per-window quantities for one trajectory.

    The series excludes the initial instant (zero Bures angle, undefined
    speed).  Windows are the requested tau values with their time-averaged
    generator norm and QSL time.
    """

    times: np.ndarray
    fidelities: np.ndarray
    bures: np.ndarray
    generator_norms: np.ndarray
    speeds: np.ndarray
    window_taus: np.ndarray
    e_tau_values: np.ndarray
    tau_qsl_values: np.ndarray

    def __post_init__(self):
        if np.any(self.fidelities < 0.0) or np.any(self.fidelities > 1.0):
            raise ValueError("fidelity left [0, 1]")
        if np.any(self.bures < 0.0) or np.any(self.bures > math.pi / 2):
            raise ValueError("Bures angle left [0, pi/2]")
        if np.any(self.speeds < 0.0):
            raise ValueError("speed bound went negative")
        if np.any(self.tau_qsl_values <= 0.0) or np.any(
            self.tau_qsl_values > self.window_taus * (1.0 + 1e-12)
        ):
            raise ValueError("tau_QSL left (0, tau]")


def evaluate_qsl(traj: Trajectory, taus=None) -> QslReport:
    """Evaluate the full speed-limit report over a ground-start trajectory.

    ``taus`` defaults to every positive grid time with nonzero Bures angle.
    The running integral of the generator norm uses cumulative composite
    Simpson, so the whole window series costs one pass.
    """
    t = traj.times
    if t[0] != 0.0:
        raise ValueError("QSL evaluation needs a trajectory starting at t = 0")
    bures = _bures_series(traj)
    fid = np.cos(bures)
    norms = _op_norms_2x2(traj.generators)
    defined = np.ones(t.size, dtype=bool)
    defined[0] = False
    defined &= bures > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        speeds = np.where(defined, norms / (np.cos(bures) * np.sin(bures)), 0.0)

    running = cumulative_simpson(norms, x=t, initial=0.0)
    if taus is None:
        window_mask = defined
    else:
        window_mask = np.zeros(t.size, dtype=bool)
        for tau in np.atleast_1d(np.asarray(taus, dtype=float)):
            window_mask[_window_index(traj, float(tau))] = True
        window_mask &= bures > 0.0
        window_mask[0] = False
    taus_out = t[window_mask]
    e_vals = running[window_mask] / taus_out
    tau_vals = np.sin(bures[window_mask]) ** 2 / (2.0 * e_vals)
    return QslReport(
        times=t[defined],
        fidelities=fid[defined],
        bures=bures[defined],
        generator_norms=norms[defined],
        speeds=speeds[defined],
        window_taus=taus_out,
        e_tau_values=e_vals,
        tau_qsl_values=tau_vals,
    )
