"""Two-level probe thermalization: Markovian master equation and qubit-swap model.

Basis convention: index 0 is the excited state, index 1 the ground state,
so the free Hamiltonian is H = (gap/2) sigma_z and the thermal state is
diag(p_e, p_g).  Joint states of the swap model order the factors as
probe (x) environment via the Kronecker product.

The dissipator uses the conventional normalization with the 1/2
anticommutator.  Only with that factor is the Gibbs state the exact fixed
point, with total decay rate Gamma = gamma (2 n_bar + 1); variants that
drop the 1/2 double every rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectra import harmonic
from .thermal import gibbs_state

__all__ = [
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "SIGMA_MINUS",
    "SIGMA_PLUS",
    "DensityMatrixError",
    "MarkovParams",
    "SwapParams",
    "Trajectory",
    "validate_density_matrix",
    "hermitian_eigendecomposition",
    "partial_trace_env",
    "ground_state",
    "gibbs_qubit",
    "markov_excited_population",
    "markov_generator",
    "markov_trajectory",
    "integrate_master",
    "swap_hamiltonian",
    "swap_reduced_state",
    "swap_generator",
    "swap_trajectory",
]

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |g><e|
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |e><g|

_HERM_TOL = 1e-12
_TRACE_TOL = 1e-12
_EIG_FLOOR = -1e-10
_DIAG_TOL = 1e-12


class DensityMatrixError(ValueError):
    """A matrix violates density-matrix (or dimension) requirements."""


# ---------------------------------------------------------------------------
# small dense Hermitian linear algebra


def hermitian_eigendecomposition(matrix, tol: float = 1e-14, max_sweeps: int = 100):
    """Eigenvalues and orthonormal eigenvectors of a small Hermitian matrix.

    Cyclic Jacobi rotations with a complex phase, iterated until the
    off-diagonal Frobenius norm drops below ``tol``.  Returns eigenvalues in
    ascending order and the matching eigenvector columns, satisfying
    ``V diag(w) V^dagger == A`` to ~1e-12.
    """
    a = np.array(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DensityMatrixError("eigendecomposition needs a square matrix")
    if np.max(np.abs(a - a.conj().T)) > _HERM_TOL * max(1.0, np.max(np.abs(a))):
        raise DensityMatrixError("matrix is not Hermitian")
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                if abs(g) == 0.0:
                    continue
                # phase makes the pivot real, then a real rotation zeroes it
                phase = g / abs(g)
                theta = 0.5 * math.atan2(2.0 * abs(g), (a[q, q] - a[p, p]).real)
                c = math.cos(theta)
                s = math.sin(theta) * phase
                rot = np.eye(n, dtype=complex)
                rot[p, p] = c
                rot[p, q] = s
                rot[q, p] = -np.conj(s)
                rot[q, q] = c
                a = rot.conj().T @ a @ rot
                v = v @ rot
    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def validate_density_matrix(rho, dim: int | None = None) -> np.ndarray:
    """Check Hermiticity (1e-12), unit trace (1e-12) and spectrum >= -1e-10."""
    m = np.asarray(rho, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DensityMatrixError("density matrix must be square")
    if dim is not None and m.shape[0] != dim:
        raise DensityMatrixError(f"expected a {dim}x{dim} density matrix, got {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > _HERM_TOL:
        raise DensityMatrixError("density matrix is not Hermitian to 1e-12")
    if abs(np.trace(m).real - 1.0) > _TRACE_TOL or abs(np.trace(m).imag) > _TRACE_TOL:
        raise DensityMatrixError("density matrix trace differs from 1 by more than 1e-12")
    w, _ = hermitian_eigendecomposition(m)
    if w.min() < _EIG_FLOOR:
        raise DensityMatrixError(f"density matrix has eigenvalue {w.min():.3e} < -1e-10")
    return m


def partial_trace_env(joint) -> np.ndarray:
    """Trace out the environment of a 4x4 probe (x) environment state."""
    m = np.asarray(joint, dtype=complex)
    if m.shape != (4, 4):
        raise DensityMatrixError(f"partial trace expects a 4x4 matrix, got {m.shape}")
    r = m.reshape(2, 2, 2, 2)
    return np.einsum("akbk->ab", r)


# ---------------------------------------------------------------------------
# parameters and simple states


@dataclass(frozen=True)
class MarkovParams:
    """Probe gap, bath coupling and bath temperature for the master equation."""

    gap: float
    coupling: float
    temperature: float

    def __post_init__(self):
        if not (self.gap > 0 and self.coupling > 0 and self.temperature > 0):
            raise ValueError("gap, coupling and temperature must all be positive")

    @property
    def n_bar(self) -> float:
        """Thermal occupation of the bath mode at the probe gap."""
        return 1.0 / math.expm1(self.gap / self.temperature)

    @property
    def total_rate(self) -> float:
        """Relaxation rate Gamma = gamma (2 n_bar + 1)."""
        return self.coupling * (2.0 * self.n_bar + 1.0)


@dataclass(frozen=True)
class SwapParams:
    """Shared gap, exchange coupling and environment temperature for the swap model."""

    gap: float
    coupling: float
    temperature: float

    def __post_init__(self):
        if not (self.gap > 0 and self.coupling > 0 and self.temperature > 0):
            raise ValueError("gap, coupling and temperature must all be positive")

    @property
    def swap_time(self) -> float:
        """Time pi/J at which probe and environment states are exchanged."""
        return math.pi / self.coupling


def ground_state() -> np.ndarray:
    """Probe ground state |g><g| in the (e, g) basis."""
    return np.diag([0.0, 1.0]).astype(complex)


def gibbs_qubit(gap: float, temperature: float) -> np.ndarray:
    """Two-level Gibbs state diag(p_e, p_g) in the (e, g) basis."""
    state = gibbs_state(harmonic(2, gap), temperature)
    p_ground, p_excited = state.populations
    return np.diag([p_excited, p_ground]).astype(complex)


# ---------------------------------------------------------------------------
# trajectories


def _validate_probe_states(states: np.ndarray) -> None:
    herm = np.max(np.abs(states - states.conj().transpose(0, 2, 1)))
    if herm > _HERM_TOL:
        raise DensityMatrixError(f"probe state deviates from Hermitian by {herm:.3e}")
    traces = np.einsum("tii->t", states)
    if np.max(np.abs(traces - 1.0)) > _TRACE_TOL:
        raise DensityMatrixError("probe state trace drifts from 1 by more than 1e-12")
    offdiag = np.max(np.abs(states[:, 0, 1]))
    if offdiag > _DIAG_TOL:
        raise DensityMatrixError(
            f"probe state develops off-diagonal weight {offdiag:.3e} > 1e-12"
        )
    # eigenvalues of a (numerically) diagonal 2x2 state are its diagonal entries
    eig_min = float(np.min(states[:, [0, 1], [0, 1]].real)) - offdiag
    if eig_min < _EIG_FLOOR:
        raise DensityMatrixError(f"probe state eigenvalue {eig_min:.3e} < -1e-10")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time series of probe states and generator outputs.

    ``states[k]`` is the 2x2 probe state at ``times[k]`` and
    ``generators[k]`` the corresponding right-hand side of the equation of
    motion.  Construction asserts strictly increasing times and the
    density-matrix/diagonality invariants at every step.
    """

    times: np.ndarray
    states: np.ndarray
    generators: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        s = np.asarray(self.states, dtype=complex)
        g = np.asarray(self.generators, dtype=complex)
        if t.ndim != 1 or s.shape != (t.size, 2, 2) or g.shape != s.shape:
            raise ValueError("trajectory arrays have inconsistent shapes")
        if np.any(np.diff(t) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        if not (np.all(np.isfinite(s.view(float))) and np.all(np.isfinite(g.view(float)))):
            raise ValueError("trajectory contains non-finite entries")
        _validate_probe_states(s)
        for arr in (t, s, g):
            arr.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", s)
        object.__setattr__(self, "generators", g)

    @property
    def initial_state(self) -> np.ndarray:
        return self.states[0]

    @property
    def excited_populations(self) -> np.ndarray:
        return self.states[:, 0, 0].real


# ---------------------------------------------------------------------------
# Markovian master equation


def markov_excited_population(params: MarkovParams, t):
    """Closed-form excited population from the ground start.

    Solves dp_e/dt = -Gamma p_e + gamma n_bar, giving
    p_e(t) = n_bar/(2 n_bar + 1) (1 - exp(-Gamma t)).
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("time must be non-negative")
    n_bar = params.n_bar
    out = n_bar / (2.0 * n_bar + 1.0) * (-np.expm1(-params.total_rate * t_arr))
    return out if t_arr.ndim else float(out)


def markov_generator(params: MarkovParams, rho) -> np.ndarray:
    """Full master-equation right-hand side -i[H, rho] + dissipator."""
    m = np.asarray(rho, dtype=complex)
    if m.shape != (2, 2):
        raise DensityMatrixError(f"markov generator expects a 2x2 state, got {m.shape}")
    h = (params.gap / 2.0) * SIGMA_Z
    out = -1.0j * (h @ m - m @ h)
    n_bar = params.n_bar
    for rate, lop in (
        (params.coupling * (n_bar + 1.0), SIGMA_MINUS),
        (params.coupling * n_bar, SIGMA_PLUS),
    ):
        ld = lop.conj().T
        ldl = ld @ lop
        out += rate * (lop @ m @ ld - 0.5 * (ldl @ m + m @ ldl))
    return out


def _uniform_step(t_grid: np.ndarray) -> float:
    steps = np.diff(t_grid)
    h = float(steps[0])
    if h <= 0 or np.max(np.abs(steps - h)) > 1e-9 * h:
        raise ValueError("time grid must be uniform and increasing")
    return h


def markov_trajectory(params: MarkovParams, t_grid) -> Trajectory:
    """Trajectory from the closed-form solution, ground start.

    States are diag(p_e(t), 1 - p_e(t)) and generators
    diag(p_e'(t), -p_e'(t)) with p_e'(t) = gamma n_bar exp(-Gamma t).
    """
    t = np.asarray(t_grid, dtype=float)
    p_e = np.asarray(markov_excited_population(params, t))
    rate = params.coupling * params.n_bar * np.exp(-params.total_rate * t)
    states = np.zeros((t.size, 2, 2), dtype=complex)
    states[:, 0, 0] = p_e
    states[:, 1, 1] = 1.0 - p_e
    gens = np.zeros_like(states)
    gens[:, 0, 0] = rate
    gens[:, 1, 1] = -rate
    return Trajectory(t, states, gens)


def integrate_master(params: MarkovParams, t_grid, initial_state=None) -> Trajectory:
    """Classic fourth-order Runge-Kutta integration of the master equation.

    Requires a uniform grid with step h <= 0.01/Gamma.  Serves as the
    independent check of :func:`markov_excited_population`: the two agree
    to better than 1e-8 over [0, 10/Gamma] at that step.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise ValueError("time grid needs at least 2 points")
    if t[0] != 0.0:
        raise ValueError("time grid must start at 0")
    h = _uniform_step(t)
    if h > 0.01 / params.total_rate:
        raise ValueError(
            f"step {h:.3e} too large; need h <= 0.01/Gamma = {0.01 / params.total_rate:.3e}"
        )
    rho = ground_state() if initial_state is None else validate_density_matrix(initial_state, 2)
    states = np.empty((t.size, 2, 2), dtype=complex)
    gens = np.empty_like(states)
    states[0] = rho
    gens[0] = markov_generator(params, rho)
    for k in range(1, t.size):
        k1 = markov_generator(params, rho)
        k2 = markov_generator(params, rho + 0.5 * h * k1)
        k3 = markov_generator(params, rho + 0.5 * h * k2)
        k4 = markov_generator(params, rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(rho.view(float))):
            raise FloatingPointError(f"non-finite state at t = {t[k]:.6g}")
        states[k] = rho
        gens[k] = markov_generator(params, rho)
    return Trajectory(t, states, gens)


# ---------------------------------------------------------------------------
# finite environment: resonant excitation-preserving swap


def swap_hamiltonian(params: SwapParams) -> np.ndarray:
    """Total Hamiltonian: free probe and environment terms plus the exchange coupling."""
    i2 = np.eye(2, dtype=complex)
    free = (params.gap / 2.0) * (np.kron(SIGMA_Z, i2) + np.kron(i2, SIGMA_Z))
    exchange = (params.coupling / 4.0) * (
        np.kron(SIGMA_X, SIGMA_X) + np.kron(SIGMA_Y, SIGMA_Y)
    )
    return free + exchange


def _swap_eigensystem(params: SwapParams):
    w, v = hermitian_eigendecomposition(swap_hamiltonian(params))
    joint0 = np.kron(ground_state(), gibbs_qubit(params.gap, params.temperature))
    return w, v, v.conj().T @ joint0 @ v


def _swap_joint_states(params: SwapParams, t: np.ndarray) -> np.ndarray:
    """Joint 4x4 states at the given times via the spectral decomposition."""
    w, v, b = _swap_eigensystem(params)
    # rho(t) = V (B * exp(-i (w_i - w_j) t)) V^dagger
    gaps = w[:, None] - w[None, :]
    phases = np.exp(-1.0j * gaps[None, :, :] * t[:, None, None])
    return np.einsum("ab,tbc,dc->tad", v, b * phases, v.conj())


def swap_reduced_state(params: SwapParams, t: float) -> np.ndarray:
    """Probe state at time t: unitary joint evolution, environment traced out.

    The joint system starts in |g><g| (x) Gibbs(T); on resonance the probe
    excited population follows q sin^2(J t / 2) with q the thermal excited
    weight, and at t = pi/J the environment state is swapped onto the probe.
    """
    tf = float(t)
    if tf < 0:
        raise ValueError("time must be non-negative")
    joint = _swap_joint_states(params, np.array([tf]))[0]
    return partial_trace_env(joint)


def swap_generator(params: SwapParams, t: float) -> np.ndarray:
    """Probe equation-of-motion right-hand side Tr_env(-i [H, rho(t)])."""
    tf = float(t)
    if tf < 0:
        raise ValueError("time must be non-negative")
    h = swap_hamiltonian(params)
    joint = _swap_joint_states(params, np.array([tf]))[0]
    return partial_trace_env(-1.0j * (h @ joint - joint @ h))


def swap_trajectory(params: SwapParams, t_grid) -> Trajectory:
    """Probe trajectory of the swap model on an increasing time grid."""
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise ValueError("time grid needs at least 2 points")
    if np.any(t < 0):
        raise ValueError("times must be non-negative")
    h = swap_hamiltonian(params)
    joints = _swap_joint_states(params, t)
    comms = -1.0j * (np.einsum("ab,tbc->tac", h, joints) - np.einsum("tab,bc->tac", joints, h))
    states = np.einsum("takbk->tab", joints.reshape(t.size, 2, 2, 2, 2))
    gens = np.einsum("takbk->tab", comms.reshape(t.size, 2, 2, 2, 2))
    return Trajectory(t, states, gens)
