r"""Mean-field (discrete nonlinear Schroedinger) dynamics and thermal-light ensembles.

The classical lattice field obeys

.. math ::
    i \frac{d\Psi_m}{dt} = -J (\Psi_{m+1} + \Psi_{m-1}) + 2\gamma |\Psi_m|^2 \Psi_m

which follows from ``H = -J sum_<l,m> Psi_l^* Psi_m + gamma sum_m |Psi_m|^4``.
Fields are arrays whose last axis runs over sites; leading axes are batches of
independent realizations, integrated together.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numba
import numpy as np

from .errors import ConfigurationError, NumericalError, UsageError
from .observables import CorrelationMatrix

__all__ = [
    "EnsembleSpec",
    "EnsembleResult",
    "dnls_rhs",
    "dnls_energy",
    "dnls_evolve",
    "draw_inputs",
    "realization_steps",
    "thermal_ensemble_correlation",
    "gaussian_moment_correlation",
    "quantum_classical_distance",
    "gamma_for_interaction",
    "interaction_for_gamma",
]

STATISTICS = ("circular-gaussian", "random-phase")

POWER_TOL = 1e-8
ENERGY_TOL = 1e-6
CONVERGENCE_TOL = 1e-6
# step halvings allowed per realization before the convergence gate fails
MAX_REFINE = 4


def gamma_for_interaction(U, power=1.0):
    """Nonlinearity whose doublon mean-field energy matches ``U``: ``U / (2 P)``."""
    return U / (2.0 * power)


def interaction_for_gamma(gamma, power=1.0):
    return 2.0 * gamma * power


def dnls_rhs(psi, gamma, J=1.0):
    """Time derivative ``dPsi/dt`` of the DNLS equation on an open chain."""
    psi = np.asarray(psi, dtype=complex)
    hop = np.zeros_like(psi)
    hop[..., 1:] += psi[..., :-1]
    hop[..., :-1] += psi[..., 1:]
    return 1j * J * hop - 2j * gamma * (psi.real**2 + psi.imag**2) * psi


def dnls_energy(psi, gamma, J=1.0):
    """Value of the classical Hamiltonian for each field in the batch."""
    psi = np.asarray(psi, dtype=complex)
    kinetic = -2.0 * J * np.sum((psi[..., :-1].conj() * psi[..., 1:]).real, axis=-1)
    intensity = psi.real**2 + psi.imag**2
    return kinetic + gamma * np.sum(intensity**2, axis=-1)


@numba.njit(cache=True, nogil=True)
def _rhs_into(y, gamma, J, out):
    M = y.shape[0]
    for m in range(M):
        hop = 0j
        if m > 0:
            hop += y[m - 1]
        if m < M - 1:
            hop += y[m + 1]
        v = y[m]
        inten = v.real * v.real + v.imag * v.imag
        out[m] = 1j * J * hop - 2j * gamma * inten * v


@numba.njit(cache=True, nogil=True)
def _rk4_batch(psi, gamma, J, T, steps):
    R, M = psi.shape
    out = np.empty_like(psi)
    k1 = np.empty(M, dtype=np.complex128)
    k2 = np.empty(M, dtype=np.complex128)
    k3 = np.empty(M, dtype=np.complex128)
    k4 = np.empty(M, dtype=np.complex128)
    tmp = np.empty(M, dtype=np.complex128)
    for n in range(R):
        y = psi[n].copy()
        h = T / steps[n]
        for _ in range(steps[n]):
            _rhs_into(y, gamma, J, k1)
            for m in range(M):
                tmp[m] = y[m] + 0.5 * h * k1[m]
            _rhs_into(tmp, gamma, J, k2)
            for m in range(M):
                tmp[m] = y[m] + 0.5 * h * k2[m]
            _rhs_into(tmp, gamma, J, k3)
            for m in range(M):
                tmp[m] = y[m] + h * k3[m]
            _rhs_into(tmp, gamma, J, k4)
            for m in range(M):
                y[m] = y[m] + (h / 6.0) * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m])
        out[n] = y
    return out


def _steps(T, dt):
    if not np.all(np.asarray(dt) > 0):
        raise ConfigurationError(f"dt must be > 0, got {dt}", key="dt")
    return np.maximum(1, np.ceil(T / np.asarray(dt, dtype=float) - 1e-9)).astype(np.int64)


def _check_conservation(psi0, psi1, gamma, J, h):
    p0 = np.sum(np.abs(psi0) ** 2, axis=-1)
    p1 = np.sum(np.abs(psi1) ** 2, axis=-1)
    scale = np.maximum(1.0, p0)
    dp = float(np.max(np.abs(p1 - p0) / scale))
    dh = float(np.max(np.abs(dnls_energy(psi1, gamma, J) - dnls_energy(psi0, gamma, J)) / scale**2))
    # written so that NaN drifts from a blown-up integration also fail
    if not (dp <= POWER_TOL and dh <= ENERGY_TOL):
        raise NumericalError(
            "DNLS conservation violated; reduce the step size",
            {"power_drift": dp, "energy_drift": dh, "dt": float(np.max(h))},
        )


def _integrate(psi0, gamma, J, T, steps, check):
    shape = psi0.shape
    flat = np.ascontiguousarray(psi0.reshape(-1, shape[-1]))
    steps = np.broadcast_to(np.asarray(steps, dtype=np.int64), flat.shape[:1]).copy()
    out = _rk4_batch(flat, float(gamma), float(J), float(T), steps)
    if check:
        _check_conservation(flat, out, gamma, J, T / steps)
    return out.reshape(shape)


def dnls_evolve(field, gamma, T, dt=1e-3, J=1.0, check=True):
    """Integrate the DNLS equation to time ``T`` with fixed-step RK4.

    The step is shrunk slightly so that an integer number of steps lands on
    ``T``. With ``check`` enabled, total power must be conserved to
    ``POWER_TOL`` and the Hamiltonian to ``ENERGY_TOL`` (relative to
    ``max(1, P0)`` and ``max(1, P0^2)`` per realization); otherwise a
    :class:`NumericalError` asks for a smaller step.

    Parameters
    ----------
    field : array_like, complex, shape (..., M)
    gamma : float
    T : float
    dt : float

    Returns
    -------
    ndarray
        Field at time ``T``, same shape as the input.
    """
    psi = np.array(field, dtype=complex)
    if psi.ndim == 0 or psi.shape[-1] < 2:
        raise UsageError("field needs at least two sites on its last axis")
    if T < 0:
        raise ConfigurationError(f"T must be >= 0, got {T}", key="T")
    if T == 0:
        return psi
    return _integrate(psi, gamma, J, T, _steps(T, dt), check)


@dataclass(frozen=True)
class EnsembleSpec:
    """Thermal-light ensemble launched into a nonlinear lattice.

    Each realization injects independent random fields of mean power ``power``
    into the ``inputs`` sites and records the output intensities at time ``T``.

    The RK4 step of a realization with total power ``P`` is
    ``min(dt, phase_step / (2 J + 2 |gamma| P))``, so that no site rotates by
    more than ``phase_step`` radians per step.
    """

    M: int = 29
    inputs: tuple = (14, 15)
    gamma: float = 0.0
    realizations: int = 10_000
    seed: int = 7
    statistics: str = "circular-gaussian"
    T: float = 4.0
    dt: float = 5e-3
    phase_step: float = 1e-2
    J: float = 1.0
    power: float = 1.0
    chunk: int = 2048
    threads: int = 1
    check_convergence: bool = True

    def __post_init__(self):
        if self.M < 2:
            raise ConfigurationError(f"sites must be >= 2, got {self.M}", key="sites")
        if self.realizations < 1:
            raise ConfigurationError("realizations must be >= 1", key="realizations")
        if self.statistics not in STATISTICS:
            raise ConfigurationError(
                f"statistics must be one of {STATISTICS}, got {self.statistics!r}", key="statistics"
            )
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer", key="seed")
        for s in self.inputs:
            if not 0 <= s < self.M:
                raise ConfigurationError(f"input site {s} outside lattice of {self.M} sites", key="initial")
        if len(set(self.inputs)) != len(self.inputs):
            raise ConfigurationError("input sites must be distinct", key="initial")
        if not (self.T >= 0 and self.dt > 0 and self.phase_step > 0):
            raise ConfigurationError("T >= 0, dt > 0 and phase_step > 0 are required", key="dt")
        if not (self.J > 0 and self.power > 0):
            raise ConfigurationError("J > 0 and power > 0 are required")
        if self.chunk < 1 or self.threads < 1:
            raise ConfigurationError("chunk and threads must be >= 1")
        object.__setattr__(self, "inputs", tuple(int(s) for s in self.inputs))

    @property
    def U_map(self):
        return interaction_for_gamma(self.gamma, self.power)

    def as_dict(self):
        d = asdict(self)
        d["inputs"] = list(self.inputs)
        return d


@dataclass
class EnsembleResult:
    """Ensemble averages of a thermal-light run.

    Unpacks as ``(mean_intensity, correlation, fluctuation)``.
    """

    mean_intensity: np.ndarray
    correlation: CorrelationMatrix
    fluctuation: CorrelationMatrix
    correlation_stderr: np.ndarray
    realizations: int
    dt: float
    convergence_error: float = float("nan")
    diagnostics: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.mean_intensity, self.correlation, self.fluctuation))


def draw_inputs(spec, start, stop):
    """Input fields of realizations ``start .. stop-1``, shape ``(stop-start, M)``.

    Realization ``i`` draws from its own stream seeded by ``(seed, i)``, so
    any subset of realizations can be regenerated independently.
    """
    k = len(spec.inputs)
    out = np.zeros((stop - start, spec.M), dtype=complex)
    amp = math.sqrt(spec.power)
    cols = list(spec.inputs)
    for row, i in enumerate(range(start, stop)):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(spec.seed, spawn_key=(i,))))
        if spec.statistics == "circular-gaussian":
            z = rng.standard_normal(2 * k)
            vals = (z[:k] + 1j * z[k:]) * (amp / math.sqrt(2.0))
        else:
            vals = amp * np.exp(2j * np.pi * rng.random(k))
        out[row, cols] = vals
    return out


def realization_steps(spec, psi0):
    """RK4 step counts for each input field of the ensemble."""
    P = np.sum(np.abs(psi0) ** 2, axis=-1)
    rate = 2.0 * spec.J + 2.0 * abs(spec.gamma) * P
    h = np.minimum(spec.dt, spec.phase_step / rate)
    return _steps(spec.T, h)


def _run_chunk(spec, start, stop):
    psi0 = draw_inputs(spec, start, stop)
    conv = 0.0
    if spec.T > 0:
        steps = realization_steps(spec, psi0)
        psi = _integrate(psi0, spec.gamma, spec.J, spec.T, steps, False)
        if spec.check_convergence:
            psi, steps, conv = _refine(spec, psi0, psi, steps)
        _check_conservation(psi0, psi, spec.gamma, spec.J, spec.T / steps)
    else:
        psi = psi0
    I = np.abs(psi) ** 2
    return I.sum(axis=0), I.T @ I, (I**2).T @ (I**2), conv


def _refine(spec, psi0, psi, steps):
    """Halve the step of every realization until halving no longer matters.

    Returns the finer fields, their step counts and the largest intensity
    change seen in the last halving of each realization.
    """
    steps = steps.copy()
    change = np.full(len(psi0), np.inf)
    todo = np.arange(len(psi0))
    for _ in range(MAX_REFINE):
        fine = _integrate(psi0[todo], spec.gamma, spec.J, spec.T, 2 * steps[todo], False)
        delta = np.max(np.abs(np.abs(fine) ** 2 - np.abs(psi[todo]) ** 2), axis=-1)
        psi[todo] = fine
        steps[todo] *= 2
        change[todo] = delta
        todo = todo[~(delta <= CONVERGENCE_TOL)]
        if len(todo) == 0:
            break
    return psi, steps, float(np.max(change))


def thermal_ensemble_correlation(spec):
    """Ensemble-averaged intensity correlations of nonlinear thermal light.

    Every realization is integrated at its step and again at half that step,
    and the finer result is kept. Realizations whose intensities still move by
    more than ``CONVERGENCE_TOL`` are halved again, up to ``MAX_REFINE`` times;
    beyond that the run fails. Chunks of realizations may run on ``spec.threads``
    threads; their partial sums are always combined in chunk order, so the
    averages are bitwise reproducible for a given seed.

    Returns
    -------
    EnsembleResult
        ``<I_q>``, ``<I_q I_r>`` and ``<I_q I_r> - <I_q><I_r>/2``.
    """
    if spec.realizations < 2:
        raise ConfigurationError("at least two realizations are needed", key="realizations")
    bounds = [
        (s, min(s + spec.chunk, spec.realizations)) for s in range(0, spec.realizations, spec.chunk)
    ]
    if spec.threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=spec.threads) as pool:
            parts = list(pool.map(lambda b: _run_chunk(spec, *b), bounds))
    else:
        parts = [_run_chunk(spec, *b) for b in bounds]

    conv = float(np.max([p[3] for p in parts]))
    if not conv <= CONVERGENCE_TOL:
        raise NumericalError(
            "DNLS step not converged: halving the step changes output intensities",
            {"max_intensity_change": conv, "tolerance": CONVERGENCE_TOL, "dt": spec.dt},
        )
    s1 = np.zeros(spec.M)
    s2 = np.zeros((spec.M, spec.M))
    s4 = np.zeros((spec.M, spec.M))
    for p in parts:
        s1 += p[0]
        s2 += p[1]
        s4 += p[2]
    R = spec.realizations
    mean = s1 / R
    corr = s2 / R
    var = np.maximum(s4 / R - corr**2, 0.0) * R / (R - 1)
    stderr = np.sqrt(var / R)
    fluct = corr - 0.5 * np.outer(mean, mean)
    return EnsembleResult(
        mean_intensity=mean,
        correlation=CorrelationMatrix(corr),
        fluctuation=CorrelationMatrix(fluct, fluctuation=True),
        correlation_stderr=stderr,
        realizations=R,
        dt=0.5 * spec.dt if spec.check_convergence else spec.dt,
        convergence_error=conv,
        diagnostics={"U_map": spec.U_map},
    )


def gaussian_moment_correlation(G, inputs, power=1.0):
    """Closed-form linear-lattice thermal correlations.

    For independent circular-Gaussian inputs of mean power ``power`` the output
    field is Gaussian, so ``<I_q I_r> = <I_q><I_r> + |<Psi_q Psi_r^*>|^2``.

    Parameters
    ----------
    G : ndarray, shape (M, M)
        Single-particle propagator.
    inputs : sequence of int

    Returns
    -------
    mean : ndarray
    corr : ndarray
    """
    Gi = G[:, list(inputs)]
    coherence = power * Gi @ Gi.conj().T
    mean = coherence.diagonal().real.copy()
    corr = np.outer(mean, mean) + np.abs(coherence) ** 2
    return mean, corr


def quantum_classical_distance(A, B):
    """Frobenius distance between two fluctuation correlators after unit scaling.

    Both matrices are scaled to unit Frobenius norm, so the result lies in
    ``[0, 2]``.
    """
    mats = []
    for X in (A, B):
        if isinstance(X, CorrelationMatrix):
            if not X.fluctuation:
                raise UsageError("distance is defined between fluctuation correlators")
            X = X.values
        X = np.asarray(X, dtype=float)
        nrm = np.linalg.norm(X)
        if nrm == 0:
            raise NumericalError("cannot compare a zero correlation matrix")
        mats.append(X / nrm)
    if mats[0].shape != mats[1].shape:
        raise UsageError(f"shape mismatch: {mats[0].shape} vs {mats[1].shape}")
    return float(np.linalg.norm(mats[0] - mats[1]))
