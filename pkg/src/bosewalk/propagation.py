"""Time evolution of two-particle states.

Two routes are provided: exact propagation through a full eigendecomposition
(the reference) and a short-iterative Lanczos propagator that only needs
matrix-vector products, intended for large lattices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import ConfigurationError, NumericalError, UsageError
from .lattice import TwoParticleState

__all__ = ["EvolutionSpec", "Eigensystem", "eigensystem", "evolve", "lanczos_expm_multiply"]

METHODS = ("diag", "krylov")


@dataclass(frozen=True)
class EvolutionSpec:
    """Propagation time ``T`` (units of ``1/J``), method and accuracy.

    ``tolerance`` bounds the allowed drift of the squared norm; for the Krylov
    route it is also the local truncation bound per substep.
    """

    T: float
    method: str = "diag"
    tolerance: float = 1e-10
    krylov_dim: int = 30

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T >= 0):
            raise ConfigurationError(f"T must be finite and >= 0, got {self.T!r}", key="T")
        if self.method not in METHODS:
            raise ConfigurationError(
                f"method must be one of {METHODS}, got {self.method!r}", key="method"
            )
        if not self.tolerance > 0:
            raise ConfigurationError(f"tolerance must be > 0, got {self.tolerance!r}", key="tol")
        if self.krylov_dim < 2:
            raise ConfigurationError("krylov_dim must be >= 2", key="krylov_dim")


class Eigensystem:
    """Eigendecomposition ``H = V diag(E) V^T`` of a real symmetric matrix."""

    def __init__(self, energies, vectors):
        self.energies = energies
        self.vectors = vectors

    def propagate(self, amplitudes, t):
        V = self.vectors
        coeff = V.T @ amplitudes
        return V @ (np.exp(-1j * self.energies * t) * coeff)


def eigensystem(H):
    """Full eigendecomposition of a (dense or sparse) real symmetric matrix."""
    if sp.issparse(H):
        H = H.toarray()
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise UsageError(f"Hamiltonian must be square, got shape {H.shape}")
    asym = np.max(np.abs(H - H.T)) if H.size else 0.0
    if asym > 1e-12 * max(1.0, float(np.max(np.abs(H)))):
        raise NumericalError("Hamiltonian is not symmetric", {"max_asymmetry": float(asym)})
    try:
        E, V = sla.eigh(H)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigensolver failed: {exc}", {"dimension": H.shape[0]}) from exc
    if not np.all(np.isfinite(E)):
        raise NumericalError("eigensolver returned non-finite eigenvalues", {"dimension": H.shape[0]})
    return Eigensystem(E, V)


def _lanczos_step(matvec, v, tau, m, tol):
    """One Lanczos substep; returns ``(w, err)`` for ``w ~ exp(-i H tau) v``.

    ``v`` must have unit norm.
    """
    n = v.shape[0]
    m = min(m, n)
    Q = np.empty((m + 1, n), dtype=complex)
    alpha = np.zeros(m)
    beta = np.zeros(m)
    Q[0] = v
    k = m
    breakdown = False
    for j in range(m):
        w = matvec(Q[j])
        alpha[j] = np.vdot(Q[j], w).real
        w = w - alpha[j] * Q[j]
        if j > 0:
            w = w - beta[j - 1] * Q[j - 1]
        # full reorthogonalization keeps the basis orthonormal for long runs
        w = w - Q[: j + 1].T @ (Q[: j + 1].conj() @ w)
        b = np.linalg.norm(w)
        beta[j] = b
        if b < 1e-14:
            k = j + 1
            breakdown = True
            break
        Q[j + 1] = w / b
    theta, S = sla.eigh_tridiagonal(alpha[:k], beta[: k - 1])
    y = S @ (np.exp(-1j * theta * tau) * S[0].conj())
    # a posteriori error estimate: weight leaking into the next Krylov vector
    err = 0.0 if breakdown else abs(beta[k - 1] * y[k - 1])
    return Q[:k].T @ y, err


def lanczos_expm_multiply(H, v, t, tol=1e-10, m=30):
    """Compute ``exp(-i H t) v`` by short-iterative Lanczos propagation.

    The interval is split into substeps whose Krylov error estimate stays below
    ``tol``; a substep that misses the bound is retried at half length.
    """
    v = np.asarray(v, dtype=complex)
    nrm = np.linalg.norm(v)
    if nrm == 0 or t == 0:
        return v.copy()
    if sp.issparse(H):
        H = H.tocsr()
    matvec = H.dot
    # initial step from a crude spectral radius bound
    radius = float(abs(H).sum(axis=1).max()) if sp.issparse(H) else float(np.abs(H).sum(axis=1).max())
    tau = min(t, max(m / max(radius, 1e-300), 1e-12) * 0.5)
    done = 0.0
    w = v / nrm
    while done < t:
        tau = min(tau, t - done)
        trial, err = _lanczos_step(matvec, w, tau, m, tol)
        if err > tol:
            tau *= 0.5
            if tau < 1e-12 * t:
                raise NumericalError(
                    "Krylov step size underflow", {"time_reached": done, "error": err}
                )
            continue
        w = trial
        done += tau
        if err < 0.1 * tol:
            tau *= 1.5
    return nrm * w


def evolve(state, H, spec):
    """Evolve ``state`` under ``H`` to time ``spec.T``.

    Parameters
    ----------
    state : TwoParticleState
        Normalized input state.
    H : ndarray, sparse matrix or Eigensystem
        Hamiltonian in the basis of ``state``. Passing an :class:`Eigensystem`
        reuses an existing diagonalization.
    spec : EvolutionSpec or float
        A bare number is taken as ``T`` with default settings.

    Returns
    -------
    TwoParticleState
        ``exp(-i H T) |state>``. The result is never renormalized; a squared
        norm drift above ``spec.tolerance`` raises :class:`NumericalError`.
    """
    if not isinstance(spec, EvolutionSpec):
        spec = EvolutionSpec(float(spec))
    psi = state.amplitudes
    n = len(psi)
    dim = H.energies.shape[0] if isinstance(H, Eigensystem) else H.shape[0]
    if dim != n:
        raise UsageError(f"Hamiltonian dimension {dim} does not match state dimension {n}")
    norm0 = float(np.vdot(psi, psi).real)
    if abs(norm0 - 1.0) > spec.tolerance:
        raise UsageError(f"input state is not normalized (|psi|^2 = {norm0!r})")
    if spec.T == 0:
        return state.copy()

    if spec.method == "diag" or isinstance(H, Eigensystem):
        es = H if isinstance(H, Eigensystem) else eigensystem(H)
        out = es.propagate(psi, spec.T)
    else:
        out = lanczos_expm_multiply(H, psi, spec.T, tol=spec.tolerance, m=spec.krylov_dim)

    norm1 = float(np.vdot(out, out).real)
    drift = abs(norm1 - norm0)
    if drift > spec.tolerance:
        raise NumericalError(
            "norm drift exceeds tolerance",
            {"drift": drift, "tolerance": spec.tolerance, "method": spec.method, "T": spec.T},
        )
    return TwoParticleState(state.basis, out)
