"""Two-particle spectrum: bound-pair miniband, scattering band and pair wavefunctions.

Eigenstates are classified by their doublon weight ``D = sum_r |Psi(r, r)|^2``.
A quasi-momentum label ``K`` is attached to every eigenstate as a diagnostic; on
the open chain it is only approximate and never used for classification.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError, UsageError
from .lattice import TwoParticleState
from .propagation import Eigensystem, eigensystem

__all__ = [
    "SpectrumResult",
    "full_spectrum",
    "classify_bound",
    "band_gap",
    "pair_wavefunction",
    "quasi_momentum",
    "degenerate_clusters",
    "DEFAULT_BOUND_THRESHOLD",
]

DEFAULT_BOUND_THRESHOLD = 0.5


class SpectrumResult:
    """Eigenvalues (ascending), eigenvectors and per-state annotations.

    Attributes
    ----------
    basis : PairBasis
    energies : ndarray, shape (dim,)
    vectors : ndarray, shape (dim, dim)
        Column ``i`` is the eigenvector of ``energies[i]``.
    doublon_weight : ndarray
        ``D`` of every eigenstate.
    K : ndarray
        Estimated center-of-mass quasi-momentum in ``[0, pi]``.
    bound : ndarray of bool
    threshold : float
        Doublon-weight threshold used for ``bound``.
    U : float or None
        Interaction strength, if known; fixes the side of the miniband.
    """

    def __init__(self, basis, energies, vectors, U=None, threshold=DEFAULT_BOUND_THRESHOLD):
        self.basis = basis
        self.energies = energies
        self.vectors = _canonical_vectors(basis, energies, vectors)
        self.U = U
        self.doublon_weight = np.sum(np.abs(self.vectors[basis.doublon_mask]) ** 2, axis=0)
        self.K = quasi_momentum(basis, self.vectors)
        self.threshold = threshold
        self.bound = self.doublon_weight >= threshold

    def __len__(self):
        return len(self.energies)

    @property
    def bound_count(self):
        return int(np.count_nonzero(self.bound))

    @property
    def scattering_count(self):
        return len(self) - self.bound_count

    def state(self, i):
        return TwoParticleState(self.basis, self.vectors[:, i].astype(complex))

    def eigensystem(self):
        return Eigensystem(self.energies, self.vectors)

    def overlaps(self, state):
        """Spectral weights ``|<e_i|psi>|^2`` of ``state``."""
        return np.abs(self.vectors.T @ state.amplitudes) ** 2

    def bound_weight(self, state):
        """Fraction of the spectral weight of ``state`` in the bound miniband."""
        return float(self.overlaps(state)[self.bound].sum())


def _canonical_vectors(basis, energies, vectors, tol=1e-9):
    """Fix the basis inside degenerate eigenspaces.

    Within each cluster the vectors are rotated to diagonalize the doublon
    projector, which is the basis selected by an infinitesimal interaction. This
    makes doublon weights independent of the eigensolver's arbitrary choice.
    """
    vectors = vectors.copy()
    mask = basis.doublon_mask
    for cluster in degenerate_clusters(energies, tol):
        if len(cluster) < 2:
            continue
        V = vectors[:, cluster]
        Vd = V[mask]
        _, R = np.linalg.eigh(Vd.T @ Vd)
        vectors[:, cluster] = V @ R
    return vectors


def quasi_momentum(basis, vectors, npad=256):
    """Approximate center-of-mass momentum of each eigenvector.

    For every relative separation ``d = r2 - r1`` the amplitudes along the
    center-of-mass coordinate are Fourier transformed on a zero-padded grid; the
    power is summed over ``d`` and ``K`` is the peak position. Eigenvectors of a
    real Hamiltonian are standing waves, so only ``|K|`` is meaningful.
    """
    M = basis.M
    d = basis.r2 - basis.r1
    n_states = vectors.shape[1]
    power = np.zeros((npad // 2 + 1, n_states))
    for sep in range(M):
        rows = np.flatnonzero(d == sep)
        if len(rows) == 0:
            continue
        # rows are ordered by r1, i.e. by center of mass in unit steps
        power += np.abs(np.fft.rfft(vectors[rows], n=npad, axis=0)) ** 2
    k = 2 * np.pi * np.arange(npad // 2 + 1) / npad
    return k[np.argmax(power, axis=0)]


def full_spectrum(H, basis, U=None, threshold=DEFAULT_BOUND_THRESHOLD):
    """Complete eigendecomposition of ``H`` with bound/scattering annotation.

    Parameters
    ----------
    H : ndarray, sparse matrix or Eigensystem
    basis : PairBasis
    U : float, optional
        Interaction strength used to orient the band gap; inferred from the
        doublon diagonal of ``H`` when omitted.
    threshold : float
        Doublon-weight threshold for the bound flag.
    """
    if isinstance(H, Eigensystem):
        es = H
    else:
        if H.shape[0] != len(basis):
            raise UsageError(f"Hamiltonian dimension {H.shape[0]} does not match basis {len(basis)}")
        if U is None:
            Hd = H.diagonal() if hasattr(H, "diagonal") else np.diag(H)
            dbl = np.asarray(Hd)[basis.doublon_mask]
            U = float(dbl[0]) if len(dbl) else 0.0
        es = eigensystem(H)
    return SpectrumResult(basis, es.energies, es.vectors, U=U, threshold=threshold)


def classify_bound(spectrum, threshold=DEFAULT_BOUND_THRESHOLD):
    """Flag eigenstates with doublon weight ``D >= threshold`` as bound pairs."""
    if not 0 < threshold < 1:
        raise UsageError(f"threshold must lie in (0, 1), got {threshold}")
    spectrum.threshold = threshold
    spectrum.bound = spectrum.doublon_weight >= threshold
    return spectrum


def band_gap(spectrum):
    """Energy separation between the bound miniband and the scattering band.

    For repulsive interactions the miniband lies above the scattering band and
    the gap is ``min(bound) - max(scattering)``; for attractive ones it is
    mirrored. Negative values mean the bands overlap.
    """
    E = spectrum.energies
    bound = E[spectrum.bound]
    scatter = E[~spectrum.bound]
    if len(bound) == 0:
        raise NumericalError("no miniband: no state exceeds the bound threshold")
    if len(scatter) == 0:
        raise NumericalError("no scattering states to compare against")
    U = spectrum.U
    if U is None:
        U = 1.0 if bound.mean() >= scatter.mean() else -1.0
    if U >= 0:
        return float(bound.min() - scatter.max())
    return float(scatter.min() - bound.max())


def pair_wavefunction(state):
    """Probability profile over the relative coordinate ``r = r1 - r2``.

    Parameters
    ----------
    state : TwoParticleState

    Returns
    -------
    r : ndarray
        Separations ``-(M-1) .. M-1``.
    prob : ndarray
        ``|psi(r)|^2`` summed over the center of mass, normalized to one and
        symmetric in ``r``.
    """
    basis = state.basis
    p = np.abs(state.amplitudes) ** 2
    M = basis.M
    d = basis.r2 - basis.r1
    folded = np.bincount(d, weights=p, minlength=M)
    prob = np.concatenate([0.5 * folded[:0:-1], [folded[0]], 0.5 * folded[1:]])
    total = prob.sum()
    if total == 0:
        raise UsageError("pair wavefunction of a zero state")
    return np.arange(-(M - 1), M), prob / total


def degenerate_clusters(energies, tol=1e-8):
    """Split sorted ``energies`` into groups of (near-)degenerate levels."""
    if len(energies) == 0:
        return []
    breaks = np.flatnonzero(np.diff(energies) > tol) + 1
    return np.split(np.arange(len(energies)), breaks)
