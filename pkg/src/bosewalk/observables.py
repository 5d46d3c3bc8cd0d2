"""Density, pair correlations and scalar diagnostics of two-particle states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, UsageError

__all__ = [
    "CorrelationMatrix",
    "density",
    "correlation",
    "correlation_fluctuation",
    "bunching_ratio",
    "participation_ratio",
    "diagonal_weight",
    "default_window",
    "PARTICLES",
]

# Sum rules below are for exactly two particles: sum(n) = N, sum(Gamma) = N(N-1).
PARTICLES = 2


@dataclass
class CorrelationMatrix:
    """Symmetric ``M x M`` pair correlation.

    ``fluctuation`` marks a background-subtracted matrix, whose entries can be
    negative.
    """

    values: np.ndarray
    fluctuation: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise UsageError(f"correlation matrix must be square, got {self.values.shape}")

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    @property
    def M(self):
        return self.values.shape[0]

    @property
    def kind(self):
        return "fluctuation" if self.fluctuation else "bare"

    def total(self):
        return float(self.values.sum())

    def sum_rule_residual(self):
        """``|sum(Gamma) - N(N-1)|`` for a bare matrix."""
        if self.fluctuation:
            raise UsageError("sum rule applies to bare correlations only")
        return abs(self.total() - PARTICLES * (PARTICLES - 1))


def _amplitude_matrix(state):
    basis = state.basis
    probs = np.abs(state.amplitudes) ** 2
    P = np.zeros((basis.M, basis.M))
    P[basis.r1, basis.r2] = probs
    return P


def density(state):
    """Site occupations ``n_q = <a_q^+ a_q>``; a doublon counts twice."""
    basis = state.basis
    probs = np.abs(state.amplitudes) ** 2
    n = np.bincount(basis.r1, weights=probs, minlength=basis.M)
    n += np.bincount(basis.r2, weights=probs, minlength=basis.M)
    return n


def correlation(state):
    """Normal-ordered pair correlation ``<a_q^+ a_r^+ a_r a_q>``.

    Off the diagonal this is the probability of the pair ``{q, r}``; on the
    diagonal it is twice the doublon probability.
    """
    P = _amplitude_matrix(state)
    d = np.diag(P).copy()
    G = P + P.T
    np.fill_diagonal(G, 2.0 * d)
    return CorrelationMatrix(G)


def correlation_fluctuation(gamma, n):
    """Background-subtracted correlation ``Gamma_qr - n_q n_r / 2``."""
    if not isinstance(gamma, CorrelationMatrix):
        gamma = CorrelationMatrix(gamma)
    if gamma.fluctuation:
        raise UsageError("correlation is already a fluctuation matrix")
    n = np.asarray(n, dtype=float)
    if n.shape != (gamma.M,):
        raise UsageError(f"density of shape {n.shape} does not match {gamma.M} sites")
    return CorrelationMatrix(gamma.values - 0.5 * np.outer(n, n), fluctuation=True)


def diagonal_weight(gamma):
    """Total weight ``sum_r Gamma_rr`` on doubly occupied sites."""
    return float(np.trace(np.asarray(gamma, dtype=float)))


def default_window(M):
    return max(1, math.ceil(M / 6))


def _support(marginal, support_tol):
    peak = marginal.max()
    if peak <= 0:
        return None
    occupied = np.flatnonzero(marginal >= support_tol * peak)
    return int(occupied[0]), int(occupied[-1])


def bunching_ratio(gamma, window=None, support_tol=1e-2):
    """Same-side over opposite-side corner weight of a correlation matrix.

    The corners are ``window x window`` blocks at the edges of the occupied
    support, i.e. the span of sites whose row marginal ``sum_r Gamma_qr`` is at
    least ``support_tol`` times its maximum. Values above one indicate bunching
    (particles leave on the same side), below one anti-bunching.

    Parameters
    ----------
    gamma : CorrelationMatrix or ndarray
        Bare correlation matrix.
    window : int, optional
        Block size, default ``ceil(M / 6)``. Must be smaller than ``M / 2``.
    support_tol : float
        Relative marginal threshold defining the occupied support.

    Returns
    -------
    float
        ``inf`` if the opposite corners are empty but the same-side ones are not.
    """
    if isinstance(gamma, CorrelationMatrix):
        if gamma.fluctuation:
            raise UsageError("bunching_ratio expects a bare correlation matrix")
        G = gamma.values
    else:
        G = np.asarray(gamma, dtype=float)
    M = G.shape[0]
    w = default_window(M) if window is None else int(window)
    if not 1 <= w < M / 2:
        raise UsageError(f"window must satisfy 1 <= w < M/2, got {w} for M={M}")
    support = _support(G.sum(axis=1), support_tol)
    if support is None:
        raise NumericalError("bunching ratio undefined for an empty correlation matrix")
    lo, hi = support
    # keep blocks inside the lattice when the support is narrower than 2w
    lo = min(lo, M - 2 * w)
    hi = max(hi, lo + 2 * w - 1)
    left = slice(lo, lo + w)
    right = slice(hi - w + 1, hi + 1)
    same = G[left, left].sum() + G[right, right].sum()
    opposite = G[left, right].sum() + G[right, left].sum()
    if opposite == 0:
        if same == 0:
            raise NumericalError("bunching ratio undefined: all corner blocks are empty")
        return math.inf
    return float(same / opposite)


def participation_ratio(n):
    """Localization measure ``(sum n)^2 / sum n^2`` of a density profile."""
    n = np.asarray(n, dtype=float)
    denom = float(np.sum(n**2))
    if denom == 0:
        raise NumericalError("participation ratio of a zero density")
    return float(np.sum(n) ** 2 / denom)
