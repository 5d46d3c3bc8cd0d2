r"""Two-boson sector of the open-chain Bose-Hubbard model.

The Hamiltonian is

.. math ::
    H = -J \sum_{\langle l, m \rangle} a_l^\dagger a_m + \frac{U}{2} \sum_m n_m (n_m - 1)

restricted to exactly two particles. States are expanded in the normalized Fock
basis ``|r, s>`` with ``r <= s``::

    |r, r> = (a_r^+)^2 |0> / sqrt(2)
    |r, s> = a_r^+ a_s^+ |0>            (r < s)

so that hopping between a doublon and a neighbouring pair carries the bosonic
factor ``sqrt(2)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, UsageError

__all__ = [
    "LatticeSpec",
    "PairBasis",
    "TwoParticleState",
    "build_basis",
    "build_hamiltonian",
    "initial_sites",
    "initial_state",
    "parse_initial",
    "single_particle_hamiltonian",
]


@dataclass(frozen=True)
class LatticeSpec:
    """Open chain of ``M`` sites with hopping ``J`` and on-site interaction ``U``.

    Energies are in units of ``J`` (``J = 1`` by default), times in ``1/J``.
    """

    M: int
    J: float = 1.0
    U: float = 0.0

    def __post_init__(self):
        if isinstance(self.M, bool) or int(self.M) != self.M or self.M < 2:
            raise ConfigurationError(f"sites must be an integer >= 2, got {self.M!r}", key="sites")
        if not (math.isfinite(self.J) and self.J > 0):
            raise ConfigurationError(f"J must be finite and > 0, got {self.J!r}", key="J")
        if not math.isfinite(self.U):
            raise ConfigurationError(f"U must be finite, got {self.U!r}", key="U")
        object.__setattr__(self, "M", int(self.M))

    @property
    def boundary(self):
        return "open"

    def with_U(self, U):
        return LatticeSpec(self.M, self.J, U)


class PairBasis:
    """Lexicographically ordered unordered site pairs ``(r1, r2)``, ``r1 <= r2``.

    With ``hardcore=True`` doubly occupied pairs are left out, which gives the
    ``M(M-1)/2`` dimensional hard-core sector.
    """

    def __init__(self, M, hardcore=False):
        if M < 2:
            raise ConfigurationError(f"sites must be >= 2, got {M}", key="sites")
        self.M = int(M)
        self.hardcore = bool(hardcore)
        r1, r2 = np.triu_indices(self.M, k=1 if hardcore else 0)
        self.r1 = r1.astype(np.intp)
        self.r2 = r2.astype(np.intp)
        # index lookup table; -1 marks pairs outside the basis
        self._index = np.full((self.M, self.M), -1, dtype=np.intp)
        self._index[self.r1, self.r2] = np.arange(len(self.r1))
        self._index[self.r2, self.r1] = np.arange(len(self.r1))

    def __len__(self):
        return len(self.r1)

    def __iter__(self):
        return iter(self.pairs)

    def __eq__(self, other):
        return (
            isinstance(other, PairBasis)
            and other.M == self.M
            and other.hardcore == self.hardcore
        )

    def __hash__(self):
        return hash((self.M, self.hardcore))

    def __repr__(self):
        return f"PairBasis(M={self.M}, hardcore={self.hardcore}, dim={len(self)})"

    @property
    def dim(self):
        return len(self)

    @property
    def pairs(self):
        return list(zip(self.r1.tolist(), self.r2.tolist()))

    @property
    def doublon_mask(self):
        return self.r1 == self.r2

    def pair(self, i):
        return int(self.r1[i]), int(self.r2[i])

    def index(self, r1, r2):
        """Basis index of the unordered pair ``{r1, r2}``."""
        if not (0 <= r1 < self.M and 0 <= r2 < self.M):
            raise ConfigurationError(f"site pair ({r1}, {r2}) outside lattice of {self.M} sites")
        i = self._index[r1, r2]
        if i < 0:
            raise ConfigurationError(f"pair ({r1}, {r2}) is excluded from the hard-core basis")
        return int(i)

    def to_matrix(self, amplitudes):
        """Symmetric ``M x M`` array ``A[r1, r2]`` of basis amplitudes."""
        A = np.zeros((self.M, self.M) + np.shape(amplitudes)[1:], dtype=np.result_type(amplitudes))
        A[self.r1, self.r2] = amplitudes
        A[self.r2, self.r1] = amplitudes
        return A


def build_basis(spec):
    """Two-boson basis for ``spec``; dimension ``M(M+1)/2``."""
    if not isinstance(spec, LatticeSpec):
        spec = LatticeSpec(int(spec))
    return PairBasis(spec.M)


@dataclass
class TwoParticleState:
    """Complex amplitudes over a :class:`PairBasis`."""

    basis: PairBasis
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (len(self.basis),):
            raise UsageError(
                f"amplitude vector of shape {self.amplitudes.shape} does not match "
                f"basis dimension {len(self.basis)}"
            )

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, r1, r2):
        return complex(self.amplitudes[self.basis.index(r1, r2)])

    def copy(self):
        return TwoParticleState(self.basis, self.amplitudes.copy())


def _hopping_entries(basis):
    """Row/col/value triplets (upper triangle) of the hopping part for ``J = 1``."""
    rows, cols, vals = [], [], []
    M = basis.M
    for i, (a, b) in enumerate(basis.pairs):
        # move the right particle one site to the right, or the left particle one
        # site to the right; together with the transpose this covers all hops
        targets = []
        if b + 1 < M:
            targets.append((a, b + 1))
        if a + 1 <= b:
            targets.append((a + 1, b))
        for a2, b2 in targets:
            j = basis._index[a2, b2]
            if j < 0:
                continue
            # a doublon on either end of the hop carries the bosonic sqrt(2)
            amp = math.sqrt(2.0) if (a == b or a2 == b2) else 1.0
            rows.append(i)
            cols.append(int(j))
            vals.append(-amp)
    return np.array(rows, dtype=np.intp), np.array(cols, dtype=np.intp), np.array(vals)


def build_hamiltonian(spec, basis=None, sparse=False):
    """Matrix of the two-boson Hamiltonian in ``basis``.

    Parameters
    ----------
    spec : LatticeSpec
    basis : PairBasis, optional
        Defaults to ``build_basis(spec)``. A hard-core basis yields the
        projected hopping-only Hamiltonian.
    sparse : bool
        Return a ``scipy.sparse.csr_matrix`` instead of a dense array.

    Returns
    -------
    H : ndarray or csr_matrix
        Real symmetric matrix of dimension ``len(basis)``.
    """
    if basis is None:
        basis = build_basis(spec)
    if basis.M != spec.M:
        raise UsageError(f"basis built for {basis.M} sites, lattice has {spec.M}")
    n = len(basis)
    rows, cols, vals = _hopping_entries(basis)
    vals = spec.J * vals
    diag = np.where(basis.doublon_mask, float(spec.U), 0.0)
    all_rows = np.concatenate([rows, cols, np.arange(n)])
    all_cols = np.concatenate([cols, rows, np.arange(n)])
    all_vals = np.concatenate([vals, vals, diag])
    H = sp.csr_matrix((all_vals, (all_rows, all_cols)), shape=(n, n))
    H.eliminate_zeros()
    if sparse:
        return H
    return H.toarray()


def single_particle_hamiltonian(spec):
    """``M x M`` hopping matrix of one particle on the open chain."""
    off = -spec.J * np.ones(spec.M - 1)
    return np.diag(off, 1) + np.diag(off, -1)


_INITIAL_RE = re.compile(r"^\s*(doublon|adjacent|pair)\s*@\s*(-?\d+)\s*(?:,\s*(-?\d+)\s*)?$")


def parse_initial(text):
    """Parse ``'doublon@m'``, ``'adjacent@m'`` or ``'pair@m,n'`` into a tuple."""
    match = _INITIAL_RE.match(str(text))
    if match is None:
        raise ConfigurationError(
            f"cannot parse initial state {text!r}; use doublon@m, adjacent@m or pair@m,n",
            key="initial",
        )
    kind, m, n = match.groups()
    if kind == "pair":
        if n is None:
            raise ConfigurationError("pair@m,n needs two sites", key="initial")
        return kind, int(m), int(n)
    if n is not None:
        raise ConfigurationError(f"{kind}@m takes a single site", key="initial")
    return kind, int(m)


def _initial_sites(kind, *sites):
    if kind == "doublon":
        (m,) = sites
        return m, m
    if kind == "adjacent":
        (m,) = sites
        return m, m + 1
    if kind == "pair":
        m, n = sites
        return min(m, n), max(m, n)
    raise ConfigurationError(f"unknown initial state kind {kind!r}", key="initial")


def initial_sites(kind, *sites):
    """Occupied sites ``(r1, r2)`` of an initial state descriptor."""
    if isinstance(kind, str) and not sites and "@" in kind:
        kind, *sites = parse_initial(kind)
    return _initial_sites(kind, *sites)


def initial_state(kind, basis, *sites):
    """Localized two-particle Fock state.

    ``kind`` is ``"doublon"`` (both particles on site ``m``), ``"adjacent"``
    (sites ``m`` and ``m + 1``) or ``"pair"`` (sites ``m`` and ``n``). A string such
    as ``"adjacent@14"`` may be passed instead of ``kind`` plus sites.

    Examples
    --------
    >>> basis = build_basis(LatticeSpec(5))
    >>> psi = initial_state("pair@4,1", basis)
    >>> psi.amplitude(1, 4)
    (1+0j)
    """
    r1, r2 = initial_sites(kind, *sites)
    for r in (r1, r2):
        if not 0 <= r < basis.M:
            raise ConfigurationError(
                f"initial site {r} outside lattice of {basis.M} sites", key="initial"
            )
    amps = np.zeros(len(basis), dtype=complex)
    amps[basis.index(r1, r2)] = 1.0
    return TwoParticleState(basis, amps)
