"""Independent reference constructions shared by the tests.

Nothing here uses the pair basis of :mod:`bosewalk.lattice`; the oracles work
either with explicit occupation-number states or with the first-quantized
two-particle wavefunction on the full ``M x M`` grid.
"""

import itertools
import math

import numpy as np
import scipy.linalg as sla


def occupation_states(M, N=2):
    """All occupation tuples of ``N`` bosons on ``M`` sites."""
    return [n for n in itertools.product(range(N + 1), repeat=M) if sum(n) == N]


def hop(occ, l, m):
    """Apply ``a_l^+ a_m`` to the occupation state ``occ``; returns (amp, new) or None."""
    if occ[m] == 0:
        return None
    new = list(occ)
    amp = math.sqrt(new[m])
    new[m] -= 1
    amp *= math.sqrt(new[l] + 1)
    new[l] += 1
    return amp, tuple(new)


def fock_hamiltonian(M, J, U):
    """Bose-Hubbard matrix in the occupation basis, plus the state list."""
    states = occupation_states(M)
    index = {s: i for i, s in enumerate(states)}
    H = np.zeros((len(states), len(states)))
    for i, s in enumerate(states):
        H[i, i] += 0.5 * U * sum(n * (n - 1) for n in s)
        for l in range(M):
            for m in (l - 1, l + 1):
                if 0 <= m < M:
                    res = hop(s, l, m)
                    if res is not None:
                        amp, new = res
                        H[index[new], i] += -J * amp
    return H, states


def occupation_to_pair(occ):
    sites = [r for r, n in enumerate(occ) for _ in range(n)]
    return tuple(sorted(sites))


def first_quantized_hamiltonian(M, J, U):
    H1 = -J * (np.eye(M, k=1) + np.eye(M, k=-1))
    eye = np.eye(M)
    return np.kron(H1, eye) + np.kron(eye, H1) + U * np.diag(eye.ravel())


def first_quantized_walk(M, J, U, sites, T):
    """Density and pair correlation from ``expm`` on the ``M^2`` grid."""
    m, n = sites
    phi = np.zeros((M, M), dtype=complex)
    if m == n:
        phi[m, m] = 1.0
    else:
        phi[m, n] = phi[n, m] = 1 / math.sqrt(2)
    H = first_quantized_hamiltonian(M, J, U)
    phi = (sla.expm(-1j * H * T) @ phi.ravel()).reshape(M, M)
    P = np.abs(phi) ** 2
    return 2 * P.sum(axis=1), 2 * P
