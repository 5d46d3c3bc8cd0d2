"""Two bosons launched on neighbouring sites spread ballistically.

Prints the density at a few times next to the two-walker Bessel prediction and
the mean squared displacement about the starting midpoint. It grows as
``2 J^2 t^2``: ballistic, where a classical random walk would be linear in t.
"""

import numpy as np
from scipy.special import jv

from bosewalk import LatticeSpec, density_evolution

M, c = 61, 30
times = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
dens = density_evolution(LatticeSpec(M, U=0.0), f"adjacent@{c}", times)

q = np.arange(M) - c
for t, n in zip(times, dens):
    bessel = jv(q, 2 * t) ** 2 + jv(q - 1, 2 * t) ** 2
    msd = np.sum(n * (q - 0.5) ** 2) / 2
    growth = f"{(msd - 0.25) / t**2:5.2f}" if t > 0 else "  -  "
    print(f"t={t:3.1f}  max|n - Bessel|={np.max(np.abs(n - bessel)):.1e}  <x^2>={msd:6.2f}  (<x^2> - 1/4)/t^2={growth}")

# an interacting pair spreads more slowly once it is bound
for U in (0.0, 2.0, 8.0):
    n = density_evolution(LatticeSpec(M, U=U), f"doublon@{c}", [4.0])[0]
    print(f"doublon, U={U:4.1f}: <x^2> at t=4 = {np.sum(n * (np.arange(M) - c) ** 2) / 2:6.2f}")
