"""Bound pairs form a narrow band split off from the scattering continuum."""

import numpy as np

from bosewalk import LatticeSpec, band_gap, build_basis, build_hamiltonian, full_spectrum, pair_wavefunction

M = 29
basis = build_basis(LatticeSpec(M))

for U in (8.0, -8.0):
    s = full_spectrum(build_hamiltonian(LatticeSpec(M, U=U), basis), basis)
    E = s.energies
    print(f"U={U:+.0f}: {s.bound_count} bound, {s.scattering_count} scattering states")
    print(f"  scattering band [{E[~s.bound].min():.3f}, {E[~s.bound].max():.3f}]")
    print(f"  bound band      [{E[s.bound].min():.3f}, {E[s.bound].max():.3f}], gap {band_gap(s):.3f}")

# infinite-chain bound-state dispersion sqrt(U^2 + 16 J^2 cos^2(K/2))
s = full_spectrum(build_hamiltonian(LatticeSpec(M, U=8.0), basis), basis)
order = np.argsort(s.K[s.bound])
print("\n   K      E(open chain)   E(K) infinite chain")
for K, E in list(zip(s.K[s.bound][order], s.energies[s.bound][order]))[::4]:
    print(f"{K:6.3f}   {E:10.4f}   {np.sqrt(64 + 16 * np.cos(K / 2) ** 2):10.4f}")

print("\ngap versus U (tends to |U| - 4J):")
for U in (2.0, 4.0, 6.0, 10.0, 14.0):
    g = band_gap(full_spectrum(build_hamiltonian(LatticeSpec(M, U=U), basis), basis))
    print(f"  U={U:4.1f}  gap={g:7.3f}  |U|-4J={U - 4:6.2f}")

# relative-coordinate profile: bound pairs sit on top of each other
r, p_bound = pair_wavefunction(s.state(int(np.flatnonzero(s.bound)[0])))
_, p_free = pair_wavefunction(s.state(0))
print(f"\n|psi(r=0)|^2: lowest bound state {p_bound[r == 0][0]:.3f}, lowest scattering state {p_free[r == 0][0]:.4f}")
