"""Hard-core bosons on a chain show the same pair correlations as free fermions.

Excluding double occupancy removes the bosonic exchange interference; for two
particles on a line the remaining sign structure does not affect probabilities,
so the correlation matrix coincides with that of two non-interacting fermions.
A large but finite U approaches the hard-core limit.
"""

import numpy as np

from bosewalk import LatticeSpec, boson_correlation_u0, fermion_correlation, hardcore_evolve, run_walk

spec = LatticeSpec(29)
inputs = (14, 15)
for T in (1.0, 2.5, 4.0):
    hc = np.asarray(hardcore_evolve(spec, inputs, T))
    fe = np.asarray(fermion_correlation(spec, inputs, T))
    bo = np.asarray(boson_correlation_u0(spec, inputs, T))
    print(f"T={T}: |hard-core - fermion| = {np.max(np.abs(hc - fe)):.1e}, |free boson - fermion| = {np.max(np.abs(bo - fe)):.2f}")

fe = np.asarray(fermion_correlation(spec, inputs, 4.0))
for U in (5.0, 20.0, 100.0, 1000.0):
    G = np.asarray(run_walk(LatticeSpec(29, U=U), "adjacent@14", 4.0).correlation)
    print(f"U={U:6.0f}: max deviation from fermions {np.max(np.abs(G - fe)):.2e}")
