"""From bunching to anti-bunching as the on-site interaction grows.

For a pair started on adjacent sites the non-interacting walk sends both
particles to the same side of the lattice. Strong repulsion (or attraction, the
sign does not matter) turns this into an anti-bunched pattern. A doublon start
instead stays bound along the diagonal. Coarse text heatmaps show the shapes.
"""

import numpy as np

from bosewalk import LatticeSpec, bunching_ratio, diagonal_weight, participation_ratio, run_walk

SHADES = " .:-=+*#%@"


def heatmap(G, stride=2):
    G = np.asarray(G)[::stride, ::stride]
    levels = np.rint((len(SHADES) - 1) * G / G.max()).astype(int)
    return "\n".join("".join(SHADES[v] * 2 for v in row) for row in levels)


for U in (0.0, 2.0, 20.0, -20.0):
    res = run_walk(LatticeSpec(29, U=U), "adjacent@14", 4.0)
    print(f"adjacent start, U={U:+.0f}: bunching ratio {bunching_ratio(res.correlation, 5):.3f}")
    if U in (0.0, 20.0):
        print(heatmap(res.correlation))

print()
for U in (0.0, 2.0, 4.0, 8.0, 20.0):
    res = run_walk(LatticeSpec(29, U=U), "doublon@14", 4.0)
    print(
        f"doublon start, U={U:4.1f}: weight on diagonal {diagonal_weight(res.correlation):.3f}, "
        f"participation ratio {participation_ratio(res.density):.2f}"
    )
