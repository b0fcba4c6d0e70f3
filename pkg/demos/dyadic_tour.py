"""Dyadic cubes on the circle, a Whitney covering, a CZ decomposition and a sparse family."""
import numpy as np

from bhx.dyadic import (build_system, check_system, check_whitney, cz_decompose, lmo_decompose, lmo_domination,
                        whitney_decompose)
from bhx.geometry import make_sphere_quadrature, ni_distance
from bhx.transforms import GridFunc
from bhx.weights import spike_cell_averages

q = make_sphere_quadrature(1, 4096)
S = build_system(q)
print("cubes per level:", {k: len(v) for k, v in S.levels.items()})
print("checks:", check_system(S))

omega = ni_distance(q.nodes, q.nodes[0]) < 0.5
W = whitney_decompose(omega, q)
print(f"Whitney: {W.centers.size} balls,", check_whitney(W, q))

f = spike_cell_averages(q, 0.25)
cz = cz_decompose(f, 4 * f.l1())
err = np.abs(cz.reconstruct() - f.values).max()
print(f"CZ at t = 4||f||_1: reconstruction error {err:.1e}, constants {cz.constants}")

v = np.cumsum(np.random.default_rng(1).standard_normal(q.size))
g = GridFunc(q, v)
root = S.levels[S.k_min][0]
fam = lmo_decompose(g, S, root)
print(f"sparse family: {len(fam.cubes)} cubes, density {fam.density:.4f},",
      f"domination on {lmo_domination(g, fam, root)['mass_fraction']:.1%} of the mass")
