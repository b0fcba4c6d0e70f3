"""Why the A_2 exponent cannot be lowered.

Take f = |1 - xi|^(delta - 1) on the circle and w = |1 - xi|^(1 - delta).
As delta -> 0 the weight degenerates: [w]_A2 grows like 1/delta, and so does
the ratio ||S f||_w / ||f||_w.  A bound with a smaller power of [w] would fail.

The spike is too sharp for node quadrature on the disc, so the area integral
is evaluated spectrally (one FFT per radius) and the boundary integrals use a
circle rule graded toward the point 1.
"""
import numpy as np

from bhx.harness.experiments import fit_slope, optimality_rows

deltas = [1 / 2, 1 / 4, 1 / 8, 1 / 16]
rows = optimality_rows(deltas, resolution=256, eps_cut=1e-4, per_octave=6, mode_factor=40.0)

print(f"{'delta':>8} {'[w]_A2':>10} {'||f||^2':>10} {'ratio':>10}")
for d, ap, nsq, ratio in rows:
    print(f"{d:8.4f} {ap:10.4f} {nsq:10.4f} {ratio:10.4f}")

for name, col in (("[w]_A2", 1), ("||f||^2", 2), ("ratio", 3)):
    print(f"log-log slope of {name}: {fit_slope(deltas, [r[col] for r in rows]):+.3f}")
