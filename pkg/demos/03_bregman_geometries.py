"""Euclidean vs entropy dual geometry on a simplex-constrained game.

The dual prox-ascent step supports any 1-strongly-convex distance
generator.  On the unit simplex, negative entropy turns the step into a
multiplicative-weights update that never leaves the interior, while the
Euclidean geometry uses sort-and-threshold projection.
"""

import numpy as np

from rapd import RunOptions, run
from rapd.blockcore import BlockPartition
from rapd.bregman import (EntropyGeometry, EuclideanGeometry, IndicatorSimplex,
                          SquaredL2, bregman_dist, bregman_prox)
from rapd.problem import build_quadratic_game
from rapd.stepsize import default_alpha, part1_schedule

# the elementary updates, side by side
y = np.array([0.5, 0.3, 0.2])
s = np.array([1.0, -0.5, 0.0])
for geom in (EuclideanGeometry(3), EntropyGeometry(3)):
    stepped = bregman_prox(geom, IndicatorSimplex(1.0), 0.5, -s, y)
    print(f"{geom.kind:>17}: ascent step along {s} from {y} -> "
          f"{np.round(stepped, 4)}")
print()

# a game whose dual lives on the simplex: max over probability vectors
rng = np.random.default_rng(0)
n, d, m = 12, 3, 4
part = BlockPartition.even(n, m)
C = rng.standard_normal((d, n))
P = np.eye(n) * 0.5
prob_euc = build_quadratic_game(P, np.zeros((d, d)), C, rng.standard_normal(n),
                                np.zeros(d), part,
                                f=[SquaredL2(0.25)] * m, h=IndicatorSimplex(1.0))
prob_ent = build_quadratic_game(P, np.zeros((d, d)), C, prob_euc.p, np.zeros(d),
                                part, f=[SquaredL2(0.25)] * m,
                                h=IndicatorSimplex(1.0))
prob_ent.dual_geometry = EntropyGeometry(d)

y0 = np.full(d, 1.0 / d)
for label, prob in (("euclidean", prob_euc), ("entropy", prob_ent)):
    sched = part1_schedule(prob.constants, m, default_alpha(prob.constants))
    tr = run(prob, sched, 20_000, seed=1, x0=np.zeros(n), y0=y0,
             options=RunOptions(record_at=[20_000]))
    print(f"{label:>10} dual geometry: ergodic kernel weights "
          f"{np.round(tr.ergodic_y, 4)} (sum {tr.ergodic_y.sum():.6f}), "
          f"min weight {tr.ergodic_y.min():.2e}")

dist = bregman_dist(EntropyGeometry(d), np.array([1.0, 0.0, 0.0]), y0)
print(f"\nentropy distance from a vertex to the center: {dist:.4f} = ln {d}"
      f" = {np.log(d):.4f}")
