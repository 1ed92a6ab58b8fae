"""Constant vs accelerated step schedules on a strongly convex instance.

When every block of f is strongly convex and the coupling is linear in
the dual, the adaptive recursion drives tau_i^k/t^k down like 1/k^2 and
the iterate distance obeys an O(m/K^2) bound instead of the O(m/K)
ergodic-gap rate.
"""

import numpy as np

from rapd import RunOptions, run
from rapd.harness.metrics import rate_bound_delta2
from rapd.harness.suites import part2_suite_certificate, part2_suite_problem
from rapd.stepsize import (default_alpha, part1_schedule, part2_init,
                           schedule_prefix)

problem, x0, y0 = part2_suite_problem()
m = problem.partition.m
cert = part2_suite_certificate(problem)
alpha = default_alpha(problem.constants)
print(f"blocks have moduli mu = {problem.constants.mu}, L_yy = 0 -> "
      f"the accelerated regime applies\n")

# how the recursion behaves: theta climbs to 1, sigma and t grow, tau shrinks
sched2 = part2_init(problem.constants, m, alpha)
prefix = schedule_prefix(sched2, 10_000)
print(f"{'k':>6} {'theta':>9} {'sigma':>10} {'t':>10} {'tau_max':>10} {'k^2 tau/t':>10}")
for k in (0, 10, 100, 1000, 10_000):
    s = prefix[k]
    print(f"{k:>6} {s.theta:>9.5f} {s.sigma:>10.4f} {s.t:>10.2f} "
          f"{s.tau.max():>10.2e} {k * k * s.tau.max() / s.t:>10.3f}")
print("(k^2 tau/t settles to a constant: the promised 1/k^2 step decay)\n")

checkpoints = [10, 100, 1000, 10_000]
delta2 = rate_bound_delta2(problem, sched2, x0, y0, cert)
trace2 = run(problem, sched2, max(checkpoints) + 1, seed=0, x0=x0, y0=y0,
             options=RunOptions(record_at=[k + 1 for k in checkpoints], reference=cert))

sched1 = part1_schedule(problem.constants, m, alpha)
trace1 = run(problem, sched1, max(checkpoints), seed=0, x0=x0, y0=y0,
             options=RunOptions(record_at=checkpoints, reference=cert))

print(f"{'K':>6} {'dist^2 const':>14} {'dist^2 accel':>14} {'accel bound':>14}")
for K in checkpoints:
    d1 = trace1.at(K).dist_sq
    rec = trace2.at(K + 1)
    bound = m / rec.t_prev * delta2
    print(f"{K:>6} {d1:>14.4e} {rec.dist_sq:>14.4e} {bound:>14.4e}")

print("\nthe weighted distance 0.5*||x^{K+1} - x*||^2_{T^K + (1-1/m)M} stays")
print("below its (m/t^K) Delta2 guarantee at every checkpoint.  early on the")
print("accelerated run is far ahead (K=100: ~1e-3 vs ~1e-1); this particular")
print("instance is strongly monotone on both sides, so the constant-step run")
print("eventually converges linearly and overtakes -- the accelerated")
print("schedule is the one with the worst-case guarantee, not a uniform win.")
