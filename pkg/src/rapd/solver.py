"""Randomized accelerated primal-dual main loop.

One iteration, from state ``(x^k, y^k)`` with cached ``g_prev =
grad_y(x^{k-1}, y^{k-1})``:

1. momentum direction  ``s^k = (1 + m theta^k) g_k - m theta^k g_prev``
2. dual ascent prox    ``y^{k+1} = argmin_y h(y) - <s^k, y - y^k>
                          + D_Y(y, y^k)/sigma^k``
3. sample one block    ``i_k`` (uniform or per given probabilities)
4. primal block prox   on block ``i_k`` only, at ``grad_{x_i} phi(x^k, y^{k+1})``

then the dual-gradient cache moves forward (incrementally when the
coupling is separable across blocks) and the schedule advances.  The
convention ``(x^{-1}, y^{-1}) = (x^0, y^0)`` makes ``s^0 = g_0``.

Per-iteration cost: one fresh dual gradient, one block gradient, two
proxes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .blockcore import BlockPartition, BlockVector, weighted_norm_sq_raw
from .bregman import bregman_prox
from .exceptions import DivergenceError, ParameterError, RegimeError
from .problem import SaddleProblem
from .rng import CounterRng, sample_index
from .stepsize import StepSchedule

DIVERGENCE_LIMIT = 1e12


# ---------------------------------------------------------------------------
# single-step operations
# ---------------------------------------------------------------------------

def momentum_direction(problem: SaddleProblem, x: np.ndarray, y: np.ndarray,
                       grad_y_prev: np.ndarray, m: int, theta: float):
    """Momentum-extrapolated dual direction; returns ``(s, g)`` with ``g``
    the fresh dual gradient for caching."""
    g = problem.grad_y(x, y)
    s = (1.0 + m * theta) * g - (m * theta) * grad_y_prev
    return s, g


def dual_step(problem: SaddleProblem, y: np.ndarray, s: np.ndarray,
              sigma: float) -> np.ndarray:
    """Dual prox-ascent step: maximize along ``s`` against ``h`` and the
    dual geometry."""
    return bregman_prox(problem.dual_geometry, problem.h, sigma, -s, y)


def sample_block(rng: CounterRng, m: int, p: np.ndarray | None = None) -> int:
    """Draw the block index to update (uniform unless ``p`` given)."""
    return sample_index(rng, m, p)


def primal_block_step(problem: SaddleProblem, x: np.ndarray, y_next: np.ndarray,
                      i: int, tau_i: float) -> np.ndarray:
    """Prox-descent on block ``i`` only; other blocks are returned
    bit-identical."""
    if not tau_i > 0:
        raise ParameterError(f"primal step must be > 0, got {tau_i}")
    sl = problem.partition.block_slice(i)
    g = problem.grad_x_block(i, x, y_next)
    out = x.copy()
    out[sl] = bregman_prox(problem.primal_geometry[i], problem.f[i], tau_i, g, x[sl])
    return out


def ergodic_average(xs_sum: np.ndarray, ys_sum: np.ndarray, count: int):
    """Uniform averages of the post-update iterates."""
    if count < 1:
        raise ParameterError("ergodic average needs at least one iteration")
    return xs_sum / count, ys_sum / count


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------

@dataclass
class TraceRecord:
    """Snapshot after ``k`` completed updates."""

    k: int
    wall_s: float
    i_k: int
    sigma: float
    theta: float
    tau_min: float
    tau_max: float
    t: float
    gap: float = np.nan
    dist_sq: float = np.nan
    dy: float = np.nan
    # 0.5 * ||x^k - x*||^2 weighted by T^{k-1} + (1 - 1/m) M, and the
    # matching weight t^{k-1}; these feed the accelerated-rate bound
    wdist_sq: float = np.nan
    t_prev: float = np.nan


@dataclass
class RunTrace:
    """Per-run record collection plus terminal iterates and averages."""

    method: str
    seed: int | None
    partition: BlockPartition
    records: list = field(default_factory=list)
    final_x: np.ndarray | None = None
    final_y: np.ndarray | None = None
    ergodic_x: np.ndarray | None = None
    ergodic_y: np.ndarray | None = None
    iterations: int = 0
    wall_total_s: float = 0.0
    geometry_note: str = ""

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    def at(self, k: int) -> TraceRecord:
        for r in self.records:
            if r.k == k:
                return r
        raise KeyError(f"no trace record at k={k}")


@dataclass
class RunOptions:
    """Knobs for :func:`run` that are not part of the algorithm itself."""

    record_at: list | None = None      # update counts to snapshot; None = ends only
    reference: object | None = None    # SaddleCertificate for error metrics
    debug_cache_every: int = 0         # recompute + compare the gradient cache
    divergence_limit: float = DIVERGENCE_LIMIT
    time_budget_s: float | None = None # stop early at a record point
    stop_when: object | None = None    # callable(x, y) -> bool, checked at records
    iterate_hook: object | None = None # callable(k_done, x, y), for tests


# ---------------------------------------------------------------------------
# main loop
# ---------------------------------------------------------------------------

def run(problem: SaddleProblem, schedule: StepSchedule, K: int, seed: int,
        x0: np.ndarray | None = None, y0: np.ndarray | None = None,
        p: np.ndarray | None = None, options: RunOptions | None = None) -> RunTrace:
    """Execute ``K`` iterations and return the trace.

    ``p`` overrides the schedule's sampling probabilities (they must agree
    when both are given).  Metrics that need a saddle point (gap,
    distances) are recorded only when ``options.reference`` is supplied.
    """
    if K < 1:
        raise ParameterError(f"need K >= 1, got {K}")
    opts = options or RunOptions()
    part = problem.partition
    m = part.m
    if schedule.m != m:
        raise RegimeError(f"schedule built for m={schedule.m}, problem has m={m}")
    if schedule.regime == "part2":
        if np.any(problem.constants.mu <= 0) or problem.constants.L_yy != 0:
            raise RegimeError("accelerated schedule needs mu_i > 0 and L_yy = 0")
        for g in problem.primal_geometry:
            if g.kind != "euclidean":
                raise RegimeError("accelerated schedule is proven for the "
                                  "euclidean primal geometry only")
    if p is not None and schedule.p is not None and not np.allclose(p, schedule.p):
        raise ParameterError("sampling probabilities disagree with the schedule")
    p_arr = p if p is not None else schedule.p

    x = np.zeros(part.n) if x0 is None else np.asarray(x0, dtype=float).copy()
    y = np.zeros(problem.dual_dim) if y0 is None else np.asarray(y0, dtype=float).copy()
    rng = CounterRng(seed)
    sched = schedule
    g_prev = problem.grad_y(x, y)
    g_cur = g_prev.copy()
    x_sum = np.zeros_like(x)
    y_sum = np.zeros_like(y)
    incr = problem.grad_y_incremental

    ref = opts.reference
    record_at = set(int(r) for r in opts.record_at) if opts.record_at else set()
    trace = RunTrace(method=f"rapd-{sched.regime}", seed=seed, partition=part,
                     geometry_note=_geometry_note(problem))
    tic = time.perf_counter()
    i_k = -1
    mu = problem.constants.mu

    for k in range(K):
        s, g_cur = momentum_direction(problem, x, y, g_prev, m, sched.theta)
        y_new = dual_step(problem, y, s, sched.sigma)
        i_k = sample_block(rng, m, p_arr)
        sl = part.block_slice(i_k)
        old_block = x[sl].copy()
        x_new = primal_block_step(problem, x, y_new, i_k, float(sched.tau[i_k]))

        g_prev = g_cur
        if incr is not None:
            g_cur = incr(g_cur, i_k, old_block, x_new[sl], y_new)
        else:
            g_cur = problem.grad_y(x_new, y_new)

        x, y = x_new, y_new
        x_sum += x
        y_sum += y
        tau_used, t_used = sched.tau, sched.t
        sched = sched.advance()
        done = k + 1

        if opts.debug_cache_every and done % opts.debug_cache_every == 0:
            fresh = problem.grad_y(x, y)
            drift = float(np.linalg.norm(fresh - g_cur))
            if drift > 1e-10 * max(1.0, float(np.linalg.norm(fresh))):
                raise RegimeError(f"dual-gradient cache drifted by {drift:.3e} at k={done}")

        nx, ny = float(np.linalg.norm(x)), float(np.linalg.norm(y))
        if not (np.isfinite(nx) and np.isfinite(ny)) or max(nx, ny) > opts.divergence_limit:
            raise DivergenceError(
                f"iterate norm {max(nx, ny):.3e} exceeded {opts.divergence_limit:.1e} "
                f"at iteration {done} (method rapd-{sched.regime}, seed {seed})")

        if opts.iterate_hook is not None:
            opts.iterate_hook(done, x, y)

        if done in record_at or done == K:
            rec = TraceRecord(k=done, wall_s=time.perf_counter() - tic, i_k=i_k,
                              sigma=sched.sigma, theta=sched.theta,
                              tau_min=float(sched.tau.min()),
                              tau_max=float(sched.tau.max()), t=sched.t)
            if ref is not None:
                xbar, ybar = x_sum / done, y_sum / done
                rec.gap = _lagrangian_gap_vs(problem, xbar, ybar, ref)
                rec.dist_sq = float(np.sum((x - ref.x_star) ** 2))
                rec.dy = problem.dual_geometry.dist(ref.y_star, y)
                w = 1.0 / tau_used + (1.0 - 1.0 / m) * mu
                rec.wdist_sq = 0.5 * weighted_norm_sq_raw(x - ref.x_star, part, w)
                rec.t_prev = t_used
            trace.records.append(rec)
            stop_now = opts.stop_when is not None and opts.stop_when(x, y)
            out_of_time = (opts.time_budget_s is not None
                           and time.perf_counter() - tic > opts.time_budget_s)
            if stop_now or out_of_time:
                K = done
                break

    trace.final_x, trace.final_y = x, y
    trace.ergodic_x, trace.ergodic_y = ergodic_average(x_sum, y_sum, K)
    trace.iterations = K
    trace.wall_total_s = time.perf_counter() - tic
    return trace


def _geometry_note(problem) -> str:
    kinds = {g.kind for g in problem.primal_geometry}
    return f"primal={'/'.join(sorted(kinds))}, dual={problem.dual_geometry.kind}"


def _lagrangian_gap_vs(problem, xbar, ybar, ref) -> float:
    # local import keeps solver importable without the harness
    from .harness.metrics import lagrangian_gap
    return lagrangian_gap(problem, xbar, ybar, ref)
