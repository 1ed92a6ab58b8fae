"""Deterministic reference methods.

``pdhg_run`` is the classical extrapolated primal-dual iteration (the
whole primal updated every iteration, momentum weight 1); on bilinear
couplings it coincides iterate-for-iterate with the randomized solver at
m = 1, which the tests exploit as an oracle.

``mirror_prox_run`` is the composite extra-gradient scheme: a proximal
half-step at the current point, then a proximal correction step from the
original point using the half-point's gradients, both with step 1/L; the
ergodic average of the half-points is the rate-carrying output.
"""

from __future__ import annotations

import time

import numpy as np

from .bregman import bregman_prox
from .exceptions import DivergenceError, ParameterError
from .problem import SaddleProblem, power_norm
from .solver import DIVERGENCE_LIMIT, RunTrace, TraceRecord
from .harness.metrics import lagrangian_gap


def _full_primal_prox(problem, x, grad, tau):
    out = np.empty_like(x)
    for i, sl in enumerate(problem.partition.slices()):
        out[sl] = bregman_prox(problem.primal_geometry[i], problem.f[i],
                               tau, grad[sl], x[sl])
    return out


def pdhg_run(problem: SaddleProblem, tau: float, sigma: float, K: int,
             x0: np.ndarray | None = None, y0: np.ndarray | None = None,
             record_at=None, reference=None, iterate_hook=None) -> RunTrace:
    """Extrapolated primal-dual with constant steps.

    Dual ascent at the extrapolated dual gradient ``2 g_k - g_{k-1}``,
    then a full primal prox-descent at ``grad_x phi(x^k, y^{k+1})``.
    Initialization uses ``g_{-1} = g_0``.
    """
    if not (tau > 0 and sigma > 0):
        raise ParameterError(f"steps must be positive, got tau={tau}, sigma={sigma}")
    part = problem.partition
    x = np.zeros(part.n) if x0 is None else np.asarray(x0, dtype=float).copy()
    y = np.zeros(problem.dual_dim) if y0 is None else np.asarray(y0, dtype=float).copy()
    g_prev = problem.grad_y(x, y)
    record_at = set(int(r) for r in record_at) if record_at else set()
    trace = RunTrace(method="pdhg", seed=None, partition=part)
    x_sum = np.zeros_like(x)
    y_sum = np.zeros_like(y)
    tic = time.perf_counter()

    for k in range(K):
        g = problem.grad_y(x, y)
        s = 2.0 * g - g_prev
        y = bregman_prox(problem.dual_geometry, problem.h, sigma, -s, y)
        x = _full_primal_prox(problem, x, problem.grad_x(x, y), tau)
        g_prev = g
        x_sum += x
        y_sum += y
        done = k + 1
        if iterate_hook is not None:
            iterate_hook(done, x, y)
        nrm = max(float(np.linalg.norm(x)), float(np.linalg.norm(y)))
        if not np.isfinite(nrm) or nrm > DIVERGENCE_LIMIT:
            raise DivergenceError(f"pdhg iterates reached {nrm:.3e} at k={done} "
                                  f"(step product tau*sigma*L^2 too large?)")
        if done in record_at or done == K:
            rec = TraceRecord(k=done, wall_s=time.perf_counter() - tic, i_k=-1,
                              sigma=sigma, theta=1.0, tau_min=tau, tau_max=tau, t=1.0)
            if reference is not None:
                rec.gap = lagrangian_gap(problem, x_sum / done, y_sum / done, reference)
                rec.dist_sq = float(np.sum((x - reference.x_star) ** 2))
                rec.dy = problem.dual_geometry.dist(reference.y_star, y)
            trace.records.append(rec)

    trace.final_x, trace.final_y = x, y
    trace.ergodic_x, trace.ergodic_y = x_sum / K, y_sum / K
    trace.iterations = K
    trace.wall_total_s = time.perf_counter() - tic
    return trace


def estimate_operator_lipschitz(problem: SaddleProblem) -> float:
    """Lipschitz constant of the first-order map for (bi)linear-quadratic
    couplings, via the spectral norm of the linearization."""
    if hasattr(problem, "A"):
        return power_norm(problem.A)
    if hasattr(problem, "P"):
        top = np.hstack([problem.P, problem.C.T])
        bot = np.hstack([-problem.C, problem.Q])
        return power_norm(np.vstack([top, bot]))
    raise ParameterError("no built-in Lipschitz estimate for this coupling; "
                         "pass L explicitly")


def mirror_prox_run(problem: SaddleProblem, L: float | None, K: int,
                    x0: np.ndarray | None = None, y0: np.ndarray | None = None,
                    record_at=None, reference=None) -> RunTrace:
    """Composite mirror-prox with both prox steps at 1/L.

    The gap metric is evaluated at the ergodic average of the half
    points, which is the sequence the O(L/k) rate speaks about.
    """
    if L is None:
        L = estimate_operator_lipschitz(problem)
    if not L > 0:
        raise ParameterError(f"need L > 0, got {L}")
    eta = 1.0 / float(L)
    part = problem.partition
    x = np.zeros(part.n) if x0 is None else np.asarray(x0, dtype=float).copy()
    y = np.zeros(problem.dual_dim) if y0 is None else np.asarray(y0, dtype=float).copy()
    record_at = set(int(r) for r in record_at) if record_at else set()
    trace = RunTrace(method="mirror_prox", seed=None, partition=part,
                     geometry_note=f"primal={problem.primal_geometry[0].kind}, "
                                   f"dual={problem.dual_geometry.kind}")
    xh_sum = np.zeros_like(x)
    yh_sum = np.zeros_like(y)
    tic = time.perf_counter()

    for k in range(K):
        # half step at the current point
        xh = _full_primal_prox(problem, x, problem.grad_x(x, y), eta)
        yh = bregman_prox(problem.dual_geometry, problem.h, eta, -problem.grad_y(x, y), y)
        # correction step from the current point, gradients at the half point
        x = _full_primal_prox(problem, x, problem.grad_x(xh, yh), eta)
        y = bregman_prox(problem.dual_geometry, problem.h, eta, -problem.grad_y(xh, yh), y)
        xh_sum += xh
        yh_sum += yh
        done = k + 1
        nrm = max(float(np.linalg.norm(x)), float(np.linalg.norm(y)))
        if not np.isfinite(nrm) or nrm > DIVERGENCE_LIMIT:
            raise DivergenceError(f"mirror-prox iterates reached {nrm:.3e} at k={done}")
        if done in record_at or done == K:
            rec = TraceRecord(k=done, wall_s=time.perf_counter() - tic, i_k=-1,
                              sigma=eta, theta=1.0, tau_min=eta, tau_max=eta, t=1.0)
            if reference is not None:
                rec.gap = lagrangian_gap(problem, xh_sum / done, yh_sum / done, reference)
                rec.dist_sq = float(np.sum((x - reference.x_star) ** 2))
                rec.dy = problem.dual_geometry.dist(reference.y_star, y)
            trace.records.append(rec)

    trace.final_x, trace.final_y = x, y
    trace.ergodic_x, trace.ergodic_y = xh_sum / K, yh_sum / K
    trace.iterations = K
    trace.wall_total_s = time.perf_counter() - tic
    return trace
