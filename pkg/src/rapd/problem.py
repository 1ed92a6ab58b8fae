"""Saddle-problem oracles and concrete problem builders.

A :class:`SaddleProblem` bundles everything the solvers consume: block
partition, per-block nonsmooth terms ``f_i`` with their moduli, the dual
term ``h``, the coupling value ``phi``, per-block primal gradients, the
full (and optionally incremental) dual gradient, Lipschitz constants, and
the Bregman geometries of both sides.

Builders: bilinear empirical-risk coupling, quadratic two-player game,
and the conically constrained program reformulated with a dual-ball cap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blockcore import BlockPartition
from .bregman import (BregmanGeometry, ConeDualBall, EuclideanGeometry,
                      ProxFriendlyFunction, Zero)
from .exceptions import DimensionError, ParameterError

#: substitute for structurally zero couplings; the step formulas require
#: strictly positive per-block dual-coupling constants
ZERO_COUPLING_FLOOR = 1e-12


def power_norm(mat: np.ndarray, iters: int = 200, rtol: float = 1e-12) -> float:
    """Spectral norm by power iteration on ``mat.T @ mat``.

    Deterministic all-ones start; stops after ``iters`` rounds or when the
    estimate changes by less than ``rtol`` relatively.
    """
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    gram = mat.T @ mat if mat.shape[0] >= mat.shape[1] else mat @ mat.T
    v = np.ones(gram.shape[0]) / np.sqrt(gram.shape[0])
    est = 0.0
    for _ in range(iters):
        w = gram @ v
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        if abs(nrm - est) <= rtol * max(nrm, 1.0):
            est = nrm
            break
        est = nrm
    return float(np.sqrt(est))


@dataclass
class LipschitzConstants:
    """Per-block smoothness data consumed by the step-size rules."""

    L_xx: np.ndarray   # coordinate-wise primal Lipschitz constants, >= 0
    L_yx: np.ndarray   # dual/primal coupling constants, > 0
    L_yy: float        # dual Lipschitz constant, >= 0
    mu: np.ndarray     # strong-convexity moduli of the f_i

    def __post_init__(self):
        self.L_xx = np.asarray(self.L_xx, dtype=float)
        self.L_yx = np.maximum(np.asarray(self.L_yx, dtype=float), ZERO_COUPLING_FLOOR)
        self.L_yy = float(self.L_yy)
        self.mu = np.asarray(self.mu, dtype=float)

    def scaled(self, factor: float) -> "LipschitzConstants":
        """Globally deflate/inflate the smoothness constants (the moduli
        are properties of f and are left alone)."""
        return LipschitzConstants(self.L_xx * factor, self.L_yx * factor,
                                  self.L_yy * factor, self.mu.copy())


class SaddleProblem:
    """Oracle bundle for ``min_x max_y  sum_i f_i(x_i) + phi(x, y) - h(y)``."""

    def __init__(self, partition: BlockPartition, dual_dim: int,
                 f: list, h: ProxFriendlyFunction,
                 constants: LipschitzConstants,
                 primal_geometry: list | None = None,
                 dual_geometry: BregmanGeometry | None = None):
        if len(f) != partition.m:
            raise DimensionError(f"need {partition.m} block functions, got {len(f)}")
        self.partition = partition
        self.dual_dim = int(dual_dim)
        self.f = list(f)
        self.h = h
        self.constants = constants
        self.primal_geometry = primal_geometry or [
            EuclideanGeometry(sz) for sz in partition.sizes
        ]
        self.dual_geometry = dual_geometry or EuclideanGeometry(dual_dim)

    # -- coupling oracles ------------------------------------------------

    def phi_value(self, x: np.ndarray, y: np.ndarray) -> float:
        raise NotImplementedError

    def grad_x_block(self, i: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def grad_y(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    #: overridden by couplings separable across primal blocks
    grad_y_incremental = None

    # -- convenience -----------------------------------------------------

    def grad_x(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Full primal gradient (concatenated blocks)."""
        return np.concatenate([self.grad_x_block(i, x, y)
                               for i in range(self.partition.m)])

    def f_value(self, x: np.ndarray) -> float:
        return sum(fi.value(x[sl]) for fi, sl in zip(self.f, self.partition.slices()))

    def lagrangian(self, x: np.ndarray, y: np.ndarray) -> float:
        return self.f_value(x) + self.phi_value(x, y) - self.h.value(y)

    def with_lipschitz_scale(self, factor: float) -> "SaddleProblem":
        """Shallow copy with globally rescaled smoothness constants."""
        import copy
        out = copy.copy(self)
        out.constants = self.constants.scaled(factor)
        return out


class BilinearProblem(SaddleProblem):
    """``phi(x, y) = <A x, y>`` with per-block columns ``A_i``; separable
    across blocks, so the dual gradient updates incrementally."""

    def __init__(self, A_blocks, f, h, partition=None, **kw):
        A_blocks = [np.atleast_2d(np.asarray(A, dtype=float)) for A in A_blocks]
        dual_dim = A_blocks[0].shape[0]
        if any(A.shape[0] != dual_dim for A in A_blocks):
            raise DimensionError("all coupling blocks must share the dual dimension")
        sizes = [A.shape[1] for A in A_blocks]
        partition = partition or BlockPartition(sizes)
        if list(partition.sizes) != sizes:
            raise DimensionError("partition sizes do not match coupling blocks")
        constants = LipschitzConstants(
            L_xx=np.zeros(len(A_blocks)),
            L_yx=np.array([power_norm(A) for A in A_blocks]),
            L_yy=0.0,
            mu=np.array([fi.modulus for fi in f]),
        )
        super().__init__(partition, dual_dim, f, h, constants, **kw)
        self.A_blocks = A_blocks
        self.A = np.hstack(A_blocks)

    def phi_value(self, x, y):
        return float(y @ (self.A @ x))

    def grad_x_block(self, i, x, y):
        return self.A_blocks[i].T @ y

    def grad_y(self, x, y):
        return self.A @ x

    def grad_y_incremental(self, prev_grad, i, old_block, new_block, y_unchanged):
        return prev_grad + self.A_blocks[i] @ (new_block - old_block)


class QuadraticGameProblem(SaddleProblem):
    """``phi = 0.5 x'Px + p'x + y'Cx - 0.5 y'Qy - q'y`` with P, Q
    symmetric PSD; strongly convex in x when P is definite and linear in
    y when Q = 0."""

    def __init__(self, P, Q, C, p, q, partition, f=None, h=None,
                 validate=True, **kw):
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        C = np.atleast_2d(np.asarray(C, dtype=float))
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        d, n = C.shape
        if P.shape != (n, n) or Q.shape != (d, d) or p.shape != (n,) or q.shape != (d,):
            raise DimensionError("quadratic game dimensions are inconsistent")
        if validate:
            for name, M in (("P", P), ("Q", Q)):
                if not np.allclose(M, M.T, atol=1e-10):
                    raise ParameterError(f"{name} must be symmetric")
                if M.size and float(np.linalg.eigvalsh(M).min()) < -1e-10:
                    raise ParameterError(f"{name} must be positive semidefinite")
        f = f or [Zero() for _ in partition.sizes]
        h = h or Zero()
        slices = partition.slices()
        constants = LipschitzConstants(
            L_xx=np.array([power_norm(P[:, sl]) for sl in slices]),
            L_yx=np.array([power_norm(C[:, sl]) for sl in slices]),
            L_yy=power_norm(Q),
            mu=np.array([fi.modulus for fi in f]),
        )
        super().__init__(partition, d, f, h, constants, **kw)
        self.P, self.Q, self.C, self.p, self.q = P, Q, C, p, q
        self._P_rows = [P[sl, :] for sl in slices]
        self._C_cols = [C[:, sl] for sl in slices]

    def phi_value(self, x, y):
        return float(0.5 * x @ (self.P @ x) + self.p @ x + y @ (self.C @ x)
                     - 0.5 * y @ (self.Q @ y) - self.q @ y)

    def grad_x_block(self, i, x, y):
        sl = self.partition.block_slice(i)
        return self._P_rows[i] @ x + self.p[sl] + self._C_cols[i].T @ y

    def grad_y(self, x, y):
        return self.C @ x - self.Q @ y - self.q


@dataclass
class QuadraticMap:
    """Componentwise-convex quadratic map ``G_j(x) = 0.5 x'Q_j x + a_j'x + b_j``.

    ``quadratics`` may be ``None`` for an affine map.  ``x_radius`` bounds
    the region on which coordinate Lipschitz constants of a genuinely
    quadratic map are computed; affine maps do not need it.
    """

    linear: np.ndarray                 # (d, n)
    offset: np.ndarray                 # (d,)
    quadratics: list | None = None     # d PSD matrices (n, n)
    x_radius: float | None = None

    def __post_init__(self):
        self.linear = np.atleast_2d(np.asarray(self.linear, dtype=float))
        self.offset = np.asarray(self.offset, dtype=float)
        if self.quadratics is not None:
            self.quadratics = [np.asarray(Qj, dtype=float) for Qj in self.quadratics]
            if self.x_radius is None:
                raise ParameterError("quadratic constraint maps need x_radius for "
                                     "their coordinate Lipschitz constants")

    @property
    def d(self):
        return self.linear.shape[0]

    def value(self, x):
        v = self.linear @ x + self.offset
        if self.quadratics is not None:
            v = v + 0.5 * np.array([x @ (Qj @ x) for Qj in self.quadratics])
        return v

    def jacobian(self, x):
        J = self.linear.copy()
        if self.quadratics is not None:
            J += np.stack([Qj @ x for Qj in self.quadratics])
        return J

    def coord_lipschitz(self, partition):
        """Per-block constants C_i (map) and L_i (Jacobian)."""
        slices = partition.slices()
        if self.quadratics is None:
            C = np.array([power_norm(self.linear[:, sl]) for sl in slices])
            L = np.zeros(partition.m)
            return C, L
        R = float(self.x_radius)
        C = np.zeros(partition.m)
        L = np.zeros(partition.m)
        for i, sl in enumerate(slices):
            # |G_j(x+U_i v) - G_j(x)| <= (||Q_j U_i||R + ||(a_j)_i||
            #   + ||U_i'Q_j U_i||R) ||v||  on ||x||, ||x+U_i v|| <= R
            lin = np.array([float(np.linalg.norm(self.linear[j, sl]))
                            for j in range(self.d)])
            quad = np.array([power_norm(Qj[:, sl]) * R + power_norm(Qj[sl, sl]) * R
                             for Qj in self.quadratics])
            C[i] = float(np.linalg.norm(lin + quad))
            L[i] = float(np.sqrt(sum(power_norm(Qj[:, sl]) ** 2
                                     for Qj in self.quadratics)))
        return C, L


class ConstrainedProblem(SaddleProblem):
    """Saddle reformulation of ``min f(x) + g(x) s.t. G(x) in -K`` with a
    known dual bound: ``phi = g(x) + <G(x), y>`` and ``h`` the indicator
    of the dual cone capped at radius B."""

    def __init__(self, g_spec: QuadraticMap | tuple, G_spec: QuadraticMap,
                 cone: str, B: float, partition: BlockPartition,
                 f=None, **kw):
        if not B > 0:
            raise ParameterError(f"dual bound must be > 0, got {B}")
        # g is a convex quadratic 0.5 x'P x + p'x given as (P, p)
        if isinstance(g_spec, tuple):
            Pg, pg = g_spec
        else:
            raise ParameterError("g_spec must be a (P, p) quadratic pair")
        Pg = np.asarray(Pg, dtype=float)
        pg = np.asarray(pg, dtype=float)
        f = f or [Zero() for _ in partition.sizes]
        slices = partition.slices()
        Cg, Lg_jac = G_spec.coord_lipschitz(partition)
        Li_g = np.array([power_norm(Pg[:, sl]) for sl in slices])
        constants = LipschitzConstants(
            L_xx=Li_g + Lg_jac * B,
            L_yx=Cg,
            L_yy=0.0,
            mu=np.array([fi.modulus for fi in f]),
        )
        h = ConeDualBall(cone, B)
        super().__init__(partition, G_spec.d, f, h, constants, **kw)
        self.Pg, self.pg, self.G_spec, self.B = Pg, pg, G_spec, float(B)
        self._Pg_rows = [Pg[sl, :] for sl in slices]

    def phi_value(self, x, y):
        return float(0.5 * x @ (self.Pg @ x) + self.pg @ x + y @ self.G_spec.value(x))

    def grad_x_block(self, i, x, y):
        sl = self.partition.block_slice(i)
        return self._Pg_rows[i] @ x + self.pg[sl] + self.G_spec.jacobian(x)[:, sl].T @ y

    def grad_y(self, x, y):
        return self.G_spec.value(x)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def build_bilinear_erm(A_blocks, f, h, **kw) -> BilinearProblem:
    """Risk-minimization style bilinear coupling ``phi = sum <A_i x_i, y>``."""
    return BilinearProblem(A_blocks, f, h, **kw)


def build_quadratic_game(P, Q, C, p, q, partition, f=None, h=None, **kw) -> QuadraticGameProblem:
    """Convex-concave quadratic game; see :class:`QuadraticGameProblem`."""
    return QuadraticGameProblem(P, Q, C, p, q, partition, f=f, h=h, **kw)


def build_constrained(g_spec, G_spec, cone, B, partition, f=None, **kw) -> ConstrainedProblem:
    """Constrained program recast as a saddle problem with dual ball B."""
    return ConstrainedProblem(g_spec, G_spec, cone, B, partition, f=f, **kw)


# ---------------------------------------------------------------------------
# numerical validation
# ---------------------------------------------------------------------------

def grad_check(problem: SaddleProblem, num_points: int = 10, epsilon: float = 1e-5,
               seed: int = 0, x_scale: float = 1.0) -> float:
    """Central-difference check of the coupling gradients.

    Returns the worst relative error over random interior points; a
    corrupted gradient shows up as an O(1) error.
    """
    if not 1e-8 < epsilon < 1e-3:
        raise ParameterError(f"epsilon must be in (1e-8, 1e-3), got {epsilon}")
    rng = np.random.default_rng(seed)
    part = problem.partition
    worst = 0.0
    for _ in range(num_points):
        x = rng.standard_normal(part.n) * x_scale
        y = _interior_dual_point(problem, rng)
        # primal blocks
        fd_g = np.zeros(part.n)
        for j in range(part.n):
            e = np.zeros(part.n)
            e[j] = epsilon
            fd_g[j] = (problem.phi_value(x + e, y) - problem.phi_value(x - e, y)) / (2 * epsilon)
        g = problem.grad_x(x, y)
        worst = max(worst, _rel_err(fd_g, g))
        # dual side
        fd_h = np.zeros(problem.dual_dim)
        for j in range(problem.dual_dim):
            e = np.zeros(problem.dual_dim)
            e[j] = epsilon
            fd_h[j] = (problem.phi_value(x, y + e) - problem.phi_value(x, y - e)) / (2 * epsilon)
        gy = problem.grad_y(x, y)
        worst = max(worst, _rel_err(fd_h, gy))
    return worst


def _rel_err(a, b):
    return float(np.linalg.norm(a - b) / max(1.0, np.linalg.norm(b)))


def _interior_dual_point(problem, rng, scale: float = 1.0):
    """Random dual point in the interior of dom h (needed for convexity
    of couplings whose curvature depends on y, e.g. kernel weights)."""
    y = rng.standard_normal(problem.dual_dim) * scale
    return problem.h.project_domain(y)


def lipschitz_spot_check(problem: SaddleProblem, draws: int = 1000, seed: int = 0,
                         x_scale: float = 1.0, v_scale: float = 1.0,
                         project_x=None) -> dict:
    """Sampled residuals for the coordinate-smoothness bounds.

    For random ``(x, v, y, ybar)`` the four inequalities below must hold;
    reported values are worst signed slacks (>= 0 means satisfied):

    - ``L_xx``:  L_xx_i*||v|| - ||grad_xi phi(x+U_i v, y) - grad_xi phi(x, y)||
    - ``L_yx``:  L_yy*||y-ybar|| + L_yx_i*||v||
                 - ||grad_y phi(x+U_i v, ybar) - grad_y phi(x, y)||
    - ``convexity``: both sides of the Bregman sandwich
      ``0 <= phi(x+U_i v, y) - phi(x, y) - <grad_xi phi(x, y), v>
         <= 0.5*L_xx_i*||v||^2``
    - ``concavity``: ``0 >= phi(x, y) - phi(x, ybar) - <grad_y phi(x, ybar), y-ybar>
         >= -0.5*L_yy*||y-ybar||^2``
    """
    rng = np.random.default_rng(seed)
    part = problem.partition
    c = problem.constants
    out = {"L_xx": np.inf, "L_yx": np.inf, "convexity_lo": np.inf,
           "convexity_hi": np.inf, "concavity_hi": np.inf, "concavity_lo": np.inf}
    for _ in range(draws):
        x = rng.standard_normal(part.n) * x_scale
        if project_x is not None:
            x = project_x(x)
        y = _interior_dual_point(problem, rng)
        ybar = _interior_dual_point(problem, rng)
        i = int(rng.integers(part.m))
        sl = part.block_slice(i)
        v = rng.standard_normal(part.sizes[i]) * v_scale
        xv = x.copy()
        xv[sl] += v
        nv = float(np.linalg.norm(v))

        gxi = problem.grad_x_block(i, x, y)
        gxi_v = problem.grad_x_block(i, xv, y)
        out["L_xx"] = min(out["L_xx"],
                          c.L_xx[i] * nv - float(np.linalg.norm(gxi_v - gxi)))

        gy = problem.grad_y(x, y)
        gy_v = problem.grad_y(xv, ybar)
        out["L_yx"] = min(out["L_yx"],
                          c.L_yy * float(np.linalg.norm(y - ybar)) + c.L_yx[i] * nv
                          - float(np.linalg.norm(gy_v - gy)))

        bread = problem.phi_value(xv, y) - problem.phi_value(x, y) - float(gxi @ v)
        out["convexity_lo"] = min(out["convexity_lo"], bread)
        out["convexity_hi"] = min(out["convexity_hi"],
                                  0.5 * c.L_xx[i] * nv ** 2 - bread)

        gyb = problem.grad_y(x, ybar)
        conc = problem.phi_value(x, y) - problem.phi_value(x, ybar) - float(gyb @ (y - ybar))
        out["concavity_hi"] = min(out["concavity_hi"], -conc)
        out["concavity_lo"] = min(out["concavity_lo"],
                                  conc + 0.5 * c.L_yy * float(np.linalg.norm(y - ybar)) ** 2)
    return out
