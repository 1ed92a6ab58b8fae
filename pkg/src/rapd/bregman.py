"""Distance-generating functions, Bregman distances, and generalized proxes.

Two geometries ship: the Euclidean half-squared norm and negative entropy
(simplex/orthant domains).  A geometry knows its distance ``D(u, v)`` and
how to solve the elementary subproblem

    argmin_x  t*f(x) + <s, x> + (1/t)*... (see :func:`bregman_prox`)

for every prox-friendly ``f`` it supports.  The convention used throughout:

    bregman_prox(geom, f, t, s, xbar) = argmin_x  f(x) + <s, x> + D(x, xbar)/t

so that for the Euclidean geometry and ``f = 0`` the minimizer is exactly
``xbar - t*s``.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionError, DomainError, ParameterError

_ENTROPY_FLOOR = 1e-300  # clamp before logs; far below any test tolerance


# ---------------------------------------------------------------------------
# prox-friendly functions
# ---------------------------------------------------------------------------

class ProxFriendlyFunction:
    """Convex function with a cheap generalized prox.

    Subclasses provide ``value`` and the Euclidean prox
    ``argmin_x t*f(x) + 0.5*||x - u||^2``; entropy proxes exist only for
    the kinds a simplex/orthant geometry pairs with.  ``modulus`` is the
    strong-convexity constant w.r.t. the geometry's reference norm.
    """

    modulus = 0.0
    kind = "abstract"
    entropy_scale_invariant = False  # whether prox_entropy ignores rescaling of w

    def value(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def prox_euclidean(self, t: float, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def prox_entropy(self, t: float, w: np.ndarray) -> np.ndarray:
        """Minimize ``t*f(x) + KL(x, w)`` over the positive orthant;
        ``w`` already absorbs the linear term."""
        raise DomainError(f"{self.kind} has no entropy prox")

    def feasibility_gap(self, x: np.ndarray) -> float:
        """Distance-like violation of the effective domain (0 if free)."""
        return 0.0

    def project_domain(self, x: np.ndarray) -> np.ndarray:
        return x

    def __repr__(self):
        return f"<{type(self).__name__}>"


class Zero(ProxFriendlyFunction):
    kind = "zero"

    def value(self, x):
        return 0.0

    def prox_euclidean(self, t, u):
        return u

    def prox_entropy(self, t, w):
        return w


class L1(ProxFriendlyFunction):
    """``lam * ||x||_1`` (soft thresholding)."""

    kind = "l1"

    def __init__(self, lam: float):
        if not np.isfinite(lam) or lam < 0:
            raise ParameterError(f"l1 weight must be >= 0, got {lam}")
        self.lam = float(lam)

    def value(self, x):
        return self.lam * float(np.abs(x).sum())

    def prox_euclidean(self, t, u):
        th = t * self.lam
        return np.sign(u) * np.maximum(np.abs(u) - th, 0.0)


class SquaredL2(ProxFriendlyFunction):
    """``lam * ||x||^2``; strong-convexity modulus ``2*lam``."""

    kind = "squared-l2"

    def __init__(self, lam: float):
        if not np.isfinite(lam) or lam < 0:
            raise ParameterError(f"quadratic weight must be >= 0, got {lam}")
        self.lam = float(lam)
        self.modulus = 2.0 * self.lam

    def value(self, x):
        return self.lam * float(x @ x)

    def prox_euclidean(self, t, u):
        return u / (1.0 + 2.0 * t * self.lam)


class NonnegQuadratic(ProxFriendlyFunction):
    """``lam * ||x||^2`` on the nonnegative orthant, +inf outside.

    Carries the quadratic's modulus ``2*lam``; the prox is a scaled
    projection.
    """

    kind = "nonneg-squared-l2"

    def __init__(self, lam: float):
        if not np.isfinite(lam) or lam < 0:
            raise ParameterError(f"quadratic weight must be >= 0, got {lam}")
        self.lam = float(lam)
        self.modulus = 2.0 * self.lam

    def value(self, x):
        return self.lam * float(x @ x)

    def prox_euclidean(self, t, u):
        return np.maximum(u / (1.0 + 2.0 * t * self.lam), 0.0)

    def feasibility_gap(self, x):
        return float(np.maximum(-x, 0.0).max(initial=0.0))

    def project_domain(self, x):
        return np.maximum(x, 0.0)


class IndicatorNonneg(ProxFriendlyFunction):
    kind = "indicator-nonneg"

    def value(self, x):
        return 0.0

    def prox_euclidean(self, t, u):
        return np.maximum(u, 0.0)

    def prox_entropy(self, t, w):
        return w  # orthant is the entropy domain

    def feasibility_gap(self, x):
        return float(np.maximum(-x, 0.0).max(initial=0.0))

    def project_domain(self, x):
        return np.maximum(x, 0.0)


class IndicatorBox(ProxFriendlyFunction):
    kind = "indicator-box"

    def __init__(self, lo: float, hi: float):
        if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
            raise ParameterError(f"box bounds invalid: [{lo}, {hi}]")
        self.lo, self.hi = float(lo), float(hi)

    def value(self, x):
        return 0.0

    def prox_euclidean(self, t, u):
        return np.clip(u, self.lo, self.hi)

    def feasibility_gap(self, x):
        return float(max(np.maximum(self.lo - x, 0.0).max(initial=0.0),
                         np.maximum(x - self.hi, 0.0).max(initial=0.0)))

    def project_domain(self, x):
        return np.clip(x, self.lo, self.hi)


class IndicatorBall(ProxFriendlyFunction):
    kind = "indicator-ball"

    def __init__(self, radius: float):
        if not np.isfinite(radius) or radius <= 0:
            raise ParameterError(f"ball radius must be > 0, got {radius}")
        self.radius = float(radius)

    def value(self, x):
        return 0.0

    def prox_euclidean(self, t, u):
        nrm = float(np.linalg.norm(u))
        if nrm <= self.radius:
            return u.copy()
        return u * (self.radius / nrm)

    def feasibility_gap(self, x):
        return max(float(np.linalg.norm(x)) - self.radius, 0.0)

    def project_domain(self, x):
        return self.prox_euclidean(1.0, np.asarray(x, dtype=float))


def project_simplex(u: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Euclidean projection onto ``{x >= 0, sum x = scale}``.

    Sort-and-threshold; ties in the sorted order are resolved by index,
    which the arithmetic makes irrelevant to the result.
    """
    u = np.asarray(u, dtype=float)
    srt = np.sort(u)[::-1]
    css = np.cumsum(srt) - scale
    ks = np.arange(1, u.size + 1)
    cond = srt - css / ks > 0
    rho = int(np.nonzero(cond)[0][-1])
    theta = css[rho] / (rho + 1.0)
    return np.maximum(u - theta, 0.0)


class IndicatorSimplex(ProxFriendlyFunction):
    kind = "indicator-simplex"
    entropy_scale_invariant = True

    def __init__(self, scale: float = 1.0):
        if not np.isfinite(scale) or scale <= 0:
            raise ParameterError(f"simplex scale must be > 0, got {scale}")
        self.scale = float(scale)

    def value(self, x):
        return 0.0

    def prox_euclidean(self, t, u):
        return project_simplex(u, self.scale)

    def prox_entropy(self, t, w):
        s = float(w.sum())
        if s <= 0 or not np.isfinite(s):
            raise DomainError("entropy simplex update lost all mass")
        return w * (self.scale / s)

    def feasibility_gap(self, x):
        return float(abs(x.sum() - self.scale) + np.maximum(-x, 0.0).sum())

    def project_domain(self, x):
        return project_simplex(x, self.scale)


class ConeDualBall(ProxFriendlyFunction):
    """Indicator of the dual cone intersected with ``{||y|| <= B}``, for
    the nonnegative orthant cone.

    The orthant is self-dual, and orthant/ball projections commute, so
    projecting onto the orthant and then radially is the exact projection.
    """

    kind = "indicator-cone-dual-ball"

    def __init__(self, cone: str, bound: float):
        if cone != "nonneg":
            raise ParameterError(f"unsupported cone kind '{cone}' (only 'nonneg')")
        if not np.isfinite(bound) or bound <= 0:
            raise ParameterError(f"dual bound must be > 0, got {bound}")
        self.cone = cone
        self.bound = float(bound)

    def value(self, x):
        return 0.0

    def prox_euclidean(self, t, u):
        w = np.maximum(u, 0.0)
        nrm = float(np.linalg.norm(w))
        if nrm > self.bound:
            w *= self.bound / nrm
        return w

    def feasibility_gap(self, x):
        return float(np.maximum(-x, 0.0).max(initial=0.0)
                     + max(np.linalg.norm(np.maximum(x, 0.0)) - self.bound, 0.0))

    def project_domain(self, x):
        return self.prox_euclidean(1.0, np.asarray(x, dtype=float))


class Separable(ProxFriendlyFunction):
    """Concatenation of prox-friendly pieces on consecutive coordinate
    ranges; used for product duals such as (simplex weights, free scalar)."""

    kind = "separable"

    def __init__(self, parts):
        # parts: list of (function, size)
        self.parts = [(f, int(sz)) for f, sz in parts]
        self.modulus = min(f.modulus for f, _ in self.parts)
        self._offsets = np.concatenate([[0], np.cumsum([sz for _, sz in self.parts])])

    def _split(self, x):
        return [x[self._offsets[j]:self._offsets[j + 1]] for j in range(len(self.parts))]

    def value(self, x):
        return sum(f.value(seg) for (f, _), seg in zip(self.parts, self._split(x)))

    def prox_euclidean(self, t, u):
        return np.concatenate([f.prox_euclidean(t, seg)
                               for (f, _), seg in zip(self.parts, self._split(u))])

    def feasibility_gap(self, x):
        return max(f.feasibility_gap(seg)
                   for (f, _), seg in zip(self.parts, self._split(x)))

    def project_domain(self, x):
        return np.concatenate([f.project_domain(seg)
                               for (f, _), seg in zip(self.parts, self._split(x))])


# ---------------------------------------------------------------------------
# geometries
# ---------------------------------------------------------------------------

class BregmanGeometry:
    """Base geometry: distance ``D`` and the generalized prox solver."""

    kind = "abstract"

    def __init__(self, dim: int):
        if dim < 1:
            raise DimensionError(f"geometry dimension must be >= 1, got {dim}")
        self.dim = int(dim)

    def dist(self, u: np.ndarray, v: np.ndarray) -> float:
        raise NotImplementedError

    def prox(self, f: ProxFriendlyFunction, t: float, s: np.ndarray, xbar: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def ref_norm(self, u: np.ndarray) -> float:
        """Norm w.r.t. which the generating function is 1-strongly convex."""
        raise NotImplementedError

    def _check(self, *vecs):
        for v in vecs:
            if np.asarray(v).shape != (self.dim,):
                raise DimensionError(
                    f"{self.kind} geometry of dim {self.dim} got shape {np.asarray(v).shape}"
                )

    def __repr__(self):
        return f"<{type(self).__name__} dim={self.dim}>"


class EuclideanGeometry(BregmanGeometry):
    """``phi(u) = 0.5*||u||^2``; ``D(u, v) = 0.5*||u - v||^2``."""

    kind = "euclidean"

    def dist(self, u, v):
        self._check(u, v)
        d = np.asarray(u, dtype=float) - np.asarray(v, dtype=float)
        return 0.5 * float(d @ d)

    def ref_norm(self, u):
        return float(np.linalg.norm(u))

    def prox(self, f, t, s, xbar):
        self._check(s, xbar)
        if not t > 0:
            raise ParameterError(f"prox step must be > 0, got {t}")
        u = np.asarray(xbar, dtype=float) - t * np.asarray(s, dtype=float)
        return f.prox_euclidean(t, u)


class EntropyGeometry(BregmanGeometry):
    """Negative entropy ``phi(u) = sum u_i log u_i`` on the positive
    orthant; ``D`` is the generalized Kullback-Leibler divergence.

    1-strong convexity w.r.t. the l1 norm holds on the unit simplex
    (Pinsker), which is the domain this geometry is paired with in the
    solvers.
    """

    kind = "negative-entropy"

    def dist(self, u, v):
        self._check(u, v)
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if np.any(v <= 0):
            raise DomainError("entropy distance needs strictly positive second argument")
        if np.any(u < 0):
            raise DomainError("entropy distance needs nonnegative first argument")
        usafe = np.maximum(u, _ENTROPY_FLOOR)
        kl = np.where(u > 0, u * np.log(usafe / v), 0.0).sum()
        return float(kl - u.sum() + v.sum())

    def ref_norm(self, u):
        return float(np.abs(u).sum())

    def prox(self, f, t, s, xbar):
        self._check(s, xbar)
        if not t > 0:
            raise ParameterError(f"prox step must be > 0, got {t}")
        xbar = np.asarray(xbar, dtype=float)
        if np.any(xbar <= 0):
            raise DomainError("entropy prox center must be strictly positive")
        # stationarity: log(x/xbar) + t*s + t*f' = 0 -> multiplicative update
        expo = -t * np.asarray(s, dtype=float)
        if f.entropy_scale_invariant:
            expo = expo - expo.max()  # overflow guard; result is renormalized
        w = np.maximum(xbar, _ENTROPY_FLOOR) * np.exp(expo)
        return f.prox_entropy(t, w)


class ProductGeometry(BregmanGeometry):
    """Direct product of geometries on consecutive coordinate ranges.

    Distances add; the prox requires a :class:`Separable` function with
    matching part sizes (or Zero, which splits trivially).
    """

    kind = "product"

    def __init__(self, parts):
        self.parts = list(parts)
        super().__init__(sum(g.dim for g in self.parts))
        self._offsets = np.concatenate([[0], np.cumsum([g.dim for g in self.parts])])

    def _split(self, x):
        x = np.asarray(x, dtype=float)
        return [x[self._offsets[j]:self._offsets[j + 1]] for j in range(len(self.parts))]

    def dist(self, u, v):
        self._check(u, v)
        return sum(g.dist(us, vs) for g, us, vs in zip(self.parts, self._split(u), self._split(v)))

    def ref_norm(self, u):
        # l2 combination of the segment reference norms
        return float(np.sqrt(sum(g.ref_norm(seg) ** 2 for g, seg in zip(self.parts, self._split(u)))))

    def prox(self, f, t, s, xbar):
        self._check(s, xbar)
        if isinstance(f, Separable):
            pieces = f.parts
        elif isinstance(f, Zero):
            pieces = [(Zero(), g.dim) for g in self.parts]
        else:
            raise DomainError("product geometry needs a separable function")
        if [sz for _, sz in pieces] != [g.dim for g in self.parts]:
            raise DimensionError("separable part sizes do not match product geometry")
        out = []
        for g, (fj, _), sj, xj in zip(self.parts, pieces, self._split(s), self._split(xbar)):
            out.append(g.prox(fj, t, sj, xj))
        return np.concatenate(out)


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------

def bregman_dist(geom: BregmanGeometry, u: np.ndarray, v: np.ndarray) -> float:
    """Bregman distance ``D(u, v) >= 0`` of the given geometry."""
    return geom.dist(u, v)


def bregman_prox(geom: BregmanGeometry, f: ProxFriendlyFunction, t: float,
                 s: np.ndarray, xbar: np.ndarray) -> np.ndarray:
    """Solve ``argmin_x f(x) + <s, x> + D(x, xbar)/t``.

    Euclidean geometry with ``f = 0`` returns ``xbar - t*s`` exactly.
    """
    return geom.prox(f, t, np.asarray(s, dtype=float), np.asarray(xbar, dtype=float))


def three_point_check(geom: BregmanGeometry, f: ProxFriendlyFunction, t: float,
                      xbar: np.ndarray, x_test: np.ndarray,
                      s: np.ndarray | None = None, tol: float = 1e-10):
    """Check the three-point inequality at ``x_test``.

    With ``x+ = bregman_prox(geom, f, t, s, xbar)`` and
    ``F(x) = f(x) + <s, x>``, verifies

        F(x) + D(x, xbar)/t  >=  F(x+) + D(x+, xbar)/t + D(x, x+)/t
                                  + (mu/2)*||x - x+||^2

    in the geometry's reference norm.  Returns ``(passed, residual)`` with
    ``residual = lhs - rhs`` (nonnegative when the inequality holds).
    """
    xbar = np.asarray(xbar, dtype=float)
    x_test = np.asarray(x_test, dtype=float)
    if s is None:
        s = np.zeros(geom.dim)
    s = np.asarray(s, dtype=float)
    if f.feasibility_gap(x_test) > 1e-12:
        raise DomainError("x_test outside the domain of f")
    xp = bregman_prox(geom, f, t, s, xbar)
    lhs = f.value(x_test) + float(s @ x_test) + geom.dist(x_test, xbar) / t
    rhs = (f.value(xp) + float(s @ xp) + geom.dist(xp, xbar) / t
           + geom.dist(x_test, xp) / t
           + 0.5 * f.modulus * geom.ref_norm(x_test - xp) ** 2)
    residual = lhs - rhs
    return bool(residual >= -tol), float(residual)


def make_geometry(kind: str, dim: int) -> BregmanGeometry:
    if kind == "euclidean":
        return EuclideanGeometry(dim)
    if kind in ("entropy", "negative-entropy"):
        return EntropyGeometry(dim)
    raise ParameterError(f"unknown geometry kind '{kind}'")
