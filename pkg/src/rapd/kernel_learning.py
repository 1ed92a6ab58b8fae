"""Multiple-kernel soft-margin SVM as a saddle problem, at desk scale.

The learner picks a convex combination of M normalized Gram matrices
while the SVM dual variable plays against it.  Mapped onto the solver's
min-max form, the blocked primal variable is the SVM dual vector (kept
nonnegative by ``f``), and the dual variable is the pair (kernel weights
on the unit simplex, free multiplier of the label-balance constraint):

    phi(x, (y, z)) = -2 e'x + sum_l (c/r_l) y_l x'G_l x
                     [+ lam ||x||^2]  + z (b'x)

with ``G_l = diag(b) K_l diag(b)``.  By default the ridge term
``lam ||x||^2`` is folded out of phi into the block functions
(scaled nonnegative projection prox), which gives every block modulus
``2 lam`` and makes the accelerated regime applicable.

A synthetic two-cluster dataset generator stands in for a real corpus.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .blockcore import BlockPartition
from .bregman import (EntropyGeometry, EuclideanGeometry, IndicatorNonneg,
                      IndicatorSimplex, NonnegQuadratic, ProductGeometry,
                      Separable, Zero)
from .exceptions import DimensionError, DomainError, ParameterError
from .problem import LipschitzConstants, SaddleProblem, power_norm

GRAM_MAGIC = b"RAPDK1"


# ---------------------------------------------------------------------------
# kernels and data
# ---------------------------------------------------------------------------

def kernel_eval(kind: str, a: np.ndarray, abar: np.ndarray, bandwidth: float = 0.1) -> float:
    """Evaluate one kernel function.

    ``poly2``: (1 + a'abar)^2; ``gauss``: exp(-0.5 ||a - abar||^2 / bw);
    ``linear``: a'abar.
    """
    a = np.asarray(a, dtype=float)
    abar = np.asarray(abar, dtype=float)
    if a.shape != abar.shape:
        raise DimensionError(f"kernel arguments differ in shape: {a.shape} vs {abar.shape}")
    if kind == "poly2":
        return float((1.0 + a @ abar) ** 2)
    if kind == "gauss":
        d = a - abar
        return float(np.exp(-0.5 * (d @ d) / bandwidth))
    if kind == "linear":
        return float(a @ abar)
    raise ParameterError(f"unknown kernel kind '{kind}'")


def gram_matrix(kind: str, points: np.ndarray, bandwidth: float = 0.1) -> np.ndarray:
    """Dense Gram matrix of one kernel over all point pairs."""
    pts = np.asarray(points, dtype=float)
    inner = pts @ pts.T
    if kind == "poly2":
        return (1.0 + inner) ** 2
    if kind == "gauss":
        sq = np.diag(inner)
        d2 = sq[:, None] + sq[None, :] - 2.0 * inner
        return np.exp(-0.5 * np.maximum(d2, 0.0) / bandwidth)
    if kind == "linear":
        return inner.copy()
    raise ParameterError(f"unknown kernel kind '{kind}'")


def normalize_gram(K: np.ndarray) -> np.ndarray:
    """Scale to unit diagonal: ``K_ij / sqrt(K_ii K_jj)``."""
    dg = np.diag(K).copy()
    if dg.min() <= 1e-10:
        raise DomainError("gram diagonal too small to normalize")
    s = 1.0 / np.sqrt(dg)
    return K * np.outer(s, s)


@dataclass
class KernelDataset:
    points: np.ndarray   # (n_tr, d)
    labels: np.ndarray   # entries in {-1, +1}
    seed: int = 0
    separation: float = 2.0

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.labels = np.asarray(self.labels, dtype=float)
        if self.points.shape[0] != self.labels.size or self.points.shape[0] < 2:
            raise DimensionError("need one label per point and at least two points")
        if not np.all(np.isin(self.labels, (-1.0, 1.0))):
            raise DomainError("labels must be -1 or +1")
        if np.all(self.labels == self.labels[0]):
            raise DomainError("both classes must be present")

    @property
    def n_tr(self) -> int:
        return self.points.shape[0]


def synth_dataset(n_tr: int, d: int, seed: int = 0, separation: float = 2.0) -> KernelDataset:
    """Two unit-covariance Gaussian clusters at ``+-separation * e_1``,
    balanced labels, deterministic per seed."""
    if n_tr < 10 or d < 2:
        raise ParameterError(f"need n_tr >= 10 and d >= 2, got {n_tr}, {d}")
    rng = np.random.default_rng(seed)
    half = n_tr // 2
    sizes = (half, n_tr - half)
    mean = np.zeros(d)
    mean[0] = separation
    pts = np.vstack([rng.standard_normal((sizes[0], d)) + mean,
                     rng.standard_normal((sizes[1], d)) - mean])
    lbl = np.concatenate([np.ones(sizes[0]), -np.ones(sizes[1])])
    order = rng.permutation(n_tr)
    return KernelDataset(points=pts[order], labels=lbl[order], seed=seed,
                         separation=separation)


# ---------------------------------------------------------------------------
# the saddle problem
# ---------------------------------------------------------------------------

class KernelProblem(SaddleProblem):
    """See the module docstring for the coupling; ``dual = (y, z)`` with
    the simplex weights first and the free multiplier last."""

    def __init__(self, G_list, b, lam, c, r, partition, B,
                 fold_quadratic_into_f=True, dual_geometry="entropy",
                 lipschitz_scale=1.0):
        M = len(G_list)
        n = G_list[0].shape[0]
        coef = c / np.asarray(r, dtype=float)
        slices = partition.slices()

        col_norms = np.array([[power_norm(G[:, sl]) for sl in slices] for G in G_list])
        diag_norms = np.array([[power_norm(G[sl, sl]) for sl in slices] for G in G_list])
        m = partition.m
        L_xx = 6.0 * col_norms.max(axis=0)
        if not fold_quadratic_into_f:
            L_xx = L_xx + 2.0 * lam
        L_yx = 6.0 * np.sqrt(M) * B * (col_norms + diag_norms / m).max(axis=0)
        if fold_quadratic_into_f:
            f = [NonnegQuadratic(lam) for _ in range(m)]
        else:
            f = [IndicatorNonneg() for _ in range(m)]
        constants = LipschitzConstants(L_xx=L_xx * lipschitz_scale,
                                       L_yx=L_yx * lipschitz_scale,
                                       L_yy=0.0,
                                       mu=np.array([fi.modulus for fi in f]))
        h = Separable([(IndicatorSimplex(1.0), M), (Zero(), 1)])
        if dual_geometry == "entropy":
            dg = ProductGeometry([EntropyGeometry(M), EuclideanGeometry(1)])
        elif dual_geometry == "euclidean":
            dg = EuclideanGeometry(M + 1)
        else:
            raise ParameterError(f"unknown dual geometry '{dual_geometry}'")
        super().__init__(partition, M + 1, f, h, constants, dual_geometry=dg)
        self.G_list = [np.asarray(G, dtype=float) for G in G_list]
        self.b = np.asarray(b, dtype=float)
        self.lam = float(lam)
        self.c = float(c)
        self.r = np.asarray(r, dtype=float)
        self.coef = coef
        self.B = float(B)
        self.M = M
        self.folded = bool(fold_quadratic_into_f)
        self._G_rows = [[G[sl, :] for sl in slices] for G in self.G_list]

    def phi_value(self, x, yz):
        y, z = yz[:self.M], yz[self.M]
        quad = np.array([x @ (G @ x) for G in self.G_list])
        val = -2.0 * x.sum() + float(self.coef * y @ quad) + z * float(self.b @ x)
        if not self.folded:
            val += self.lam * float(x @ x)
        return float(val)

    def grad_x_block(self, i, x, yz):
        y, z = yz[:self.M], yz[self.M]
        sl = self.partition.block_slice(i)
        g = np.full(sl.stop - sl.start, -2.0)
        for l in range(self.M):
            g += (2.0 * self.coef[l] * y[l]) * (self._G_rows[l][i] @ x)
        if not self.folded:
            g += 2.0 * self.lam * x[sl]
        g += z * self.b[sl]
        return g

    def grad_y(self, x, yz):
        quad = np.array([x @ (G @ x) for G in self.G_list])
        return np.concatenate([self.coef * quad, [self.b @ x]])

    def project_primal_domain(self, x):
        """Nonnegative orthant scaled into the ball of radius B (the
        region the coupling constants are valid on)."""
        w = np.maximum(np.asarray(x, dtype=float), 0.0)
        nrm = float(np.linalg.norm(w))
        if nrm > self.B:
            w *= self.B / nrm
        return w


def default_dual_bound(n_tr: int, lam: float) -> float:
    """Norm bound on the optimal blocked variable: at the inner optimum
    ``2 e'x - lam ||x||^2 >= 0`` forces ``||x|| <= 2 sqrt(n_tr)/lam``."""
    return 2.0 * np.sqrt(n_tr) / lam


def build_kernel_problem(dataset: KernelDataset, lam: float, B: float | None = None,
                         m_blocks: int = 8, c: float | None = None,
                         kernels=("poly2", "gauss", "linear"), bandwidth: float = 0.1,
                         fold_quadratic_into_f: bool = True,
                         dual_geometry: str = "entropy",
                         lipschitz_scale: float = 1.0) -> KernelProblem:
    """Assemble the saddle problem from a dataset.

    Gram matrices are normalized to unit diagonal, so each trace equals
    ``n_tr`` and the default mixing constant is ``c = sum_l r_l``.
    """
    if not lam > 0:
        raise ParameterError(f"need lam > 0, got {lam}")
    b = dataset.labels
    grams = [normalize_gram(gram_matrix(kind, dataset.points, bandwidth))
             for kind in kernels]
    G_list = [np.outer(b, b) * K for K in grams]
    r = np.array([np.trace(K) for K in grams])
    c_val = float(r.sum()) if c is None else float(c)
    B_val = default_dual_bound(dataset.n_tr, lam) if B is None else float(B)
    if not B_val > 0:
        raise ParameterError(f"need B > 0, got {B_val}")
    partition = BlockPartition.even(dataset.n_tr, m_blocks)
    return KernelProblem(G_list, b, lam, c_val, r, partition, B_val,
                         fold_quadratic_into_f=fold_quadratic_into_f,
                         dual_geometry=dual_geometry,
                         lipschitz_scale=lipschitz_scale)


def dual_start(problem: KernelProblem) -> np.ndarray:
    """Interior starting dual point: uniform weights, zero multiplier."""
    return np.concatenate([np.full(problem.M, 1.0 / problem.M), [0.0]])


def kernel_coupling_sample_check(problem: KernelProblem, draws: int = 200,
                                 seed: int = 0) -> dict:
    """Sampled ratio of observed dual-gradient variation to the stated
    per-block coupling constant.

    Draws live where the constants are meant to hold: the blocked
    variable inside the nonnegative B-ball, perturbations at block scale
    ``~B/m``.  A ratio above 1 flags that the closed-form constant
    under-covers.
    """
    rng = np.random.default_rng(seed)
    part = problem.partition
    worst = 0.0
    for _ in range(draws):
        x = problem.project_primal_domain(rng.standard_normal(part.n) * problem.B
                                          / np.sqrt(part.n))
        i = int(rng.integers(part.m))
        sl = part.block_slice(i)
        v = rng.standard_normal(part.sizes[i])
        v *= (problem.B / part.m) / max(np.linalg.norm(v), 1e-12)
        xv = x.copy()
        xv[sl] = np.maximum(xv[sl] + v, 0.0)
        v_eff = xv[sl] - x[sl]
        nv = float(np.linalg.norm(v_eff))
        if nv < 1e-12:
            continue
        yz = dual_start(problem)
        diff = problem.grad_y(xv, yz) - problem.grad_y(x, yz)
        worst = max(worst, float(np.linalg.norm(diff)) / (problem.constants.L_yx[i] * nv))
    return {"max_ratio": worst, "flag": worst > 1.0}


# ---------------------------------------------------------------------------
# gram persistence: magic, u32 n, u32 M, then M row-major f64 matrices
# ---------------------------------------------------------------------------

def save_grams(path, grams) -> None:
    grams = [np.ascontiguousarray(G, dtype="<f8") for G in grams]
    n = grams[0].shape[0]
    if any(G.shape != (n, n) for G in grams):
        raise DimensionError("all gram matrices must be square of equal size")
    with open(path, "wb") as fh:
        fh.write(GRAM_MAGIC)
        fh.write(struct.pack("<II", n, len(grams)))
        for G in grams:
            fh.write(G.tobytes(order="C"))


def load_grams(path) -> list:
    with open(path, "rb") as fh:
        magic = fh.read(6)
        if magic != GRAM_MAGIC:
            raise DomainError(f"not a gram file (magic {magic!r})")
        n, M = struct.unpack("<II", fh.read(8))
        out = []
        for _ in range(M):
            buf = fh.read(8 * n * n)
            if len(buf) != 8 * n * n:
                raise DomainError("gram file truncated")
            out.append(np.frombuffer(buf, dtype="<f8").reshape(n, n).copy())
    return out
