"""Ordered subspace clustering of temporally ordered feature columns.

The self-expression problem solved here is::

    min_Z  1/2 ||X - X Z||_F^2 + lambda1 ||Z||_1 + lambda2 ||Z R||_{1,2}
    s.t.   diag(Z) = 0

with ``R`` the ``N x (N-1)`` forward difference on columns, so ``Z R`` holds
the differences between the codes of neighbouring samples.  The group term
is split off through ``U ~ Z R`` with a quadratic coupling of weight
``coupling`` and the pair is minimized alternately: an exact group
shrinkage for ``U`` and one linearized proximal (soft-threshold) step for
``Z``.  Every sweep is a descent step on the coupled objective.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components
from sklearn.cluster import KMeans

from .errors import DimensionError, ParameterError


@dataclass
class OSCConfig:
    lambda1: float = 0.1
    lambda2: float = 0.1
    penalty: str = "l12"  # or "fro" for the plain Frobenius ablation
    coupling: float = 10.0
    max_iter: int = 200
    tol: float = 1e-5
    stride: int = 4  # cluster every stride-th window, propagate to the rest
    seed: int = 0
    debug: bool = False


@dataclass(frozen=True)
class SelfExpressionProblem:
    X: np.ndarray
    lambda1: float = 0.1
    lambda2: float = 0.1
    k: int = 2

    def __post_init__(self):
        X = np.asarray(self.X)
        if X.ndim != 2:
            raise DimensionError("X must be a matrix with one sample per column")
        if X.shape[1] < 2 * self.k:
            raise DimensionError(f"need at least {2 * self.k} columns, got {X.shape[1]}")
        if not (self.lambda1 > 0 and self.lambda2 >= 0):
            raise ParameterError("lambda1 must be positive and lambda2 non-negative")
        object.__setattr__(self, "X", X)


@dataclass(frozen=True)
class Affinity:
    Z: np.ndarray
    W: np.ndarray
    converged: bool = True
    iterations: int = 0
    objective: tuple = ()


@dataclass(frozen=True)
class ClusterAssignment:
    labels: np.ndarray
    k: int
    components: int = 1
    disconnected: bool = False
    converged: bool = True
    meta: dict = field(default_factory=dict)

    def sizes(self):
        return np.bincount(self.labels, minlength=self.k + 1)[1:]


def normalize_columns(X: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(X, axis=0)
    norms[norms == 0] = 1.0
    return X / norms


def _diff(Z):
    return Z[:, 1:] - Z[:, :-1]


def _diff_adjoint(D):
    # D R^T for the forward difference R
    out = np.zeros((D.shape[0], D.shape[1] + 1), dtype=D.dtype)
    out[:, 1:] += D
    out[:, :-1] -= D
    return out


def _soft(V, t):
    return np.sign(V) * np.maximum(np.abs(V) - t, 0.0)


def _group_shrink(V, t):
    norms = np.linalg.norm(V, axis=0)
    scale = np.maximum(1.0 - t / np.maximum(norms, 1e-300), 0.0)
    return V * scale


class _Objective:
    def __init__(self, G, lam1, lam2, beta, penalty):
        self.G, self.lam1, self.lam2, self.beta, self.penalty = G, lam1, lam2, beta, penalty
        self.trace = 0.5 * np.trace(G)

    def smooth_grad(self, Z, U, GZ):
        g = GZ - self.G
        if self.lam2 == 0:
            return g
        if self.penalty == "fro":
            return g + self.lam2 * _diff_adjoint(_diff(Z))
        return g + self.beta * _diff_adjoint(_diff(Z) - U)

    def __call__(self, Z, U, GZ):
        val = 0.5 * np.sum(Z * GZ) - np.trace(GZ) + self.trace
        val += self.lam1 * np.abs(Z).sum()
        if self.lam2 == 0:
            return val
        D = _diff(Z)
        if self.penalty == "fro":
            return val + 0.5 * self.lam2 * np.sum(D * D)
        val += self.lam2 * np.linalg.norm(U, axis=0).sum()
        return val + 0.5 * self.beta * np.sum((D - U) ** 2)


def solve_self_expression(problem: SelfExpressionProblem, cfg: OSCConfig | None = None) -> Affinity:
    """Sparse, temporally smooth self-expression ``X ~ X Z`` with ``diag(Z) = 0``.

    ``X`` is column-normalized first.  For complex ``X`` the code is kept
    real and the fit term uses ``Re(X^H X)``.
    """
    cfg = cfg or OSCConfig()
    if cfg.penalty not in ("l12", "fro"):
        raise ParameterError(f"unknown penalty {cfg.penalty!r}")
    X = normalize_columns(problem.X)
    G = np.ascontiguousarray(np.real(X.conj().T @ X))
    N = G.shape[0]
    lam1, lam2, beta = problem.lambda1, problem.lambda2, cfg.coupling
    f = _Objective(G, lam1, lam2, beta, cfg.penalty)

    diff_weight = beta if cfg.penalty == "l12" else lam2
    L = np.linalg.eigvalsh(G)[-1] + (4.0 * diff_weight if lam2 > 0 else 0.0)
    step = 1.0 / L

    Z = np.zeros((N, N))
    U = np.zeros((N, N - 1))
    GZ = np.zeros_like(Z)
    history = [f(Z, U, GZ)]
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        if lam2 > 0 and cfg.penalty == "l12":
            U = _group_shrink(_diff(Z), lam2 / beta)
        Z_new = _soft(Z - step * f.smooth_grad(Z, U, GZ), step * lam1)
        np.fill_diagonal(Z_new, 0.0)
        change = np.linalg.norm(Z_new - Z) / max(np.linalg.norm(Z_new), 1e-12)
        Z = Z_new
        GZ = G @ Z
        history.append(f(Z, U, GZ))
        if cfg.debug:
            assert history[-1] <= history[-2] + 1e-9 * max(1.0, abs(history[-2])), (
                f"objective increased at iteration {it}")
        if change < cfg.tol:
            converged = True
            break
    W = np.abs(Z) + np.abs(Z.T)
    return Affinity(Z, W, converged, it, tuple(history))


def reconstruction_error(X: np.ndarray, Z: np.ndarray) -> float:
    """``||X - X Z||_F / ||X||_F`` on the column-normalized data."""
    Xn = normalize_columns(np.asarray(X))
    return float(np.linalg.norm(Xn - Xn @ Z) / np.linalg.norm(Xn))


def relabel_by_first_appearance(labels: np.ndarray) -> np.ndarray:
    """Renumber labels 1..k in order of first appearance (column 0 gets 1)."""
    mapping = {}
    for lab in labels.tolist():
        if lab not in mapping:
            mapping[lab] = len(mapping) + 1
    return np.array([mapping[lab] for lab in labels.tolist()], dtype=int)


def spectral_cluster(affinity: Affinity | np.ndarray, k: int, seed: int = 0) -> ClusterAssignment:
    """Normalized-Laplacian spectral clustering followed by seeded k-means."""
    W = affinity.W if isinstance(affinity, Affinity) else np.asarray(affinity, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise DimensionError("affinity must be square")
    if not np.allclose(W, W.T) or np.any(W < 0):
        raise ParameterError("affinity must be symmetric and non-negative")
    N = W.shape[0]
    if N < k:
        raise DimensionError(f"cannot split {N} samples into {k} clusters")
    n_comp, _ = connected_components(W > 0, directed=False)

    d = W.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(np.maximum(d, 1e-12))
    M = inv_sqrt[:, None] * W * inv_sqrt[None, :]
    # largest eigenvectors of D^-1/2 W D^-1/2 are the smallest of the Laplacian
    _, vecs = np.linalg.eigh(M)
    emb = vecs[:, -k:][:, ::-1]
    emb = emb / np.maximum(np.linalg.norm(emb, axis=1, keepdims=True), 1e-12)
    km = KMeans(n_clusters=k, n_init=10, random_state=seed).fit(emb)
    labels = relabel_by_first_appearance(km.labels_)
    converged = affinity.converged if isinstance(affinity, Affinity) else True
    return ClusterAssignment(labels, k, n_comp, n_comp > k, converged)


def propagate_labels(sub_labels: np.ndarray, stride: int, total: int) -> np.ndarray:
    """Give every window the label of the nearest clustered window in time."""
    j = np.arange(total)
    nearest = np.minimum((j + stride // 2) // stride, sub_labels.size - 1)
    return sub_labels[nearest]


def cluster_couple(X: np.ndarray, cfg: OSCConfig | None = None, k: int = 2) -> ClusterAssignment:
    """Split a gesture-couple feature sequence (columns in time order) into ``k`` clusters."""
    cfg = cfg or OSCConfig()
    X = np.asarray(X)
    total = X.shape[1]
    stride = max(1, int(cfg.stride))
    sub = X[:, ::stride]
    problem = SelfExpressionProblem(sub, cfg.lambda1, cfg.lambda2, k)
    aff = solve_self_expression(problem, cfg)
    part = spectral_cluster(aff, k, cfg.seed)
    labels = relabel_by_first_appearance(propagate_labels(part.labels, stride, total))
    meta = {"iterations": aff.iterations, "stride": stride, "clustered": sub.shape[1]}
    return ClusterAssignment(labels, k, part.components, part.disconnected, aff.converged, meta)
