"""Closed-form collaborative representation classifier (CRC_RLS).

Works unchanged over real time-domain features and complex spectral
features: every transpose is a conjugate transpose, which degenerates to a
plain transpose on real data.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DegenerateColumnError, DimensionError, ParameterError


@dataclass(frozen=True)
class Dictionary:
    """Conditioned training columns with their class ids (1..K)."""

    columns: np.ndarray
    class_of: np.ndarray
    class_count: int
    column_norms: np.ndarray
    column_mean: np.ndarray

    @property
    def shape(self):
        return self.columns.shape

    def class_indices(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.class_of == label)


@dataclass(frozen=True)
class RegressionOperator:
    P: np.ndarray
    sigma: float


@dataclass(frozen=True)
class ResidualVector:
    r: np.ndarray
    label: int
    margin: float


def default_sigma(columns: np.ndarray) -> float:
    """``0.01 * m / N`` scaled by the mean squared column norm."""
    m, N = columns.shape
    energy = float(np.mean(np.sum(np.abs(columns) ** 2, axis=0)))
    return 0.01 * (m / N) * energy


def regression_operator(A: np.ndarray, sigma: float) -> RegressionOperator:
    """``P = (A^H A + sigma I)^-1 A^H`` via a Cholesky solve, never an inverse."""
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    AH = A.conj().T
    gram = AH @ A
    gram[np.diag_indices_from(gram)] += sigma
    factor = linalg.cho_factor(gram, lower=True, check_finite=True)
    P = linalg.cho_solve(factor, AH, check_finite=False)
    return RegressionOperator(P, float(sigma))


def build_dictionary(raw_columns, class_of, sigma=None, center=True, normalize=True):
    """Condition the training columns and precompute the regression operator.

    Parameters
    ----------
    raw_columns : array, shape (m, N)
        One training observation per column, real or complex.
    class_of : sequence of int, length N
        Internal class id of each column, ids must cover 1..K.
    sigma : float, optional
        Ridge weight; :func:`default_sigma` of the conditioned columns when omitted.
    center, normalize : bool
        Subtract the mean column, then scale every column to unit norm.

    Returns
    -------
    (Dictionary, RegressionOperator)
    """
    A = np.array(raw_columns, copy=True)
    if A.ndim != 2:
        raise DimensionError("raw_columns must be a 2-d matrix")
    if not np.iscomplexobj(A):
        A = A.astype(float)
    m, N = A.shape
    class_of = np.asarray(class_of, dtype=int).ravel()
    if class_of.size != N:
        raise DimensionError(f"class_of has {class_of.size} entries for {N} columns")
    K = int(class_of.max()) if N else 0
    if K < 2 or N < K:
        raise ParameterError(f"need N >= K >= 2, got N={N}, K={K}")
    missing = sorted(set(range(1, K + 1)) - set(class_of.tolist()))
    if missing or class_of.min() < 1:
        raise ParameterError(f"class ids must cover 1..{K}; missing {missing}")
    if sigma is not None and not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")

    mean = A.mean(axis=1) if center else np.zeros(m, dtype=A.dtype)
    A -= mean[:, None]
    norms = np.linalg.norm(A, axis=0)
    if normalize:
        scale = np.max(norms) if N else 0.0
        bad = np.flatnonzero(norms <= 1e-12 * max(scale, 1e-300))
        if bad.size:
            raise DegenerateColumnError(int(bad[0]))
        A /= norms
    if sigma is None:
        sigma = default_sigma(A)
    dictionary = Dictionary(A, class_of, K, norms, mean)
    return dictionary, regression_operator(A, sigma)


def code(op: RegressionOperator, y) -> np.ndarray:
    """Ridge code ``x_hat = P y``; ``y`` may hold several observations as columns."""
    y = np.asarray(y)
    if y.shape[0] != op.P.shape[1]:
        raise DimensionError(f"observation length {y.shape[0]} != {op.P.shape[1]}")
    return op.P @ y


def class_residuals(dictionary: Dictionary, x_hat, y) -> np.ndarray:
    """Per-class residuals ``||y - A delta_i(x_hat)||_2``.

    Vector inputs give a length-K vector, matrix inputs (one observation
    per column) give a ``(K, B)`` array.
    """
    A = dictionary.columns
    y = np.asarray(y)
    x_hat = np.asarray(x_hat)
    if y.shape[0] != A.shape[0] or x_hat.shape[0] != A.shape[1]:
        raise DimensionError("x_hat / y do not match the dictionary")
    out = np.empty((dictionary.class_count,) + y.shape[1:])
    for i in range(dictionary.class_count):
        idx = dictionary.class_indices(i + 1)
        out[i] = np.linalg.norm(y - A[:, idx] @ x_hat[idx], axis=0)
    return out


def _decide(r: np.ndarray):
    # argmin returns the first minimum, i.e. the smallest class id on ties
    label = np.argmin(r, axis=0)
    part = np.partition(r, 1, axis=0)
    return label + 1, part[1] - part[0]


def classify(dictionary: Dictionary, x_hat, y) -> ResidualVector:
    r = class_residuals(dictionary, x_hat, y)
    label, margin = _decide(r)
    return ResidualVector(r, int(label), float(margin))


def classify_one_shot(dictionary: Dictionary, op: RegressionOperator, y) -> ResidualVector:
    return classify(dictionary, code(op, y), y)


def classify_batch(dictionary: Dictionary, op: RegressionOperator, Y):
    """Classify the columns of ``Y``; returns ``(labels, margins, residuals)``."""
    Y = np.asarray(Y)
    if Y.ndim != 2:
        raise DimensionError("Y must hold one observation per column")
    r = class_residuals(dictionary, code(op, Y), Y)
    labels, margins = _decide(r)
    return labels, margins, r
