"""Circulant-eigenvalue features of fixed-length signal windows.

A window ``a = [v0, ..., v_{n-1}]`` generates the right circulant whose row
``i`` is row 0 circularly shifted right by ``i`` places.  That matrix is
diagonalized by the unitary DFT matrix, so its eigenvalues are the
unnormalized DFT of ``a`` with kernel ``exp(-2*pi*i/n)``, in the same order
as ``diag(F^H C F)``.  The fast path never builds the matrix; the dense path
exists as a test oracle.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AlignmentError, DimensionError, NumericError, OracleCapError

DENSE_ORACLE_CAP = 256


@dataclass(frozen=True)
class SignalWindow:
    samples: np.ndarray
    start_index: int = 0
    channel_id: int = 0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size < 2:
            raise DimensionError("a window needs at least 2 samples")
        if not np.all(np.isfinite(samples)):
            raise NumericError("window contains non-finite samples")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.samples.size


@dataclass(frozen=True)
class CirculantMatrix:
    """Right circulant generated by its first row.

    Only ``first_row`` is stored; :meth:`materialize` builds the dense matrix
    and is meant for tests and small oracles.
    """

    first_row: np.ndarray

    @property
    def order(self) -> int:
        return self.first_row.size

    def materialize(self) -> np.ndarray:
        n = self.order
        idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
        return self.first_row[idx]


@dataclass(frozen=True)
class SpectralFeatureVector:
    values: np.ndarray
    window_start: int = 0
    channels: int = field(default=1)

    def __len__(self):
        return self.values.size

    def block(self, channel: int) -> np.ndarray:
        n = self.values.size // self.channels
        return self.values[channel * n:(channel + 1) * n]


def circulant_from_vector(a) -> CirculantMatrix:
    a = np.asarray(a, dtype=float).ravel()
    if a.size == 0:
        raise DimensionError("cannot build a circulant from an empty vector")
    if not np.all(np.isfinite(a)):
        raise NumericError("generator contains non-finite entries")
    return CirculantMatrix(a)


def dft_matrix(n: int) -> np.ndarray:
    """Unitary DFT matrix with entries ``W**(j*k) / sqrt(n)``, ``W = exp(-2*pi*i/n)``."""
    if n < 1:
        raise DimensionError("DFT order must be positive")
    jk = np.outer(np.arange(n), np.arange(n))
    return np.exp(-2j * np.pi * jk / n) / np.sqrt(n)


def eigenvalues_fast(a) -> np.ndarray:
    """Eigenvalues of ``circ(a)`` in O(n log n), ordered as ``diag(F^H C F)``."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size < 2:
        raise DimensionError("need a 1-d generator of length >= 2")
    if not np.all(np.isfinite(a)):
        raise NumericError("generator contains non-finite entries")
    return np.fft.fft(a)


def eigenvalues_dense(c: CirculantMatrix, cap: int = DENSE_ORACLE_CAP) -> np.ndarray:
    """Reference eigenvalues from a general dense eigensolver (unordered)."""
    if c.order > cap:
        raise OracleCapError(f"dense oracle refused for order {c.order} > cap {cap}")
    return np.linalg.eigvals(c.materialize())


def circular_shift(a, s: int) -> np.ndarray:
    return np.roll(np.asarray(a), s, axis=-1)


def center(windows: np.ndarray) -> np.ndarray:
    """Subtract each window's own mean along the last axis."""
    return windows - windows.mean(axis=-1, keepdims=True)


def extract_features(windows: Sequence[SignalWindow], centering: bool = True) -> SpectralFeatureVector:
    """Per-channel circulant eigenvalues, concatenated in channel order."""
    if len(windows) == 0:
        raise DimensionError("need at least one channel window")
    n = len(windows[0])
    start = windows[0].start_index
    for w in windows[1:]:
        if len(w) != n:
            raise AlignmentError(f"channel {w.channel_id} has length {len(w)}, expected {n}")
        if w.start_index != start:
            raise AlignmentError(
                f"channel {w.channel_id} starts at {w.start_index}, expected {start}")
    block = np.stack([w.samples for w in windows])
    if centering:
        block = center(block)
    values = np.concatenate([eigenvalues_fast(row) for row in block])
    return SpectralFeatureVector(values, start, len(windows))


def spectral_features(windows: np.ndarray, centering: bool = True) -> np.ndarray:
    """Batch form of :func:`extract_features`.

    ``windows`` has shape ``(..., channels, n)``; the result has shape
    ``(..., channels * n)`` and is complex.
    """
    windows = np.asarray(windows, dtype=float)
    if windows.shape[-1] < 2:
        raise DimensionError("window length must be >= 2")
    if not np.all(np.isfinite(windows)):
        raise NumericError("windows contain non-finite samples")
    if centering:
        windows = center(windows)
    spec = np.fft.fft(windows, axis=-1)
    return spec.reshape(*spec.shape[:-2], -1)


def time_features(windows: np.ndarray, centering: bool = True) -> np.ndarray:
    """Raw (optionally centered) windows concatenated across channels.

    This is the time-domain CRC_RLS baseline observation.
    """
    windows = np.asarray(windows, dtype=float)
    if centering:
        windows = center(windows)
    return windows.reshape(*windows.shape[:-2], -1)
