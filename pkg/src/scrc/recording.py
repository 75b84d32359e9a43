"""Multichannel recordings and the external label numbering."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericError

DEFAULT_SAMPLE_RATE = 200.0
DEFAULT_CHANNELS = 8

RELAX, FIST, WAVE_IN, WAVE_OUT, SPREAD, DOUBLE_TAP = 1, 2, 3, 4, 5, 6
EXTERNAL_LABELS = {
    RELAX: "relax",
    FIST: "fist",
    WAVE_IN: "wave_in",
    WAVE_OUT: "wave_out",
    SPREAD: "spread",
    DOUBLE_TAP: "double_tap",
}


def gesture_label(gesture_id: int) -> int:
    """External label of gesture couple ``gesture_id`` (1 = fist ... 5 = double tap)."""
    return gesture_id + 1


@dataclass(frozen=True)
class MultichannelRecording:
    """Samples of shape ``(L, channels)`` plus the sampling rate in Hz."""

    samples: np.ndarray
    sample_rate: float = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim == 1:
            s = s[:, None]
        if s.ndim != 2:
            raise DimensionError("samples must be (L, channels)")
        if not np.all(np.isfinite(s)):
            raise NumericError("recording contains non-finite samples")
        object.__setattr__(self, "samples", s)

    @property
    def length(self) -> int:
        return self.samples.shape[0]

    @property
    def channels(self) -> int:
        return self.samples.shape[1]

    def times(self) -> np.ndarray:
        return np.arange(self.length) / self.sample_rate
