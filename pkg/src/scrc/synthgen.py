"""Seeded EMG-like multichannel streams with exact per-sample truth.

Each class owns a :class:`ClassSignature`: per-channel frequency bands and
amplitudes.  A class's activity is band-limited Gaussian noise (white noise
masked in the frequency domain), and consecutive segments are joined with a
linear cross-fade that belongs to the destination segment.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .recording import (
    DEFAULT_CHANNELS,
    DEFAULT_SAMPLE_RATE,
    EXTERNAL_LABELS,
    RELAX,
    MultichannelRecording,
    gesture_label,
)


@dataclass(frozen=True)
class ClassSignature:
    """Per-channel bands (fractions of the sample rate) and amplitudes."""

    bands: np.ndarray
    amplitudes: np.ndarray
    floor: float = 0.0

    def __post_init__(self):
        bands = np.atleast_2d(np.asarray(self.bands, dtype=float))
        amps = np.asarray(self.amplitudes, dtype=float).ravel()
        if bands.shape != (amps.size, 2):
            raise ParameterError("bands must be (channels, 2) matching amplitudes")
        lo, hi = bands[:, 0], bands[:, 1]
        if np.any(lo < 0) or np.any(hi > 0.5) or np.any(lo >= hi):
            raise ParameterError("each band needs 0 <= low < high <= 0.5")
        if np.any(amps < 0) or self.floor < 0:
            raise ParameterError("amplitudes must be non-negative")
        object.__setattr__(self, "bands", bands)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def channels(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class Segment:
    label: int
    duration: int
    ramp: int = 0


@dataclass(frozen=True)
class ScriptedSequence:
    segments: tuple

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(
            s if isinstance(s, Segment) else Segment(*s) for s in self.segments))
        if not self.segments:
            raise ParameterError("a script needs at least one segment")
        for s in self.segments:
            if s.duration < 1 or s.ramp < 0 or s.ramp > s.duration:
                raise ParameterError(f"bad segment {s}")

    def __len__(self):
        return len(self.segments)

    @classmethod
    def from_json(cls, obj):
        """Accept ``{"segments": [{"label":..,"duration":..,"ramp":..}, ...]}`` or a bare list."""
        segs = obj["segments"] if isinstance(obj, dict) else obj
        return cls(tuple(Segment(int(s["label"]), int(s["duration"]), int(s.get("ramp", 0)))
                         for s in segs))

    def to_json(self):
        return {"segments": [{"label": s.label, "duration": s.duration, "ramp": s.ramp}
                             for s in self.segments]}


@dataclass
class SynthConfig:
    channels: int = DEFAULT_CHANNELS
    sample_rate: float = DEFAULT_SAMPLE_RATE
    window_len: int = 100
    half_period: int = 100
    ramp: int = 4
    return_len: int = 0  # antagonist burst opening each relax segment after a gesture
    signatures: dict = field(default_factory=dict)
    return_signatures: dict = field(default_factory=dict)

    def signature(self, label: int) -> ClassSignature:
        if not self.signatures:
            self.signatures = default_signatures(self.channels)
        try:
            return self.signatures[label]
        except KeyError:
            raise ParameterError(f"no signature for label {label}") from None

    def return_signature(self, label: int) -> ClassSignature:
        if not self.return_signatures:
            self.return_signatures = default_return_signatures(self.channels)
        try:
            return self.return_signatures[label]
        except KeyError:
            raise ParameterError(f"no return signature for label {label}") from None

    @property
    def relax_len(self) -> int:
        # the burst must leave the window before the next onset
        return max(self.half_period, self.window_len) + self.return_len


def default_signatures(channels: int = DEFAULT_CHANNELS, width: float = 0.005,
                       relax_amplitude: float = 0.05, floor: float = 0.02) -> dict:
    """Relax is a quiet broadband floor; each gesture drives a group of three
    channels, each channel in its own narrow band."""
    sigs = {RELAX: ClassSignature(np.tile([0.0, 0.5], (channels, 1)),
                                  np.full(channels, relax_amplitude))}
    centers = [0.07, 0.15, 0.23, 0.31, 0.39]
    for g in range(1, 6):
        bands = np.empty((channels, 2))
        amps = np.zeros(channels)
        for ch in range(channels):
            c = centers[(g - 1 + 2 * ch) % 5]
            bands[ch] = [c - width / 2, c + width / 2]
        amps[[(g - 1 + j) % channels for j in (0, 3, 5)]] = 1.0
        sigs[gesture_label(g)] = ClassSignature(bands, amps, floor=floor)
    return sigs


def default_return_signatures(channels: int = DEFAULT_CHANNELS, gain: float = 3.0) -> dict:
    """Short strong bursts on the channels opposite each gesture's group."""
    centers = [0.10, 0.18, 0.26, 0.34, 0.42]
    width = 0.06
    sigs = {}
    for g in range(1, 6):
        bands = np.empty((channels, 2))
        amps = np.zeros(channels)
        for ch in range(channels):
            c = centers[(g + ch) % 5]
            bands[ch] = [c - width / 2, c + width / 2]
        amps[[(g - 1 + channels // 2 + j) % channels for j in (0, 1, 3)]] = gain
        sigs[gesture_label(g)] = ClassSignature(bands, amps)
    return sigs


def band_limited_noise(rng, length, band, sample_rate=1.0):
    """Unit-RMS Gaussian noise restricted to ``band`` (fractions of the rate)."""
    white = rng.standard_normal(length)
    spec = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(length)
    lo, hi = band
    spec[(freqs < lo) | (freqs > hi)] = 0.0
    out = np.fft.irfft(spec, n=length)
    rms = np.sqrt(np.mean(out ** 2))
    return out / rms if rms > 0 else out


def _class_stream(key, sig, length, seed):
    rng = np.random.default_rng([seed, *np.atleast_1d(key)])
    out = np.empty((length, sig.channels))
    for ch in range(sig.channels):
        out[:, ch] = sig.amplitudes[ch] * band_limited_noise(rng, length, sig.bands[ch])
        if sig.floor:
            out[:, ch] += sig.floor * rng.standard_normal(length)
    return out


def _weights(script: ScriptedSequence, length, return_len=0):
    """Per-stream mixing weights; keys are labels or ``(label, 1)`` for return bursts."""
    w = {}
    truth = np.empty(length, dtype=int)
    pos = 0
    prev = None
    for seg in script.segments:
        end = pos + seg.duration
        truth[pos:end] = seg.label
        w.setdefault(seg.label, np.zeros(length))[pos:end] = 1.0
        if prev is not None and seg.ramp and prev != seg.label:
            frac = np.arange(1, seg.ramp + 1) / (seg.ramp + 1)
            w[seg.label][pos:pos + seg.ramp] = frac
            w[prev][pos:pos + seg.ramp] = 1.0 - frac
        if return_len and seg.label == RELAX and prev not in (None, RELAX):
            w.setdefault((prev, 1), np.zeros(length))[pos:pos + min(return_len, seg.duration)] = 1.0
        prev = seg.label
        pos = end
    return w, truth


def gen_sequence(script: ScriptedSequence, cfg: SynthConfig | None = None, seed: int = 0):
    """Render a script; returns ``(MultichannelRecording, per-sample truth)``."""
    cfg = cfg or SynthConfig()
    length = sum(s.duration for s in script.segments)
    w, truth = _weights(script, length, cfg.return_len)
    samples = np.zeros((length, cfg.channels))
    for key, weight in sorted(w.items(), key=lambda kv: np.atleast_1d(kv[0]).tolist()):
        if isinstance(key, tuple):
            sig = cfg.return_signature(key[0])
        elif key in EXTERNAL_LABELS:
            sig = cfg.signature(key)
        else:
            raise ParameterError(f"label {key} outside 1..6")
        samples += weight[:, None] * _class_stream(key, sig, length, seed)
    return MultichannelRecording(samples, cfg.sample_rate), truth


def couple_script(gesture_id: int, cycles: int, cfg: SynthConfig | None = None) -> ScriptedSequence:
    cfg = cfg or SynthConfig()
    if cycles < 2:
        raise ParameterError("a couple needs at least 2 cycles")
    if not 1 <= gesture_id <= 5:
        raise ParameterError(f"gesture id {gesture_id} outside 1..5")
    act = gesture_label(gesture_id)
    segs = []
    for _ in range(cycles):
        segs.append(Segment(act, cfg.half_period, cfg.ramp))
        segs.append(Segment(RELAX, cfg.relax_len, cfg.ramp))
    return ScriptedSequence(tuple(segs))


def gen_couple(gesture_id: int, cycles: int = 6, cfg: SynthConfig | None = None, seed: int = 0):
    """Alternate gesture and relax with ``half_period``-sample segments."""
    return gen_sequence(couple_script(gesture_id, cycles, cfg), cfg, seed)


def round_robin_script(gestures=(1, 2, 3, 4, 5), cfg: SynthConfig | None = None, seed=None):
    """Each gesture once, separated by relax; durations jittered when ``seed`` is given."""
    cfg = cfg or SynthConfig()
    rng = np.random.default_rng(seed) if seed is not None else None
    segs = []
    for g in gestures:
        d = cfg.half_period
        if rng is not None:
            d += int(rng.integers(0, cfg.half_period // 2 + 1))
        segs.append(Segment(gesture_label(g), d, cfg.ramp))
        segs.append(Segment(RELAX, cfg.relax_len, cfg.ramp))
    return ScriptedSequence(tuple(segs))


def segment_count(truth: np.ndarray) -> int:
    truth = np.asarray(truth)
    return int(1 + np.count_nonzero(truth[1:] != truth[:-1])) if truth.size else 0


def spectral_centroid(x: np.ndarray) -> float:
    """Power-weighted mean frequency (fraction of the rate) of a 1-d signal."""
    x = np.asarray(x, dtype=float) - np.mean(x)
    p = np.abs(np.fft.rfft(x)) ** 2
    f = np.fft.rfftfreq(x.size)
    return float(np.sum(f * p) / np.sum(p))
